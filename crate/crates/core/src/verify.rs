//! Sweeps over families of groups checking the bound, the equality
//! classification, strictness against the Davenport constant, and the
//! arithmetic lemmas on `d*`.

use serde::{Deserialize, Serialize};

use crate::abelian_group::{all_subgroups, quotient_invariants, AbelianGroup, Subgroup, DEFAULT_SUBGROUP_CAP};
use crate::error::Result;
use crate::lattice::{kernel_lattice, snf};
use crate::separating::{beta_sep, dstar_inequality, equality_case, BetaSepOptions};
use crate::zerosum::{davenport, GSequence};

pub const CSV_HEADER: &str = "factors;order;rank;dstar;davenport;betaSep;equalityCase;strict";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MainRow {
    pub group: AbelianGroup,
    pub order: u64,
    pub rank: usize,
    pub dstar: u64,
    pub davenport: Option<u64>,
    pub beta_sep: u64,
    pub equality_case: bool,
    pub strict: Option<bool>,
    pub ok: bool,
}

impl MainRow {
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_default();
        format!(
            "{};{};{};{};{};{};{};{}",
            self.group
                .factors()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            self.order,
            self.rank,
            self.dstar,
            opt(self.davenport.map(|d| d.to_string())),
            self.beta_sep,
            self.equality_case,
            opt(self.strict.map(|s| s.to_string())),
        )
    }

    pub fn to_text(&self) -> String {
        format!(
            "{:<16} |G|={:<3} d*={:<3} D={:<4} beta_sep={:<3} equality={:<5} {}",
            self.group.to_string(),
            self.order,
            self.dstar,
            self.davenport.map_or("-".to_string(), |d| d.to_string()),
            self.beta_sep,
            self.equality_case,
            if self.ok { "OK" } else { "FAIL" }
        )
    }
}

/// One row of the main bound table. A row is OK when
/// `beta_sep <= d* + 1`, equality holds exactly in the equality case,
/// `D >= d* + 1`, and `beta_sep < D` outside the equality case.
pub fn main_row(group: &AbelianGroup, opts: &BetaSepOptions, davenport_cap: u64) -> Result<MainRow> {
    let b = beta_sep(group, opts)?.value;
    let d = if group.order() <= davenport_cap {
        Some(davenport(group, davenport_cap)?.value)
    } else {
        None
    };
    let dstar = group.dstar();
    let eq = equality_case(group);
    let strict = d.map(|d| b < d);
    let ok = b <= dstar + 1 && (b == dstar + 1) == eq && d.is_none_or(|d| d > dstar) && (eq || strict != Some(false));
    Ok(MainRow {
        group: group.clone(),
        order: group.order(),
        rank: group.rank(),
        dstar,
        davenport: d,
        beta_sep: b,
        equality_case: eq,
        strict,
        ok,
    })
}

/// Every group with `|G| <= max_order` and rank `<= max_rank`.
pub fn verify_main(max_order: u64, max_rank: usize, opts: &BetaSepOptions, davenport_cap: u64) -> Result<Vec<MainRow>> {
    AbelianGroup::all_up_to(max_order, max_rank, true)
        .iter()
        .map(|g| main_row(g, opts, davenport_cap))
        .collect()
}

/// The groups outside the equality case, where `beta_sep < D` is expected.
pub fn verify_strict(
    max_order: u64,
    max_rank: usize,
    opts: &BetaSepOptions,
    davenport_cap: u64,
) -> Result<Vec<MainRow>> {
    AbelianGroup::all_up_to(max_order, max_rank, true)
        .iter()
        .filter(|g| !equality_case(g))
        .map(|g| {
            let mut row = main_row(g, opts, davenport_cap)?;
            row.ok &= row.strict == Some(true);
            Ok(row)
        })
        .collect()
}

/// Invariant factors of a subgroup, from the Smith form of the relation
/// lattice of its generators.
pub fn subgroup_invariants(group: &AbelianGroup, h: &Subgroup) -> Result<AbelianGroup> {
    let gens = h.generators().to_vec();
    if gens.is_empty() {
        return Ok(AbelianGroup::trivial());
    }
    let seq = GSequence::new(group, gens)?;
    let relations = kernel_lattice(group, &seq)?.to_matrix();
    let factors: Vec<u64> = snf(&relations)
        .diagonal
        .iter()
        .map(|d| u64::try_from(d.magnitude().clone()).expect("factor of a desk-scale group"))
        .filter(|&d| d > 1)
        .collect();
    AbelianGroup::make(&factors, true)
}

/// Whether `small` is `big` with exactly one factor removed.
pub fn is_one_factor_deleted(big: &[u64], small: &[u64]) -> bool {
    small.len() + 1 == big.len()
        && (0..big.len()).any(|j| {
            let mut rest = big.to_vec();
            rest.remove(j);
            rest == small
        })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaSweep {
    pub groups: usize,
    pub cyclic_quotient_checks: usize,
    pub cyclic_subgroup_checks: usize,
    pub sequence_checks: usize,
    pub violations: Vec<String>,
}

/// For every proper `H <= G` with `G/H` cyclic:
/// `d*(G) >= d*(H) + [G:H] - 1`, with equality only if `H` has the factors
/// of `G` minus one.
pub fn check_cyclic_quotients(group: &AbelianGroup, sweep: &mut LemmaSweep) -> Result<()> {
    for h in all_subgroups(group, DEFAULT_SUBGROUP_CAP)? {
        if h.order() == group.order() || quotient_invariants(group, &h)?.rank() > 1 {
            continue;
        }
        sweep.cyclic_quotient_checks += 1;
        let hs = subgroup_invariants(group, &h)?;
        let index = group.order() / h.order();
        let rhs = hs.dstar() + index - 1;
        if group.dstar() < rhs {
            sweep
                .violations
                .push(format!("{group}: d*(H) + [G:H] - 1 = {rhs} for H = {hs}"));
        } else if group.dstar() == rhs && !is_one_factor_deleted(group.factors(), hs.factors()) {
            sweep.violations.push(format!("{group}: equality with H = {hs}"));
        }
    }
    Ok(())
}

/// For every nontrivial cyclic `K <= G`: `d*(G) >= d*(G/K) + |K| - 1`,
/// with equality only if `G/K` has the factors of `G` minus one.
pub fn check_cyclic_subgroups(group: &AbelianGroup, sweep: &mut LemmaSweep) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for g in group.elements().iter().filter(|g| !g.is_zero()) {
        let k = Subgroup::trivial(group).join_element(group, g);
        if !seen.insert(k.members().clone()) {
            continue;
        }
        sweep.cyclic_subgroup_checks += 1;
        let q = quotient_invariants(group, &k)?;
        let rhs = q.dstar() + k.order() - 1;
        if group.dstar() < rhs {
            sweep
                .violations
                .push(format!("{group}: d*(G/K) + |K| - 1 = {rhs} for K = <{g}>"));
        } else if group.dstar() == rhs && !is_one_factor_deleted(group.factors(), q.factors()) {
            sweep.violations.push(format!("{group}: equality with G/K = {q}"));
        }
    }
    Ok(())
}

/// For every generating sequence of length `<= max_len`:
/// `d*(G) >= sum (d_i - 1)` over the chain orders, with equality only if the
/// chain orders other than 1 are the invariant factors. Subgroups are
/// bitmasks over element indices, so `|G| <= 64`.
pub fn check_generating_sequences(group: &AbelianGroup, max_len: usize, sweep: &mut LemmaSweep) {
    let n = group.order() as usize;
    assert!(n <= 64, "bitmask subgroups need |G| <= 64");
    let elements = group.elements();
    let add: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| group.index_of(&group.add(a, b))).collect())
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut factors = group.factors().to_vec();
    factors.sort_unstable();
    let dstar = group.dstar();

    struct Walk<'a> {
        add: &'a [Vec<usize>],
        n: usize,
        full: u64,
        max_len: usize,
        dstar: u64,
        factors: &'a [u64],
        orders: Vec<u64>,
        checks: usize,
        violations: Vec<String>,
    }

    impl Walk<'_> {
        fn shift(&self, h: u64, g: usize) -> u64 {
            (0..self.n)
                .filter(|&x| h >> x & 1 == 1)
                .fold(0, |acc, x| acc | 1 << self.add[x][g])
        }

        fn rec(&mut self, h: u64) {
            if h == self.full {
                self.checks += 1;
                let total: u64 = self.orders.iter().map(|d| d - 1).sum();
                let mut nontrivial: Vec<u64> = self.orders.iter().copied().filter(|&d| d > 1).collect();
                nontrivial.sort_unstable();
                if total > self.dstar {
                    self.violations
                        .push(format!("chain orders {:?} exceed d* = {}", self.orders, self.dstar));
                } else if total == self.dstar && nontrivial != self.factors {
                    self.violations
                        .push(format!("chain orders {:?} attain d* = {}", self.orders, self.dstar));
                }
            }
            if self.orders.len() == self.max_len {
                return;
            }
            for g in 0..self.n {
                let mut coset_sum = g;
                let mut d = 1;
                let mut next = h;
                while h >> coset_sum & 1 == 0 {
                    next |= self.shift(h, coset_sum);
                    coset_sum = self.add[coset_sum][g];
                    d += 1;
                }
                self.orders.push(d);
                self.rec(next);
                self.orders.pop();
            }
        }
    }

    let mut walk = Walk {
        add: &add,
        n,
        full,
        max_len,
        dstar,
        factors: &factors,
        orders: Vec::new(),
        checks: 0,
        violations: Vec::new(),
    };
    walk.rec(1);
    sweep.sequence_checks += walk.checks;
    sweep
        .violations
        .extend(walk.violations.into_iter().map(|v| format!("{group}: {v}")));
}

/// Runs all three subgroup checks on every group with `|G| <= max_order`;
/// generating sequences are enumerated up to `max_len` only for groups with
/// `|G| <= sequence_order`.
pub fn subgroup_lemmas(max_order: u64, sequence_order: u64, max_len: usize) -> Result<LemmaSweep> {
    let mut sweep = LemmaSweep::default();
    for group in AbelianGroup::all_up_to(max_order, usize::MAX, false) {
        sweep.groups += 1;
        check_cyclic_quotients(&group, &mut sweep)?;
        check_cyclic_subgroups(&group, &mut sweep)?;
        if group.order() <= sequence_order {
            check_generating_sequences(&group, max_len, &mut sweep);
        }
    }
    Ok(sweep)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalitySweep {
    pub pairs: usize,
    pub equalities: usize,
    pub violations: Vec<String>,
}

/// Every divisor chain `n` with `n_1 <= max_n1` and length `1..=max_r`
/// (entries at least 2), and every `m` with `m_i | n_i`, `n_{i+1} | m_i`.
pub fn dstar_inequality_sweep(max_n1: u64, max_r: usize) -> Result<InequalitySweep> {
    let mut sweep = InequalitySweep::default();
    for group in AbelianGroup::all_up_to(max_n1.pow(max_r as u32), max_r, false) {
        let n = group.factors();
        if n[0] > max_n1 {
            continue;
        }
        let r = n.len();
        let choices: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let below = if i + 1 < r { n[i + 1] } else { 1 };
                (1..=n[i]).filter(|m| n[i] % m == 0 && m % below == 0).collect()
            })
            .collect();
        let mut idx = vec![0; r];
        loop {
            let m: Vec<u64> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            let res = dstar_inequality(n, &m)?;
            sweep.pairs += 1;
            if res.equality {
                sweep.equalities += 1;
            }
            if !res.holds {
                sweep
                    .violations
                    .push(format!("n={n:?} m={m:?}: {} < {}", res.lhs, res.rhs));
            }
            if res.equality != res.equality_shape_index.is_some() {
                sweep.violations.push(format!(
                    "n={n:?} m={m:?}: equality {} vs shape {:?}",
                    res.equality, res.equality_shape_index
                ));
            }
            let mut pos = 0;
            while pos < r {
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == r {
                break;
            }
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: &[u64]) -> AbelianGroup {
        AbelianGroup::new(f).unwrap()
    }

    #[test]
    fn subgroup_invariants_examples() {
        let c42 = g(&[4, 2]);
        let h = crate::abelian_group::subgroup_closure(&c42, &[c42.element(&[2, 0]).unwrap(), c42.generator(1)]);
        assert_eq!(subgroup_invariants(&c42, &h).unwrap().factors(), &[2, 2]);
        let t = Subgroup::trivial(&c42);
        assert_eq!(subgroup_invariants(&c42, &t).unwrap(), AbelianGroup::trivial());
    }

    #[test]
    fn one_factor_deleted() {
        assert!(is_one_factor_deleted(&[4, 2], &[4]));
        assert!(is_one_factor_deleted(&[4, 2], &[2]));
        assert!(!is_one_factor_deleted(&[4, 2], &[2, 2]));
        assert!(is_one_factor_deleted(&[4], &[]));
    }

    #[test]
    fn small_sweeps_are_clean() {
        let s = subgroup_lemmas(12, 8, 3).unwrap();
        assert!(s.violations.is_empty(), "{:?}", s.violations);
        assert!(s.sequence_checks > 0 && s.cyclic_quotient_checks > 0);
        let ineq = dstar_inequality_sweep(8, 2).unwrap();
        assert!(ineq.violations.is_empty(), "{:?}", ineq.violations);
    }

    #[test]
    fn main_rows_small() {
        let rows = verify_main(8, 3, &BetaSepOptions::default(), 32).unwrap();
        assert!(rows.iter().all(|r| r.ok));
        let v4 = rows.iter().find(|r| r.group.factors() == [2, 2]).unwrap();
        assert_eq!(v4.to_csv(), "2,2;4;2;2;3;3;true;false");
    }
}
