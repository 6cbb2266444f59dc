//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::Rng;
use sepbound::abelian_group::subgroup_closure;
use sepbound::field_oracle::{cross_validate, DEFAULT_POINT_CAP};
use sepbound::separating::{
    check_separating_monomials, equality_case, extremal_sequence, min_separating_bound_for_subset, restrict_to_subset,
    strictness_report,
};
use sepbound::suites::{random_kernel_vector, random_monomial_instance, random_monomial_suite, random_sequence, rng};
use sepbound::verify::{dstar_inequality_sweep, subgroup_lemmas, verify_main};
use sepbound::zerosum::{construct_relation, decompose, enumerate_b};
use sepbound::{beta_sep, davenport, AbelianGroup, BetaSepOptions, Element, GSequence, LatticeBasis, Mode};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn g(f: &[u64]) -> AbelianGroup {
    AbelianGroup::new(f).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Equality case of the main bound, written out from the invariant factors:
/// cyclic, or `n_{s+1} = 2` with `s = ceil(r / 2)`.
fn expect_equality(n: &[u64]) -> bool {
    let r = n.len();
    r <= 1 || n[r.div_ceil(2)] == 2
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:.2?}, limit {limit:?}"))?;
    Ok(out)
}

fn beta(group: &AbelianGroup, opts: &BetaSepOptions) -> Result<u64, String> {
    beta_sep(group, opts).map(|r| r.value).map_err(err)
}

fn c1_cyclic() -> Outcome {
    timed(Duration::from_secs(10), "cyclic family", || {
        let opts = BetaSepOptions::default();
        for n in 2..=12u64 {
            let b = beta(&g(&[n]), &opts)?;
            ensure(b == n, || format!("C{n}: beta_sep {b}, expected {n}"))?;
        }
        Ok("beta_sep(C_n) = n for n = 2..12".into())
    })
}

fn equality_family() -> Vec<(AbelianGroup, u64, BetaSepOptions)> {
    let default = BetaSepOptions::default();
    let raised = BetaSepOptions {
        max_order: 64,
        max_rank: 4,
        aut_reduction: true,
        ..BetaSepOptions::default()
    };
    vec![
        (g(&[2, 2]), 3, default.clone()),
        (g(&[2, 2, 2]), 4, default.clone()),
        (g(&[4, 2]), 5, default.clone()),
        (g(&[6, 2]), 7, default),
        (g(&[4, 4, 2, 2]), 9, raised),
    ]
}

fn c2_equality() -> Outcome {
    let mut parts = Vec::new();
    for (group, expected, opts) in equality_family() {
        let b = timed(Duration::from_secs(60), &group.to_string(), || beta(&group, &opts))?;
        ensure(b == expected && b == group.dstar() + 1, || {
            format!("{group}: beta_sep {b}, expected {expected}")
        })?;
        parts.push(format!("{group}->{b}"));
    }
    Ok(parts.join(" "))
}

fn c3_strict() -> Outcome {
    let opts = BetaSepOptions::default();
    let mut parts = Vec::new();
    for (f, limit) in [(&[3u64, 3][..], 4u64), (&[3, 3, 3], 6), (&[4, 4], 6), (&[5, 5], 8)] {
        let group = g(f);
        let b = timed(Duration::from_secs(300), &group.to_string(), || beta(&group, &opts))?;
        ensure(b <= limit && b <= group.dstar(), || {
            format!("{group}: beta_sep {b} > {limit}")
        })?;
        parts.push(format!("{group}->{b}"));
    }
    Ok(parts.join(" "))
}

fn c4_strictness() -> Outcome {
    let opts = BetaSepOptions::default();
    let mut parts = Vec::new();
    for (f, d) in [(&[3u64, 3][..], 5u64), (&[4, 4], 7)] {
        let rep = strictness_report(&g(f), &opts, 32).map_err(err)?;
        ensure(rep.davenport == d, || {
            format!("{}: D = {}, expected {d}", rep.group, rep.davenport)
        })?;
        ensure(rep.beta_sep < rep.davenport && rep.strict, || {
            format!("{}: {} not < {}", rep.group, rep.beta_sep, d)
        })?;
        parts.push(format!("{}: {} < {}", rep.group, rep.beta_sep, rep.davenport));
    }
    Ok(parts.join(", "))
}

/// Checks that `atom` sums to zero and that no nonempty proper
/// sub-multiset does, by enumerating all multiplicity vectors.
fn is_atom_brute(group: &AbelianGroup, atom: &BTreeMap<Element, u64>) -> bool {
    let items: Vec<(&Element, u64)> = atom.iter().map(|(e, &c)| (e, c)).collect();
    let total: u64 = items.iter().map(|x| x.1).sum();
    let mut take = vec![0u64; items.len()];
    loop {
        let mut sum = group.zero();
        for ((e, _), &t) in items.iter().zip(&take) {
            sum = group.add(&sum, &group.scale(t as i64, e));
        }
        let len: u64 = take.iter().sum();
        if sum.is_zero() && len > 0 && len < total {
            return false;
        }
        if len == total {
            return sum.is_zero();
        }
        let mut i = 0;
        loop {
            if take[i] < items[i].1 {
                take[i] += 1;
                break;
            }
            take[i] = 0;
            i += 1;
        }
    }
}

fn c5_davenport() -> Outcome {
    timed(Duration::from_secs(120), "Davenport sweep", || {
        let mut exact = 0;
        let mut tested = 0;
        for group in AbelianGroup::all_up_to(32, usize::MAX, false) {
            let d = davenport(&group, 32).map_err(err)?;
            let len: u64 = d.witness_atom.values().sum();
            ensure(len == d.value && is_atom_brute(&group, &d.witness_atom), || {
                format!("{group}: witness is not an atom of length {}", d.value)
            })?;
            ensure(d.value > group.dstar(), || format!("{group}: D = {} <= d*", d.value))?;
            tested += 1;
            if group.order() <= 27 && (group.is_p_group() || group.rank() <= 2) {
                ensure(d.value == group.dstar() + 1, || {
                    format!("{group}: D = {}, d*+1 = {}", d.value, group.dstar() + 1)
                })?;
                exact += 1;
            }
        }
        Ok(format!("D = d*+1 on {exact} groups, D >= d*+1 on {tested}"))
    })
}

fn sum_is_zero(seq: &GSequence, v: &[i64]) -> bool {
    let group = seq.group();
    let mut s = group.zero();
    for (e, &c) in seq.elems().iter().zip(v) {
        s = group.add(&s, &group.scale(c, e));
    }
    s.is_zero()
}

fn c6_extremal() -> Outcome {
    let mut parts = Vec::new();
    for (group, _, _) in equality_family() {
        let seq = extremal_sequence(&group).map_err(err)?;
        let dstar = group.dstar();
        let bound = min_separating_bound_for_subset(&group, seq.elems()).map_err(err)?;
        ensure(bound == dstar + 1, || {
            format!("{group}: min bound {bound}, expected {}", dstar + 1)
        })?;

        let monomials: Vec<Vec<u64>> = enumerate_b(&seq, dstar, false)
            .into_iter()
            .map(|m| m.into_inner())
            .collect();
        let chars = sepbound::CharacterSequence::new(seq.clone());
        let verdict = check_separating_monomials(&chars, &monomials, Mode::Full).map_err(err)?;
        ensure(!verdict.separating, || format!("{group}: length <= d* set accepted"))?;
        let w = verdict
            .witness
            .ok_or_else(|| format!("{group}: rejection without witness"))?;
        let sub = seq.select(&w.subset);
        ensure(sum_is_zero(&sub, &w.vector), || {
            format!("{group}: witness vector is not a relation")
        })?;
        let span = LatticeBasis::from_generators(
            w.subset.len(),
            restrict_to_subset(&monomials, &w.subset)
                .into_iter()
                .map(|m| m.into_iter().map(BigInt::from).collect::<Vec<_>>()),
        )
        .map_err(err)?;
        let v: Vec<BigInt> = w.vector.iter().map(|&x| BigInt::from(x)).collect();
        ensure(!span.contains(&v), || {
            format!("{group}: witness vector lies in the span")
        })?;
        parts.push(format!("{group}:{bound}"));
    }
    Ok(parts.join(" "))
}

fn c7_helly() -> Outcome {
    let suite = random_monomial_suite(0x5e9, 500, 16, 5);
    let mut rejected = 0;
    for (i, inst) in suite.iter().enumerate() {
        let chars = inst.characters();
        let full = check_separating_monomials(&chars, &inst.monomials, Mode::Full).map_err(err)?;
        let helly = check_separating_monomials(&chars, &inst.monomials, Mode::Helly).map_err(err)?;
        ensure(full.separating == helly.separating, || {
            format!("instance {i} over {}: modes disagree", inst.group)
        })?;
        if !full.separating {
            rejected += 1;
        }
    }
    Ok(format!("500/500 agree ({rejected} non-separating)"))
}

fn c8_oracle() -> Outcome {
    timed(Duration::from_secs(120), "oracle suite", || {
        let mut r = rng(0x0c1e);
        let groups = AbelianGroup::all_up_to(8, usize::MAX, false);
        let mut retried = 0;
        for group in &groups {
            for i in 0..100 {
                let k = r.gen_range(1..=3);
                let inst = random_monomial_instance(&mut r, group, k, group.dstar() + 1);
                let cv = cross_validate(&inst.characters(), &inst.monomials, DEFAULT_POINT_CAP, None).map_err(err)?;
                ensure(cv.agree, || {
                    format!("{group} instance {i}: verdicts differ after {:?}", cv.primes_tried)
                })?;
                if cv.primes_tried.len() > 1 {
                    retried += 1;
                }
            }
        }
        Ok(format!(
            "{} groups x 100 agree ({retried} needed retries)",
            groups.len()
        ))
    })
}

/// Order of `seq[k]` modulo the subgroup generated by `seq[..k]`.
fn order_mod_prefix(seq: &GSequence, k: usize) -> u64 {
    let group = seq.group();
    let h: BTreeSet<Element> = subgroup_closure(group, &seq.elems()[..k]).members().clone();
    let a = &seq.elems()[k];
    (1..=group.order())
        .find(|&d| h.contains(&group.scale(d as i64, a)))
        .unwrap()
}

fn c9_constructive() -> Outcome {
    let mut r = rng(0xd1);
    let groups = AbelianGroup::all_up_to(32, usize::MAX, false);
    for i in 0..1000 {
        let group = &groups[r.gen_range(0..groups.len())];
        let k = r.gen_range(1..=6);
        let seq = random_sequence(&mut r, group, k);
        let m = construct_relation(&seq).map_err(err)?;
        let dk = order_mod_prefix(&seq, k - 1);
        let mv: Vec<i64> = m.as_slice().iter().map(|&x| x as i64).collect();
        ensure(m.as_slice()[k - 1] == dk, || {
            format!("relation {i} over {group}: m_k != d_k = {dk}")
        })?;
        ensure(m.length() <= group.dstar() + 1 && sum_is_zero(&seq, &mv), || {
            format!("relation {i} over {group}: bad m")
        })?;
    }

    let check = |seq: &GSequence, u: &[i64], bound: u64| -> Result<(), String> {
        let parts = decompose(seq, u, bound).map_err(|e| format!("{}: {e}", seq.group()))?;
        let mut acc = vec![0i64; u.len()];
        for (c, m) in &parts {
            ensure(m.length() <= bound && seq.is_zero_sum(m.as_slice()), || {
                format!("{}: bad part", seq.group())
            })?;
            for (a, &x) in acc.iter_mut().zip(m.as_slice()) {
                *a += c * x as i64;
            }
        }
        ensure(acc == u, || format!("{}: reconstruction of {u:?} failed", seq.group()))
    };
    for _ in 0..1000 {
        let group = &groups[r.gen_range(0..groups.len())];
        let k = r.gen_range(1..=5);
        let seq = random_sequence(&mut r, group, k);
        let u = random_kernel_vector(&mut r, &seq, 3).map_err(err)?;
        check(&seq, &u, group.dstar() + 1)?;
    }
    let strict: Vec<&AbelianGroup> = groups.iter().filter(|h| !expect_equality(h.factors())).collect();
    for group in &strict {
        for _ in 0..100 {
            let k = r.gen_range(1..=5);
            let seq = random_sequence(&mut r, group, k);
            let u = random_kernel_vector(&mut r, &seq, 3).map_err(err)?;
            check(&seq, &u, group.dstar())?;
        }
    }
    Ok(format!(
        "1000 relations, 1000 reconstructions at d*+1, {} strict groups x 100 at d*",
        strict.len()
    ))
}

fn c10_lemmas() -> Outcome {
    let sweep = dstar_inequality_sweep(24, 3).map_err(err)?;
    ensure(sweep.violations.is_empty(), || {
        format!("inequality: {:?}", sweep.violations)
    })?;
    // Independent restatement: equality iff m = n or m is n with one entry
    // deleted and a trailing 1 appended.
    let mut pairs = 0;
    for group in AbelianGroup::all_up_to(24usize.pow(3) as u64, 3, false) {
        let n = group.factors().to_vec();
        if n[0] > 24 {
            continue;
        }
        let divisors = |x: u64| (1..=x).filter(move |d| x.is_multiple_of(*d));
        let mut ms: Vec<Vec<u64>> = vec![vec![]];
        for i in 0..n.len() {
            let below = n.get(i + 1).copied().unwrap_or(1);
            ms = ms
                .into_iter()
                .flat_map(|p| {
                    divisors(n[i])
                        .filter(move |d| d % below == 0)
                        .map(move |d| [p.clone(), vec![d]].concat())
                })
                .collect();
        }
        for m in ms {
            let res = sepbound::separating::dstar_inequality(&n, &m).map_err(err)?;
            let lhs: u64 = n.iter().map(|x| x - 1).sum();
            let idx: u64 = n.iter().zip(&m).map(|(a, b)| a / b).product();
            let rhs = m.iter().map(|x| x - 1).sum::<u64>() + idx - 1;
            let deleted = (0..n.len()).any(|j| {
                let mut d: Vec<u64> = n.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
                d.push(1);
                d == m
            });
            let expect_eq = m == n || deleted;
            ensure(res.lhs == lhs && res.rhs == rhs && res.holds && lhs >= rhs, || {
                format!("n={n:?} m={m:?}: inequality")
            })?;
            ensure(res.equality == expect_eq && (lhs == rhs) == expect_eq, || {
                format!("n={n:?} m={m:?}: equality")
            })?;
            pairs += 1;
        }
    }
    ensure(pairs == sweep.pairs, || {
        format!("restatement saw {pairs} pairs, sweep {}", sweep.pairs)
    })?;

    let lemmas = subgroup_lemmas(48, 48, 4).map_err(err)?;
    ensure(lemmas.violations.is_empty(), || {
        format!("subgroups: {:?}", lemmas.violations)
    })?;
    Ok(format!(
        "{pairs} chain pairs; {} groups, {} quotient, {} subgroup, {} sequence checks",
        lemmas.groups, lemmas.cyclic_quotient_checks, lemmas.cyclic_subgroup_checks, lemmas.sequence_checks
    ))
}

fn main_bound_sweep() -> Outcome {
    let rows = verify_main(32, 4, &BetaSepOptions::default(), 32).map_err(err)?;
    for row in &rows {
        let n = row.group.factors();
        let dstar: u64 = n.iter().map(|x| x - 1).sum();
        ensure(row.beta_sep <= dstar + 1, || {
            format!("{}: beta_sep {} > d*+1", row.group, row.beta_sep)
        })?;
        ensure((row.beta_sep == dstar + 1) == expect_equality(n), || {
            format!("{}: equality mismatch", row.group)
        })?;
        ensure(equality_case(&row.group) == expect_equality(n), || {
            format!("{}: equality_case mismatch", row.group)
        })?;
        if !n.is_empty() && expect_equality(n) && !row.group.is_cyclic() {
            let seq = extremal_sequence(&row.group).map_err(err)?;
            let b = min_separating_bound_for_subset(&row.group, seq.elems()).map_err(err)?;
            ensure(b == dstar + 1, || format!("{}: extremal bound {b}", row.group))?;
        }
    }
    Ok(format!("{} groups with |G| <= 32", rows.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 cyclic equality", c1_cyclic),
        ("2 equality family", c2_equality),
        ("3 strict family", c3_strict),
        ("4 strictness against D(G)", c4_strictness),
        ("5 Davenport oracle", c5_davenport),
        ("6 extremal witness", c6_extremal),
        ("7 full vs helly criterion", c7_helly),
        ("8 lattice criterion vs field oracle", c8_oracle),
        ("9 constructive bounds", c9_constructive),
        ("10 arithmetic lemmas", c10_lemmas),
        ("main bound sweep", main_bound_sweep),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        match out {
            Ok(detail) => println!("PASS  {name} [{took:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{took:.2?}]: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
