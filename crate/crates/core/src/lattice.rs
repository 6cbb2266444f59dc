//! Exact integer matrices, Hermite and Smith normal forms, and sublattices
//! of `Z^k`.
//!
//! All arithmetic is carried out with [`BigInt`]; nothing in this module can
//! overflow. Lattices are represented by their row-style Hermite normal form,
//! which is canonical: two sublattices are equal iff their HNF bases are
//! identical.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::abelian_group::AbelianGroup;
use crate::error::{Error, Result};
use crate::zerosum::GSequence;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<T>(rows: &[Vec<T>]) -> Self
    where
        T: Clone + Into<BigInt>,
    {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows in IntMat::from_rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Like [`IntMat::from_rows`] but with an explicit column count, so that
    /// zero-row matrices keep their width.
    pub fn from_bigint_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows in IntMat::from_bigint_rows");
            data.extend(row);
        }
        IntMat { rows: n, cols, data }
    }

    pub fn diagonal<T>(entries: &[T], rows: usize, cols: usize) -> Self
    where
        T: Clone + Into<BigInt>,
    {
        let mut m = Self::zeros(rows, cols);
        for (i, e) in entries.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = e.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in IntMat::mul");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// JSON array-of-arrays; entries that fit in an `i64` are numbers, larger
    /// ones are decimal strings.
    pub fn to_json(&self) -> Value {
        Value::Array((0..self.rows).map(|i| vec_to_json(self.row(i))).collect())
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

pub(crate) fn vec_to_json(v: &[BigInt]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| match x.to_i64() {
                Some(n) => Value::from(n),
                None => Value::from(x.to_string()),
            })
            .collect(),
    )
}

pub fn to_bigint_vec<T: Clone + Into<BigInt>>(v: &[T]) -> Vec<BigInt> {
    v.iter().cloned().map(Into::into).collect()
}

/// A sublattice of `Z^dim` stored as a basis in row-style Hermite normal
/// form: pivots strictly increase from row to row, pivot entries are
/// positive, and entries above a pivot lie in `[0, pivot)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    dim: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeBasis{}", self.to_matrix().to_json())
    }
}

impl LatticeBasis {
    /// The zero sublattice of `Z^dim`.
    pub fn zero(dim: usize) -> Self {
        LatticeBasis {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// `Z^dim` itself.
    pub fn full(dim: usize) -> Self {
        let mut l = Self::zero(dim);
        for i in 0..dim {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::one();
            l.rows.push(e);
            l.pivots.push(i);
        }
        l
    }

    pub fn from_generators<I>(dim: usize, gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<BigInt>>,
    {
        let mut l = Self::zero(dim);
        for g in gens {
            l.insert(g)?;
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    /// Product of the pivot entries. For a full-rank lattice this is the
    /// determinant, i.e. the index in `Z^dim`.
    pub fn pivot_product(&self) -> BigInt {
        self.rows.iter().zip(&self.pivots).map(|(r, &p)| r[p].clone()).product()
    }

    pub fn determinant(&self) -> Option<BigInt> {
        self.is_full_rank().then(|| self.pivot_product())
    }

    pub fn to_matrix(&self) -> IntMat {
        IntMat::from_bigint_rows(self.dim, self.rows.clone())
    }

    /// Adds a generator and restores Hermite normal form. Returns whether the
    /// lattice grew.
    pub fn insert(&mut self, v: Vec<BigInt>) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut v = v;
        let mut changed = false;
        let mut i = 0;
        while let Some(lead) = v.iter().position(|x| !x.is_zero()) {
            while i < self.rows.len() && self.pivots[i] < lead {
                i += 1;
            }
            if i == self.rows.len() || self.pivots[i] > lead {
                self.rows.insert(i, v);
                self.pivots.insert(i, lead);
                changed = true;
                break;
            }
            let row = &mut self.rows[i];
            let (a, b) = (row[lead].clone(), v[lead].clone());
            if b.is_multiple_of(&a) {
                let q = &b / &a;
                for (x, r) in v.iter_mut().zip(row.iter()).skip(lead) {
                    *x -= &q * r;
                }
            } else {
                // unimodular 2x2 step [[x, y], [-b/g, a/g]] on (row, v)
                let eg = a.extended_gcd(&b);
                let (ag, bg) = (&a / &eg.gcd, &b / &eg.gcd);
                for (x, r) in v.iter_mut().zip(row.iter_mut()).skip(lead) {
                    let new_r = &eg.x * &*r + &eg.y * &*x;
                    let new_v = &ag * &*x - &bg * &*r;
                    *r = new_r;
                    *x = new_v;
                }
                changed = true;
            }
            i += 1;
        }
        if changed {
            self.reduce();
        }
        Ok(changed)
    }

    fn reduce(&mut self) {
        for i in 0..self.rows.len() {
            let p = self.pivots[i];
            if self.rows[i][p].is_negative() {
                for x in self.rows[i].iter_mut() {
                    *x = -&*x;
                }
            }
            let (above, rest) = self.rows.split_at_mut(i);
            let pivot_row = &rest[0];
            let pivot = &pivot_row[p];
            for row in above.iter_mut() {
                let q = row[p].div_floor(pivot);
                if !q.is_zero() {
                    for (x, r) in row.iter_mut().zip(pivot_row.iter()).skip(p) {
                        *x -= &q * r;
                    }
                }
            }
        }
    }

    /// Membership by back-substitution against the echelon basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            if v[p].is_zero() {
                continue;
            }
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for (x, b) in v.iter_mut().zip(row.iter()).skip(p) {
                *x -= &q * b;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn is_sublattice_of(&self, other: &LatticeBasis) -> bool {
        self.dim == other.dim && self.rows.iter().all(|r| other.contains(r))
    }
}

/// Canonical row Hermite normal form of the row span of `m`. Zero rows are
/// dropped, so the result has exactly `rank(m)` rows.
pub fn hnf(m: &IntMat) -> LatticeBasis {
    let mut l = LatticeBasis::zero(m.cols());
    for i in 0..m.rows() {
        l.insert(m.row(i).to_vec()).expect("row length matches column count");
    }
    l
}

/// Smith normal form `left * m * right = diag(diagonal)` with unimodular
/// `left`, `right` and `d_1 | d_2 | ...`; zero diagonal entries come last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMat,
    pub right: IntMat,
}

pub fn snf(m: &IntMat) -> SmithForm {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a = m.row_vecs();
    let mut left = IntMat::identity(nr).row_vecs();
    // columns of `right` are tracked as rows of its transpose
    let mut right_t = IntMat::identity(nc).row_vecs();

    fn row_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        // rows[dst] -= q * rows[src]
        let (s, d) = if src < dst {
            let (lo, hi) = rows.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = rows.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        for (x, y) in d.iter_mut().zip(s.iter()) {
            *x -= q * y;
        }
    }
    fn col_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        for row in a.iter_mut() {
            let v = q * &row[src];
            row[dst] -= v;
        }
    }
    fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }

    let n = nr.min(nc);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            a.swap(t, bi);
            left.swap(t, bi);
            swap_cols(&mut a, t, bj);
            right_t.swap(t, bj);

            let mut clean = true;
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut left, i, t, &q);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &q);
                    row_axpy(&mut right_t, j, t, &q);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }

    let diagonal = (0..n).map(|i| a[i][i].clone()).collect();
    SmithForm {
        diagonal,
        left: IntMat::from_bigint_rows(nr, left),
        right: IntMat::from_bigint_rows(nc, right_t).transpose(),
    }
}

/// Integer kernel `{x in Z^n : m x = 0}` of an `r x n` matrix, as a lattice
/// in `Z^n`.
pub fn integer_kernel(m: &IntMat) -> LatticeBasis {
    let (r, n) = (m.rows(), m.cols());
    // rows (m^T e_i | e_i); the echelon rows with zero prefix span the kernel
    let mut aug = LatticeBasis::zero(r + n);
    for i in 0..n {
        let mut row: Vec<BigInt> = (0..r).map(|j| m.get(j, i).clone()).collect();
        row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        aug.insert(row).expect("augmented row length");
    }
    let mut kernel = LatticeBasis::zero(n);
    for (row, &p) in aug.rows.iter().zip(&aug.pivots) {
        if p >= r {
            kernel.insert(row[r..].to_vec()).expect("kernel row length");
        }
    }
    kernel
}

/// The kernel lattice of `Z^k -> G`, `e_i -> a_i`, computed as the projection
/// onto the first `k` coordinates of the integer kernel of `[A | -diag(n)]`.
pub fn kernel_lattice(group: &AbelianGroup, seq: &GSequence) -> Result<LatticeBasis> {
    if seq.group() != group {
        return Err(Error::ElementNotInGroup {
            element: seq.elems().first().map(|e| e.coords().to_vec()).unwrap_or_default(),
            factors: group.factors().to_vec(),
        });
    }
    for a in seq.elems() {
        if !group.contains(a) {
            return Err(Error::ElementNotInGroup {
                element: a.coords().to_vec(),
                factors: group.factors().to_vec(),
            });
        }
    }
    let k = seq.len();
    let r = group.rank();
    let mut block = IntMat::zeros(r, k + r);
    for (i, a) in seq.elems().iter().enumerate() {
        for (j, &c) in a.coords().iter().enumerate() {
            block.set(j, i, BigInt::from(c));
        }
    }
    for (j, &n) in group.factors().iter().enumerate() {
        block.set(j, k + j, -BigInt::from(n));
    }
    let full = integer_kernel(&block);
    let mut lattice = LatticeBasis::zero(k);
    for row in full.rows() {
        lattice.insert(row[..k].to_vec())?;
    }
    Ok(lattice)
}

/// Index of a sublattice; `Infinite` when the generators span a lattice of
/// smaller rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl LatticeIndex {
    pub fn is_one(&self) -> bool {
        matches!(self, LatticeIndex::Finite(n) if n.is_one())
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(n) => write!(f, "{n}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// `[L : span(gens)]`. Every generator must lie in `L`.
///
/// Both lattices live in the same rational subspace once the ranks agree, so
/// they share pivot columns and the index is the ratio of pivot products.
pub fn sublattice_index(gens: &[Vec<BigInt>], lattice: &LatticeBasis) -> Result<LatticeIndex> {
    let mut span = LatticeBasis::zero(lattice.dim());
    for g in gens {
        if !lattice.contains(g) {
            return Err(Error::VectorOutsideLattice(g.iter().map(ToString::to_string).collect()));
        }
        span.insert(g.clone())?;
    }
    if span.rank() < lattice.rank() {
        return Ok(LatticeIndex::Infinite);
    }
    Ok(LatticeIndex::Finite(span.pivot_product() / lattice.pivot_product()))
}
