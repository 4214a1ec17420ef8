//! Exact rational arithmetic and sparse linear algebra.
//!
//! Everything downstream (quotients of free Lie algebras, kernels of the
//! condition systems, homology ranks) reduces to the routines here. Rank and
//! kernel use fraction-free (Bareiss) elimination over the integers after
//! clearing row denominators; pivots are always the first nonzero entry in
//! column order so bases are reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The base field.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// "p/q", or "p" when q = 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses "p/q" or "p".
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// A sparse coordinate vector with no stored zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec(BTreeMap<usize, Rational>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = SparseVec::new();
        v.0.insert(i, Rational::one());
        v
    }

    pub fn from_dense(xs: &[Rational]) -> Self {
        SparseVec(
            xs.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        )
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in &self.0 {
            out[*i] = x.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.0.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(i, x)| (*i, x))
    }

    pub fn first(&self) -> Option<(usize, &Rational)> {
        self.0.iter().next().map(|(i, x)| (*i, x))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn add_entry(&mut self, i: usize, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_insert_with(Rational::zero);
        *e += x;
        if e.is_zero() {
            self.0.remove(&i);
        }
    }

    /// self += c * other
    pub fn add_scaled(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.0 {
            self.add_entry(*i, &(c * x));
        }
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.0.clear();
        } else {
            for x in self.0.values_mut() {
                *x *= c;
            }
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        let mut v = self.clone();
        v.scale(c);
        v
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (i, x) in &self.0 {
            if let Some(y) = other.0.get(i) {
                acc += x * y;
            }
        }
        acc
    }
}

impl FromIterator<(usize, Rational)> for SparseVec {
    fn from_iter<I: IntoIterator<Item = (usize, Rational)>>(iter: I) -> Self {
        let mut v = SparseVec::new();
        for (i, x) in iter {
            v.add_entry(i, &x);
        }
        v
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(i, x)| (i, format_rational(x))))
            .finish()
    }
}

/// Sparse rational matrix stored by rows.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, data: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        for r in &rows {
            if let Some(m) = r.max_index() {
                assert!(m < cols, "row entry {m} out of bounds for {cols} columns");
            }
        }
        SparseMatrix { rows: rows.len(), cols, data: rows }
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = SparseMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter() {
                m.add(i, j, x);
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| SparseVec::from_dense(&r.iter().map(|&x| int(x)).collect::<Vec<_>>()))
            .collect();
        SparseMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, Rational)]) -> Self {
        let mut m = SparseMatrix::zeros(rows, cols);
        for (i, j, x) in entries {
            m.add(*i, *j, x);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &SparseVec> {
        self.data.iter()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&mut self, i: usize, j: usize, x: &Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i].add_entry(j, x);
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    /// (row, col, value) triplets in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize, Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, j, x.clone())))
            .collect()
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.dot(v)))
            .filter(|(_, x)| !x.is_zero())
            .collect()
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = SparseVec::new();
                for (k, x) in r.iter() {
                    acc.add_scaled(x, &other.data[k]);
                }
                acc
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r.iter() {
                t.data[j].add_entry(i, x);
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        SparseMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                for (j, x) in b.iter() {
                    r.add_entry(self.cols + j, x);
                }
                r
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{}", self.rows, self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if !r.is_zero() {
                writeln!(f, "  {i}: {r:?}")?;
            }
        }
        Ok(())
    }
}

/// Rows scaled to primitive integer vectors (dense), zero rows dropped.
fn integer_rows(m: &SparseMatrix) -> Vec<Vec<BigInt>> {
    m.data
        .iter()
        .filter(|r| !r.is_zero())
        .map(|r| {
            let lcm = r.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
            let mut row = vec![BigInt::zero(); m.cols];
            for (j, x) in r.iter() {
                row[j] = x.numer() * (&lcm / x.denom());
            }
            row
        })
        .collect()
}

/// Fraction-free forward elimination. Returns the echelon rows and their pivot columns.
fn bareiss_echelon(m: &SparseMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut a = integer_rows(m);
    let nrows = a.len();
    let ncols = m.cols;
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut k = 0;
    for c in 0..ncols {
        if k == nrows {
            break;
        }
        let Some(p) = (k..nrows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(k, p);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let piv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in (c + 1)..ncols {
                let v = &piv * &row[j] - &f * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
            row[c] = BigInt::zero();
        }
        prev = piv;
        pivots.push(c);
        k += 1;
    }
    a.truncate(k);
    (a, pivots)
}

/// Rank over the rationals by fraction-free elimination (dense).
pub fn rank_bareiss(m: &SparseMatrix) -> usize {
    bareiss_echelon(m).1.len()
}

/// Sparse forward elimination: rows keyed by leading column, leading entry 1.
fn forward_sparse(m: &SparseMatrix) -> BTreeMap<usize, SparseVec> {
    let mut order: Vec<&SparseVec> = m.data.iter().filter(|r| !r.is_zero()).collect();
    order.sort_by_key(|r| r.len());
    let mut piv: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for r in order {
        let mut v = r.clone();
        while let Some((p, x)) = v.first().map(|(p, x)| (p, x.clone())) {
            match piv.get(&p) {
                Some(row) => v.add_scaled(&-x, row),
                None => {
                    v.scale(&x.recip());
                    piv.insert(p, v);
                    break;
                }
            }
        }
    }
    piv
}

/// Rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    forward_sparse(m).len()
}

/// Reduced row echelon form: rows normalised to pivot 1, pivots in increasing column order.
pub fn rref(m: &SparseMatrix) -> (Vec<SparseVec>, Vec<usize>) {
    let mut piv = forward_sparse(m);
    let pivots: Vec<usize> = piv.keys().copied().collect();
    // back substitution from the last pivot; reduced rows vanish on all other pivot columns
    for &p in pivots.iter().rev() {
        let mut row = piv.remove(&p).unwrap();
        let targets: Vec<usize> = row.iter().map(|(j, _)| j).filter(|j| *j > p && piv.contains_key(j)).collect();
        for j in targets {
            if let Some(x) = row.get(j).cloned() {
                row.add_scaled(&-x, &piv[&j]);
            }
        }
        piv.insert(p, row);
    }
    let rows = pivots.iter().map(|p| piv[p].clone()).collect();
    (rows, pivots)
}

/// Basis of {v : Mv = 0}: one vector per free column, free columns in increasing order.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let (rows, pivots) = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = SparseVec::unit(f);
            for (r, &p) in rows.iter().zip(&pivots) {
                if let Some(x) = r.get(f) {
                    v.add_entry(p, &-x.clone());
                }
            }
            v
        })
        .collect()
}

/// Plain rational Gaussian elimination; kept as an independent cross-check of [`rank`].
pub fn rank_naive(m: &SparseMatrix) -> usize {
    let mut rows: Vec<Vec<Rational>> = m.data.iter().map(|r| r.to_dense(m.cols)).collect();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for i in (r + 1)..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &piv;
            for j in c..m.cols {
                let d = &f * &rows[r][j];
                rows[i][j] -= d;
            }
        }
        r += 1;
    }
    r
}

/// Incrementally maintained reduced row echelon basis of a subspace.
///
/// Rows are kept fully interreduced with unit pivots, so `reduce` returns the
/// canonical normal form of a vector modulo the span.
#[derive(Clone, Default, Debug)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_of_row: Vec<usize>,
    row_of_pivot: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.row_of_pivot.contains_key(&col)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.row_of_pivot.keys().copied().collect()
    }

    /// Normal form of `v` modulo the span (support avoids pivot columns).
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in v.iter() {
            match self.row_of_pivot.get(&i) {
                Some(&r) => {
                    for (j, y) in self.rows[r].iter() {
                        if j != i {
                            out.add_entry(j, &-(x * y));
                        }
                    }
                }
                None => out.add_entry(i, x),
            }
        }
        out
    }

    /// Inserts `v`; returns true if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut r = self.reduce(v);
        let Some((p, lead)) = r.first().map(|(p, x)| (p, x.clone())) else {
            return false;
        };
        r.scale(&lead.recip());
        for row in self.rows.iter_mut() {
            if let Some(c) = row.get(p).cloned() {
                row.add_scaled(&-c, &r);
            }
        }
        let idx = self.rows.len();
        self.rows.push(r);
        self.pivot_of_row.push(p);
        self.row_of_pivot.insert(p, idx);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Rows ordered by pivot column.
    pub fn sorted_rows(&self) -> Vec<SparseVec> {
        self.row_of_pivot.values().map(|&r| self.rows[r].clone()).collect()
    }
}

/// Dense rational matrix inverse by Gauss-Jordan; `None` when singular.
pub fn invert_dense(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_examples() {
        let z = SparseMatrix::zeros(2, 2);
        assert_eq!(kernel_basis(&z), vec![SparseVec::unit(0), SparseVec::unit(1)]);
        assert!(kernel_basis(&SparseMatrix::identity(2)).is_empty());
        let m = SparseMatrix::from_dense(&[vec![1, 1], vec![2, 2]]);
        let k = kernel_basis(&m);
        // free column 1 gives (-1, 1); the basis spans (1, -1)
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_dense(2), vec![int(-1), int(1)]);
        assert!(m.mul_vec(&k[0]).is_zero());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank(&SparseMatrix::zeros(0, 0)), 0);
        assert_eq!(kernel_basis(&SparseMatrix::zeros(0, 3)).len(), 3);
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&rat(3, 2)), "3/2");
        assert_eq!(format_rational(&rat(-4, 2)), "-2");
        assert_eq!(parse_rational("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = invert_dense(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert!(invert_dense(&[vec![int(1), int(2)], vec![int(2), int(4)]]).is_none());
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-3i64..4, c), r)
                .prop_map(|rows| SparseMatrix::from_dense(&rows))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.ncols());
            for v in &k {
                prop_assert!(m.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn elimination_methods_agree(m in small_matrix()) {
            prop_assert_eq!(rank(&m), rank_naive(&m));
            prop_assert_eq!(rank(&m), rank_bareiss(&m));
        }

        #[test]
        fn echelon_rank_matches(m in small_matrix()) {
            let mut e = Echelon::new();
            for r in m.rows_iter() {
                e.insert(r);
            }
            prop_assert_eq!(e.rank(), rank(&m));
            for r in m.rows_iter() {
                prop_assert!(e.contains(r));
            }
        }
    }
}
