//! Exact linear algebra over the rationals and the integers.
//!
//! Everything here is certificate-producing or certificate-checkable: the
//! consistency test returns either a solution or a left-kernel refutation,
//! and both can be re-verified by plugging back in.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number; always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Entry count below which `rank` densifies the matrix.
pub const DENSE_LIMIT: usize = 10_000;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Parses a comma-separated vector of rationals, e.g. `1,-2,3/4`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

/// Sparse matrix over the rationals; zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            self.data[row].remove(&col);
        } else {
            self.data[row].insert(col, value);
        }
    }

    /// Adds `value` to the entry at `(row, col)`.
    pub fn add_to(&mut self, row: usize, col: usize, value: &Rational) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        let slot = self.data[row].entry(col).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.data[row].remove(&col);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.data[row].get(&col).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row(&self, row: usize) -> &BTreeMap<usize, Rational> {
        &self.data[row]
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(&j, v)| ((i, j), v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows);
        for ((i, j), v) in self.entries() {
            t.data[j].insert(i, v.clone());
        }
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `A·x`.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (&j, v)| acc + v * &x[j]))
            .collect()
    }

    /// `u·A`.
    pub fn vec_mul(&self, u: &[Rational]) -> Vec<Rational> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![Rational::zero(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            if u[i].is_zero() {
                continue;
            }
            for (&j, v) in row {
                out[j] += &u[i] * v;
            }
        }
        out
    }
}

/// Outcome of a consistency test for `A·x = v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "vector", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConsistencyWitness {
    /// `x` with `A·x = v`.
    #[serde(with = "rational_vec")]
    Solution(Vec<Rational>),
    /// `u` with `u·A = 0` and `u·v ≠ 0`.
    #[serde(with = "rational_vec")]
    Refutation(Vec<Rational>),
}

impl ConsistencyWitness {
    pub fn is_solution(&self) -> bool {
        matches!(self, Self::Solution(_))
    }

    pub fn vector(&self) -> &[Rational] {
        match self {
            Self::Solution(v) | Self::Refutation(v) => v,
        }
    }

    pub fn vector_mut(&mut self) -> &mut Vec<Rational> {
        match self {
            Self::Solution(v) | Self::Refutation(v) => v,
        }
    }
}

/// Serde helpers rendering rationals as `"p/q"` strings.
pub mod rational_vec {
    use super::{parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Checks a witness against the system by exact plug-back.
pub fn verify_witness(a: &SparseMatrix, v: &[Rational], w: &ConsistencyWitness) -> bool {
    if v.len() != a.rows() {
        return false;
    }
    match w {
        ConsistencyWitness::Solution(x) => {
            x.len() == a.cols() && a.mul_vec(x).iter().zip(v).all(|(l, r)| l == r)
        }
        ConsistencyWitness::Refutation(u) => {
            if u.len() != a.rows() {
                return false;
            }
            let uv = u.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
            !uv.is_zero() && a.vec_mul(u).iter().all(Zero::is_zero)
        }
    }
}

struct PivotRow {
    // lead column has coefficient 1 and is the smallest key
    coeffs: BTreeMap<usize, Rational>,
    rhs: Rational,
    tag: BTreeMap<usize, Rational>,
}

fn axpy(target: &mut BTreeMap<usize, Rational>, factor: &Rational, src: &BTreeMap<usize, Rational>) {
    for (&k, v) in src {
        let slot = target.entry(k).or_insert_with(Rational::zero);
        *slot -= factor * v;
        if slot.is_zero() {
            target.remove(&k);
        }
    }
}

/// Decides consistency of `A·x = v` over ℚ and returns a certificate.
///
/// Rows are inserted into an incremental echelon form, sparsest first, while
/// tracking which combination of original rows each reduced row came from.
/// A row reducing to `0 = c` with `c ≠ 0` yields the refutation directly;
/// otherwise back substitution yields a solution with free columns set to 0.
pub fn solve_or_refute(a: &SparseMatrix, v: &[Rational]) -> Result<ConsistencyWitness> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Dimension(format!(
            "system must have at least one row and column, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if v.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, expected {}",
            v.len(),
            a.rows()
        )));
    }

    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by_key(|&i| (a.row(i).len(), i));

    let mut pivots: BTreeMap<usize, PivotRow> = BTreeMap::new();
    for &i in &order {
        let mut coeffs = a.row(i).clone();
        let mut rhs = v[i].clone();
        let mut tag = BTreeMap::from([(i, Rational::one())]);

        let mut cursor = 0usize;
        loop {
            let next = coeffs
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| pivots.contains_key(c));
            let Some(c) = next else { break };
            let factor = coeffs[&c].clone();
            let p = &pivots[&c];
            axpy(&mut coeffs, &factor, &p.coeffs);
            rhs -= &factor * &p.rhs;
            axpy(&mut tag, &factor, &p.tag);
            cursor = c + 1;
        }

        match coeffs.keys().next().copied() {
            None => {
                if !rhs.is_zero() {
                    let mut u = vec![Rational::zero(); a.rows()];
                    for (k, val) in tag {
                        u[k] = val;
                    }
                    let w = ConsistencyWitness::Refutation(u);
                    return certified(a, v, w);
                }
            }
            Some(lead) => {
                let inv = coeffs[&lead].recip();
                for val in coeffs.values_mut() {
                    *val *= &inv;
                }
                rhs *= &inv;
                for val in tag.values_mut() {
                    *val *= &inv;
                }
                pivots.insert(lead, PivotRow { coeffs, rhs, tag });
            }
        }
    }

    let mut x = vec![Rational::zero(); a.cols()];
    for (&lead, p) in pivots.iter().rev() {
        let mut val = p.rhs.clone();
        for (&c, coef) in p.coeffs.range(lead + 1..) {
            val -= coef * &x[c];
        }
        x[lead] = val;
    }
    certified(a, v, ConsistencyWitness::Solution(x))
}

fn certified(a: &SparseMatrix, v: &[Rational], w: ConsistencyWitness) -> Result<ConsistencyWitness> {
    if verify_witness(a, v, &w) {
        Ok(w)
    } else {
        Err(Error::Certificate("elimination produced an invalid witness".into()))
    }
}

fn integer_row(row: &BTreeMap<usize, Rational>) -> BTreeMap<usize, BigInt> {
    let l = row
        .values()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|(&j, v)| (j, (v * Rational::from_integer(l.clone())).to_integer()))
        .collect()
}

fn make_primitive(row: &mut BTreeMap<usize, BigInt>) {
    let g = row.values().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// Exact rank over ℚ. Densifies below [`DENSE_LIMIT`] entries and runs
/// Bareiss elimination; larger inputs use sparse fraction-free elimination.
pub fn rank(a: &SparseMatrix) -> usize {
    if a.rows().saturating_mul(a.cols()) <= DENSE_LIMIT {
        rank_bareiss(a)
    } else {
        rank_sparse(a)
    }
}

/// Dense fraction-free Bareiss elimination. At each column the pivot row is
/// the remaining row with the fewest nonzeros (ties broken by index).
pub fn rank_bareiss(a: &SparseMatrix) -> usize {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let ints = integer_row(a.row(i));
            (0..cols)
                .map(|j| ints.get(&j).cloned().unwrap_or_else(BigInt::zero))
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut k = 0usize;
    for col in 0..cols {
        if k == rows {
            break;
        }
        let pivot = (k..rows)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| (m[i].iter().filter(|x| !x.is_zero()).count(), i));
        let Some(p) = pivot else { continue };
        m.swap(k, p);
        let (head, tail) = m.split_at_mut(k + 1);
        let prow = &head[k];
        for row in tail.iter_mut() {
            for j in col + 1..cols {
                let val = &prow[col] * &row[j] - &row[col] * &prow[j];
                row[j] = val / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = m[k][col].clone();
        k += 1;
    }
    k
}

/// Sparse fraction-free elimination with primitive-part normalization.
pub fn rank_sparse(a: &SparseMatrix) -> usize {
    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by_key(|&i| (a.row(i).len(), i));
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for i in order {
        let mut r = integer_row(a.row(i));
        let mut cursor = 0usize;
        loop {
            let next = r
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| pivots.contains_key(c));
            let Some(c) = next else { break };
            let p = &pivots[&c];
            let rc = r[&c].clone();
            let pc = p[&c].clone();
            for v in r.values_mut() {
                *v *= &pc;
            }
            for (&k, pv) in p {
                let slot = r.entry(k).or_insert_with(BigInt::zero);
                *slot -= &rc * pv;
                if slot.is_zero() {
                    r.remove(&k);
                }
            }
            make_primitive(&mut r);
            cursor = c + 1;
        }
        if let Some(&lead) = r.keys().next() {
            pivots.insert(lead, r);
        }
    }
    pivots.len()
}

/// Basis of the integer left kernel `{c ∈ ℤ^rows : c·M = 0}`.
///
/// Row-reduces `[M | I]` by unimodular operations; the identity block of the
/// rows whose `M` part vanishes spans the kernel lattice. The basis is
/// returned in Hermite normal form, so it is canonical.
pub fn integer_left_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut aug: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            let mut row = r.clone();
            row.extend((0..rows).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let k = echelonize(&mut aug, 0..cols);
    let kernel: Vec<Vec<BigInt>> = aug[k..].iter().map(|r| r[cols..].to_vec()).collect();
    hermite_normal_form(kernel)
}

/// Integer row echelon over the given columns by repeated Euclidean steps.
/// Returns the number of pivot rows.
fn echelonize(rows: &mut [Vec<BigInt>], cols: std::ops::Range<usize>) -> usize {
    let mut k = 0usize;
    for col in cols {
        if k == rows.len() {
            break;
        }
        loop {
            let best = (k..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()).then(i.cmp(&j)));
            let Some(p) = best else { break };
            rows.swap(k, p);
            let mut done = true;
            for i in k + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[k][col]);
                let (head, tail) = rows.split_at_mut(i);
                let prow = &head[k];
                for (x, y) in tail[0].iter_mut().zip(prow) {
                    *x -= &q * y;
                }
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !rows[k][col].is_zero() {
            k += 1;
        }
    }
    k
}

/// Row-style Hermite normal form: positive pivots, entries above each pivot
/// reduced into `[0, pivot)`, zero rows dropped.
pub fn hermite_normal_form(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return rows;
    };
    let k = echelonize(&mut rows, 0..width);
    rows.truncate(k);
    let mut pivot_col = 0usize;
    for i in 0..rows.len() {
        while rows[i][pivot_col].is_zero() {
            pivot_col += 1;
        }
        if rows[i][pivot_col].is_negative() {
            for x in rows[i].iter_mut() {
                *x = -x.clone();
            }
        }
        for above in 0..i {
            let q = rows[above][pivot_col].div_floor(&rows[i][pivot_col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            for (x, y) in head[above].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        pivot_col += 1;
    }
    rows
}

// Small dense helpers used by the representation model.

pub fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Gauss–Jordan inverse of a square rational matrix.
pub fn inverse(a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("inverse of a non-square matrix".into()));
    }
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            let (pivot_row, other) = if i < col {
                let (h, t) = m.split_at_mut(col);
                (&t[0], &mut h[i])
            } else {
                let (h, t) = m.split_at_mut(i);
                (&h[col], &mut t[0])
            };
            for (x, y) in other.iter_mut().zip(pivot_row) {
                *x -= &f * y;
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}
