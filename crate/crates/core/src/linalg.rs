//! Dense exact linear algebra over the rationals, plus a float rank helper.
//!
//! Everything that feeds a certificate goes through [`MatrixR`]; the float
//! routines exist only for flex tracing and diagnostics.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, one, zero, Scalar};

/// Relative tolerance used by [`float_rank`].
pub const FLOAT_RANK_TOL: f64 = 1e-9;

/// Row-major dense rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixR {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl MatrixR {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixR { rows, cols, data: vec![zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        MatrixR { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::scalar::int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixR) -> MatrixR {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &MatrixR) -> MatrixR {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixR {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> MatrixR {
        MatrixR { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    pub fn principal(&self, idx: &[usize]) -> MatrixR {
        MatrixR::from_rows(
            idx.iter().map(|&i| idx.iter().map(|&j| self[(i, j)].clone()).collect()).collect(),
        )
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| crate::scalar::to_f64(&self[(i, j)]))
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    /// Exact determinant by plain Gaussian elimination.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &pivot;
                for c in col..n {
                    let v = &f * &a[(col, c)];
                    a[(r, c)] -= v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for MatrixR {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixR {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for MatrixR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_scalar).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        f.write_str("]")
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: MatrixR,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &MatrixR) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let inv = one() / &a[(row, col)];
        for c in col..a.cols {
            a[(row, c)] *= &inv;
        }
        for r in 0..a.rows {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for c in col..a.cols {
                let v = &f * &a[(row, c)];
                a[(r, c)] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { matrix: a, pivots }
}

/// Exact rank and canonical kernel basis.
///
/// One basis vector per free column, in increasing column order; the free
/// column's own entry is 1 and the other free entries are 0.
pub fn rref_kernel(m: &MatrixR) -> (usize, Vec<Vec<Scalar>>) {
    let Rref { matrix: r, pivots } = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let basis = (0..m.cols)
        .filter(|&j| !is_pivot[j])
        .map(|free| {
            let mut v = vec![zero(); m.cols];
            v[free] = one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, free)].clone();
            }
            v
        })
        .collect();
    (pivots.len(), basis)
}

/// Solves `m x = rhs`; returns a particular solution (free variables zero)
/// or `None` when the system is inconsistent.
pub fn solve(m: &MatrixR, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(m.rows, rhs.len());
    let mut aug = MatrixR::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = rhs[i].clone();
    }
    let Rref { matrix: r, pivots } = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![zero(); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[(row, m.cols)].clone();
    }
    Some(x)
}

/// Gram–Schmidt over the rationals without normalization; zero vectors
/// (dependent inputs) are dropped.
pub fn orthogonalize(vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = crate::scalar::dot(&w, u) / crate::scalar::dot(u, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= &c * ui;
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            out.push(w);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    NotPsd,
}

/// Why a symmetric matrix is not PSD.
///
/// `indices` names a principal submatrix of the *original* matrix whose
/// determinant is negative, so the claim can be re-checked without trusting
/// the elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdViolation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Negative remaining diagonal entry `index` after elimination.
    NegativePivot { index: usize, value: Scalar },
    /// Zero remaining diagonal with nonzero off-diagonal `s_ij`; the 2×2
    /// reduced block has determinant `-s_ij²`.
    Minor2x2 { i: usize, j: usize, off_diagonal: Scalar },
}

impl PsdViolation {
    pub fn verify(&self, s: &MatrixR) -> bool {
        s.principal(&self.indices).determinant().is_negative()
    }
}

/// Result of the diagonal-pivoting symmetric elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdCertificate {
    pub verdict: PsdVerdict,
    /// Number of positive pivots taken (the rank when PSD).
    pub rank: usize,
    /// `(index, pivot)` in elimination order; every pivot is positive.
    pub pivots: Vec<(usize, Scalar)>,
    /// Column of the reduced matrix at each pivot; `S = Σ c cᵀ / pivot` when PSD.
    pub columns: Vec<Vec<Scalar>>,
    pub violation: Option<PsdViolation>,
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == PsdVerdict::Psd
    }

    /// Rebuilds `Σ c cᵀ / pivot` from the recorded elimination.
    pub fn reconstruct(&self, n: usize) -> MatrixR {
        let mut s = MatrixR::zeros(n, n);
        for ((_, d), c) in self.pivots.iter().zip(&self.columns) {
            for i in 0..n {
                if c[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    s[(i, j)] += &c[i] * &c[j] / d;
                }
            }
        }
        s
    }
}

/// Decides positive semidefiniteness and rank exactly.
///
/// Pivots on the largest remaining diagonal entry (lowest index on ties).
pub fn psd_rank(s: &MatrixR) -> Result<PsdCertificate> {
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = s.rows;
    let mut a = s.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut columns = Vec::new();
    let mut taken = Vec::new();

    loop {
        if let Some(&i) = active.iter().find(|&&i| a[(i, i)].is_negative()) {
            let mut indices = taken.clone();
            indices.push(i);
            indices.sort_unstable();
            let value = a[(i, i)].clone();
            return Ok(PsdCertificate {
                verdict: PsdVerdict::NotPsd,
                rank: pivots.len(),
                pivots,
                columns,
                violation: Some(PsdViolation {
                    kind: ViolationKind::NegativePivot { index: i, value },
                    indices,
                }),
            });
        }
        let best = active.iter().copied().filter(|&i| a[(i, i)].is_positive()).fold(
            None,
            |best: Option<usize>, i| match best {
                Some(b) if a[(b, b)] >= a[(i, i)] => Some(b),
                _ => Some(i),
            },
        );
        let Some(p) = best else { break };
        let d = a[(p, p)].clone();
        let col: Vec<Scalar> = (0..n).map(|i| a[(i, p)].clone()).collect();
        for &i in &active {
            if col[i].is_zero() {
                continue;
            }
            let f = &col[i] / &d;
            for &j in &active {
                if !col[j].is_zero() {
                    let v = &f * &col[j];
                    a[(i, j)] -= v;
                }
            }
        }
        active.retain(|&i| i != p);
        pivots.push((p, d));
        columns.push(col);
        taken.push(p);
    }

    // all remaining diagonal entries are zero
    for (k, &i) in active.iter().enumerate() {
        for &j in &active[k + 1..] {
            if !a[(i, j)].is_zero() {
                let mut indices = taken.clone();
                indices.push(i);
                indices.push(j);
                indices.sort_unstable();
                return Ok(PsdCertificate {
                    verdict: PsdVerdict::NotPsd,
                    rank: pivots.len(),
                    pivots,
                    columns,
                    violation: Some(PsdViolation {
                        kind: ViolationKind::Minor2x2 { i, j, off_diagonal: a[(i, j)].clone() },
                        indices,
                    }),
                });
            }
        }
    }
    Ok(PsdCertificate { verdict: PsdVerdict::Psd, rank: pivots.len(), pivots, columns, violation: None })
}

/// Singular values of a float matrix, largest first.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `1e-9 · σ_max · max(rows, cols)`.
pub fn float_rank(m: &DMatrix<f64>) -> Result<usize> {
    float_rank_with_tol(m, FLOAT_RANK_TOL)
}

pub fn float_rank_with_tol(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let s = singular_values(m);
    let Some(&largest) = s.first() else { return Ok(0) };
    if largest == 0.0 {
        return Ok(0);
    }
    let cutoff = rel_tol * largest * m.nrows().max(m.ncols()) as f64;
    Ok(s.iter().filter(|&&v| v > cutoff).count())
}
