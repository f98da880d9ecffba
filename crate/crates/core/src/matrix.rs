//! Hermitian positive-definite matrices and their Cholesky factors.
//!
//! Matrices here are tiny (m is the number of polarimetric channels, usually
//! 3), so everything is dense row-major `Vec<Complex64>` with hand-written
//! loops.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Smallest Cholesky pivot accepted as positive.
pub const MIN_PIVOT: f64 = 1e-300;

/// Maximum tolerated asymmetry, relative to the largest entry magnitude,
/// when symmetrizing user-supplied matrices.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

/// An m×m complex Hermitian positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHermitian", into = "RawHermitian")]
pub struct HermitianMatrix {
    m: usize,
    data: Vec<Complex64>,
}

/// Serialized form: real diagonal followed by the strict upper triangle,
/// row-major. The same field order as the PCSK payload.
#[derive(Serialize, Deserialize)]
struct RawHermitian {
    diag: Vec<f64>,
    upper: Vec<Complex64>,
}

impl TryFrom<RawHermitian> for HermitianMatrix {
    type Error = Error;
    fn try_from(raw: RawHermitian) -> Result<Self> {
        HermitianMatrix::from_upper(&raw.diag, &raw.upper)
    }
}

impl From<HermitianMatrix> for RawHermitian {
    fn from(h: HermitianMatrix) -> Self {
        let (diag, upper) = h.to_upper_fields();
        RawHermitian { diag, upper }
    }
}

/// Number of strict upper-triangle entries of an m×m matrix.
pub fn upper_len(m: usize) -> usize {
    m * (m.saturating_sub(1)) / 2
}

impl HermitianMatrix {
    /// Builds from the real diagonal and the strict upper triangle
    /// (row-major). The lower triangle is filled by conjugation, so the
    /// result is exactly Hermitian. Fails if not positive definite.
    pub fn from_upper(diag: &[f64], upper: &[Complex64]) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if upper.len() != upper_len(m) {
            return Err(Error::DimensionMismatch {
                expected: upper_len(m),
                found: upper.len(),
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        let mut it = upper.iter();
        for i in 0..m {
            data[i * m + i] = Complex64::new(diag[i], 0.0);
            for j in (i + 1)..m {
                let v = *it.next().expect("length checked");
                data[i * m + j] = v;
                data[j * m + i] = v.conj();
            }
        }
        let h = HermitianMatrix { m, data };
        h.cholesky()?;
        Ok(h)
    }

    /// Builds from a full row-major matrix. The input is replaced by
    /// `(A + A^H)/2`; the original asymmetry must not exceed
    /// [`HERMITIAN_TOLERANCE`] of the largest entry magnitude.
    pub fn from_full(m: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut asym: f64 = 0.0;
        for i in 0..m {
            for j in i..m {
                asym = asym.max((entries[i * m + j] - entries[j * m + i].conj()).norm());
            }
        }
        let rel = if scale > 0.0 { asym / scale } else { asym };
        if !(rel <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian(rel));
        }
        let h = Self::symmetrized(m, entries);
        h.cholesky()?;
        Ok(h)
    }

    // (A + A^H)/2 without any checks.
    fn symmetrized(m: usize, entries: &[Complex64]) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            data[i * m + i] = Complex64::new(entries[i * m + i].re, 0.0);
            for j in (i + 1)..m {
                let v = (entries[i * m + j] + entries[j * m + i].conj()) * 0.5;
                data[i * m + j] = v;
                data[j * m + i] = v.conj();
            }
        }
        HermitianMatrix { m, data }
    }

    /// Symmetrizes and checks positive definiteness, skipping the asymmetry
    /// tolerance. For matrices that are Hermitian by construction up to
    /// rounding (products `A A^H`, sample means).
    pub(crate) fn from_hermitian_product(m: usize, entries: &[Complex64]) -> Result<Self> {
        let h = Self::symmetrized(m, entries);
        h.cholesky()?;
        Ok(h)
    }

    pub fn identity(m: usize) -> Self {
        Self::diagonal(&vec![1.0; m]).expect("identity is positive definite")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_upper(diag, &vec![Complex64::new(0.0, 0.0); upper_len(diag.len())])
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.m + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Real diagonal and strict upper triangle, row-major.
    pub fn to_upper_fields(&self) -> (Vec<f64>, Vec<Complex64>) {
        let m = self.m;
        let diag = (0..m).map(|i| self.data[i * m + i].re).collect();
        let mut upper = Vec::with_capacity(upper_len(m));
        for i in 0..m {
            for j in (i + 1)..m {
                upper.push(self.data[i * m + j]);
            }
        }
        (diag, upper)
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.data[i * self.m + i].re).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `c · A` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        Ok(HermitianMatrix {
            m: self.m,
            data: self.data.iter().map(|z| z * c).collect(),
        })
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::new(self.m, &self.data)
    }

    /// `ln|A|` via Cholesky.
    pub fn log_det(&self) -> Result<f64> {
        Ok(self.cholesky()?.log_det())
    }

    /// `A / tr(A)`; the trace of the result is one.
    pub fn normalized(&self) -> Self {
        let t = self.trace();
        HermitianMatrix {
            m: self.m,
            data: self.data.iter().map(|z| z / t).collect(),
        }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Lower-triangular Cholesky factor `A = C C^H` with a real positive diagonal.
#[derive(Debug, Clone)]
pub struct Cholesky {
    m: usize,
    lower: Vec<Complex64>,
}

impl Cholesky {
    fn new(m: usize, a: &[Complex64]) -> Result<Self> {
        let mut l = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            let mut pivot = a[j * m + j].re;
            for k in 0..j {
                pivot -= l[j * m + k].norm_sqr();
            }
            if !(pivot > MIN_PIVOT) || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite { column: j, pivot });
            }
            let d = pivot.sqrt();
            l[j * m + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..m {
                let mut s = a[i * m + j];
                for k in 0..j {
                    s -= l[i * m + k] * l[j * m + k].conj();
                }
                l[i * m + j] = s / d;
            }
        }
        Ok(Cholesky { m, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Row-major lower factor.
    pub fn factor(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.m).map(|i| self.lower[i * self.m + i].re.ln()).sum::<f64>()
    }

    // Solves C x = b in place (forward substitution).
    fn forward(&self, b: &mut [Complex64]) {
        let m = self.m;
        for i in 0..m {
            let mut s = b[i];
            for k in 0..i {
                s -= self.lower[i * m + k] * b[k];
            }
            b[i] = s / self.lower[i * m + i].re;
        }
    }

    // Solves C^H x = b in place (back substitution).
    fn backward(&self, b: &mut [Complex64]) {
        let m = self.m;
        for i in (0..m).rev() {
            let mut s = b[i];
            for k in (i + 1)..m {
                s -= self.lower[k * m + i].conj() * b[k];
            }
            b[i] = s / self.lower[i * m + i].re;
        }
    }

    /// `A⁻¹ x` for a vector.
    pub fn solve_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut b = x.to_vec();
        self.forward(&mut b);
        self.backward(&mut b);
        b
    }

    /// `tr(A⁻¹ Z)`, column by column through triangular solves.
    pub fn trace_solve(&self, z: &HermitianMatrix) -> f64 {
        let m = self.m;
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        let mut acc = 0.0;
        for j in 0..m {
            for i in 0..m {
                col[i] = z.get(i, j);
            }
            self.forward(&mut col);
            self.backward(&mut col);
            acc += col[j].re;
        }
        acc
    }

    /// `A⁻¹` as a dense row-major matrix.
    pub fn inverse(&self) -> Vec<Complex64> {
        let m = self.m;
        let mut inv = vec![Complex64::new(0.0, 0.0); m * m];
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            self.forward(&mut col);
            self.backward(&mut col);
            for i in 0..m {
                inv[i * m + j] = col[i];
            }
        }
        inv
    }
}

/// Dense complex matrix used for Kronecker-structured Fisher blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    pub fn from_square(m: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), m * m);
        ComplexMatrix { rows: m, cols: m, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// `A ⊗ B`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Column-stacking `vec(·)` of a square matrix.
    pub fn vec(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j));
            }
        }
        v
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

impl From<&HermitianMatrix> for ComplexMatrix {
    fn from(h: &HermitianMatrix) -> Self {
        ComplexMatrix::from_square(h.dim(), h.as_slice().to_vec())
    }
}
