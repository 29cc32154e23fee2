//! Dense complex matrices, unitarity checks and nullspaces.
//!
//! Everything here operates on small matrices (n <= 8 in practice); clarity
//! and a predictable threshold semantics matter more than raw speed.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use num_complex::Complex64 as C64;

use crate::error::{MubError, Result};

pub const DEFAULT_EPS: f64 = 1e-9;

/// Absolute comparison threshold.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if (0.0..1.0).contains(&eps) {
            Ok(Tolerance(eps))
        } else {
            Err(MubError::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    /// Same tolerance multiplied by `factor`, saturating just below 1.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerance((self.0 * factor).min(0.5))
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_EPS)
    }
}

/// Square complex matrix with finite entries, n >= 1.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols || rows == 0 {
            return Err(MubError::NotSquare { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(MubError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(ComplexMatrix(inner))
    }

    /// Build from row-major rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(MubError::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of dimension zero");
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        assert!(!entries.is_empty(), "empty diagonal");
        let n = entries.len();
        ComplexMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of the entrywise difference. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.n(), other.n(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: Tolerance) -> bool {
        self.n() == other.n() && self.max_abs_diff(other) <= tol.eps()
    }

    /// `max |M^dag M - 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        let n = self.n();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(MubError::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            })
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n(), self.n())?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in product");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

pub fn is_unitary(m: &ComplexMatrix, tol: Tolerance) -> bool {
    m.unitarity_residual() <= tol.eps()
}

/// Fails with `UnitaryRequired` unless `m` is unitary.
pub fn require_unitary(m: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    let residual = m.unitarity_residual();
    if residual <= tol.eps() {
        Ok(())
    } else {
        Err(MubError::UnitaryRequired { residual })
    }
}

fn singular_data(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let (rows, cols) = a.shape();
    // Pad wide systems with zero rows so that the full right factor is returned.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    (svd.singular_values, v_t)
}

fn threshold(singular: &DVector<f64>, tol: Tolerance) -> f64 {
    let largest = singular.iter().copied().fold(0.0, f64::max);
    tol.eps() * if largest > 0.0 { largest } else { 1.0 }
}

/// Orthonormal basis of `{v : A v = 0}`.
///
/// A direction belongs to the nullspace when its singular value is at most
/// `eps * s_max` (or `eps` when `A = 0`).
pub fn nullspace(a: &DMatrix<C64>, tol: Tolerance) -> Vec<DVector<C64>> {
    assert!(a.ncols() > 0, "nullspace of a matrix without columns");
    let (singular, v_t) = singular_data(a);
    let cut = threshold(&singular, tol);
    debug_assert_eq!(singular.len(), a.ncols());
    singular
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// Numerical rank under the same threshold as [`nullspace`].
pub fn rank(a: &DMatrix<C64>, tol: Tolerance) -> usize {
    let (singular, _) = singular_data(a);
    let cut = threshold(&singular, tol);
    singular.iter().filter(|&&s| s > cut).count()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(1.0, theta)
}

pub fn random_diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let phases: Vec<C64> = (0..n).map(|_| random_phase(rng)).collect();
    ComplexMatrix::diagonal(&phases)
}

/// Haar-distributed unitary drawn from `rng`.
pub fn random_unitary_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(MubError::ZeroDimension);
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let gaussian = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::new(q)
}

/// Deterministic pseudo-random unitary for a fixed `(n, seed)`.
pub fn random_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    random_unitary_from(n, &mut seeded_rng(seed))
}
