//! Orthonormal bases as cosets `U C_n`, with the MUBness distance and
//! unbiasedness predicates.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::{MubError, Result};
use crate::linalg::{require_unitary, ComplexMatrix, Tolerance, C64};
use crate::monomial::monomial_decompose;

/// An unordered orthonormal basis up to phases, represented by a unitary
/// whose columns are the basis vectors.
#[derive(Clone, Debug)]
pub struct BasisPoint {
    rep: ComplexMatrix,
    canonical: ComplexMatrix,
}

impl BasisPoint {
    pub fn new(rep: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let canonical = canonicalize(&rep, tol)?;
        Ok(BasisPoint { rep, canonical })
    }

    /// The standard basis `e`.
    pub fn standard(n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        BasisPoint {
            rep: id.clone(),
            canonical: id,
        }
    }

    pub fn n(&self) -> usize {
        self.rep.n()
    }

    pub fn rep(&self) -> &ComplexMatrix {
        &self.rep
    }

    /// Cached output of [`canonicalize`]; see its caveat about ties.
    pub fn canonical(&self) -> &ComplexMatrix {
        &self.canonical
    }

    /// `U . p`, the left action of a unitary.
    pub fn act(&self, u: &ComplexMatrix) -> Result<BasisPoint> {
        u.check_same_dim(&self.rep)?;
        let rep = u * &self.rep;
        let canonical = canonicalize_unchecked(&rep, Tolerance::default());
        Ok(BasisPoint { rep, canonical })
    }

    /// Rounded canonical entries, usable as a hash key away from sort ties.
    pub fn key(&self, resolution: f64) -> Vec<i64> {
        let n = self.n();
        let mut key = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.canonical.get(i, j);
                key.push((z.re / resolution).round() as i64);
                key.push((z.im / resolution).round() as i64);
            }
        }
        key
    }
}

fn compare_columns(a: &[C64], b: &[C64], slack: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (u, v) in [(x.re, y.re), (x.im, y.im)] {
            if (u - v).abs() > slack {
                // Descending, so that the identity coset canonicalizes to the identity.
                return v.partial_cmp(&u).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

fn canonicalize_unchecked(u: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let n = u.n();
    let mut columns: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut col = u.column(j);
            if let Some(k) = col.iter().position(|z| z.norm() > tol.eps()) {
                let z = col[k];
                let c = z.conj() / z.norm();
                col.iter_mut().for_each(|w| *w *= c);
                col[k] = C64::new(z.norm(), 0.0);
            }
            col
        })
        .collect();
    let slack = 10.0 * tol.eps();
    columns.sort_by(|a, b| compare_columns(a, b, slack));
    ComplexMatrix::from_fn(n, |i, j| columns[j][i]).expect("finite entries")
}

/// Representative `U C` of the coset `U C_n` with phase-fixed columns (first
/// entry above `eps` made real positive) sorted in descending lexicographic
/// order of their `(re, im)` entries, read top-down.
///
/// Two columns whose sort keys agree to within `10 eps` are a tie and keep
/// their input order, so the output is only representative-independent away
/// from ties. Coset equality is decided by [`points_equal`], never by this.
pub fn canonicalize(u: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    require_unitary(u, tol)?;
    Ok(canonicalize_unchecked(u, tol))
}

/// `U C_n == V C_n`, i.e. `U^dag V` is monomial.
pub fn points_equal(p: &BasisPoint, q: &BasisPoint, tol: Tolerance) -> Result<bool> {
    p.rep.check_same_dim(&q.rep)?;
    let m = &p.rep.adjoint() * &q.rep;
    Ok(monomial_decompose(&m, tol).is_ok())
}

/// `|<u_i|v_j>|^2` for columns `u_i` of `p` and `v_j` of `q`, row-major.
pub fn overlaps(p: &BasisPoint, q: &BasisPoint) -> Result<Vec<Vec<f64>>> {
    p.rep.check_same_dim(&q.rep)?;
    let n = p.n();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let inner: C64 = (0..n)
                        .map(|k| p.rep.get(k, i).conj() * q.rep.get(k, j))
                        .sum();
                    inner.norm_sqr()
                })
                .collect()
        })
        .collect())
}

/// `||v - <u|v> u||^2`, which equals `1 - |<u|v>|^2` for unit vectors
/// without the cancellation of that subtraction.
fn residual_norm_sqr(u: &[C64], v: &[C64], inner: C64) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (b - inner * a).norm_sqr())
        .sum()
}

/// `D(p, q)^2 = n - 1 - sum_ij (|<u_i|v_j>|^2 - 1/n)^2`.
///
/// Evaluated as `sum_ij t_ij (1 - t_ij)` with `t_ij = |<u_i|v_j>|^2`, which
/// is the same quantity because every row of `t` sums to one. Each
/// `1 - t_ij` comes from projection residuals, so `D(p, p)` stays at
/// rounding level instead of the square root of it. The terms are summed in
/// sorted order, which makes the result bit-for-bit symmetric in `p, q`.
pub fn mubness_squared(p: &BasisPoint, q: &BasisPoint) -> Result<f64> {
    p.rep.check_same_dim(&q.rep)?;
    let n = p.n();
    let us: Vec<Vec<C64>> = (0..n).map(|i| p.rep.column(i)).collect();
    let vs: Vec<Vec<C64>> = (0..n).map(|j| q.rep.column(j)).collect();
    let mut terms = Vec::with_capacity(n * n);
    for u in &us {
        for v in &vs {
            let uv: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let vu: C64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
            let t = uv.norm_sqr();
            let rest = 0.5 * (residual_norm_sqr(u, v, uv) + residual_norm_sqr(v, u, vu));
            terms.push(t * rest);
        }
    }
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum::<f64>().max(0.0))
}

pub fn mubness(p: &BasisPoint, q: &BasisPoint) -> Result<f64> {
    mubness_squared(p, q).map(f64::sqrt)
}

pub fn is_unbiased(p: &BasisPoint, q: &BasisPoint, tol: Tolerance) -> Result<bool> {
    let inv_n = 1.0 / p.n() as f64;
    Ok(overlaps(p, q)?
        .into_iter()
        .flatten()
        .all(|t| (t - inv_n).abs() <= tol.eps()))
}

/// Unitary with every entry of modulus `1/sqrt(n)`.
pub fn is_hadamard_matrix(h: &ComplexMatrix, tol: Tolerance) -> bool {
    let target = 1.0 / (h.n() as f64).sqrt();
    require_unitary(h, tol).is_ok()
        && h.as_inner()
            .iter()
            .all(|z| (z.norm() - target).abs() <= tol.eps())
}

pub fn require_hadamard(h: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    if is_hadamard_matrix(h, tol) {
        Ok(())
    } else {
        Err(MubError::NotHadamard)
    }
}

/// Membership in the set of bases unbiased to every element of `list`
/// (everything, for an empty list).
pub fn in_unbiased_set(p: &BasisPoint, list: &[BasisPoint], tol: Tolerance) -> Result<bool> {
    for q in list {
        if !is_unbiased(p, q, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fourier matrix with entries `w^(jk) / sqrt(n)`, `w = exp(2 pi i / n)`.
pub fn fourier_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(MubError::ZeroDimension);
    }
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |j, k| {
        // Reduce the exponent first so the angle stays in [0, 2 pi).
        let e = (j * k) % n;
        C64::from_polar(scale, TAU * e as f64 / n as f64)
    })
}
