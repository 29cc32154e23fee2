//! Monomial unitaries (permutation times phases) and elements modulo the center.
//!
//! Convention used throughout the crate: a permutation `p` is stored as its
//! image list, and the matrix of a monomial element `(p, phases)` has its
//! only nonzero entry of row `i` in column `p(i)`, equal to `phases[i]`.
//! With this convention `to_matrix(a.compose(b)) == to_matrix(a) * to_matrix(b)`,
//! and the composed permutation is `i -> b(a(i))`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{MubError, Result};
use crate::linalg::{ComplexMatrix, Tolerance, C64};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Zero-based image list; rejects anything that is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            if j >= n || seen[j] {
                return Err(MubError::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation of `{1..n}` from one-based disjoint cycles,
    /// e.g. `from_cycles(4, &[&[1, 3], &[2, 4]])` for (13)(24).
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n || touched[a - 1] {
                    return Err(MubError::InvalidArgument(format!(
                        "bad cycle {cycle:?} for n = {n}"
                    )));
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `i -> other(self(i))`: the permutation part of `R_self * R_other`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len(), "permutation size mismatch");
        Permutation(self.0.iter().map(|&j| other.0[j]).collect())
    }

    /// Permutation matrix with ones at `(i, self(i))`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        MonomialElement::from_permutation(self.clone()).to_matrix()
    }

    /// All permutations of `{0..n}` in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(current.clone())];
        while next_lexicographic(&mut current) {
            out.push(Permutation(current.clone()));
        }
        out
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// One-based cycle notation, `id` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        let mut seen = vec![false; self.len()];
        for start in 0..self.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.0[i];
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Element of the monomial group: permutation plus unit phases.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialElement {
    perm: Permutation,
    phases: Vec<C64>,
}

const PHASE_EPS: f64 = 1e-12;

impl MonomialElement {
    pub fn new(perm: Permutation, phases: Vec<C64>) -> Result<Self> {
        if perm.len() != phases.len() {
            return Err(MubError::DimensionMismatch {
                left: perm.len(),
                right: phases.len(),
            });
        }
        if perm.is_empty() {
            return Err(MubError::ZeroDimension);
        }
        if let Some(z) = phases.iter().find(|z| (z.norm() - 1.0).abs() > PHASE_EPS) {
            return Err(MubError::InvalidArgument(format!(
                "phase {z} is not of unit modulus"
            )));
        }
        Ok(MonomialElement { perm, phases })
    }

    pub fn identity(n: usize) -> Self {
        MonomialElement {
            perm: Permutation::identity(n),
            phases: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn diagonal(phases: Vec<C64>) -> Result<Self> {
        Self::new(Permutation::identity(phases.len()), phases)
    }

    pub fn from_permutation(perm: Permutation) -> Self {
        let n = perm.len();
        MonomialElement {
            perm,
            phases: vec![C64::new(1.0, 0.0); n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn phases(&self) -> &[C64] {
        &self.phases
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, |i, j| {
            if self.perm.apply(i) == j {
                self.phases[i]
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .expect("monomial entries are finite")
    }

    pub fn compose(&self, other: &MonomialElement) -> Result<MonomialElement> {
        if self.n() != other.n() {
            return Err(MubError::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let phases = (0..self.n())
            .map(|i| self.phases[i] * other.phases[self.perm.apply(i)])
            .collect();
        Ok(MonomialElement {
            perm: self.perm.then(&other.perm),
            phases,
        })
    }

    pub fn inverse(&self) -> MonomialElement {
        let n = self.n();
        let mut phases = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            phases[self.perm.apply(i)] = self.phases[i].conj();
        }
        MonomialElement {
            perm: self.perm.inverse(),
            phases,
        }
    }

    pub fn is_identity(&self, tol: Tolerance) -> bool {
        self.perm.is_identity()
            && self
                .phases
                .iter()
                .all(|z| (z - C64::new(1.0, 0.0)).norm() <= tol.eps())
    }
}

/// Decomposes `m` into permutation and phases.
///
/// Every row and column must hold exactly one entry of modulus at least
/// `1 - eps`, with every other entry at most `eps` in modulus.
pub fn monomial_decompose(m: &ComplexMatrix, tol: Tolerance) -> Result<MonomialElement> {
    let n = m.n();
    let eps = tol.eps();
    let mut images = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut column_hit = vec![false; n];
    for i in 0..n {
        let mut found = None;
        for j in 0..n {
            let z = m.get(i, j);
            let r = z.norm();
            if r >= 1.0 - eps && r <= 1.0 + eps {
                if found.is_some() {
                    return Err(MubError::NotMonomial { index: i });
                }
                found = Some((j, z / r));
            } else if r > eps {
                return Err(MubError::NotMonomial { index: i });
            }
        }
        let (j, phase) = found.ok_or(MubError::NotMonomial { index: i })?;
        if column_hit[j] {
            return Err(MubError::NotMonomial { index: j });
        }
        column_hit[j] = true;
        images.push(j);
        phases.push(phase);
    }
    Ok(MonomialElement {
        perm: Permutation(images),
        phases,
    })
}

/// A unitary modulo global phase, stored in normalized form: the first
/// entry in row-major order with modulus above `eps` is real positive.
#[derive(Clone, Debug)]
pub struct ProjectiveElement {
    matrix: ComplexMatrix,
}

/// Resolution of the rounded hash keys used for deduplication.
pub const KEY_RESOLUTION: f64 = 1e-7;

impl ProjectiveElement {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn identity(n: usize) -> Self {
        ProjectiveElement {
            matrix: ComplexMatrix::identity(n),
        }
    }

    pub fn from_monomial(m: &MonomialElement, tol: Tolerance) -> Self {
        projective_normalize(&m.to_matrix(), tol)
    }

    pub fn as_monomial(&self, tol: Tolerance) -> Option<MonomialElement> {
        monomial_decompose(&self.matrix, tol).ok()
    }

    pub fn same_as(&self, other: &ProjectiveElement, tol: Tolerance) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }

    pub fn compose(&self, other: &ProjectiveElement, tol: Tolerance) -> ProjectiveElement {
        projective_normalize(&(&self.matrix * &other.matrix), tol)
    }

    pub fn inverse(&self, tol: Tolerance) -> ProjectiveElement {
        projective_normalize(&self.matrix.adjoint(), tol)
    }

    /// `u * self * u^dag`.
    pub fn conjugate_by(&self, u: &ComplexMatrix, tol: Tolerance) -> ProjectiveElement {
        projective_normalize(&(&(u * &self.matrix) * &u.adjoint()), tol)
    }

    pub fn is_identity(&self, tol: Tolerance) -> bool {
        self.matrix
            .approx_eq(&ComplexMatrix::identity(self.n()), tol)
    }

    /// Smallest `k >= 1` with `self^k` trivial, searched up to `limit`.
    pub fn order(&self, limit: usize, tol: Tolerance) -> Option<usize> {
        let mut power = self.clone();
        for k in 1..=limit {
            if power.is_identity(tol) {
                return Some(k);
            }
            power = power.compose(self, tol);
        }
        None
    }

    /// Entries rounded to [`KEY_RESOLUTION`], row-major, as integers.
    pub fn key(&self) -> Vec<i64> {
        let n = self.n();
        let mut key = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.matrix.get(i, j);
                key.push((z.re / KEY_RESOLUTION).round() as i64);
                key.push((z.im / KEY_RESOLUTION).round() as i64);
            }
        }
        key
    }
}

/// `c * m` with `|c| = 1` chosen so the first entry (row-major) of modulus
/// above `eps` becomes real positive. Idempotent.
pub fn projective_normalize(m: &ComplexMatrix, tol: Tolerance) -> ProjectiveElement {
    let n = m.n();
    let anchor = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| m.get(i, j).norm() > tol.eps());
    let Some((ai, aj)) = anchor else {
        return ProjectiveElement { matrix: m.clone() };
    };
    let z = m.get(ai, aj);
    let mut inner = m.scale(z.conj() / z.norm()).into_inner();
    inner[(ai, aj)] = C64::new(z.norm(), 0.0);
    ProjectiveElement {
        matrix: ComplexMatrix::new(inner).expect("scaling keeps entries finite"),
    }
}

/// Insertion-ordered set of projective elements with hashed lookup.
///
/// Lookups hit a bucket keyed by rounded entries first; a miss falls back to
/// a linear scan so that values straddling a rounding boundary still match.
#[derive(Clone, Debug, Default)]
pub struct ProjectiveSet {
    items: Vec<ProjectiveElement>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl ProjectiveSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[ProjectiveElement] {
        &self.items
    }

    pub fn into_items(self) -> Vec<ProjectiveElement> {
        self.items
    }

    pub fn position(&self, g: &ProjectiveElement, tol: Tolerance) -> Option<usize> {
        if let Some(bucket) = self.buckets.get(&g.key()) {
            if let Some(&i) = bucket.iter().find(|&&i| self.items[i].same_as(g, tol)) {
                return Some(i);
            }
        }
        self.items.iter().position(|h| h.same_as(g, tol))
    }

    pub fn contains(&self, g: &ProjectiveElement, tol: Tolerance) -> bool {
        self.position(g, tol).is_some()
    }

    /// Returns `true` when `g` was not yet present.
    pub fn insert(&mut self, g: ProjectiveElement, tol: Tolerance) -> bool {
        if self.contains(&g, tol) {
            return false;
        }
        self.buckets
            .entry(g.key())
            .or_default()
            .push(self.items.len());
        self.items.push(g);
        true
    }
}

impl FromIterator<ProjectiveElement> for ProjectiveSet {
    fn from_iter<I: IntoIterator<Item = ProjectiveElement>>(iter: I) -> Self {
        let tol = Tolerance::default();
        let mut set = ProjectiveSet::new();
        for g in iter {
            set.insert(g, tol);
        }
        set
    }
}

/// Sorts elements by their rounded keys so output order is deterministic.
pub fn sort_canonically(elements: &mut [ProjectiveElement]) {
    elements.sort_by_cached_key(|g| std::cmp::Reverse(g.key()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn d1() -> MonomialElement {
        MonomialElement::diagonal(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)])
            .unwrap()
    }

    fn d3() -> MonomialElement {
        MonomialElement::diagonal(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn lexicographic_enumeration() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all[0].is_identity());
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = Permutation::from_cycles(4, &[&[1, 3, 2, 4]]).unwrap();
        assert_eq!(p.to_string(), "(1 3 2 4)");
        assert_eq!(p.images(), &[2, 3, 1, 0]);
        assert_eq!(Permutation::identity(3).to_string(), "id");
        assert!(Permutation::from_cycles(3, &[&[1, 4]]).is_err());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn decompose_identity() {
        let m = monomial_decompose(&ComplexMatrix::identity(3), Tolerance::default()).unwrap();
        assert!(m.perm().is_identity());
        assert!(m.phases().iter().all(|z| *z == c(1.0, 0.0)));
    }

    #[test]
    fn decompose_diagonal_phases() {
        let m = monomial_decompose(&d1().to_matrix(), Tolerance::default()).unwrap();
        assert_eq!(m, d1());
    }

    #[test]
    fn decompose_rejects_hadamard() {
        let h = ComplexMatrix::from_fn(2, |i, j| {
            let s = if i == 1 && j == 1 { -1.0 } else { 1.0 };
            c(s * std::f64::consts::FRAC_1_SQRT_2, 0.0)
        })
        .unwrap();
        assert!(matches!(
            monomial_decompose(&h, Tolerance::default()),
            Err(MubError::NotMonomial { .. })
        ));
    }

    #[test]
    fn decompose_rejects_repeated_column() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(monomial_decompose(&m, Tolerance::default()).is_err());
    }

    #[test]
    fn compose_diagonals_follows_z4_law() {
        let d0 = d1().compose(&d3()).unwrap();
        assert!(d0.is_identity(Tolerance::default()));
        let sq = d1().compose(&d1()).unwrap();
        let expected =
            MonomialElement::diagonal(vec![c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)])
                .unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn compose_matches_matrix_product() {
        let p = MonomialElement::new(
            Permutation::from_cycles(4, &[&[1, 3, 2, 4]]).unwrap(),
            vec![c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)],
        )
        .unwrap();
        let q = d1()
            .compose(&MonomialElement::from_permutation(
                Permutation::from_cycles(4, &[&[1, 2]]).unwrap(),
            ))
            .unwrap();
        let lhs = p.compose(&q).unwrap().to_matrix();
        let rhs = &p.to_matrix() * &q.to_matrix();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert!(p
            .compose(&p.inverse())
            .unwrap()
            .is_identity(Tolerance::new(1e-12).unwrap()));
    }

    #[test]
    fn compose_disjoint_transpositions() {
        let a = Permutation::from_cycles(4, &[&[1, 2]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[3, 4]]).unwrap();
        let ab = MonomialElement::from_permutation(a)
            .compose(&MonomialElement::from_permutation(b))
            .unwrap();
        assert_eq!(
            ab.perm(),
            &Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap()
        );
    }

    #[test]
    fn compose_dimension_mismatch() {
        assert!(MonomialElement::identity(2)
            .compose(&MonomialElement::identity(3))
            .is_err());
    }

    #[test]
    fn normalize_absorbs_scalars() {
        let tol = Tolerance::default();
        let i4 = ComplexMatrix::identity(4).scale(c(0.0, 1.0));
        assert!(projective_normalize(&i4, tol).is_identity(tol));
        let u = random_unitary(4, 3).unwrap();
        let a = projective_normalize(&u, tol);
        let b = projective_normalize(&u.scale(C64::from_polar(1.0, 2.1)), tol);
        assert!(a.same_as(&b, tol));
        let again = projective_normalize(a.matrix(), tol);
        assert!(again.same_as(&a, Tolerance::new(1e-15).unwrap()));
    }

    #[test]
    fn set_deduplicates_projectively() {
        let tol = Tolerance::default();
        let u = random_unitary(3, 9).unwrap();
        let mut set = ProjectiveSet::new();
        assert!(set.insert(projective_normalize(&u, tol), tol));
        assert!(!set.insert(projective_normalize(&u.scale(c(-1.0, 0.0)), tol), tol));
        assert!(set.insert(ProjectiveElement::identity(3), tol));
        assert_eq!(set.len(), 2);
    }
}
