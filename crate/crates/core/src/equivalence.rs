//! Dephasing, the standard form of MUB lists, Hadamard equivalence and the
//! decision procedure for equivalence of MUB lists.
//!
//! Two ordered lists `(a_1..a_k)`, `(b_1..b_k)` are equivalent when one unitary
//! `U` satisfies `U . a_i = b_i` for every `i`. After both lists are brought
//! to standard form, every such `U` that fixes the first two bases is an
//! element of the stabilizer of `(e, H_2 C_n)` times one aligning monomial,
//! so the search over `U` is finite.

use crate::basis::{is_unbiased, points_equal, require_hadamard, BasisPoint};
use crate::error::{MubError, Result};
use crate::linalg::{ComplexMatrix, Tolerance, C64};
use crate::monomial::{MonomialElement, Permutation};
use crate::stabilizer::{check_enumeration_dim, pair_stabilizer, GROUP_EPS};

/// Ordered list of pairwise mutually unbiased bases.
#[derive(Clone, Debug)]
pub struct MubList {
    n: usize,
    bases: Vec<BasisPoint>,
}

impl MubList {
    pub fn new(bases: Vec<BasisPoint>, tol: Tolerance) -> Result<Self> {
        let n = bases
            .first()
            .map(BasisPoint::n)
            .ok_or_else(|| MubError::InvalidArgument("empty MUB list".into()))?;
        if let Some(b) = bases.iter().find(|b| b.n() != n) {
            return Err(MubError::DimensionMismatch {
                left: n,
                right: b.n(),
            });
        }
        if bases.len() > n + 1 {
            return Err(MubError::TooManyBases {
                n,
                len: bases.len(),
                max: n + 1,
            });
        }
        for i in 0..bases.len() {
            for j in i + 1..bases.len() {
                if !is_unbiased(&bases[i], &bases[j], tol)? {
                    return Err(MubError::NotAMubList {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(MubList { n, bases })
    }

    /// Convenience constructor from representative unitaries.
    pub fn from_matrices(reps: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let bases = reps
            .into_iter()
            .map(|m| BasisPoint::new(m, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bases, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[BasisPoint] {
        &self.bases
    }

    /// `(U . q_1, ..., U . q_k)`; unbiasedness is preserved by unitaries.
    pub fn act(&self, u: &ComplexMatrix) -> Result<MubList> {
        let bases = self
            .bases
            .iter()
            .map(|b| b.act(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(MubList { n: self.n, bases })
    }

    /// The list whose entry `i` is `self[order[i]]`; `order` may also select a sub-list.
    pub fn reordered(&self, order: &[usize]) -> MubList {
        MubList {
            n: self.n,
            bases: order.iter().map(|&i| self.bases[i].clone()).collect(),
        }
    }
}

/// A unitary mapping one MUB list onto another basis by basis.
#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    unitary: ComplexMatrix,
}

impl EquivalenceWitness {
    pub fn new(unitary: ComplexMatrix) -> Self {
        EquivalenceWitness { unitary }
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// `U . a_i == b_i` for all `i`.
    pub fn verify(&self, a: &MubList, b: &MubList, tol: Tolerance) -> Result<bool> {
        if a.len() != b.len() {
            return Err(MubError::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if !crate::linalg::is_unitary(&self.unitary, tol) {
            return Ok(false);
        }
        for (p, q) in a.bases().iter().zip(b.bases()) {
            if !points_equal(&p.act(&self.unitary)?, q, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn inverse(&self) -> EquivalenceWitness {
        EquivalenceWitness {
            unitary: self.unitary.adjoint(),
        }
    }
}

/// `matrix = left * H * right`, with constant first row and column.
#[derive(Clone, Debug)]
pub struct Dephased {
    pub matrix: ComplexMatrix,
    pub left: MonomialElement,
    pub right: MonomialElement,
}

fn unit_phase(z: C64) -> C64 {
    z / z.norm()
}

/// Dephases a Hadamard matrix: right diagonal phases fix the first row, then
/// left diagonal phases fix the first column, so every entry of both
/// equals `1/sqrt(n)`.
pub fn dephase(h: &ComplexMatrix, tol: Tolerance) -> Result<Dephased> {
    require_hadamard(h, tol)?;
    let n = h.n();
    let right: Vec<C64> = (0..n).map(|j| unit_phase(h.get(0, j)).conj()).collect();
    let left: Vec<C64> = (0..n)
        .map(|i| unit_phase(h.get(i, 0) * right[0]).conj())
        .collect();
    let scale = 1.0 / (n as f64).sqrt();
    let matrix = ComplexMatrix::from_fn(n, |i, j| {
        if i == 0 || j == 0 {
            C64::new(scale, 0.0)
        } else {
            left[i] * h.get(i, j) * right[j]
        }
    })?;
    Ok(Dephased {
        matrix,
        left: MonomialElement::diagonal(left)?,
        right: MonomialElement::diagonal(right)?,
    })
}

/// Equivalent list `(e, H_2 C_n, ..., H_k C_n)` with every `H_i` Hadamard
/// with first row `1/sqrt(n)`, and `H_2` also with first column `1/sqrt(n)`.
///
/// The witness is `D V_1^dag`, where `V_1` represents the first basis and `D`
/// is the diagonal that dephases the first column of `H_2`.
pub fn standard_form(list: &MubList, tol: Tolerance) -> Result<(MubList, EquivalenceWitness)> {
    let n = list.n();
    let v1_dag = list.bases()[0].rep().adjoint();
    let scale = 1.0 / (n as f64).sqrt();
    let mut reps: Vec<ComplexMatrix> = Vec::with_capacity(list.len());
    for (idx, q) in list.bases().iter().enumerate().skip(1) {
        let h = &v1_dag * q.rep();
        if !crate::basis::is_hadamard_matrix(&h, tol) {
            return Err(MubError::NotAMubList {
                first: 0,
                second: idx,
            });
        }
        let right: Vec<C64> = (0..n).map(|j| unit_phase(h.get(0, j)).conj()).collect();
        let row_fixed = ComplexMatrix::from_fn(n, |i, j| {
            if i == 0 {
                C64::new(scale, 0.0)
            } else {
                h.get(i, j) * right[j]
            }
        })?;
        reps.push(row_fixed);
    }
    let column_fix: Vec<C64> = match reps.first() {
        Some(h2) => (0..n).map(|i| unit_phase(h2.get(i, 0)).conj()).collect(),
        None => vec![C64::new(1.0, 0.0); n],
    };
    let d = ComplexMatrix::diagonal(&column_fix);
    let mut bases = vec![BasisPoint::standard(n)];
    for (k, h) in reps.iter().enumerate() {
        let mut m = (&d * h).into_inner();
        for j in 0..n {
            m[(0, j)] = C64::new(scale, 0.0);
        }
        if k == 0 {
            for i in 0..n {
                m[(i, 0)] = C64::new(scale, 0.0);
            }
        }
        bases.push(BasisPoint::new(ComplexMatrix::new(m)?, tol)?);
    }
    let witness = EquivalenceWitness::new(&d * &v1_dag);
    Ok((MubList { n, bases }, witness))
}

/// Searches monomials `(M1, M2)` with `H1 = M1 H2 M2`.
///
/// Permutation pairs are tried in lexicographic order; for each, the
/// diagonal phases follow from the first row and column (anchoring the
/// first left phase at 1) and are then checked on all `n^2` entries with
/// slack `10 eps`. Returns the first pair that fits.
pub fn hadamard_equivalent(
    h1: &ComplexMatrix,
    h2: &ComplexMatrix,
    tol: Tolerance,
) -> Result<Option<(MonomialElement, MonomialElement)>> {
    h1.check_same_dim(h2)?;
    let n = h1.n();
    check_enumeration_dim(n)?;
    require_hadamard(h1, tol)?;
    require_hadamard(h2, tol)?;
    let slack = 10.0 * tol.eps();
    let perms = Permutation::all(n);
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let mut d1 = vec![C64::new(0.0, 0.0); n];
    let mut d2 = vec![C64::new(0.0, 0.0); n];
    for p1 in &perms {
        for (p2, p2_inv) in perms.iter().zip(&inverses) {
            // K = R_p1 H2 R_p2, i.e. K_ij = H2[p1(i)][p2^-1(j)].
            let k = |i: usize, j: usize| h2.get(p1.apply(i), p2_inv.apply(j));
            for (j, d) in d2.iter_mut().enumerate() {
                *d = unit_phase(h1.get(0, j) / k(0, j));
            }
            d1[0] = C64::new(1.0, 0.0);
            for (i, d) in d1.iter_mut().enumerate().skip(1) {
                *d = unit_phase(h1.get(i, 0) / (k(i, 0) * d2[0]));
            }
            let fits = (0..n)
                .all(|i| (0..n).all(|j| (h1.get(i, j) - d1[i] * k(i, j) * d2[j]).norm() <= slack));
            if fits {
                let left = MonomialElement::new(p1.clone(), d1.clone())?;
                let right_phases = (0..n).map(|i| d2[p2.apply(i)]).collect();
                let right = MonomialElement::new(p2.clone(), right_phases)?;
                return Ok(Some((left, right)));
            }
        }
    }
    Ok(None)
}

/// Decides whether two MUB lists are equivalent, returning a witness `U`
/// with `U . a_i = b_i` when they are.
pub fn lists_equivalent(
    a: &MubList,
    b: &MubList,
    tol: Tolerance,
) -> Result<Option<EquivalenceWitness>> {
    if a.n() != b.n() {
        return Err(MubError::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.len() != b.len() {
        return Err(MubError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    check_enumeration_dim(a.n())?;
    let check_tol = Tolerance::new(GROUP_EPS)?;
    let finish = |u: ComplexMatrix| -> Result<Option<EquivalenceWitness>> {
        let w = EquivalenceWitness::new(u);
        if w.verify(a, b, check_tol)? {
            Ok(Some(w))
        } else {
            Err(MubError::WitnessRejected)
        }
    };
    if a.len() == 1 {
        return finish(&b.bases()[0].rep().clone() * &a.bases()[0].rep().adjoint());
    }
    let (sa, wa) = standard_form(a, tol)?;
    let (sb, wb) = standard_form(b, tol)?;
    let ha = sa.bases()[1].rep();
    let hb = sb.bases()[1].rep();
    let Some((m1, _)) = hadamard_equivalent(hb, ha, tol)? else {
        return Ok(None);
    };
    // M1 fixes e and sends H_a C_n to H_b C_n.
    let align = m1.to_matrix();
    let back = |u: &ComplexMatrix| &(&wb.unitary().adjoint() * u) * wa.unitary();
    if a.len() == 2 {
        return finish(back(&align));
    }
    let stabilizer = pair_stabilizer(hb, tol)?;
    let mut candidates: Vec<ComplexMatrix> = stabilizer
        .elements()
        .iter()
        .map(|g| g.matrix() * &align)
        .collect();
    for j in 2..a.len() {
        let source = &sa.bases()[j];
        let target = &sb.bases()[j];
        let mut kept = Vec::with_capacity(candidates.len());
        for u in candidates {
            if points_equal(&source.act(&u)?, target, check_tol)? {
                kept.push(u);
            }
        }
        candidates = kept;
        if candidates.is_empty() {
            return Ok(None);
        }
    }
    finish(back(&candidates[0]))
}

/// Equivalence of unordered MUB sets: tries every reordering of `b`.
///
/// This goes beyond ordered-list equivalence: lists that are inequivalent
/// as ordered lists may still describe equivalent sets. Returns the
/// reordering of `b` that matched together with its witness.
pub fn sets_equivalent(
    a: &MubList,
    b: &MubList,
    tol: Tolerance,
) -> Result<Option<(Vec<usize>, EquivalenceWitness)>> {
    if a.len() != b.len() {
        return Err(MubError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() > 5 {
        return Err(MubError::InvalidArgument(
            "set equivalence tries k! orderings and is limited to k <= 5".into(),
        ));
    }
    for order in Permutation::all(b.len()) {
        let reordered = b.reordered(order.images());
        if let Some(w) = lists_equivalent(a, &reordered, tol)? {
            return Ok(Some((order.images().to_vec(), w)));
        }
    }
    Ok(None)
}
