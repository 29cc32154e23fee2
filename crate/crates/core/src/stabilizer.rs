//! Simultaneous stabilizers of MUB lists modulo the center, and their orbits.
//!
//! For a pair `(e, H C_n)` with `H` Hadamard, the stabilizer is
//! `C_n ∩ H C_n H^dag`. Each element lies in some component
//! `C_n^rho` (nonzero entries `u_i` at `(i, rho(i))`) and is mapped by
//! `H^dag . H` into some component `C_n^sigma`. Requiring
//! `[H^dag U H]_kl = 0` for every `l != sigma(k)` is a homogeneous linear
//! system in the `u_i`; its unimodular solutions are the group elements.

use rand::Rng;

use crate::basis::{points_equal, require_hadamard, BasisPoint};
use crate::equivalence::{standard_form, MubList};
use crate::error::{MubError, Result};
use crate::linalg::{nullspace, random_phase, seeded_rng, ComplexMatrix, Tolerance, C64};
use crate::monomial::{
    monomial_decompose, sort_canonically, MonomialElement, Permutation, ProjectiveElement,
    ProjectiveSet,
};
use nalgebra::DMatrix;

/// Largest dimension for which the `S_n x S_n` enumerations are run.
pub const MAX_ENUMERATION_DIM: usize = 6;

/// Tolerance for comparing elements and cosets built from several products.
pub const GROUP_EPS: f64 = 1e-7;

pub(crate) fn check_enumeration_dim(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_DIM {
        Err(MubError::DimensionTooLarge {
            n,
            max: MAX_ENUMERATION_DIM,
        })
    } else {
        Ok(())
    }
}

/// Finite group of unitaries modulo global phase that fixes every basis of
/// `basis_list`.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    elements: Vec<ProjectiveElement>,
    basis_list: MubList,
}

impl StabilizerGroup {
    /// Wraps an element list, checking identity, closure and stabilization.
    pub fn new(
        mut elements: Vec<ProjectiveElement>,
        basis_list: MubList,
        tol: Tolerance,
    ) -> Result<Self> {
        let n = basis_list.n();
        if let Some(g) = elements.iter().find(|g| g.n() != n) {
            return Err(MubError::DimensionMismatch {
                left: g.n(),
                right: n,
            });
        }
        sort_canonically(&mut elements);
        let group = StabilizerGroup {
            n,
            elements,
            basis_list,
        };
        if !group.contains_identity(tol) || !group.is_closed(tol) {
            return Err(MubError::NotClosed);
        }
        if !group.stabilizes_list(tol)? {
            return Err(MubError::InvalidArgument(
                "an element moves a basis of the list".into(),
            ));
        }
        Ok(group)
    }

    /// The group `{1}` attached to `basis_list`.
    pub fn trivial(basis_list: MubList) -> Self {
        StabilizerGroup {
            n: basis_list.n(),
            elements: vec![ProjectiveElement::identity(basis_list.n())],
            basis_list,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements sorted by their rounded entries.
    pub fn elements(&self) -> &[ProjectiveElement] {
        &self.elements
    }

    pub fn basis_list(&self) -> &MubList {
        &self.basis_list
    }

    pub fn contains(&self, g: &ProjectiveElement, tol: Tolerance) -> bool {
        self.elements.iter().any(|h| h.same_as(g, tol))
    }

    pub fn contains_identity(&self, tol: Tolerance) -> bool {
        self.elements.iter().any(|g| g.is_identity(tol))
    }

    /// Every pairwise product (and every inverse) is again an element.
    pub fn is_closed(&self, tol: Tolerance) -> bool {
        let set: ProjectiveSet = self.elements.iter().cloned().collect();
        self.elements.iter().all(|g| {
            set.contains(&g.inverse(tol), tol)
                && self
                    .elements
                    .iter()
                    .all(|h| set.contains(&g.compose(h, tol), tol))
        })
    }

    pub fn stabilizes_list(&self, tol: Tolerance) -> Result<bool> {
        for g in &self.elements {
            for q in self.basis_list.bases() {
                if !points_equal(&q.act(g.matrix())?, q, tol)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Elements as monomials, when they all are.
    pub fn monomials(&self, tol: Tolerance) -> Option<Vec<MonomialElement>> {
        self.elements.iter().map(|g| g.as_monomial(tol)).collect()
    }

    /// Whether the group equals the closure of `generators`.
    pub fn is_generated_by(&self, generators: &[ProjectiveElement], tol: Tolerance) -> bool {
        let closure = generate(generators, self.n, tol);
        closure.len() == self.order() && closure.items().iter().all(|g| self.contains(g, tol))
    }

    /// The same set of elements, compared projectively.
    pub fn same_elements(&self, other: &[ProjectiveElement], tol: Tolerance) -> bool {
        other.len() == self.order() && other.iter().all(|g| self.contains(g, tol))
    }
}

/// Closure of `generators` under composition (always contains the identity).
pub fn generate(generators: &[ProjectiveElement], n: usize, tol: Tolerance) -> ProjectiveSet {
    let mut set = ProjectiveSet::new();
    set.insert(ProjectiveElement::identity(n), tol);
    let mut frontier = vec![ProjectiveElement::identity(n)];
    while let Some(g) = frontier.pop() {
        for s in generators {
            let h = g.compose(s, tol);
            if set.insert(h.clone(), tol) {
                frontier.push(h);
            }
        }
    }
    set
}

/// Coefficients `c[k][l][i] = conj(H_ik) H_{rho(i), l}` of
/// `[H^dag U H]_kl = sum_i c[k][l][i] u_i`.
fn coefficient_table(h: &ComplexMatrix, rho: &Permutation) -> Vec<Vec<Vec<C64>>> {
    let n = h.n();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|i| h.get(i, k).conj() * h.get(rho.apply(i), l))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Solves the `(rho, sigma)` system; `Ok(None)` when it only has the zero solution.
fn solve_component(
    h: &ComplexMatrix,
    table: &[Vec<Vec<C64>>],
    rho: &Permutation,
    sigma: &Permutation,
    tol: Tolerance,
) -> Result<Option<MonomialElement>> {
    let n = h.n();
    let rows: Vec<&Vec<C64>> = (0..n)
        .flat_map(|k| {
            (0..n)
                .filter(move |&l| l != sigma.apply(k))
                .map(move |l| &table[k][l])
        })
        .collect();
    let system = DMatrix::from_fn(rows.len(), n, |r, i| rows[r][i]);
    let solutions = nullspace(&system, tol);
    let unexpected = |reason: String| MubError::UnexpectedSolutionSpace {
        rho: rho.clone(),
        sigma: sigma.clone(),
        reason,
    };
    match solutions.len() {
        0 => Ok(None),
        1 => {
            let v = &solutions[0];
            // v is a unit vector, so equal moduli means each is 1/sqrt(n).
            let target = 1.0 / (n as f64).sqrt();
            let slack = 10.0 * tol.eps().max(f64::EPSILON);
            if let Some(bad) = v.iter().find(|z| (z.norm() - target).abs() > slack) {
                return Err(unexpected(format!(
                    "solution entries have unequal moduli ({} vs {target})",
                    bad.norm()
                )));
            }
            let phases: Vec<C64> = v.iter().map(|z| z / z.norm()).collect();
            let u = MonomialElement::new(rho.clone(), phases)?;
            let image = &(&h.adjoint() * &u.to_matrix()) * h;
            match monomial_decompose(&image, Tolerance::new(GROUP_EPS)?) {
                Ok(m) if m.perm() == sigma => Ok(Some(u)),
                _ => Err(unexpected(
                    "unimodular solution is not mapped into the sigma component".into(),
                )),
            }
        }
        d => Err(unexpected(format!("solution space has dimension {d}"))),
    }
}

/// Components `sigma` with `sigma(0) == first` whose system can have a
/// nonzero solution.
///
/// The equations of row `k = 0` alone form an `(n-1) x n` system. When its
/// nullspace is a single line `v`, every `(rho, sigma)` solution with
/// `sigma(0) == first` is a multiple of `v`, so only the `sigma` matching the
/// support of `H^dag R_rho diag(v) H` need the full solve. Otherwise no
/// `sigma` is ruled out.
fn candidate_sigmas<'a>(
    h: &ComplexMatrix,
    table: &[Vec<Vec<C64>>],
    first: usize,
    perms: &'a [Permutation],
    tol: Tolerance,
) -> Vec<&'a Permutation> {
    let n = h.n();
    let block = perms.iter().filter(move |s| s.apply(0) == first);
    let rows: Vec<&Vec<C64>> = (0..n)
        .filter(|&l| l != first)
        .map(|l| &table[0][l])
        .collect();
    let system = DMatrix::from_fn(rows.len(), n, |r, i| rows[r][i]);
    let line = nullspace(&system, tol);
    if line.len() != 1 {
        return block.collect();
    }
    let v = &line[0];
    let image = ComplexMatrix::from_fn(n, |k, l| (0..n).map(|i| table[k][l][i] * v[i]).sum())
        .expect("finite entries");
    let loose = tol.eps().sqrt() * image.max_norm().max(f64::MIN_POSITIVE);
    block
        .filter(|s| {
            (0..n).all(|k| (0..n).all(|l| l == s.apply(k) || image.get(k, l).norm() <= loose))
        })
        .collect()
}

/// Stabilizer of the pair `(e, H C_n)` modulo the center, for a Hadamard `H`.
pub fn pair_stabilizer(h: &ComplexMatrix, tol: Tolerance) -> Result<StabilizerGroup> {
    let n = h.n();
    check_enumeration_dim(n)?;
    require_hadamard(h, tol)?;
    let group_tol = Tolerance::new(GROUP_EPS)?;
    let perms = Permutation::all(n);
    let mut found = ProjectiveSet::new();
    for rho in &perms {
        let table = coefficient_table(h, rho);
        for first in 0..n {
            for sigma in candidate_sigmas(h, &table, first, &perms, tol) {
                if let Some(u) = solve_component(h, &table, rho, sigma, tol)? {
                    found.insert(ProjectiveElement::from_monomial(&u, group_tol), group_tol);
                }
            }
        }
    }
    let list = MubList::new(
        vec![BasisPoint::standard(n), BasisPoint::new(h.clone(), tol)?],
        tol,
    )?;
    StabilizerGroup::new(found.into_items(), list, group_tol)
}

/// Simultaneous stabilizer of a MUB list with at least two bases.
///
/// The list is brought to standard form, the stabilizer of its first two
/// bases is computed, elements moving any later basis are discarded, and the
/// survivors are conjugated back into the frame of the original list.
pub fn list_stabilizer(list: &MubList, tol: Tolerance) -> Result<StabilizerGroup> {
    if list.len() < 2 {
        return Err(MubError::InvalidArgument(
            "a simultaneous stabilizer needs at least two bases".into(),
        ));
    }
    check_enumeration_dim(list.n())?;
    let group_tol = Tolerance::new(GROUP_EPS)?;
    let (standard, witness) = standard_form(list, tol)?;
    let pair = pair_stabilizer(standard.bases()[1].rep(), tol)?;
    let w = witness.unitary();
    let w_dag = w.adjoint();
    let mut kept = Vec::new();
    'elements: for g in pair.elements() {
        for q in &standard.bases()[2..] {
            if !points_equal(&q.act(g.matrix())?, q, group_tol)? {
                continue 'elements;
            }
        }
        kept.push(g.conjugate_by(&w_dag, group_tol));
    }
    StabilizerGroup::new(kept, list.clone(), group_tol)
}

/// Orbit of a basis under a stabilizer group, with one witness element per point.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    points: Vec<BasisPoint>,
    actions: Vec<ProjectiveElement>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BasisPoint] {
        &self.points
    }

    /// `actions()[i]` maps the seed point to `points()[i]`.
    pub fn actions(&self) -> &[ProjectiveElement] {
        &self.actions
    }

    pub fn contains(&self, p: &BasisPoint, tol: Tolerance) -> Result<bool> {
        for q in &self.points {
            if points_equal(q, p, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Index of the orbit point equal to `p`.
    pub fn position(&self, p: &BasisPoint, tol: Tolerance) -> Result<Option<usize>> {
        for (i, q) in self.points.iter().enumerate() {
            if points_equal(q, p, tol)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

pub fn orbit(group: &StabilizerGroup, p: &BasisPoint, tol: Tolerance) -> Result<OrbitSet> {
    if p.n() != group.n() {
        return Err(MubError::DimensionMismatch {
            left: p.n(),
            right: group.n(),
        });
    }
    let mut out = OrbitSet {
        points: Vec::new(),
        actions: Vec::new(),
    };
    for g in group.elements() {
        let image = p.act(g.matrix())?;
        if !out.contains(&image, tol)? {
            out.points.push(image);
            out.actions.push(g.clone());
        }
    }
    Ok(out)
}

/// Residuals of the diagonal-torus check for a Hadamard matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterCheck {
    pub trials: usize,
    /// `max_i |[H^dag A H]_ii - Tr(A)/n|` over all trials.
    pub diagonal_residual: f64,
    /// Smallest, over non-scalar trials, of the largest off-diagonal modulus.
    pub min_offdiagonal: f64,
    /// Largest off-diagonal modulus of `H^dag A H` for scalar `A`.
    pub scalar_offdiagonal: f64,
}

impl CenterCheck {
    pub fn passed(&self, tol: Tolerance) -> bool {
        self.diagonal_residual <= tol.eps()
            && self.min_offdiagonal > tol.eps()
            && self.scalar_offdiagonal <= tol.eps()
    }
}

const CENTER_SEED: u64 = 0x5eed_c3a7;

/// Runs the torus check with random diagonal unitaries drawn from `seed`.
pub fn center_check(
    h: &ComplexMatrix,
    trials: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<CenterCheck> {
    require_hadamard(h, tol)?;
    let n = h.n();
    let h_dag = h.adjoint();
    let mut rng = seeded_rng(seed);
    let conjugate = |a: &ComplexMatrix| &(&h_dag * a) * h;
    let offdiag = |m: &ComplexMatrix| {
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm())
            .fold(0.0, f64::max)
    };
    let mut diagonal_residual: f64 = 0.0;
    let mut min_offdiagonal = f64::INFINITY;
    for _ in 0..trials {
        let phases: Vec<C64> = (0..n).map(|_| random_phase(&mut rng)).collect();
        let a = ComplexMatrix::diagonal(&phases);
        let trace: C64 = phases.iter().sum();
        let mean = trace / n as f64;
        let m = conjugate(&a);
        for i in 0..n {
            diagonal_residual = diagonal_residual.max((m.get(i, i) - mean).norm());
        }
        let scalar = phases.iter().all(|z| (z - phases[0]).norm() <= tol.eps());
        if !scalar {
            min_offdiagonal = min_offdiagonal.min(offdiag(&m));
        }
    }
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let scalar_a = ComplexMatrix::identity(n).scale(C64::from_polar(1.0, theta));
    let scalar_offdiagonal = offdiag(&conjugate(&scalar_a));
    Ok(CenterCheck {
        trials,
        diagonal_residual,
        min_offdiagonal,
        scalar_offdiagonal,
    })
}

/// Checks that conjugating diagonal unitaries by `h` only yields diagonal
/// matrices for scalars, and that the diagonal of `h^dag A h` is `Tr(A)/n`.
pub fn verify_center_proposition(h: &ComplexMatrix, trials: usize, tol: Tolerance) -> Result<bool> {
    Ok(center_check(h, trials, CENTER_SEED, tol)?.passed(tol))
}
