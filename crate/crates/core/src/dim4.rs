//! Closed-form objects for dimension four and the cross-check against the
//! generic stabilizer and orbit machinery.
//!
//! `f_0 = F4(0) C_4` is fixed as the second basis; every basis unbiased to
//! both `e` and `f_0` is `h_{y,z} = H4(y, z) C_4` for `y, z` in `[0, pi)`.
//! The stabilizer of `(e, f_0)` modulo phases has 32 elements `R_pi D_a`
//! (`pi` in the 8-element group `B`, `a` in `Z_4`), and it moves a generic
//! `h_{y,z}` through exactly four points.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::basis::{in_unbiased_set, points_equal, BasisPoint};
use crate::equivalence::MubList;
use crate::error::{MubError, Result};
use crate::linalg::{seeded_rng, ComplexMatrix, Tolerance, C64};
use crate::monomial::{MonomialElement, Permutation, ProjectiveElement, ProjectiveSet};
use crate::stabilizer::{list_stabilizer, orbit, StabilizerGroup, GROUP_EPS};

/// Parameters `(y, z)` of `H4(y, z)`, reduced into `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleParams {
    y: f64,
    z: f64,
}

/// `x mod pi` in `[0, pi)`.
pub fn reduce_mod_pi(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle `R / pi Z`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = reduce_mod_pi(a - b);
    d.min(PI - d)
}

impl TripleParams {
    pub fn new(y: f64, z: f64) -> Result<Self> {
        if !(y.is_finite() && z.is_finite()) {
            return Err(MubError::InvalidArgument(format!(
                "parameters must be finite, got ({y}, {z})"
            )));
        }
        Ok(TripleParams {
            y: reduce_mod_pi(y),
            z: reduce_mod_pi(z),
        })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Both coordinates within `eps` on the circle.
    pub fn close_to(&self, other: &TripleParams, eps: f64) -> bool {
        angular_distance(self.y, other.y) <= eps && angular_distance(self.z, other.z) <= eps
    }
}

fn half(z: C64) -> C64 {
    z * 0.5
}

/// `F4(x)`.
pub fn f4(x: f64) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let w = C64::new(0.0, 1.0) * C64::from_polar(1.0, x.rem_euclid(2.0 * PI));
    let rows = [
        [one, one, one, one],
        [one, one, -one, -one],
        [one, -one, w, -w],
        [one, -one, -w, w],
    ];
    ComplexMatrix::from_fn(4, |i, j| half(rows[i][j])).expect("finite entries")
}

/// `H4(y, z)`.
pub fn h4(p: TripleParams) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let a = C64::from_polar(1.0, p.y);
    let b = C64::from_polar(1.0, p.z);
    let rows = [
        [one, one, one, one],
        [one, one, -one, -one],
        [-a, a, b, -b],
        [a, -a, b, -b],
    ];
    ComplexMatrix::from_fn(4, |i, j| half(rows[i][j])).expect("finite entries")
}

/// The basis `h_{y,z}`.
pub fn h4_point(p: TripleParams) -> BasisPoint {
    BasisPoint::new(h4(p), Tolerance::default()).expect("H4 is unitary")
}

/// The basis `f_0`.
pub fn f0_point() -> BasisPoint {
    BasisPoint::new(f4(0.0), Tolerance::default()).expect("F4 is unitary")
}

/// Recovers `(y, z)` from a basis unbiased to both `e` and `f_0`.
///
/// With each column scaled so its first entry is `1/2`, the columns with
/// second entry `+1/2` carry `+-e^{iy}` in the third row and the others carry
/// `+-e^{iz}`, so both angles are read off modulo `pi`.
pub fn triple_params_of(p: &BasisPoint, tol: Tolerance) -> Result<TripleParams> {
    let not_in_family =
        || MubError::InvalidArgument("basis is not unbiased to both e and f_0".into());
    if p.n() != 4 {
        return Err(MubError::DimensionMismatch {
            left: p.n(),
            right: 4,
        });
    }
    if !in_unbiased_set(p, &[BasisPoint::standard(4), f0_point()], tol)? {
        return Err(not_in_family());
    }
    let mut y = None;
    let mut z = None;
    for j in 0..4 {
        let col = p.rep().column(j);
        let fix = col[0].conj() / col[0].norm();
        let second = (col[1] * fix * 2.0).re;
        let angle = reduce_mod_pi((col[2] * fix).arg());
        if second > 0.0 {
            y = Some(angle);
        } else {
            z = Some(angle);
        }
    }
    let (Some(y), Some(z)) = (y, z) else {
        return Err(not_in_family());
    };
    let params = TripleParams::new(y, z)?;
    if points_equal(&h4_point(params), p, Tolerance::new(GROUP_EPS)?)? {
        Ok(params)
    } else {
        Err(not_in_family())
    }
}

/// `D_0 .. D_3`, whose diagonals are the rows of `2 F4(0)`; `D_a D_b = D_{a+b mod 4}`.
pub fn d_matrix(a: usize) -> Result<MonomialElement> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let phases = match a {
        0 => vec![one; 4],
        1 => vec![one, -one, i, -i],
        2 => vec![one, one, -one, -one],
        3 => vec![one, -one, -i, i],
        _ => {
            return Err(MubError::InvalidArgument(format!(
                "D_a is defined for a in 0..4, got {a}"
            )))
        }
    };
    MonomialElement::diagonal(phases)
}

/// `B = {id, (12), (34), (12)(34), (13)(24), (1324), (1423), (14)(23)}`.
pub fn group_b() -> Vec<Permutation> {
    let cycles: [&[&[usize]]; 8] = [
        &[],
        &[&[1, 2]],
        &[&[3, 4]],
        &[&[1, 2], &[3, 4]],
        &[&[1, 3], &[2, 4]],
        &[&[1, 3, 2, 4]],
        &[&[1, 4, 2, 3]],
        &[&[1, 4], &[2, 3]],
    ];
    cycles
        .iter()
        .map(|c| Permutation::from_cycles(4, c).expect("valid cycles"))
        .collect()
}

pub fn r_matrix(perm: &Permutation) -> MonomialElement {
    MonomialElement::from_permutation(perm.clone())
}

/// The 32 products `R_pi D_a` modulo phases, attached to the list `(e, f_0)`.
pub fn dim4_group() -> StabilizerGroup {
    let tol = Tolerance::new(GROUP_EPS).expect("valid");
    let mut set = ProjectiveSet::new();
    for pi in group_b() {
        for a in 0..4 {
            let d = d_matrix(a).expect("a < 4");
            let g = r_matrix(&pi).compose(&d).expect("same dimension");
            set.insert(ProjectiveElement::from_monomial(&g, tol), tol);
        }
    }
    let list = MubList::new(
        vec![BasisPoint::standard(4), f0_point()],
        Tolerance::default(),
    )
    .expect("e and f_0 are unbiased");
    StabilizerGroup::new(set.into_items(), list, tol).expect("R_pi D_a form a group")
}

/// `D_2`, `R_(12)`, `R_(34)`: generators of the stabilizer of a generic triple.
pub fn triple_generators() -> Vec<ProjectiveElement> {
    let tol = Tolerance::new(GROUP_EPS).expect("valid");
    let transposition = |a, b| r_matrix(&Permutation::from_cycles(4, &[&[a, b]]).expect("valid"));
    [
        d_matrix(2).expect("a < 4"),
        transposition(1, 2),
        transposition(3, 4),
    ]
    .iter()
    .map(|m| ProjectiveElement::from_monomial(m, tol))
    .collect()
}

/// `count` parameter pairs drawn uniformly from `[0, pi)^2`.
pub fn random_params(count: usize, seed: u64) -> Vec<TripleParams> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            TripleParams::new(rng.random_range(0.0..PI), rng.random_range(0.0..PI)).expect("finite")
        })
        .collect()
}

/// Closed-form images of `(y, z)`, deduplicated, in the order
/// identity, `D_1`, `R_(13)(24) D_1`, `R_(13)(24)`.
pub fn orbit_map(p: TripleParams) -> Vec<TripleParams> {
    let (y, z) = (p.y, p.z);
    let images = [
        (y, z),
        (z + FRAC_PI_2, y + FRAC_PI_2),
        (1.5 * PI - y, 1.5 * PI - z),
        (PI - z, PI - y),
    ];
    let mut out: Vec<TripleParams> = Vec::with_capacity(4);
    for (a, b) in images {
        let q = TripleParams::new(a, b).expect("finite");
        if !out.iter().any(|r| r.close_to(&q, 1e-9)) {
            out.push(q);
        }
    }
    out
}

/// Whether the triples `(e, f_0, h_p)` and `(e, f_0, h_q)` are equivalent,
/// decided from the closed-form orbit.
pub fn triple_equivalent(p: TripleParams, q: TripleParams, tol: Tolerance) -> bool {
    orbit_map(p).iter().any(|r| r.close_to(&q, tol.eps()))
}

/// Smallest circle distance between two distinct closed-form images.
pub fn orbit_separation(p: TripleParams) -> f64 {
    let (y, z) = (p.y, p.z);
    let raw = [
        TripleParams::new(y, z),
        TripleParams::new(z + FRAC_PI_2, y + FRAC_PI_2),
        TripleParams::new(1.5 * PI - y, 1.5 * PI - z),
        TripleParams::new(PI - z, PI - y),
    ]
    .map(|r| r.expect("finite"));
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = angular_distance(raw[i].y, raw[j].y).max(angular_distance(raw[i].z, raw[j].z));
            best = best.min(d);
        }
    }
    best
}

/// Whether the four closed-form images are pairwise at least `margin` apart.
pub fn is_generic(p: TripleParams, margin: f64) -> bool {
    orbit_separation(p) > margin
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitSizeCheck {
    /// Four distinct images, as for generic parameters.
    Generic,
    /// Some images coincide; the actual orbit size is reported.
    Degenerate(usize),
}

/// Outcome of comparing closed-form and computed results for one `(y, z)`.
#[derive(Clone, Debug)]
pub struct Dim4Report {
    pub params: TripleParams,
    pub closed_form: Vec<TripleParams>,
    pub numeric_orbit_size: usize,
    /// Every computed orbit point is some `h_q`, `q` a closed-form image, and back.
    pub orbit_matches: bool,
    pub stabilizer_order: usize,
    /// Triple stabilizer has order `32 / |orbit|`, contains `D_2, R_(12), R_(34)`,
    /// and for a four-point orbit is generated by them.
    pub stabilizer_matches: bool,
    pub orbit_size: OrbitSizeCheck,
    pub mismatches: Vec<String>,
}

impl Dim4Report {
    pub fn passed(&self) -> bool {
        self.orbit_matches && self.stabilizer_matches
    }
}

/// Cross-checks the closed-form orbit and stabilizer of `h_{y,z}` against
/// the generic machinery. Mismatches are collected in the report.
pub fn verify_dim4(p: TripleParams, tol: Tolerance) -> Result<Dim4Report> {
    let group_tol = Tolerance::new(GROUP_EPS)?;
    let group = dim4_group();
    let seed = h4_point(p);
    let numeric = orbit(&group, &seed, group_tol)?;
    let closed_form = orbit_map(p);
    let closed_points: Vec<BasisPoint> = closed_form.iter().map(|&q| h4_point(q)).collect();
    let mut mismatches = Vec::new();

    let mut orbit_matches = numeric.len() == closed_points.len();
    if !orbit_matches {
        mismatches.push(format!(
            "orbit size {} computed vs {} closed-form",
            numeric.len(),
            closed_points.len()
        ));
    }
    for (q, point) in closed_form.iter().zip(&closed_points) {
        if !numeric.contains(point, group_tol)? {
            orbit_matches = false;
            mismatches.push(format!(
                "closed-form image ({:.6}, {:.6}) is not in the computed orbit",
                q.y, q.z
            ));
        }
    }
    for point in numeric.points() {
        let mut hit = false;
        for q in &closed_points {
            if points_equal(point, q, group_tol)? {
                hit = true;
                break;
            }
        }
        if !hit {
            orbit_matches = false;
            mismatches.push("a computed orbit point has no closed-form counterpart".into());
        }
    }

    let triple = MubList::new(vec![BasisPoint::standard(4), f0_point(), seed.clone()], tol)?;
    let stabilizer = list_stabilizer(&triple, tol)?;
    let generators = triple_generators();
    let expected_order = group.order() / numeric.len().max(1);
    let mut stabilizer_matches = stabilizer.order() == expected_order
        && generators.iter().all(|g| stabilizer.contains(g, group_tol));
    if numeric.len() == 4 {
        stabilizer_matches &=
            stabilizer.order() == 8 && stabilizer.is_generated_by(&generators, group_tol);
    }
    if !stabilizer_matches {
        mismatches.push(format!(
            "triple stabilizer has order {} (expected {expected_order}) or misses D_2, R_(12), R_(34)",
            stabilizer.order()
        ));
    }

    let orbit_size = if closed_form.len() == 4 && numeric.len() == 4 {
        OrbitSizeCheck::Generic
    } else {
        OrbitSizeCheck::Degenerate(numeric.len())
    };

    Ok(Dim4Report {
        params: p,
        closed_form,
        numeric_orbit_size: numeric.len(),
        orbit_matches,
        stabilizer_order: stabilizer.order(),
        stabilizer_matches,
        orbit_size,
        mismatches,
    })
}
