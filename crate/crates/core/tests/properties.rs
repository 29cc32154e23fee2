use std::f64::consts::{FRAC_PI_2, PI};

use mubeq::basis::{canonicalize, fourier_matrix, is_unbiased, mubness, points_equal, BasisPoint};
use mubeq::dim4::{
    d_matrix, dim4_group, f0_point, f4, h4, h4_point, orbit_map, r_matrix, triple_generators,
    TripleParams,
};
use mubeq::equivalence::{dephase, hadamard_equivalent, lists_equivalent, standard_form, MubList};
use mubeq::linalg::{
    nullspace, random_phase, random_unitary, random_unitary_from, rank, seeded_rng, ComplexMatrix,
    Tolerance, C64,
};
use mubeq::monomial::{monomial_decompose, projective_normalize, MonomialElement, Permutation};
use mubeq::stabilizer::{center_check, list_stabilizer, orbit};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn group_tol() -> Tolerance {
    Tolerance::new(1e-7).unwrap()
}

fn random_monomial(n: usize, seed: u64) -> MonomialElement {
    let mut rng = seeded_rng(seed);
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(&mut rng);
    let phases = (0..n).map(|_| random_phase(&mut rng)).collect();
    MonomialElement::new(Permutation::from_images(images).unwrap(), phases).unwrap()
}

fn point(n: usize, seed: u64) -> BasisPoint {
    BasisPoint::new(random_unitary(n, seed).unwrap(), tol()).unwrap()
}

fn angle() -> impl Strategy<Value = f64> {
    0.0..PI
}

fn triple(p: TripleParams) -> MubList {
    MubList::new(
        vec![BasisPoint::standard(4), f0_point(), h4_point(p)],
        tol(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_unitaries_are_unitary(n in 1usize..7, seed: u64) {
        let u = random_unitary(n, seed).unwrap();
        prop_assert!(u.unitarity_residual() <= 1e-9);
        prop_assert!(u.approx_eq(&random_unitary(n, seed).unwrap(), Tolerance::new(0.0).unwrap()));
    }

    #[test]
    fn nullspace_is_orthonormal_and_complements_rank(
        rows in 1usize..7,
        cols in 1usize..6,
        drop in 0usize..3,
        seed: u64,
    ) {
        let mut rng = seeded_rng(seed);
        let mut a = DMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        // Force some column dependencies.
        for c in 0..drop.min(cols.saturating_sub(1)) {
            let src = a.column(c + 1).clone_owned();
            a.set_column(c, &(src * C64::new(0.5, -1.5)));
        }
        let basis = nullspace(&a, tol());
        prop_assert_eq!(basis.len() + rank(&a, tol()), cols);
        let norm_a = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, v) in basis.iter().enumerate() {
            let av = &a * v;
            prop_assert!(av.iter().all(|z| z.norm() <= 10.0 * 1e-9 * norm_a));
            for (j, w) in basis.iter().enumerate() {
                let inner = v.dotc(w);
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner - C64::new(target, 0.0)).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn monomial_round_trip(n in 1usize..7, seed: u64) {
        let m = random_monomial(n, seed);
        let back = monomial_decompose(&m.to_matrix(), tol()).unwrap();
        prop_assert_eq!(back.perm(), m.perm());
        for (a, b) in back.phases().iter().zip(m.phases()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
        let other = random_monomial(n, seed.wrapping_add(1));
        let product = &m.to_matrix() * &other.to_matrix();
        prop_assert!(monomial_decompose(&product, tol()).is_ok());
    }

    #[test]
    fn projective_normalize_forgets_scalars(n in 1usize..6, seed: u64, theta in 0.0..std::f64::consts::TAU) {
        let u = random_unitary(n, seed).unwrap();
        let a = projective_normalize(&u, tol());
        let b = projective_normalize(&u.scale(C64::from_polar(1.0, theta)), tol());
        prop_assert!(a.matrix().approx_eq(b.matrix(), tol()));
        prop_assert_eq!(a.key(), b.key());
    }

    #[test]
    fn canonical_form_ignores_monomials(n in 2usize..6, seed: u64) {
        let u = random_unitary(n, seed).unwrap();
        let c = random_monomial(n, seed ^ 0xabc).to_matrix();
        let a = canonicalize(&u, tol()).unwrap();
        let b = canonicalize(&(&u * &c), tol()).unwrap();
        prop_assert!(a.approx_eq(&b, tol()));
    }

    #[test]
    fn metric_axioms(n in 2usize..6, s1: u64, s2: u64, s3: u64) {
        let p = point(n, s1);
        let q = point(n, s2);
        let d = mubness(&p, &q).unwrap();
        prop_assert_eq!(d, mubness(&q, &p).unwrap());
        prop_assert!(d >= 0.0 && d <= ((n - 1) as f64).sqrt() + 1e-9);
        prop_assert!(mubness(&p, &p).unwrap() <= 1e-9);

        let c = random_monomial(n, s3).to_matrix();
        let q_other = BasisPoint::new(q.rep() * &c, tol()).unwrap();
        prop_assert!((mubness(&p, &q_other).unwrap() - d).abs() <= 1e-9);
        prop_assert!(points_equal(&q, &q_other, tol()).unwrap());

        let u = random_unitary(n, s3).unwrap();
        let moved = mubness(&p.act(&u).unwrap(), &q.act(&u).unwrap()).unwrap();
        prop_assert!((moved - d).abs() <= 1e-9);
    }

    #[test]
    fn unbiasedness_is_equivariant_and_representative_free(n in 2usize..6, s1: u64, s2: u64) {
        let e = BasisPoint::standard(n);
        let f = BasisPoint::new(fourier_matrix(n).unwrap(), tol()).unwrap();
        let u = random_unitary(n, s1).unwrap();
        let c = random_monomial(n, s2).to_matrix();
        let f_other = BasisPoint::new(f.rep() * &c, tol()).unwrap();
        prop_assert!(is_unbiased(&e, &f_other, tol()).unwrap());
        prop_assert!(is_unbiased(&e.act(&u).unwrap(), &f.act(&u).unwrap(), tol()).unwrap());
        let p = point(n, s2);
        prop_assert_eq!(
            is_unbiased(&p, &e, tol()).unwrap(),
            is_unbiased(&p.act(&u).unwrap(), &e.act(&u).unwrap(), tol()).unwrap()
        );
    }

    #[test]
    fn dephasing_is_idempotent(x in angle(), seed: u64) {
        let m1 = random_monomial(4, seed).to_matrix();
        let m2 = random_monomial(4, seed ^ 1).to_matrix();
        let h = &(&m1 * &f4(x)) * &m2;
        let once = dephase(&h, tol()).unwrap();
        let twice = dephase(&once.matrix, tol()).unwrap();
        prop_assert!(twice.matrix.approx_eq(&once.matrix, tol()));
    }

    #[test]
    fn metric_in_the_third_basis_family(y in angle(), z in angle()) {
        let p = TripleParams::new(y, z).unwrap();
        prop_assert!(is_unbiased(&f0_point(), &h4_point(p), tol()).unwrap());
        prop_assert!((mubness(&BasisPoint::standard(4), &h4_point(p)).unwrap() - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn generators_fix_the_third_basis(y in angle(), z in angle()) {
        let p = TripleParams::new(y, z).unwrap();
        let h = h4_point(p);
        for g in triple_generators() {
            prop_assert!(points_equal(&h.act(g.matrix()).unwrap(), &h, group_tol()).unwrap());
        }
        let d1h = h.act(&d_matrix(1).unwrap().to_matrix()).unwrap();
        let image = TripleParams::new(z + FRAC_PI_2, y + FRAC_PI_2).unwrap();
        prop_assert!(points_equal(&d1h, &h4_point(image), group_tol()).unwrap());
        let r = r_matrix(&Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap());
        let rh = h.act(&r.to_matrix()).unwrap();
        let image = TripleParams::new(PI - z, PI - y).unwrap();
        prop_assert!(points_equal(&rh, &h4_point(image), group_tol()).unwrap());
    }

    #[test]
    fn numeric_and_closed_form_orbits_agree(y in angle(), z in angle()) {
        let p = TripleParams::new(y, z).unwrap();
        let numeric = orbit(&dim4_group(), &h4_point(p), group_tol()).unwrap();
        let closed = orbit_map(p);
        prop_assert_eq!(numeric.len(), closed.len());
        for q in closed {
            prop_assert!(numeric.contains(&h4_point(q), group_tol()).unwrap());
        }
    }

    #[test]
    fn diagonal_trace_identity(which in 0usize..4, seed: u64) {
        let h = match which {
            0 => f4(0.0),
            1 => f4(1.0),
            2 => fourier_matrix(3).unwrap(),
            _ => fourier_matrix(5).unwrap(),
        };
        let check = center_check(&h, 10, seed, tol()).unwrap();
        prop_assert!(check.diagonal_residual <= 1e-9);
        prop_assert!(check.passed(tol()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hadamard_equivalence_is_an_equivalence(which in 0usize..3, s1: u64, s2: u64) {
        let base = match which {
            0 => f4(0.0),
            1 => f4(1.0),
            _ => fourier_matrix(3).unwrap(),
        };
        let n = base.n();
        let scramble = |seed: u64| {
            &(&random_monomial(n, seed).to_matrix() * &base) * &random_monomial(n, seed ^ 7).to_matrix()
        };
        let a = scramble(s1);
        let b = scramble(s2);
        let fits = |h1: &ComplexMatrix, h2: &ComplexMatrix, pair: &(MonomialElement, MonomialElement)| {
            let rebuilt = &(&pair.0.to_matrix() * h2) * &pair.1.to_matrix();
            rebuilt.approx_eq(h1, Tolerance::new(1e-8).unwrap())
        };
        let refl = hadamard_equivalent(&a, &a, tol()).unwrap().unwrap();
        prop_assert!(fits(&a, &a, &refl));
        let ab = hadamard_equivalent(&a, &b, tol()).unwrap().unwrap();
        let ba = hadamard_equivalent(&b, &a, tol()).unwrap().unwrap();
        prop_assert!(fits(&a, &b, &ab) && fits(&b, &a, &ba));
        // The inverted witness of a ~ b is a witness of b ~ a.
        prop_assert!(fits(&b, &a, &(ab.0.inverse(), ab.1.inverse())));
        let bb = hadamard_equivalent(&b, &base, tol()).unwrap().unwrap();
        let composed = (ab.0.compose(&bb.0).unwrap(), bb.1.compose(&ab.1).unwrap());
        prop_assert!(fits(&a, &base, &composed));
    }

    #[test]
    fn list_equivalence_is_symmetric(y in angle(), z in angle(), pick in 0usize..4, seed: u64, len in 1usize..4) {
        let p = TripleParams::new(y, z).unwrap();
        let images = orbit_map(p);
        let q = images[pick % images.len()];
        let mut rng = seeded_rng(seed);
        let u = random_unitary_from(4, &mut rng).unwrap();
        let a = triple(p).reordered(&(0..len).collect::<Vec<_>>());
        let b = triple(q).act(&u).unwrap().reordered(&(0..len).collect::<Vec<_>>());
        let ab = lists_equivalent(&a, &b, tol()).unwrap();
        let ba = lists_equivalent(&b, &a, tol()).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        let ab = ab.unwrap();
        prop_assert!(ab.verify(&a, &b, group_tol()).unwrap());
        prop_assert!(ab.inverse().verify(&b, &a, group_tol()).unwrap());
        prop_assert!(ba.unwrap().verify(&b, &a, group_tol()).unwrap());
    }

    #[test]
    fn pair_equivalence_matches_hadamard_equivalence(x in angle(), x2 in angle(), seed: u64) {
        let u = random_unitary(4, seed).unwrap();
        let a = MubList::from_matrices(vec![u.clone(), &u * &f4(x)], tol()).unwrap();
        let b = MubList::new(vec![BasisPoint::standard(4), BasisPoint::new(f4(x2), tol()).unwrap()], tol()).unwrap();
        let (sa, _) = standard_form(&a, tol()).unwrap();
        let (sb, _) = standard_form(&b, tol()).unwrap();
        let hadamard = hadamard_equivalent(sa.bases()[1].rep(), sb.bases()[1].rep(), tol()).unwrap();
        let lists = lists_equivalent(&a, &b, tol()).unwrap();
        prop_assert_eq!(hadamard.is_some(), lists.is_some());
        if let Some(w) = lists {
            prop_assert!(w.verify(&a, &b, group_tol()).unwrap());
        }
    }

    #[test]
    fn stabilizers_are_closed_and_equivariant(y in angle(), z in angle(), seed: u64) {
        let p = TripleParams::new(y, z).unwrap();
        let list = triple(p);
        let s = list_stabilizer(&list, tol()).unwrap();
        prop_assert!(s.is_closed(group_tol()));
        prop_assert!(s.stabilizes_list(group_tol()).unwrap());
        let numeric = orbit(&dim4_group(), &h4_point(p), group_tol()).unwrap();
        prop_assert_eq!(numeric.len() * s.order(), 32);
        for g in s.elements() {
            for h in s.elements() {
                let gh = g.compose(h, group_tol());
                prop_assert!(gh.same_as(&h.compose(g, group_tol()), group_tol()));
            }
            prop_assert!(g.compose(g, group_tol()).is_identity(group_tol()));
        }

        let u = random_unitary(4, seed).unwrap();
        let moved = list_stabilizer(&list.act(&u).unwrap(), tol()).unwrap();
        let conjugated: Vec<_> = s.elements().iter().map(|g| g.conjugate_by(&u, group_tol())).collect();
        prop_assert!(moved.same_elements(&conjugated, group_tol()));
    }

    #[test]
    fn witnesses_verify(y in angle(), z in angle(), seed: u64) {
        let p = TripleParams::new(y, z).unwrap();
        let u = random_unitary(4, seed).unwrap();
        let list = MubList::from_matrices(
            vec![u.clone(), &u * &f4(0.0), &u * &h4(p)],
            tol(),
        ).unwrap();
        let (standard, w) = standard_form(&list, tol()).unwrap();
        prop_assert!(w.verify(&list, &standard, group_tol()).unwrap());
    }
}
