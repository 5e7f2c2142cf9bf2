use hitchin_shear::fixtures;
use hitchin_shear::homology::{
    homology_class, intersection_antisym, intersection_raw, tie_pairing,
};
use hitchin_shear::io::{parse_weights, write_weights};
use hitchin_shear::linalg::Matrix;
use hitchin_shear::rational::{int, ratio, Q};
use hitchin_shear::shear::{
    amplitudes_to_potentials, elementary_shear, infinitesimal_shear, killing_form,
    random_decomposition, LineDecomposition,
};
use hitchin_shear::symplectic::{pairing_thm1, pairing_thm2, thm2_switch_contribution};
use hitchin_shear::track::{
    is_orientable, orientation_cover, ribbon_isomorphism, BaseTrack, OrientedTrack, Sign, Track,
};
use hitchin_shear::weights::{twisted_subspace_basis, SubspaceBasis, WeightSystem};
use num::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn cover() -> &'static OrientedTrack {
    static COVER: OnceLock<OrientedTrack> = OnceLock::new();
    COVER.get_or_init(|| orientation_cover(&fixtures::genus2()).unwrap())
}

fn basis(n: usize) -> &'static SubspaceBasis {
    static BASES: OnceLock<Vec<SubspaceBasis>> = OnceLock::new();
    &BASES.get_or_init(|| {
        (2..=4)
            .map(|n| twisted_subspace_basis(cover(), n).unwrap())
            .collect()
    })[n - 2]
}

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=20).prop_map(|(p, q)| ratio(p, q))
}

/// A twisted cocycle on the genus-2 cover, as `(n, weights)`.
fn cocycle_pair() -> impl Strategy<Value = (usize, WeightSystem, WeightSystem)> {
    (2usize..=4).prop_flat_map(|n| {
        let dim = basis(n).dimension();
        (
            Just(n),
            prop::collection::vec(rational(), dim),
            prop::collection::vec(rational(), dim),
        )
            .prop_map(|(n, c1, c2)| {
                let edges = cover().graph().num_edges();
                let b = basis(n);
                (n, b.combine(&c1, edges), b.combine(&c2, edges))
            })
    })
}

fn signs(len: usize) -> impl Strategy<Value = Vec<Sign>> {
    prop::collection::vec(prop::bool::ANY, len).prop_map(|v| {
        v.into_iter()
            .map(|b| if b { Sign::Plus } else { Sign::Minus })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn both_pairing_formulas_agree((n, a1, a2) in cocycle_pair()) {
        prop_assert_eq!(pairing_thm1(&a1, &a2, cover(), n).unwrap(), pairing_thm2(&a1, &a2, cover(), n).unwrap());
    }

    #[test]
    fn switch_contributions_are_involution_invariant((n, a1, a2) in cocycle_pair()) {
        let inv = cover().involution().unwrap();
        for s in 0..cover().graph().num_switches() {
            prop_assert_eq!(
                thm2_switch_contribution(&a1, &a2, cover(), n, s).unwrap(),
                thm2_switch_contribution(&a1, &a2, cover(), n, inv.switches[s]).unwrap()
            );
        }
    }

    #[test]
    fn pairing_is_bilinear((n, a1, a2) in cocycle_pair(), q in rational()) {
        let c = cover();
        let w = pairing_thm2(&a1, &a2, c, n).unwrap();
        let sum = a1.checked_add(&a2.scaled(&q)).unwrap();
        prop_assert_eq!(pairing_thm2(&sum, &a2, c, n).unwrap(), w.clone());
        prop_assert_eq!(pairing_thm2(&a2, &sum, c, n).unwrap(), -w);
    }

    #[test]
    fn intersections_and_homology((n, a1, a2) in cocycle_pair()) {
        let c = cover();
        for a in 0..n - 1 {
            let (x, y) = (a1.coordinate(a), a2.coordinate(a));
            prop_assert_eq!(intersection_raw(&x, &y, c).unwrap(), intersection_antisym(&x, &y, c).unwrap());
            let ch = homology_class(&x, c).unwrap();
            prop_assert!(ch.is_closed(c));
            for e in 0..c.graph().num_edges() {
                prop_assert_eq!(&tie_pairing(&ch, c, e).unwrap(), &x.weight(e)[0]);
            }
        }
    }

    #[test]
    fn weights_survive_serialization((_n, a1, _a2) in cocycle_pair()) {
        let g = cover().graph();
        prop_assert_eq!(parse_weights(&write_weights(&a1, g), g).unwrap(), a1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orientable_iff_cover_disconnected(tau in signs(18)) {
        let g = fixtures::genus2().graph().clone();
        let base = BaseTrack::new(g, tau).unwrap();
        let cover = orientation_cover(&base).unwrap();
        prop_assert_eq!(is_orientable(&base).unwrap(), cover.graph().num_components() == 2);
    }

    #[test]
    fn regauging_gives_isomorphic_covers(tau in signs(18), switch in 0usize..12) {
        let g = fixtures::genus2().graph().clone();
        let base = BaseTrack::new(g, tau).unwrap();
        let a = orientation_cover(&base).unwrap();
        let b = orientation_cover(&base.regauged(switch)).unwrap();
        prop_assert!(ribbon_isomorphism(a.graph(), b.graph()).is_some());
    }

    #[test]
    fn potentials_solve_the_difference_system(u in prop::collection::vec(rational(), 1..8)) {
        let n = u.len() + 1;
        let mut rows = Vec::new();
        for a in 0..n - 1 {
            let mut r = vec![Q::zero(); n];
            r[a] = Q::one();
            r[a + 1] = -Q::one();
            rows.push(r);
        }
        rows.push(vec![Q::one(); n]);
        let m = Matrix::from_rows(rows).unwrap();
        let mut rhs = u.clone();
        rhs.push(Q::zero());
        let rhs = Matrix::from_rows(rhs.into_iter().map(|x| vec![x]).collect()).unwrap();
        let v = m.inverse().unwrap().checked_mul(&rhs).unwrap();
        let expected: Vec<Q> = (0..n).map(|i| v[(i, 0)].clone()).collect();
        prop_assert_eq!(amplitudes_to_potentials(&u), expected);
    }

    #[test]
    fn generators_are_traceless_and_equivariant(n in 2usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_decomposition(&mut rng, n, 3, 7);
        let g = random_decomposition(&mut rng, n, 3, 7);
        let moved = LineDecomposition::new(g.lines().checked_mul(l.lines()).unwrap()).unwrap();
        let g_inv = g.lines().inverse().unwrap();
        for a in 1..n {
            let t = infinitesimal_shear(n, a, &l).unwrap();
            prop_assert!(t.trace().is_zero());
            let conj = g.lines().checked_mul(&t).unwrap().checked_mul(&g_inv).unwrap();
            prop_assert_eq!(&infinitesimal_shear(n, a, &moved).unwrap(), &conj);
            prop_assert_eq!(killing_form(&t, &t).unwrap(), int(2 * a as i64 * (n - a) as i64));
        }
    }

    #[test]
    fn elementary_shears_are_unimodular_with_generator_derivatives(
        n in 2usize..6,
        seed in any::<u64>(),
        scale in 0.1f64..1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_decomposition(&mut rng, n, 2, 5);
        let u: Vec<f64> = (0..n - 1).map(|i| scale * (i as f64 - 1.0)).collect();
        let det = elementary_shear(&u, &l).unwrap().determinant().unwrap();
        prop_assert!((det - 1.0).abs() < 1e-9, "det = {}", det);
        let h = 1e-5;
        for a in 1..n {
            let mut up = vec![0.0; n - 1];
            up[a - 1] = h;
            let down: Vec<f64> = up.iter().map(|x| -x).collect();
            let diff = elementary_shear(&up, &l)
                .unwrap()
                .checked_sub(&elementary_shear(&down, &l).unwrap())
                .unwrap()
                .scale(&(0.5 / h));
            let t = infinitesimal_shear(n, a, &l).unwrap().to_f64();
            let rel = diff.max_abs_diff(&t) / t.frobenius_norm();
            prop_assert!(rel < 1e-6, "relative error {}", rel);
        }
    }
}
