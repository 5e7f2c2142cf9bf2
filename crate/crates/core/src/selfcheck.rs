//! Seeded consistency checks across all modules.

use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fixtures;
use crate::homology::{homology_class, intersection_antisym, intersection_raw, tie_pairing};
use crate::rational::{int, Q};
use crate::shear::{
    abg_from_cochain, degenerate_cochain, difference_sweep, random_configuration,
    random_decomposition, verify_coupling, DEFAULT_STEPS,
};
use crate::symplectic::{
    coupling_constant, lift_weights, pairing_thm1, pairing_thm2, thurston_switch_sum,
};
use crate::track::{orientation_cover, OrientedTrack, Track};
use crate::weights::{twisted_subspace_basis, weight_space_basis, WeightSystem};

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// `6(g-1)(n-1) + floor((n-1)/2)`.
pub fn twisted_dimension_formula(genus: i64, n: usize) -> i64 {
    let d = n as i64 - 1;
    6 * (genus - 1) * d + d / 2
}

#[derive(Clone, Debug)]
pub struct SelfCheckOptions {
    pub n_max: usize,
    pub seed: u64,
    /// Random cocycle pairs per value of `n`.
    pub pairs_per_n: usize,
    pub shear_configs: usize,
}

impl SelfCheckOptions {
    pub fn new(n_max: usize, seed: u64) -> Self {
        SelfCheckOptions {
            n_max,
            seed,
            pairs_per_n: 40,
            shear_configs: 50,
        }
    }
}

pub fn run_selfcheck(opts: &SelfCheckOptions) -> Vec<CheckResult> {
    let n_max = opts.n_max.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let base = fixtures::genus2();
    let cover = orientation_cover(&base).expect("bundled fixture is valid");
    let edges = cover.graph().num_edges();
    let mut out = Vec::new();

    let bad: Vec<usize> = (2..=n_max)
        .filter(|&n| !verify_coupling(n).map(|c| c.passed()).unwrap_or(false))
        .collect();
    out.push(check(
        "coupling constants",
        bad.is_empty(),
        format!(
            "Killing form of shear generators vs 2a(n-b), n = 2..={n_max}; failures at n = {bad:?}"
        ),
    ));

    let base_dim = weight_space_basis(&base, 1)
        .map(|b| b.dimension())
        .unwrap_or(0);
    let mut dims = Vec::new();
    let mut dims_ok = base_dim == 6;
    for n in 2..=n_max {
        let got = twisted_subspace_basis(&cover, n)
            .map(|b| b.dimension())
            .unwrap_or(0);
        dims_ok &= got as i64 == twisted_dimension_formula(2, n);
        dims.push(got);
    }
    out.push(check(
        "dimension formulas",
        dims_ok,
        format!("weight space {base_dim}, twisted {dims:?} for n = 2..={n_max}"),
    ));

    let mut formulas_ok = true;
    let mut intersection_ok = true;
    let mut homology_ok = true;
    let mut algebra_ok = true;
    let mut bridge_ok = true;
    let mut cocycles = 0;
    for n in 2..=n_max {
        let basis = match twisted_subspace_basis(&cover, n) {
            Ok(b) => b,
            Err(_) => {
                formulas_ok = false;
                continue;
            }
        };
        for _ in 0..opts.pairs_per_n {
            let a1 = basis.random_element(&mut rng, 1000, edges);
            let a2 = basis.random_element(&mut rng, 1000, edges);
            cocycles += 2;
            let t1 = pairing_thm1(&a1, &a2, &cover, n);
            let t2 = pairing_thm2(&a1, &a2, &cover, n);
            formulas_ok &= matches!((&t1, &t2), (Ok(x), Ok(y)) if x == y);
            let Ok(w) = t2 else { continue };
            let back = pairing_thm2(&a2, &a1, &cover, n).ok();
            let self_pair = pairing_thm2(&a1, &a1, &cover, n).ok();
            let q = Q::new(7.into(), 3.into());
            let scaled = pairing_thm2(&a1.scaled(&q), &a2, &cover, n).ok();
            algebra_ok &=
                back == Some(-w.clone()) && self_pair == Some(Q::zero()) && scaled == Some(&w * &q);
            for a in 0..n - 1 {
                let x = a1.coordinate(a);
                let y = a2.coordinate((a + 1) % (n - 1));
                intersection_ok &= intersection_raw(&x, &y, &cover).ok()
                    == intersection_antisym(&x, &y, &cover).ok();
                homology_ok &= homology_round_trip(&x, &cover);
            }
            let decomps: Vec<_> = (0..cover.graph().num_switches())
                .map(|_| random_decomposition(&mut rng, n, 3, 7))
                .collect();
            let abg = degenerate_cochain(&cover, &a1, &decomps)
                .and_then(|u1| Ok((u1, degenerate_cochain(&cover, &a2, &decomps)?)))
                .and_then(|(u1, u2)| abg_from_cochain(&cover, &u1, &u2));
            bridge_ok &= abg.ok() == Some(w);
        }
    }
    out.push(check(
        "formula consistency",
        formulas_ok,
        format!("homological vs switch-sum pairing on {cocycles} random twisted cocycles"),
    ));
    out.push(check(
        "intersection formulas",
        intersection_ok && negative_control(),
        "divergence-split vs antisymmetrized switch sums, with a relation-breaking control".into(),
    ));
    out.push(check(
        "homology defining property",
        homology_ok,
        "closed chains whose tie pairings read back the weights".into(),
    ));
    out.push(check(
        "antisymmetry and bilinearity",
        algebra_ok,
        "w(a,a) = 0, w(a,b) = -w(b,a), w(qa,b) = q w(a,b)".into(),
    ));

    let mut worst_err: f64 = 0.0;
    let mut slopes = (f64::INFINITY, f64::NEG_INFINITY);
    let mut gap_ok = true;
    let gap_n_max = n_max.min(5);
    for i in 0..opts.shear_configs {
        let n = 2 + i % (gap_n_max - 1);
        let m = 1 + i % 20;
        let cfg = random_configuration(&mut rng, n, m);
        let s = difference_sweep(&cfg, &DEFAULT_STEPS);
        worst_err = worst_err.max(s.errors[1]);
        slopes = (slopes.0.min(s.slope), slopes.1.max(s.slope));
        gap_ok &= s.errors[1] <= 1e-6 && (1.8..=2.2).contains(&s.slope);
    }
    out.push(check(
        "gap formula finite differences",
        gap_ok,
        format!(
            "{} configurations, n <= {gap_n_max}; worst relative error at h=1e-4 {worst_err:.3e}, slopes in [{:.3}, {:.3}]",
            opts.shear_configs, slopes.0, slopes.1
        ),
    ));
    out.push(check(
        "bridge identity",
        bridge_ok,
        "switch sum of Killing pairings of degenerate cochains vs switch-sum pairing".into(),
    ));
    out.push(degeneration_check(
        &base,
        &cover,
        &mut rng,
        opts.pairs_per_n,
    ));
    out
}

fn homology_round_trip(w: &WeightSystem, t: &OrientedTrack) -> bool {
    let Ok(ch) = homology_class(w, t) else {
        return false;
    };
    ch.is_closed(t)
        && (0..t.graph().num_edges())
            .all(|e| tie_pairing(&ch, t, e).ok().as_ref() == Some(&w.weight(e)[0]))
}

/// Weights breaking the switch relations of the genus-2 cover, on which the
/// two unchecked switch sums disagree.
pub fn negative_control() -> bool {
    use crate::homology::{switch_sum_antisym, switch_sum_raw};
    let cover = orientation_cover(&fixtures::genus2()).expect("bundled fixture is valid");
    let edges = cover.graph().num_edges() as i64;
    let a1: Vec<Q> = (0..edges).map(|e| int(e + 1)).collect();
    let a2: Vec<Q> = (0..edges).map(|e| int((e * e) % 7 - 3)).collect();
    switch_sum_raw(&cover, &a1, &a2) != switch_sum_antisym(&cover, &a1, &a2)
}

fn degeneration_check(
    base: &crate::track::BaseTrack,
    cover: &OrientedTrack,
    rng: &mut ChaCha8Rng,
    pairs: usize,
) -> CheckResult {
    let c11 = coupling_constant(2, 1, 1).ok();
    let mut ok = c11 == Some(2);
    let edges = cover.graph().num_edges();
    let (Ok(twisted), Ok(base_space)) = (
        twisted_subspace_basis(cover, 2),
        weight_space_basis(base, 1),
    ) else {
        return check(
            "n = 2 degeneration",
            false,
            "basis computation failed".into(),
        );
    };
    for _ in 0..pairs {
        let a1 = twisted.random_element(rng, 1000, edges);
        let a2 = twisted.random_element(rng, 1000, edges);
        let omega = pairing_thm2(&a1, &a2, cover, 2).ok();
        let thurston = thurston_switch_sum(&a1, &a2, cover).ok();
        ok &= omega.is_some() && omega == thurston.map(|t| t * int(2));

        let w1 = base_space.random_element(rng, 1000, base.graph().num_edges());
        let w2 = base_space.random_element(rng, 1000, base.graph().num_edges());
        let lifted = lift_weights(base, &w1)
            .and_then(|l1| Ok((l1, lift_weights(base, &w2)?)))
            .and_then(|(l1, l2)| pairing_thm2(&l1, &l2, cover, 2));
        let base_sum = thurston_switch_sum(&w1, &w2, base).ok();
        ok &= lifted.ok() == base_sum.map(|t| t * int(4));
    }
    check(
        "n = 2 degeneration",
        ok,
        format!("C(1,1) = {c11:?}; w = 2 * switch sum on the cover = 4 * switch sum on the base"),
    )
}
