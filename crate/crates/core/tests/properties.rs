//! Property tests for the solver invariants.

mod support;

use proptest::prelude::*;

use powerplan_core::bargain::{evaluate_objective, nash_product, Objective};
use powerplan_core::linalg::Matrix;
use powerplan_core::link_model::{build_link_model, sir, PowerVector};
use powerplan_core::projection::{box_constraints, project_onto, total_budget};
use powerplan_core::region::{min_power_point, normalize, FeasibilityStatus, NormalizedSystem};
use powerplan_core::scenario_io::{self, GeneratorConfig, ScenarioDoc};
use powerplan_core::spectral::{spectral_radius, NonnegMatrix};

fn nonneg_rows(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..1.5f64, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_matches_dense_eigensolver(n in 1usize..=8, seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen::<f64>() * 2.0).collect())
            .collect();
        let ours = spectral_radius(&NonnegMatrix::from_rows(rows.clone()).unwrap(), 1e-10, 10_000).unwrap();
        let oracle = support::eig_spectral_radius(&rows);
        prop_assert!((ours - oracle).abs() <= 1e-6 * oracle.max(1.0));
    }

    #[test]
    fn spectral_scaling(rows in nonneg_rows(3), alpha in 0.1..5.0f64) {
        let base = spectral_radius(&NonnegMatrix::from_rows(rows.clone()).unwrap(), 1e-10, 10_000).unwrap();
        let scaled_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * alpha).collect()).collect();
        let scaled = spectral_radius(&NonnegMatrix::from_rows(scaled_rows).unwrap(), 1e-10, 10_000).unwrap();
        prop_assert!((scaled - alpha * base).abs() <= 1e-8 * (1.0 + alpha * base));
    }

    #[test]
    fn spectral_entrywise_monotone(rows in nonneg_rows(3), bump in prop::collection::vec(prop::collection::vec(0.0..0.5f64, 3), 3)) {
        let small = spectral_radius(&NonnegMatrix::from_rows(rows.clone()).unwrap(), 1e-10, 10_000).unwrap();
        let bigger: Vec<Vec<f64>> = rows.iter().zip(&bump)
            .map(|(r, b)| r.iter().zip(b).map(|(v, d)| v + d).collect())
            .collect();
        let large = spectral_radius(&NonnegMatrix::from_rows(bigger).unwrap(), 1e-10, 10_000).unwrap();
        prop_assert!(small <= large + 2e-10);
    }

    #[test]
    fn projection_nonexpansive(
        x in prop::collection::vec(-1.0..4.0f64, 2),
        y in prop::collection::vec(-1.0..4.0f64, 2),
        cap in 0.5..2.0f64,
        budget in 0.5..3.0f64,
    ) {
        let cs = box_constraints(&[cap, cap]).unwrap().intersect(total_budget(budget, 2).unwrap());
        let px = project_onto(&x, &cs, 1e-10, 100_000).unwrap();
        let py = project_onto(&y, &cs, 1e-10, 100_000).unwrap();
        let d_in: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let d_out: f64 = px.iter().zip(py.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(d_out <= d_in + 2e-10);
    }

    #[test]
    fn generated_scenarios_roundtrip(seed in 0u64..500, k in 1usize..6) {
        let scn = scenario_io::generate(&GeneratorConfig { seed, users: k, processing_gain: 2 * k, ..Default::default() });
        let doc = ScenarioDoc { scenario: scn, objective: None };
        let bytes = scenario_io::to_canonical_string(&doc).unwrap();
        let reloaded = scenario_io::load_str(&bytes).unwrap();
        prop_assert_eq!(&doc, &reloaded);
        prop_assert_eq!(bytes, scenario_io::to_canonical_string(&reloaded).unwrap());
    }

    #[test]
    fn sir_routes_agree_on_generated_scenarios(seed in 0u64..200) {
        let scn = scenario_io::generate(&GeneratorConfig { seed, users: 3, processing_gain: 4, ..Default::default() });
        let model = build_link_model(&scn).unwrap();
        let direct = powerplan_core::link_model::LinkModel::new(model.a.clone(), model.cdiag.clone()).unwrap();
        let p = PowerVector::new(vec![0.3, 0.1, 0.7]).unwrap();
        prop_assert_eq!(
            sir(&model, scn.sigma2, &p).unwrap(),
            sir(&direct, scn.sigma2, &p).unwrap()
        );
    }
}

#[test]
fn monotone_objectives_share_the_minimizer() {
    // every componentwise monotone objective in the library is minimized at
    // the minimal point, and the Nash product is maximized there
    let sys = NormalizedSystem::<f64>::new(
        Matrix::from_rows(vec![vec![0.0, 0.2], vec![0.3, 0.0]]).unwrap(),
        vec![0.1, 0.1],
        vec![1.0, 1.0],
    )
    .unwrap();
    let pi = min_power_point(&sys).unwrap().min_point.unwrap();
    let pmax = vec![1.0, 1.0];
    let u0: Vec<f64> = pmax.iter().map(|c: &f64| -c.exp()).collect();
    let objectives = [
        ("sum", Objective::Sum),
        ("l2", Objective::Lq { q: 2.0 }),
        ("nash", Objective::NashGame { pmax: pmax.clone() }),
    ];
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    for _ in 0..200 {
        let member = support::sample_member(&sys, &pi, &mut rng);
        if member.iter().zip(&pmax).any(|(&p, &c)| p > c) {
            continue;
        }
        for (name, obj) in &objectives {
            assert!(
                evaluate_objective(obj, &pi).unwrap() <= evaluate_objective(obj, &member).unwrap() + 1e-12,
                "objective {name} not minimized at the minimal point"
            );
        }
        let diff: f64 = member.iter().zip(pi.iter()).map(|(a, b)| (a - b).abs()).sum();
        if diff > 1e-9 {
            assert!(
                nash_product(&pi, &pmax, &u0).unwrap() > nash_product(&member, &pmax, &u0).unwrap(),
                "Nash product not strictly maximal at the minimal point"
            );
        }
    }
}

#[test]
fn min_point_matches_fixed_point_iteration() {
    for seed in 0..20u64 {
        let scn = scenario_io::generate(&GeneratorConfig {
            seed,
            users: 4,
            processing_gain: 8,
            near_far: 12.0,
            gamma_scale: 1.0,
        });
        let model = build_link_model(&scn).unwrap();
        let sys = normalize(&model, scn.sigma2, &scn.gamma).unwrap();
        let rep = min_power_point(&sys).unwrap();
        if rep.status != FeasibilityStatus::Feasible {
            continue;
        }
        let pi = rep.min_point.unwrap();
        let oracle = support::fixed_point_oracle(&sys, 2000);
        for i in 0..pi.len() {
            assert!(
                (pi[i] - oracle[i]).abs() <= 1e-9 * (1.0 + oracle[i]),
                "LU solution disagrees with fixed-point iteration"
            );
        }
    }
}

#[test]
fn boundary_band_is_conservative() {
    // rho exactly at one classifies as boundary, not feasible
    let sys = NormalizedSystem::<f64>::new(
        Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        vec![0.1, 0.1],
        vec![1.0, 1.0],
    )
    .unwrap();
    let rep = min_power_point(&sys).unwrap();
    assert_eq!(rep.status, FeasibilityStatus::Boundary);
}
