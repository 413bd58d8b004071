use beamsynth_core::admm::direct_objective;
use beamsynth_core::linalg::norm2;
use beamsynth_core::oracle::KktDuals;
use beamsynth_core::pattern::mainlobe_worst_min;
use beamsynth_core::{
    build_instance, kkt_check, oracle_solve, solve, AngleGrid, ArrayGeometry, DiskRadii,
    OracleConfig, ProblemInstance, SolverConfig,
};

fn spread(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

/// Main lobe at 90 degrees, `m` side-lobe samples split evenly over
/// `[0, 70]` and `[110, 180]`.
fn instance(n: usize, m: usize, delta: f64) -> ProblemInstance {
    let mut angles = spread(0.0, 70.0, m / 2);
    angles.extend(spread(110.0, 180.0, m - m / 2));
    let grid = AngleGrid::new(90.0, angles).unwrap();
    let geom = ArrayGeometry::half_wavelength(n).unwrap();
    build_instance(&geom, &grid, &DiskRadii::uniform(n, delta).unwrap()).unwrap()
}

fn precise() -> OracleConfig {
    OracleConfig {
        iterations: 1_000_000,
        ..OracleConfig::default()
    }
}

#[test]
fn nominal_design_matches_oracle() {
    let inst = instance(4, 8, 0.0);
    let r = solve(&inst, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    let o = oracle_solve(&inst, &precise()).unwrap();
    assert!(!o.flagged);
    let gap = (r.objective_direct - o.objective).abs() / o.objective;
    assert!(gap <= 1e-3, "gap {gap:e}");
}

#[test]
fn robust_design_meets_mainlobe_constraint() {
    let inst = instance(8, 24, 0.15);
    let cfg = SolverConfig::default();
    let r = solve(&inst, &cfg).unwrap();
    assert!(r.converged);
    assert!(mainlobe_worst_min(&r.w_opt, inst.mainlobe(), inst.radii()) >= 1.0 - 1e-6);
    let (m, n) = inst.dims();
    let tol = 10.0 * cfg.tol * (m + n) as f64;
    assert!((r.objective_aux - r.objective_direct).abs() <= tol);
    assert_eq!(direct_objective(&inst, &r.w_opt), r.objective_direct);
}

#[test]
fn admm_matches_oracle_and_passes_kkt() {
    let inst = instance(6, 16, 0.1);
    let r = solve(&inst, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    let o = oracle_solve(&inst, &precise()).unwrap();
    assert!((r.objective_direct - o.objective).abs() / o.objective <= 1e-2);
    let duals = KktDuals {
        lambda: r.final_state.lambda.clone(),
        gamma: r.final_state.gamma.clone(),
    };
    let kkt = kkt_check(&inst, &r.w_opt, r.final_state.t, &duals).unwrap();
    assert!(kkt.max_residual() <= 1e-4 * (1.0 + norm2(&r.w_opt)), "{kkt:?}");
}

#[test]
fn oracle_restarts_agree() {
    let inst = instance(6, 16, 0.1);
    let a = oracle_solve(&inst, &OracleConfig { seed: Some(1), ..precise() }).unwrap();
    let b = oracle_solve(&inst, &OracleConfig { seed: Some(2), ..precise() }).unwrap();
    assert!((a.objective - b.objective).abs() / a.objective <= 2e-3);
    for s in [&a, &b] {
        assert!(s.mainlobe_violation <= 1e-4);
        assert!(s.imag_mainlobe <= 1e-10);
    }
}

#[test]
fn larger_radii_cost_more() {
    let cfg = SolverConfig::default();
    let mut last = 0.0;
    for delta in [0.0, 0.05, 0.1, 0.15] {
        let r = solve(&instance(8, 24, delta), &cfg).unwrap();
        assert!(r.converged);
        assert!(r.objective_direct >= last - 1e-6);
        last = r.objective_direct;
    }
}
