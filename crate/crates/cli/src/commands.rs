use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use beamsynth_core::pattern::{sweep, to_db};
use beamsynth_core::{
    ladder_instance, oracle_solve, oracle_solve_sphere, solve, Complex64, DiskRadii,
    OracleConfig, PatternSample, Residuals, SidelobeSummary, SolveReport,
};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

pub const PATTERN_HEADER: &str =
    "angle_deg,nominal,worst_elementwise,worst_sphere,nominal_db,worst_elementwise_db,worst_sphere_db";
pub const BENCH_HEADER: &str = "M,N,iterations,converged,admm_median_s,admm_per_iter_s,oracle_median_s";
pub const COMPARE_HEADER: &str =
    "u_max,phi_max_deg,delta_max,epsilon,proposed_db,l2_db,nominal_db,proposed_iterations,nominal_iterations";

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub converged: bool,
    pub iterations: usize,
    pub objective_aux: f64,
    pub objective_direct: f64,
    pub final_residuals: Option<Residuals>,
    pub residual_history: Vec<Residuals>,
    pub wall_time_s: f64,
    pub radii: DiskRadii,
    pub epsilon: f64,
    pub summary: SidelobeSummary,
    pub w_opt: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub report: SynthesisReport,
    pub samples: Vec<PatternSample>,
}

pub fn synthesize(scenario: &Scenario, seed: Option<u64>) -> Result<Synthesis> {
    let geometry = scenario.geometry()?;
    let grid = scenario.grid()?;
    let instance = scenario.instance(seed)?;
    let solved: SolveReport = solve(&instance, &scenario.solver_config())?;
    let (samples, summary) = sweep(&solved.w_opt, &geometry, &grid, instance.radii())?;
    let report = SynthesisReport {
        converged: solved.converged,
        iterations: solved.iterations,
        objective_aux: solved.objective_aux,
        objective_direct: solved.objective_direct,
        final_residuals: solved.residual_history.last().copied(),
        residual_history: solved.residual_history,
        wall_time_s: solved.wall_time,
        epsilon: instance.radii().epsilon(),
        radii: instance.radii().clone(),
        summary,
        w_opt: solved.w_opt,
    };
    Ok(Synthesis { report, samples })
}

pub fn pattern_csv(samples: &[PatternSample]) -> String {
    let mut out = String::with_capacity(96 * (samples.len() + 1));
    out.push_str(PATTERN_HEADER);
    out.push('\n');
    for s in samples {
        writeln!(
            out,
            "{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            s.angle,
            s.nominal,
            s.worst_elementwise,
            s.worst_sphere,
            to_db(s.nominal),
            to_db(s.worst_elementwise),
            to_db(s.worst_sphere)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone)]
pub struct SynthesisArtifacts {
    pub synthesis: Synthesis,
    pub pattern_path: PathBuf,
    pub report_path: PathBuf,
}

/// Load the scenario, solve, and write `pattern.csv` and `report.json`.
pub fn run_synthesis(scenario_path: &Path, out_dir: Option<&Path>, seed: Option<u64>) -> Result<SynthesisArtifacts> {
    let scenario = Scenario::load(scenario_path)?;
    let synthesis = synthesize(&scenario, seed)?;
    let dir = output_dir(out_dir, &scenario);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let pattern_path = dir.join("pattern.csv");
    let report_path = dir.join("report.json");
    write(&pattern_path, &pattern_csv(&synthesis.samples))?;
    write(&report_path, &serde_json::to_string(&synthesis.report)?)?;
    Ok(SynthesisArtifacts {
        synthesis,
        pattern_path,
        report_path,
    })
}

fn output_dir(cli: Option<&Path>, scenario: &Scenario) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    pub admm_median_s: f64,
    pub admm_per_iter_s: f64,
    pub oracle_median_s: Option<f64>,
}

/// Largest array size for which the reference solver is also timed.
pub const ORACLE_MAX_ELEMENTS: usize = 32;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[k]
    } else {
        0.5 * (xs[k - 1] + xs[k])
    }
}

/// Time converged ADMM solves (and desk-scale reference solves) on the
/// standard ladder instances.
pub fn run_bench(pairs: &[(usize, usize)], delta: f64, repeats: usize) -> Result<Vec<BenchRow>> {
    anyhow::ensure!(repeats >= 1, "repeats must be at least 1");
    let config = beamsynth_core::SolverConfig::default();
    let instances = pairs
        .iter()
        .map(|&(m, n)| ladder_instance(m, n, delta))
        .collect::<Result<Vec<_>, _>>()?;
    let mut outcomes = Vec::with_capacity(instances.len());
    for instance in &instances {
        let r = solve(instance, &config)?;
        outcomes.push((r.iterations, r.converged));
    }
    // round-robin so slow stretches hit every instance alike
    let mut times = vec![Vec::with_capacity(repeats); instances.len()];
    for _ in 0..repeats {
        for (k, instance) in instances.iter().enumerate() {
            let start = Instant::now();
            let r = solve(instance, &config)?;
            times[k].push(start.elapsed().as_secs_f64());
            debug_assert_eq!(outcomes[k], (r.iterations, r.converged));
        }
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (k, (&(m, n), instance)) in pairs.iter().zip(&instances).enumerate() {
        let (iterations, converged) = outcomes[k];
        let oracle_median_s = if n <= ORACLE_MAX_ELEMENTS {
            let cfg = OracleConfig::default();
            let mut ot = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let start = Instant::now();
                oracle_solve(instance, &cfg)?;
                ot.push(start.elapsed().as_secs_f64());
            }
            Some(median(ot))
        } else {
            None
        };
        let admm_median_s = median(std::mem::take(&mut times[k]));
        rows.push(BenchRow {
            m,
            n,
            iterations,
            converged,
            admm_median_s,
            admm_per_iter_s: admm_median_s / iterations.max(1) as f64,
            oracle_median_s,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let oracle = r.oracle_median_s.map(|t| format!("{t:.6e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{}",
            r.m, r.n, r.iterations, r.converged, r.admm_median_s, r.admm_per_iter_s, oracle
        )
        .unwrap();
    }
    out
}

/// One sweep point of the three-way comparison. Levels are worst-case
/// side-lobe peaks in dB relative to the worst-case main-lobe response, all
/// evaluated under the element-wise model of the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub u_max: f64,
    pub phi_max_deg: f64,
    pub delta_max: f64,
    pub epsilon: f64,
    pub proposed_db: f64,
    pub l2_db: f64,
    pub nominal_db: f64,
    pub proposed_iterations: usize,
    pub proposed_converged: bool,
    pub nominal_iterations: usize,
    pub nominal_converged: bool,
    pub l2_flagged: bool,
}

/// Compare the element-wise robust design against the bounded-sphere design
/// and the nominal design for each `u_max`. Draws use `seed`, falling back to
/// the scenario's own seed, then 0.
pub fn run_compare(
    scenario: &Scenario,
    u_max_list: &[f64],
    phi_max_deg: f64,
    seed: Option<u64>,
    oracle: &OracleConfig,
) -> Result<Vec<CompareRow>> {
    let geometry = scenario.geometry()?;
    let grid = scenario.grid()?;
    let config = scenario.solver_config();
    let seed = seed.or(scenario.seed()).unwrap_or(0);
    let n = geometry.num_elements();

    let nominal_instance = beamsynth_core::build_instance(&geometry, &grid, &DiskRadii::zeros(n))?;
    let nominal = solve(&nominal_instance, &config)?;

    let level = |w: &[Complex64], radii: &DiskRadii| -> Result<f64> {
        Ok(sweep(w, &geometry, &grid, radii)?.1.relative_peak_db())
    };

    let mut rows = Vec::with_capacity(u_max_list.len());
    for &u_max in u_max_list {
        let model = beamsynth_core::random_uncertainty(n, u_max, phi_max_deg.to_radians(), seed)?;
        let radii = beamsynth_core::disk_radii(&model);
        let instance = nominal_instance.with_radii(radii.clone())?;
        let proposed = solve(&instance, &config)?;
        let epsilon = radii.epsilon();
        let l2 = oracle_solve_sphere(&instance, epsilon, oracle)?;
        rows.push(CompareRow {
            u_max,
            phi_max_deg,
            delta_max: radii.max(),
            epsilon,
            proposed_db: level(&proposed.w_opt, &radii)?,
            l2_db: level(&l2.w, &radii)?,
            nominal_db: level(&nominal.w_opt, &radii)?,
            proposed_iterations: proposed.iterations,
            proposed_converged: proposed.converged,
            nominal_iterations: nominal.iterations,
            nominal_converged: nominal.converged,
            l2_flagged: l2.flagged,
        });
    }
    Ok(rows)
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{:.6},{:.6},{:.9},{:.9},{:.6},{:.6},{:.6},{},{}",
            r.u_max,
            r.phi_max_deg,
            r.delta_max,
            r.epsilon,
            r.proposed_db,
            r.l2_db,
            r.nominal_db,
            r.proposed_iterations,
            r.nominal_iterations
        )
        .unwrap();
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    write(path, contents)
}
