//! ADMM for the robust synthesis SOCP.
//!
//! The problem is split with auxiliaries `x_m = w† a_m` (`m = 0..=M`) and
//! `v = w`:
//!
//! ```text
//! min  t + sum_n delta_n |v_n|
//! s.t. |x_m| <= t                        m = 1..=M
//!      x_0 >= sum_n delta_n |v_n| + 1,   Im{x_0} = 0
//!      x_m = w† a_m,  v = w
//! ```
//!
//! Each iteration solves a fixed Hermitian system for `w`, the two closed-form
//! proximal problems in [`crate::prox`] for `{t, x, v}`, and takes a dual
//! ascent step on `lambda` and `gamma`.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Result};
use crate::linalg::{inner, norm_inf_diff, Cholesky};
use crate::problem::ProblemInstance;
use crate::prox::{mainlobe_prox_into, sidelobe_prox_into, ProxWorkspace};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rho: f64,
    /// Stop once both primal residuals and the `w` step fall below this
    /// (infinity norm).
    pub tol: f64,
    /// Slack allowed on the block constraints after each proximal step.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            tol: 1e-6,
            feas_tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rho", self.rho)?;
        positive("tol", self.tol)?;
        positive("feas_tol", self.feas_tol)?;
        if self.max_iter == 0 {
            return Err(domain("max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmState {
    pub w: Vec<Complex64>,
    pub v: Vec<Complex64>,
    /// Index 0 is the main lobe.
    pub x: Vec<Complex64>,
    pub t: f64,
    pub lambda: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
    pub iter: usize,
}

impl AdmmState {
    /// All-zero starting point sized for `instance`.
    pub fn zeros(instance: &ProblemInstance) -> Self {
        let (m, n) = instance.dims();
        Self {
            w: vec![ZERO; n],
            v: vec![ZERO; n],
            x: vec![ZERO; m + 1],
            t: 0.0,
            lambda: vec![ZERO; m + 1],
            gamma: vec![ZERO; n],
            iter: 0,
        }
    }

    fn check(&self, instance: &ProblemInstance) -> Result<()> {
        let (m, n) = instance.dims();
        check_len("state.w", self.w.len(), n)?;
        check_len("state.v", self.v.len(), n)?;
        check_len("state.gamma", self.gamma.len(), n)?;
        check_len("state.x", self.x.len(), m + 1)?;
        check_len("state.lambda", self.lambda.len(), m + 1)?;
        Ok(())
    }
}

/// Factored `A = rho (sum_{m=0}^{M} a_m a_m† + I)`.
#[derive(Debug, Clone)]
pub struct WUpdateSystem {
    chol: Cholesky,
    rho: f64,
}

impl WUpdateSystem {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `A` rebuilt from its factor (row-major).
    pub fn reconstruct(&self) -> Vec<Complex64> {
        self.chol.reconstruct()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut out = b.to_vec();
        self.chol.solve_in_place(&mut out);
        out
    }
}

/// The `A` matrix of the `w` update, row-major.
pub fn w_system_matrix(instance: &ProblemInstance, rho: f64) -> Vec<Complex64> {
    let n = instance.num_elements();
    let mut a = vec![ZERO; n * n];
    for m in 0..=instance.num_sidelobes() {
        let s = instance.steering(m).as_slice();
        for i in 0..n {
            let si = s[i];
            for j in 0..=i {
                a[i * n + j] += si * s[j].conj();
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = a[i * n + j] * rho;
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
        a[i * n + i] += rho;
    }
    a
}

pub fn precompute_w_system(instance: &ProblemInstance, rho: f64) -> Result<WUpdateSystem> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(domain(format!("rho must be positive, got {rho}")));
    }
    let a = w_system_matrix(instance, rho);
    let chol = Cholesky::factor(&a, instance.num_elements())?;
    Ok(WUpdateSystem { chol, rho })
}

/// `p_m = w† a_m` for `m = 0..=M`.
fn project(instance: &ProblemInstance, w: &[Complex64], out: &mut [Complex64]) {
    for (m, p) in out.iter_mut().enumerate() {
        *p = inner(w, instance.steering(m).as_slice());
    }
}

/// Right-hand side `b = sum_m (conj(lambda_m) + rho conj(x_m)) a_m + gamma + rho v`.
fn w_rhs(instance: &ProblemInstance, state: &AdmmState, rho: f64, b: &mut [Complex64]) {
    for (bn, (g, v)) in b.iter_mut().zip(state.gamma.iter().zip(&state.v)) {
        *bn = g + v * rho;
    }
    for m in 0..=instance.num_sidelobes() {
        let coef = (state.lambda[m] + state.x[m] * rho).conj();
        for (bn, a) in b.iter_mut().zip(instance.steering(m).as_slice()) {
            *bn += coef * a;
        }
    }
}

/// Minimizer of the augmented Lagrangian over `w` with everything else held.
pub fn update_w(
    system: &WUpdateSystem,
    state: &AdmmState,
    instance: &ProblemInstance,
) -> Result<Vec<Complex64>> {
    state.check(instance)?;
    let mut b = vec![ZERO; instance.num_elements()];
    w_rhs(instance, state, system.rho, &mut b);
    system.chol.solve_in_place(&mut b);
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockUpdate {
    pub v: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub t: f64,
}

#[allow(clippy::too_many_arguments)]
fn blocks_into(
    instance: &ProblemInstance,
    state: &AdmmState,
    proj: &[Complex64],
    rho: f64,
    c: &mut Vec<Complex64>,
    d: &mut Vec<Complex64>,
    ws: &mut ProxWorkspace,
    v_out: &mut [Complex64],
    x_out: &mut [Complex64],
) -> f64 {
    let inv = 1.0 / rho;
    c.clear();
    c.extend(
        state.lambda[1..]
            .iter()
            .zip(&proj[1..])
            .map(|(l, p)| l * inv - p),
    );
    let (t, _) = sidelobe_prox_into(c, rho, &mut x_out[1..], ws);

    let c0 = state.lambda[0] * inv - proj[0];
    d.clear();
    d.extend(state.gamma.iter().zip(&state.w).map(|(g, w)| g * inv - w));
    let (x0, _) = mainlobe_prox_into(c0, d, instance.radii().as_slice(), rho, v_out, ws);
    x_out[0] = Complex64::new(x0, 0.0);
    t
}

/// Joint minimizer over `{v, x, t}` given the current `w` and multipliers.
pub fn update_blocks(state: &AdmmState, instance: &ProblemInstance, rho: f64) -> Result<BlockUpdate> {
    state.check(instance)?;
    let (m, n) = instance.dims();
    let mut proj = vec![ZERO; m + 1];
    project(instance, &state.w, &mut proj);
    let mut v = vec![ZERO; n];
    let mut x = vec![ZERO; m + 1];
    let t = blocks_into(
        instance,
        state,
        &proj,
        rho,
        &mut Vec::with_capacity(m),
        &mut Vec::with_capacity(n),
        &mut ProxWorkspace::new(),
        &mut v,
        &mut x,
    );
    Ok(BlockUpdate { v, x, t })
}

fn multipliers_in_place(state: &mut AdmmState, proj: &[Complex64], rho: f64) {
    for ((l, x), p) in state.lambda.iter_mut().zip(&state.x).zip(proj) {
        *l += (x - p) * rho;
    }
    for ((g, v), w) in state.gamma.iter_mut().zip(&state.v).zip(&state.w) {
        *g += (v - w) * rho;
    }
}

/// Dual ascent step; returns the new `(lambda, gamma)`.
pub fn update_multipliers(
    state: &AdmmState,
    instance: &ProblemInstance,
    rho: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    state.check(instance)?;
    let mut proj = vec![ZERO; instance.num_sidelobes() + 1];
    project(instance, &state.w, &mut proj);
    let mut next = state.clone();
    multipliers_in_place(&mut next, &proj, rho);
    Ok((next.lambda, next.gamma))
}

/// Augmented Lagrangian at `state`. The block constraints on `{x, t, v}` are
/// not part of the value; callers keep them satisfied.
pub fn augmented_lagrangian(state: &AdmmState, instance: &ProblemInstance, rho: f64) -> f64 {
    let delta = instance.radii().as_slice();
    let mut val = state.t
        + state
            .v
            .iter()
            .zip(delta)
            .map(|(v, d)| d * v.norm())
            .sum::<f64>();
    for m in 0..=instance.num_sidelobes() {
        let r = state.x[m] - inner(&state.w, instance.steering(m).as_slice());
        val += (state.lambda[m].conj() * r).re + 0.5 * rho * r.norm_sqr();
    }
    for ((g, v), w) in state.gamma.iter().zip(&state.v).zip(&state.w) {
        let r = v - w;
        val += (g.conj() * r).re + 0.5 * rho * r.norm_sqr();
    }
    val
}

/// Per-iteration residuals, all in the infinity norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max_m |x_m - w† a_m|`
    pub primal_x: f64,
    /// `max_n |v_n - w_n|`
    pub primal_v: f64,
    /// `max_n |w_n - w_n^prev|`
    pub delta_w: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal_x.max(self.primal_v).max(self.delta_w)
    }

    fn is_finite(&self) -> bool {
        self.primal_x.is_finite() && self.primal_v.is_finite() && self.delta_w.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub w_opt: Vec<Complex64>,
    /// `t + sum delta_n |v_n|` from the auxiliaries.
    pub objective_aux: f64,
    /// `max_m |w† a_m| + sum delta_n |w_n|` evaluated at `w_opt`.
    pub objective_direct: f64,
    pub iterations: usize,
    pub residual_history: Vec<Residuals>,
    pub converged: bool,
    /// Seconds spent in the iteration loop, including the factorization.
    pub wall_time: f64,
    pub final_state: AdmmState,
}

/// `max_m |w† a_m| + sum_n delta_n |w_n|` over the side lobes.
pub fn direct_objective(instance: &ProblemInstance, w: &[Complex64]) -> f64 {
    let peak = instance
        .sidelobes()
        .iter()
        .map(|a| inner(w, a.as_slice()).norm())
        .fold(0.0, f64::max);
    peak + weighted_l1(instance, w)
}

pub(crate) fn weighted_l1(instance: &ProblemInstance, w: &[Complex64]) -> f64 {
    w.iter()
        .zip(instance.radii().as_slice())
        .map(|(z, d)| d * z.norm())
        .sum()
}

/// Run ADMM from the zero initialization until the residuals fall below
/// `config.tol` or `config.max_iter` iterations elapse.
pub fn solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let rho = config.rho;
    let system = precompute_w_system(instance, rho)?;
    let (m, n) = instance.dims();

    let mut state = AdmmState::zeros(instance);
    let mut proj = vec![ZERO; m + 1];
    let mut w_prev = vec![ZERO; n];
    let mut b_buf = vec![ZERO; n];
    let mut c_buf = Vec::with_capacity(m);
    let mut d_buf = Vec::with_capacity(n);
    let mut v_next = vec![ZERO; n];
    let mut x_next = vec![ZERO; m + 1];
    let mut ws = ProxWorkspace::new();
    let mut history = Vec::new();
    let mut converged = false;

    while state.iter < config.max_iter {
        w_prev.copy_from_slice(&state.w);
        w_rhs(instance, &state, rho, &mut b_buf);
        system.chol.solve_in_place(&mut b_buf);
        state.w.copy_from_slice(&b_buf);

        project(instance, &state.w, &mut proj);
        state.t = blocks_into(
            instance, &state, &proj, rho, &mut c_buf, &mut d_buf, &mut ws, &mut v_next,
            &mut x_next,
        );
        std::mem::swap(&mut state.v, &mut v_next);
        std::mem::swap(&mut state.x, &mut x_next);
        debug_assert!(block_violation(instance, &state) <= config.feas_tol * (1.0 + state.t));

        multipliers_in_place(&mut state, &proj, rho);
        state.iter += 1;

        let res = Residuals {
            primal_x: norm_inf_diff(&state.x, &proj),
            primal_v: norm_inf_diff(&state.v, &state.w),
            delta_w: norm_inf_diff(&state.w, &w_prev),
        };
        history.push(res);
        if !res.is_finite() {
            break;
        }
        if res.max() <= config.tol {
            converged = true;
            break;
        }
    }

    let objective_aux = state.t
        + state
            .v
            .iter()
            .zip(instance.radii().as_slice())
            .map(|(v, d)| d * v.norm())
            .sum::<f64>();
    Ok(SolveReport {
        w_opt: state.w.clone(),
        objective_aux,
        objective_direct: direct_objective(instance, &state.w),
        iterations: state.iter,
        residual_history: history,
        converged,
        wall_time: start.elapsed().as_secs_f64(),
        final_state: state,
    })
}

/// Largest violation of the `{x, t, v}` block constraints.
pub fn block_violation(instance: &ProblemInstance, state: &AdmmState) -> f64 {
    let side = state.x[1..]
        .iter()
        .map(|x| (x.norm() - state.t).max(0.0))
        .fold(0.0, f64::max);
    let reach = weighted_l1(instance, &state.v);
    let main = (reach + 1.0 - state.x[0].re).max(0.0) + state.x[0].im.abs();
    side.max(main).max((-state.t).max(0.0))
}
