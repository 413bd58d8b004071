//! Reference solver and first-order certificate for the robust SOCP.
//!
//! [`oracle_solve`] runs an exact-penalty projected subgradient method on
//!
//! ```text
//! F(w) = max_m |w† a_m| + r(w) + mu [1 + r(w) - Re{w† a_0}]^+
//! ```
//!
//! over the hyperplane `Im{w† a_0} = 0`, where `r` is the weighted l1 term
//! `sum delta_n |w_n|` (or `eps ||w||_2` for the bounded-sphere baseline).
//! It shares no code path with the ADMM iteration. Objective and constraint
//! margin are both positively homogeneous, so any iterate with a positive
//! main-lobe margin `g(w) = Re{w† a_0} - r(w)` rescales to the feasible point
//! `w / g(w)`; the best such point is returned.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::array_model::seeded_rng;
use crate::error::{check_len, domain, Result};
use crate::linalg::{inner, norm2};
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub penalty_mu: f64,
    /// First step length as a fraction of `||w_start||`.
    pub initial_step: f64,
    /// Step lengths follow `a / sqrt(k)` inside a stage; `a` is multiplied by
    /// this factor at each restart from the best point.
    pub stage_decay: f64,
    pub stages: usize,
    /// Total iterations over all stages.
    pub iterations: usize,
    /// Returned points violating the main-lobe constraint by more than this
    /// are flagged.
    pub tol: f64,
    /// `None` starts from the scaled main-lobe steering vector; `Some(seed)`
    /// from a random point.
    pub seed: Option<u64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            penalty_mu: 100.0,
            initial_step: 0.1,
            stage_decay: 0.6,
            stages: 30,
            iterations: 200_000,
            tol: 1e-3,
            seed: None,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("penalty_mu", self.penalty_mu),
            ("initial_step", self.initial_step),
            ("stage_decay", self.stage_decay),
            ("tol", self.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("oracle {name} must be positive, got {v}")));
            }
        }
        if self.stages == 0 || self.iterations < self.stages {
            return Err(domain("oracle needs at least one iteration per stage"));
        }
        Ok(())
    }
}

/// The robustness term added to both side-lobe objective and main-lobe margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer<'a> {
    /// `sum_n delta_n |w_n|`
    WeightedL1(&'a [f64]),
    /// `eps ||w||_2`
    Sphere(f64),
}

impl Regularizer<'_> {
    fn value(&self, w: &[Complex64]) -> f64 {
        match *self {
            Regularizer::WeightedL1(delta) => {
                w.iter().zip(delta).map(|(z, d)| d * z.norm()).sum()
            }
            Regularizer::Sphere(eps) => eps * norm2(w),
        }
    }

    /// Add `scale * subgradient` into `out`; zero entries contribute zero.
    fn add_subgradient(&self, w: &[Complex64], scale: f64, out: &mut [Complex64]) {
        match *self {
            Regularizer::WeightedL1(delta) => {
                for ((o, z), d) in out.iter_mut().zip(w).zip(delta) {
                    let r = z.norm();
                    if r > 0.0 {
                        *o += z * (scale * d / r);
                    }
                }
            }
            Regularizer::Sphere(eps) => {
                let r = norm2(w);
                if r > 0.0 {
                    for (o, z) in out.iter_mut().zip(w) {
                        *o += z * (scale * eps / r);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub w: Vec<Complex64>,
    /// `max_m |w† a_m| + r(w)` at `w`.
    pub objective: f64,
    /// `[1 + r(w) - Re{w† a_0}]^+` at `w`.
    pub mainlobe_violation: f64,
    pub imag_mainlobe: f64,
    /// Set when the returned point is infeasible beyond `OracleConfig::tol`.
    pub flagged: bool,
    pub iterations: usize,
}

/// Reference solve of the element-wise robust problem.
pub fn oracle_solve(instance: &ProblemInstance, config: &OracleConfig) -> Result<OracleSolution> {
    oracle_solve_with(instance, Regularizer::WeightedL1(instance.radii().as_slice()), config)
}

/// Reference solve of the bounded-sphere (l2) robust problem with radius
/// `epsilon`; the instance radii are ignored.
pub fn oracle_solve_sphere(
    instance: &ProblemInstance,
    epsilon: f64,
    config: &OracleConfig,
) -> Result<OracleSolution> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("sphere radius must be >= 0, got {epsilon}")));
    }
    oracle_solve_with(instance, Regularizer::Sphere(epsilon), config)
}

struct Evaluator<'a> {
    instance: &'a ProblemInstance,
    reg: Regularizer<'a>,
}

impl Evaluator<'_> {
    /// `(peak, argmax, peak value w† a at argmax)` over the side lobes.
    fn peak(&self, w: &[Complex64]) -> (f64, usize, Complex64) {
        let mut best = (0.0, usize::MAX, Complex64::new(0.0, 0.0));
        for (m, a) in self.instance.sidelobes().iter().enumerate() {
            let s = inner(w, a.as_slice());
            let r = s.norm();
            // strict comparison keeps the smallest maximizing index
            if best.1 == usize::MAX || r > best.0 {
                best = (r, m, s);
            }
        }
        best
    }

    fn margin(&self, w: &[Complex64]) -> f64 {
        inner(w, self.instance.mainlobe().as_slice()).re - self.reg.value(w)
    }

    fn objective(&self, w: &[Complex64]) -> f64 {
        self.peak(w).0 + self.reg.value(w)
    }
}

/// Remove the component of `w` that gives `w† a_0` an imaginary part.
fn project_hyperplane(w: &mut [Complex64], a0: &[Complex64]) {
    // Im{w† a0} = Re{q† w} with q = j a0
    let q_dot_w = inner(a0, w).im;
    let scale = q_dot_w / a0.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for (wn, an) in w.iter_mut().zip(a0) {
        *wn -= Complex64::new(0.0, 1.0) * an * scale;
    }
}

fn oracle_solve_with(
    instance: &ProblemInstance,
    reg: Regularizer<'_>,
    config: &OracleConfig,
) -> Result<OracleSolution> {
    config.validate()?;
    let n = instance.num_elements();
    let a0 = instance.mainlobe().as_slice();
    let ev = Evaluator { instance, reg };

    let mut w: Vec<Complex64> = a0.iter().map(|z| z / n as f64).collect();
    if let Some(seed) = config.seed {
        let mut rng = seeded_rng(seed);
        let spread = 1.0 / n as f64;
        for wn in w.iter_mut() {
            *wn += Complex64::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread));
        }
    }
    project_hyperplane(&mut w, a0);

    // best feasible point (rescaled) and its objective
    let mut best_w: Option<Vec<Complex64>> = None;
    let mut best_obj = f64::INFINITY;
    let consider = |w: &[Complex64], best_w: &mut Option<Vec<Complex64>>, best_obj: &mut f64| {
        let g = ev.margin(w);
        if g > 0.0 {
            let obj = ev.objective(w) / g;
            if obj < *best_obj {
                *best_obj = obj;
                *best_w = Some(w.iter().map(|z| z / g).collect());
            }
        }
    };
    consider(&w, &mut best_w, &mut best_obj);

    let per_stage = config.iterations / config.stages;
    let mut step0 = config.initial_step * norm2(&w).max(f64::MIN_POSITIVE);
    let mut grad = vec![Complex64::new(0.0, 0.0); n];
    let mut done = 0;
    for _stage in 0..config.stages {
        if let Some(b) = &best_w {
            w.copy_from_slice(b);
        }
        for k in 0..per_stage {
            grad.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let (peak, m_star, s) = ev.peak(&w);
            if peak > 0.0 {
                let a = instance.sidelobes()[m_star].as_slice();
                let coef = s.conj() / peak;
                for (gn, an) in grad.iter_mut().zip(a) {
                    *gn += coef * an;
                }
            }
            reg.add_subgradient(&w, 1.0, &mut grad);
            if 1.0 - ev.margin(&w) > 0.0 {
                reg.add_subgradient(&w, config.penalty_mu, &mut grad);
                for (gn, an) in grad.iter_mut().zip(a0) {
                    *gn -= an * config.penalty_mu;
                }
            }
            project_hyperplane(&mut grad, a0);
            let gnorm = norm2(&grad);
            if gnorm == 0.0 {
                break;
            }
            let step = step0 / ((k + 1) as f64).sqrt() / gnorm;
            for (wn, gn) in w.iter_mut().zip(&grad) {
                *wn -= gn * step;
            }
            project_hyperplane(&mut w, a0);
            consider(&w, &mut best_w, &mut best_obj);
            done += 1;
        }
        step0 *= config.stage_decay;
    }

    let w = best_w.ok_or_else(|| domain("oracle never reached a point with positive main-lobe margin"))?;
    let violation = (1.0 + reg.value(&w) - inner(&w, a0).re).max(0.0);
    let imag = inner(&w, a0).im.abs();
    Ok(OracleSolution {
        objective: ev.objective(&w),
        mainlobe_violation: violation,
        imag_mainlobe: imag,
        flagged: violation > config.tol || imag > config.tol,
        w,
        iterations: done,
    })
}

/// Multiplier estimates for the split problem: `lambda` (length `M + 1`,
/// index 0 the main lobe) and `gamma` (length `N`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktDuals {
    pub lambda: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResiduals {
    /// `max_m [|w† a_m| - t]^+`
    pub sidelobe: f64,
    /// `[1 + sum delta_n |w_n| - Re{w† a_0}]^+`
    pub mainlobe: f64,
    /// `|Im{w† a_0}|`
    pub mainlobe_imag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub stationarity_residual: f64,
    pub feasibility_residuals: FeasibilityResiduals,
    pub complementarity_residual: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        let f = self.feasibility_residuals;
        self.stationarity_residual
            .max(self.complementarity_residual)
            .max(f.sidelobe)
            .max(f.mainlobe)
            .max(f.mainlobe_imag)
    }
}

/// Complex soft threshold: shrink `z` towards zero by `kappa`.
fn soft(z: Complex64, kappa: f64) -> Complex64 {
    let r = z.norm();
    if r <= kappa {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((r - kappa) / r)
    }
}

/// First-order optimality residuals of `(w, t)` with multipliers `duals`.
///
/// With `xi = Re{lambda_0}` the conditions checked are
/// `sum_m conj(lambda_m) a_m + gamma = 0`, `sum_{m>=1} |lambda_m| <= 1`,
/// `xi >= 0`, `-gamma_n in (1 + xi) delta_n d|w_n|` (as the prox fixed point
/// `w_n = soft(w_n - gamma_n, (1 + xi) delta_n)`), primal feasibility, and
/// complementary slackness of every inequality.
pub fn kkt_check(
    instance: &ProblemInstance,
    w: &[Complex64],
    t: f64,
    duals: &KktDuals,
) -> Result<KktReport> {
    let (m, n) = instance.dims();
    check_len("w", w.len(), n)?;
    check_len("lambda", duals.lambda.len(), m + 1)?;
    check_len("gamma", duals.gamma.len(), n)?;
    let delta = instance.radii().as_slice();
    let lambda = &duals.lambda;
    let gamma = &duals.gamma;

    // w-stationarity
    let mut station = gamma.clone();
    for (k, l) in lambda.iter().enumerate() {
        let lc = l.conj();
        for (s, a) in station.iter_mut().zip(instance.steering(k).as_slice()) {
            *s += lc * a;
        }
    }
    let mut stationarity = norm2(&station);

    let side_mass: f64 = lambda[1..].iter().map(|l| l.norm()).sum();
    stationarity = stationarity.max((side_mass - 1.0).max(0.0));

    let xi = lambda[0].re;
    stationarity = stationarity.max((-xi).max(0.0));
    let xi = xi.max(0.0);
    for ((wn, gn), dl) in w.iter().zip(gamma).zip(delta) {
        let r = (wn - soft(wn - gn, (1.0 + xi) * dl)).norm();
        stationarity = stationarity.max(r);
    }

    // primal feasibility
    let proj: Vec<Complex64> = (0..=m)
        .map(|k| inner(w, instance.steering(k).as_slice()))
        .collect();
    let peak = proj[1..].iter().map(|p| p.norm()).fold(0.0, f64::max);
    let reach: f64 = w.iter().zip(delta).map(|(z, d)| d * z.norm()).sum();
    let feas = FeasibilityResiduals {
        sidelobe: (peak - t).max(0.0),
        mainlobe: (1.0 + reach - proj[0].re).max(0.0),
        mainlobe_imag: proj[0].im.abs(),
    };

    // complementary slackness
    let mut comp = (t * (1.0 - side_mass)).abs();
    for (l, p) in lambda[1..].iter().zip(&proj[1..]) {
        comp = comp.max(((l.conj() * p).re + l.norm() * t).abs());
    }
    comp = comp.max((xi * (proj[0].re - reach - 1.0)).abs());

    Ok(KktReport {
        stationarity_residual: stationarity,
        feasibility_residuals: feas,
        complementarity_residual: comp,
    })
}
