//! Closed-form minimizers for the two halves of the `{v, x, t}` block.
//!
//! Side lobes: minimize `t + rho/2 sum_m |x_m + c_m|^2` subject to
//! `|x_m| <= t`. Each `x_m` is `-c_m` pulled back onto the disk of radius
//! `t`, and `t` is found by sorting `|c_m|` and scanning the breakpoints.
//!
//! Main lobe: minimize
//! `sum_n (delta_n |v_n| + rho/2 |v_n + d_n|^2) + rho/2 |x0 + c0|^2`
//! subject to `x0 >= sum_n delta_n |v_n| + 1`, `x0` real. The constraint
//! multiplier is found by sorting `e_n / delta_n` with
//! `e_n = |d_n| - delta_n / rho`.

use num_complex::Complex64;

use crate::array_model::DiskRadii;
use crate::error::{check_len, domain, Result};

/// Absolute slack on breakpoint comparisons.
const BREAK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SidelobeProxInput {
    /// `c_m = lambda_m / rho - w† a_m`, `m = 1..=M`.
    pub c: Vec<Complex64>,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidelobeProxOutput {
    pub t: f64,
    pub x: Vec<Complex64>,
    /// 1-based position in the ascending `|c|` order where clipping starts.
    pub k_star: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainlobeProxInput {
    /// `c0 = lambda_0 / rho - w† a_0`.
    pub c0: Complex64,
    /// `d_n = gamma_n / rho - w_n`.
    pub d: Vec<Complex64>,
    pub radii: DiskRadii,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainlobeProxOutput {
    pub x0: f64,
    pub v: Vec<Complex64>,
    /// Multiplier of the main-lobe constraint in the objective scaled by
    /// `2 / rho`; zero when the constraint is slack.
    pub xi: f64,
}

/// Reusable sort buffers so the solver loop does not allocate.
#[derive(Debug, Default, Clone)]
pub struct ProxWorkspace {
    keys: Vec<f64>,
    order: Vec<usize>,
}

impl ProxWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fill `order` with the indices that sort `keys` ascending. Ties keep
    /// index order.
    fn sort_keys(&mut self) {
        let keys = &self.keys;
        self.order.clear();
        self.order.extend(0..keys.len());
        self.order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("penalty rho must be positive, got {rho}")))
    }
}

pub fn solve_sidelobe_prox(input: &SidelobeProxInput) -> Result<SidelobeProxOutput> {
    check_rho(input.rho)?;
    let mut x = vec![Complex64::new(0.0, 0.0); input.c.len()];
    let mut ws = ProxWorkspace::new();
    let (t, k_star) = sidelobe_prox_into(&input.c, input.rho, &mut x, &mut ws);
    Ok(SidelobeProxOutput { t, x, k_star })
}

/// Writes the minimizing `x` into `x_out`; returns `(t, k_star)`.
pub(crate) fn sidelobe_prox_into(
    c: &[Complex64],
    rho: f64,
    x_out: &mut [Complex64],
    ws: &mut ProxWorkspace,
) -> (f64, usize) {
    let m = c.len();
    if m == 0 {
        return (0.0, 0);
    }
    ws.keys.clear();
    ws.keys.extend(c.iter().map(|z| z.norm()));
    ws.sort_keys();
    let mags = &ws.keys;
    let order = &ws.order;

    // tail[p] = sum of the sorted magnitudes at positions p..m
    let total: f64 = order.iter().map(|&i| mags[i]).sum();
    let mut tail = total;
    let mut chosen: Option<(usize, f64)> = None;
    let mut best_violation = (f64::INFINITY, 0usize, 0.0f64);
    for p in 0..m {
        let gamma = ((rho * tail - 1.0) / (rho * (m - p) as f64)).max(0.0);
        let upper = mags[order[p]];
        let lower = if p == 0 { 0.0 } else { mags[order[p - 1]] };
        let above_lower = if p == 0 { gamma >= 0.0 } else { gamma > lower - BREAK_TOL };
        let ok = upper >= gamma - BREAK_TOL && above_lower;
        if ok {
            match chosen {
                None => chosen = Some((p, gamma)),
                Some((_, g)) => debug_assert!(
                    (g - gamma).abs() <= 1e-9 * (1.0 + g),
                    "two distinct breakpoints accepted: {g} vs {gamma}"
                ),
            }
            if !cfg!(debug_assertions) {
                break;
            }
        } else {
            let violation = (gamma - upper).max(0.0) + (lower - gamma).max(0.0);
            if violation < best_violation.0 {
                best_violation = (violation, p, gamma);
            }
        }
        tail -= upper;
    }
    let (p_star, t) = chosen.unwrap_or((best_violation.1, best_violation.2));

    for (xm, cm) in x_out.iter_mut().zip(c) {
        let r = cm.norm();
        *xm = if r <= t {
            -cm
        } else {
            -cm * (t / r)
        };
    }
    (t, p_star + 1)
}

/// Objective of the side-lobe subproblem at `(t, x)`.
pub fn sidelobe_objective(c: &[Complex64], rho: f64, t: f64, x: &[Complex64]) -> f64 {
    t + 0.5 * rho * x.iter().zip(c).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>()
}

pub fn solve_mainlobe_prox(input: &MainlobeProxInput) -> Result<MainlobeProxOutput> {
    check_rho(input.rho)?;
    check_len("d", input.d.len(), input.radii.len())?;
    let mut v = vec![Complex64::new(0.0, 0.0); input.d.len()];
    let mut ws = ProxWorkspace::new();
    let (x0, xi) = mainlobe_prox_into(
        input.c0,
        &input.d,
        input.radii.as_slice(),
        input.rho,
        &mut v,
        &mut ws,
    );
    Ok(MainlobeProxOutput { x0, v, xi })
}

/// Writes the minimizing `v` into `v_out`; returns `(x0, xi)`.
pub(crate) fn mainlobe_prox_into(
    c0: Complex64,
    d: &[Complex64],
    delta: &[f64],
    rho: f64,
    v_out: &mut [Complex64],
    ws: &mut ProxWorkspace,
) -> (f64, f64) {
    let re_c0 = c0.re;
    let e = |n: usize| d[n].norm() - delta[n] / rho;

    // Constraint slack at xi = 0?
    let reach: f64 = (0..d.len())
        .filter(|&n| delta[n] > 0.0)
        .map(|n| delta[n] * e(n).max(0.0))
        .sum();
    let xi = if -re_c0 >= reach + 1.0 {
        0.0
    } else {
        // Sort the elements with a nonzero radius by e_n / delta_n.
        ws.keys.clear();
        ws.keys.resize(d.len(), 0.0);
        ws.order.clear();
        for (n, &dl) in delta.iter().enumerate() {
            if dl > 0.0 {
                ws.keys[n] = e(n) / dl;
                ws.order.push(n);
            }
        }
        let ProxWorkspace { keys, order: active } = ws;
        let keys = &*keys;
        active.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
        let active = &*active;
        let k = active.len();

        // Suffix sums over sorted positions L-1..k (0-based L-1).
        let mut sum_de: f64 = active.iter().map(|&n| delta[n] * e(n)).sum();
        let mut sum_dd: f64 = active.iter().map(|&n| delta[n] * delta[n]).sum();
        let mut chosen: Option<f64> = None;
        let mut fallback = (f64::INFINITY, 0.0f64);
        for l in 0..=k {
            let omega = 2.0 * (sum_de + 1.0 + re_c0) / (1.0 + sum_dd);
            let half = 0.5 * omega;
            let lower = if l == 0 { f64::NEG_INFINITY } else { keys[active[l - 1]] };
            let upper = if l == k { f64::INFINITY } else { keys[active[l]] };
            if lower <= half + BREAK_TOL && half < upper + BREAK_TOL {
                match chosen {
                    None => chosen = Some(omega),
                    Some(prev) => debug_assert!(
                        (prev - omega).abs() <= 1e-9 * (1.0 + prev.abs()),
                        "two distinct multipliers accepted: {prev} vs {omega}"
                    ),
                }
                if !cfg!(debug_assertions) {
                    break;
                }
            } else {
                let violation = (lower - half).max(0.0) + (half - upper).max(0.0);
                if violation < fallback.0 {
                    fallback = (violation, omega);
                }
            }
            if l < k {
                let n = active[l];
                sum_de -= delta[n] * e(n);
                sum_dd -= delta[n] * delta[n];
            }
        }
        chosen.unwrap_or(fallback.1)
    };

    for n in 0..d.len() {
        v_out[n] = if delta[n] == 0.0 {
            -d[n]
        } else {
            let y = (e(n) - 0.5 * xi * delta[n]).max(0.0);
            if y > 0.0 {
                -d[n] * (y / d[n].norm())
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
    }
    (-re_c0 + 0.5 * xi, xi)
}

/// Objective of the main-lobe subproblem at `(x0, v)`.
pub fn mainlobe_objective(
    c0: Complex64,
    d: &[Complex64],
    delta: &[f64],
    rho: f64,
    x0: f64,
    v: &[Complex64],
) -> f64 {
    let body: f64 = v
        .iter()
        .zip(d)
        .zip(delta)
        .map(|((vn, dn), dl)| dl * vn.norm() + 0.5 * rho * (vn + dn).norm_sqr())
        .sum();
    body + 0.5 * rho * (Complex64::new(x0, 0.0) + c0).norm_sqr()
}
