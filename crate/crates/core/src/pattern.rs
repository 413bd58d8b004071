//! Array pattern and worst-case response metrics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array_model::{presumed_steering, ArrayGeometry, DiskRadii, SteeringVector};
use crate::error::{check_len, Result};
use crate::linalg::{inner, norm2};
use crate::problem::AngleGrid;

pub fn to_db(x: f64) -> f64 {
    20.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// `|w† a|`.
pub fn nominal_response(w: &[Complex64], sv: &SteeringVector) -> f64 {
    inner(w, sv.as_slice()).norm()
}

fn weighted_l1(w: &[Complex64], radii: &DiskRadii) -> f64 {
    w.iter().zip(radii.as_slice()).map(|(z, d)| d * z.norm()).sum()
}

/// Largest `|w† a|` over the disk set around `sv`: `|w† a| + sum delta_n |w_n|`.
/// Exact, since each element error can independently align with the nominal
/// response.
pub fn worst_case_elementwise(w: &[Complex64], sv: &SteeringVector, radii: &DiskRadii) -> f64 {
    nominal_response(w, sv) + weighted_l1(w, radii)
}

/// Largest `|w† a|` over the ball `||a - sv|| <= epsilon`.
pub fn worst_case_sphere(w: &[Complex64], sv: &SteeringVector, epsilon: f64) -> f64 {
    nominal_response(w, sv) + epsilon * norm2(w)
}

/// Smallest main-lobe response over the disk set, after rotating `w` so
/// `w† a_0` is real and nonnegative: `|w† a_0| - sum delta_n |w_n|`.
pub fn mainlobe_worst_min(w: &[Complex64], sv: &SteeringVector, radii: &DiskRadii) -> f64 {
    nominal_response(w, sv) - weighted_l1(w, radii)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSample {
    pub angle: f64,
    pub nominal: f64,
    pub worst_elementwise: f64,
    pub worst_sphere: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidelobeSummary {
    /// Peak element-wise worst-case side-lobe response, dB.
    pub peak_worst_case_db: f64,
    pub peak_angle: f64,
    /// Peak nominal side-lobe response, dB.
    pub peak_nominal_db: f64,
    pub mainlobe_worst_min: f64,
}

impl SidelobeSummary {
    /// Worst-case side-lobe peak relative to the worst-case main-lobe
    /// response. `+inf` when the main lobe can be cancelled.
    pub fn relative_peak_db(&self) -> f64 {
        if self.mainlobe_worst_min > 0.0 {
            self.peak_worst_case_db - to_db(self.mainlobe_worst_min)
        } else {
            f64::INFINITY
        }
    }
}

/// Evaluate `w` on every side-lobe angle of `grid`.
pub fn sweep(
    w: &[Complex64],
    geometry: &ArrayGeometry,
    grid: &AngleGrid,
    radii: &DiskRadii,
) -> Result<(Vec<PatternSample>, SidelobeSummary)> {
    check_len("w", w.len(), geometry.num_elements())?;
    check_len("radii", radii.len(), geometry.num_elements())?;
    let l1 = weighted_l1(w, radii);
    let l2 = radii.epsilon() * norm2(w);
    let mut samples = Vec::with_capacity(grid.len());
    for &angle in grid.sidelobe_deg() {
        let sv = presumed_steering(geometry, angle.to_radians())?;
        let nominal = nominal_response(w, &sv);
        samples.push(PatternSample {
            angle,
            nominal,
            worst_elementwise: nominal + l1,
            worst_sphere: nominal + l2,
        });
    }
    // first angle attaining the peak
    let peak = samples
        .iter()
        .fold(None::<&PatternSample>, |best, s| match best {
            Some(b) if b.worst_elementwise >= s.worst_elementwise => Some(b),
            _ => Some(s),
        })
        .copied()
        .expect("grid is non-empty");
    let peak_nominal = samples.iter().map(|s| s.nominal).fold(0.0, f64::max);
    let main = presumed_steering(geometry, grid.mainlobe_deg().to_radians())?;
    let summary = SidelobeSummary {
        peak_worst_case_db: to_db(peak.worst_elementwise),
        peak_angle: peak.angle,
        peak_nominal_db: to_db(peak_nominal),
        mainlobe_worst_min: mainlobe_worst_min(w, &main, radii),
    };
    Ok((samples, summary))
}
