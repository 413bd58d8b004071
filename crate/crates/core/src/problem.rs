//! Assembly of the robust min-max synthesis instance: presumed steering
//! vectors for the main lobe and every side-lobe sample, plus the
//! per-element disk radii.

use serde::{Deserialize, Serialize};

use crate::array_model::{presumed_steering, ArrayGeometry, DiskRadii, SteeringVector};
use crate::error::{check_len, domain, Result};

/// Two grid angles closer than this (degrees) are the same sample.
const ANGLE_EPS_DEG: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    mainlobe_deg: f64,
    sidelobe_deg: Vec<f64>,
}

impl AngleGrid {
    pub fn new(mainlobe_deg: f64, sidelobe_deg: Vec<f64>) -> Result<Self> {
        if sidelobe_deg.is_empty() {
            return Err(domain("side-lobe region needs at least one angle"));
        }
        for &a in std::iter::once(&mainlobe_deg).chain(&sidelobe_deg) {
            if !(0.0..=180.0).contains(&a) {
                return Err(domain(format!("angle {a} deg outside [0, 180]")));
            }
        }
        if sidelobe_deg
            .iter()
            .any(|a| (a - mainlobe_deg).abs() <= ANGLE_EPS_DEG)
        {
            return Err(domain(format!(
                "main-lobe angle {mainlobe_deg} deg is also a side-lobe sample"
            )));
        }
        Ok(Self {
            mainlobe_deg,
            sidelobe_deg,
        })
    }

    pub fn mainlobe_deg(&self) -> f64 {
        self.mainlobe_deg
    }

    pub fn sidelobe_deg(&self) -> &[f64] {
        &self.sidelobe_deg
    }

    pub fn len(&self) -> usize {
        self.sidelobe_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sidelobe_deg.is_empty()
    }
}

/// Build a grid from inclusive `(start, stop, step)` ranges in degrees.
/// Angles are emitted range by range; repeats are dropped, keeping the first
/// occurrence.
pub fn grid_from_spec(mainlobe_deg: f64, ranges: &[(f64, f64, f64)]) -> Result<AngleGrid> {
    let mut angles: Vec<f64> = Vec::new();
    for &(start, stop, step) in ranges {
        if !(step > 0.0) || !step.is_finite() {
            return Err(domain(format!("range step must be positive, got {step}")));
        }
        if !(start <= stop) {
            return Err(domain(format!("range start {start} exceeds stop {stop}")));
        }
        if mainlobe_deg >= start - ANGLE_EPS_DEG && mainlobe_deg <= stop + ANGLE_EPS_DEG {
            return Err(domain(format!(
                "main-lobe angle {mainlobe_deg} deg lies inside side-lobe range [{start}, {stop}]"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        for k in 0..count {
            let a = start + k as f64 * step;
            if !angles.iter().any(|b| (a - b).abs() <= ANGLE_EPS_DEG) {
                angles.push(a);
            }
        }
    }
    AngleGrid::new(mainlobe_deg, angles)
}

/// Data of the robust SOCP: minimize `t + sum delta_n |w_n|` subject to
/// `|w† a_m| <= t` on the side lobes and
/// `w† a_0 >= sum delta_n |w_n| + 1`, `Im{w† a_0} = 0` on the main lobe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    mainlobe_sv: SteeringVector,
    sidelobe_svs: Vec<SteeringVector>,
    radii: DiskRadii,
}

impl ProblemInstance {
    pub fn new(
        mainlobe_sv: SteeringVector,
        sidelobe_svs: Vec<SteeringVector>,
        radii: DiskRadii,
    ) -> Result<Self> {
        let n = mainlobe_sv.len();
        if n == 0 {
            return Err(domain("steering vectors must be non-empty"));
        }
        for sv in &sidelobe_svs {
            check_len("side-lobe steering vector", sv.len(), n)?;
        }
        check_len("disk radii", radii.len(), n)?;
        Ok(Self {
            mainlobe_sv,
            sidelobe_svs,
            radii,
        })
    }

    pub fn mainlobe(&self) -> &SteeringVector {
        &self.mainlobe_sv
    }

    pub fn sidelobes(&self) -> &[SteeringVector] {
        &self.sidelobe_svs
    }

    /// Steering vector `m`, with `m = 0` the main lobe and `1..=M` the side
    /// lobes.
    pub fn steering(&self, m: usize) -> &SteeringVector {
        if m == 0 {
            &self.mainlobe_sv
        } else {
            &self.sidelobe_svs[m - 1]
        }
    }

    pub fn radii(&self) -> &DiskRadii {
        &self.radii
    }

    /// Number of side-lobe samples `M`.
    pub fn num_sidelobes(&self) -> usize {
        self.sidelobe_svs.len()
    }

    /// Number of array elements `N`.
    pub fn num_elements(&self) -> usize {
        self.mainlobe_sv.len()
    }

    /// `(M, N)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.num_sidelobes(), self.num_elements())
    }

    /// Same steering data with different radii.
    pub fn with_radii(&self, radii: DiskRadii) -> Result<Self> {
        Self::new(self.mainlobe_sv.clone(), self.sidelobe_svs.clone(), radii)
    }
}

pub fn build_instance(
    geometry: &ArrayGeometry,
    grid: &AngleGrid,
    radii: &DiskRadii,
) -> Result<ProblemInstance> {
    check_len("disk radii", radii.len(), geometry.num_elements())?;
    // Degrees become radians here and nowhere else.
    let mainlobe = presumed_steering(geometry, grid.mainlobe_deg.to_radians())?;
    let sidelobes = grid
        .sidelobe_deg
        .iter()
        .map(|a| presumed_steering(geometry, a.to_radians()))
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(mainlobe, sidelobes, radii.clone())
}

/// Main lobe at 90 degrees with `m` side-lobe samples spread evenly over
/// `[0, 89] U [91, 180]` degrees, `n` half-wavelength elements and a uniform
/// disk radius.
pub fn ladder_instance(m: usize, n: usize, delta: f64) -> Result<ProblemInstance> {
    if m < 2 {
        return Err(domain("ladder instance needs at least two side-lobe samples"));
    }
    let per_side = m / 2;
    let rest = m - per_side;
    let side = |start: f64, count: usize| {
        let step = 89.0 / (count.max(2) - 1) as f64;
        (start, start + step * (count - 1) as f64, step)
    };
    let grid = grid_from_spec(90.0, &[side(0.0, per_side), side(91.0, rest)])?;
    let geometry = ArrayGeometry::half_wavelength(n)?;
    let radii = DiskRadii::uniform(n, delta)?;
    build_instance(&geometry, &grid, &radii)
}
