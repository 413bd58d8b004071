//! Scenario files (TOML).
//!
//! ```toml
//! [array]
//! elements = 30
//! spacing = 0.5            # wavelengths, optional
//!
//! [grid]
//! mainlobe_deg = 90.0
//! sidelobes = [
//!     { start_deg = 0.0, stop_deg = 89.0, step_deg = 1.0 },
//!     { start_deg = 91.0, stop_deg = 180.0, step_deg = 1.0 },
//! ]
//!
//! [uncertainty]
//! kind = "radii"           # or "fan" / "random"
//! delta = 0.15             # scalar or one value per element
//!
//! [solver]                 # optional
//! rho = 1.0
//! tol = 1e-6
//! max_iter = 100000
//!
//! [output]                 # optional
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use beamsynth_core::{
    build_instance, disk_radii, grid_from_spec, random_uncertainty, AngleGrid, ArrayGeometry,
    DiskRadii, ProblemInstance, SolverConfig, UncertaintyModel,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] beamsynth_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub array: ArraySpec,
    pub grid: GridSpec,
    pub uncertainty: UncertaintySpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    pub elements: usize,
    #[serde(default = "half_wavelength")]
    pub spacing: f64,
}

fn half_wavelength() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub mainlobe_deg: f64,
    pub sidelobes: Vec<RangeSpec>,
}

/// Inclusive angle range in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UncertaintySpec {
    /// Per-element amplitude bounds (linear ratio) and phase bounds (degrees).
    Fan { amplitude: Vec<f64>, phase_deg: Vec<f64> },
    /// Bounds drawn uniformly from `[0, u_max] x [0, phi_max_deg]`.
    Random { u_max: f64, phi_max_deg: f64, seed: u64 },
    /// Disk radii given directly.
    Radii { delta: RadiiSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    Uniform(f64),
    PerElement(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self {
            rho: c.rho,
            tol: c.tol,
            max_iter: c.max_iter,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.dir.is_none()
    }
}

impl Scenario {
    /// Parse and validate.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Check every field against the model bounds without solving.
    pub fn validate(&self) -> Result<(), beamsynth_core::Error> {
        self.geometry()?;
        self.grid()?;
        self.radii(None)?;
        self.solver_config().validate()
    }

    pub fn geometry(&self) -> beamsynth_core::Result<ArrayGeometry> {
        ArrayGeometry::new(self.array.elements, self.array.spacing)
    }

    pub fn grid(&self) -> beamsynth_core::Result<AngleGrid> {
        let ranges: Vec<_> = self
            .grid
            .sidelobes
            .iter()
            .map(|r| (r.start_deg, r.stop_deg, r.step_deg))
            .collect();
        grid_from_spec(self.grid.mainlobe_deg, &ranges)
    }

    /// Disk radii; `seed` replaces the seed of a random uncertainty spec.
    pub fn radii(&self, seed: Option<u64>) -> beamsynth_core::Result<DiskRadii> {
        let n = self.array.elements;
        match &self.uncertainty {
            UncertaintySpec::Fan { amplitude, phase_deg } => {
                let phase = phase_deg.iter().map(|p| p.to_radians()).collect();
                let model = UncertaintyModel::new(amplitude.clone(), phase)?;
                expect_len(model.len(), n)?;
                Ok(disk_radii(&model))
            }
            UncertaintySpec::Random {
                u_max,
                phi_max_deg,
                seed: own,
            } => {
                let model = random_uncertainty(n, *u_max, phi_max_deg.to_radians(), seed.unwrap_or(*own))?;
                Ok(disk_radii(&model))
            }
            UncertaintySpec::Radii { delta: RadiiSpec::Uniform(d) } => DiskRadii::uniform(n, *d),
            UncertaintySpec::Radii {
                delta: RadiiSpec::PerElement(d),
            } => {
                expect_len(d.len(), n)?;
                DiskRadii::new(d.clone())
            }
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            rho: self.solver.rho,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            ..SolverConfig::default()
        }
    }

    pub fn instance(&self, seed: Option<u64>) -> beamsynth_core::Result<ProblemInstance> {
        build_instance(&self.geometry()?, &self.grid()?, &self.radii(seed)?)
    }

    /// Seed of a random uncertainty spec, if any.
    pub fn seed(&self) -> Option<u64> {
        match self.uncertainty {
            UncertaintySpec::Random { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

fn expect_len(got: usize, expected: usize) -> beamsynth_core::Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(beamsynth_core::Error::Dimension {
            what: "per-element uncertainty",
            got,
            expected,
        })
    }
}
