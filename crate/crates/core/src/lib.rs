//! Robust beam-pattern synthesis for uniform linear arrays under
//! element-wise amplitude and phase steering-vector errors.
//!
//! The robust design minimizes the worst-case side-lobe response while
//! holding the worst-case main-lobe response at or above one. The problem is
//! a second-order cone program; [`admm::solve`] handles it with an ADMM
//! splitting whose every step is closed form, and [`oracle`] provides a slow
//! independent reference solver plus a KKT certificate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod array_model;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod pattern;
pub mod problem;
pub mod prox;

pub use admm::{solve, AdmmState, Residuals, SolveReport, SolverConfig, WUpdateSystem};
pub use array_model::{
    disk_radii, disk_radius, presumed_steering, random_uncertainty, sample_fan, ArrayGeometry,
    DiskRadii, PerturbationDraw, SteeringVector, UncertaintyModel,
};
pub use error::{Error, Result};
pub use oracle::{kkt_check, oracle_solve, oracle_solve_sphere, KktReport, OracleConfig, OracleSolution};
pub use pattern::{PatternSample, SidelobeSummary};
pub use problem::{build_instance, grid_from_spec, ladder_instance, AngleGrid, ProblemInstance};
pub use num_complex::Complex64;
