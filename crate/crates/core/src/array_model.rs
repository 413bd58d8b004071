//! Uniform linear array steering vectors and the element-wise amplitude/phase
//! uncertainty model.
//!
//! Each element of the actual steering vector is the presumed element scaled
//! by `(1 + du)` and rotated by `dphi`, with `|du| <= U` and `|dphi| <= PHI`.
//! That fan-shaped set is contained in a disk of radius
//! `delta = sqrt((1 + U)^2 - 2 (1 + U) cos PHI + 1)` around the presumed
//! element, and the corner `(du, dphi) = (U, PHI)` lies on the disk boundary.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Result};

/// Slack allowed when an angle computed from degrees lands a rounding error
/// outside `[0, pi]`.
const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    num_elements: usize,
    /// Element spacing in wavelengths.
    spacing: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(domain("array needs at least one element"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(domain(format!("element spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            num_elements,
            spacing,
        })
    }

    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// True when every entry has unit magnitude within `tol`.
    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        self.0.iter().all(|z| (z.norm() - 1.0).abs() <= tol)
    }
}

impl std::ops::Index<usize> for SteeringVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Presumed far-field steering vector of the array towards `angle` (radians,
/// measured from the array axis). Entry `n` is `exp(j 2 pi d cos(angle) n)`.
pub fn presumed_steering(geometry: &ArrayGeometry, angle: f64) -> Result<SteeringVector> {
    if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&angle) {
        return Err(domain(format!("angle {angle} rad outside [0, pi]")));
    }
    let step = 2.0 * PI * geometry.spacing * angle.cos();
    let entries = (0..geometry.num_elements)
        .map(|n| Complex64::from_polar(1.0, step * n as f64))
        .collect();
    Ok(SteeringVector(entries))
}

/// Per-element amplitude bounds `U` (fractional) and phase bounds `PHI`
/// (radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyModel {
    amp_bounds: Vec<f64>,
    phase_bounds: Vec<f64>,
}

impl UncertaintyModel {
    pub fn new(amp_bounds: Vec<f64>, phase_bounds: Vec<f64>) -> Result<Self> {
        check_len("phase_bounds", phase_bounds.len(), amp_bounds.len())?;
        for (n, (&u, &phi)) in amp_bounds.iter().zip(&phase_bounds).enumerate() {
            if !(0.0..1.0).contains(&u) {
                return Err(domain(format!(
                    "amplitude bound U[{n}] = {u} must lie in [0, 1)"
                )));
            }
            if !(0.0..FRAC_PI_2).contains(&phi) {
                return Err(domain(format!(
                    "phase bound PHI[{n}] = {phi} rad must lie in [0, pi/2)"
                )));
            }
        }
        Ok(Self {
            amp_bounds,
            phase_bounds,
        })
    }

    /// The same `(U, PHI)` on every element.
    pub fn uniform(n: usize, amp: f64, phase: f64) -> Result<Self> {
        Self::new(vec![amp; n], vec![phase; n])
    }

    pub fn len(&self) -> usize {
        self.amp_bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amp_bounds.is_empty()
    }

    pub fn amp_bounds(&self) -> &[f64] {
        &self.amp_bounds
    }

    pub fn phase_bounds(&self) -> &[f64] {
        &self.phase_bounds
    }
}

/// Radii of the per-element disks that bound the steering-vector error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiskRadii(Vec<f64>);

impl DiskRadii {
    pub fn new(delta: Vec<f64>) -> Result<Self> {
        if let Some((n, d)) = delta
            .iter()
            .enumerate()
            .find(|(_, d)| !(**d >= 0.0) || !d.is_finite())
        {
            return Err(domain(format!("radius delta[{n}] = {d} must be finite and >= 0")));
        }
        Ok(Self(delta))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn uniform(n: usize, delta: f64) -> Result<Self> {
        Self::new(vec![delta; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Radius of the bounded sphere that contains every disk product,
    /// `sqrt(sum delta_n^2)`.
    pub fn epsilon(&self) -> f64 {
        self.0.iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|d| d * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for DiskRadii {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DiskRadii> for Vec<f64> {
    fn from(r: DiskRadii) -> Self {
        r.0
    }
}

/// Disk radius for one element. Uses `U^2 + 4 (1 + U) sin^2(PHI / 2)`, which
/// equals `(1 + U)^2 - 2 (1 + U) cos PHI + 1` without the cancellation.
pub fn disk_radius(amp: f64, phase: f64) -> f64 {
    let s = (0.5 * phase).sin();
    (amp * amp + 4.0 * (1.0 + amp) * s * s).sqrt()
}

pub fn disk_radii(model: &UncertaintyModel) -> DiskRadii {
    DiskRadii(
        model
            .amp_bounds
            .iter()
            .zip(&model.phase_bounds)
            .map(|(&u, &phi)| disk_radius(u, phi))
            .collect(),
    )
}

/// One realization of the amplitude (`du`) and phase (`dphi`, radians)
/// perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationDraw {
    pub du: Vec<f64>,
    pub dphi: Vec<f64>,
}

impl PerturbationDraw {
    pub fn zero(n: usize) -> Self {
        Self {
            du: vec![0.0; n],
            dphi: vec![0.0; n],
        }
    }

    /// The corner `(du, dphi) = (U, PHI)` on every element.
    pub fn boundary(model: &UncertaintyModel) -> Self {
        Self {
            du: model.amp_bounds.clone(),
            dphi: model.phase_bounds.clone(),
        }
    }

    /// Uniform over `[-U, U] x [-PHI, PHI]` per element.
    pub fn uniform<R: Rng + ?Sized>(model: &UncertaintyModel, rng: &mut R) -> Self {
        let mut du = Vec::with_capacity(model.len());
        let mut dphi = Vec::with_capacity(model.len());
        for (&u, &phi) in model.amp_bounds.iter().zip(&model.phase_bounds) {
            du.push(u * rng.gen_range(-1.0..=1.0));
            dphi.push(phi * rng.gen_range(-1.0..=1.0));
        }
        Self { du, dphi }
    }
}

/// Apply a perturbation draw to a presumed steering vector.
pub fn sample_fan(
    presumed: &SteeringVector,
    model: &UncertaintyModel,
    draw: &PerturbationDraw,
) -> Result<SteeringVector> {
    let n = presumed.len();
    check_len("uncertainty model", model.len(), n)?;
    check_len("draw.du", draw.du.len(), n)?;
    check_len("draw.dphi", draw.dphi.len(), n)?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (du, dphi) = (draw.du[k], draw.dphi[k]);
        if !(du.abs() <= model.amp_bounds[k]) {
            return Err(domain(format!(
                "du[{k}] = {du} exceeds bound {}",
                model.amp_bounds[k]
            )));
        }
        if !(dphi.abs() <= model.phase_bounds[k]) {
            return Err(domain(format!(
                "dphi[{k}] = {dphi} exceeds bound {}",
                model.phase_bounds[k]
            )));
        }
        out.push(Complex64::from_polar(1.0 + du, dphi) * presumed[k]);
    }
    Ok(SteeringVector(out))
}

/// Generator used for every seeded draw in the crate. ChaCha8 is specified
/// independently of platform and word size, so seeded outputs are portable.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw `U_n ~ U[0, u_max)` and `PHI_n ~ U[0, phi_max)` (radians) for each
/// element.
pub fn random_uncertainty(n: usize, u_max: f64, phi_max: f64, seed: u64) -> Result<UncertaintyModel> {
    if !(0.0..1.0).contains(&u_max) {
        return Err(domain(format!("u_max = {u_max} must lie in [0, 1)")));
    }
    if !(0.0..FRAC_PI_2).contains(&phi_max) {
        return Err(domain(format!("phi_max = {phi_max} rad must lie in [0, pi/2)")));
    }
    let mut rng = seeded_rng(seed);
    let mut amp = Vec::with_capacity(n);
    let mut phase = Vec::with_capacity(n);
    for _ in 0..n {
        amp.push(u_max * rng.gen::<f64>());
        phase.push(phi_max * rng.gen::<f64>());
    }
    UncertaintyModel::new(amp, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b}");
    }

    #[test]
    fn broadside_is_all_ones() {
        for n in [1, 4, 17] {
            let g = ArrayGeometry::half_wavelength(n).unwrap();
            let sv = presumed_steering(&g, 90f64.to_radians()).unwrap();
            for z in sv.as_slice() {
                assert_close(*z, Complex64::new(1.0, 0.0), 1e-13);
            }
        }
    }

    #[test]
    fn endfire_alternates() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        let sv = presumed_steering(&g, 0.0).unwrap();
        for (z, s) in sv.as_slice().iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert_close(*z, Complex64::new(s, 0.0), 1e-14);
        }
    }

    #[test]
    fn sixty_degrees_second_entry_is_j() {
        let g = ArrayGeometry::half_wavelength(3).unwrap();
        let sv = presumed_steering(&g, 60f64.to_radians()).unwrap();
        assert_close(sv[1], Complex64::new(0.0, 1.0), 1e-14);
    }

    #[test]
    fn angle_outside_range_is_rejected() {
        let g = ArrayGeometry::half_wavelength(3).unwrap();
        assert!(presumed_steering(&g, -0.1).is_err());
        assert!(presumed_steering(&g, PI + 0.1).is_err());
        assert!(presumed_steering(&g, 180f64.to_radians()).is_ok());
    }

    #[test]
    fn geometry_validation() {
        assert!(ArrayGeometry::new(0, 0.5).is_err());
        assert!(ArrayGeometry::new(3, 0.0).is_err());
        assert!(ArrayGeometry::new(3, f64::NAN).is_err());
    }

    #[test]
    fn disk_radius_examples() {
        assert_eq!(disk_radius(0.0, 0.0), 0.0);
        assert!((disk_radius(0.2, 0.0) - 0.2).abs() < 1e-15);
        // Direct evaluation of the textbook form.
        let (u, phi) = (0.1f64, 5f64.to_radians());
        let direct = ((1.0 + u).powi(2) - 2.0 * (1.0 + u) * phi.cos() + 1.0).sqrt();
        assert!((disk_radius(u, phi) - direct).abs() < 1e-14);
        assert!((disk_radius(u, phi) - 0.135542).abs() < 5e-7);
    }

    #[test]
    fn disk_radius_zero_only_when_unperturbed() {
        assert!(disk_radius(1e-9, 0.0) > 0.0);
        assert!(disk_radius(0.0, 1e-9) > 0.0);
    }

    #[test]
    fn model_bounds_are_enforced() {
        assert!(UncertaintyModel::new(vec![1.0], vec![0.0]).is_err());
        assert!(UncertaintyModel::new(vec![0.1], vec![FRAC_PI_2]).is_err());
        assert!(UncertaintyModel::new(vec![-0.1], vec![0.0]).is_err());
        assert!(UncertaintyModel::new(vec![0.1, 0.2], vec![0.0]).is_err());
    }

    #[test]
    fn identity_draw_returns_presumed() {
        let g = ArrayGeometry::half_wavelength(5).unwrap();
        let sv = presumed_steering(&g, 0.7).unwrap();
        let model = UncertaintyModel::uniform(5, 0.1, 0.05).unwrap();
        let out = sample_fan(&sv, &model, &PerturbationDraw::zero(5)).unwrap();
        assert_eq!(out, sv);
    }

    #[test]
    fn single_element_amplitude_draw() {
        let sv = SteeringVector::new(vec![Complex64::new(1.0, 0.0)]);
        let model = UncertaintyModel::uniform(1, 0.2, 0.0).unwrap();
        let draw = PerturbationDraw {
            du: vec![0.1],
            dphi: vec![0.0],
        };
        let out = sample_fan(&sv, &model, &draw).unwrap();
        assert_close(out[0], Complex64::new(1.1, 0.0), 1e-15);
    }

    #[test]
    fn draw_outside_bounds_is_rejected() {
        let sv = SteeringVector::new(vec![Complex64::new(1.0, 0.0)]);
        let model = UncertaintyModel::uniform(1, 0.1, 0.1).unwrap();
        let too_big = PerturbationDraw {
            du: vec![0.2],
            dphi: vec![0.0],
        };
        assert!(sample_fan(&sv, &model, &too_big).is_err());
        let too_rotated = PerturbationDraw {
            du: vec![0.0],
            dphi: vec![-0.2],
        };
        assert!(sample_fan(&sv, &model, &too_rotated).is_err());
    }

    #[test]
    fn boundary_draw_attains_radius() {
        let g = ArrayGeometry::half_wavelength(8).unwrap();
        let sv = presumed_steering(&g, 1.1).unwrap();
        let model = random_uncertainty(8, 0.3, 0.08, 11).unwrap();
        let radii = disk_radii(&model);
        let a = sample_fan(&sv, &model, &PerturbationDraw::boundary(&model)).unwrap();
        for n in 0..8 {
            assert!(((a[n] - sv[n]).norm() - radii.as_slice()[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn random_uncertainty_contract() {
        let zero = random_uncertainty(6, 0.0, 0.0, 3).unwrap();
        assert!(zero.amp_bounds().iter().all(|&u| u == 0.0));
        assert!(zero.phase_bounds().iter().all(|&p| p == 0.0));
        assert_eq!(
            random_uncertainty(6, 0.2, 0.1, 99).unwrap(),
            random_uncertainty(6, 0.2, 0.1, 99).unwrap()
        );
        assert_ne!(
            random_uncertainty(6, 0.2, 0.1, 99).unwrap(),
            random_uncertainty(6, 0.2, 0.1, 100).unwrap()
        );
        assert!(random_uncertainty(6, 1.0, 0.1, 0).is_err());
        assert!(random_uncertainty(6, 0.1, 2.0, 0).is_err());
    }

    #[test]
    fn random_radii_bounded_by_corner() {
        let (u_max, phi_max) = (0.12, 5f64.to_radians());
        let cap = disk_radius(u_max, phi_max);
        for seed in 0..50 {
            let m = random_uncertainty(30, u_max, phi_max, seed).unwrap();
            assert!(disk_radii(&m).as_slice().iter().all(|&d| d <= cap));
        }
    }

    #[test]
    fn monotone_on_grid() {
        let us: Vec<f64> = (0..50).map(|i| i as f64 * 0.0199).collect();
        let phis: Vec<f64> = (0..50).map(|i| i as f64 * 0.0314).collect();
        for &u in &us {
            for w in phis.windows(2) {
                assert!(disk_radius(u, w[0]) <= disk_radius(u, w[1]));
            }
        }
        for &phi in &phis {
            for w in us.windows(2) {
                assert!(disk_radius(w[0], phi) <= disk_radius(w[1], phi));
            }
        }
    }

    #[test]
    fn radii_reject_negative_and_nan() {
        assert!(DiskRadii::new(vec![0.1, -0.1]).is_err());
        assert!(DiskRadii::new(vec![f64::NAN]).is_err());
        let r = DiskRadii::new(vec![0.3, 0.4]).unwrap();
        assert!((r.epsilon() - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn fan_samples_stay_inside_disks(
            amp in proptest::collection::vec(0.0f64..0.9, 1..12),
            seed in any::<u64>(),
            angle in 0.0f64..PI,
        ) {
            let n = amp.len();
            let mut rng = seeded_rng(seed);
            let phase: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.5)).collect();
            let model = UncertaintyModel::new(amp, phase).unwrap();
            let radii = disk_radii(&model);
            let g = ArrayGeometry::half_wavelength(n).unwrap();
            let sv = presumed_steering(&g, angle).unwrap();
            let draw = PerturbationDraw::uniform(&model, &mut rng);
            let a = sample_fan(&sv, &model, &draw).unwrap();
            let mut err2 = 0.0;
            for k in 0..n {
                let e = (a[k] - sv[k]).norm();
                prop_assert!(e <= radii.as_slice()[k] + 1e-12);
                err2 += e * e;
            }
            prop_assert!(err2.sqrt() <= radii.epsilon() + 1e-12);
        }

        #[test]
        fn presumed_entries_unit_modulus(n in 1usize..64, angle in 0.0f64..PI, d in 0.1f64..2.0) {
            let g = ArrayGeometry::new(n, d).unwrap();
            prop_assert!(presumed_steering(&g, angle).unwrap().is_unit_modulus(1e-12));
        }
    }
}
