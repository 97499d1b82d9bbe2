//! Closed-form Rare/Weak phase diagram: detection and classification
//! boundaries, the leading term of the ideal FDR level, and region labels.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};

/// Absolute tolerance for deciding that `r` sits on a boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `ρ(ϑ)` extended by 0 below 1/2 and continuously to `ϑ = 1`.
fn rho_extended(v: f64) -> f64 {
    if v <= 0.5 {
        0.0
    } else if v <= 0.75 {
        v - 0.5
    } else {
        let s = 1.0 - libm::sqrt(1.0 - v);
        s * s
    }
}

/// Detection boundary `ρ(ϑ)` on `1/2 < ϑ < 1`.
pub fn detection_boundary(vartheta: f64) -> Result<f64> {
    if !(vartheta > 0.5 && vartheta < 1.0) {
        return Err(invalid!("vartheta = {vartheta} outside (1/2, 1)"));
    }
    Ok(rho_extended(vartheta))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(invalid!("theta = {theta} outside [0, 1)"));
    }
    Ok(())
}

/// Classification boundary `ρ_θ(ϑ) = (1−θ)·ρ(ϑ/(1−θ))` on `0 < ϑ < 1−θ`,
/// with `ρ ≡ 0` for arguments at or below 1/2.
pub fn classification_boundary(vartheta: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(vartheta > 0.0 && vartheta < 1.0 - theta) {
        return Err(invalid!("vartheta = {vartheta} outside (0, 1 - theta) for theta = {theta}"));
    }
    Ok(classification_unchecked(vartheta, theta))
}

fn classification_unchecked(vartheta: f64, theta: f64) -> f64 {
    (1.0 - theta) * rho_extended(vartheta / (1.0 - theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdrPhase {
    I,
    II,
    III,
    /// `r = ϑ` or `r = ϑ/3`.
    Boundary,
}

impl FdrPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            FdrPhase::I => "I",
            FdrPhase::II => "II",
            FdrPhase::III => "III",
            FdrPhase::Boundary => "boundary",
        }
    }
}

impl fmt::Display for FdrPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Leading constant of the ideal FDR level and the phase it falls in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealFdr {
    pub value: f64,
    pub phase: FdrPhase,
}

fn ideal_unchecked(vartheta: f64, r: f64) -> IdealFdr {
    let phase_two = || ((vartheta - r) / (2.0 * r)).clamp(0.0, 1.0);
    if (r - vartheta).abs() <= BOUNDARY_TOL || (r - vartheta / 3.0).abs() <= BOUNDARY_TOL {
        IdealFdr { value: phase_two(), phase: FdrPhase::Boundary }
    } else if r > vartheta {
        IdealFdr { value: 0.0, phase: FdrPhase::I }
    } else if r > vartheta / 3.0 {
        IdealFdr { value: phase_two(), phase: FdrPhase::II }
    } else {
        IdealFdr { value: 1.0, phase: FdrPhase::III }
    }
}

/// `q^ideal` leading term: 0 in phase I (`r > ϑ`), `(ϑ−r)/(2r)` in phase II,
/// 1 in phase III (`ρ_θ(ϑ) < r < ϑ/3`). Points on or below the
/// classification boundary have no ideal level.
pub fn ideal_fdr(vartheta: f64, r: f64, theta: f64) -> Result<IdealFdr> {
    let boundary = classification_boundary(vartheta, theta)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid!("r = {r} must be positive"));
    }
    if r <= boundary + BOUNDARY_TOL {
        return Err(Error::FailureRegion { r, boundary });
    }
    Ok(ideal_unchecked(vartheta, r))
}

/// A point in the `(ϑ, r)` plane with the sparsity exponent `θ` of the
/// sample size (`θ = 0` for detection).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub vartheta: f64,
    pub r: f64,
    pub theta: f64,
}

impl PhasePoint {
    pub fn new(vartheta: f64, r: f64, theta: f64) -> Result<Self> {
        if !(vartheta > 0.0 && vartheta < 1.0) {
            return Err(invalid!("vartheta = {vartheta} outside (0, 1)"));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid!("r = {r} must be positive"));
        }
        check_theta(theta)?;
        Ok(Self { vartheta, r, theta })
    }

    pub fn detection(vartheta: f64, r: f64) -> Result<Self> {
        Self::new(vartheta, r, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Undetectable,
    Detectable,
    Failure,
    SuccessI,
    SuccessII,
    SuccessIII,
    Boundary,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Undetectable => "undetectable",
            RegionLabel::Detectable => "detectable",
            RegionLabel::Failure => "failure",
            RegionLabel::SuccessI => "success_I",
            RegionLabel::SuccessII => "success_II",
            RegionLabel::SuccessIII => "success_III",
            RegionLabel::Boundary => "boundary",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionMode {
    Detection,
    Classification,
}

/// How to label points lying exactly on a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundarySide {
    /// Report [`RegionLabel::Boundary`].
    #[default]
    Label,
    /// Treat the point as lying just above the boundary (larger `r`).
    Above,
    /// Treat the point as lying just below the boundary.
    Below,
}

/// Region of `point`; exact boundary points are labelled `Boundary`.
pub fn classify_region(point: PhasePoint, mode: RegionMode) -> Result<RegionLabel> {
    classify_region_sided(point, mode, BoundarySide::Label)
}

pub fn classify_region_sided(point: PhasePoint, mode: RegionMode, side: BoundarySide) -> Result<RegionLabel> {
    let PhasePoint { vartheta, r, theta } = point;
    let label = match mode {
        RegionMode::Detection => {
            let rho = rho_extended(vartheta);
            if (r - rho).abs() <= BOUNDARY_TOL {
                RegionLabel::Boundary
            } else if r > rho {
                RegionLabel::Detectable
            } else {
                RegionLabel::Undetectable
            }
        }
        RegionMode::Classification => {
            if vartheta >= 1.0 - theta {
                return Err(invalid!("classification needs vartheta < 1 - theta, got {vartheta} and {theta}"));
            }
            let rho = classification_unchecked(vartheta, theta);
            if (r - rho).abs() <= BOUNDARY_TOL {
                RegionLabel::Boundary
            } else if r < rho {
                RegionLabel::Failure
            } else {
                match ideal_unchecked(vartheta, r).phase {
                    FdrPhase::I => RegionLabel::SuccessI,
                    FdrPhase::II => RegionLabel::SuccessII,
                    FdrPhase::III => RegionLabel::SuccessIII,
                    FdrPhase::Boundary => RegionLabel::Boundary,
                }
            }
        }
    };
    if label != RegionLabel::Boundary || side == BoundarySide::Label {
        return Ok(label);
    }
    let shift = if side == BoundarySide::Above { 4.0 } else { -4.0 } * BOUNDARY_TOL;
    let nudged = PhasePoint { r: r + shift, ..point };
    if !(nudged.r > 0.0) {
        return Ok(match mode {
            RegionMode::Detection => RegionLabel::Undetectable,
            RegionMode::Classification => RegionLabel::Failure,
        });
    }
    classify_region_sided(nudged, mode, BoundarySide::Label)
}

/// One row of the plot-data table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRow {
    pub vartheta: f64,
    /// Zero-extended detection boundary.
    pub rho: f64,
    pub rho_theta: f64,
    /// Ideal FDR at the evaluation strength; `None` in the failure region.
    pub qideal: Option<IdealFdr>,
}

/// Uniform grid of `grid_size` points spanning `0 ≤ ϑ ≤ 1−θ` (endpoints
/// included, using the continuous extensions), with the ideal FDR evaluated
/// at strength `r_eval`.
pub fn boundary_table(theta: f64, grid_size: usize, r_eval: f64) -> Result<Vec<BoundaryRow>> {
    check_theta(theta)?;
    if grid_size < 2 {
        return Err(invalid!("grid needs at least 2 points, got {grid_size}"));
    }
    if !(r_eval > 0.0) || !r_eval.is_finite() {
        return Err(invalid!("r = {r_eval} must be positive"));
    }
    let upper = 1.0 - theta;
    let last = (grid_size - 1) as f64;
    Ok((0..grid_size)
        .map(|k| {
            let vartheta = if k + 1 == grid_size { upper } else { upper * k as f64 / last };
            let rho_theta = classification_unchecked(vartheta, theta);
            let qideal = (r_eval > rho_theta + BOUNDARY_TOL).then(|| ideal_unchecked(vartheta, r_eval));
            BoundaryRow { vartheta, rho: rho_extended(vartheta), rho_theta, qideal }
        })
        .collect())
}
