//! Closed-form and numerically solved force estimators for the two wire
//! interaction models.
//!
//! The wire of rest length `L` is held at constant tension `T`. Contact pulls
//! an extra length `l` from the spool. Two contact models map `l` to force:
//!
//! - **point contact**: a single slender obstacle pushes the wire at `x0`,
//!   the wire forms two straight segments (a triangle of height `y0`);
//! - **homogeneous load**: a uniform load `Fv` (N/m) acts along the wire,
//!   which then takes the shape of a circular segment of curvature `κ` with
//!   `Fv = T·κ`.
//!
//! Both models saturate at a total force of `2T`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance on the curvature returned by [`solve_curvature`].
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-9;

/// Largest relative tolerance accepted by [`solve_curvature`].
pub const MAX_CURVATURE_TOL: f64 = 1e-3;

const MAX_BISECTION_ITERS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid wire configuration: {0}")]
    InvalidConfig(String),
    #[error("contact position x0={x0} m lies outside the wire span [0, {length}] m")]
    ContactOutOfRange { x0: f64, length: f64 },
    #[error("elongation must be finite and non-negative, got {0} m")]
    InvalidElongation(f64),
    #[error("force must be finite and non-negative, got {0}")]
    InvalidForce(f64),
    #[error("relative tolerance must lie in (0, {MAX_CURVATURE_TOL}], got {0}")]
    InvalidTolerance(f64),
    #[error("requested force {requested} reaches the model limit {limit}; no finite elongation exists")]
    Saturated { requested: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Geometry and tension of the sensing wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireConfig {
    /// Rest length `L` of the exposed wire (m).
    #[serde(rename = "rest_length_m", default = "defaults::rest_length")]
    pub rest_length: f64,
    /// Constant spring tension `T` (N).
    #[serde(rename = "tension_n", default = "defaults::tension")]
    pub tension: f64,
    /// Height of the wire above ground (m). Metadata only.
    #[serde(rename = "mount_height_m", default = "defaults::mount_height")]
    pub mount_height: f64,
    /// Distance of the undeformed wire line ahead of the robot origin (m).
    #[serde(rename = "forward_offset_m", default = "defaults::forward_offset")]
    pub forward_offset: f64,
}

mod defaults {
    pub fn rest_length() -> f64 {
        0.44
    }
    pub fn tension() -> f64 {
        2.2
    }
    pub fn mount_height() -> f64 {
        0.16
    }
    pub fn forward_offset() -> f64 {
        0.3
    }
}

impl Default for WireConfig {
    fn default() -> Self {
        Self {
            rest_length: defaults::rest_length(),
            tension: defaults::tension(),
            mount_height: defaults::mount_height(),
            forward_offset: defaults::forward_offset(),
        }
    }
}

impl WireConfig {
    pub fn new(rest_length: f64, tension: f64) -> Result<Self> {
        let cfg = Self {
            rest_length,
            tension,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rest_length.is_finite() && self.rest_length > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "rest length must be positive, got {}",
                self.rest_length
            )));
        }
        if !(self.tension.is_finite() && self.tension > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "tension must be positive, got {}",
                self.tension
            )));
        }
        if !(self.mount_height.is_finite() && self.mount_height >= 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "mount height must be non-negative, got {}",
                self.mount_height
            )));
        }
        if !self.forward_offset.is_finite() {
            return Err(ModelError::InvalidConfig(format!(
                "forward offset must be finite, got {}",
                self.forward_offset
            )));
        }
        Ok(())
    }

    /// Largest total force either model can report, `2T`.
    pub fn force_limit(&self) -> f64 {
        2.0 * self.tension
    }

    /// Largest distributed load of the homogeneous model, `2T/L`.
    pub fn load_limit(&self) -> f64 {
        2.0 * self.tension / self.rest_length
    }

    /// Largest curvature of the homogeneous model, `2/L` (a semicircle).
    pub fn curvature_limit(&self) -> f64 {
        2.0 / self.rest_length
    }

    /// Elongation at which the homogeneous model saturates, `L(π/2 − 1)`.
    pub fn saturation_elongation(&self) -> f64 {
        self.rest_length * (FRAC_PI_2 - 1.0)
    }

    /// Midspan contact position `L/2`.
    pub fn midspan(&self) -> f64 {
        0.5 * self.rest_length
    }
}

/// Triangle formed by a point contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointContact {
    /// Contact position `x0` along the wire (m).
    pub position: f64,
    /// Peak deflection `y0` at the contact (m).
    pub deflection: f64,
    /// Concentrated force `Fs` (N).
    pub force: f64,
}

/// Circular segment formed under a uniform load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneousLoad {
    /// Curvature `κ` of the deformed wire (1/m).
    pub curvature: f64,
    /// Central angle `θ` of the arc (rad). Equal to `κ(L + l)` below
    /// saturation and `π` at saturation.
    pub central_angle: f64,
    /// Distributed load `Fv = T·κ` (N/m).
    pub load: f64,
    /// `Fv · L` (N).
    pub total_force: f64,
    pub saturated: bool,
}

/// Result of the curvature root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSolution {
    pub curvature: f64,
    pub saturated: bool,
    /// `|L − (2/κ) sin(κ(L+l)/2)| / L` at the returned curvature.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceModel {
    PointMidspan,
    Homogeneous,
}

impl ForceModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForceModel::PointMidspan => "point-midspan",
            ForceModel::Homogeneous => "homogeneous",
        }
    }
}

impl fmt::Display for ForceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ForceModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "point-midspan" | "point" => Ok(ForceModel::PointMidspan),
            "homogeneous" => Ok(ForceModel::Homogeneous),
            other => Err(format!(
                "unknown force model `{other}` (expected point-midspan or homogeneous)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ForceDetail {
    Point(PointContact),
    Homogeneous(HomogeneousLoad),
}

/// Model-tagged force estimate for one elongation reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceEstimate {
    pub model: ForceModel,
    /// Total force on the wire (N): `Fs` or `Fv·L`.
    pub total_force: f64,
    pub detail: ForceDetail,
    pub saturated: bool,
}

/// Maps elongation readings to force estimates with a fixed contact model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimator {
    pub model: ForceModel,
    /// Contact position for the point model; `None` means midspan.
    pub contact_position: Option<f64>,
}

impl Estimator {
    pub fn new(model: ForceModel) -> Self {
        Self {
            model,
            contact_position: None,
        }
    }

    pub fn with_contact_position(mut self, x0: f64) -> Self {
        self.contact_position = Some(x0);
        self
    }

    pub fn estimate(&self, l: f64, cfg: &WireConfig) -> Result<ForceEstimate> {
        match self.model {
            ForceModel::PointMidspan => {
                let x0 = self.contact_position.unwrap_or_else(|| cfg.midspan());
                let contact = point_force(l, x0, cfg)?;
                Ok(ForceEstimate {
                    model: self.model,
                    total_force: contact.force,
                    detail: ForceDetail::Point(contact),
                    saturated: cfg.force_limit() - contact.force <= 1e-9,
                })
            }
            ForceModel::Homogeneous => {
                let load = homogeneous_load(l, cfg)?;
                Ok(ForceEstimate {
                    model: self.model,
                    total_force: load.total_force,
                    detail: ForceDetail::Homogeneous(load),
                    saturated: load.saturated,
                })
            }
        }
    }
}

fn check_elongation(l: f64) -> Result<()> {
    if l.is_finite() && l >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidElongation(l))
    }
}

fn check_position(x0: f64, cfg: &WireConfig) -> Result<()> {
    if (0.0..=cfg.rest_length).contains(&x0) {
        Ok(())
    } else {
        Err(ModelError::ContactOutOfRange {
            x0,
            length: cfg.rest_length,
        })
    }
}

/// Peak deflection `y0` of the triangle whose two sides sum to `L + l`.
pub fn peak_deflection(l: f64, x0: f64, cfg: &WireConfig) -> Result<f64> {
    check_elongation(l)?;
    check_position(x0, cfg)?;
    let len = cfg.rest_length;
    let product = l * (l + 2.0 * x0) * (l + 2.0 * len) * (l + 2.0 * len - 2.0 * x0);
    Ok(product.max(0.0).sqrt() / (2.0 * (l + len)))
}

/// `y / sqrt(a² + y²)`, taken as zero for the degenerate `a = y = 0` side.
fn side_sine(a: f64, y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y / a.hypot(y)
    }
}

fn force_at_deflection(y0: f64, x0: f64, cfg: &WireConfig) -> f64 {
    cfg.tension * (side_sine(x0, y0) + side_sine(cfg.rest_length - x0, y0))
}

/// Excess length of the triangle over `L`, written to avoid cancellation
/// for small deflections.
fn triangle_excess(y0: f64, x0: f64, cfg: &WireConfig) -> f64 {
    let excess = |a: f64| {
        let h = a.hypot(y0);
        if h == 0.0 {
            0.0
        } else {
            y0 * y0 / (h + a)
        }
    };
    excess(x0) + excess(cfg.rest_length - x0)
}

/// Force of a single obstacle pushing the wire at `x0` given elongation `l`.
pub fn point_force(l: f64, x0: f64, cfg: &WireConfig) -> Result<PointContact> {
    let y0 = peak_deflection(l, x0, cfg)?;
    Ok(PointContact {
        position: x0,
        deflection: y0,
        force: force_at_deflection(y0, x0, cfg),
    })
}

/// Elongation that produces the point force `fs` at `x0`.
pub fn elongation_from_point_force(fs: f64, x0: f64, cfg: &WireConfig) -> Result<f64> {
    if !(fs.is_finite() && fs >= 0.0) {
        return Err(ModelError::InvalidForce(fs));
    }
    check_position(x0, cfg)?;
    let limit = cfg.force_limit();
    if fs >= limit {
        return Err(ModelError::Saturated { requested: fs, limit });
    }
    if fs == 0.0 {
        return Ok(0.0);
    }

    // Force is strictly increasing in y0; bracket then bisect.
    let mut lo = 0.0;
    let mut hi = cfg.rest_length;
    while force_at_deflection(hi, x0, cfg) < fs {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(ModelError::Saturated { requested: fs, limit });
        }
    }
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if force_at_deflection(mid, x0, cfg) < fs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(triangle_excess(0.5 * (lo + hi), x0, cfg))
}

/// `1 − sin(x)/x`, accurate near zero.
fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - x.sin() / x
    }
}

/// `asin(x)/x − 1`, accurate near zero.
fn asin_ratio_minus_one(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 + 3.0 * x2 * x2 / 40.0 + 5.0 * x2 * x2 * x2 / 112.0
    } else {
        x.asin() / x - 1.0
    }
}

/// Chord of an arc of length `L + l` and curvature `κ`, minus `L`.
fn chord_excess(kappa: f64, l: f64, len: f64) -> f64 {
    let arc = len + l;
    l - arc * one_minus_sinc(0.5 * kappa * arc)
}

/// Curvature of the circular segment of arc length `L + l` spanning the
/// chord `L`.
///
/// Bisection on `κ ∈ (1e-9/L, 2/L]`. The lower end is tightened with the
/// small-elongation series `κ ≈ sqrt(24 l / (L + l)³)`, which never exceeds
/// the root. Elongations at or beyond `L(π/2 − 1)` return the semicircle
/// curvature `2/L` flagged as saturated.
pub fn solve_curvature(l: f64, cfg: &WireConfig, rel_tol: f64) -> Result<CurvatureSolution> {
    check_elongation(l)?;
    if !(rel_tol > 0.0 && rel_tol <= MAX_CURVATURE_TOL) {
        return Err(ModelError::InvalidTolerance(rel_tol));
    }
    let len = cfg.rest_length;
    let residual = |kappa: f64| chord_excess(kappa, l, len).abs() / len;

    if l == 0.0 {
        return Ok(CurvatureSolution {
            curvature: 0.0,
            saturated: false,
            residual: 0.0,
            iterations: 0,
        });
    }
    let kappa_max = cfg.curvature_limit();
    if l >= cfg.saturation_elongation() {
        return Ok(CurvatureSolution {
            curvature: kappa_max,
            saturated: true,
            residual: residual(kappa_max),
            iterations: 0,
        });
    }

    let mut lo = 1e-9 / len;
    let mut hi = kappa_max;
    let arc = len + l;
    let seed = (24.0 * l / (arc * arc * arc)).sqrt();
    if seed > lo && seed < hi && chord_excess(seed, l, len) >= 0.0 {
        lo = seed;
    }
    if chord_excess(lo, l, len) <= 0.0 {
        // Elongation below what the floor curvature can resolve.
        return Ok(CurvatureSolution {
            curvature: lo,
            saturated: false,
            residual: residual(lo),
            iterations: 0,
        });
    }

    let mut iterations = 0;
    while hi - lo > rel_tol * hi && iterations < MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chord_excess(mid, l, len) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let kappa = 0.5 * (lo + hi);
    Ok(CurvatureSolution {
        curvature: kappa,
        saturated: false,
        residual: residual(kappa),
        iterations,
    })
}

/// Uniform vegetation load implied by elongation `l`.
pub fn homogeneous_load(l: f64, cfg: &WireConfig) -> Result<HomogeneousLoad> {
    let solution = solve_curvature(l, cfg, DEFAULT_CURVATURE_TOL)?;
    if solution.saturated {
        return Ok(HomogeneousLoad {
            curvature: solution.curvature,
            central_angle: PI,
            load: cfg.load_limit(),
            total_force: cfg.force_limit(),
            saturated: true,
        });
    }
    let load = cfg.tension * solution.curvature;
    Ok(HomogeneousLoad {
        curvature: solution.curvature,
        central_angle: solution.curvature * (cfg.rest_length + l),
        load,
        total_force: load * cfg.rest_length,
        saturated: false,
    })
}

/// Elongation at which the homogeneous model reports distributed load `fv`.
pub fn elongation_from_load(fv: f64, cfg: &WireConfig) -> Result<f64> {
    if !(fv.is_finite() && fv >= 0.0) {
        return Err(ModelError::InvalidForce(fv));
    }
    let limit = cfg.load_limit();
    if fv > limit * (1.0 + 1e-12) {
        return Err(ModelError::Saturated { requested: fv, limit });
    }
    if fv >= limit * (1.0 - 1e-12) {
        // asin is singular at 1; rounding in κL/2 alone moves l by ~1e-8 m.
        return Ok(cfg.saturation_elongation());
    }
    let half_chord_sine = 0.5 * fv / cfg.tension * cfg.rest_length;
    Ok(cfg.rest_length * asin_ratio_minus_one(half_chord_sine))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> WireConfig {
        WireConfig::new(0.44, 2.2).unwrap()
    }

    /// Independent oracle: bisection on the triangle length constraint.
    fn oracle_y0(l: f64, x0: f64, len: f64) -> f64 {
        let f = |y: f64| x0.hypot(y) + (len - x0).hypot(y) - (len + l);
        let (mut lo, mut hi) = (0.0, len + l);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn straight_wire_has_no_deflection() {
        assert_eq!(peak_deflection(0.0, 0.22, &cfg()).unwrap(), 0.0);
        assert_eq!(point_force(0.0, 0.22, &cfg()).unwrap().force, 0.0);
    }

    #[test]
    fn peak_deflection_matches_bisection_oracle() {
        let y0 = peak_deflection(0.1, 0.22, &cfg()).unwrap();
        // Frozen from an independent root solve of the length constraint.
        assert!((y0 - 0.156_524_758_424_985).abs() < 1e-12);
        for &(l, x0) in &[(0.01, 0.05), (0.1, 0.3), (0.3, 0.44), (2.0, 0.0)] {
            let got = peak_deflection(l, x0, &cfg()).unwrap();
            assert!((got - oracle_y0(l, x0, 0.44)).abs() < 1e-12, "l={l} x0={x0}");
        }
    }

    #[test]
    fn point_force_at_reference_elongation() {
        let contact = point_force(0.1, 0.22, &cfg()).unwrap();
        assert!((contact.force - 2.550_773_840_999_76).abs() < 1e-9);
    }

    #[test]
    fn point_force_approaches_twice_tension() {
        let c = cfg();
        let fs = point_force(1000.0 * c.rest_length, c.midspan(), &c).unwrap().force;
        assert!(fs < 4.4);
        assert!((fs - 4.4).abs() / 4.4 < 0.01);
    }

    #[test]
    fn point_force_rejects_bad_domain() {
        let c = cfg();
        assert!(matches!(
            point_force(0.1, -0.01, &c),
            Err(ModelError::ContactOutOfRange { .. })
        ));
        assert!(matches!(
            point_force(0.1, 0.45, &c),
            Err(ModelError::ContactOutOfRange { .. })
        ));
        assert!(matches!(
            point_force(-1e-3, 0.2, &c),
            Err(ModelError::InvalidElongation(_))
        ));
        assert!(point_force(f64::NAN, 0.2, &c).is_err());
    }

    #[test]
    fn curvature_reference_values() {
        let c = cfg();
        assert_eq!(solve_curvature(0.0, &c, 1e-9).unwrap().curvature, 0.0);

        let sol = solve_curvature(0.1, &c, 1e-9).unwrap();
        assert!(!sol.saturated);
        assert!((sol.curvature - 4.020_957_992_718_60).abs() < 1e-8);
        assert!(sol.residual < 1e-9);

        let sat = solve_curvature(c.saturation_elongation(), &c, 1e-9).unwrap();
        assert!(sat.saturated);
        assert!((sat.curvature - 2.0 / 0.44).abs() < 1e-12);
        assert!(solve_curvature(1.0, &c, 1e-9).unwrap().saturated);
    }

    #[test]
    fn curvature_rejects_bad_tolerance() {
        let c = cfg();
        assert_eq!(solve_curvature(0.1, &c, 0.0), Err(ModelError::InvalidTolerance(0.0)));
        assert!(solve_curvature(0.1, &c, 1e-2).is_err());
        assert!(solve_curvature(0.1, &c, 1e-3).is_ok());
    }

    #[test]
    fn coarse_tolerance_still_meets_residual() {
        let c = cfg();
        for &l in &[1e-4, 0.01, 0.1, 0.25] {
            let sol = solve_curvature(l, &c, 1e-3).unwrap();
            assert!(sol.residual < 1e-3, "l={l} residual={}", sol.residual);
        }
    }

    #[test]
    fn homogeneous_reference_values() {
        let c = cfg();
        let zero = homogeneous_load(0.0, &c).unwrap();
        assert_eq!((zero.load, zero.total_force), (0.0, 0.0));

        let load = homogeneous_load(0.1, &c).unwrap();
        assert!((load.load - 8.846_107_583_980_93).abs() < 1e-7);
        assert!((load.total_force - 3.892_287_336_951_61).abs() < 1e-7);

        let sat = homogeneous_load(0.3, &c).unwrap();
        assert!(sat.saturated);
        assert!((sat.load - 10.0).abs() < 1e-12);
        assert_eq!(sat.total_force, 4.4);
        assert_eq!(sat.central_angle, PI);
    }

    #[test]
    fn inverse_reference_values() {
        let c = cfg();
        assert_eq!(elongation_from_point_force(0.0, 0.22, &c).unwrap(), 0.0);
        let l = elongation_from_point_force(2.55, 0.22, &c).unwrap();
        assert!((l - 0.099_917_104_993_384).abs() < 1e-9);

        assert_eq!(elongation_from_load(0.0, &c).unwrap(), 0.0);
        let l = elongation_from_load(10.0, &c).unwrap();
        assert!((l - 0.251_150_383_789_754).abs() < 1e-12);
        let l = elongation_from_load(8.85, &c).unwrap();
        assert!((l - 0.100_177_813_402_881).abs() < 1e-9);
    }

    #[test]
    fn inverses_reject_saturation() {
        let c = cfg();
        assert!(matches!(
            elongation_from_point_force(4.4, 0.22, &c),
            Err(ModelError::Saturated { .. })
        ));
        assert!(matches!(
            elongation_from_load(10.01, &c),
            Err(ModelError::Saturated { .. })
        ));
        assert!(elongation_from_load(-1.0, &c).is_err());
    }

    #[test]
    fn estimator_tags_model_and_saturation() {
        let c = cfg();
        let est = Estimator::new(ForceModel::Homogeneous).estimate(0.3, &c).unwrap();
        assert!(est.saturated);
        assert_eq!(est.total_force, 4.4);

        let est = Estimator::new(ForceModel::PointMidspan).estimate(0.1, &c).unwrap();
        assert!(!est.saturated);
        match est.detail {
            ForceDetail::Point(p) => assert_eq!(p.position, 0.22),
            _ => panic!("expected point detail"),
        }
    }

    #[test]
    fn model_names_round_trip() {
        for model in [ForceModel::PointMidspan, ForceModel::Homogeneous] {
            assert_eq!(model.as_str().parse::<ForceModel>().unwrap(), model);
        }
        assert!("bumper".parse::<ForceModel>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(WireConfig::new(0.0, 2.2).is_err());
        assert!(WireConfig::new(0.44, -1.0).is_err());
        let bad = WireConfig {
            mount_height: -0.1,
            ..WireConfig::default()
        };
        assert!(bad.validate().is_err());
        let parsed: WireConfig = serde_json::from_str(r#"{"tension_n": 3.0}"#).unwrap();
        assert_eq!(parsed.tension, 3.0);
        assert_eq!(parsed.rest_length, 0.44);
    }
}
