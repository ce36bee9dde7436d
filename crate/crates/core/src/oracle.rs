//! Brute-force potential energy minimization of a discretized wire.
//!
//! The wire is a polyline with fixed, uniformly spaced node abscissae and
//! free deflections. Its energy is the spring term `T · length` minus the
//! work of the vegetation load. Shapes are found by projected descent on the
//! constraint `length = L + l`, independent of the closed forms in
//! [`crate::model`], so the two can be checked against each other.

use serde::Serialize;
use thiserror::Error;

use crate::model::{self, ModelError, WireConfig};

/// Default iteration cap of [`minimize_energy`].
pub const MAX_ITERATIONS: usize = 100_000;

/// Finite-difference step of [`stationarity_check`] (m).
pub const STATIONARITY_STEP: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("wire shape needs at least 2 segments, got {0}")]
    TooFewSegments(usize),
    #[error("wire shape endpoints must be (0, 0) and (L, 0)")]
    BadEndpoints,
    #[error("segment {0} has zero length")]
    DegenerateSegment(usize),
    #[error("node abscissae must be strictly increasing (node {0})")]
    UnorderedNodes(usize),
    #[error("minimizer did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Discretized deflection profile `y(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WireShape {
    pub nodes: Vec<(f64, f64)>,
}

impl WireShape {
    /// Undeformed wire with `segments` equal segments.
    pub fn straight(segments: usize, rest_length: f64) -> Self {
        Self::from_deflections(rest_length, &vec![0.0; segments + 1])
    }

    /// Nodes at `x_i = i·L/n` carrying the given deflections.
    pub fn from_deflections(rest_length: f64, ys: &[f64]) -> Self {
        let n = ys.len().saturating_sub(1).max(1);
        let h = rest_length / n as f64;
        let nodes = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (if i == n { rest_length } else { i as f64 * h }, y))
            .collect();
        Self { nodes }
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn length(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .sum()
    }

    pub fn deflections(&self) -> Vec<f64> {
        self.nodes.iter().map(|&(_, y)| y).collect()
    }

    /// Linearly interpolated deflection at `x`; `None` outside the span.
    pub fn deflection_at(&self, x: f64) -> Option<f64> {
        let first = self.nodes.first()?.0;
        let last = self.nodes.last()?.0;
        if !(first..=last).contains(&x) {
            return None;
        }
        let k = self.nodes.partition_point(|&(xi, _)| xi <= x);
        if k >= self.nodes.len() {
            return Some(self.nodes[self.nodes.len() - 1].1);
        }
        let (x0, y0) = self.nodes[k - 1];
        let (x1, y1) = self.nodes[k];
        let t = (x - x0) / (x1 - x0);
        Some(y0 + t * (y1 - y0))
    }

    fn validate(&self, cfg: &WireConfig) -> Result<()> {
        let n = self.segment_count();
        if n < 2 {
            return Err(OracleError::TooFewSegments(n));
        }
        let tol = 1e-12 * cfg.rest_length;
        let first = self.nodes[0];
        let last = self.nodes[n];
        if first.0.abs() > tol || first.1.abs() > tol || (last.0 - cfg.rest_length).abs() > tol || last.1.abs() > tol {
            return Err(OracleError::BadEndpoints);
        }
        for (i, w) in self.nodes.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(OracleError::UnorderedNodes(i + 1));
            }
        }
        Ok(())
    }
}

/// External load acting on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LoadSpec {
    None,
    /// Concentrated force (N) at a position along the wire (m).
    Point {
        position: f64,
        force: f64,
    },
    /// Uniform distributed load (N/m).
    Uniform {
        load: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `T · length` (J).
    pub spring: f64,
    /// Negative work of the vegetation load (J).
    pub vegetation: f64,
    pub total: f64,
}

/// Potential energy of a discretized shape under `load`.
///
/// Uniform loads integrate `F·y` with the trapezoidal rule; point loads act on
/// the deflection interpolated at the contact position.
pub fn discrete_energy(shape: &WireShape, load: &LoadSpec, cfg: &WireConfig) -> Result<EnergyBreakdown> {
    shape.validate(cfg)?;
    let mut length = 0.0;
    for (i, w) in shape.nodes.windows(2).enumerate() {
        let seg = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
        if seg == 0.0 {
            return Err(OracleError::DegenerateSegment(i));
        }
        length += seg;
    }
    let work = match *load {
        LoadSpec::None => 0.0,
        LoadSpec::Uniform { load } => {
            load * shape
                .nodes
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum::<f64>()
        }
        LoadSpec::Point { position, force } => {
            let y = shape.deflection_at(position).ok_or(ModelError::ContactOutOfRange {
                x0: position,
                length: cfg.rest_length,
            })?;
            force * y
        }
    };
    let spring = cfg.tension * length;
    Ok(EnergyBreakdown {
        spring,
        vegetation: -work,
        total: spring - work,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerOptions {
    pub max_iterations: usize,
    /// Stop once the squared projected Newton decrement drops below
    /// `tolerance · T · L`.
    pub tolerance: f64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: MAX_ITERATIONS,
            tolerance: 1e-20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimization {
    pub shape: WireShape,
    /// Total energy after every accepted step, starting with the initial shape.
    pub energies: Vec<f64>,
    pub iterations: usize,
    /// Final squared projected decrement relative to `T · L`.
    pub residual: f64,
}

/// Equilibrium shape of a wire of length `L + l` under `load`.
pub fn minimize_energy(load: &LoadSpec, l: f64, segments: usize, cfg: &WireConfig) -> Result<WireShape> {
    minimize_energy_with(load, l, segments, cfg, &MinimizerOptions::default()).map(|m| m.shape)
}

/// Internal state over interior deflections only; endpoints are pinned at 0.
struct Problem<'a> {
    cfg: &'a WireConfig,
    load: LoadSpec,
    segments: usize,
    h: f64,
    target: f64,
}

impl Problem<'_> {
    fn full(&self, interior: &[f64]) -> Vec<f64> {
        let mut ys = Vec::with_capacity(self.segments + 1);
        ys.push(0.0);
        ys.extend_from_slice(interior);
        ys.push(0.0);
        ys
    }

    fn length(&self, ys: &[f64]) -> f64 {
        ys.windows(2).map(|w| self.h.hypot(w[1] - w[0])).sum()
    }

    fn work(&self, ys: &[f64]) -> f64 {
        match self.load {
            LoadSpec::None => 0.0,
            LoadSpec::Uniform { load } => load * self.h * ys.iter().sum::<f64>(),
            LoadSpec::Point { position, force } => {
                let (j, t) = self.locate(position);
                force * ((1.0 - t) * ys[j] + t * ys[j + 1])
            }
        }
    }

    fn energy(&self, ys: &[f64]) -> f64 {
        self.cfg.tension * self.length(ys) - self.work(ys)
    }

    fn locate(&self, position: f64) -> (usize, f64) {
        let s = (position / self.h).clamp(0.0, self.segments as f64);
        let j = (s.floor() as usize).min(self.segments - 1);
        (j, s - j as f64)
    }

    /// Scale deflections so the polyline length equals the target.
    fn restore(&self, ys: &mut [f64]) {
        let mut scale = 1.0;
        for _ in 0..60 {
            let mut phi = -self.target;
            let mut dphi = 0.0;
            for w in ys.windows(2) {
                let d = w[1] - w[0];
                let seg = self.h.hypot(scale * d);
                phi += seg;
                dphi += scale * d * d / seg;
            }
            if phi.abs() <= 1e-15 * self.target || dphi == 0.0 {
                break;
            }
            scale -= phi / dphi;
            if scale <= 0.0 {
                scale = 1e-3;
            }
        }
        ys.iter_mut().for_each(|y| *y *= scale);
    }

    /// Interior gradient of the length, energy gradient, and the tridiagonal
    /// length Hessian (diagonal, super-diagonal).
    fn derivatives(&self, ys: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.segments - 1;
        let tension = self.cfg.tension;
        let slopes: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
        let seg: Vec<f64> = slopes.iter().map(|d| self.h.hypot(*d)).collect();
        let weight: Vec<f64> = seg.iter().map(|s| self.h * self.h / (s * s * s)).collect();

        let mut normal = vec![0.0; m];
        let mut grad = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m.saturating_sub(1)];
        for j in 0..m {
            normal[j] = slopes[j] / seg[j] - slopes[j + 1] / seg[j + 1];
            grad[j] = tension * normal[j];
            diag[j] = tension * (weight[j] + weight[j + 1]);
            if j + 1 < m {
                upper[j] = -tension * weight[j + 1];
            }
        }
        match self.load {
            LoadSpec::None => {}
            LoadSpec::Uniform { load } => grad.iter_mut().for_each(|g| *g -= load * self.h),
            LoadSpec::Point { position, force } => {
                let (j, t) = self.locate(position);
                // Interior index k corresponds to node k + 1.
                if j >= 1 {
                    grad[j - 1] -= force * (1.0 - t);
                }
                if j < m {
                    grad[j] -= force * t;
                }
            }
        }
        (normal, grad, diag, upper)
    }
}

/// Thomas algorithm for a symmetric tridiagonal system.
fn solve_tridiagonal(diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if n > 1 {
        c[0] = upper[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - upper[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - upper[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// [`minimize_energy`] with explicit options and a convergence report.
///
/// Each iteration computes the energy gradient, projects it onto the tangent
/// space of the length constraint in the metric of the length Hessian, takes
/// a step, clamps deflections to be non-negative and rescales them back onto
/// the constraint. The step is halved whenever the energy would increase, so
/// the accepted energies decrease monotonically.
pub fn minimize_energy_with(
    load: &LoadSpec,
    l: f64,
    segments: usize,
    cfg: &WireConfig,
    opts: &MinimizerOptions,
) -> Result<Minimization> {
    cfg.validate()?;
    if !(l.is_finite() && l >= 0.0) {
        return Err(ModelError::InvalidElongation(l).into());
    }
    if segments < 2 {
        return Err(OracleError::TooFewSegments(segments));
    }
    if let LoadSpec::Point { position, .. } = *load {
        if !(0.0..=cfg.rest_length).contains(&position) {
            return Err(ModelError::ContactOutOfRange {
                x0: position,
                length: cfg.rest_length,
            }
            .into());
        }
    }
    let rest = cfg.rest_length;
    if l == 0.0 {
        let shape = WireShape::straight(segments, rest);
        let energy = discrete_energy(&shape, load, cfg)?.total;
        return Ok(Minimization {
            shape,
            energies: vec![energy],
            iterations: 0,
            residual: 0.0,
        });
    }

    let problem = Problem {
        cfg,
        load: *load,
        segments,
        h: rest / segments as f64,
        target: rest + l,
    };
    let scale = cfg.tension * rest;

    // Parabolic start, rescaled onto the constraint.
    let mut ys: Vec<f64> = (0..=segments)
        .map(|i| {
            let x = i as f64 * problem.h;
            x * (rest - x) / rest
        })
        .collect();
    problem.restore(&mut ys);
    let mut energy = problem.energy(&ys);
    let mut energies = vec![energy];
    let mut step = 1.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let (normal, grad, diag, upper) = problem.derivatives(&ys);
        let a = solve_tridiagonal(&diag, &upper, &grad);
        let b = solve_tridiagonal(&diag, &upper, &normal);
        let lambda = dot(&normal, &a) / dot(&normal, &b);
        let direction: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| lambda * bi - ai).collect();
        residual = -dot(&grad, &direction) / scale;
        if residual <= opts.tolerance {
            break;
        }

        let mut accepted = false;
        while step >= 1e-14 {
            let mut trial = ys.clone();
            for (y, d) in trial[1..segments].iter_mut().zip(&direction) {
                *y = (*y + step * d).max(0.0);
            }
            problem.restore(&mut trial);
            let trial_energy = problem.energy(&trial);
            if trial_energy < energy {
                ys = trial;
                energy = trial_energy;
                energies.push(energy);
                accepted = true;
                step = (2.0 * step).min(1.0);
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No representable decrease left along the projected direction.
            break;
        }
    }

    if residual > opts.tolerance.max(1e-14) {
        return Err(OracleError::NotConverged { iterations, residual });
    }
    let interior = ys[1..segments].to_vec();
    Ok(Minimization {
        shape: WireShape::from_deflections(rest, &problem.full(&interior)),
        energies,
        iterations,
        residual,
    })
}

/// Largest energy decrease found by moving one interior node by `±magnitude`
/// and rescaling the shape back to length `L + l`. Non-positive at a local
/// minimum.
pub fn max_perturbation_gain(
    shape: &WireShape,
    load: &LoadSpec,
    l: f64,
    cfg: &WireConfig,
    magnitude: f64,
) -> Result<f64> {
    let n = shape.segment_count();
    let problem = Problem {
        cfg,
        load: *load,
        segments: n,
        h: cfg.rest_length / n as f64,
        target: cfg.rest_length + l,
    };
    let base_ys = shape.deflections();
    let base = discrete_energy(shape, load, cfg)?.total;
    let mut gain = f64::NEG_INFINITY;
    for k in 1..n {
        for sign in [-1.0, 1.0] {
            let mut ys = base_ys.clone();
            ys[k] = (ys[k] + sign * magnitude).max(0.0);
            if l > 0.0 {
                problem.restore(&mut ys);
            }
            gain = gain.max(base - problem.energy(&ys));
        }
    }
    Ok(gain)
}

/// Finite-difference check of `dU/dy0 = 0` for the triangular shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stationarity {
    pub deflection: f64,
    pub force: f64,
    /// `|dU/dy0| / T`; at the `y0 = 0` boundary, the negative part of the
    /// one-sided slope over `T`.
    pub residual: f64,
    pub boundary: bool,
    /// Derivative estimate `dU/dy0` (N).
    pub slope: f64,
}

/// Stationarity of the triangle energy at the closed-form deflection and force.
pub fn stationarity_check(l: f64, x0: f64, cfg: &WireConfig) -> Result<Stationarity> {
    let force = model::point_force(l, x0, cfg)?.force;
    stationarity_check_with_force(l, x0, cfg, force)
}

/// Like [`stationarity_check`] with a caller-supplied force.
pub fn stationarity_check_with_force(l: f64, x0: f64, cfg: &WireConfig, force: f64) -> Result<Stationarity> {
    let y0 = model::peak_deflection(l, x0, cfg)?;
    let rest = cfg.rest_length;
    let energy = |y: f64| cfg.tension * (x0.hypot(y) + (rest - x0).hypot(y)) - force * y;
    let h = STATIONARITY_STEP;
    let (slope, boundary) = if y0 < h {
        ((energy(y0 + h) - energy(y0)) / h, true)
    } else {
        ((energy(y0 + h) - energy(y0 - h)) / (2.0 * h), false)
    };
    let residual = if boundary {
        (-slope).max(0.0) / cfg.tension
    } else {
        slope.abs() / cfg.tension
    };
    Ok(Stationarity {
        deflection: y0,
        force,
        residual,
        boundary,
        slope,
    })
}

/// Largest nodal deviation from the triangle with apex `(x0, y0)`.
pub fn triangle_deviation(shape: &WireShape, x0: f64, y0: f64, rest_length: f64) -> f64 {
    shape
        .nodes
        .iter()
        .map(|&(x, y)| {
            let tri = if x <= x0 {
                if x0 > 0.0 {
                    y0 * x / x0
                } else {
                    y0
                }
            } else if x0 < rest_length {
                y0 * (rest_length - x) / (rest_length - x0)
            } else {
                y0
            };
            (y - tri).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest radial deviation from the circular segment of curvature `kappa`
/// spanning the chord `[0, L]` and bulging toward `+y`.
pub fn arc_deviation(shape: &WireShape, kappa: f64, rest_length: f64) -> f64 {
    if kappa == 0.0 {
        return shape.nodes.iter().map(|&(_, y)| y.abs()).fold(0.0, f64::max);
    }
    let radius = 1.0 / kappa;
    let half_chord = 0.5 * rest_length;
    let center_y = -(radius * radius - half_chord * half_chord).max(0.0).sqrt();
    shape
        .nodes
        .iter()
        .map(|&(x, y)| ((x - half_chord).hypot(y - center_y) - radius).abs())
        .fold(0.0, f64::max)
}

/// Curvature of the circle through each interior node and its neighbours.
pub fn nodal_curvatures(shape: &WireShape) -> Vec<f64> {
    shape
        .nodes
        .windows(3)
        .map(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            let ab = (b.0 - a.0).hypot(b.1 - a.1);
            let bc = (c.0 - b.0).hypot(c.1 - b.1);
            let ca = (a.0 - c.0).hypot(a.1 - c.1);
            2.0 * cross.abs() / (ab * bc * ca)
        })
        .collect()
}

/// Largest relative deviation of [`nodal_curvatures`] from their mean over
/// the central `fraction` of the span.
pub fn curvature_spread(shape: &WireShape, fraction: f64) -> f64 {
    let span = shape.nodes.last().map_or(0.0, |n| n.0);
    let margin = 0.5 * (1.0 - fraction) * span;
    let central: Vec<f64> = nodal_curvatures(shape)
        .into_iter()
        .zip(&shape.nodes[1..])
        .filter(|(_, &(x, _))| x >= margin && x <= span - margin)
        .map(|(k, _)| k)
        .collect();
    if central.is_empty() {
        return 0.0;
    }
    let mean = central.iter().sum::<f64>() / central.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    central.iter().map(|k| (k / mean - 1.0).abs()).fold(0.0, f64::max)
}

/// One elongation/contact-position pair checked by [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct OracleCase {
    #[serde(rename = "l_m")]
    pub elongation: f64,
    #[serde(rename = "x0_m")]
    pub position: f64,
}

/// Thresholds and knobs of [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub segments: usize,
    pub deflection_tol: f64,
    pub stationarity_tol: f64,
    pub curvature_spread_tol: f64,
    /// Relative error injected into the closed-form point force.
    pub injected_force_error: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            segments: 200,
            deflection_tol: 2e-3,
            stationarity_tol: 1e-6,
            curvature_spread_tol: 0.02,
            injected_force_error: 0.0,
        }
    }
}

/// Elongations × positions `{0.1L, 0.25L, 0.5L}` checked by default.
pub fn default_cases(cfg: &WireConfig) -> Vec<OracleCase> {
    let mut cases = Vec::new();
    for &elongation in &[0.01, 0.05, 0.1, 0.2] {
        for &frac in &[0.1, 0.25, 0.5] {
            cases.push(OracleCase {
                elongation,
                position: frac * cfg.rest_length,
            });
        }
    }
    cases
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCaseReport {
    pub case: OracleCase,
    pub force_n: f64,
    pub stationarity_residual: f64,
    pub boundary: bool,
    pub max_deviation_m: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformCaseReport {
    pub elongation_m: f64,
    pub curvature_per_m: f64,
    pub max_radial_deviation_m: f64,
    pub curvature_spread: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub segments: usize,
    pub point: Vec<PointCaseReport>,
    pub uniform: Vec<UniformCaseReport>,
    pub passed: bool,
}

/// Compares closed forms against the oracle for every case.
///
/// Point cases check the stationarity residual and the minimized shape
/// against the triangle. Every distinct elongation below homogeneous
/// saturation also gets a uniform-load minimization compared to the arc.
pub fn run_suite(cases: &[OracleCase], cfg: &WireConfig, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut point = Vec::with_capacity(cases.len());
    for &case in cases {
        let contact = model::point_force(case.elongation, case.position, cfg)?;
        let force = contact.force * (1.0 + opts.injected_force_error);
        let stationarity = stationarity_check_with_force(case.elongation, case.position, cfg, force)?;
        let load = LoadSpec::Point {
            position: case.position,
            force,
        };
        let shape = minimize_energy(&load, case.elongation, opts.segments, cfg)?;
        let deviation = triangle_deviation(&shape, case.position, contact.deflection, cfg.rest_length);
        point.push(PointCaseReport {
            case,
            force_n: force,
            stationarity_residual: stationarity.residual,
            boundary: stationarity.boundary,
            max_deviation_m: deviation,
            passed: stationarity.residual < opts.stationarity_tol && deviation < opts.deflection_tol,
        });
    }

    let mut elongations: Vec<f64> = cases.iter().map(|c| c.elongation).collect();
    elongations.sort_by(f64::total_cmp);
    elongations.dedup();
    let mut uniform = Vec::new();
    for l in elongations {
        let load = model::homogeneous_load(l, cfg)?;
        if load.saturated {
            continue;
        }
        let shape = minimize_energy(&LoadSpec::Uniform { load: load.load }, l, opts.segments, cfg)?;
        let deviation = arc_deviation(&shape, load.curvature, cfg.rest_length);
        let spread = curvature_spread(&shape, 0.8);
        uniform.push(UniformCaseReport {
            elongation_m: l,
            curvature_per_m: load.curvature,
            max_radial_deviation_m: deviation,
            curvature_spread: spread,
            passed: deviation < opts.deflection_tol && spread <= opts.curvature_spread_tol,
        });
    }

    let passed = point.iter().all(|p| p.passed) && uniform.iter().all(|u| u.passed);
    Ok(SuiteReport {
        segments: opts.segments,
        point,
        uniform,
        passed,
    })
}
