//! Force-field grid maps.
//!
//! Every reading is projected into the grid by sampling points along the
//! deformed wire at the robot pose. Each distinct cell touched by a reading
//! accumulates that reading's total force once; the cell mean is the average
//! total force of the readings whose wire passed through it. Cells never
//! touched stay unexplored.

mod export;

pub use export::{write_csv, write_mask_pgm, write_pgm};

use thiserror::Error;

use crate::ingest::{PoseRecord, StampedSample};
use crate::model::{Estimator, ForceDetail, ForceEstimate, ModelError, WireConfig};

/// Cell size used when the grid is derived from the data (m).
pub const DEFAULT_RESOLUTION: f64 = 0.15;

/// Points sampled along the wire per reading.
pub const DEFAULT_FOOTPRINT_SAMPLES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("footprint needs at least 2 samples, got {0}")]
    TooFewFootprintSamples(usize),
    #[error("no samples to map")]
    NoSamples,
    #[error("sample {index}: {source}")]
    Estimate { index: usize, source: ModelError },
}

pub type Result<T> = std::result::Result<T, MapError>;

/// Regular grid; cell `(row, col)` covers
/// `[origin.x + col·res, +res) × [origin.y + row·res, +res)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: f64,
    pub origin: (f64, f64),
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(resolution: f64, origin: (f64, f64), width: usize, height: usize) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(MapError::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(MapError::InvalidGrid(format!(
                "grid must have at least one cell, got {width}x{height}"
            )));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(MapError::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            resolution,
            origin,
            width,
            height,
        })
    }

    /// Smallest grid snapped to multiples of `resolution` that contains every
    /// point with one cell of padding on each side.
    pub fn covering<'a>(resolution: f64, points: impl IntoIterator<Item = &'a (f64, f64)>) -> Result<Self> {
        Self::new(resolution, (0.0, 0.0), 1, 1)?;
        let mut bounds: Option<(f64, f64, f64, f64)> = None;
        for &(x, y) in points {
            bounds = Some(match bounds {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        let (min_x, min_y, max_x, max_y) = bounds.ok_or(MapError::NoSamples)?;
        let first_col = (min_x / resolution).floor() - 1.0;
        let first_row = (min_y / resolution).floor() - 1.0;
        let last_col = (max_x / resolution).floor() + 1.0;
        let last_row = (max_y / resolution).floor() + 1.0;
        Self::new(
            resolution,
            (first_col * resolution, first_row * resolution),
            (last_col - first_col) as usize + 1,
            (last_row - first_row) as usize + 1,
        )
    }

    /// Cell `(row, col)` containing the world point, if inside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let col = ((x - self.origin.0) / self.resolution).floor();
        let row = ((y - self.origin.1) / self.resolution).floor();
        if col >= 0.0 && row >= 0.0 && (col as usize) < self.width && (row as usize) < self.height {
            Some((row as usize, col as usize))
        } else {
            None
        }
    }

    /// World coordinates of the center of a cell.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin.0 + (col as f64 + 0.5) * self.resolution,
            self.origin.1 + (row as f64 + 0.5) * self.resolution,
        )
    }

    fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }
}

/// How [`build_map`] chooses its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridChoice {
    Auto { resolution: f64 },
    Fixed(GridSpec),
}

impl Default for GridChoice {
    fn default() -> Self {
        GridChoice::Auto {
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// World-frame points sampled along the deformed wire of one reading.
#[derive(Debug, Clone, PartialEq)]
pub struct WireFootprint {
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceFieldMap {
    pub spec: GridSpec,
    sum: Vec<f64>,
    count: Vec<u32>,
    /// Footprint points that fell outside the grid.
    pub out_of_bounds: usize,
}

impl ForceFieldMap {
    pub fn new(spec: GridSpec) -> Self {
        let cells = spec.width * spec.height;
        Self {
            spec,
            sum: vec![0.0; cells],
            count: vec![0; cells],
            out_of_bounds: 0,
        }
    }

    pub fn sum(&self, row: usize, col: usize) -> f64 {
        self.sum[self.spec.index(row, col)]
    }

    pub fn count(&self, row: usize, col: usize) -> u32 {
        self.count[self.spec.index(row, col)]
    }

    /// Mean force of a cell; `None` for unexplored cells.
    pub fn mean(&self, row: usize, col: usize) -> Option<f64> {
        let i = self.spec.index(row, col);
        (self.count[i] > 0).then(|| self.sum[i] / f64::from(self.count[i]))
    }

    /// Explored cells in row-major order as `(row, col, mean, count)`.
    pub fn explored(&self) -> impl Iterator<Item = (usize, usize, f64, u32)> + '_ {
        let width = self.spec.width;
        self.count
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i / width, i % width, self.sum[i] / f64::from(c), c))
    }

    pub fn total_sum(&self) -> f64 {
        self.sum.iter().sum()
    }

    /// Adds `total_force` once to every distinct cell the footprint touches.
    /// Returns the number of distinct cells hit.
    pub fn accumulate(&mut self, footprint: &WireFootprint, total_force: f64) -> usize {
        let mut cells: Vec<usize> = Vec::with_capacity(footprint.points.len());
        for &(x, y) in &footprint.points {
            match self.spec.cell_of(x, y) {
                Some((row, col)) => cells.push(self.spec.index(row, col)),
                None => self.out_of_bounds += 1,
            }
        }
        cells.sort_unstable();
        cells.dedup();
        for &i in &cells {
            self.sum[i] += total_force;
            self.count[i] += 1;
        }
        cells.len()
    }
}

/// Samples `samples` points, equally spaced in arc length, along the deformed
/// wire of `estimate` and places them in the world frame.
///
/// In the robot frame the wire spans `(forward_offset, −L/2)` to
/// `(forward_offset, L/2)` and deflects toward `−x`, back toward the robot.
pub fn wire_footprint(
    pose: &PoseRecord,
    estimate: &ForceEstimate,
    cfg: &WireConfig,
    samples: usize,
) -> Result<WireFootprint> {
    if samples < 2 {
        return Err(MapError::TooFewFootprintSamples(samples));
    }
    let rest = cfg.rest_length;
    let along_wire: Vec<(f64, f64)> = match estimate.detail {
        ForceDetail::Point(contact) => triangle_points(contact.position, contact.deflection, rest, samples),
        ForceDetail::Homogeneous(load) => arc_points(load.curvature, rest, samples),
    };
    let (sin, cos) = pose.yaw.sin_cos();
    let points = along_wire
        .into_iter()
        .map(|(u, d)| {
            let xr = cfg.forward_offset - d;
            let yr = u - 0.5 * rest;
            (pose.x + cos * xr - sin * yr, pose.y + sin * xr + cos * yr)
        })
        .collect();
    Ok(WireFootprint { points })
}

/// `(along, deflection)` pairs on the triangle with apex `(x0, y0)`.
fn triangle_points(x0: f64, y0: f64, rest: f64, samples: usize) -> Vec<(f64, f64)> {
    let first = x0.hypot(y0);
    let second = (rest - x0).hypot(y0);
    let total = first + second;
    (0..samples)
        .map(|k| {
            let s = total * k as f64 / (samples - 1) as f64;
            if s <= first && first > 0.0 {
                let f = s / first;
                (x0 * f, y0 * f)
            } else {
                let f = ((s - first) / second).min(1.0);
                (x0 + (rest - x0) * f, y0 * (1.0 - f))
            }
        })
        .collect()
}

/// `(along, deflection)` pairs on the circular segment of curvature `kappa`
/// spanning the chord `[0, L]`.
fn arc_points(kappa: f64, rest: f64, samples: usize) -> Vec<(f64, f64)> {
    let denom = (samples - 1) as f64;
    if kappa == 0.0 {
        return (0..samples).map(|k| (rest * k as f64 / denom, 0.0)).collect();
    }
    let angle = 2.0 * (0.5 * kappa * rest).min(1.0).asin();
    let arc = angle / kappa;
    (0..samples)
        .map(|k| {
            let turned = kappa * arc * k as f64 / denom;
            let along = 0.5 * rest + (turned - 0.5 * angle).sin() / kappa;
            let deflection = 2.0 * (0.5 * turned).sin() * (0.5 * (angle - turned)).sin() / kappa;
            (along, deflection)
        })
        .collect()
}

/// Estimates, projects and accumulates every sample into a force-field map.
pub fn build_map(
    samples: &[StampedSample],
    estimator: &Estimator,
    cfg: &WireConfig,
    grid: GridChoice,
    footprint_samples: usize,
) -> Result<ForceFieldMap> {
    if samples.is_empty() {
        return Err(MapError::NoSamples);
    }
    let mut readings = Vec::with_capacity(samples.len());
    for (index, sample) in samples.iter().enumerate() {
        let estimate = estimator
            .estimate(sample.elongation, cfg)
            .map_err(|source| MapError::Estimate { index, source })?;
        let footprint = wire_footprint(&sample.pose, &estimate, cfg, footprint_samples)?;
        readings.push((footprint, estimate.total_force));
    }
    let spec = match grid {
        GridChoice::Fixed(spec) => spec,
        GridChoice::Auto { resolution } => {
            GridSpec::covering(resolution, readings.iter().flat_map(|(f, _)| f.points.iter()))?
        }
    };
    let mut map = ForceFieldMap::new(spec);
    for (footprint, force) in &readings {
        map.accumulate(footprint, *force);
    }
    Ok(map)
}
