//! Synthetic traversal logs.
//!
//! A robot follows a waypoint polyline at constant speed through a scene of
//! stems (point obstacles that bend elastically, then yield) and rectangular
//! vegetation patches (uniform loads). At every step the net force on the
//! wire is inverted through the force models into the elongation the sensor
//! would report.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{self, Calibration, IngestError, PoseRecord, RawSensorRecord};
use crate::model::{self, Estimator, ModelError, WireConfig};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("could not write simulated log: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Slender stem that bends linearly until it yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StemObstacle {
    pub x: f64,
    pub y: f64,
    /// Resisting force per metre of stem deflection (N/m).
    #[serde(rename = "stiffness_n_per_m")]
    pub stiffness: f64,
    /// Force at which the stem gives way (N).
    #[serde(rename = "yield_n")]
    pub yield_force: f64,
}

/// Axis-aligned patch of homogeneous vegetation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchObstacle {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    /// Load per metre of engaged wire (N/m).
    #[serde(rename = "density_n_per_m")]
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default)]
    pub stems: Vec<StemObstacle>,
    #[serde(default)]
    pub patches: Vec<PatchObstacle>,
    /// Standard deviation of additive elongation noise (m).
    #[serde(rename = "noise_std_m", default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Scene {
    pub fn validate(&self, cfg: &WireConfig) -> Result<()> {
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(SimError::InvalidScene(format!(
                "noise_std_m must be non-negative, got {}",
                self.noise_std
            )));
        }
        for (i, stem) in self.stems.iter().enumerate() {
            if !(stem.x.is_finite() && stem.y.is_finite()) {
                return Err(SimError::InvalidScene(format!("stem {i}: position must be finite")));
            }
            if !(stem.stiffness.is_finite() && stem.stiffness > 0.0) {
                return Err(SimError::InvalidScene(format!("stem {i}: stiffness must be positive")));
            }
            if !(stem.yield_force.is_finite() && stem.yield_force > 0.0) {
                return Err(SimError::InvalidScene(format!(
                    "stem {i}: yield force must be positive"
                )));
            }
        }
        for (i, patch) in self.patches.iter().enumerate() {
            if !(patch.x_min < patch.x_max && patch.y_min < patch.y_max) {
                return Err(SimError::InvalidScene(format!("patch {i}: degenerate rectangle")));
            }
            if !(0.0..=cfg.load_limit()).contains(&patch.density) {
                return Err(SimError::InvalidScene(format!(
                    "patch {i}: density {} outside [0, {}] N/m",
                    patch.density,
                    cfg.load_limit()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub waypoints: Vec<[f64; 2]>,
    #[serde(rename = "speed_mps", default = "default_speed")]
    pub speed: f64,
    #[serde(rename = "rate_hz", default = "default_rate")]
    pub sample_rate: f64,
}

fn default_speed() -> f64 {
    1.0
}

fn default_rate() -> f64 {
    10.0
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(SimError::InvalidTrajectory("need at least 2 waypoints".into()));
        }
        if self.waypoints.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SimError::InvalidTrajectory("waypoints must be finite".into()));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(SimError::InvalidTrajectory(format!(
                "speed must be positive, got {}",
                self.speed
            )));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(SimError::InvalidTrajectory(format!(
                "sample rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.length() == 0.0 {
            return Err(SimError::InvalidTrajectory("waypoints enclose no path".into()));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Position and heading after travelling `distance` along the path.
    fn pose_at(&self, distance: f64) -> (f64, f64, f64) {
        let mut remaining = distance;
        let segments: Vec<_> = self.waypoints.windows(2).filter(|w| w[0] != w[1]).collect();
        for (i, w) in segments.iter().enumerate() {
            let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
            let len = dx.hypot(dy);
            if remaining < len || i + 1 == segments.len() {
                let t = (remaining / len).min(1.0);
                return (w[0][0] + t * dx, w[0][1] + t * dy, dy.atan2(dx));
            }
            remaining -= len;
        }
        unreachable!("validated trajectory has a non-degenerate segment")
    }
}

/// Which inversion produced a simulated elongation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthModel {
    None,
    Point,
    Homogeneous,
    /// Stem and patch engaged together; forces summed and inverted with the
    /// homogeneous model.
    Mixed,
}

impl TruthModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TruthModel::None => "none",
            TruthModel::Point => "point",
            TruthModel::Homogeneous => "homogeneous",
            TruthModel::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthRecord {
    pub time: f64,
    /// Net force on the wire before noise, capped at `2T` (N).
    pub total_force: f64,
    pub model: TruthModel,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub poses: Vec<PoseRecord>,
    pub sensor: Vec<RawSensorRecord>,
    pub truth: Vec<TruthRecord>,
    /// Noise-free elongation per step (m).
    pub elongations: Vec<f64>,
    pub calibration: Calibration,
}

impl SimulationOutput {
    pub fn write_pose_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        ingest::write_pose_csv(out, &self.poses)
    }

    pub fn write_sensor_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        ingest::write_raw_sensor_csv(out, &self.sensor)
    }

    pub fn write_truth_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_sec,total_force_n,model,saturated")?;
        for rec in &self.truth {
            writeln!(
                out,
                "{},{},{},{}",
                rec.time,
                rec.total_force,
                rec.model.as_str(),
                rec.saturated
            )?;
        }
        out.flush()
    }
}

/// Fraction of the segment `a → b` inside the rectangle (Liang–Barsky).
fn clipped_fraction(a: (f64, f64), b: (f64, f64), patch: &PatchObstacle) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [
        (-dx, a.0 - patch.x_min),
        (dx, patch.x_max - a.0),
        (-dy, a.1 - patch.y_min),
        (dy, patch.y_max - a.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return 0.0;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t1 - t0).max(0.0)
}

/// Simulates with the default calibration (1 m full scale, zero offset).
pub fn simulate(scene: &Scene, traj: &Trajectory, cfg: &WireConfig) -> Result<SimulationOutput> {
    simulate_with(scene, traj, cfg, &Calibration::default())
}

/// Runs the traversal and returns pose, raw sensor and ground-truth logs.
///
/// Per step, a stem whose position lies within the wire span and between the
/// robot origin and the wire line resists with `stiffness × (forward_offset −
/// along-track distance)`, capped at its yield force. Once the robot origin
/// passes it, the stem is broken for good. A patch contributes its density
/// times the fraction of the undeformed wire inside it. The net force is
/// mapped to elongation through the matching model inverse; anything at or
/// above `2T` emits the semicircle elongation `L(π/2 − 1)` and is flagged.
pub fn simulate_with(
    scene: &Scene,
    traj: &Trajectory,
    cfg: &WireConfig,
    calibration: &Calibration,
) -> Result<SimulationOutput> {
    cfg.validate()?;
    scene.validate(cfg)?;
    traj.validate()?;
    calibration.validate()?;

    let rest = cfg.rest_length;
    let half = 0.5 * rest;
    let force_limit = cfg.force_limit();
    let steps = (traj.length() / traj.speed * traj.sample_rate + 1e-9).floor() as usize;
    let mut broken = vec![false; scene.stems.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let noise = if scene.noise_std > 0.0 {
        Some(Normal::new(0.0, scene.noise_std).map_err(|e| SimError::InvalidScene(e.to_string()))?)
    } else {
        None
    };

    let mut out = SimulationOutput {
        poses: Vec::with_capacity(steps + 1),
        sensor: Vec::with_capacity(steps + 1),
        truth: Vec::with_capacity(steps + 1),
        elongations: Vec::with_capacity(steps + 1),
        calibration: *calibration,
    };
    for k in 0..=steps {
        let time = k as f64 / traj.sample_rate;
        let (x, y, yaw) = traj.pose_at(traj.speed * time);
        let (sin, cos) = yaw.sin_cos();

        let mut stem_force = 0.0;
        let mut stem_moment = 0.0;
        for (stem, broken) in scene.stems.iter().zip(broken.iter_mut()) {
            if *broken {
                continue;
            }
            let (rx, ry) = (stem.x - x, stem.y - y);
            let along = rx * cos + ry * sin;
            let lateral = -rx * sin + ry * cos;
            if lateral.abs() > half {
                continue;
            }
            if along < 0.0 {
                *broken = true;
            } else if along <= cfg.forward_offset {
                let force = (stem.stiffness * (cfg.forward_offset - along)).min(stem.yield_force);
                stem_force += force;
                stem_moment += force * (lateral + half);
            }
        }

        let wire_a = (
            x + cos * cfg.forward_offset + sin * half,
            y + sin * cfg.forward_offset - cos * half,
        );
        let wire_b = (
            x + cos * cfg.forward_offset - sin * half,
            y + sin * cfg.forward_offset + cos * half,
        );
        let patch_load: f64 = scene
            .patches
            .iter()
            .map(|p| p.density * clipped_fraction(wire_a, wire_b, p))
            .sum();

        let (total_force, model) = match (stem_force > 0.0, patch_load > 0.0) {
            (false, false) => (0.0, TruthModel::None),
            (true, false) => (stem_force, TruthModel::Point),
            (false, true) => (patch_load * rest, TruthModel::Homogeneous),
            (true, true) => (stem_force + patch_load * rest, TruthModel::Mixed),
        };
        let saturated = total_force >= force_limit;
        let elongation = if saturated {
            cfg.saturation_elongation()
        } else {
            match model {
                TruthModel::None => 0.0,
                TruthModel::Point => {
                    let contact = (stem_moment / stem_force).clamp(0.0, rest);
                    model::elongation_from_point_force(stem_force, contact, cfg)?
                }
                TruthModel::Homogeneous | TruthModel::Mixed => model::elongation_from_load(total_force / rest, cfg)?,
            }
        };
        let measured = match &noise {
            Some(dist) => (elongation + dist.sample(&mut rng)).max(0.0),
            None => elongation,
        };

        out.poses.push(PoseRecord { time, x, y, yaw });
        out.sensor.push(RawSensorRecord {
            time,
            raw_ratio: calibration.ratio_for(measured),
        });
        out.truth.push(TruthRecord {
            time,
            total_force: total_force.min(force_limit),
            model,
            saturated,
        });
        out.elongations.push(elongation);
    }
    Ok(out)
}

/// Estimated against true force at one step of a round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTripStep {
    pub time: f64,
    pub distance: f64,
    pub truth: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    /// Steps with non-zero true force.
    pub engaged: usize,
    pub rms_relative_error: f64,
    pub max_relative_error: f64,
    pub steps: Vec<RoundTripStep>,
}

/// Simulates without noise, pushes the logs through CSV serialization,
/// parsing, alignment and `estimator`, and compares against ground truth.
pub fn round_trip_report(
    scene: &Scene,
    traj: &Trajectory,
    cfg: &WireConfig,
    estimator: &Estimator,
) -> Result<RoundTripReport> {
    let quiet = Scene {
        noise_std: 0.0,
        ..scene.clone()
    };
    let sim = simulate(&quiet, traj, cfg)?;
    let mut sensor_csv = Vec::new();
    sim.write_sensor_csv(&mut sensor_csv)?;
    let mut pose_csv = Vec::new();
    sim.write_pose_csv(&mut pose_csv)?;

    let log = ingest::parse_sensor_csv(sensor_csv.as_slice(), "simulated sensor", false)?;
    let poses = ingest::parse_pose_csv(pose_csv.as_slice(), "simulated poses")?;
    let aligned = ingest::align_log(&log, &poses, &sim.calibration)?;

    let mut steps = Vec::with_capacity(aligned.samples.len());
    let mut sum_sq = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut engaged = 0;
    for (sample, truth) in aligned.samples.iter().zip(&sim.truth) {
        let estimate = estimator.estimate(sample.elongation, cfg)?.total_force;
        if truth.total_force > 0.0 {
            let rel = (estimate - truth.total_force).abs() / truth.total_force;
            sum_sq += rel * rel;
            max_rel = max_rel.max(rel);
            engaged += 1;
        }
        steps.push(RoundTripStep {
            time: sample.time,
            distance: sample.distance,
            truth: truth.total_force,
            estimate,
        });
    }
    Ok(RoundTripReport {
        engaged,
        rms_relative_error: if engaged > 0 {
            (sum_sq / engaged as f64).sqrt()
        } else {
            0.0
        },
        max_relative_error: max_rel,
        steps,
    })
}
