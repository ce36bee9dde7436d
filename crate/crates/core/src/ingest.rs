//! Sensor and pose log ingestion.
//!
//! Sensor logs carry either raw potentiometer ratios (`t_sec,raw_ratio`) or
//! already calibrated elongations (`t_sec,elongation_m`). Pose logs carry
//! `t_sec,x_m,y_m,yaw_rad`. Every retained sensor reading is stamped with the
//! pose interpolated at its time.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RAW_SENSOR_HEADER: [&str; 2] = ["t_sec", "raw_ratio"];
pub const ELONGATION_HEADER: [&str; 2] = ["t_sec", "elongation_m"];
pub const POSE_HEADER: [&str; 4] = ["t_sec", "x_m", "y_m", "yaw_rad"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{file}: could not read: {message}")]
    Io { file: String, message: String },
    #[error("{file}:1: expected header `{expected}`, found `{found}`")]
    Header {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: u64, message: String },
    #[error("{file}:{line}: time {time} s does not increase past the previous record at {previous} s")]
    Unsorted {
        file: String,
        line: u64,
        time: f64,
        previous: f64,
    },
    #[error("{file}: no records")]
    Empty { file: String },
    #[error(
        "sensor log [{:.3}, {:.3}] s does not overlap pose log [{:.3}, {:.3}] s",
        sensor_span.0, sensor_span.1, pose_span.0, pose_span.1
    )]
    NoOverlap {
        sensor_span: (f64, f64),
        pose_span: (f64, f64),
    },
    #[error("smoothing window must be a positive odd integer, got {0}")]
    InvalidWindow(usize),
    #[error("invalid calibration: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// One raw potentiometer reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSensorRecord {
    #[serde(rename = "t_sec")]
    pub time: f64,
    pub raw_ratio: f64,
}

/// One calibrated elongation reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElongationSample {
    #[serde(rename = "t_sec")]
    pub time: f64,
    #[serde(rename = "elongation_m")]
    pub elongation: f64,
}

/// Linear map from potentiometer ratio to pulled wire length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Wire length at `raw_ratio = 1` (m).
    #[serde(rename = "full_scale_m")]
    pub full_scale: f64,
    /// Ratio read with the wire at rest.
    pub zero_offset: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            full_scale: 1.0,
            zero_offset: 0.0,
        }
    }
}

impl Calibration {
    pub fn validate(&self) -> Result<()> {
        if !(self.full_scale.is_finite() && self.full_scale > 0.0) {
            return Err(IngestError::Calibration(format!(
                "full_scale_m must be positive, got {}",
                self.full_scale
            )));
        }
        if !(0.0..1.0).contains(&self.zero_offset) {
            return Err(IngestError::Calibration(format!(
                "zero_offset must lie in [0, 1), got {}",
                self.zero_offset
            )));
        }
        Ok(())
    }

    /// Ratio that reads back as elongation `l`, clipped to the sensor travel.
    pub fn ratio_for(&self, l: f64) -> f64 {
        (self.zero_offset + l / self.full_scale).clamp(0.0, 1.0)
    }
}

/// Robot pose in the world frame (East-North, yaw counter-clockwise from +x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    #[serde(rename = "t_sec")]
    pub time: f64,
    #[serde(rename = "x_m")]
    pub x: f64,
    #[serde(rename = "y_m")]
    pub y: f64,
    #[serde(rename = "yaw_rad")]
    pub yaw: f64,
}

/// Elongation reading with the interpolated robot pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StampedSample {
    pub time: f64,
    pub pose: PoseRecord,
    pub elongation: f64,
    /// Planar path length travelled along the pose log up to this sample (m).
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibrated {
    pub elongation: f64,
    /// The reading fell below the rest offset (slack wire) and was clamped.
    pub clamped: bool,
}

/// Converts a raw ratio to elongation, clamping slack readings to zero.
pub fn calibrate(rec: &RawSensorRecord, cal: &Calibration) -> Calibrated {
    let delta = rec.raw_ratio - cal.zero_offset;
    Calibrated {
        elongation: delta.max(0.0) * cal.full_scale,
        clamped: delta < 0.0,
    }
}

/// Sensor log as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum SensorLog {
    Raw(Vec<RawSensorRecord>),
    Calibrated(Vec<ElongationSample>),
}

impl SensorLog {
    /// Elongation samples plus the number of slack readings clamped to zero.
    pub fn elongations(&self, cal: &Calibration) -> (Vec<ElongationSample>, usize) {
        let mut slack = 0;
        let samples = match self {
            SensorLog::Raw(records) => records
                .iter()
                .map(|rec| {
                    let c = calibrate(rec, cal);
                    slack += usize::from(c.clamped);
                    ElongationSample {
                        time: rec.time,
                        elongation: c.elongation,
                    }
                })
                .collect(),
            SensorLog::Calibrated(samples) => samples
                .iter()
                .map(|s| {
                    slack += usize::from(s.elongation < 0.0);
                    ElongationSample {
                        time: s.time,
                        elongation: s.elongation.max(0.0),
                    }
                })
                .collect(),
        };
        (samples, slack)
    }
}

/// Result of [`align`].
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub samples: Vec<StampedSample>,
    /// Sensor readings before the first or after the last pose.
    pub dropped: usize,
    /// Readings clamped to zero during calibration.
    pub slack: usize,
}

fn check_header(file: &str, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().map(str::trim).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(IngestError::Header {
            file: file.to_string(),
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        })
    }
}

/// Reads rows of `N` finite floats after validating the header, enforcing
/// strictly increasing first column.
fn read_rows<R: Read, const N: usize>(reader: R, file: &str, expected: &[&str]) -> Result<Vec<(u64, [f64; N])>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| IngestError::Parse {
        file: file.to_string(),
        line: 1,
        message: e.to_string(),
    })?;
    check_header(file, header, expected)?;

    let mut rows = Vec::new();
    let mut previous: Option<f64> = None;
    for result in rdr.records() {
        let record = result.map_err(|e| IngestError::Parse {
            file: file.to_string(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = [0.0; N];
        for (i, value) in values.iter_mut().enumerate() {
            let field = record.get(i).unwrap_or("");
            *value = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IngestError::Parse {
                    file: file.to_string(),
                    line,
                    message: format!("column `{}`: `{field}` is not a finite number", expected[i]),
                })?;
        }
        let time = values[0];
        if let Some(prev) = previous {
            if time <= prev {
                return Err(IngestError::Unsorted {
                    file: file.to_string(),
                    line,
                    time,
                    previous: prev,
                });
            }
        }
        previous = Some(time);
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(IngestError::Empty { file: file.to_string() });
    }
    Ok(rows)
}

/// Parses a sensor CSV. `pre_calibrated` selects the `elongation_m` schema.
pub fn parse_sensor_csv<R: Read>(reader: R, file: &str, pre_calibrated: bool) -> Result<SensorLog> {
    if pre_calibrated {
        let rows = read_rows::<_, 2>(reader, file, &ELONGATION_HEADER)?;
        Ok(SensorLog::Calibrated(
            rows.into_iter()
                .map(|(_, [time, elongation])| ElongationSample { time, elongation })
                .collect(),
        ))
    } else {
        let rows = read_rows::<_, 2>(reader, file, &RAW_SENSOR_HEADER)?;
        let mut records = Vec::with_capacity(rows.len());
        for (line, [time, raw_ratio]) in rows {
            if !(0.0..=1.0).contains(&raw_ratio) {
                return Err(IngestError::Parse {
                    file: file.to_string(),
                    line,
                    message: format!("raw_ratio {raw_ratio} outside [0, 1]"),
                });
            }
            records.push(RawSensorRecord { time, raw_ratio });
        }
        Ok(SensorLog::Raw(records))
    }
}

/// Parses a pose CSV, wrapping yaw into `(−π, π]`.
pub fn parse_pose_csv<R: Read>(reader: R, file: &str) -> Result<Vec<PoseRecord>> {
    let rows = read_rows::<_, 4>(reader, file, &POSE_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|(_, [time, x, y, yaw])| PoseRecord {
            time,
            x,
            y,
            yaw: wrap_angle(yaw),
        })
        .collect())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| IngestError::Io {
        file: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_sensor_csv(path: &Path, pre_calibrated: bool) -> Result<SensorLog> {
    parse_sensor_csv(open(path)?, &path.display().to_string(), pre_calibrated)
}

pub fn read_pose_csv(path: &Path) -> Result<Vec<PoseRecord>> {
    parse_pose_csv(open(path)?, &path.display().to_string())
}

pub fn read_calibration(path: &Path) -> Result<Calibration> {
    let file = path.display().to_string();
    let cal: Calibration = serde_json::from_reader(open(path)?).map_err(|e| IngestError::Parse {
        file,
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    cal.validate()?;
    Ok(cal)
}

pub fn write_raw_sensor_csv<W: Write>(writer: W, records: &[RawSensorRecord]) -> std::io::Result<()> {
    write_rows(
        writer,
        &RAW_SENSOR_HEADER,
        records.iter().map(|r| vec![r.time, r.raw_ratio]),
    )
}

pub fn write_elongation_csv<W: Write>(writer: W, samples: &[ElongationSample]) -> std::io::Result<()> {
    write_rows(
        writer,
        &ELONGATION_HEADER,
        samples.iter().map(|s| vec![s.time, s.elongation]),
    )
}

pub fn write_pose_csv<W: Write>(writer: W, poses: &[PoseRecord]) -> std::io::Result<()> {
    write_rows(
        writer,
        &POSE_HEADER,
        poses.iter().map(|p| vec![p.time, p.x, p.y, p.yaw]),
    )
}

fn write_rows<W: Write>(mut writer: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> std::io::Result<()> {
    writeln!(writer, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(writer, "{}", fields.join(","))?;
    }
    writer.flush()
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    if wrapped == -PI {
        PI
    } else {
        wrapped
    }
}

fn check_sorted<T>(items: &[T], time: impl Fn(&T) -> f64, file: &str) -> Result<()> {
    for (i, w) in items.windows(2).enumerate() {
        if time(&w[1]) <= time(&w[0]) {
            return Err(IngestError::Unsorted {
                file: file.to_string(),
                // Header occupies line 1.
                line: i as u64 + 3,
                time: time(&w[1]),
                previous: time(&w[0]),
            });
        }
    }
    Ok(())
}

/// Stamps every sensor sample inside the pose time span with the pose
/// interpolated at its time: linear in position, shortest arc in yaw.
pub fn align(sensor: &[ElongationSample], poses: &[PoseRecord]) -> Result<Alignment> {
    if sensor.is_empty() {
        return Err(IngestError::Empty {
            file: "sensor log".into(),
        });
    }
    if poses.is_empty() {
        return Err(IngestError::Empty {
            file: "pose log".into(),
        });
    }
    check_sorted(sensor, |s| s.time, "sensor log")?;
    check_sorted(poses, |p| p.time, "pose log")?;

    let mut cumulative = Vec::with_capacity(poses.len());
    let mut total = 0.0;
    cumulative.push(0.0);
    for w in poses.windows(2) {
        total += (w[1].x - w[0].x).hypot(w[1].y - w[0].y);
        cumulative.push(total);
    }

    let first = poses[0].time;
    let last = poses[poses.len() - 1].time;
    let mut samples = Vec::with_capacity(sensor.len());
    let mut dropped = 0;
    let mut k = 0;
    for s in sensor {
        if s.time < first || s.time > last {
            dropped += 1;
            continue;
        }
        while k + 1 < poses.len() && poses[k + 1].time <= s.time {
            k += 1;
        }
        let pose = if k + 1 == poses.len() {
            poses[k]
        } else {
            interpolate(&poses[k], &poses[k + 1], s.time)
        };
        let distance = cumulative[k] + (pose.x - poses[k].x).hypot(pose.y - poses[k].y);
        samples.push(StampedSample {
            time: s.time,
            pose,
            elongation: s.elongation.max(0.0),
            distance,
        });
    }
    if samples.is_empty() {
        return Err(IngestError::NoOverlap {
            sensor_span: (sensor[0].time, sensor[sensor.len() - 1].time),
            pose_span: (first, last),
        });
    }
    Ok(Alignment {
        samples,
        dropped,
        slack: 0,
    })
}

/// [`align`] for a sensor log that still needs calibration.
pub fn align_log(log: &SensorLog, poses: &[PoseRecord], cal: &Calibration) -> Result<Alignment> {
    let (elongations, slack) = log.elongations(cal);
    let mut alignment = align(&elongations, poses)?;
    alignment.slack = slack;
    Ok(alignment)
}

fn interpolate(a: &PoseRecord, b: &PoseRecord, time: f64) -> PoseRecord {
    let t = (time - a.time) / (b.time - a.time);
    PoseRecord {
        time,
        x: a.x + t * (b.x - a.x),
        y: a.y + t * (b.y - a.y),
        yaw: wrap_angle(a.yaw + t * wrap_angle(b.yaw - a.yaw)),
    }
}

/// Centered moving average of the elongation; edge windows are truncated.
pub fn smooth(samples: &[StampedSample], window: usize) -> Result<Vec<StampedSample>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(IngestError::InvalidWindow(window));
    }
    if window == 1 {
        return Ok(samples.to_vec());
    }
    let half = window / 2;
    let n = samples.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let sum: f64 = samples[lo..hi].iter().map(|s| s.elongation).sum();
            StampedSample {
                elongation: sum / (hi - lo) as f64,
                ..samples[i]
            }
        })
        .collect())
}
