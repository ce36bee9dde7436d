//! `wireforce`: force estimation, mapping, simulation and oracle checks for
//! the constant-tension wire sensor.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use wireforce_core::ingest::{self, Alignment, Calibration, StampedSample};
use wireforce_core::mapping::{self, GridChoice, GridSpec, DEFAULT_FOOTPRINT_SAMPLES, DEFAULT_RESOLUTION};
use wireforce_core::oracle::{self, OracleCase, SuiteOptions, SuiteReport};
use wireforce_core::sim::{self, Scene, Trajectory};
use wireforce_core::{Estimator, ForceModel, WireConfig};

#[derive(Parser)]
#[command(name = "wireforce", version, about = "Wire sensor force estimation and mapping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the force profile of a traversal.
    Estimate {
        sensor: PathBuf,
        pose: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a force-field map: `<prefix>.csv`, `<prefix>.pgm`, `<prefix>_mask.pgm`.
    Map {
        sensor: PathBuf,
        pose: PathBuf,
        out_prefix: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Grid cell size in metres.
        #[arg(long)]
        resolution: Option<f64>,
        /// Points sampled along each wire footprint.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Simulate a traversal and write sensor, pose and truth logs.
    Simulate {
        scene: PathBuf,
        trajectory: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scene's noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the closed-form models against energy minimization.
    OracleCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `default` or a JSON file with a list of `{"l_m": .., "x0_m": ..}`.
        #[arg(long, default_value = "default")]
        cases: String,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Relative error added to the closed-form point force.
        #[arg(long, hide = true, default_value_t = 0.0)]
        inject_force_error: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Calibration JSON (`full_scale_m`, `zero_offset`); overrides the config.
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ForceModel>,
    /// Contact position for the point model (m, default L/2).
    #[arg(long)]
    x0: Option<f64>,
    /// Moving-average window over elongations (odd).
    #[arg(long)]
    window: Option<usize>,
    /// Sensor log holds `elongation_m` instead of `raw_ratio`.
    #[arg(long)]
    pre_calibrated: bool,
}

fn parse_model(s: &str) -> Result<ForceModel, String> {
    s.parse()
        .map_err(|_| format!("unknown model `{s}` (point-midspan or homogeneous)"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedGrid {
    origin_x_m: f64,
    origin_y_m: f64,
    width: usize,
    height: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    wire: WireConfig,
    calibration: Calibration,
    model: ForceModel,
    x0_m: Option<f64>,
    resolution_m: f64,
    /// Fixed grid; auto-sized to the footprints when absent.
    grid: Option<FixedGrid>,
    smoothing_window: usize,
    footprint_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            wire: WireConfig::default(),
            calibration: Calibration::default(),
            model: ForceModel::Homogeneous,
            x0_m: None,
            resolution_m: DEFAULT_RESOLUTION,
            grid: None,
            smoothing_window: 1,
            footprint_samples: DEFAULT_FOOTPRINT_SAMPLES,
        }
    }
}

impl RunConfig {
    fn estimator(&self) -> Estimator {
        let estimator = Estimator::new(self.model);
        match self.x0_m {
            Some(x0) => estimator.with_contact_position(x0),
            None => estimator,
        }
    }

    fn grid(&self) -> Result<GridChoice, Failure> {
        match &self.grid {
            None => Ok(GridChoice::Auto {
                resolution: self.resolution_m,
            }),
            Some(g) => GridSpec::new(self.resolution_m, (g.origin_x_m, g.origin_y_m), g.width, g.height)
                .map(GridChoice::Fixed)
                .map_err(input),
        }
    }
}

/// A failed command and the exit code it maps to.
enum Failure {
    Tolerance(String),
    Input(String),
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn write_failed(path: &Path, e: io::Error) -> Failure {
    Failure::Input(format!("{}: could not write: {e}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: could not read: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}:{}: {e}", path.display(), e.line())))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    let config: RunConfig = match path {
        Some(p) => read_json(p)?,
        None => RunConfig::default(),
    };
    config.wire.validate().map_err(input)?;
    config.calibration.validate().map_err(input)?;
    Ok(config)
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut config = load_config(self.config.as_deref())?;
        if let Some(path) = &self.calibration {
            config.calibration = ingest::read_calibration(path).map_err(input)?;
        }
        if let Some(model) = self.model {
            config.model = model;
        }
        if self.x0.is_some() {
            config.x0_m = self.x0;
        }
        if let Some(window) = self.window {
            config.smoothing_window = window;
        }
        Ok(config)
    }
}

/// Reads, aligns and smooths the logs; reports dropped and slack readings.
fn load_samples(sensor: &Path, pose: &Path, run: &RunArgs, config: &RunConfig) -> Result<Vec<StampedSample>, Failure> {
    let log = ingest::read_sensor_csv(sensor, run.pre_calibrated).map_err(input)?;
    let poses = ingest::read_pose_csv(pose).map_err(input)?;
    let Alignment {
        samples,
        dropped,
        slack,
    } = ingest::align_log(&log, &poses, &config.calibration).map_err(input)?;
    if dropped > 0 {
        eprintln!("note: {dropped} sensor readings outside the pose time span were dropped");
    }
    if slack > 0 {
        eprintln!("note: {slack} readings below the calibration offset were clamped to zero");
    }
    ingest::smooth(&samples, config.smoothing_window).map_err(input)
}

fn cmd_estimate(sensor: &Path, pose: &Path, run: &RunArgs, out: Option<&Path>) -> Result<(), Failure> {
    let config = run.resolve()?;
    let samples = load_samples(sensor, pose, run, &config)?;
    let estimator = config.estimator();

    let mut rows = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let est = estimator
            .estimate(s.elongation, &config.wire)
            .map_err(|e| Failure::Input(format!("sample {i} at t={} s: {e}", s.time)))?;
        rows.push((s, est));
    }

    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "t_sec,dist_m,elongation_m,total_force_n,saturated")?;
        for (s, est) in &rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.time, s.distance, s.elongation, est.total_force, est.saturated
            )?;
        }
        w.flush()
    };
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| write_failed(path, e))?;
            write(&mut BufWriter::new(file)).map_err(|e| write_failed(path, e))
        }
        None => write(&mut io::stdout().lock()).map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| write_failed(path, e))?;
    f(&mut BufWriter::new(file)).map_err(|e| write_failed(path, e))
}

fn cmd_map(
    sensor: &Path,
    pose: &Path,
    prefix: &Path,
    run: &RunArgs,
    resolution: Option<f64>,
    footprint_samples: Option<usize>,
) -> Result<(), Failure> {
    let mut config = run.resolve()?;
    if let Some(r) = resolution {
        config.resolution_m = r;
    }
    if let Some(m) = footprint_samples {
        config.footprint_samples = m;
    }
    let samples = load_samples(sensor, pose, run, &config)?;
    let map = mapping::build_map(
        &samples,
        &config.estimator(),
        &config.wire,
        config.grid()?,
        config.footprint_samples,
    )
    .map_err(input)?;
    if map.out_of_bounds > 0 {
        eprintln!("note: {} footprint points fell outside the grid", map.out_of_bounds);
    }

    write_file(&with_suffix(prefix, ".csv"), |w| mapping::write_csv(&map, w))?;
    write_file(&with_suffix(prefix, ".pgm"), |w| {
        mapping::write_pgm(&map, config.wire.force_limit(), w)
    })?;
    write_file(&with_suffix(prefix, "_mask.pgm"), |w| mapping::write_mask_pgm(&map, w))
}

fn cmd_simulate(
    scene: &Path,
    trajectory: &Path,
    out_dir: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let config = load_config(config)?;
    let mut scene: Scene = read_json(scene)?;
    let trajectory: Trajectory = read_json(trajectory)?;
    if let Some(seed) = seed {
        scene.seed = seed;
    }
    let out = sim::simulate_with(&scene, &trajectory, &config.wire, &config.calibration).map_err(input)?;

    fs::create_dir_all(out_dir).map_err(|e| write_failed(out_dir, e))?;
    write_file(&out_dir.join("sensor.csv"), |w| out.write_sensor_csv(w))?;
    write_file(&out_dir.join("pose.csv"), |w| out.write_pose_csv(w))?;
    write_file(&out_dir.join("truth.csv"), |w| out.write_truth_csv(w))?;
    write_file(&out_dir.join("calibration.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &out.calibration)?;
        writeln!(w)
    })
}

fn print_report(report: &SuiteReport, opts: &SuiteOptions) {
    let mark = |ok: bool| if ok { "ok  " } else { "FAIL" };
    println!(
        "point load ({} segments; deviation < {} m, stationarity < {:e})",
        report.segments, opts.deflection_tol, opts.stationarity_tol
    );
    for p in &report.point {
        println!(
            "  {} l={:<6} x0={:<8.4} Fs={:.6} N  residual={:.3e}{}  deviation={:.3e} m",
            mark(p.passed),
            p.case.elongation,
            p.case.position,
            p.force_n,
            p.stationarity_residual,
            if p.boundary { " (boundary)" } else { "" },
            p.max_deviation_m
        );
    }
    println!(
        "uniform load (deviation < {} m, curvature spread <= {})",
        opts.deflection_tol, opts.curvature_spread_tol
    );
    for u in &report.uniform {
        println!(
            "  {} l={:<6} kappa={:.6} 1/m  deviation={:.3e} m  spread={:.3e}",
            mark(u.passed),
            u.elongation_m,
            u.curvature_per_m,
            u.max_radial_deviation_m,
            u.curvature_spread
        );
    }
    println!(
        "{}",
        if report.passed {
            "all checks passed"
        } else {
            "tolerance violations found"
        }
    );
}

fn cmd_oracle_check(
    config: Option<&Path>,
    cases: &str,
    report_path: Option<&Path>,
    inject: f64,
) -> Result<(), Failure> {
    let config = load_config(config)?;
    let cases: Vec<OracleCase> = if cases == "default" {
        oracle::default_cases(&config.wire)
    } else {
        read_json(Path::new(cases))?
    };
    let opts = SuiteOptions {
        injected_force_error: inject,
        ..SuiteOptions::default()
    };
    let report = oracle::run_suite(&cases, &config.wire, &opts).map_err(input)?;
    print_report(&report, &opts);
    if let Some(path) = report_path {
        write_file(path, |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            writeln!(w)
        })?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Tolerance("oracle check failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate { sensor, pose, run, out } => cmd_estimate(sensor, pose, run, out.as_deref()),
        Command::Map {
            sensor,
            pose,
            out_prefix,
            run,
            resolution,
            samples,
        } => cmd_map(sensor, pose, out_prefix, run, *resolution, *samples),
        Command::Simulate {
            scene,
            trajectory,
            out_dir,
            config,
            seed,
        } => cmd_simulate(scene, trajectory, out_dir, config.as_deref(), *seed),
        Command::OracleCheck {
            config,
            cases,
            report,
            inject_force_error,
        } => cmd_oracle_check(config.as_deref(), cases, report.as_deref(), *inject_force_error),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
