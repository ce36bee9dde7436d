use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wireforce(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wireforce"))
        .args(args)
        .output()
        .unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wireforce-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_poses(dir: &Path) -> PathBuf {
    let path = dir.join("pose.csv");
    let mut text = String::from("t_sec,x_m,y_m,yaw_rad\n");
    for k in 0..=10 {
        text.push_str(&format!("{},{},0,0\n", k as f64 * 0.1, k as f64 * 0.1));
    }
    fs::write(&path, text).unwrap();
    path
}

fn forces(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_sec,dist_m,elongation_m,total_force_n,saturated"));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn zero_elongation_gives_zero_force() {
    let dir = workdir("zero");
    let pose = write_poses(&dir);
    let sensor = dir.join("sensor.csv");
    fs::write(&sensor, "t_sec,raw_ratio\n0,0\n0.5,0\n1,0\n").unwrap();
    let rows = forces(&wireforce(&[Path::new("estimate"), &sensor, &pose]));
    assert_eq!(rows.len(), 3);
    for (row, dist) in rows.iter().zip([0.0, 0.5, 1.0]) {
        assert!((row[1].parse::<f64>().unwrap() - dist).abs() < 1e-9);
        assert_eq!(row[3], "0");
        assert_eq!(row[4], "false");
    }
    fs::remove_dir_all(dir).ok();
}

#[test]
fn saturated_elongation_reports_limit() {
    let dir = workdir("sat");
    let pose = write_poses(&dir);
    let sensor = dir.join("sensor.csv");
    // 0.44 (π/2 − 1) m, just above the saturation elongation.
    fs::write(&sensor, "t_sec,elongation_m\n0.2,0.2512\n").unwrap();
    let out = wireforce(&[Path::new("estimate"), &sensor, &pose, Path::new("--pre-calibrated")]);
    let rows = forces(&out);
    assert_eq!(rows[0][3], "4.4");
    assert_eq!(rows[0][4], "true");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn disjoint_logs_name_both_spans() {
    let dir = workdir("overlap");
    let pose = write_poses(&dir);
    let sensor = dir.join("sensor.csv");
    fs::write(&sensor, "t_sec,raw_ratio\n5,0.1\n6,0.1\n").unwrap();
    let out = wireforce(&[Path::new("map"), &sensor, &pose, &dir.join("map")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("[5.000, 6.000]") && err.contains("[0.000, 1.000]"),
        "{err}"
    );
    fs::remove_dir_all(dir).ok();
}

#[test]
fn unsorted_log_reports_file_and_line() {
    let dir = workdir("unsorted");
    let pose = write_poses(&dir);
    let sensor = dir.join("sensor.csv");
    fs::write(&sensor, "t_sec,raw_ratio\n0,0.1\n0.2,0.1\n0.1,0.1\n").unwrap();
    let out = wireforce(&[Path::new("estimate"), &sensor, &pose]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{}:4:", sensor.display())), "{err}");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn simulate_then_map_is_reproducible() {
    let dir = workdir("map");
    let scene = dir.join("scene.json");
    let traj = dir.join("trajectory.json");
    fs::write(
        &scene,
        r#"{"stems":[{"x":1,"y":0,"stiffness_n_per_m":12,"yield_n":3}],"noise_std_m":0.0005,"seed":3}"#,
    )
    .unwrap();
    fs::write(&traj, r#"{"waypoints":[[-1,0],[3,0]],"speed_mps":1,"rate_hz":10}"#).unwrap();
    let sim = dir.join("sim");
    let status = wireforce(&[Path::new("simulate"), &scene, &traj, &sim]).status;
    assert!(status.success());
    for name in ["sensor.csv", "pose.csv", "truth.csv", "calibration.json"] {
        assert!(sim.join(name).exists(), "{name}");
    }

    let render = |prefix: &str| {
        let prefix = dir.join(prefix);
        let out = wireforce(&[
            Path::new("map"),
            &sim.join("sensor.csv"),
            &sim.join("pose.csv"),
            &prefix,
            Path::new("--calibration"),
            &sim.join("calibration.json"),
            Path::new("--model"),
            Path::new("point-midspan"),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        [".csv", ".pgm", "_mask.pgm"].map(|suffix| fs::read(format!("{}{suffix}", prefix.display())).unwrap())
    };
    assert_eq!(render("one"), render("two"));

    let estimate = wireforce(&[
        Path::new("estimate"),
        &sim.join("sensor.csv"),
        &sim.join("pose.csv"),
        Path::new("--model"),
        Path::new("point-midspan"),
    ]);
    let peak = forces(&estimate)
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((peak - 3.0).abs() < 0.1, "peak {peak}");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn malformed_scene_is_an_input_error() {
    let dir = workdir("scene");
    let scene = dir.join("scene.json");
    let traj = dir.join("trajectory.json");
    fs::write(&scene, "{\n  \"stems\": [1, 2]\n}").unwrap();
    fs::write(&traj, r#"{"waypoints":[[0,0],[1,0]]}"#).unwrap();
    let out = wireforce(&[Path::new("simulate"), &scene, &traj, &dir.join("out")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scene.json:2:"));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn oracle_report_json() {
    let dir = workdir("oracle");
    let cases = dir.join("cases.json");
    let report = dir.join("report.json");
    fs::write(&cases, r#"[{"l_m":0,"x0_m":0.22},{"l_m":0.05,"x0_m":0.11}]"#).unwrap();
    let out = wireforce(&[
        Path::new("oracle-check"),
        Path::new("--cases"),
        &cases,
        Path::new("--report"),
        &report,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["point"][0]["boundary"], true);
    fs::remove_dir_all(dir).ok();
}
