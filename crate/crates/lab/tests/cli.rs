use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

const BIN: &str = env!("CARGO_BIN_EXE_curveflow-lab");

const FLOW: &str = "flow = { cfl_factor = 0.5, resample_every = 200, target_vertex_spacing = 0.015, \
    min_vertices = 256, stop_area_fraction = 0.02, max_curvature_stop = 1e4, max_steps = 20000000, snapshot_ratio = 0.98 }";

fn lab(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CURVEFLOW_OUT");
    if let Some(dir) = out_env {
        cmd.env("CURVEFLOW_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn ellipse_catalog(slope_tolerance: f64) -> String {
    format!(
        "[ellipse]\nkind = \"curve-flow\"\noutput = \"ellipse\"\n\
         curves = [{{ ellipse = {{ a = 2.0, b = 1.0, vertices = 512 }} }}]\nlaw = {{ p = 1.0 }}\n{FLOW}\n\
         [ellipse.analyses]\narea-law = {{ slope_tolerance = {slope_tolerance}, extinction_tolerance = 0.02 }}\n\
         roundness = {{ final_residual = 0.02, iso_tolerance = 0.01 }}\nembedded = {{}}\n"
    )
}

fn write_catalog(dir: &Path, text: &str) -> String {
    let path = dir.join("catalog.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn oracle_only_accept_is_fast_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = lab(
        &[
            "accept",
            "--only",
            "oracle-check",
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("oracle_selfcheck"));
    assert!(!stdout.contains("circle_law"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["total"], 1);
}

#[test]
fn zero_tolerance_is_a_check_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let catalog = write_catalog(tmp.path(), &ellipse_catalog(0.0));
    let out = lab(
        &["accept", "--catalog", &catalog, "--out", tmp.path().to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("slope_relative_error"));
    assert!(stdout.contains("FAIL"));
}

#[test]
fn config_and_usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let catalog = write_catalog(tmp.path(), &ellipse_catalog(0.005).replace("p = 1.0", "p = -1.0"));
    let out = lab(&["run", &catalog, "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("law.p"));

    let broken = write_catalog(tmp.path(), "[a]\nkind = \"oracle-check\"\noutput = [\n");
    let out = lab(&["run", &broken], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(lab(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(lab(&["oracle", "circle", "1.0"], None).status.code(), Some(2));
    assert_eq!(lab(&["oracle", "circle", "1.0", "0.6"], None).status.code(), Some(2));
    assert_eq!(lab(&["run", "/nonexistent/catalog.toml"], None).status.code(), Some(2));
}

#[test]
fn oracle_subcommand_prints_values() {
    let out = lab(&["oracle", "circle", "1.0", "0.25"], None);
    assert_eq!(out.status.code(), Some(0));
    let r: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((r - 0.5f64.sqrt()).abs() < 1e-15);

    let out = lab(&["oracle", "power", "1.0", "0.3333333333333333", "0.3"], None);
    let r: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((r - 0.6817).abs() < 1e-4);

    let out = lab(&["oracle", "grim-reaper", "33", "1.2"], None);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 33);

    let out = lab(&["oracle", "self-check"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("worst mismatch"));
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(&["accept", "--only", "oracle-check"], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("summary.json").exists());
    assert!(tmp.path().join("oracle_selfcheck").join("report.json").exists());
}

#[test]
fn runs_are_deterministic_and_artifacts_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let catalog = write_catalog(tmp.path(), &ellipse_catalog(0.005));
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let root = tmp.path().join(run);
        let out = lab(
            &["run", &catalog, "--out", root.to_str().unwrap(), "--workers", "1"],
            None,
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        csvs.push(fs::read(root.join("ellipse").join("trajectory.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let dir = tmp.path().join("a").join("ellipse");
    let mut analysis_files: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("analysis_"))
        .collect();
    analysis_files.sort();
    assert_eq!(
        analysis_files,
        [
            "analysis_area-law.json",
            "analysis_embedded.json",
            "analysis_roundness.json"
        ]
    );
    for f in ["initial.svg", "final.svg", "events.json", "report.json", "snap_0.xy"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    for file in report["artifacts"].as_array().unwrap() {
        assert!(Path::new(file.as_str().unwrap()).exists());
    }

    // The stored trajectory rescales from the command line.
    let frames = tmp.path().join("frames");
    let out = lab(
        &[
            "rescale",
            dir.to_str().unwrap(),
            "0,0",
            "1.0",
            "--scales",
            "1,1.5",
            "--out",
            frames.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(frames.join("rescale.json").exists());
    assert!(frames.join("frame_0.xy").exists());
}
