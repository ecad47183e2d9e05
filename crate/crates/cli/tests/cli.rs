//! End-to-end tests of the `revmap` binary: exit codes, file outputs,
//! and the subcommand plumbing.

use std::path::Path;
use std::process::Command;

fn revmap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_revmap"))
}

#[test]
fn usage_error_is_exit_2() {
    let out = revmap().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let output = dir.path().join("out.csv");
    std::fs::write(&input, "1,0,0\n0.5,0.5,0.1\n").unwrap();
    let out = revmap()
        .args(["embed", "--alpha", "stereographic"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&output).unwrap();
    for line in text.lines() {
        let row: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row.len(), 4);
        let n: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
}

#[test]
fn embed_missing_input_is_exit_3() {
    let out = revmap()
        .args(["embed", "--alpha", "0", "--input", "/nonexistent.csv", "--output", "/tmp/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn run_missing_config_is_exit_2() {
    let out = revmap().args(["run", "--config", "/nonexistent.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_bad_config_key_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "sourcery = dark\nrow = amplitude\n").unwrap();
    let out = revmap().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn verify_fast_passes_and_reports() {
    let out = revmap().args(["verify", "--level", "fast"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("check=sphere_round_trip status=pass"));
    assert!(stdout.contains("check=injected_fault_detected status=pass"));
    assert!(stdout.contains("result=pass"));
}

#[test]
fn verify_bad_level_is_exit_2() {
    let out = revmap().args(["verify", "--level", "medium"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fetch_synthetic_then_run_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out_dir = dir.path().join("results");

    let fetched = revmap()
        .args(["fetch-data", "--synthetic"])
        .arg("--dir")
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(fetched.status.code(), Some(0), "{}", String::from_utf8_lossy(&fetched.stderr));
    assert!(data.join("train-images-idx3-ubyte").exists());

    // idempotence: running fetch-data again over valid files is a no-op
    let again = revmap().arg("fetch-data").arg("--dir").arg(&data).output().unwrap();
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
    assert!(String::from_utf8_lossy(&again.stdout).contains("already present"));

    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        format!(
            "source = fashion_mnist\ndata_dir = {}\ncount = 16\ntest_fraction = 0.25\n\
             repeats = 2\nbudget = 40\nseed = 3\nrow = reverse twilight 800\n",
            data.display()
        ),
    )
    .unwrap();
    let run = revmap()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with(
        "embedding,alpha,M,non_equivariant_acc_mean,non_equivariant_acc_std,\
         equivariant_acc_mean,equivariant_acc_std"
    ));
    assert_eq!(summary.lines().count(), 2);

    let loss_csvs: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("loss_"))
        .collect();
    assert_eq!(loss_csvs.len(), 2);

    let svg_path = dir.path().join("loss.svg");
    let plot = revmap()
        .arg("plot")
        .args(&loss_csvs)
        .arg("--out")
        .arg(&svg_path)
        .output()
        .unwrap();
    assert_eq!(plot.status.code(), Some(0), "{}", String::from_utf8_lossy(&plot.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polyline") && svg.contains("iterations"));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    for name in ["full_table.cfg", "desk_scale.cfg"] {
        let text = std::fs::read_to_string(root.join("configs").join(name)).unwrap();
        let cfg = revmap_cli::config::parse_run_config(&text).unwrap();
        assert!(!cfg.rows.is_empty(), "{name}");
    }
    let full = revmap_cli::config::parse_run_config(
        &std::fs::read_to_string(root.join("configs/full_table.cfg")).unwrap(),
    )
    .unwrap();
    assert_eq!(full.rows.len(), 7);
    assert_eq!(full.repeats, 10);
    let desk = revmap_cli::config::parse_run_config(
        &std::fs::read_to_string(root.join("configs/desk_scale.cfg")).unwrap(),
    )
    .unwrap();
    assert_eq!(desk.count, 60);
    assert_eq!(desk.budget, 150);
    assert_eq!(desk.repeats, 3);
}
