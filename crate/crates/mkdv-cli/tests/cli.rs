//! End-to-end checks of the command-line surface: flags, file formats,
//! exit codes, and the simulate -> compare round trip.

use std::path::Path;
use std::process::Command;

fn mkdv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mkdv"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn profiles_emits_headered_csv() {
    let dir = std::env::temp_dir().join("mkdv_cli_profiles");
    let _ = std::fs::remove_dir_all(&dir);
    let out = mkdv()
        .args([
            "profiles",
            "--profile",
            "per",
            "--beta1",
            "0.4",
            "--beta2",
            "0.6",
            "--beta3",
            "0.8",
            "--t",
            "1.0",
            "--nx",
            "32",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&dir, "profile.csv");
    assert!(text.starts_with("# mkdv "), "missing version echo");
    assert!(text.contains("# profiles: {"), "missing config echo");
    assert!(text.contains("x,q"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 33);
}

#[test]
fn whitham_table_and_reproducibility() {
    let dir = std::env::temp_dir().join("mkdv_cli_whitham");
    let _ = std::fs::remove_dir_all(&dir);
    let run = || {
        let out = mkdv()
            .args([
                "whitham", "--cminus", "0.8", "--cplus", "0.4", "--zmin", "-1", "--zmax", "2",
                "--n", "16", "--out",
            ])
            .arg(&dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        read(&dir, "whitham.csv")
    };
    let first = run();
    let second = run();
    // Deterministic output: numeric columns reproduce byte-for-byte.
    assert_eq!(first, second);
    assert!(first.contains("z,beta1,beta2,beta3,m,d,B,Delta,x0"));
}

#[test]
fn bad_ordering_exits_with_code_2() {
    let dir = std::env::temp_dir().join("mkdv_cli_bad");
    let out = mkdv()
        .args([
            "simulate",
            "--preset",
            "exact_step",
            "--cminus",
            "0.4",
            "--cplus",
            "0.8",
            "--tend",
            "1",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn zero_tend_writes_initial_snapshot_only() {
    let dir = std::env::temp_dir().join("mkdv_cli_t0");
    let _ = std::fs::remove_dir_all(&dir);
    let out = mkdv()
        .args([
            "simulate",
            "--preset",
            "exact_step",
            "--cminus",
            "0.8",
            "--cplus",
            "0.4",
            "--tend",
            "0",
            "--xmin",
            "-40",
            "--xmax",
            "40",
            "--dx",
            "0.2",
            "--no-domain-check",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&dir, "snapshot_t0.csv");
    assert!(text.contains("# t=0"));
}

#[test]
fn simulate_compare_roundtrip_and_threshold_exit() {
    let dir = std::env::temp_dir().join("mkdv_cli_roundtrip");
    let _ = std::fs::remove_dir_all(&dir);
    let out = mkdv()
        .args([
            "simulate",
            "--preset",
            "exact_step",
            "--cminus",
            "0.8",
            "--cplus",
            "0.4",
            "--tend",
            "4",
            "--xmin",
            "-70",
            "--xmax",
            "60",
            "--dx",
            "0.08",
            "--snapshots",
            "4",
            "--checkpoint",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("snapshot_t4.ckpt").exists());
    assert!(read(&dir, "diagnostics.csv").contains("t,h0,h1,max_abs_q,sponge_dev"));

    let snap = dir.join("snapshot_t4.csv");
    let ok = mkdv()
        .args(["compare", "--cminus", "0.8", "--cplus", "0.4", "--snapshot"])
        .arg(&snap)
        .args(["--max-sup", "0.5", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let metrics: serde_json::Value = serde_json::from_str(&read(&dir, "compare.json")).unwrap();
    assert!(metrics["sup_error"].as_f64().unwrap() < 0.5);
    assert!(metrics["per_region"]["dsw"]["points"].as_u64().unwrap() > 0);

    // An unattainable threshold flips the exit code to 4.
    let fail = mkdv()
        .args(["compare", "--cminus", "0.8", "--cplus", "0.4", "--snapshot"])
        .arg(&snap)
        .args(["--max-sup", "1e-9", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(4));
}

#[test]
fn scattering_json_roundtrip_via_asymptote() {
    let dir = std::env::temp_dir().join("mkdv_cli_scatter");
    let _ = std::fs::remove_dir_all(&dir);
    let out = mkdv()
        .args([
            "scattering",
            "--cminus",
            "0.8",
            "--cplus",
            "0.4",
            "--eval-grid",
            "0.5,3,6",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let json = read(&dir, "scattering.json");
    assert!(json.contains("\"c_minus\": 0.8"));
    let grid = read(&dir, "scattering_grid.csv");
    for line in grid
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('k'))
    {
        let resid: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(resid < 1e-10, "unitarity residual {resid}");
    }

    // The JSON document feeds asymptote symmetric with the preset flags.
    let data_file = dir.join("scattering.json");
    let out = mkdv()
        .args(["asymptote", "--data"])
        .arg(&data_file)
        .args([
            "--t", "8", "--xmin", "-8", "--xmax", "16", "--nx", "10", "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = read(&dir, "asymptote_t8.csv");
    assert!(table.contains("x,t,region,q_leading,q_subleading,q_total"));
    assert!(table.contains("dsw"));
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = std::env::temp_dir().join("mkdv_cli_config");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{"profiles": {"profile": "soliton", "c": 0.4, "kappa0": 1.0, "nx": 8}}"#,
    )
    .unwrap();
    let out = mkdv()
        .args(["profiles", "--config"])
        .arg(&cfg)
        .args(["--nx", "5", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // The explicit flag wins over the config file.
    let text = read(&dir, "profile.csv");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn compare_against_identical_input_is_zero() {
    // Build a "snapshot" whose samples are the predicted wave itself; the
    // comparison must then report (numerically) zero error.
    let dir = std::env::temp_dir().join("mkdv_cli_selfcmp");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out = mkdv()
        .args([
            "asymptote",
            "--cminus",
            "0.8",
            "--cplus",
            "0.4",
            "--t",
            "6",
            "--xmin",
            "-7.2",
            "--xmax",
            "13.2",
            "--nx",
            "103",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    // Reshape the asymptote table into the snapshot format.
    let table = read(&dir, "asymptote_t6.csv");
    let mut snap = String::from("# synthetic\n# t=6\nx,q\n");
    for line in table
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
    {
        let cols: Vec<&str> = line.split(',').collect();
        snap.push_str(&format!("{},{}\n", cols[0], cols[3]));
    }
    let snap_path = dir.join("synthetic.csv");
    std::fs::write(&snap_path, snap).unwrap();
    let out = mkdv()
        .args(["compare", "--cminus", "0.8", "--cplus", "0.4", "--snapshot"])
        .arg(&snap_path)
        .args(["--window-lo", "-6", "--window-hi", "12", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let metrics: serde_json::Value = serde_json::from_str(&read(&dir, "compare.json")).unwrap();
    assert!(metrics["sup_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn phase_report_lists_eigen_shifts() {
    let dir = std::env::temp_dir().join("mkdv_cli_phasereport");
    let _ = std::fs::remove_dir_all(&dir);
    // Dress the step with one soliton and one slow breather.
    let out = mkdv()
        .args([
            "scattering",
            "--cminus",
            "0.8",
            "--cplus",
            "0.4",
            "--eigens",
            "0,1.2,-0.7,0;1.5,0.6,0.5,0.4",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let data = dir.join("scattering.json");
    let out = mkdv()
        .args(["asymptote", "--data"])
        .arg(&data)
        .args(["--t", "5", "--nx", "8", "--phase-report", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = read(&dir, "phase_report.csv");
    let rows: Vec<&str> = report
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('j'))
        .collect();
    assert_eq!(rows.len(), 2);
    // Fastest first (the soliton outruns the cone); it carries a real x_j,
    // the left-going breather a complex shifted norming constant.
    let sol: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(sol[3], "RightConst");
    let x_j: f64 = sol[6].parse().unwrap();
    assert!(x_j.is_finite());
    let br: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(br[3], "LeftConst");
    let nu_im: f64 = br[8].parse().unwrap();
    assert!(nu_im.abs() > 0.0);
}
