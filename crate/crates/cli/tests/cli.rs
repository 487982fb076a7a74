use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "experiment,snr_db,s_factor,m_rx,n_tx,engine,mi_bpcu,stderr,samples,seed";

fn losmimo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losmimo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const MC_CONFIG: &str = r#"
name = "cli_mc"

[tx]
kind = "ula"
aperture = 0.5
count = 2

[rx]
kind = "packed"
aperture = 0.5
s = [1, 3]

[channel]
distance = 100.0
wavelength = 0.005

[signal]
constellation = "qam4"
snr_db = [0, 12]

[engine]
kind = "mc"
samples = 5000
seed = 11
"#;

#[test]
fn check_reports_resolved_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", MC_CONFIG);
    let out = losmimo(&["check", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cli_mc: valid"));
    assert!(text.contains("S = 3: M = 6 (packed), engine mc"));
    assert!(text.contains("no oversampling"));
}

#[test]
fn check_rejects_unknown_keys_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(
        dir.path(),
        "u.toml",
        &MC_CONFIG.replace("seed = 11", "seed = 11\nturbo = true"),
    );
    let out = losmimo(&["check", "--config", &unknown]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `turbo`"));

    let empty = write_config(
        dir.path(),
        "e.toml",
        &MC_CONFIG.replace("snr_db = [0, 12]", "snr_db = []"),
    );
    let out = losmimo(&["check", "--config", &empty]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("snr_db is empty"));

    let fractional = write_config(
        dir.path(),
        "f.toml",
        &MC_CONFIG.replace("s = [1, 3]", "s = [1.25]"),
    );
    assert!(!losmimo(&["check", "--config", &fractional])
        .status
        .success());

    assert!(!losmimo(&["check", "--config", "/nonexistent/x.toml"])
        .status
        .success());
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", MC_CONFIG);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let csv = dir.path().join(format!("t{threads}.csv"));
        let out = losmimo(&[
            "--threads",
            threads,
            "sweep",
            "--config",
            &cfg,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("cli_mc,0,1,2,2,mc,"));
    assert!(lines[1].ends_with(",5000,11"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", MC_CONFIG);
    let csv = dir.path().join("s.csv");
    let out = losmimo(&[
        "--seed",
        "99",
        "sweep",
        "--config",
        &cfg,
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",99")));
}

#[test]
fn sweep_reports_engine_cap_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let body = MC_CONFIG
        .replace("kind = \"mc\"", "kind = \"exact\"\nexact_max_rx = 4")
        .replace("samples = 5000\n", "");
    let cfg = write_config(dir.path(), "cap.toml", &body);
    let csv = dir.path().join("cap.csv");
    let out = losmimo(&["sweep", "--config", &cfg, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at most 4 receive antennas"));
    // the points within the cap are still written
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn figure_writes_data_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig");
    let out = losmimo(&[
        "figure",
        "--id",
        "fig4a",
        "--out",
        out_dir.to_str().unwrap(),
        "--samples",
        "2000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(out_dir.join("fig4a_deviations.csv")).unwrap();
    assert!(report.starts_with("figure,curve,s,snr_db,ours,paper,delta,within_tol\n"));
    assert_eq!(report.lines().count(), 67);
    let data = std::fs::read_to_string(out_dir.join("fig4a.csv")).unwrap();
    assert!(data.starts_with(HEADER));
    assert!(std::fs::read_to_string(out_dir.join("fig4a.svg"))
        .unwrap()
        .starts_with("<svg"));

    // zero tolerance cannot hold for every point
    let strict = losmimo(&[
        "figure",
        "--id",
        "fig4a",
        "--out",
        out_dir.to_str().unwrap(),
        "--samples",
        "2000",
        "--tolerance",
        "0",
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn unknown_figure_is_rejected() {
    let out = losmimo(&["figure", "--id", "fig7", "--out", "/tmp/unused"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig7"));
}
