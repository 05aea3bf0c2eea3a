use nlcavity_cli::presets::{preset, PRESETS};
use nlcavity_cli::ScenarioConfig;
use std::path::Path;
use std::process::{Command, Output};

fn nlcavity(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nlcavity"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const BISTABILITY: &str = r#"
kind = "detector-bistability"
output = "OUT"

[detector]
z_p = 50.0
omega_t_hz = 5e9
q_t = 300.0
omega_m_hz = 4e6
q_m = 1000.0
mass = 1e-16
i_c = 4.5e-6
c_j = 1e-14
phi_ext = 0.442
b_ext = 0.05
loop_inductance = 1e-12
k_d = -3.4e-6
k_tm = 1.1e-5

[detuning]
start = 1.0
stop = 3.0
points = POINTS
"#;

fn bistability(dir: &Path, points: usize) -> String {
    let out = dir.join("out");
    BISTABILITY.replace("OUT", out.to_str().unwrap()).replace("POINTS", &points.to_string())
}

#[test]
fn empty_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &bistability(dir.path(), 0));
    let out = nlcavity(&["run", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &bistability(dir.path(), 5));
    let out = nlcavity(&["run", &cfg], &[("NLCAVITY_THREADS", "lots")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bistability_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &bistability(dir.path(), 21));
    let out = nlcavity(&["run", &cfg], &[("NLCAVITY_THREADS", "2")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/bistability.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "detuning_ratio,lower_ratio,upper_ratio,lower_current,upper_current");
    assert_eq!(lines.len(), 22);
    // Both boundaries meet at the onset.
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!((first[1] - 1.0).abs() < 1e-12 && (first[2] - 1.0).abs() < 1e-12);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "detector-bistability");
    assert!(manifest["gates"]["screening_beta_l"].as_f64().unwrap() < 1.0);
    assert_eq!(manifest["tables"][0]["rows"], 21);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| {
        let out_dir = dir.path().join(sub);
        let out = nlcavity(
            &["run", "--preset", "ch2-detection", "--out", out_dir.to_str().unwrap()],
            &[("NLCAVITY_THREADS", threads)],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(out_dir.join("signal_noise.csv")).unwrap(), std::fs::read(out_dir.join("manifest.json")).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert_eq!(a.0, b.0);
    // Manifests differ only in the output path.
    let strip = |m: Vec<u8>, sub: &str| String::from_utf8(m).unwrap().replace(&format!("/{sub}\""), "\"");
    assert_eq!(strip(a.1, "a"), strip(b.1, "b"));
}

#[test]
fn gate_failure_exits_3() {
    let mut cfg = preset("ch3-beltran").unwrap();
    if let ScenarioConfig::HawkingLine(c) = &mut cfg {
        // Array impedance passes R_Q above this flux.
        c.pulse.amplitude = 0.3;
    }
    let dir = tempfile::tempdir().unwrap();
    cfg.set_output(dir.path().join("out"));
    let path = write_config(dir.path(), &cfg.to_toml().unwrap());
    let out = nlcavity(&["run", &path], &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn presets_round_trip() {
    for name in PRESETS {
        let cfg = preset(name).unwrap();
        let text = cfg.to_toml().unwrap();
        assert_eq!(ScenarioConfig::parse(&text).unwrap(), cfg, "{name}");
    }
}

#[test]
fn preset_listing() {
    let out = nlcavity(&["presets"], &[]);
    let listing = String::from_utf8(out.stdout).unwrap();
    for name in PRESETS {
        assert!(listing.contains(name));
    }
    let show = |name: &str| -> toml::Table {
        let out = nlcavity(&["presets", "--show", name], &[]);
        assert!(out.status.success());
        toml::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap()
    };
    let detection = show("ch2-detection");
    assert_eq!(detection["detector"]["i_c"].as_float(), Some(4.5e-6));
    assert_eq!(detection["detector"]["phi_ext"].as_float(), Some(0.442));
    let line = show("ch3-beltran");
    assert_eq!(line["line"]["i_c"].as_float(), Some(2e-6));
    assert_eq!(line["line"]["c_0"].as_float(), Some(5e-17));
    assert_eq!(line["line"]["a"].as_float(), Some(0.25e-6));
    assert_eq!(nlcavity(&["presets", "--show", "nope"], &[]).status.code(), Some(2));
}

#[test]
fn hawking_preset_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("line");
    let out = nlcavity(&["run", "--preset", "ch3-beltran", "--out", out_dir.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let t = manifest["resolved"]["hawking_temperature_k"].as_f64().unwrap();
    assert!((t / 0.12 - 1.0).abs() < 0.1, "{t}");
    for key in ["beta_l", "impedance_over_r_q", "max_flux"] {
        assert!(manifest["gates"][key].is_number());
    }
    let flux = std::fs::read_to_string(out_dir.join("flux.csv")).unwrap();
    assert_eq!(flux.lines().count(), 47);
}
