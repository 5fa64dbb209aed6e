//! End-to-end command tests: exit-code contract, output files, determinism.

use pinchtrace::cp1::{Complex, CP1};
use pinchtrace::degeneration::{ScenarioConfig, ScenarioKind};
use pinchtrace::mobius::{GeodesicH3, MobiusMap};
use pinchtrace::surface_rep::{SurfacePresentation, SurfaceRep};
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinchtrace"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pinchtrace-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn version_prints_and_succeeds() {
    let out = bin().arg("version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("pinchtrace"));
}

#[test]
fn simulate_hyperbolic_passes_with_geodesic_target() {
    let dir = temp_dir("sim-hyp");
    let out = bin()
        .args(["simulate", "--scenario", "hyperbolic", "--out"])
        .arg(&dir)
        .args(["--config"])
        .arg(config_path("hyperbolic.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = std::fs::read_to_string(dir.join("certificate.json")).unwrap();
    assert!(cert.contains("\"axis_target\": \"geodesic\""));
    assert!(dir.join("trace.csv").exists());
    assert!(dir.join("tr2_vs_t.svg").exists());
}

#[test]
fn simulate_elliptic_passes_with_point_target() {
    let dir = temp_dir("sim-ell");
    let out = bin()
        .args(["simulate", "--scenario", "elliptic", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = std::fs::read_to_string(dir.join("certificate.json")).unwrap();
    assert!(cert.contains("\"axis_target\": \"point\""));
}

#[test]
fn simulate_rejects_coarse_grid() {
    let mut cfg = ScenarioConfig::bundled(ScenarioKind::HyperbolicNeck);
    cfg.times = ScenarioConfig::geometric_times(4, 25.0, 100.0);
    let dir = temp_dir("sim-coarse");
    let cfg_path = dir.join("coarse.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = bin()
        .args(["simulate", "--scenario", "hyperbolic", "--out"])
        .arg(&dir)
        .arg("--config")
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_outputs_are_deterministic() {
    let mut cfg = ScenarioConfig::bundled(ScenarioKind::HyperbolicNeck);
    cfg.times = ScenarioConfig::geometric_times(10, 25.0, 200.0);
    let dir = temp_dir("sim-det");
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let sub = dir.join(format!("run{run}"));
        let status = bin()
            .args(["simulate", "--scenario", "hyperbolic", "--seed", "11", "--out"])
            .arg(&sub)
            .arg("--config")
            .arg(&cfg_path)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push((
            std::fs::read(sub.join("trace.csv")).unwrap(),
            std::fs::read(sub.join("certificate.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "trace.csv must be byte-identical");
    assert_eq!(outputs[0].1, outputs[1].1, "certificate.json must be byte-identical");
}

#[test]
fn flat_reports_l_shape_and_torus() {
    let out = bin()
        .args(["flat", "--grid", "8", "--surface"])
        .arg(config_path("l_shape.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("angle 18.84955592"), "6π cone angle, got:\n{text}");
    assert!(text.contains("genus: 2"));

    let out = bin()
        .args(["flat", "--grid", "8", "--surface"])
        .arg(config_path("square_torus.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("genus: 1"));
    assert!(text.contains("angle 6.283185307"), "regular point class");
}

#[test]
fn flat_rejects_mismatched_gluing() {
    let dir = temp_dir("flat-bad");
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"vertices": [[0,0],[2,0],[2,1],[0,2]],
            "pairings": [{"a":0,"b":2,"kind":"Translation"},
                          {"a":1,"b":3,"kind":"Translation"}]}"#,
    )
    .unwrap();
    let out = bin().args(["flat", "--surface"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad gluing"));
}

fn moving_rep(t: f64) -> SurfaceRep {
    let alpha = MobiusMap::dilation(Complex::new(1.0 + 1.0 / (1.0 + t), 0.0));
    let g = GeodesicH3::new(
        CP1::new(-1.0, 0.0),
        CP1::new(1.0 + 0.1 / (1.0 + t), 0.2),
    )
    .unwrap();
    let beta = MobiusMap::translation_along(&g, 0.8).unwrap();
    let peripheral = (alpha * beta * alpha.inverse() * beta.inverse()).inverse();
    SurfaceRep::new(
        SurfacePresentation::new(1, 1),
        vec![alpha, beta, peripheral],
    )
}

fn words_json() -> String {
    // Generators and one product word.
    r#"[[[0,1]],[[1,1]],[[0,1],[1,1]]]"#.to_string()
}

#[test]
fn lift_convergent_scrambled_fixture() {
    let dir = temp_dir("lift-ok");
    let times: Vec<f64> = (0..16).map(|k| 1.0 + k as f64).collect();
    let mut rng = pinchtrace::rng::SplitMix64::new(5);
    let reps: Vec<SurfaceRep> = times
        .iter()
        .map(|&t| {
            let n = MobiusMap::new(
                Complex::new(1.0 + rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)),
                Complex::new(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)),
                Complex::new(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)),
                Complex::new(1.0 + rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)),
            )
            .unwrap();
            moving_rep(t).conjugated(&n)
        })
        .collect();
    let path = pinchtrace::charvar::SampledPath::new(times, reps);
    let path_file = dir.join("path.json");
    std::fs::write(&path_file, serde_json::to_string(&path).unwrap()).unwrap();
    let words_file = dir.join("words.json");
    std::fs::write(&words_file, words_json()).unwrap();
    let out = bin()
        .args(["lift", "--path"])
        .arg(&path_file)
        .arg("--words")
        .arg(&words_file)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("conjugators.json").exists());
    assert!(dir.join("lifted.json").exists());
    assert!(dir.join("diagnostics.csv").exists());
}

#[test]
fn lift_rejects_divergent_fixture() {
    let dir = temp_dir("lift-div");
    let times: Vec<f64> = (0..12).map(|k| 1.0 + k as f64).collect();
    let reps: Vec<SurfaceRep> = times
        .iter()
        .map(|&t| {
            SurfaceRep::new(
                SurfacePresentation::new(1, 0),
                vec![
                    MobiusMap::dilation(Complex::new(t, 0.0)),
                    MobiusMap::translation(Complex::new(1.0, 0.0)),
                ],
            )
        })
        .collect();
    let path = pinchtrace::charvar::SampledPath::new(times, reps);
    let path_file = dir.join("path.json");
    std::fs::write(&path_file, serde_json::to_string(&path).unwrap()).unwrap();
    let words_file = dir.join("words.json");
    std::fs::write(&words_file, r#"[[[0,1]],[[1,1]]]"#).unwrap();
    let out = bin()
        .args(["lift", "--path"])
        .arg(&path_file)
        .arg("--words")
        .arg(&words_file)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lift_constant_path_gives_constant_conjugators() {
    let dir = temp_dir("lift-const");
    let times: Vec<f64> = (0..10).map(|k| 1.0 + k as f64).collect();
    let rep = moving_rep(40.0);
    let reps = vec![rep; 10];
    let path = pinchtrace::charvar::SampledPath::new(times, reps);
    let path_file = dir.join("path.json");
    std::fs::write(&path_file, serde_json::to_string(&path).unwrap()).unwrap();
    let words_file = dir.join("words.json");
    std::fs::write(&words_file, words_json()).unwrap();
    let out = bin()
        .args(["lift", "--path"])
        .arg(&path_file)
        .arg("--words")
        .arg(&words_file)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let wrapper: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("conjugators.json")).unwrap())
            .unwrap();
    assert!(wrapper["manifest"]["version"].is_string());
    let conj: Vec<MobiusMap> = serde_json::from_value(wrapper["conjugators"].clone()).unwrap();
    for w in &conj {
        assert!(w.dist(&conj[0]) < 1e-9, "conjugators should be constant");
    }
}

#[test]
fn classify_cusp_reports_wraps() {
    let out = bin()
        .args([
            "classify-cusp",
            "--kind",
            "flat",
            "--period-re",
            "0",
            "--period-im",
            "4.442882938158366",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("IdentityOrParabolic"), "{text}");
}
