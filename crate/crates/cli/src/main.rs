//! Command-line front end: run degeneration scenarios, validate flat
//! surfaces, lift sampled representation paths, and classify cusp ends.
//!
//! Exit codes: 0 success, 1 certificate or Cauchy failure, 2 input error,
//! 3 solver failure.

use clap::{Parser, Subcommand};
use pinchtrace::charvar::{lift_path, LiftOptions, SampledPath};
use pinchtrace::cp1::Complex;
use pinchtrace::degeneration::{
    certify_trace, elliptic_neck_path, hyperbolic_neck_path, DegenerationError,
    DegenerationTrace, ScenarioConfig, ScenarioKind, TolProfile,
};
use pinchtrace::flatgeom::{classify_cusp, EndDescriptor, PolygonSurface};
use pinchtrace::surface_rep::Word;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "pinchtrace", version, about = "holonomy degeneration toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a degeneration scenario and certify its trace.
    Simulate {
        /// Scenario name: "hyperbolic" or "elliptic".
        #[arg(long)]
        scenario: String,
        /// Scenario configuration JSON; bundled defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for trace.csv, certificate.json, tr2_vs_t.svg.
        #[arg(long)]
        out: PathBuf,
        /// Seed recorded in output headers (the scenarios are deterministic).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance profile: "default" or "strict".
        #[arg(long, default_value = "default")]
        tol_profile: String,
    },
    /// Validate a polygon surface and report its flat geometry.
    Flat {
        /// Polygon-surface JSON (vertex loop plus pairing list).
        #[arg(long)]
        surface: PathBuf,
        /// Sampling density for the injectivity radius estimate.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Lift a sampled representation path to a convergent one.
    Lift {
        /// SampledPath JSON ({"times": …, "reps": …}).
        #[arg(long)]
        path: PathBuf,
        /// Word list JSON (list of [generator, exponent] sequences).
        #[arg(long)]
        words: PathBuf,
        /// Output directory for conjugators.json, lifted.json, diagnostics.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify a cusp end.
    ClassifyCusp {
        /// "shrinking" for an expanding end, "flat" for a half-infinite flat end.
        #[arg(long)]
        kind: String,
        /// Core period (flat ends).
        #[arg(long, default_value_t = 0.0)]
        period_re: f64,
        #[arg(long, default_value_t = 0.0)]
        period_im: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print the artifact version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Simulate { scenario, config, out, seed, tol_profile } => {
            cmd_simulate(&scenario, config.as_deref(), &out, seed, &tol_profile)
        }
        Cmd::Flat { surface, grid } => cmd_flat(&surface, grid),
        Cmd::Lift { path, words, out, seed } => cmd_lift(&path, &words, &out, seed),
        Cmd::ClassifyCusp { kind, period_re, period_im, tol } => {
            cmd_classify_cusp(&kind, period_re, period_im, tol)
        }
        Cmd::Version => {
            println!("pinchtrace {VERSION}");
            0
        }
    };
    ExitCode::from(code)
}

/// FNV-1a hash of the manifest-relevant input bytes.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn manifest_line(command: &str, seed: u64, config_hash: u64) -> String {
    format!("# pinchtrace {VERSION} command={command} seed={seed} config={config_hash:016x}")
}

fn cmd_simulate(
    scenario: &str,
    config: Option<&Path>,
    out: &Path,
    seed: u64,
    tol_profile: &str,
) -> u8 {
    let kind = match scenario {
        "hyperbolic" => ScenarioKind::HyperbolicNeck,
        "elliptic" => ScenarioKind::EllipticNeck,
        other => {
            eprintln!("unknown scenario {other:?} (expected \"hyperbolic\" or \"elliptic\")");
            return 2;
        }
    };
    let cfg: ScenarioConfig = match config {
        Some(path) => {
            let raw = match std::fs::read_to_string(path) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("cannot read config {}: {e}", path.display());
                    return 2;
                }
            };
            match serde_json::from_str(&raw) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("config parse error: {e}");
                    return 2;
                }
            }
        }
        None => ScenarioConfig::bundled(kind),
    };
    if cfg.scenario != kind {
        eprintln!("config scenario does not match --scenario");
        return 2;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return 2;
    }
    let Some(profile) = TolProfile::by_name(tol_profile) else {
        eprintln!("unknown tolerance profile {tol_profile:?}");
        return 2;
    };
    let cfg_hash = fnv1a(serde_json::to_string(&cfg).unwrap().as_bytes());

    let trace = match kind {
        ScenarioKind::HyperbolicNeck => hyperbolic_neck_path(&cfg),
        ScenarioKind::EllipticNeck => elliptic_neck_path(&cfg),
    };
    let trace = match trace {
        Ok(t) => t,
        Err(e @ DegenerationError::ConfigInvalid(_)) => {
            eprintln!("{e}");
            return 2;
        }
        Err(e) => {
            eprintln!("{e}");
            return 3;
        }
    };
    let report = certify_trace(&trace, &profile);
    for line in report.lines() {
        println!("{line}");
    }

    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("cannot create output directory: {e}");
        return 2;
    }
    let header = manifest_line("simulate", seed, cfg_hash);
    let mut csv = String::new();
    csv.push_str(&header);
    csv.push('\n');
    csv.push_str(DegenerationTrace::csv_header());
    csv.push('\n');
    for row in trace.csv_rows() {
        csv.push_str(&row);
        csv.push('\n');
    }
    let mut cert = serde_json::to_value(&report).unwrap();
    cert.as_object_mut().unwrap().insert(
        "manifest".into(),
        serde_json::json!({
            "version": VERSION,
            "seed": seed,
            "config": format!("{cfg_hash:016x}"),
        }),
    );
    let svg = tr2_plot_svg(&trace, &header);
    let writes = [
        std::fs::write(out.join("trace.csv"), csv),
        std::fs::write(
            out.join("certificate.json"),
            serde_json::to_string_pretty(&cert).unwrap(),
        ),
        std::fs::write(out.join("tr2_vs_t.svg"), svg),
    ];
    if writes.iter().any(|w| w.is_err()) {
        eprintln!("failed to write outputs");
        return 2;
    }
    if report.pass {
        0
    } else {
        1
    }
}

/// Simple log-log polyline of |tr² − 4| against t, emitted as plain SVG.
fn tr2_plot_svg(trace: &DegenerationTrace, header: &str) -> String {
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter(|s| s.tr2_gap.norm() > 0.0)
        .map(|s| (s.t.log10(), s.tr2_gap.norm().log10()))
        .collect();
    let (w, h, m) = (640.0, 400.0, 50.0);
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.0), a.1.max(p.0))
    });
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.1), a.1.max(p.1))
    });
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * m);
    let mut poly = String::new();
    for (x, y) in &pts {
        poly.push_str(&format!("{:.2},{:.2} ", sx(*x), sy(*y)));
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\
         <!-- {header} -->\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\
         <text x=\"{:.0}\" y=\"20\" font-size=\"14\">log10 |tr^2 - 4| vs log10 t ({})</text>\
         <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\
         <text x=\"{:.0}\" y=\"{:.0}\" font-size=\"12\">log10 t</text>\
         </svg>\n",
        w / 2.0 - 120.0,
        trace.scenario.tag(),
        poly.trim_end(),
        w / 2.0 - 20.0,
        h - 12.0,
    )
}

fn cmd_flat(surface: &Path, grid: usize) -> u8 {
    let raw = match std::fs::read_to_string(surface) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot read surface {}: {e}", surface.display());
            return 2;
        }
    };
    let parsed: Result<PolygonSurfaceFile, _> = serde_json::from_str(&raw);
    let file = match parsed {
        Ok(f) => f,
        Err(e) => {
            eprintln!("surface parse error: {e}");
            return 2;
        }
    };
    let surface = match PolygonSurface::new(
        file.vertices
            .iter()
            .map(|v| Complex::new(v[0], v[1]))
            .collect(),
        file.pairings,
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let cones = surface.cone_points().expect("validated");
    println!("edges: {}", surface.edge_count());
    for c in &cones {
        println!(
            "cone point at vertex {} (cycle of {}): angle {:.9}",
            c.vertex,
            c.cycle.len(),
            c.angle
        );
    }
    println!("euler characteristic: {}", surface.euler_characteristic().expect("validated"));
    println!("genus: {}", surface.genus().expect("validated"));
    println!(
        "gauss-bonnet residual: {:.3e}",
        surface.gauss_bonnet_residual().expect("validated")
    );
    println!(
        "upper injectivity radius (grid {grid}): {:.9}",
        pinchtrace::flatgeom::upper_injectivity_radius(&surface, grid)
    );
    0
}

#[derive(serde::Deserialize)]
struct PolygonSurfaceFile {
    vertices: Vec<[f64; 2]>,
    pairings: Vec<pinchtrace::flatgeom::EdgePairing>,
}

fn cmd_lift(path: &Path, words: &Path, out: &Path, seed: u64) -> u8 {
    let raw_path = match std::fs::read_to_string(path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot read path {}: {e}", path.display());
            return 2;
        }
    };
    let sampled: SampledPath = match serde_json::from_str(&raw_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("path parse error: {e}");
            return 2;
        }
    };
    let raw_words = match std::fs::read_to_string(words) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot read words {}: {e}", words.display());
            return 2;
        }
    };
    let words: Vec<Word> = match serde_json::from_str(&raw_words) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("words parse error: {e}");
            return 2;
        }
    };
    let cfg_hash = fnv1a(raw_path.as_bytes());
    let opts = LiftOptions::default();
    let (conjugators, lifted, diag) = match lift_path(&sampled, &words, &opts) {
        Ok(r) => r,
        Err(e @ pinchtrace::charvar::CharVarError::NotConvergentInChi(_)) => {
            eprintln!("{e}");
            return 1;
        }
        Err(e) => {
            eprintln!("{e}");
            return 3;
        }
    };
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("cannot create output directory: {e}");
        return 2;
    }
    let header = manifest_line("lift", seed, cfg_hash);
    let mut csv = String::new();
    csv.push_str(&header);
    csv.push('\n');
    csv.push_str("sample,case,pinning_words,residual_drift\n");
    for (k, drift) in diag.residual_drift.iter().enumerate() {
        let pins: Vec<String> = diag
            .pinning_words
            .iter()
            .map(|w| format!("{:?}", w.0))
            .collect();
        csv.push_str(&format!(
            "{},{},{},{:.6e}\n",
            k + 1,
            diag.case.tag(),
            pins.join(";").replace(',', " "),
            drift
        ));
    }
    let manifest = serde_json::json!({
        "version": VERSION,
        "seed": seed,
        "config": format!("{cfg_hash:016x}"),
    });
    let writes = [
        std::fs::write(
            out.join("conjugators.json"),
            serde_json::to_string_pretty(&serde_json::json!({
                "manifest": manifest,
                "conjugators": conjugators,
            }))
            .unwrap(),
        ),
        std::fs::write(
            out.join("lifted.json"),
            serde_json::to_string_pretty(&serde_json::json!({
                "manifest": manifest,
                "path": lifted,
            }))
            .unwrap(),
        ),
        std::fs::write(out.join("diagnostics.csv"), csv),
    ];
    if writes.iter().any(|w| w.is_err()) {
        eprintln!("failed to write outputs");
        return 2;
    }
    println!(
        "lift case {}: cauchy {}, final drift {:.3e}",
        diag.case.tag(),
        diag.cauchy_ok,
        diag.final_drift
    );
    if diag.cauchy_ok {
        0
    } else {
        1
    }
}

fn cmd_classify_cusp(kind: &str, period_re: f64, period_im: f64, tol: f64) -> u8 {
    let end = match kind {
        "shrinking" => EndDescriptor::ShrinkingExpanding,
        "flat" => {
            let c = Complex::new(period_re, period_im);
            if c.norm() == 0.0 {
                eprintln!("flat end requires a nonzero period");
                return 2;
            }
            EndDescriptor::from_flat_period(c)
        }
        other => {
            eprintln!("unknown end kind {other:?} (expected \"shrinking\" or \"flat\")");
            return 2;
        }
    };
    let class = classify_cusp(&end, tol);
    println!("{}", serde_json::to_string(&class).unwrap());
    0
}
