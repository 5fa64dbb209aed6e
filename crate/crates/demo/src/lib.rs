//! Browser demo: a thin wasm-bindgen layer over the core library exposing
//! three interactive operations — Möbius classification, the flat-cylinder
//! holonomy explorer, and small degeneration runs plotted as SVG.

use pinchtrace::cp1::Complex;
use pinchtrace::degeneration::{
    certify_trace, elliptic_neck_path, hyperbolic_neck_path, ScenarioConfig, ScenarioKind,
    TolProfile,
};
use pinchtrace::epstein::cylinder_holonomy;
use pinchtrace::flatgeom::{classify_cusp, EndDescriptor};
use pinchtrace::mobius::{AxisResult, MobiusMap};
use wasm_bindgen::prelude::wasm_bindgen;

/// Classifies the Möbius map with the given entries; returns a JSON object
/// with the normalized matrix, class, fixed points, and complex length.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn classify_mobius(
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    c_re: f64,
    c_im: f64,
    d_re: f64,
    d_im: f64,
) -> String {
    let m = match MobiusMap::new(
        Complex::new(a_re, a_im),
        Complex::new(b_re, b_im),
        Complex::new(c_re, c_im),
        Complex::new(d_re, d_im),
    ) {
        Ok(m) => m,
        Err(e) => return serde_json::json!({ "error": e.to_string() }).to_string(),
    };
    let class = m.classify_default();
    let fixed: Vec<String> = m
        .fixed_points()
        .map(|pts| pts.iter().map(|p| p.to_string()).collect())
        .unwrap_or_default();
    let length = m.complex_length().ok().map(|z| [z.re, z.im]);
    let axis = match m.axis() {
        AxisResult::Geodesic(g) => format!("geodesic {} -> {}", g.p, g.q),
        AxisResult::Point(p) => format!("point {p}"),
        AxisResult::Undefined => "undefined".to_string(),
    };
    serde_json::json!({
        "matrix": serde_json::to_value(m).unwrap(),
        "class": format!("{class:?}"),
        "fixed_points": fixed,
        "complex_length": length,
        "axis": axis,
    })
    .to_string()
}

/// Explores the exact flat-cylinder holonomy for a core period c: returns
/// the induced Möbius class, its complex length against the √2·c rule, and
/// the matching cusp classification.
#[wasm_bindgen]
pub fn explore_cylinder(period_re: f64, period_im: f64) -> String {
    let c = Complex::new(period_re, period_im);
    let h = match cylinder_holonomy(c) {
        Ok(h) => h,
        Err(e) => return serde_json::json!({ "error": e.to_string() }).to_string(),
    };
    let class = h.classify_default();
    let length = h.complex_length().ok().map(|z| [z.re, z.im]);
    let cusp = classify_cusp(&EndDescriptor::from_flat_period(c), 1e-9);
    serde_json::json!({
        "holonomy_class": format!("{class:?}"),
        "complex_length": length,
        "sqrt2_c": [std::f64::consts::SQRT_2 * c.re, std::f64::consts::SQRT_2 * c.im],
        "cusp_class": serde_json::to_value(&cusp).unwrap(),
    })
    .to_string()
}

/// Runs a reduced degeneration scenario and returns an SVG plot of
/// log₁₀|tr² − 4| against log₁₀ t together with the certificate verdicts.
#[wasm_bindgen]
pub fn run_scenario(scenario: &str, samples: usize) -> String {
    let kind = match scenario {
        "hyperbolic" => ScenarioKind::HyperbolicNeck,
        "elliptic" => ScenarioKind::EllipticNeck,
        other => {
            return serde_json::json!({ "error": format!("unknown scenario {other}") })
                .to_string()
        }
    };
    let mut cfg = ScenarioConfig::bundled(kind);
    let n = samples.clamp(8, 64);
    cfg.times = ScenarioConfig::geometric_times(n, 25.0, 400.0);
    let trace = match kind {
        ScenarioKind::HyperbolicNeck => hyperbolic_neck_path(&cfg),
        ScenarioKind::EllipticNeck => elliptic_neck_path(&cfg),
    };
    let trace = match trace {
        Ok(t) => t,
        Err(e) => return serde_json::json!({ "error": e.to_string() }).to_string(),
    };
    let report = certify_trace(&trace, &TolProfile::default_profile());
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter(|s| s.tr2_gap.norm() > 0.0)
        .map(|s| (s.t.log10(), s.tr2_gap.norm().log10()))
        .collect();
    let (w, h, m) = (480.0, 300.0, 40.0);
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (y0, y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * m);
    let mut poly = String::new();
    for (x, y) in &pts {
        poly.push_str(&format!("{:.2},{:.2} ", sx(*x), sy(*y)));
    }
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\
         <rect width=\"{w}\" height=\"{h}\" fill=\"#fbfbfb\"/>\
         <polyline points=\"{}\" fill=\"none\" stroke=\"#23538a\" stroke-width=\"2\"/>\
         <text x=\"12\" y=\"18\" font-size=\"12\">log10 |tr^2-4| vs log10 t</text></svg>",
        poly.trim_end()
    );
    serde_json::json!({
        "svg": svg,
        "pass": report.pass,
        "axis_target": report.axis_target,
        "clauses": report.lines(),
    })
    .to_string()
}
