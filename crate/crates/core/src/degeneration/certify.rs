//! Machine-checkable verdicts over a degeneration trace.

use super::config::{ScenarioKind, TolProfile};
use super::trace::DegenerationTrace;
use crate::cp1::CP1;
use crate::mobius::AxisResult;
use serde::{Deserialize, Serialize};

/// One certificate clause with its measured value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The full certificate: clauses (a)–(e) in order, an overall verdict, and
/// the classified axis target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub scenario: ScenarioKind,
    pub clauses: Vec<ClauseReport>,
    pub pass: bool,
    /// "point" or "geodesic".
    pub axis_target: String,
    /// First sample index from which the Jørgensen certificate stays below 1
    /// with a non-elementary witness, if any.
    pub jorgensen_threshold_index: Option<usize>,
    /// Fitted decay exponent of |tr² − 4| against t over the tail.
    pub tr2_rate: f64,
}

impl CertificateReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.clauses.len() + 1);
        for c in &self.clauses {
            out.push(format!(
                "[{}] clause {}: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push(format!(
            "[{}] certificate ({} scenario, axis target {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.scenario.tag(),
            self.axis_target
        ));
        out
    }
}

/// Evaluates the certificate clauses on a trace.
///
/// (a) the neck is never the identity while its tail distance tends to 0;
/// (b) tr² tends to 4 monotonically over the tail with the final gap below
///     tolerance; (c) the axis converges to a point or a geodesic within the
///     drift tolerance; (d) both side restrictions are Cauchy at the tail;
/// (e) the Jørgensen threshold time (required for the elliptic scenario).
pub fn certify_trace(trace: &DegenerationTrace, profile: &TolProfile) -> CertificateReport {
    assert!(!trace.is_empty(), "trace must be nonempty");
    let n = trace.len();
    let tail_start = ((n as f64) * (1.0 - profile.tail_frac)).floor() as usize;
    let samples = &trace.samples;

    // (a) never identity, tail tending to zero: strictly positive floor,
    // decreasing tail, and a genuine drop from the peak.
    let min_dist = samples
        .iter()
        .map(|s| s.neck_dist_identity)
        .fold(f64::INFINITY, f64::min);
    let max_dist = samples
        .iter()
        .map(|s| s.neck_dist_identity)
        .fold(0.0f64, f64::max);
    let final_dist = samples[n - 1].neck_dist_identity;
    let tail_decreasing = samples[tail_start..]
        .windows(2)
        .all(|w| w[1].neck_dist_identity <= w[0].neck_dist_identity + profile.monotone_slack);
    let a_pass =
        min_dist > profile.identity_floor && tail_decreasing && final_dist < 0.5 * max_dist;
    let clause_a = ClauseReport {
        name: "a-neck-never-identity".into(),
        pass: a_pass,
        detail: format!(
            "min distance {min_dist:.3e} > {:.1e}, tail decreasing: {tail_decreasing}, final {final_dist:.3e} vs peak {max_dist:.3e}",
            profile.identity_floor
        ),
    };

    // (b) tr² → 4, monotone over the tail, with a fitted rate.
    let gaps: Vec<f64> = samples.iter().map(|s| s.tr2_gap.norm()).collect();
    let final_gap = gaps[n - 1];
    let monotone = gaps[tail_start..]
        .windows(2)
        .all(|w| w[1] <= w[0] + profile.monotone_slack);
    let b_pass = final_gap < profile.tr2_tol && monotone;
    let tr2_rate = fit_rate(
        &samples[tail_start..].iter().map(|s| s.t).collect::<Vec<_>>(),
        &gaps[tail_start..],
    );
    let clause_b = ClauseReport {
        name: "b-trace-limit".into(),
        pass: b_pass,
        detail: format!(
            "|tr²−4| final {final_gap:.3e} (tol {:.1e}), tail monotone: {monotone}, rate t^{tr2_rate:.2}",
            profile.tr2_tol
        ),
    };

    // (c) axis dichotomy.
    let endpoints = |s: &super::trace::TraceSample| -> Option<(CP1, CP1)> {
        match &s.axis {
            AxisResult::Geodesic(g) => Some((g.p, g.q)),
            AxisResult::Point(p) => Some((*p, *p)),
            AxisResult::Undefined => None,
        }
    };
    let (axis_target, c_pass, c_detail) = match (endpoints(&samples[n - 1]), endpoints(&samples[n - 2])) {
        (Some((p1, q1)), Some((p0, q0))) => {
            let to_point = match trace.axis_point_hint {
                Some(hint) => p1.chordal(&hint).max(q1.chordal(&hint)),
                None => p1.chordal(&q1),
            };
            if to_point < profile.axis_tol {
                (
                    "point".to_string(),
                    true,
                    format!("both endpoints within {to_point:.3e} of the limit point"),
                )
            } else {
                let drift = p1.chordal(&p0).min(p1.chordal(&q0))
                    .max(q1.chordal(&q0).min(q1.chordal(&p0)));
                (
                    "geodesic".to_string(),
                    drift < profile.axis_tol,
                    format!("endpoint drift {drift:.3e} (tol {:.1e})", profile.axis_tol),
                )
            }
        }
        _ => ("undefined".to_string(), false, "axis undefined at the tail".into()),
    };
    let clause_c = ClauseReport { name: "c-axis-dichotomy".into(), pass: c_pass, detail: c_detail };

    // (d) side restrictions Cauchy at the tail (drifts of the normalized
    // restrictions; NaN entries mean no previous sample and are skipped).
    let side_max = |idx: usize| -> f64 {
        samples[tail_start.max(1)..]
            .iter()
            .map(|s| s.side_drift[idx])
            .filter(|d| d.is_finite())
            .fold(0.0f64, f64::max)
    };
    let (d1, d2) = (side_max(0), side_max(1));
    let d_pass = d1 < profile.side_tol && d2 < profile.side_tol;
    let clause_d = ClauseReport {
        name: "d-side-cauchy".into(),
        pass: d_pass,
        detail: format!("tail drift side1 {d1:.3e}, side2 {d2:.3e} (tol {:.1e})", profile.side_tol),
    };

    // (e) Jørgensen threshold.
    let mut threshold: Option<usize> = None;
    for k in 0..n {
        let fires = samples[k..]
            .iter()
            .all(|s| s.jorgensen_min.is_some_and(|j| j < 1.0));
        if fires {
            threshold = Some(k);
            break;
        }
    }
    let e_required = trace.scenario == ScenarioKind::EllipticNeck;
    let e_pass = !e_required || threshold.is_some();
    let clause_e = ClauseReport {
        name: "e-jorgensen-threshold".into(),
        pass: e_pass,
        detail: match threshold {
            Some(k) => format!("certificate < 1 from sample {k} (t = {:.3})", samples[k].t),
            None => "certificate never fires".into(),
        },
    };

    let clauses = vec![clause_a, clause_b, clause_c, clause_d, clause_e];
    let pass = clauses.iter().all(|c| c.pass);
    CertificateReport {
        scenario: trace.scenario,
        clauses,
        pass,
        axis_target,
        jorgensen_threshold_index: threshold,
        tr2_rate,
    }
}

/// Least-squares slope of log(gap) against log(t).
fn fit_rate(ts: &[f64], gaps: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(gaps.iter())
        .filter(|(_, g)| **g > 0.0)
        .map(|(t, g)| (t.ln(), g.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return f64::NAN;
    }
    (n * sxy - sx * sy) / denom
}
