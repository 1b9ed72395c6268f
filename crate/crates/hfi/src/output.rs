//! JSON and CSV emission. Every float is written with 17 significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use hfi_core::collision::CurvePoint;
use hfi_core::hill::{Bubble, SpectrumSet};
use hfi_core::krein::AnalysisReport;
use hfi_core::{CollisionEvent, TravelingWave};
use serde::Deserialize;
use serde_json::{json, Number, Value};

use crate::CliError;

pub fn float(x: f64) -> String {
    // + 0.0 turns -0 into 0
    format!("{:.16e}", x + 0.0)
}

/// A JSON number token for finite `x`, `null` otherwise.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&float(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn event(e: &CollisionEvent) -> Value {
    json!({
        "n1": e.idx1.n,
        "l1": e.idx1.l,
        "n2": e.idx2.n,
        "l2": e.idx2.l,
        "mu": num(e.mu),
        "lambda_re": num(e.lambda.re),
        "lambda_im": num(e.lambda.im),
        "at_origin": e.at_origin,
        "signature_product": opt(e.signature_product),
        "verdict": e.verdict.map(|v| v.as_str()),
    })
}

pub fn report(r: &AnalysisReport) -> Value {
    json!({
        "model": r.model,
        "N": r.n,
        "branch": r.branch,
        "speed": num(r.speed),
        "events": r.events.iter().map(event).collect::<Vec<_>>(),
        "overall": r.overall.as_str(),
        "counts": {
            "events": r.counts.events,
            "origin": r.counts.origin,
            "potential_instability": r.counts.potential_instability,
            "no_instability": r.counts.no_instability,
            "indeterminate": r.counts.indeterminate,
        },
        "diagnostics": {
            "pairing_violation": num(r.diagnostics.pairing_violation),
            "slice_max_re": num(r.diagnostics.slice_max_re),
            "slice_len": r.diagnostics.slice_len,
            "n_max": r.diagnostics.n_max,
            "grid_points": r.diagnostics.grid_points,
        },
    })
}

pub fn collisions(model: &str, n: u32, speed: f64, events: &[CollisionEvent]) -> Value {
    json!({
        "model": model,
        "N": n,
        "speed": num(speed),
        "events": events.iter().map(event).collect::<Vec<_>>(),
    })
}

pub fn wave(w: &TravelingWave) -> Value {
    json!({
        "model": w.model,
        "c": num(w.speed),
        "coefficients": w.coefficients.iter().map(|&a| num(a)).collect::<Vec<_>>(),
        "amplitude": num(w.amplitude),
        "integration_constant": num(w.integration_constant),
        "residual": num(w.residual),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveFile {
    model: String,
    c: f64,
    coefficients: Vec<f64>,
    amplitude: f64,
    #[serde(default)]
    integration_constant: f64,
    residual: f64,
}

pub fn parse_wave(text: &str) -> Result<TravelingWave, CliError> {
    let w: WaveFile = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!(
            "invalid wave file at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if w.coefficients.len() < 2 {
        return Err(CliError::Config("wave file needs coefficients a_0 and a_1".into()));
    }
    Ok(TravelingWave {
        model: w.model,
        speed: w.c,
        coefficients: w.coefficients,
        amplitude: w.amplitude,
        integration_constant: w.integration_constant,
        residual: w.residual,
    })
}

pub fn spectrum_csv(s: &SpectrumSet) -> String {
    let mut out = String::from("mu,re_lambda,im_lambda\n");
    for (mu, values) in &s.entries {
        for z in values {
            let _ = writeln!(out, "{},{},{}", float(*mu), float(z.re), float(z.im));
        }
    }
    out
}

pub struct BubbleReport<'a> {
    pub spectrum: &'a SpectrumSet,
    pub bubbles: &'a [Bubble],
    pub predictions: &'a [CollisionEvent],
    pub threshold: f64,
    pub zero_amplitude_deviation: Option<f64>,
    pub truncation_tail: f64,
}

pub fn bubbles(r: &BubbleReport<'_>) -> Value {
    let items: Vec<Value> = r
        .bubbles
        .iter()
        .map(|b| {
            json!({
                "center_re": num(b.center.re),
                "center_im": num(b.center.im),
                "max_growth": num(b.max_growth),
                "mu_min": num(b.mu_support.0),
                "mu_max": num(b.mu_support.1),
                "points": b.points,
                "nearest_collision": b.nearest_collision,
            })
        })
        .collect();
    json!({
        "model": r.spectrum.model,
        "M": r.spectrum.modes,
        "mu_values": r.spectrum.entries.len(),
        "threshold": num(r.threshold),
        "max_real": num(r.spectrum.max_real()),
        "truncation_tail": num(r.truncation_tail),
        "zero_amplitude_deviation": opt(r.zero_amplitude_deviation),
        "predictions": r.predictions.iter().map(event).collect::<Vec<_>>(),
        "bubbles": items,
    })
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("l,n,k,omega\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.l, p.n, float(p.k), float(p.value));
    }
    out
}

pub fn depth_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("h,im_lambda\n");
    for &(h, im) in rows {
        let _ = writeln!(out, "{},{}", float(h), float(im));
    }
    out
}
