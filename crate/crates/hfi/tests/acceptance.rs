//! The thirteen acceptance criteria. Each prints one PASS/FAIL line with its
//! runtime; the test fails if any criterion fails or exceeds its time budget.

use std::process::Command;
use std::time::{Duration, Instant};

use hfi_core::collision::{first_nonorigin, trace_first_collision_vs_depth};
use hfi_core::dispersion::{symmetric_grid, BranchMirror, Nonlinearity};
use hfi_core::dsl::{parse, validate_oddness, BinOp, Expr, Func};
use hfi_core::elliptic::{jacobi_sncndn, ClosedForm};
use hfi_core::hill::{
    bubble_offset, detect_bubbles, full_spectrum, zero_amplitude_check, MuGrid,
    DEFAULT_BUBBLE_THRESHOLD,
};
use hfi_core::krein::{
    bw_signature, canonical_factor, classify, scalar_opposite, KreinFormula,
};
use hfi_core::models::builtin_ids;
use hfi_core::waves::{bw_flat_state_analysis, solve_wave, WaveOptions};
use hfi_core::{
    builtin, find_collisions, CollisionEvent, CollisionOptions, CustomModel, ModelParams,
    ModelSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn model(id: &str, pairs: &[(&str, f64)]) -> ModelSpec {
    let mut p = ModelParams::new();
    for &(k, v) in pairs {
        p.set(k, v).unwrap();
    }
    builtin(id, &p).unwrap()
}

fn collisions(m: &ModelSpec, n_max: u32) -> Vec<CollisionEvent> {
    let c = m.bifurcation_speed(1, 1).unwrap();
    find_collisions(m, c, n_max, &CollisionOptions::default()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sine_gordon_collision() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_hfi"))
        .args(["collide", "--model", "sine-gordon", "--N", "1", "--n-max", "5"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let mu = (10f64.sqrt() - 3.0) / 2.0;
    let lam = 5f64.sqrt() / 2.0;
    let best = v["events"]
        .as_array()
        .ok_or("no events array")?
        .iter()
        .map(|e| {
            let dmu = (e["mu"].as_f64().unwrap() - mu).abs();
            let dl = (e["lambda_im"].as_f64().unwrap() - lam)
                .abs()
                .max(e["lambda_re"].as_f64().unwrap().abs());
            (dmu, dl)
        })
        .min_by(|a, b| a.0.max(a.1).total_cmp(&b.0.max(b.1)))
        .ok_or("no events")?;
    ensure(best.0 <= 1e-9 && best.1 <= 1e-9, || format!("closest event off by {best:?}"))?;
    Ok(format!("|dmu| = {:.1e}, |dlambda| = {:.1e}", best.0, best.1))
}

fn deep_water_asymptote() -> Check {
    let deep = collisions(&model("water-waves-deep", &[]), 10);
    let first = first_nonorigin(&deep).ok_or("no non-origin collision in deep water")?;
    let d = (first.lambda.im - 0.75).abs();
    ensure(d <= 1e-10, || format!("deep water Im lambda = {}", first.lambda.im))?;
    let trace = trace_first_collision_vs_depth(1.0, &[100.0], 10).map_err(|e| e.to_string())?;
    let f = (trace[0].1 - 0.75).abs();
    ensure(f <= 1e-2, || format!("h = 100: Im lambda = {}", trace[0].1))?;
    Ok(format!("deep {:.1e} off, h=100 {:.1e} off", d, f))
}

fn negative_results() -> Check {
    let mut msg = Vec::new();
    for (id, pairs, n_max) in [
        ("gkdv", &[][..], 20),
        ("whitham", &[("g", 1.0), ("h", 1.0)][..], 50),
    ] {
        let ev = collisions(&model(id, pairs), n_max);
        let nonorigin = ev.iter().filter(|e| !e.at_origin).count();
        ensure(nonorigin == 0, || format!("{id}: {nonorigin} non-origin collisions"))?;
        msg.push(format!("{id}: {} origin events", ev.len()));
    }
    Ok(msg.join(", "))
}

fn gkdv_ellipse() -> Check {
    let mut found = Vec::new();
    for k in -50i64..=50 {
        for l in -50i64..=50 {
            if l != 0 && l * l + 3 * k * l + 3 * k * k - 1 == 0 {
                found.push((k, l));
            }
        }
    }
    found.sort();
    let mut want = vec![(1, -2), (-1, 2), (0, 1), (0, -1), (1, -1), (-1, 1)];
    want.sort();
    ensure(found == want, || format!("integer points {found:?}"))?;
    let m = model("gkdv", &[]);
    for &(k, l) in &found {
        for x in [k, k + l] {
            let w = m.frame_omega(1, x as f64, -1.0).unwrap();
            ensure(w == 0.0, || format!("Omega({x}) = {w}"))?;
        }
    }
    // the collision search agrees: gKdV collisions sit at the origin
    let ev = collisions(&m, 20);
    ensure(ev.iter().all(|e| e.lambda.norm() < 1e-8), || "non-origin gKdV event".into())?;
    Ok(format!("{} points, all with Omega = 0", found.len()))
}

fn opposite_signatures() -> Check {
    let mut count = 0;
    for h in [0.5, 1.0, 2.0] {
        let m = model("water-waves", &[("g", 1.0), ("h", h)]);
        let c = m.bifurcation_speed(1, 1).unwrap();
        let mut ev = collisions(&m, 10);
        classify(&m, &mut ev, c, KreinFormula::Direct).map_err(|e| e.to_string())?;
        let non: Vec<_> = ev.iter().filter(|e| !e.at_origin).collect();
        ensure(!non.is_empty(), || format!("h = {h}: no non-origin collisions"))?;
        for e in non {
            let p = e.signature_product.ok_or("missing product")?;
            ensure(p < 0.0, || format!("h = {h}: product {p} for {e:?}"))?;
            count += 1;
        }
    }
    let m = model("boussinesq-whitham", &[]);
    let v = m.bifurcation_speed(1, 1).unwrap();
    let mut bw = 0;
    for e in collisions(&m, 10).iter().filter(|e| !e.at_origin) {
        let p = bw_signature(&m, e.idx1, v).unwrap() * bw_signature(&m, e.idx2, v).unwrap();
        let k2 = e.idx2.k();
        let w1 = m.omega(e.idx1.l, e.idx1.k()).unwrap();
        let w2 = m.omega(e.idx2.l, k2).unwrap();
        let closed = 4.0 * w1 * w2 * (w2 - k2 * v).powi(2);
        ensure(p < 0.0 && closed < 0.0, || format!("BW product {p} for {e:?}"))?;
        ensure((p - closed).abs() <= 1e-8 * closed.abs(), || format!("BW {p} vs {closed}"))?;
        bw += 1;
    }
    ensure(bw > 0, || "no BW collisions".into())?;
    Ok(format!("{count} water-wave and {bw} BW events, all opposite"))
}

fn formula_equivalence() -> Check {
    let mut models = vec![
        model("sine-gordon", &[]),
        model("water-waves-deep", &[]),
    ];
    for h in [0.5, 1.0, 2.0] {
        models.push(model("water-waves", &[("g", 1.0), ("h", h)]));
    }
    // a canonical system with nonzero odd symbol, not even
    let mut params = ModelParams::new();
    params.set("v", 0.3).unwrap();
    models.push(
        CustomModel {
            kind: "canonical".into(),
            omega1: Some("sign(k)*sqrt(abs(k)*tanh(abs(k))) + v*k".into()),
            omega2: Some("-sign(k)*sqrt(abs(k)*tanh(abs(k))) + v*k".into()),
            c_squared: None,
            params,
            at_zero: None,
        }
        .build()
        .map_err(|e| e.to_string())?,
    );
    let mut checked = 0;
    for m in &models {
        let c = m.bifurcation_speed(1, 1).unwrap();
        for e in collisions(m, 8).iter().filter(|e| !e.at_origin) {
            // each formula fixes the signatures up to a factor common to
            // both modes, so the verdict is the sign of the product
            let sign = |f: KreinFormula| -> Result<f64, String> {
                let a = canonical_factor(m, e.idx1, c, f).map_err(|x| x.to_string())?;
                let b = canonical_factor(m, e.idx2, c, f).map_err(|x| x.to_string())?;
                Ok((a * b).signum())
            };
            let direct = sign(KreinFormula::Direct)?;
            let mut formulas = vec![KreinFormula::FirstRow, KreinFormula::SecondRow];
            if m.even_system {
                formulas.extend([KreinFormula::EvenFirstRow, KreinFormula::EvenSecondRow]);
            }
            for f in formulas {
                let s = sign(f)?;
                ensure(s == direct, || format!("{}: {f:?} sign {s} vs direct {direct} at {e:?}", m.id))?;
            }
            checked += 1;
        }
    }
    ensure(checked > 0, || "no events".into())?;
    Ok(format!("{checked} events across {} models", models.len()))
}

fn zero_amplitude_hill() -> Check {
    let mut worst = 0.0f64;
    for id in builtin_ids() {
        let m = model(id, &[]);
        let c = m.bifurcation_speed(1, 1).unwrap();
        let d = zero_amplitude_check(&m, c, 32, 64).map_err(|e| e.to_string())?;
        ensure(d <= 1e-8, || format!("{id}: {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max Hausdorff distance {worst:.1e}"))
}

fn closed_form_residuals() -> Check {
    let mut worst = 0.0f64;
    for family in [ClosedForm::KdvCnoidal, ClosedForm::MkdvCn, ClosedForm::MkdvSn] {
        for kappa in [0.3, 0.5, 0.8] {
            let r = family.ode_residual(kappa, 256).map_err(|e| e.to_string())?;
            ensure(r <= 1e-8, || format!("{family:?} kappa={kappa}: {r:e}"))?;
            worst = worst.max(r);
        }
        let c = family.speed(0.0).unwrap();
        let w = family.wave(0.0, 32).unwrap();
        let amp = w.coefficients.iter().fold(0.0f64, |s, a| s.max(a.abs()));
        ensure((c + 1.0).abs() <= 1e-10 && amp <= 1e-10, || {
            format!("{family:?} starts at ({c}, {amp})")
        })?;
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn collocation_vs_elliptic() -> Check {
    let exact = ClosedForm::KdvCnoidal.wave(0.3, 64).unwrap();
    let m = model("kdv", &[]);
    let opts = WaveOptions {
        mean: exact.mean(),
        ..WaveOptions::default()
    };
    let w = solve_wave(&m, exact.amplitude, &opts).map_err(|e| e.to_string())?;
    let dc = (w.speed - exact.speed).abs();
    let da = w
        .coefficients
        .iter()
        .zip(&exact.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    ensure(dc <= 1e-8 && da <= 1e-8, || format!("speed {dc:e}, coefficients {da:e}"))?;
    Ok(format!("speed {dc:.1e}, coefficients {da:.1e}"))
}

fn whitham_no_hf() -> Check {
    let m = model("whitham", &[("g", 1.0), ("h", 1.0)]);
    let w = solve_wave(&m, 1e-2, &WaveOptions::default()).map_err(|e| e.to_string())?;
    let spec = full_spectrum(&m, &w, &MuGrid::uniform(500), 64).map_err(|e| e.to_string())?;
    let mut near = 0;
    for (mu, values) in &spec.entries {
        for z in values {
            if z.re > 1e-6 {
                ensure(z.im.abs() < 0.1, || format!("Re {} at Im {} (mu = {mu})", z.re, z.im))?;
                near += 1;
            }
        }
    }
    Ok(format!(
        "{} mu values, max Re {:.1e}, {near} unstable eigenvalues near the origin",
        spec.entries.len(),
        spec.max_real()
    ))
}

fn fifth_order_control() -> Check {
    let m = model("fifth-order-scalar", &[("alpha", 1.0), ("beta", 0.25)]);
    let predictions: Vec<_> = collisions(&m, 10).into_iter().filter(|e| !e.at_origin).collect();
    let opposite = predictions.iter().filter(|e| scalar_opposite(e)).count();
    ensure(opposite >= 1, || "no opposite-signature collision".into())?;
    let opts = WaveOptions {
        modes: 24,
        ..WaveOptions::default()
    };
    let w = solve_wave(&m, 0.05, &opts).map_err(|e| e.to_string())?;
    let mut offsets = Vec::new();
    for count in [200, 400] {
        let spec = full_spectrum(&m, &w, &MuGrid::refined(count, &predictions), 20)
            .map_err(|e| e.to_string())?;
        let best = detect_bubbles(&spec, DEFAULT_BUBBLE_THRESHOLD, &predictions)
            .iter()
            .filter(|b| b.center.im.abs() > 0.1)
            .filter_map(|b| bubble_offset(b, &predictions))
            .fold(f64::INFINITY, f64::min);
        ensure(best <= 5e-2, || format!("{count} mu values: nearest bubble {best}"))?;
        offsets.push(best);
    }
    // the bubble persists under grid refinement
    ensure((offsets[0] - offsets[1]).abs() <= 5e-2, || format!("offsets {offsets:?}"))?;
    Ok(format!("{opposite} opposite collisions, bubble offsets {:.1e} and {:.1e}", offsets[0], offsets[1]))
}

fn bw_flat_state() -> Check {
    let m = model("boussinesq-whitham", &[]);
    let alpha = match m.nonlinearity {
        Some(Nonlinearity::Bw { alpha }) => alpha,
        _ => return Err("no BW nonlinearity".into()),
    };
    ensure(alpha == 1.0, || format!("alpha = {alpha}"))?;
    let pos = bw_flat_state_analysis(&m, 0.1).map_err(|e| e.to_string())?;
    ensure(pos.wellposed && pos.cutoff_k.is_none(), || format!("{pos:?}"))?;
    let neg = bw_flat_state_analysis(&m, -0.1).map_err(|e| e.to_string())?;
    let k = neg.cutoff_k.ok_or("no cutoff")?;
    ensure(!neg.wellposed, || "a = -0.1 reported well-posed".into())?;
    let (g, h) = (m.params.get("g").unwrap(), m.params.get("h").unwrap());
    let r = (2.0 * -0.1 + g * (k * h).tanh() / k).abs();
    ensure(r <= 1e-10, || format!("cutoff {k}: residual {r:e}"))?;
    Ok(format!("cutoff k = {k:.12}, residual {r:.1e}"))
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            Expr::Num(rng.gen_range(0.0..1e4) / 10f64.powi(rng.gen_range(0..8)))
        } else {
            Expr::Var(["k", "g", "h", "alpha"][rng.gen_range(0..4)].into())
        };
    }
    match rng.gen_range(0..3) {
        0 => Expr::neg(random_expr(rng, depth - 1)),
        1 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.gen_range(0..5)];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
        _ => Expr::call(Func::ALL[rng.gen_range(0..Func::ALL.len())], random_expr(rng, depth - 1)),
    }
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10_000 {
        let u = rng.gen_range(-40.0..40.0);
        let kappa = rng.gen_range(0.0..0.999);
        let (s, c, d) = jacobi_sncndn(u, kappa).map_err(|e| e.to_string())?;
        let e1 = (s * s + c * c - 1.0).abs();
        let e2 = (d * d + kappa * kappa * s * s - 1.0).abs();
        ensure(e1 <= 1e-12 && e2 <= 1e-12, || format!("u={u} kappa={kappa}: {e1:e} {e2:e}"))?;
    }
    for _ in 0..10_000 {
        let e = random_expr(&mut rng, 6);
        let text = e.to_string();
        let back = parse(&text).map_err(|x| format!("{text}: {x}"))?;
        ensure(back == e, || format!("round trip changed {text}"))?;
    }
    let grid = symmetric_grid(20.0, 400);
    let symbols = [
        ("gkdv", 1, "-k^3"),
        ("whitham", 1, "sign(k)*sqrt(g*abs(k)*tanh(abs(k)*h))"),
        ("fifth-order-scalar", 1, "k^3*(alpha - beta*k^2)"),
        ("water-waves", 1, "sign(k)*sqrt(g*k*tanh(k*h))"),
        ("water-waves-deep", 2, "-sign(k)*sqrt(g*abs(k))"),
        ("boussinesq-whitham", 1, "sign(k)*sqrt(g*k*tanh(k*h))"),
        ("sine-gordon", 1, "sqrt(1 + k^2)"),
        ("sine-gordon", 2, "-sqrt(1 + k^2)"),
    ];
    for (id, l, text) in symbols {
        let m = model(id, &[]);
        let e = parse(text).unwrap();
        for &k in &grid {
            let native = m.omega(l, k).unwrap();
            let v = e.evaluate(k, &m.params).unwrap();
            ensure((native - v).abs() <= 1e-12 * native.abs().max(1.0), || {
                format!("{id}: `{text}` differs from the model at k = {k}")
            })?;
        }
        let odd = validate_oddness(&e, &m.params, &grid).unwrap().is_odd;
        ensure(odd == (m.mirror == BranchMirror::Same), || {
            format!("{id} branch {l}: classified odd = {odd}")
        })?;
    }
    Ok("10^4 Jacobi samples, 10^4 round trips, 8 symbols classified".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Check); 13] = [
        ("Sine-Gordon collision", 1, sine_gordon_collision),
        ("Deep-water asymptote", 5, deep_water_asymptote),
        ("Negative results", 10, negative_results),
        ("gKdV ellipse oracle", 1, gkdv_ellipse),
        ("Opposite-signature theorems", 10, opposite_signatures),
        ("Signature formula equivalence", 5, formula_equivalence),
        ("Zero-amplitude Hill consistency", 30, zero_amplitude_hill),
        ("Closed-form wave residuals", 5, closed_form_residuals),
        ("Collocation vs elliptic", 10, collocation_vs_elliptic),
        ("Whitham no-HF numerics", 300, whitham_no_hf),
        ("Scalar positive control", 300, fifth_order_control),
        ("BW flat-state dichotomy", 1, bw_flat_state),
        ("Elliptic/parser property suites", 30, property_suites),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget} s"))
            }
            r => r,
        };
        match &result {
            Ok(msg) => println!("PASS {:>2} {name} ({elapsed:.2?}): {msg}", i + 1),
            Err(msg) => {
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {msg}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
