use hfi_core::collision::{first_nonorigin, trace_first_collision_vs_depth};
use hfi_core::krein::{
    canonical_factor, canonical_opposite, scalar_opposite, KreinFormula, PipelineOptions,
};
use hfi_core::{builtin, find_collisions, run_pipeline, CollisionOptions, ModelParams, OverallVerdict, Verdict};

fn params(pairs: &[(&str, f64)]) -> ModelParams {
    let mut p = ModelParams::new();
    for &(k, v) in pairs {
        p.set(k, v).unwrap();
    }
    p
}

#[test]
fn sine_gordon_explicit_collision() {
    let m = builtin("sine-gordon", &ModelParams::new()).unwrap();
    let c = m.bifurcation_speed(1, 1).unwrap();
    let events = find_collisions(&m, c, 5, &CollisionOptions::default()).unwrap();
    let mu = (10f64.sqrt() - 3.0) / 2.0;
    let lam = 5f64.sqrt() / 2.0;
    let hit = events
        .iter()
        .find(|e| (e.mu - mu).abs() < 1e-9 && (e.lambda.im - lam).abs() < 1e-9 && e.lambda.re.abs() < 1e-9);
    assert!(hit.is_some(), "{events:#?}");
}

#[test]
fn deep_water_first_collision_is_three_quarters() {
    let m = builtin("water-waves-deep", &ModelParams::new()).unwrap();
    let c = m.bifurcation_speed(1, 1).unwrap();
    let events = find_collisions(&m, c, 10, &CollisionOptions::default()).unwrap();
    let first = first_nonorigin(&events).unwrap();
    assert!((first.lambda.im - 0.75).abs() < 1e-10, "{first:?}");
    let trace = trace_first_collision_vs_depth(1.0, &[100.0], 10).unwrap();
    assert!((trace[0].1 - 0.75).abs() < 1e-2, "{trace:?}");
}

#[test]
fn scalar_models_without_high_frequency_collisions() {
    for (id, n_max) in [("gkdv", 20), ("whitham", 50)] {
        let m = builtin(id, &ModelParams::new()).unwrap();
        let c = m.bifurcation_speed(1, 1).unwrap();
        let events = find_collisions(&m, c, n_max, &CollisionOptions::default()).unwrap();
        assert!(events.iter().all(|e| e.at_origin), "{id}: {events:#?}");
        let r = run_pipeline(&m, 1, n_max, &PipelineOptions::default()).unwrap();
        assert_eq!(r.overall, OverallVerdict::HfInstabilityExcluded);
    }
}

#[test]
fn fifth_order_has_opposite_signature_collisions() {
    let m = builtin("fifth-order-scalar", &ModelParams::new()).unwrap();
    let r = run_pipeline(&m, 1, 10, &PipelineOptions::default()).unwrap();
    let opposite: Vec<_> = r.events.iter().filter(|e| !e.at_origin && scalar_opposite(e)).collect();
    assert!(!opposite.is_empty(), "{:#?}", r.events);
    assert!(opposite
        .iter()
        .all(|e| e.verdict == Some(Verdict::PotentialInstability)));
    assert_eq!(r.overall, OverallVerdict::HfInstabilityPossible);
    let want: [(f64, f64); 2] = [(0.2071149, 0.212841), (0.3675445, 0.227684)];
    for (mu, im) in want {
        assert!(
            opposite.iter().any(|e| (e.mu.abs() - mu.abs()).abs() < 1e-6 && (e.lambda.im - im).abs() < 1e-6),
            "{mu} {im}: {opposite:#?}"
        );
    }
}

#[test]
fn water_waves_and_bw_collisions_have_opposite_signatures() {
    for h in [0.5, 1.0, 2.0] {
        let m = builtin("water-waves", &params(&[("g", 1.0), ("h", h)])).unwrap();
        let r = run_pipeline(&m, 1, 10, &PipelineOptions::default()).unwrap();
        let nonorigin: Vec<_> = r.events.iter().filter(|e| !e.at_origin).collect();
        assert!(!nonorigin.is_empty());
        for e in nonorigin {
            assert!(e.signature_product.unwrap() < 0.0, "h={h}: {e:?}");
            let c = r.speed;
            for f in KreinFormula::ALL {
                assert!(canonical_opposite(&m, e, c, f).unwrap(), "{f:?} {e:?}");
            }
        }
        assert_eq!(r.overall, OverallVerdict::HfInstabilityPossible);
    }
    let m = builtin("boussinesq-whitham", &ModelParams::new()).unwrap();
    let r = run_pipeline(&m, 1, 10, &PipelineOptions::default()).unwrap();
    assert!(r.events.iter().any(|e| !e.at_origin));
    for e in r.events.iter().filter(|e| !e.at_origin) {
        assert!(e.signature_product.unwrap() < 0.0, "{e:?}");
    }
    let sg = builtin("sine-gordon", &ModelParams::new()).unwrap();
    let r = run_pipeline(&sg, 1, 5, &PipelineOptions::default()).unwrap();
    assert_eq!(r.overall, OverallVerdict::HfInstabilityPossible);
    for e in r.events.iter().filter(|e| !e.at_origin) {
        for f in KreinFormula::ALL {
            let a = canonical_factor(&sg, e.idx1, r.speed, f).unwrap();
            let b = canonical_factor(&sg, e.idx2, r.speed, f).unwrap();
            assert!(a * b < 0.0, "{f:?} {e:?}");
        }
    }
}
