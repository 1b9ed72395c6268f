//! Collisions of zero-amplitude eigenvalues within one Floquet class.
//!
//! Modes `(n₁, l₁)` and `(n₂, l₂)` collide at `μ` when
//! `Ω_{l₁}(n₁ + μ) = Ω_{l₂}(n₂ + μ)`. Roots in `μ` are bracketed on a uniform
//! grid over `[-1/2, 1/2]` and refined by bisection, so no derivative of `ω`
//! is needed. Roots of even multiplicity are only caught when the residual at
//! a grid node is already below the tolerance.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::dispersion::{normalize_mu, ModeIndex, ModelError, ModelSpec};
use crate::math::round;
use crate::models::BuiltinModel;
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    NoInstabilityPossible,
    PotentialInstability,
    IndeterminateOrigin,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoInstabilityPossible => "no-instability-possible",
            Verdict::PotentialInstability => "potential-instability",
            Verdict::IndeterminateOrigin => "indeterminate-origin",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionEvent {
    pub idx1: ModeIndex,
    pub idx2: ModeIndex,
    pub mu: f64,
    pub lambda: Complex64,
    pub at_origin: bool,
    /// Product of the two Krein signature values; set by the `krein` module.
    pub signature_product: Option<f64>,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionOptions {
    /// Number of grid intervals over `[-1/2, 1/2]`.
    pub grid_points: usize,
    pub residual_tol: f64,
    pub lambda_tol: f64,
}

impl Default for CollisionOptions {
    fn default() -> Self {
        CollisionOptions {
            grid_points: 1024,
            residual_tol: 1e-8,
            lambda_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CollisionError {
    SameMode,
    InvalidOptions(&'static str),
    NoCollisionFound { h: f64 },
    Model(ModelError),
}

impl fmt::Display for CollisionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollisionError::SameMode => f.write_str("a mode cannot collide with itself"),
            CollisionError::InvalidOptions(msg) => f.write_str(msg),
            CollisionError::NoCollisionFound { h } => write!(
                f,
                "no collision away from the origin found at depth h = {h}; increase n_max"
            ),
            CollisionError::Model(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for CollisionError {}

impl From<ModelError> for CollisionError {
    fn from(e: ModelError) -> Self {
        CollisionError::Model(e)
    }
}

/// `Ω_{l₁}(n₁ + μ) − Ω_{l₂}(n₂ + μ)`.
pub fn collision_residual(
    model: &ModelSpec,
    n1: i64,
    l1: u8,
    n2: i64,
    l2: u8,
    mu: f64,
    c: f64,
) -> Result<f64, CollisionError> {
    if n1 == n2 && l1 == l2 {
        return Err(CollisionError::SameMode);
    }
    Ok(model.frame_omega(l1, n1 as f64 + mu, c)? - model.frame_omega(l2, n2 as f64 + mu, c)?)
}

/// One pair of modes to search: `n1 > n2`, or `n1 == n2` with `l1 < l2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModePair {
    pub n1: i64,
    pub l1: u8,
    pub n2: i64,
    pub l2: u8,
}

/// Precomputed `Ω_l(n + μ_i)` on the scan grid, shared by all pair searches.
#[derive(Clone, Debug)]
pub struct CollisionSearch<'a> {
    model: &'a ModelSpec,
    c: f64,
    n_max: i64,
    opts: CollisionOptions,
    table: Vec<f64>,
}

impl<'a> CollisionSearch<'a> {
    pub fn new(
        model: &'a ModelSpec,
        c: f64,
        n_max: u32,
        opts: CollisionOptions,
    ) -> Result<Self, CollisionError> {
        if n_max < 1 {
            return Err(CollisionError::InvalidOptions("n_max must be at least 1"));
        }
        if opts.grid_points < 2 {
            return Err(CollisionError::InvalidOptions("grid_points must be at least 2"));
        }
        let n_max = n_max as i64;
        let g = opts.grid_points;
        let mut table = Vec::with_capacity(model.branch_count() as usize * (2 * n_max as usize + 1) * (g + 1));
        for l in model.branch_indices() {
            for n in -n_max..=n_max {
                for i in 0..=g {
                    table.push(model.frame_omega(l, n as f64 + grid_mu(i, g), c)?);
                }
            }
        }
        Ok(CollisionSearch {
            model,
            c,
            n_max,
            opts,
            table,
        })
    }

    fn row(&self, n: i64, l: u8) -> &[f64] {
        let g = self.opts.grid_points + 1;
        let per_branch = (2 * self.n_max as usize + 1) * g;
        let start = (l as usize - 1) * per_branch + (n + self.n_max) as usize * g;
        &self.table[start..start + g]
    }

    pub fn pairs(&self) -> Vec<ModePair> {
        let mut out = Vec::new();
        for n1 in -self.n_max..=self.n_max {
            for n2 in -self.n_max..=n1 {
                for l1 in self.model.branch_indices() {
                    for l2 in self.model.branch_indices() {
                        if n1 > n2 || l1 < l2 {
                            out.push(ModePair { n1, l1, n2, l2 });
                        }
                    }
                }
            }
        }
        out
    }

    fn residual(&self, p: ModePair, mu: f64) -> Result<f64, CollisionError> {
        collision_residual(self.model, p.n1, p.l1, p.n2, p.l2, mu, self.c)
    }

    /// All roots in `μ` for one pair, before deduplication.
    pub fn search_pair(&self, p: ModePair) -> Result<Vec<CollisionEvent>, CollisionError> {
        let g = self.opts.grid_points;
        let a = self.row(p.n1, p.l1);
        let b = self.row(p.n2, p.l2);
        let r: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mut roots = Vec::new();
        for i in 0..=g {
            if r[i] == 0.0 {
                roots.push(grid_mu(i, g));
                continue;
            }
            if i < g && r[i + 1] != 0.0 && (r[i] < 0.0) != (r[i + 1] < 0.0) {
                roots.push(self.bisect(p, grid_mu(i, g), grid_mu(i + 1, g), r[i])?);
                continue;
            }
            // Touching root: a local minimum of |r| already within tolerance.
            let left_change = i > 0 && r[i - 1] != 0.0 && (r[i - 1] < 0.0) != (r[i] < 0.0);
            let right_change = i < g && r[i + 1] != 0.0 && (r[i + 1] < 0.0) != (r[i] < 0.0);
            if r[i].abs() <= self.opts.residual_tol
                && !left_change
                && !right_change
                && (i == 0 || r[i].abs() <= r[i - 1].abs())
                && (i == g || r[i].abs() <= r[i + 1].abs())
            {
                roots.push(grid_mu(i, g));
            }
        }
        let mut events = Vec::new();
        for mu in roots {
            let res = self.residual(p, mu)?;
            if res.abs() > self.opts.residual_tol {
                continue;
            }
            let (mu_n, shift) = normalize_mu(mu);
            let idx1 = ModeIndex::new(p.n1 + shift, mu_n, p.l1)?;
            let idx2 = ModeIndex::new(p.n2 + shift, mu_n, p.l2)?;
            let lambda = self.model.zero_amp_eigenvalue(idx1, self.c)?;
            events.push(CollisionEvent {
                idx1,
                idx2,
                mu: mu_n,
                lambda,
                at_origin: lambda.norm() < self.opts.lambda_tol,
                signature_product: None,
                verdict: None,
            });
        }
        Ok(events)
    }

    fn bisect(&self, p: ModePair, mut lo: f64, mut hi: f64, r_lo: f64) -> Result<f64, CollisionError> {
        let lo_negative = r_lo < 0.0;
        for _ in 0..200 {
            if hi - lo <= 1e-13 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.residual(p, mid)?;
            if r == 0.0 {
                return Ok(mid);
            }
            if (r < 0.0) == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (rl, rh) = (self.residual(p, lo)?, self.residual(p, hi)?);
        Ok(if rl.abs() <= rh.abs() { lo } else { hi })
    }

    /// Deduplicates by `(λ, μ)` rounded to `1e-9`, keeps `Im λ ≥ 0` (origin
    /// events within `lambda_tol`), and sorts by `(Im λ, μ, n₁)`. The result
    /// does not depend on the order of `events`.
    pub fn finalize(&self, events: Vec<CollisionEvent>) -> Vec<CollisionEvent> {
        finalize(events, &self.opts)
    }
}

fn grid_mu(i: usize, g: usize) -> f64 {
    -0.5 + i as f64 / g as f64
}

fn key(e: &CollisionEvent) -> (i64, i64, i64) {
    (
        round(e.lambda.re * 1e9) as i64,
        round(e.lambda.im * 1e9) as i64,
        round(e.mu * 1e9) as i64,
    )
}

fn full_order(a: &CollisionEvent, b: &CollisionEvent) -> core::cmp::Ordering {
    a.lambda
        .im
        .total_cmp(&b.lambda.im)
        .then(a.mu.total_cmp(&b.mu))
        .then(a.idx1.n.cmp(&b.idx1.n))
        .then(a.idx1.l.cmp(&b.idx1.l))
        .then(a.idx2.n.cmp(&b.idx2.n))
        .then(a.idx2.l.cmp(&b.idx2.l))
}

pub fn finalize(mut events: Vec<CollisionEvent>, opts: &CollisionOptions) -> Vec<CollisionEvent> {
    events.retain(|e| {
        if e.at_origin {
            e.lambda.im >= -opts.lambda_tol
        } else {
            e.lambda.im >= 0.0
        }
    });
    events.sort_by(full_order);
    let mut out: Vec<CollisionEvent> = Vec::with_capacity(events.len());
    let mut seen = alloc::collections::BTreeSet::new();
    for e in events {
        if seen.insert(key(&e)) {
            out.push(e);
        }
    }
    out
}

/// Every collision for `|n₁|, |n₂| ≤ n_max` in the frame moving with speed `c`.
pub fn find_collisions(
    model: &ModelSpec,
    c: f64,
    n_max: u32,
    opts: &CollisionOptions,
) -> Result<Vec<CollisionEvent>, CollisionError> {
    let search = CollisionSearch::new(model, c, n_max, *opts)?;
    let mut events = Vec::new();
    for p in search.pairs() {
        events.extend(search.search_pair(p)?);
    }
    Ok(search.finalize(events))
}

/// The event reached from `e` by `k -> -k`: `(−n₁, l₁', −n₂, l₂', −μ)` with
/// `λ -> −λ̄`, renormalized so that `μ ∈ (-1/2, 1/2]` and `n₁ > n₂` (or
/// `l₁ < l₂` when `n₁ = n₂`).
pub fn mirror_event(model: &ModelSpec, e: &CollisionEvent) -> CollisionEvent {
    let (mu, shift) = normalize_mu(-e.mu);
    let mut a = ModeIndex {
        n: -e.idx1.n + shift,
        mu,
        l: model.mirror.partner(e.idx1.l),
    };
    let mut b = ModeIndex {
        n: -e.idx2.n + shift,
        mu,
        l: model.mirror.partner(e.idx2.l),
    };
    if b.n > a.n || (a.n == b.n && b.l < a.l) {
        core::mem::swap(&mut a, &mut b);
    }
    CollisionEvent {
        idx1: a,
        idx2: b,
        mu,
        lambda: -e.lambda.conj(),
        at_origin: e.at_origin,
        signature_product: e.signature_product,
        verdict: e.verdict,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub l: u8,
    pub n: i64,
    pub k: f64,
    pub value: f64,
}

/// Samples the curve families `k ↦ Ω_l(k + n)`; intersections of two curves
/// at the same `k` are collisions.
pub fn secant_curve_data(
    model: &ModelSpec,
    c: f64,
    n_window: RangeInclusive<i64>,
    k_grid: &[f64],
) -> Result<Vec<CurvePoint>, ModelError> {
    let mut out = Vec::with_capacity(k_grid.len() * (model.branch_count() as usize) * 8);
    for l in model.branch_indices() {
        for n in n_window.clone() {
            for &k in k_grid {
                out.push(CurvePoint {
                    l,
                    n,
                    k,
                    value: model.frame_omega(l, k + n as f64, c)?,
                });
            }
        }
    }
    Ok(out)
}

/// The event with smallest positive `Im λ` among non-origin collisions.
pub fn first_nonorigin(events: &[CollisionEvent]) -> Option<&CollisionEvent> {
    events
        .iter()
        .filter(|e| !e.at_origin && e.lambda.im > 0.0)
        .min_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im))
}

/// For each depth, the smallest positive `Im λ` of a non-origin collision of
/// finite-depth water waves, in the frame of the `N = 1` branch-1 bifurcation.
pub fn trace_first_collision_vs_depth(
    g: f64,
    h_grid: &[f64],
    n_max: u32,
) -> Result<Vec<(f64, f64)>, CollisionError> {
    let opts = CollisionOptions::default();
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let params = ModelParams::new()
            .with("g", g)
            .and_then(|p| p.with("h", h))
            .map_err(ModelError::from)?;
        let model = BuiltinModel::WaterWaves.build(&params)?;
        let c = model.bifurcation_speed(1, 1)?;
        let events = find_collisions(&model, c, n_max, &opts)?;
        let first = first_nonorigin(&events).ok_or(CollisionError::NoCollisionFound { h })?;
        out.push((h, first.lambda.im));
    }
    Ok(out)
}

/// Log-spaced grid of `count` values from `a` to `b`.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (crate::math::ln(a), crate::math::ln(b));
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                crate::math::exp(la + (lb - la) * i as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    fn model(id: &str) -> ModelSpec {
        builtin(id, &ModelParams::new()).unwrap()
    }

    #[test]
    fn sine_gordon_explicit_root() {
        let sg = model("sine-gordon");
        let mu = (libm::sqrt(10.0) - 3.0) / 2.0;
        let r = collision_residual(&sg, 3, 1, 0, 2, mu, core::f64::consts::SQRT_2).unwrap();
        assert!(r.abs() < 1e-12);
        assert_eq!(
            collision_residual(&sg, 1, 1, 1, 1, 0.0, 0.0),
            Err(CollisionError::SameMode)
        );
    }

    #[test]
    fn gkdv_origin_pair() {
        let m = model("gkdv");
        assert_eq!(collision_residual(&m, 1, 1, 0, 1, 0.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn deep_water_three_quarters() {
        let m = model("water-waves-deep");
        let events = find_collisions(&m, 1.0, 3, &CollisionOptions::default()).unwrap();
        let hit = events
            .iter()
            .find(|e| e.idx1.n == 2 && e.idx1.l == 1 && e.idx2.n == 0 && e.idx2.l == 2)
            .expect("event (2,1)-(0,2)");
        assert!((hit.mu - 0.25).abs() < 1e-12);
        assert!((hit.lambda.im - 0.75).abs() < 1e-12);
        assert!((first_nonorigin(&events).unwrap().lambda.im - 0.75).abs() < 1e-10);
    }

    #[test]
    fn mirror_is_involution() {
        let m = model("sine-gordon");
        let events = find_collisions(&m, core::f64::consts::SQRT_2, 4, &CollisionOptions::default()).unwrap();
        for e in events.iter().filter(|e| !e.at_origin) {
            let back = mirror_event(&m, &mirror_event(&m, e));
            assert_eq!((back.idx1.n, back.idx1.l, back.idx2.n, back.idx2.l), (e.idx1.n, e.idx1.l, e.idx2.n, e.idx2.l));
            assert!((back.mu - e.mu).abs() < 1e-15);
        }
    }
}
