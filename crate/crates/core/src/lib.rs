//! High-frequency instability analysis of small-amplitude periodic traveling
//! waves of Hamiltonian PDEs.
//!
//! The crate follows a six-step necessary-condition test: build the
//! dispersion relation, place the traveling frame at a bifurcation speed,
//! write down the zero-amplitude spectrum `λ = -iΩ_l(n + μ)`, solve for
//! eigenvalue collisions away from the origin and compare the Krein
//! signatures of the colliding modes. Opposite signatures are necessary for
//! a Hamiltonian Hopf bifurcation, so a model whose collisions all carry equal
//! signatures cannot develop high-frequency instabilities at small amplitude.
//!
//! Numerical checks live alongside: closed-form KdV/mKdV waves, a Newton
//! cosine-collocation solver for Whitham-type waves, and a Fourier–Floquet–Hill
//! spectrum with instability-bubble detection.
//!
//! Everything here is `no_std` with `alloc`; IO, threads and the CLI live in
//! the `hfi` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod collision;
pub mod dispersion;
pub mod dsl;
pub mod elliptic;
pub mod hill;
pub mod krein;
pub mod linalg;
pub mod math;
pub mod models;
pub mod params;
pub mod waves;

pub use collision::{find_collisions, CollisionEvent, CollisionOptions, Verdict};
pub use dispersion::{ModeIndex, ModelError, ModelSpec, PoissonKind};
pub use krein::{run_pipeline, AnalysisReport, OverallVerdict};
pub use models::{builtin, BuiltinModel, CustomModel};
pub use num_complex::Complex64;
pub use params::ModelParams;
pub use waves::TravelingWave;
