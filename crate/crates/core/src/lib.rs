//! Simulation and numerical verification of Lévy processes, d-parameter Lévy
//! fields and their white noises viewed as Schwartz-space functionals.
//!
//! The crate is organized around the Lévy–Itô decomposition
//! `X_t = γ Leb_d([0,t]) + σ W_t + X^P_t + X^M_t`:
//!
//! * [`levy_measure`] — Lévy measures `ν`, tail moments, the positive-absolute-moment
//!   (PAM) classification, and jump samplers.
//! * [`schwartz`] — test functions, seminorms `N_p`, localized bump families,
//!   antiderivative operators and tail integrals.
//! * [`path_sim`] / [`sheet_sim`] — simulation of one-parameter paths and
//!   d-parameter sheets (jump records, Brownian grids, banded small jumps).
//! * [`pairing`] — `⟨X,φ⟩` and `⟨Ẋ,φ⟩` by two routes (path quadrature vs.
//!   stochastic integral) with explicit error budgets.
//! * [`growth`] — growth-ratio profiles, Marcinkiewicz–Zygmund scaling, the
//!   temperedness dichotomy experiment, dyadic-block suprema, bump probes.
//! * [`charfn`] — Lévy symbol and characteristic functional, validated against
//!   Monte-Carlo empirical characteristic functions.
//! * [`validate`] — the pinned-seed acceptance suite.
//!
//! # Example
//!
//! Simulate a compound Poisson path and check that the white-noise pairing
//! `⟨Ẋ,φ⟩` agrees with the stochastic integral `∫φ dX`:
//!
//! ```
//! use levy_noise::levy_measure::{Atom, LevyMeasure, LevyTriplet};
//! use levy_noise::pairing::{fubini_consistency, FieldRef};
//! use levy_noise::path_sim::{simulate_path, SimConfig};
//! use levy_noise::schwartz;
//!
//! let nu = LevyMeasure::FiniteAtomic(vec![Atom { position: 2.0, mass: 1.0 }]);
//! let triplet = LevyTriplet::new(0.5, 1.0, nu).unwrap();
//! let cfg = SimConfig::new(1.0, 1e-3, 1.0).unwrap();
//! let path = simulate_path(&triplet, &cfg, 42).unwrap();
//!
//! let phi = schwartz::mollifier(1); // smooth bump on [0, 1]
//! let report = fubini_consistency(&FieldRef::Path(&path), &phi).unwrap();
//! assert!(report.within_budget, "|{}| ≤ {}", report.difference, report.budget);
//! ```

pub mod charfn;
pub mod error;
pub mod growth;
pub mod jet;
pub mod levy_measure;
pub mod pairing;
pub mod path_sim;
pub mod quad;
pub mod rng;
pub mod schwartz;
pub mod sheet_sim;
pub mod stats;
pub mod validate;

pub use error::{CoreError, Result};
pub use levy_measure::{LevyMeasure, LevyTriplet, PamVerdict, TailMoment};
pub use schwartz::TestFunction;
