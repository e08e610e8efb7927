//! Hybrid quantum-classical classification toolkit.
//!
//! The quantum side simulates data-encoding circuits on a dense statevector
//! backend and builds two classifier families on top of them: a variational
//! quantum classifier trained with SPSA, and SVMs (dual-form and
//! least-squares) driven by the fidelity kernel
//! `k(x, y) = |⟨Φ(x)|Φ(y)⟩|²`.
//!
//! The classical side supplies the preprocessing that makes few-qubit
//! classifiers workable on wide, imbalanced data: feature-importance ranking
//! (CART tree and gradient-boosted stumps), top-k selection, and resampling
//! (SMOTE, ADASYN, k-means undersampling, edited nearest neighbours).
//!
//! [`harness`] ties the stages together into seeded, repeatable experiments
//! with stratified splits and 95% confidence intervals.
//!
//! Everything is deterministic given explicit seeds; see [`rng`] for the
//! PRNG and seed-derivation scheme.

pub mod dataset;
pub mod error;
pub mod featsel;
pub mod featuremap;
pub mod harness;
pub mod qsvm;
pub mod resample;
pub mod rng;
pub mod statevector;
pub mod vqc;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use statevector::{Circuit, GateOp, StateVector};
