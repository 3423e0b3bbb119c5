//! Semi-supervised support recovery and classification for sparse
//! two-component Gaussian mixtures.
//!
//! The crate covers the full pipeline:
//!
//! * [`gmodel`]: the symmetric sparse mixture `y ~ Unif{±1}, x | y ~ N(yμ, I)`
//!   and reproducible dataset generation.
//! * [`spectral`]: restricted sample covariances, a Lanczos leading
//!   eigenvector solver and a truncated power method for sparse PCA.
//! * [`estimators`]: LSPCA / LS²PCA, Top-K Labeled, self-training and two
//!   unsupervised spectral baselines.
//! * [`metrics`]: Gaussian tail, support overlap, closed-form generalization
//!   error and excess risk.
//! * [`theory`]: information-theoretic thresholds, the low-degree likelihood
//!   ratio norm and the phase-diagram classifier.
//! * [`harness`]: seeded Monte Carlo sweeps with CSV output.
//!
//! Data-parallel loops go through [`par::Execution`]. With the default
//! `parallel` feature they run on the rayon pool; every reduction uses fixed
//! chunking so results are bit-identical for any thread count.

pub mod error;
pub mod estimators;
pub mod gmodel;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod par;
pub mod rng;
pub mod select;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};

pub use gmodel::{Dataset, ProblemParams, SparseMean, SupportSpec};
pub use matrix::{Matrix, Precision, Rows};
pub use estimators::{EstimatorOutput, LspcaConfig, Method, SpectralOptions};
pub use par::Execution;
