//! Local-asymptotic-normality tests for AR(1)- and ARCH-contiguous models.
//!
//! The crate simulates nonlinear series contiguous to a Gaussian AR(1),
//! evaluates the central sequence of the log-likelihood ratio, and runs
//! the Neyman–Pearson test with the unknown autoregressive coefficient
//! replaced by the true value, the least-squares estimate, or a modified
//! estimate that absorbs the plug-in error of the central sequence.
//!
//! Modules, bottom up:
//!
//! - [`dist`]: Gaussian score, CDF, quantile and noise moments.
//! - [`models`]: model specs and the simulator.
//! - [`lan`]: central sequences, tau^2 and the log-likelihood ratio.
//! - [`inference`]: LSE, residual bootstrap and the modified estimator.
//! - [`testing`]: the test, its asymptotic power and the power study.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod error;
pub mod inference;
pub mod lan;
pub mod models;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod testing;

pub use dist::{gaussian_noise_moments, normal_cdf, normal_quantile, score_mf, NoiseMoments};
pub use error::{Error, Result};
pub use inference::{
    bootstrap_bias, c1_analytic, c1_empirical, lse, modified_estimate_univariate, modified_estimate_vector,
    residuals, BiasEstimate, BiasSource, Block, C1Estimate, C1Source, EstimateReport, VectorModifiedEstimate,
};
pub use lan::{
    central_seq, central_seq_ar1, central_seq_arch, log_likelihood_ratio, tau2_analytic, tau2_plugin,
    CentralSeqEval, Tau2, Tau2Source,
};
pub use models::{
    expected_functional, simulate, stationary_variance, Family, Functional, Hypothesis, ModelSpec,
    PerturbationKind, PerturbationSpec, SeriesSample,
};
pub use rng::StreamId;
pub use testing::{
    asymptotic_power, np_test, power_study, BiasMode, C1Mode, PowerCurve, PowerRow, PowerStudyConfig,
    TestOutcome, Variant,
};
