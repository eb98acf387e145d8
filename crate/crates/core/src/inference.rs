//! Least squares, residual bootstrap of the LSE bias, the `c_1` constant
//! and the modified estimator.
//!
//! The modified estimator moves one component of a root-n consistent
//! estimate along the gradient of the central sequence so that the
//! tangent-plane constraint `grad V_n(phi_hat) . (phi_bar - phi_hat) = D_n`
//! holds. In the univariate AR(1) case
//! `rho_bar = D_n / V_n'(rho_hat) + rho_hat` with
//! `D_n = -c_1 sqrt(n) (rho_hat - rho0)`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lan::central_seq;
use crate::models::{expected_functional, Functional, ModelSpec, PerturbationSpec, SeriesSample};
use crate::rng::StreamId;

/// `|V_n'(rho_hat)| / sqrt(n)` below this makes the modified estimate degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Fewest bootstrap replicates accepted by [`bootstrap_bias`].
pub const MIN_BOOTSTRAP_REPS: usize = 100;

pub const DEFAULT_BOOTSTRAP_REPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasSource {
    /// `rho_hat - rho0` with the true `rho0`.
    OracleTrueRho,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasEstimate {
    pub value: f64,
    pub source: BiasSource,
}

impl BiasEstimate {
    pub fn oracle(rho_hat: f64, rho0: f64) -> Self {
        Self {
            value: rho_hat - rho0,
            source: BiasSource::OracleTrueRho,
        }
    }

    pub fn bootstrap(value: f64) -> Self {
        Self {
            value,
            source: BiasSource::Bootstrap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C1Source {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C1Estimate {
    pub value: f64,
    pub source: C1Source,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub rho_hat: f64,
    pub c1: f64,
    pub c1_source: C1Source,
    pub b_hat: f64,
    pub b_source: BiasSource,
    pub d_n: f64,
    pub rho_bar: f64,
    /// 1-based index of the modified component; always 1 here.
    pub modified_component: usize,
    pub degenerate: bool,
}

fn lse_parts(pairs: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    pairs.fold((0.0, 0.0), |(num, den), (prev, cur)| (num + cur * prev, den + prev * prev))
}

/// `sum Y_i Y_{i-1} / sum Y_{i-1}^2`.
pub fn lse(sample: &SeriesSample) -> Result<f64> {
    sample.require_transitions(1)?;
    let (num, den) = lse_parts(sample.pairs());
    if den == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    Ok(num / den)
}

/// `e_i = Y_i - rho Y_{i-1}` for `i = 1..n`.
pub fn residuals(sample: &SeriesSample, rho: f64) -> Result<Vec<f64>> {
    sample.require_transitions(1)?;
    Ok(sample.pairs().map(|(prev, cur)| cur - rho * prev).collect())
}

/// Residual-bootstrap estimate of `b_n = rho_hat - rho0`.
///
/// Centered LSE residuals are resampled with replacement to rebuild `reps`
/// series from the observed `Y_0` with coefficient `rho_hat`; the estimate
/// is the mean of `rho*_b - rho_hat`. Replicate `b` draws from
/// `seed.derive(b)`, so the result does not depend on thread scheduling.
pub fn bootstrap_bias(sample: &SeriesSample, reps: usize, seed: StreamId) -> Result<f64> {
    if reps < MIN_BOOTSTRAP_REPS {
        return Err(Error::Domain(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP_REPS} replicates, got {reps}"
        )));
    }
    let rho_hat = lse(sample)?;
    let mut resid = residuals(sample, rho_hat)?;
    let mean = resid.iter().sum::<f64>() / resid.len() as f64;
    resid.iter_mut().for_each(|e| *e -= mean);
    let y0 = sample.values[0];
    let n = sample.n();

    let estimates: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.derive(b as u64).rng();
            let (mut num, mut den) = (0.0, 0.0);
            let mut prev = y0;
            for _ in 0..n {
                let cur = rho_hat * prev + resid[rng.random_range(0..n)];
                num += cur * prev;
                den += prev * prev;
                prev = cur;
            }
            if den == 0.0 {
                return Err(Error::DegenerateDesign);
            }
            Ok(num / den - rho_hat)
        })
        .collect::<Result<_>>()?;
    Ok(estimates.iter().sum::<f64>() / reps as f64)
}

/// Ergodic-average estimate `-(1/n) sum Y_{i-1} G(Y_{i-1})` of `c_1`.
pub fn c1_empirical(sample: &SeriesSample, g: &PerturbationSpec) -> Result<f64> {
    sample.require_transitions(1)?;
    let sum: f64 = sample.lagged().iter().map(|&y| y * g.eval(y)).sum();
    Ok(-sum / sample.n() as f64)
}

/// `c_1 = -E[Y_0 G(Y_0)]` under the null stationary law.
pub fn c1_analytic(spec: &ModelSpec) -> Result<f64> {
    Ok(-expected_functional(spec, Functional::YG)?)
}

/// Univariate modified estimate. `spec` supplies the family and the
/// perturbations of the central sequence whose derivative is used.
pub fn modified_estimate_univariate(
    sample: &SeriesSample,
    spec: &ModelSpec,
    rho_hat: f64,
    b_hat: BiasEstimate,
    c1: C1Estimate,
) -> Result<EstimateReport> {
    if !rho_hat.is_finite() || !c1.value.is_finite() || !b_hat.value.is_finite() {
        return Err(Error::NonFinite("modified estimate inputs"));
    }
    let eval = central_seq(sample, rho_hat, spec)?;
    let root_n = (sample.n() as f64).sqrt();
    let d_n = -c1.value * root_n * b_hat.value;
    let degenerate = eval.d1_scaled.abs() < DEGENERACY_TOL;
    let rho_bar = if degenerate { rho_hat } else { d_n / eval.d1 + rho_hat };
    Ok(EstimateReport {
        rho_hat,
        c1: c1.value,
        c1_source: c1.source,
        b_hat: b_hat.value,
        b_source: b_hat.source,
        d_n,
        rho_bar,
        modified_component: 1,
        degenerate,
    })
}

/// Which block of `phi = (rho, theta)` a component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// The `l` location parameters `rho`.
    First,
    /// The `p` scale parameters `theta`.
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorModifiedEstimate {
    pub phi_hat: Vec<f64>,
    pub phi_bar: Vec<f64>,
    pub block: Block,
    /// 1-based index into `phi`.
    pub component: usize,
    pub gradient: Vec<f64>,
    pub d_n: f64,
}

impl VectorModifiedEstimate {
    /// `gradient . (phi_bar - phi_hat)`; equals `d_n` up to rounding.
    pub fn constraint_value(&self) -> f64 {
        self.gradient
            .iter()
            .zip(self.phi_bar.iter().zip(&self.phi_hat))
            .map(|(g, (bar, hat))| g * (bar - hat))
            .sum()
    }
}

fn block_of(component: usize, (l, p): (usize, usize)) -> Result<Block> {
    match component {
        c if c >= 1 && c <= l => Ok(Block::First),
        c if c > l && c <= l + p => Ok(Block::Second),
        c => Err(Error::Domain(format!("component {c} outside 1..={}", l + p))),
    }
}

/// Modify the `component`-th entry (1-based) of `phi_hat` so that the
/// tangent-plane constraint `gradient . (phi_bar - phi_hat) = d_n` holds.
pub fn modified_estimate_vector(
    phi_hat: &[f64],
    gradient: &[f64],
    d_n: f64,
    block_sizes: (usize, usize),
    component: usize,
) -> Result<VectorModifiedEstimate> {
    let dim = block_sizes.0 + block_sizes.1;
    if phi_hat.len() != dim || gradient.len() != dim {
        return Err(Error::Domain(format!(
            "expected vectors of length l + p = {dim}, got {} and {}",
            phi_hat.len(),
            gradient.len()
        )));
    }
    let block = block_of(component, block_sizes)?;
    let slope = gradient[component - 1];
    if !(slope.abs() >= DEGENERACY_TOL) {
        return Err(Error::DegenerateComponent {
            index: component,
            value: slope,
        });
    }
    let mut phi_bar = phi_hat.to_vec();
    phi_bar[component - 1] += d_n / slope;
    Ok(VectorModifiedEstimate {
        phi_hat: phi_hat.to_vec(),
        phi_bar,
        block,
        component,
        gradient: gradient.to_vec(),
        d_n,
    })
}

/// 1-based index of the largest `|gradient|` entry inside `block`.
pub fn max_gradient_component(gradient: &[f64], block_sizes: (usize, usize), block: Block) -> Option<usize> {
    let (l, p) = block_sizes;
    let range = match block {
        Block::First => 0..l,
        Block::Second => l..l + p,
    };
    range
        .filter(|&i| i < gradient.len())
        .max_by(|&i, &j| gradient[i].abs().total_cmp(&gradient[j].abs()))
        .map(|i| i + 1)
}
