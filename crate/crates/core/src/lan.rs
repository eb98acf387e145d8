//! Central sequences, their rho-derivatives, tau^2 and the Gaussian
//! log-likelihood ratio.
//!
//! With the Gaussian score `M_f(e) = -e` the AR(1) central sequence
//!
//! ```text
//! V_n(rho) = -(1/sqrt n) sum M_f(Y_i - rho Y_{i-1}) G(Y_{i-1})
//! ```
//!
//! is affine in `rho`, so `V_n(rho') - V_n(rho) = (rho' - rho) * dV_n/drho`
//! holds exactly. The ARCH central sequence adds the scale term
//! `(1 + e M_f(e)) S(Y_{i-1})` where `S = B/2` is the first-order
//! perturbation of the conditional standard deviation
//! `sqrt(1 + n^{-1/2} B) ~ 1 + n^{-1/2} B/2`. That choice makes its null
//! variance equal to the three-term tau^2 below.

use crate::dist::{normal_log_pdf, NoiseMoments};
use crate::error::{Error, Result};
use crate::models::{expected_functional, Family, Functional, ModelSpec, PerturbationSpec, SeriesSample};

/// Bound on `|d/de M_f(e)|` for the Gaussian score, times two.
const SCORE_SLOPE_BOUND: f64 = 2.0;

/// Minimum number of transitions for plug-in tau^2.
pub const PLUGIN_MIN_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralSeqEval {
    /// `V_n(rho)`
    pub value: f64,
    /// `dV_n/drho`
    pub d1: f64,
    /// `dV_n/drho / sqrt(n)`
    pub d1_scaled: f64,
    /// Upper bound on `sup_rho |d2V_n/drho2| / sqrt(n)`.
    pub d2_scaled_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau2Source {
    Analytic,
    Plugin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau2 {
    pub value: f64,
    pub source: Tau2Source,
}

impl Tau2 {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            source: Tau2Source::Analytic,
        }
    }

    pub fn plugin(value: f64) -> Self {
        Self {
            value,
            source: Tau2Source::Plugin,
        }
    }
}

fn check_finite(eval: CentralSeqEval, what: &'static str) -> Result<CentralSeqEval> {
    let ok = [eval.value, eval.d1, eval.d1_scaled, eval.d2_scaled_bound]
        .iter()
        .all(|v| v.is_finite());
    ok.then_some(eval).ok_or(Error::NonFinite(what))
}

pub fn central_seq_ar1(sample: &SeriesSample, rho: f64, g: &PerturbationSpec) -> Result<CentralSeqEval> {
    sample.require_transitions(1)?;
    // With -M_f(eps) = eps the sum splits into two rho-free sums.
    let (mut cross, mut lagged) = (0.0, 0.0);
    for (prev, cur) in sample.pairs() {
        let gv = g.eval(prev);
        cross += cur * gv;
        lagged += prev * gv;
    }
    let value = cross - rho * lagged;
    let d1 = -lagged;
    let n = sample.n() as f64;
    let root_n = n.sqrt();
    check_finite(
        CentralSeqEval {
            value: value / root_n,
            d1: d1 / root_n,
            d1_scaled: d1 / n,
            d2_scaled_bound: 0.0,
        },
        "AR(1) central sequence",
    )
}

pub fn central_seq_arch(
    sample: &SeriesSample,
    rho: f64,
    g: &PerturbationSpec,
    b: &PerturbationSpec,
) -> Result<CentralSeqEval> {
    sample.require_transitions(1)?;
    let (mut value, mut d1, mut sum_sq) = (0.0, 0.0, 0.0);
    for (prev, cur) in sample.pairs() {
        let eps = cur - rho * prev;
        let gv = g.eval(prev);
        let sv = 0.5 * b.eval(prev);
        // -(M_f(e) G + (1 + e M_f(e)) S) with M_f(e) = -e
        value += eps * gv + (eps * eps - 1.0) * sv;
        // d eps / d rho = -prev
        d1 -= prev * gv + 2.0 * eps * prev * sv;
        sum_sq += prev * prev;
    }
    let n = sample.n() as f64;
    let root_n = n.sqrt();
    // |d2V/drho2| / sqrt(n) = |(1/n) sum Y^2 S * 2 M_f'| <= (w/2) sup|B| (1/n) sum Y^2
    let d2_scaled_bound = 0.5 * SCORE_SLOPE_BOUND * b.bound() * sum_sq / n;
    check_finite(
        CentralSeqEval {
            value: value / root_n,
            d1: d1 / root_n,
            d1_scaled: d1 / n,
            d2_scaled_bound,
        },
        "ARCH central sequence",
    )
}

/// Central sequence for `spec.family` using the perturbations carried by `spec`.
pub fn central_seq(sample: &SeriesSample, rho: f64, spec: &ModelSpec) -> Result<CentralSeqEval> {
    match (spec.family, spec.b.as_ref()) {
        (Family::Ar1, _) => central_seq_ar1(sample, rho, &spec.g),
        (Family::Arch, Some(b)) => central_seq_arch(sample, rho, &spec.g, b),
        (Family::Arch, None) => Err(Error::InvalidModel("arch family requires a B perturbation".into())),
    }
}

/// tau^2 from the null stationary law: `I_0 E[G^2]` for AR(1), and
/// `I_0 E[G^2] + (I_2 - 1)/4 E[B^2] + I_1 E[G B]` for ARCH.
pub fn tau2_analytic(spec: &ModelSpec, moments: &NoiseMoments) -> Result<Tau2> {
    let gg = expected_functional(spec, Functional::GSquared)?;
    let value = match spec.family {
        Family::Ar1 => moments.i0 * gg,
        Family::Arch => {
            let bb = expected_functional(spec, Functional::BSquared)?;
            let gb = expected_functional(spec, Functional::GB)?;
            moments.i0 * gg + 0.25 * (moments.i2 - 1.0) * bb + moments.i1 * gb
        }
    };
    Ok(Tau2::analytic(value))
}

/// tau^2 with the noise moments replaced by residual averages
/// `I_j ~ (1/n) sum e_i^j M_f(e_i)^2`, `e_i = Y_i - rho Y_{i-1}`, and the
/// perturbation moments by averages over the lagged values.
pub fn tau2_plugin(sample: &SeriesSample, rho: f64, spec: &ModelSpec) -> Result<Tau2> {
    if sample.n() < PLUGIN_MIN_N {
        return Err(Error::InsufficientData {
            needed: PLUGIN_MIN_N + 1,
            got: sample.values.len(),
        });
    }
    let n = sample.n() as f64;
    let b = match spec.family {
        Family::Ar1 => None,
        Family::Arch => Some(
            spec.b
                .ok_or_else(|| Error::InvalidModel("arch family requires a B perturbation".into()))?,
        ),
    };
    let mut i = [0.0f64; 3];
    let (mut gg, mut bb, mut gb) = (0.0, 0.0, 0.0);
    for (prev, cur) in sample.pairs() {
        let eps = cur - rho * prev;
        let m2 = eps * eps; // M_f(eps)^2
        i[0] += m2;
        i[1] += eps * m2;
        i[2] += eps * eps * m2;
        let gv = spec.g.eval(prev);
        gg += gv * gv;
        if let Some(b) = b {
            let bv = b.eval(prev);
            bb += bv * bv;
            gb += gv * bv;
        }
    }
    let [i0, i1, i2] = i.map(|v| v / n);
    let (gg, bb, gb) = (gg / n, bb / n, gb / n);
    let value = match b {
        None => i0 * gg,
        Some(_) => i0 * gg + 0.25 * (i2 - 1.0) * bb + i1 * gb,
    };
    if !value.is_finite() {
        return Err(Error::NonFinite("plug-in tau^2"));
    }
    Ok(Tau2::plugin(value))
}

/// Gaussian AR(1) log-likelihood ratio of the local alternative
/// (`n^{-1/2} G` drift, `n = spec.n`) against the null at `spec.rho0`.
pub fn log_likelihood_ratio(sample: &SeriesSample, spec: &ModelSpec) -> Result<f64> {
    if spec.family != Family::Ar1 {
        return Err(Error::InvalidModel(
            "closed-form likelihood ratio is implemented for the AR(1) family".into(),
        ));
    }
    sample.require_transitions(1)?;
    let drift = 1.0 / (spec.n as f64).sqrt();
    let lambda: f64 = sample
        .pairs()
        .map(|(prev, cur)| {
            let eps = cur - spec.rho0 * prev;
            normal_log_pdf(eps - drift * spec.g.eval(prev)) - normal_log_pdf(eps)
        })
        .sum();
    lambda.is_finite().then_some(lambda).ok_or(Error::NonFinite("log-likelihood ratio"))
}
