//! AR(1)-contiguous and ARCH-contiguous models, their null stationary law,
//! and the simulator.
//!
//! Under the local alternative the AR(1) recursion is
//! `Y_i = rho0 Y_{i-1} + n^{-1/2} G(Y_{i-1}) + eps_i`; the ARCH variant
//! additionally scales the innovation by `sqrt(1 + n^{-1/2} B(Y_{i-1}))`.
//! Under the null both reduce to a Gaussian AR(1).

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::gaussian_expectation;
use crate::rng::StreamId;

pub const DEFAULT_BURN_IN: usize = 500;

/// Absolute tolerance of [`expected_functional`].
pub const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationKind {
    /// `coefficient * a / (1 + x1^2)`
    ReciprocalQuadratic,
}

/// A bounded perturbation function of the first lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    pub coefficient: f64,
}

impl PerturbationSpec {
    pub fn reciprocal_quadratic(coefficient: f64, amplitude: f64) -> Self {
        Self {
            kind: PerturbationKind::ReciprocalQuadratic,
            amplitude,
            coefficient,
        }
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match self.kind {
            PerturbationKind::ReciprocalQuadratic => {
                self.coefficient * self.amplitude / (1.0 + y * y)
            }
        }
    }

    /// `sup_y |G(y)|`.
    pub fn bound(&self) -> f64 {
        (self.coefficient * self.amplitude).abs()
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.coefficient == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ar1,
    Arch,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ar1 => "ar1",
            Family::Arch => "arch",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ar1" => Ok(Family::Ar1),
            "arch" => Ok(Family::Arch),
            other => Err(Error::Config(format!("unknown family '{other}' (ar1|arch)"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    LocalAlternative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub rho0: f64,
    pub g: PerturbationSpec,
    /// Variance perturbation; ARCH only.
    pub b: Option<PerturbationSpec>,
    pub hypothesis: Hypothesis,
    /// Sample size; sets the `n^{-1/2}` contiguity scale.
    pub n: usize,
    pub burn_in: usize,
}

impl ModelSpec {
    pub fn ar1(rho0: f64, g: PerturbationSpec, n: usize) -> Self {
        Self {
            family: Family::Ar1,
            rho0,
            g,
            b: None,
            hypothesis: Hypothesis::Null,
            n,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn arch(rho0: f64, g: PerturbationSpec, b: PerturbationSpec, n: usize) -> Self {
        Self {
            family: Family::Arch,
            b: Some(b),
            ..Self::ar1(rho0, g, n)
        }
    }

    pub fn under(self, hypothesis: Hypothesis) -> Self {
        Self { hypothesis, ..self }
    }

    pub fn with_burn_in(self, burn_in: usize) -> Self {
        Self { burn_in, ..self }
    }

    /// Same model with every perturbation amplitude replaced by `a`.
    pub fn with_amplitude(self, a: f64) -> Self {
        Self {
            g: self.g.with_amplitude(a),
            b: self.b.map(|b| b.with_amplitude(a)),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho0.is_finite() || self.rho0.abs() >= 1.0 {
            return Err(Error::InvalidModel(format!(
                "stationarity requires |rho0| < 1, got rho0 = {}",
                self.rho0
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidModel("sample size n must be positive".into()));
        }
        let perturbations = std::iter::once(&self.g).chain(self.b.as_ref());
        for p in perturbations.clone() {
            if !p.amplitude.is_finite() || !p.coefficient.is_finite() {
                return Err(Error::InvalidModel("perturbation parameters must be finite".into()));
            }
        }
        match (self.family, self.b) {
            (Family::Arch, None) => {
                return Err(Error::InvalidModel("arch family requires a B perturbation".into()))
            }
            (Family::Ar1, Some(_)) => {
                return Err(Error::InvalidModel("B perturbation is arch-only".into()))
            }
            _ => {}
        }
        if self.hypothesis == Hypothesis::LocalAlternative && perturbations.clone().all(|p| p.is_zero())
        {
            return Err(Error::InvalidModel(
                "local alternative requires a nonzero perturbation amplitude (a != 0)".into(),
            ));
        }
        Ok(())
    }

    /// Contiguity scale `n^{-1/2}` when the alternative is active, else 0.
    pub fn drift_scale(&self) -> f64 {
        match self.hypothesis {
            Hypothesis::Null => 0.0,
            Hypothesis::LocalAlternative => 1.0 / (self.n as f64).sqrt(),
        }
    }

    /// Sufficient condition for `1 + n^{-1/2} B(y) > 0` at every `y`.
    pub fn variance_positivity_guaranteed(&self) -> bool {
        match self.b {
            Some(b) => self.drift_scale() * b.bound() < 1.0,
            None => true,
        }
    }

    /// Conditional innovation scale `sqrt(1 + n^{-1/2} B(y))`; 1 for AR(1)
    /// and under the null. `None` when the variance is not positive.
    pub fn conditional_scale(&self, y: f64) -> Option<f64> {
        let s2 = self.conditional_variance(y);
        (s2 > 0.0).then(|| s2.sqrt())
    }

    /// Large-n linearization `1 + n^{-1/2} B(y) / 2` of the conditional scale.
    pub fn conditional_scale_linearized(&self, y: f64) -> f64 {
        1.0 + 0.5 * self.drift_scale() * self.b.map_or(0.0, |b| b.eval(y))
    }

    fn conditional_variance(&self, y: f64) -> f64 {
        1.0 + self.drift_scale() * self.b.map_or(0.0, |b| b.eval(y))
    }

    /// Variance `1 / (1 - rho0^2)` of the Gaussian AR(1) law shared by both
    /// families under the null.
    pub fn null_law_variance(&self) -> f64 {
        1.0 / (1.0 - self.rho0 * self.rho0)
    }
}

/// One simulated trajectory `Y_0..Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSample {
    pub values: Vec<f64>,
    pub burn_in: usize,
    pub seed: StreamId,
}

impl SeriesSample {
    /// Wrap observed values (no burn-in, seed 0).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("series values"));
        }
        Ok(Self {
            values,
            burn_in: 0,
            seed: StreamId(0),
        })
    }

    /// Number of transitions, `n`.
    pub fn n(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// `(Y_{i-1}, Y_i)` for `i = 1..n`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn lagged(&self) -> &[f64] {
        &self.values[..self.values.len().saturating_sub(1)]
    }

    pub(crate) fn require_transitions(&self, needed: usize) -> Result<()> {
        if self.n() < needed {
            return Err(Error::InsufficientData {
                needed: needed + 1,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Generate `Y_0..Y_n` from `Y = 0` after `spec.burn_in` discarded steps.
///
/// One standard-normal draw is consumed per step, so null and alternative
/// runs with the same stream share their innovations.
pub fn simulate(spec: &ModelSpec, seed: StreamId) -> Result<SeriesSample> {
    spec.validate()?;
    let mut rng = seed.rng();
    let drift = spec.drift_scale();
    let total = spec.burn_in + spec.n;
    let mut values = Vec::with_capacity(spec.n + 1);
    let mut y = 0.0f64;
    if spec.burn_in == 0 {
        values.push(y);
    }
    for step in 1..=total {
        let eps: f64 = StandardNormal.sample(&mut rng);
        let mean = spec.rho0 * y + drift * spec.g.eval(y);
        y = match spec.family {
            Family::Ar1 => mean + eps,
            Family::Arch => {
                let s2 = spec.conditional_variance(y);
                if !(s2 > 0.0) {
                    return Err(Error::VariancePositivity { step, scale2: s2 });
                }
                mean + s2.sqrt() * eps
            }
        };
        if !y.is_finite() {
            return Err(Error::NonFinite("simulation"));
        }
        if step >= spec.burn_in {
            values.push(y);
        }
    }
    Ok(SeriesSample {
        values,
        burn_in: spec.burn_in,
        seed,
    })
}

/// `1 / (1 - rho0^2)` for a null AR(1) spec.
pub fn stationary_variance(spec: &ModelSpec) -> Result<f64> {
    if spec.family != Family::Ar1 || spec.hypothesis != Hypothesis::Null {
        return Err(Error::InvalidModel(
            "stationary variance is available for the null AR(1) model only".into(),
        ));
    }
    spec.validate()?;
    Ok(spec.null_law_variance())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    GSquared,
    BSquared,
    GB,
    YG,
}

/// `E[functional(Y)]` under the null stationary law `N(0, 1/(1 - rho0^2))`.
///
/// Both families share this law under the null; the hypothesis field of
/// `spec` is ignored, so alternatives are evaluated at their null law.
pub fn expected_functional(spec: &ModelSpec, functional: Functional) -> Result<f64> {
    spec.under(Hypothesis::Null).validate()?;
    let g = spec.g;
    let need_b = || {
        spec.b
            .ok_or_else(|| Error::InvalidModel("functional requires a B perturbation".into()))
    };
    let var = spec.null_law_variance();
    match functional {
        Functional::GSquared => gaussian_expectation(|y| g.eval(y).powi(2), var, QUADRATURE_TOL),
        Functional::YG => gaussian_expectation(|y| y * g.eval(y), var, QUADRATURE_TOL),
        Functional::BSquared => {
            let b = need_b()?;
            gaussian_expectation(|y| b.eval(y).powi(2), var, QUADRATURE_TOL)
        }
        Functional::GB => {
            let b = need_b()?;
            gaussian_expectation(|y| g.eval(y) * b.eval(y), var, QUADRATURE_TOL)
        }
    }
}
