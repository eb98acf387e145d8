//! Neyman–Pearson test, its asymptotic power, and the Monte Carlo power
//! study comparing the true-parameter, LSE plug-in and modified-estimate
//! plug-in versions of the test.

use rayon::prelude::*;

use crate::dist::{gaussian_noise_moments, normal_cdf, normal_quantile};
use crate::error::{Error, Result};
use crate::inference::{
    bootstrap_bias, c1_analytic, c1_empirical, lse, modified_estimate_univariate, BiasEstimate, C1Estimate,
    C1Source, DEFAULT_BOOTSTRAP_REPS,
};
use crate::lan::{central_seq, tau2_analytic, tau2_plugin, Tau2};
use crate::models::{simulate, Family, Hypothesis, ModelSpec, PerturbationSpec, SeriesSample, DEFAULT_BURN_IN};
use crate::rng::StreamId;

/// Abort threshold on the fraction of failed replicate evaluations.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Central sequence at the true `rho0`, analytic tau^2.
    TrueParam,
    /// Central sequence at the LSE, plug-in tau^2.
    Lse,
    /// Central sequence at the modified estimate, plug-in tau^2.
    Me,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::TrueParam, Variant::Lse, Variant::Me];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::TrueParam => "true_param",
            Variant::Lse => "lse",
            Variant::Me => "me",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true_param" => Ok(Variant::TrueParam),
            "lse" => Ok(Variant::Lse),
            "me" => Ok(Variant::Me),
            other => Err(Error::Config(format!("unknown variant '{other}' (true_param|lse|me)"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    /// `V_n(rho_used) / tau`
    pub statistic: f64,
    /// `Z(alpha)`
    pub threshold: f64,
    pub reject: bool,
    pub variant: Variant,
    pub tau2_used: Tau2,
}

fn decide(value: f64, tau2: Tau2, threshold: f64, variant: Variant) -> Result<TestOutcome> {
    if !(tau2.value > 0.0) {
        return Err(Error::DegenerateTest(tau2.value));
    }
    let statistic = value / tau2.value.sqrt();
    Ok(TestOutcome {
        statistic,
        threshold,
        // Closed rejection region.
        reject: statistic >= threshold,
        variant,
        tau2_used: tau2,
    })
}

/// `I{ V_n(rho_used) / tau >= Z(alpha) }`.
pub fn np_test(
    sample: &SeriesSample,
    spec: &ModelSpec,
    rho_used: f64,
    alpha: f64,
    tau2: Tau2,
    variant: Variant,
) -> Result<TestOutcome> {
    let threshold = normal_quantile(alpha)?;
    let value = central_seq(sample, rho_used, spec)?.value;
    decide(value, tau2, threshold, variant)
}

/// Asymptotic power `1 - Phi(Z(alpha) - tau^2)` of the test under the
/// local alternative, written in terms of `tau^2`.
pub fn asymptotic_power(alpha: f64, tau2: f64) -> Result<f64> {
    if !(tau2 >= 0.0) {
        return Err(Error::Domain(format!("tau^2 = {tau2} must be nonnegative")));
    }
    Ok(normal_cdf(tau2 - normal_quantile(alpha)?))
}

/// Limit rejection rate `1 - Phi(Z(alpha) - tau)` of `V_n / tau` when
/// `V_n ~ N(tau^2, tau^2)` under the local alternative.
pub fn normalized_statistic_power(alpha: f64, tau2: f64) -> Result<f64> {
    if !(tau2 >= 0.0) {
        return Err(Error::Domain(format!("tau^2 = {tau2} must be nonnegative")));
    }
    Ok(normal_cdf(tau2.sqrt() - normal_quantile(alpha)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasMode {
    /// `b_n = rho_hat - rho0` with the true `rho0`.
    Oracle,
    Bootstrap,
}

impl std::str::FromStr for BiasMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(BiasMode::Oracle),
            "bootstrap" => Ok(BiasMode::Bootstrap),
            other => Err(Error::Config(format!("unknown b_mode '{other}' (oracle|bootstrap)"))),
        }
    }
}

impl BiasMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BiasMode::Oracle => "oracle",
            BiasMode::Bootstrap => "bootstrap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C1Mode {
    Analytic,
    Empirical,
}

impl std::str::FromStr for C1Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(C1Mode::Analytic),
            "empirical" => Ok(C1Mode::Empirical),
            other => Err(Error::Config(format!("unknown c1_mode '{other}' (analytic|empirical)"))),
        }
    }
}

impl C1Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            C1Mode::Analytic => "analytic",
            C1Mode::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerStudyConfig {
    pub family: Family,
    pub rho0: f64,
    /// Coefficient of `G` (and of `B` for ARCH, where `G = B`).
    pub coefficient: f64,
    pub amplitude_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub m: usize,
    pub alpha: f64,
    pub variants: Vec<Variant>,
    pub b_mode: BiasMode,
    pub c1_mode: C1Mode,
    pub bootstrap_reps: usize,
    pub master_seed: u64,
    pub burn_in: usize,
}

/// `count` equispaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl PowerStudyConfig {
    /// AR(1) figure setup: `rho0 = 0.1`, `alpha = 0.05`, `n in {30, 40, 80, 400}`,
    /// `m = 1000`, `G = 5a / (1 + x^2)`.
    pub fn paper_ar1() -> Self {
        Self {
            family: Family::Ar1,
            rho0: 0.1,
            coefficient: 5.0,
            amplitude_grid: linear_grid(0.0, 2.0, 21),
            n_list: vec![30, 40, 80, 400],
            m: 1000,
            alpha: 0.05,
            variants: Variant::ALL.to_vec(),
            b_mode: BiasMode::Oracle,
            c1_mode: C1Mode::Empirical,
            bootstrap_reps: DEFAULT_BOOTSTRAP_REPS,
            master_seed: 20_240_601,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// ARCH figure setup: `n in {30, 40, 80, 200}`, `G = B = 3.5a / (1 + x^2)`.
    pub fn paper_arch() -> Self {
        Self {
            family: Family::Arch,
            coefficient: 3.5,
            n_list: vec![30, 40, 80, 200],
            ..Self::paper_ar1()
        }
    }

    pub fn paper_figure(family: Family) -> Self {
        match family {
            Family::Ar1 => Self::paper_ar1(),
            Family::Arch => Self::paper_arch(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.amplitude_grid.is_empty() {
            return bad("amplitude grid is empty".into());
        }
        if self.amplitude_grid.iter().any(|a| !a.is_finite()) {
            return bad("amplitude grid has non-finite entries".into());
        }
        if self.n_list.is_empty() {
            return bad("n list is empty".into());
        }
        if self.n_list.iter().any(|&n| n < crate::lan::PLUGIN_MIN_N) {
            return bad(format!("every n must be at least {}", crate::lan::PLUGIN_MIN_N));
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} outside (0, 1)", self.alpha));
        }
        if self.variants.is_empty() {
            return bad("no variants selected".into());
        }
        if !(self.coefficient.is_finite() && self.coefficient != 0.0) {
            return bad("perturbation coefficient must be finite and nonzero".into());
        }
        if self.b_mode == BiasMode::Bootstrap && self.bootstrap_reps < crate::inference::MIN_BOOTSTRAP_REPS {
            return bad(format!(
                "bootstrap replicates must be at least {}",
                crate::inference::MIN_BOOTSTRAP_REPS
            ));
        }
        self.base_spec(self.n_list[0]).validate().or_else(|e| bad(e.to_string()))
    }

    /// Null model at sample size `n` with unit perturbation amplitude.
    pub fn base_spec(&self, n: usize) -> ModelSpec {
        let g = PerturbationSpec::reciprocal_quadratic(self.coefficient, 1.0);
        let spec = match self.family {
            Family::Ar1 => ModelSpec::ar1(self.rho0, g, n),
            Family::Arch => ModelSpec::arch(self.rho0, g, g, n),
        };
        spec.with_burn_in(self.burn_in)
    }

    /// Stream of replicate `rep` in cell `(n_index, a_index)`; shared by
    /// every variant so curve differences are paired.
    pub fn replicate_stream(&self, n_index: usize, a_index: usize, rep: usize) -> StreamId {
        StreamId::new(self.master_seed)
            .derive(n_index as u64)
            .derive(a_index as u64)
            .derive(rep as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub family: Family,
    pub n: usize,
    pub a: f64,
    pub variant: Variant,
    /// Successful replicates.
    pub m: usize,
    pub rejections: usize,
    pub failures: usize,
    pub rejection_rate: f64,
    pub mc_stderr: f64,
    pub asymptotic_power: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub family: Family,
    pub alpha: f64,
    pub amplitude_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub m: usize,
    pub seed: u64,
    pub rows: Vec<PowerRow>,
}

impl PowerCurve {
    pub fn row(&self, n: usize, a: f64, variant: Variant) -> Option<&PowerRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.a == a && r.variant == variant)
    }

    /// Rows for one `(n, variant)` in grid order.
    pub fn curve(&self, n: usize, variant: Variant) -> Vec<&PowerRow> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.variant == variant)
            .collect()
    }

    pub fn total_failures(&self) -> usize {
        self.rows.iter().map(|r| r.failures).sum()
    }
}

/// Everything one `(n, a)` cell shares across its replicates.
struct Cell {
    data_spec: ModelSpec,
    test_spec: ModelSpec,
    tau2_true: Option<Tau2>,
    c1_fixed: Option<f64>,
    threshold: f64,
}

fn evaluate_replicate(
    cfg: &PowerStudyConfig,
    cell: &Cell,
    stream: StreamId,
) -> Vec<Result<bool>> {
    let sample = match simulate(&cell.data_spec, stream) {
        Ok(s) => s,
        Err(e) => return cfg.variants.iter().map(|_| Err(e.clone())).collect(),
    };
    let rho_hat = lse(&sample);
    let spec = &cell.test_spec;
    cfg.variants
        .iter()
        .map(|&variant| {
            let outcome = match variant {
                Variant::TrueParam => {
                    let tau2 = cell.tau2_true.ok_or(Error::DegenerateTest(0.0))?;
                    let value = central_seq(&sample, cfg.rho0, spec)?.value;
                    decide(value, tau2, cell.threshold, variant)?
                }
                Variant::Lse => {
                    let rho_hat = rho_hat.clone()?;
                    let tau2 = tau2_plugin(&sample, rho_hat, spec)?;
                    let value = central_seq(&sample, rho_hat, spec)?.value;
                    decide(value, tau2, cell.threshold, variant)?
                }
                Variant::Me => {
                    let rho_hat = rho_hat.clone()?;
                    let b = match cfg.b_mode {
                        BiasMode::Oracle => BiasEstimate::oracle(rho_hat, cfg.rho0),
                        BiasMode::Bootstrap => BiasEstimate::bootstrap(bootstrap_bias(
                            &sample,
                            cfg.bootstrap_reps,
                            stream.derive(1),
                        )?),
                    };
                    let c1 = match cell.c1_fixed {
                        Some(value) => C1Estimate {
                            value,
                            source: C1Source::Analytic,
                        },
                        None => C1Estimate {
                            value: c1_empirical(&sample, &spec.g)?,
                            source: C1Source::Empirical,
                        },
                    };
                    let report = modified_estimate_univariate(&sample, spec, rho_hat, b, c1)?;
                    let tau2 = tau2_plugin(&sample, report.rho_bar, spec)?;
                    let value = central_seq(&sample, report.rho_bar, spec)?.value;
                    decide(value, tau2, cell.threshold, variant)?
                }
            };
            Ok(outcome.reject)
        })
        .collect()
}

/// Monte Carlo rejection frequencies over `amplitude_grid x n_list x variants`.
///
/// Data for amplitude `a` come from the local alternative with that
/// amplitude (the null when `a = 0`). The test direction is the
/// perturbation at amplitude `a`, or at amplitude 1 when `a = 0`; the
/// normalized statistic `V_n / tau` does not depend on `|a|`.
///
/// Cells run in grid order with replicates in parallel. The study aborts
/// with [`Error::TooManyFailures`], carrying the rows finished so far, once
/// more than 1% of the attempted replicate evaluations have failed.
pub fn power_study(cfg: &PowerStudyConfig) -> Result<PowerCurve> {
    cfg.validate()?;
    let moments = gaussian_noise_moments();
    let threshold = normal_quantile(cfg.alpha)?;
    let mut curve = PowerCurve {
        family: cfg.family,
        alpha: cfg.alpha,
        amplitude_grid: cfg.amplitude_grid.clone(),
        n_list: cfg.n_list.clone(),
        m: cfg.m,
        seed: cfg.master_seed,
        rows: Vec::new(),
    };
    let (mut attempted, mut failed) = (0usize, 0usize);

    for (n_index, &n) in cfg.n_list.iter().enumerate() {
        for (a_index, &a) in cfg.amplitude_grid.iter().enumerate() {
            let base = cfg.base_spec(n);
            let data_spec = if a == 0.0 {
                base.with_amplitude(0.0)
            } else {
                base.with_amplitude(a).under(Hypothesis::LocalAlternative)
            };
            let direction = if a == 0.0 { 1.0 } else { a };
            let test_spec = base.with_amplitude(direction);
            let tau2_true = tau2_analytic(&test_spec, &moments)?;
            let tau2_data = tau2_analytic(&base.with_amplitude(a), &moments)?.value;
            let asymptotic = asymptotic_power(cfg.alpha, tau2_data)?;
            let c1_fixed = match cfg.c1_mode {
                C1Mode::Analytic => Some(c1_analytic(&test_spec)?),
                C1Mode::Empirical => None,
            };
            let cell = Cell {
                data_spec,
                test_spec,
                tau2_true: (tau2_true.value > 0.0).then_some(tau2_true),
                c1_fixed,
                threshold,
            };

            let results: Vec<Vec<Result<bool>>> = (0..cfg.m)
                .into_par_iter()
                .map(|rep| evaluate_replicate(cfg, &cell, cfg.replicate_stream(n_index, a_index, rep)))
                .collect();

            for (v_index, &variant) in cfg.variants.iter().enumerate() {
                let (mut ok, mut rejections, mut failures) = (0usize, 0usize, 0usize);
                for rep in &results {
                    match rep[v_index] {
                        Ok(reject) => {
                            ok += 1;
                            rejections += reject as usize;
                        }
                        Err(_) => failures += 1,
                    }
                }
                let rate = if ok > 0 { rejections as f64 / ok as f64 } else { f64::NAN };
                let stderr = if ok > 0 {
                    (rate * (1.0 - rate) / ok as f64).sqrt()
                } else {
                    f64::NAN
                };
                attempted += cfg.m;
                failed += failures;
                curve.rows.push(PowerRow {
                    family: cfg.family,
                    n,
                    a,
                    variant,
                    m: ok,
                    rejections,
                    failures,
                    rejection_rate: rate,
                    mc_stderr: stderr,
                    asymptotic_power: asymptotic,
                    seed: cfg.master_seed,
                });
            }
            if failed as f64 > MAX_FAILURE_RATE * attempted as f64 {
                return Err(Error::TooManyFailures {
                    failed,
                    attempted,
                    partial: Box::new(curve),
                });
            }
        }
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g5(a: f64) -> PerturbationSpec {
        PerturbationSpec::reciprocal_quadratic(5.0, a)
    }

    #[test]
    fn boundary_statistic_rejects() {
        let z = normal_quantile(0.05).unwrap();
        let out = decide(z * 2.0, Tau2::analytic(4.0), z, Variant::TrueParam).unwrap();
        assert_eq!(out.statistic, z);
        assert!(out.reject);
    }

    #[test]
    fn huge_tau_does_not_reject() {
        let s = SeriesSample::from_values(vec![0.3, 1.0, -0.2, 0.5, 0.8]).unwrap();
        let spec = ModelSpec::ar1(0.1, g5(1.0), 4);
        let out = np_test(&s, &spec, 0.1, 0.05, Tau2::analytic(1e12), Variant::TrueParam).unwrap();
        assert!(out.statistic.abs() < 1e-4);
        assert!(!out.reject);
        assert_eq!(out.threshold, normal_quantile(0.05).unwrap());
    }

    #[test]
    fn degenerate_tau_is_an_error() {
        let s = SeriesSample::from_values(vec![0.3, 1.0, -0.2]).unwrap();
        let spec = ModelSpec::ar1(0.1, g5(1.0), 2);
        for t in [0.0, -1.0] {
            assert!(matches!(
                np_test(&s, &spec, 0.1, 0.05, Tau2::plugin(t), Variant::Lse),
                Err(Error::DegenerateTest(_))
            ));
        }
    }

    #[test]
    fn asymptotic_power_examples() {
        assert!((asymptotic_power(0.05, 0.0).unwrap() - 0.05).abs() < 1e-10);
        let z = normal_quantile(0.05).unwrap();
        assert!((asymptotic_power(0.05, z).unwrap() - 0.5).abs() < 1e-12);
        assert!((asymptotic_power(0.05, 1.6449).unwrap() - 0.5).abs() < 1e-4);
        let mut prev = 0.0;
        for k in 0..100 {
            let p = asymptotic_power(0.05, k as f64 * 0.05).unwrap();
            assert!(p > prev);
            prev = p;
        }
        assert!(asymptotic_power(0.05, -1.0).is_err());
    }

    #[test]
    fn normalized_power_agrees_at_zero_and_one() {
        for tau2 in [0.0, 1.0] {
            assert!(
                (normalized_statistic_power(0.05, tau2).unwrap() - asymptotic_power(0.05, tau2).unwrap()).abs()
                    < 1e-12
            );
        }
    }

    fn small_cfg() -> PowerStudyConfig {
        PowerStudyConfig {
            amplitude_grid: vec![0.0, 0.5],
            n_list: vec![50],
            m: 60,
            ..PowerStudyConfig::paper_ar1()
        }
    }

    #[test]
    fn study_shape_and_reproducibility() {
        let cfg = small_cfg();
        let a = power_study(&cfg).unwrap();
        let b = power_study(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 2 * 3);
        for r in &a.rows {
            assert!((0.0..=1.0).contains(&r.rejection_rate));
            let p = r.rejection_rate;
            assert!((r.mc_stderr - (p * (1.0 - p) / r.m as f64).sqrt()).abs() < 1e-15);
        }
        let zero = a.row(50, 0.0, Variant::TrueParam).unwrap();
        assert!((zero.asymptotic_power - 0.05).abs() < 1e-10);
    }

    #[test]
    fn study_results_independent_of_thread_count() {
        let cfg = small_cfg();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(|| power_study(&cfg)).unwrap(), four.install(|| power_study(&cfg)).unwrap());
    }

    #[test]
    fn study_validation() {
        let mut cfg = small_cfg();
        cfg.amplitude_grid.clear();
        assert!(matches!(power_study(&cfg), Err(Error::Config(_))));
        let mut cfg = small_cfg();
        cfg.rho0 = 1.5;
        assert!(power_study(&cfg).is_err());
        let mut cfg = small_cfg();
        cfg.alpha = 1.0;
        assert!(power_study(&cfg).is_err());
    }

    #[test]
    fn study_aborts_on_failures_with_partial_rows() {
        // Negative amplitudes with a large B coefficient drive the ARCH
        // conditional variance negative near y = 0.
        let cfg = PowerStudyConfig {
            family: Family::Arch,
            coefficient: 3.5,
            amplitude_grid: vec![0.5, -3.0],
            n_list: vec![80],
            m: 50,
            ..PowerStudyConfig::paper_ar1()
        };
        match power_study(&cfg) {
            Err(Error::TooManyFailures { partial, failed, .. }) => {
                assert!(failed > 0);
                assert_eq!(partial.rows.len(), 6);
                assert_eq!(partial.rows[0].failures, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bootstrap_mode_runs() {
        let cfg = PowerStudyConfig {
            b_mode: BiasMode::Bootstrap,
            bootstrap_reps: 100,
            m: 20,
            ..small_cfg()
        };
        let c = power_study(&cfg).unwrap();
        assert_eq!(c.total_failures(), 0);
    }

    #[test]
    fn grid_helper() {
        let g = linear_grid(0.0, 2.0, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[20], 2.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
        assert_eq!(linear_grid(1.0, 2.0, 1), vec![1.0]);
    }
}
