//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use lanpower_core::stats::{ks_test, mean_se, sample_sd};
use lanpower_core::testing::normalized_statistic_power;
use lanpower_core::{
    asymptotic_power, bootstrap_bias, c1_empirical, central_seq, central_seq_arch, gaussian_noise_moments, lse,
    log_likelihood_ratio, modified_estimate_univariate, normal_cdf, power_study, simulate, tau2_analytic,
    BiasEstimate, C1Estimate, C1Source, Hypothesis, ModelSpec, PerturbationSpec, PowerCurve, PowerStudyConfig,
    SeriesSample, StreamId, Variant,
};
use proptest::prelude::*;
use rand::Rng;
use proptest::test_runner::{Config, TestRunner};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] criterion {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn ar1_spec(a: f64, n: usize) -> ModelSpec {
    ModelSpec::ar1(0.1, PerturbationSpec::reciprocal_quadratic(5.0, a), n)
}

fn ar1_preset() -> &'static PowerCurve {
    static CURVE: OnceLock<PowerCurve> = OnceLock::new();
    CURVE.get_or_init(|| power_study(&PowerStudyConfig::paper_ar1()).expect("ar1 preset"))
}

#[test]
fn criterion_01_size_calibration() {
    let cfg = PowerStudyConfig {
        amplitude_grid: vec![0.0],
        n_list: vec![400],
        master_seed: 101,
        ..PowerStudyConfig::paper_ar1()
    };
    let curve = power_study(&cfg).unwrap();
    let rates: Vec<(Variant, f64)> = Variant::ALL
        .iter()
        .map(|&v| (v, curve.row(400, 0.0, v).unwrap().rejection_rate))
        .collect();
    let pass = rates.iter().all(|(_, r)| (0.022..=0.078).contains(r));
    let detail = rates
        .iter()
        .map(|(v, r)| format!("{v}={r:.3}"))
        .collect::<Vec<_>>()
        .join(" ");
    report(1, "size calibration", pass, format!("{detail} (band [0.022, 0.078])"));
}

#[test]
fn criterion_02_lan_expansion() {
    let moments = gaussian_noise_moments();
    let mut details = Vec::new();
    let mut pass = true;
    for (k, a) in [0.5, 1.0].into_iter().enumerate() {
        let spec = ar1_spec(a, 400);
        let tau2 = tau2_analytic(&spec, &moments).unwrap().value;
        let null = spec.with_amplitude(0.0);
        let diffs: Vec<f64> = (0..1000)
            .map(|rep| {
                let sample = simulate(&null, StreamId::new(202).derive(k as u64).derive(rep)).unwrap();
                let lambda = log_likelihood_ratio(&sample, &spec).unwrap();
                let v = central_seq(&sample, spec.rho0, &spec).unwrap().value;
                lambda - v + tau2 / 2.0
            })
            .collect();
        let (m, se) = mean_se(&diffs);
        pass &= m.abs() <= 4.0 * se;
        details.push(format!("a={a}: mean={m:.2e} se={se:.2e}"));
    }
    report(2, "LAN expansion", pass, details.join("; "));
}

#[test]
fn criterion_03_null_clt() {
    let spec = ar1_spec(1.0, 400);
    let tau = tau2_analytic(&spec, &gaussian_noise_moments()).unwrap().value.sqrt();
    let null = spec.with_amplitude(0.0);
    let values: Vec<f64> = (0..1000)
        .map(|rep| {
            let sample = simulate(&null, StreamId::new(303).derive(rep)).unwrap();
            central_seq(&sample, spec.rho0, &spec).unwrap().value
        })
        .collect();
    let ks = ks_test(&values, |x| normal_cdf(x / tau));
    report(
        3,
        "null CLT of the central sequence",
        ks.p_value > 0.01,
        format!("KS D={:.4} p={:.3}", ks.statistic, ks.p_value),
    );
}

#[test]
fn criterion_04_le_cam_shift() {
    let spec = ar1_spec(1.0, 400);
    let tau2 = tau2_analytic(&spec, &gaussian_noise_moments()).unwrap().value;
    let alt = spec.under(Hypothesis::LocalAlternative);
    let values: Vec<f64> = (0..1000)
        .map(|rep| {
            let sample = simulate(&alt, StreamId::new(404).derive(rep)).unwrap();
            central_seq(&sample, spec.rho0, &spec).unwrap().value
        })
        .collect();
    let (m, se) = mean_se(&values);
    report(
        4,
        "Le Cam shift",
        (m - tau2).abs() <= 4.0 * se,
        format!("mean={m:.4} tau2={tau2:.4} se={se:.4}"),
    );
}

#[test]
fn criterion_05_exact_error_absorption() {
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        any::<u64>(),
        10usize..600,
        -0.95f64..0.95,
        0.1f64..8.0,
        -2.0f64..2.0,
        -0.3f64..0.3,
        -3.0f64..3.0,
    );
    let worst = std::cell::Cell::new(0.0f64);
    let outcome = runner.run(&strategy, |(seed, n, rho0, coef, a, b, c1)| {
        let spec = ModelSpec::ar1(rho0, PerturbationSpec::reciprocal_quadratic(coef, a), n);
        let hypothesis = if a == 0.0 { Hypothesis::Null } else { Hypothesis::LocalAlternative };
        let sample = simulate(&spec.under(hypothesis), StreamId::new(seed)).unwrap();
        let test_spec = spec.with_amplitude(if a == 0.0 { 1.0 } else { a });
        let rho_hat = lse(&sample).unwrap();
        let c1 = C1Estimate {
            value: c1,
            source: C1Source::Analytic,
        };
        let r = modified_estimate_univariate(&sample, &test_spec, rho_hat, BiasEstimate::bootstrap(b), c1).unwrap();
        if r.degenerate {
            return Ok(());
        }
        let at_bar = central_seq(&sample, r.rho_bar, &test_spec).unwrap().value;
        let at_hat = central_seq(&sample, rho_hat, &test_spec).unwrap().value;
        let err = (at_bar - at_hat - r.d_n).abs();
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-12, "residual {err:e}");
        Ok(())
    });
    report(
        5,
        "exact error absorption",
        outcome.is_ok(),
        format!("10000 cases, worst residual {:.2e}, outcome {outcome:?}", worst.get()),
    );
}

#[test]
fn criterion_06_me_tracks_true_param() {
    let curve = ar1_preset();
    let max_gap = |v: Variant| {
        curve
            .curve(400, v)
            .iter()
            .map(|r| (r.rejection_rate - curve.row(400, r.a, Variant::TrueParam).unwrap().rejection_rate).abs())
            .fold(0.0, f64::max)
    };
    let (me, lse_gap) = (max_gap(Variant::Me), max_gap(Variant::Lse));
    report(
        6,
        "M.E. curve close to true-parameter curve at n=400",
        me <= 0.05 && me <= lse_gap,
        format!("max|me-true|={me:.3} max|lse-true|={lse_gap:.3}"),
    );
}

#[test]
fn criterion_07_asymptotic_power_formula() {
    let curve = ar1_preset();
    let alpha = curve.alpha;
    let moments = gaussian_noise_moments();
    let (mut worst, mut worst_a, mut worst_tau_form) = (f64::NEG_INFINITY, 0.0, 0.0f64);
    for r in curve.curve(400, Variant::TrueParam) {
        let tau2 = tau2_analytic(&ar1_spec(r.a, 400), &moments).unwrap().value;
        let tau2_form = asymptotic_power(alpha, tau2).unwrap();
        let slack = (r.rejection_rate - tau2_form).abs() - (4.0 * r.mc_stderr + 0.03);
        if slack > worst {
            worst = slack;
            worst_a = r.a;
        }
        let tau_form = normalized_statistic_power(alpha, tau2).unwrap();
        worst_tau_form = worst_tau_form.max((r.rejection_rate - tau_form).abs() - (4.0 * r.mc_stderr + 0.03));
    }
    report(
        7,
        "asymptotic power 1 - Phi(Z - tau^2)",
        worst <= 0.0,
        format!(
            "worst excess over tolerance {worst:.3} at a={worst_a}; \
             with 1 - Phi(Z - tau) the worst excess is {worst_tau_form:.3}"
        ),
    );
}

#[test]
fn criterion_08_arch_gradient_oracle() {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for pair in 0..100u64 {
        let stream = StreamId::new(808).derive(pair);
        let mut rng = stream.derive(99).rng();
        let rho0 = rng.random_range(-0.8..0.8);
        let rho = rho0 + rng.random_range(-0.2..0.2);
        let coef = rng.random_range(0.5..3.5);
        let n = 50 + (pair as usize * 37) % 400;
        let g = PerturbationSpec::reciprocal_quadratic(coef, 1.0);
        let spec = ModelSpec::arch(rho0, g, g, n);
        let sample: SeriesSample = simulate(&spec, stream).unwrap();
        let d1 = central_seq_arch(&sample, rho, &g, &g).unwrap().d1;
        let plus = central_seq_arch(&sample, rho + h, &g, &g).unwrap().value;
        let minus = central_seq_arch(&sample, rho - h, &g, &g).unwrap().value;
        let fd = (plus - minus) / (2.0 * h);
        worst = worst.max((fd - d1).abs() / d1.abs().max(f64::MIN_POSITIVE));
    }
    report(
        8,
        "ARCH gradient vs central differences",
        worst <= 1e-6,
        format!("100 pairs, worst relative error {worst:.2e}"),
    );
}

#[test]
fn criterion_09_root_n_consistency() {
    let mut sds = Vec::new();
    for (k, n) in [100usize, 400, 1600].into_iter().enumerate() {
        let spec = ar1_spec(1.0, n);
        let null = spec.with_amplitude(0.0);
        let scaled: Vec<f64> = (0..1000u64)
            .map(|rep| {
                let stream = StreamId::new(909).derive(k as u64).derive(rep);
                let sample = simulate(&null, stream).unwrap();
                let rho_hat = lse(&sample).unwrap();
                let b = bootstrap_bias(&sample, 500, stream.derive(1)).unwrap();
                let c1 = C1Estimate {
                    value: c1_empirical(&sample, &spec.g).unwrap(),
                    source: C1Source::Empirical,
                };
                let r = modified_estimate_univariate(&sample, &spec, rho_hat, BiasEstimate::bootstrap(b), c1).unwrap();
                (n as f64).sqrt() * (r.rho_bar - spec.rho0)
            })
            .collect();
        sds.push(sample_sd(&scaled));
    }
    let ratio = sds.iter().cloned().fold(0.0, f64::max) / sds.iter().cloned().fold(f64::INFINITY, f64::min);
    report(
        9,
        "root-n consistency of the modified estimate",
        ratio < 1.5,
        format!("sd at n=100,400,1600: {:.3} {:.3} {:.3}; ratio {ratio:.3}", sds[0], sds[1], sds[2]),
    );
}

fn run_preset(preset: &str, dir: &Path, threads: &str) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_lanpower"))
        .args(["power", "--paper-figure", preset, "--out-dir"])
        .arg(dir)
        .env("LANPOWER_THREADS", threads)
        .output()
        .expect("spawn lanpower");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(dir.join("power.csv")).unwrap()
}

#[test]
fn criterion_10_determinism() {
    let mut details = Vec::new();
    let mut pass = true;
    for preset in ["ar1", "arch"] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_preset(preset, d1.path(), "1");
        let second = run_preset(preset, d2.path(), "4");
        let same = first == second;
        pass &= same;
        details.push(format!("{preset}: {} bytes, identical={same}", first.len()));
    }
    report(10, "determinism", pass, details.join("; "));
}
