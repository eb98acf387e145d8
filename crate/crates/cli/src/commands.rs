//! Subcommand definitions and handlers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use lanpower_core::stats::{mean_se, summarize};
use lanpower_core::{
    bootstrap_bias, c1_analytic, c1_empirical, central_seq, lse, modified_estimate_univariate, power_study,
    simulate, BiasEstimate, BiasMode, C1Estimate, C1Mode, C1Source, Error, Family, Hypothesis, ModelSpec,
    PerturbationSpec, StreamId,
};

use crate::config::{parse_family, PowerSettings, RawConfig};
use crate::csv::{power_csv, series_csv, write_file};
use crate::format::fmt_g;
use crate::svg::power_plot;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "lanpower", version, about = "LAN-based tests for AR(1)- and ARCH-contiguous series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one series and write it as CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo power study.
    Power(PowerArgs),
    /// Report estimator diagnostics per sample size.
    Diagnose(PowerArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "ar1")]
    pub family: String,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub rho0: f64,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Perturbation amplitude.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Perturbation coefficient; defaults to 5 for ar1 and 3.5 for arch.
    #[arg(long, allow_negative_numbers = true)]
    pub coef: Option<f64>,
    /// `null` or `alt`; defaults to `alt` when `a` is nonzero.
    #[arg(long)]
    pub hypothesis: Option<String>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value = "series.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct PowerArgs {
    /// Flat key = value configuration file.
    pub config: Option<PathBuf>,
    /// Start from a built-in preset.
    #[arg(long, value_name = "ar1|arch")]
    pub paper_figure: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub coef: Option<f64>,
    /// Comma-separated amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub a_grid: Option<String>,
    /// `lo:hi:count`
    #[arg(long, allow_hyphen_values = true)]
    pub a_range: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated subset of true_param, lse, me.
    #[arg(long)]
    pub variants: Option<String>,
    #[arg(long)]
    pub b_mode: Option<String>,
    #[arg(long)]
    pub c1_mode: Option<String>,
    #[arg(long)]
    pub bootstrap_reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Write one SVG per sample size.
    #[arg(long)]
    pub plot: bool,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate_cmd(&args),
        Command::Power(args) => power_cmd(&args),
        Command::Diagnose(args) => diagnose_cmd(&args),
    }
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let coef = args.coef.unwrap_or(match family {
        Family::Ar1 => 5.0,
        Family::Arch => 3.5,
    });
    let hypothesis = match args.hypothesis.as_deref() {
        None if args.a == 0.0 => Hypothesis::Null,
        None => Hypothesis::LocalAlternative,
        Some("null") => Hypothesis::Null,
        Some("alt") => Hypothesis::LocalAlternative,
        Some(other) => return Err(CliError::Usage(format!("unknown hypothesis '{other}' (null|alt)"))),
    };
    let g = PerturbationSpec::reciprocal_quadratic(coef, args.a);
    let mut spec = match family {
        Family::Ar1 => ModelSpec::ar1(args.rho0, g, args.n),
        Family::Arch => ModelSpec::arch(args.rho0, g, g, args.n),
    }
    .under(hypothesis);
    if let Some(burn_in) = args.burn_in {
        spec = spec.with_burn_in(burn_in);
    }
    spec.validate()?;
    let sample = simulate(&spec, StreamId::new(args.seed))?;
    ensure_parent(&args.out)?;
    write_file(&args.out, &series_csv(&sample))
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    let s = summarize(&sample.values);
    println!("mean,{}", fmt_g(s.mean));
    println!("variance,{}", fmt_g(s.variance));
    println!("lag1_autocorrelation,{}", fmt_g(s.lag1_autocorrelation));
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => ensure_dir(dir),
        _ => Ok(()),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".lanpower-write-probe");
    std::fs::write(&probe, b"")
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e| CliError::Usage(format!("{} is not writable: {e}", dir.display())))
}

/// Preset, then config file, then flags.
pub fn resolve_settings(args: &PowerArgs) -> Result<PowerSettings, CliError> {
    let raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let preset = match (&args.paper_figure, raw.get("preset"), raw.get("family")) {
        (Some(f), _, _) => parse_family(f)?,
        (None, Some(f), _) => parse_family(f)?,
        (None, None, Some(f)) => parse_family(f)?,
        _ => Family::Ar1,
    };
    let mut settings = PowerSettings::from_preset(preset);
    settings.apply(&raw)?;

    let flags: [(&str, Option<String>); 14] = [
        ("family", args.family.clone()),
        ("rho0", args.rho0.map(|v| v.to_string())),
        ("coefficient", args.coef.map(|v| v.to_string())),
        ("amplitude_grid", args.a_grid.clone()),
        ("amplitude_range", args.a_range.clone()),
        ("n_list", args.n_list.clone()),
        ("m", args.m.map(|v| v.to_string())),
        ("alpha", args.alpha.map(|v| v.to_string())),
        ("variants", args.variants.clone()),
        ("b_mode", args.b_mode.clone()),
        ("c1_mode", args.c1_mode.clone()),
        ("bootstrap_reps", args.bootstrap_reps.map(|v| v.to_string())),
        ("master_seed", args.seed.map(|v| v.to_string())),
        ("burn_in", args.burn_in.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            settings.set(key, &value)?;
        }
    }
    if let Some(dir) = &args.out_dir {
        settings.out_dir = dir.clone();
    }
    settings.plot |= args.plot;
    settings.study.validate()?;
    Ok(settings)
}

pub fn power_cmd(args: &PowerArgs) -> Result<(), CliError> {
    let settings = resolve_settings(args)?;
    ensure_dir(&settings.out_dir)?;
    let csv_path = settings.out_dir.join("power.csv");
    let failed_marker = settings.out_dir.join("power.csv.failed");
    let write = |path: &Path, text: &str| {
        write_file(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    };

    match power_study(&settings.study) {
        Ok(curve) => {
            if failed_marker.exists() {
                let _ = std::fs::remove_file(&failed_marker);
            }
            write(&csv_path, &power_csv(&curve))?;
            if settings.plot {
                for &n in &curve.n_list {
                    write(&settings.out_dir.join(format!("power_n{n}.svg")), &power_plot(&curve, n))?;
                }
            }
            println!("wrote {}", csv_path.display());
            Ok(())
        }
        Err(Error::TooManyFailures {
            failed,
            attempted,
            partial,
        }) => {
            write(&csv_path, &power_csv(&partial))?;
            let message = format!("aborted: {failed} of {attempted} replicate evaluations failed\n");
            write(&failed_marker, &message)?;
            Err(CliError::Runtime(message.trim_end().to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

struct DiagnoseReplicate {
    c1: f64,
    d2_scaled_bound: f64,
    degenerate: bool,
}

/// Per-n diagnostics on null data with the unit-amplitude test direction.
pub fn diagnose_cmd(args: &PowerArgs) -> Result<(), CliError> {
    let study = resolve_settings(args)?.study;
    println!("n,m,c1_mean,c1_stderr,c1_analytic,d2_scaled_bound,d2_bound_over_sqrt_n,degenerate_rate,failures");
    for (n_index, &n) in study.n_list.iter().enumerate() {
        let test_spec = study.base_spec(n).with_amplitude(1.0);
        let data_spec = test_spec.with_amplitude(0.0);
        let c1_exact = c1_analytic(&test_spec)?;
        let results: Vec<Result<DiagnoseReplicate, Error>> = (0..study.m)
            .into_par_iter()
            .map(|rep| {
                let stream = study.replicate_stream(n_index, 0, rep);
                let sample = simulate(&data_spec, stream)?;
                let rho_hat = lse(&sample)?;
                let c1 = c1_empirical(&sample, &test_spec.g)?;
                let eval = central_seq(&sample, rho_hat, &test_spec)?;
                let b = match study.b_mode {
                    BiasMode::Oracle => BiasEstimate::oracle(rho_hat, study.rho0),
                    BiasMode::Bootstrap => {
                        BiasEstimate::bootstrap(bootstrap_bias(&sample, study.bootstrap_reps, stream.derive(1))?)
                    }
                };
                let c1_used = match study.c1_mode {
                    C1Mode::Analytic => C1Estimate {
                        value: c1_exact,
                        source: C1Source::Analytic,
                    },
                    C1Mode::Empirical => C1Estimate {
                        value: c1,
                        source: C1Source::Empirical,
                    },
                };
                let report = modified_estimate_univariate(&sample, &test_spec, rho_hat, b, c1_used)?;
                Ok(DiagnoseReplicate {
                    c1,
                    d2_scaled_bound: eval.d2_scaled_bound,
                    degenerate: report.degenerate,
                })
            })
            .collect();
        let ok: Vec<&DiagnoseReplicate> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        let failures = results.len() - ok.len();
        let c1s: Vec<f64> = ok.iter().map(|r| r.c1).collect();
        let (c1_mean, c1_se) = mean_se(&c1s);
        let bound = ok.iter().map(|r| r.d2_scaled_bound).sum::<f64>() / ok.len().max(1) as f64;
        let degenerate = ok.iter().filter(|r| r.degenerate).count() as f64 / ok.len().max(1) as f64;
        println!(
            "{n},{},{},{},{},{},{},{},{failures}",
            ok.len(),
            fmt_g(c1_mean),
            fmt_g(c1_se),
            fmt_g(c1_exact),
            fmt_g(bound),
            fmt_g(bound / (n as f64).sqrt()),
            fmt_g(degenerate)
        );
    }
    Ok(())
}
