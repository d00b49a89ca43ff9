//! `cvtel` — evaluate continuous-variable teleportation channels from the
//! command line.
//!
//! Subcommands: `teleport` (one run), `sweep` (CSV grid over r × eta × gain),
//! `verify` (built-in self-checks), `security` (eavesdropper analysis).
//!
//! Exit codes: 0 success, 1 failed verification checks, 2 invalid flag
//! values, 3 unwritable output path.

mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cv_teleport::{
    classical_teleport, classify_regime, compare_eve_bob, epr_teleport, fidelity_closed_form,
    find_conditional_threshold, find_eve_crossover, symmetric_conditional_variance, Context,
    GaussianGuess, ProtocolConfig, TeleportReport,
};

#[derive(Parser)]
#[command(name = "cvtel", version, about = "Continuous-variable teleportation analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single teleportation run and report its noise budget.
    Teleport(TeleportArgs),
    /// Sweep a parameter grid and emit one CSV row per point.
    Sweep(SweepArgs),
    /// Run the built-in verification checks.
    Verify(VerifyArgs),
    /// Eavesdropper comparison, crossover and conditioning thresholds.
    Security(SecurityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    /// Measure both quadratures and displace a fresh vacuum.
    Classical,
    /// Feed the measurements forward onto one beam of an entangled pair.
    Epr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Aligned key/value report.
    Text,
    /// `key=value` lines for scripts.
    Structured,
    /// Comma-separated table (sweeps only).
    Csv,
}

#[derive(Args)]
struct TeleportArgs {
    /// Teleportation scheme to run.
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Squeezing parameter of the entangled source (epr scheme).
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Transmission of both arms (epr scheme); overridden per arm below.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Transmission of the sender-side arm.
    #[arg(long)]
    eta_alice: Option<f64>,
    /// Transmission of the receiver-side arm.
    #[arg(long)]
    eta_bob: Option<f64>,
    /// Feedforward gain (epr scheme; classical runs at unity gain).
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    /// Input coherent amplitude as `x,y` (means of the two quadratures).
    #[arg(long, value_parser = parse_alpha, default_value = "1,1")]
    alpha: (f64, f64),
    /// Write the report to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Squeezing values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<f64>,
    /// Arm transmission values, comma separated; applied to both arms unless
    /// one arm is pinned below.
    #[arg(long, value_delimiter = ',', required = true)]
    eta: Vec<f64>,
    /// Pin the sender-side arm to a fixed transmission.
    #[arg(long)]
    eta_alice: Option<f64>,
    /// Pin the receiver-side arm to a fixed transmission.
    #[arg(long)]
    eta_bob: Option<f64>,
    /// Gain values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    gain: Vec<f64>,
    /// Input coherent amplitude as `x,y`.
    #[arg(long, value_parser = parse_alpha, default_value = "1,1")]
    alpha: (f64, f64),
    /// Recorded sample budget for downstream Monte Carlo consumers.
    #[arg(long, default_value_t = 100_000)]
    mc_samples: usize,
    /// Seed recorded with the sweep; the rows themselves are closed-form.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (sweeps are always CSV).
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Monte Carlo samples per statistical check (at least 1000).
    #[arg(long, default_value_t = 100_000)]
    mc_samples: usize,
    /// Seed for every randomized check.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Absolute tolerance for the closed-form checks.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

#[derive(Args)]
struct SecurityArgs {
    /// Squeezing parameter of the entangled source.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Transmission of both arms; overridden per arm below.
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Transmission of the sender-side arm.
    #[arg(long)]
    eta_alice: Option<f64>,
    /// Transmission of the receiver-side arm (the tapped one).
    #[arg(long)]
    eta_bob: Option<f64>,
    /// Feedforward gain used by both the receiver and the eavesdropper.
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    /// Also locate the receiver-arm efficiency where Eve stops winning.
    #[arg(long)]
    crossover: bool,
    /// Also report the conditional variance of one beam given the other at
    /// symmetric arm transmission `eta`, and its sub-shot-noise threshold.
    #[arg(long)]
    conditional: bool,
    /// Write the report to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn unwritable(path: &PathBuf, err: std::io::Error) -> Self {
        CliError {
            code: 3,
            message: format!("cannot write {}: {err}", path.display()),
        }
    }

    fn checks_failed(failed: usize) -> Self {
        CliError {
            code: 1,
            message: format!("{failed} verification check(s) failed"),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Teleport(args) => cmd_teleport(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Security(args) => cmd_security(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}

/// Twelve significant digits, the precision every numeric field is printed
/// with so closed-form values survive a parse round-trip.
fn g12(x: f64) -> String {
    format!("{:.11e}", x)
}

fn parse_alpha(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((x, y))
}

fn render_rows(rows: &[(&str, String)], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (key, value) in rows {
                let _ = writeln!(out, "{key:width$}  {value}");
            }
        }
        Format::Structured => {
            for (key, value) in rows {
                let _ = writeln!(out, "{key}={value}");
            }
        }
        Format::Csv => unreachable!("csv is rendered by the sweep writer"),
    }
    out
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, content).map_err(|e| CliError::unwritable(path, e))?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn resolve_arms(eta: f64, eta_alice: Option<f64>, eta_bob: Option<f64>) -> (f64, f64) {
    (eta_alice.unwrap_or(eta), eta_bob.unwrap_or(eta))
}

fn build_config(r: f64, eta_alice: f64, eta_bob: f64, gain: f64) -> Result<ProtocolConfig, CliError> {
    let config = ProtocolConfig::new(r, eta_alice, eta_bob, gain)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    if gain == 0.0 {
        return Err(CliError::invalid("gain must be nonzero"));
    }
    Ok(config)
}

/// Closed-form fidelity of a report against the sent state, from the output
/// means and the input-referred noises. Exact at unity gain, where the means
/// match and the formula reduces to the noise-only expression.
fn report_fidelity(report: &TeleportReport, alpha: (f64, f64)) -> f64 {
    let guess = GaussianGuess::new(
        report.mean_x_out,
        report.mean_y_out,
        report.n_x_out,
        report.n_y_out,
    )
    .expect("reported noises are nonnegative");
    fidelity_closed_form(&guess, alpha.0, alpha.1)
}

fn cmd_teleport(args: TeleportArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(CliError::invalid(
            "csv is for sweeps; use --format text or structured",
        ));
    }
    let (eta_alice, eta_bob) = resolve_arms(args.eta, args.eta_alice, args.eta_bob);
    let mut rows: Vec<(&str, String)> = Vec::new();
    let report = match args.scheme {
        Scheme::Classical => {
            if args.gain != 1.0 {
                return Err(CliError::invalid("the classical scheme runs at unity gain"));
            }
            let mut ctx = Context::new();
            let input = ctx.coherent(args.alpha.0, args.alpha.1);
            let report = classical_teleport(&mut ctx, &input)
                .map_err(|e| CliError::invalid(e.to_string()))?;
            rows.push(("scheme", "classical".into()));
            report
        }
        Scheme::Epr => {
            let config = build_config(args.r, eta_alice, eta_bob, args.gain)?;
            let mut ctx = Context::new();
            let input = ctx.coherent(args.alpha.0, args.alpha.1);
            let report = epr_teleport(&mut ctx, &input, &config)
                .map_err(|e| CliError::invalid(e.to_string()))?;
            rows.push(("scheme", "epr".into()));
            rows.push(("r", g12(args.r)));
            rows.push(("eta_alice", g12(eta_alice)));
            rows.push(("eta_bob", g12(eta_bob)));
            report
        }
    };
    let fidelity = report_fidelity(&report, args.alpha);
    let regime = classify_regime(fidelity).expect("closed-form fidelity is in (0, 1]");
    rows.push(("gain", g12(report.gain)));
    rows.push(("alpha_x", g12(args.alpha.0)));
    rows.push(("alpha_y", g12(args.alpha.1)));
    rows.push(("n_x_out", g12(report.n_x_out)));
    rows.push(("n_y_out", g12(report.n_y_out)));
    rows.push(("mean_x_out", g12(report.mean_x_out)));
    rows.push(("mean_y_out", g12(report.mean_y_out)));
    rows.push(("fidelity", g12(fidelity)));
    rows.push(("regime", regime.to_string()));
    emit(args.out.as_ref(), &render_rows(&rows, args.format))
}

const SWEEP_HEADER: &str =
    "r,eta_alice,eta_bob,gain,n_x_out,n_y_out,fidelity,n_eve_total,n_bob_total,eve_wins,regime";

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.format != Format::Csv {
        return Err(CliError::invalid("sweeps always emit csv; use --format csv"));
    }
    if args.r.is_empty() || args.eta.is_empty() || args.gain.is_empty() {
        return Err(CliError::invalid("value lists must be non-empty"));
    }
    if args.mc_samples == 0 {
        return Err(CliError::invalid("mc-samples must be positive"));
    }

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    // Deterministic grid order: r outer, eta middle, gain inner.
    for &r in &args.r {
        for &eta in &args.eta {
            let (eta_alice, eta_bob) = resolve_arms(eta, args.eta_alice, args.eta_bob);
            for &gain in &args.gain {
                let config = build_config(r, eta_alice, eta_bob, gain)?;
                let mut ctx = Context::new();
                let input = ctx.coherent(args.alpha.0, args.alpha.1);
                let report = epr_teleport(&mut ctx, &input, &config)
                    .map_err(|e| CliError::invalid(e.to_string()))?;
                let fidelity = report_fidelity(&report, args.alpha);
                let regime = classify_regime(fidelity).expect("fidelity is in (0, 1]");
                let eve = compare_eve_bob(&config).map_err(|e| CliError::invalid(e.to_string()))?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    g12(r),
                    g12(eta_alice),
                    g12(eta_bob),
                    g12(gain),
                    g12(report.n_x_out),
                    g12(report.n_y_out),
                    g12(fidelity),
                    g12(eve.n_x_eve + eve.n_y_eve),
                    g12(eve.n_x_bob + eve.n_y_bob),
                    eve.eve_wins,
                    regime
                );
            }
        }
    }
    emit(args.out.as_ref(), &csv)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.mc_samples < 1000 {
        return Err(CliError::invalid("mc-samples must be at least 1000"));
    }
    if !(args.tolerance > 0.0) {
        return Err(CliError::invalid("tolerance must be positive"));
    }
    let checks = verify::run_all(args.mc_samples, args.seed, args.tolerance);
    let mut failed = 0;
    let mut worst: Option<&verify::Check> = None;
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        println!("{status}  {:<26} {}", check.name, check.detail);
        if !check.pass {
            failed += 1;
        }
        if worst.map_or(true, |w| check.severity > w.severity) {
            worst = Some(check);
        }
    }
    if let Some(worst) = worst {
        println!(
            "worst deviation: {} ({})",
            worst.name,
            worst.detail
        );
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::checks_failed(failed));
    }
    Ok(())
}

fn cmd_security(args: SecurityArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(CliError::invalid(
            "csv is for sweeps; use --format text or structured",
        ));
    }
    let (eta_alice, eta_bob) = resolve_arms(args.eta, args.eta_alice, args.eta_bob);
    let config = build_config(args.r, eta_alice, eta_bob, args.gain)?;

    let mut ctx = Context::new();
    let alpha = (1.0, 1.0);
    let input = ctx.coherent(alpha.0, alpha.1);
    let bob = epr_teleport(&mut ctx, &input, &config).map_err(|e| CliError::invalid(e.to_string()))?;
    let eve = compare_eve_bob(&config).map_err(|e| CliError::invalid(e.to_string()))?;
    let fidelity = report_fidelity(&bob, alpha);
    let regime = classify_regime(fidelity).expect("fidelity is in (0, 1]");

    let mut rows: Vec<(&str, String)> = vec![
        ("r", g12(args.r)),
        ("eta_alice", g12(eta_alice)),
        ("eta_bob", g12(eta_bob)),
        ("gain", g12(args.gain)),
        ("n_x_bob", g12(eve.n_x_bob)),
        ("n_y_bob", g12(eve.n_y_bob)),
        ("n_x_eve", g12(eve.n_x_eve)),
        ("n_y_eve", g12(eve.n_y_eve)),
        ("eve_wins", eve.eve_wins.to_string()),
        ("fidelity_bob", g12(fidelity)),
        ("regime", regime.to_string()),
    ];

    if args.crossover {
        let eta_star =
            find_eve_crossover(args.r, 1e-9).map_err(|e| CliError::invalid(e.to_string()))?;
        rows.push(("crossover_eta_bob", g12(eta_star)));
    }
    if args.conditional {
        let cv = symmetric_conditional_variance(args.r, args.eta);
        rows.push(("conditional_variance", g12(cv)));
        rows.push(("sub_shot_noise", (cv < 1.0).to_string()));
        let threshold = find_conditional_threshold(args.r, 1e-9)
            .map_err(|e| CliError::invalid(e.to_string()))?;
        rows.push(("conditional_threshold_eta", g12(threshold)));
    }
    emit(args.out.as_ref(), &render_rows(&rows, args.format))
}
