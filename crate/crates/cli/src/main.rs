use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nc_hydrogen::basis::{build_mode_table, DEFAULT_K_MAX};
use nc_hydrogen::corrections::{
    correction_table, delta_e_ns, delta_e_ns_prior, s1s_abel, s1s_integral, theta_prime_mean,
    AbelReport, AbelSeriesConfig, EnergyCorrection, NcParameters, PhysicalConstants, S1sEstimate,
    DEFAULT_INTEGRAL_TOLERANCE,
};
use nc_hydrogen::regularized::EtaSchedule;
use nc_hydrogen::verification::{run_battery, Check, VerifyConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use nc_hydrogen::Error;

mod format;

use format::sig;

#[derive(Parser, Debug)]
#[command(
    name = "nc-hydrogen",
    version,
    about = "ns-level shifts of hydrogen in rotationally invariant noncommutative space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Significant digits for printed numbers
    #[arg(long, default_value_t = 6, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute S1s(0)
    S1s(S1sArgs),
    /// Energy shift of one ns level
    Correction(CorrectionArgs),
    /// Energy shifts for n = 1..n_max
    Table(TableArgs),
    /// Monte Carlo estimate of <|a' x b'|>
    Theta(ThetaArgs),
    /// Run the identity and oracle battery
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Integral,
    Abel,
    Both,
}

#[derive(Args, Debug)]
struct S1sArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Integral)]
    method: MethodArg,
    /// Comma-separated η schedule for the abel route
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = DEFAULT_INTEGRAL_TOLERANCE, allow_negative_numbers = true)]
    tolerance: f64,
    /// Last series index for the abel route
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
}

#[derive(Args, Debug, Clone, Copy)]
struct StrengthArgs {
    /// Noncommutativity constant α
    #[arg(
        long,
        default_value_t = 1.0,
        conflicts_with = "chi",
        allow_negative_numbers = true
    )]
    alpha: f64,
    /// Set χ directly instead of deriving it from α
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Also report shifts in eV
    #[arg(long)]
    ev: bool,
}

#[derive(Args, Debug)]
struct CorrectionArgs {
    #[command(flatten)]
    strength: StrengthArgs,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    strength: StrengthArgs,
    #[arg(long, default_value_t = 10)]
    n_max: u32,
}

#[derive(Args, Debug)]
struct ThetaArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Absolute quadrature tolerance for the integral route
    #[arg(long, default_value_t = DEFAULT_INTEGRAL_TOLERANCE)]
    tolerance: f64,
    /// Write the oscillator mode table as CSV
    #[arg(long, value_name = "PATH")]
    dump_modes: Option<PathBuf>,
    /// Last mode index in the dumped table
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InvalidParameters(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failed(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(format!("CSV error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(format!("JSON error: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

struct Ctx {
    format: Format,
    precision: usize,
    out: Box<dyn Write>,
}

impl Ctx {
    fn num(&self, x: f64) -> String {
        sig(x, self.precision)
    }

    fn json<T: Serialize>(&mut self, value: &T) -> CliResult {
        serde_json::to_writer_pretty(&mut self.out, value)?;
        writeln!(self.out)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` means a check ran but missed its tolerance.
fn run(cli: Cli) -> CliResult<bool> {
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let mut ctx = Ctx {
        format: cli.format,
        precision: cli.precision as usize,
        out,
    };
    let ok = match cli.command {
        Command::S1s(args) => cmd_s1s(&mut ctx, &args)?,
        Command::Correction(args) => cmd_correction(&mut ctx, &args)?,
        Command::Table(args) => cmd_table(&mut ctx, &args)?,
        Command::Theta(args) => cmd_theta(&mut ctx, &args)?,
        Command::Verify(args) => cmd_verify(&mut ctx, &args)?,
    };
    ctx.out.flush()?;
    Ok(ok)
}

fn positive(name: &str, v: f64) -> CliResult {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::Usage(format!(
            "--{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct S1sReport {
    integral: Option<S1sEstimate>,
    abel: Option<AbelReport>,
    discrepancy: Option<f64>,
}

fn cmd_s1s(ctx: &mut Ctx, args: &S1sArgs) -> CliResult<bool> {
    positive("tolerance", args.tolerance)?;
    let want_integral = matches!(args.method, MethodArg::Integral | MethodArg::Both);
    let want_abel = matches!(args.method, MethodArg::Abel | MethodArg::Both);

    let integral = want_integral
        .then(|| s1s_integral(args.tolerance))
        .transpose()?;
    let abel = if want_abel {
        let schedule = match &args.eta {
            Some(values) => EtaSchedule::from_values(values.clone())?,
            None => EtaSchedule::default(),
        };
        let config = AbelSeriesConfig {
            schedule,
            k_max: args.k_max,
            ..AbelSeriesConfig::default()
        };
        Some(s1s_abel(&config)?)
    } else {
        None
    };
    let discrepancy = match (&integral, &abel) {
        (Some(i), Some(a)) => Some((i.value - a.estimate.value).abs()),
        _ => None,
    };
    let report = S1sReport {
        integral,
        abel,
        discrepancy,
    };

    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut ctx.out);
            w.write_record(["method", "value", "error_estimate"])?;
            if let Some(i) = &report.integral {
                w.write_record([
                    "integral",
                    &sig(i.value, ctx.precision),
                    &sig(i.error_estimate, ctx.precision),
                ])?;
            }
            if let Some(a) = &report.abel {
                let e = &a.estimate;
                w.write_record([
                    "abel",
                    &sig(e.value, ctx.precision),
                    &sig(e.error_estimate, ctx.precision),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            if let Some(i) = &report.integral {
                writeln!(
                    ctx.out,
                    "integral  S1s(0) = {} ± {}",
                    ctx.num(i.value),
                    sig(i.error_estimate, 2)
                )?;
            }
            if let Some(a) = &report.abel {
                writeln!(ctx.out, "abel      eta        partial sum")?;
                for (eta, s) in a.sum.eta.iter().zip(&a.sum.partial_sums) {
                    writeln!(ctx.out, "          {:<10} {}", eta, ctx.num(*s))?;
                }
                let stages: Vec<String> = a.sum.stages.iter().map(|s| ctx.num(*s)).collect();
                writeln!(ctx.out, "          stages     {}", stages.join(" "))?;
                writeln!(
                    ctx.out,
                    "abel      S1s(0) = {} ± {}{}",
                    ctx.num(a.estimate.value),
                    sig(a.estimate.error_estimate, 2),
                    if a.sum.monotone {
                        ""
                    } else {
                        "  (stages not monotone)"
                    }
                )?;
            }
            if let Some(d) = report.discrepancy {
                writeln!(ctx.out, "discrepancy       = {}", sig(d, 3))?;
            }
        }
    }
    Ok(true)
}

fn parameters(strength: &StrengthArgs) -> CliResult<(NcParameters, PhysicalConstants)> {
    let constants = PhysicalConstants::from_env()?;
    let params = match strength.chi {
        Some(chi) => NcParameters::from_chi(chi, &constants)?,
        None => NcParameters::new(strength.alpha, &constants)?,
    };
    Ok((params, constants))
}

#[derive(Serialize)]
struct CorrectionRow {
    n: u32,
    delta_e_hartree: f64,
    ratio_to_level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_e_ev: Option<f64>,
}

fn rows_with_ev(rows: &[EnergyCorrection], ev: Option<f64>) -> Vec<CorrectionRow> {
    rows.iter()
        .map(|r| CorrectionRow {
            n: r.n,
            delta_e_hartree: r.delta_e_hartree,
            ratio_to_level: r.ratio_to_level,
            delta_e_ev: ev.map(|h| h * r.delta_e_hartree),
        })
        .collect()
}

fn write_rows(ctx: &mut Ctx, rows: &[CorrectionRow], params: &NcParameters) -> CliResult {
    match ctx.format {
        Format::Json => ctx.json(&rows)?,
        Format::Csv => {
            let with_ev = rows.iter().any(|r| r.delta_e_ev.is_some());
            let mut w = csv::Writer::from_writer(&mut ctx.out);
            let mut header = vec!["n", "delta_e_hartree", "ratio_to_level"];
            if with_ev {
                header.push("delta_e_ev");
            }
            w.write_record(&header)?;
            for r in rows {
                let mut rec = vec![
                    r.n.to_string(),
                    sig(r.delta_e_hartree, ctx.precision),
                    sig(r.ratio_to_level, ctx.precision),
                ];
                if let Some(ev) = r.delta_e_ev {
                    rec.push(sig(ev, ctx.precision));
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(
                ctx.out,
                "alpha = {}, chi = {}",
                ctx.num(params.alpha()),
                ctx.num(params.chi())
            )?;
            for r in rows {
                let mut line = format!(
                    "n = {:<2}  dE = {} e^2/a_B",
                    r.n,
                    ctx.num(r.delta_e_hartree)
                );
                if let Some(ev) = r.delta_e_ev {
                    line.push_str(&format!(" = {} eV", ctx.num(ev)));
                }
                line.push_str(&format!("  dE/|E_n| = {}", ctx.num(r.ratio_to_level)));
                writeln!(ctx.out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn cmd_correction(ctx: &mut Ctx, args: &CorrectionArgs) -> CliResult<bool> {
    let (params, constants) = parameters(&args.strength)?;
    let row = delta_e_ns(&params, args.n)?;
    let rows = rows_with_ev(&[row], args.strength.ev.then_some(constants.hartree_ev));
    write_rows(ctx, &rows, &params)?;
    Ok(true)
}

fn cmd_table(ctx: &mut Ctx, args: &TableArgs) -> CliResult<bool> {
    let (params, constants) = parameters(&args.strength)?;
    let table = correction_table(&params, args.n_max)?;
    let rows = rows_with_ev(&table, args.strength.ev.then_some(constants.hartree_ev));
    write_rows(ctx, &rows, &params)?;
    Ok(true)
}

fn cmd_theta(ctx: &mut Ctx, args: &ThetaArgs) -> CliResult<bool> {
    let e = theta_prime_mean(args.samples, args.seed)?;
    match ctx.format {
        Format::Json => ctx.json(&e)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut ctx.out);
            w.write_record(["mean", "std_error", "samples", "seed"])?;
            w.write_record([
                sig(e.mean, ctx.precision),
                sig(e.std_error, ctx.precision),
                e.samples.to_string(),
                e.seed.to_string(),
            ])?;
            w.flush()?;
        }
        Format::Text => writeln!(
            ctx.out,
            "<|a' x b'|> = {} ± {}  ({} samples, seed {})",
            ctx.num(e.mean),
            sig(e.std_error, 2),
            e.samples,
            e.seed
        )?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<Check>,
    prior_ratio: f64,
    passed: bool,
}

fn cmd_verify(ctx: &mut Ctx, args: &VerifyArgs) -> CliResult<bool> {
    positive("tolerance", args.tolerance)?;
    if let Some(path) = &args.dump_modes {
        let table = build_mode_table(args.k_max)?;
        table.write_csv(io::BufWriter::new(File::create(path)?))?;
    }
    let config = VerifyConfig {
        samples: args.samples,
        seed: args.seed,
        quadrature_tolerance: args.tolerance,
    };
    let checks = run_battery(&config);
    let passed = checks.iter().all(|c| c.passed);

    let unit = NcParameters::from_chi(1.0, &PhysicalConstants::default())?;
    let exact = delta_e_ns(&unit, 1)?.delta_e_hartree;
    let prior = delta_e_ns_prior(&unit, 1)?;
    let report = VerifyReport {
        checks,
        prior_ratio: prior / exact,
        passed,
    };

    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut ctx.out);
            w.write_record(["check", "status", "measured", "tolerance", "detail"])?;
            for c in &report.checks {
                w.write_record([
                    c.name.as_str(),
                    if c.passed { "PASS" } else { "FAIL" },
                    &sig(c.measured, 3),
                    &sig(c.tolerance, 3),
                    &c.detail,
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for c in &report.checks {
                writeln!(
                    ctx.out,
                    "{}  {:<34} {:>10} <= {:<9} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    sig(c.measured, 3),
                    sig(c.tolerance, 3),
                    c.detail
                )?;
            }
            writeln!(
                ctx.out,
                "info  chi=1, n=1: exact dE = {}, earlier approximate dE = {} (ratio {})",
                ctx.num(exact),
                ctx.num(prior),
                ctx.num(report.prior_ratio)
            )?;
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            writeln!(
                ctx.out,
                "{} of {} checks passed",
                report.checks.len() - failed,
                report.checks.len()
            )?;
        }
    }
    Ok(passed)
}
