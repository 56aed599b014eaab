//! Command-line front end: α-catenary solves, batch residual evaluation,
//! energy minimization, and classification, with CSV/JSON outputs suitable
//! for plotting and golden-file testing.
//!
//! Exit codes: 0 success, 2 validation failure, 3 nonconvergence or
//! singularity. Outputs are written only after a run completes, so a
//! validation failure never leaves partial files behind.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use smgeo::catenary::{integrate_catenary, shoot_catenary_bvp, CatenaryIvp, FunctionSample};
use smgeo::classify::{falsification_sweep, fit_catenary, ClassifyOpts, Family};
use smgeo::error::Error;
use smgeo::fieldio::{format_f64, write_field_csv, write_field_header, FieldHeader};
use smgeo::minimize::{el_residual_of_field, minimize_energy, EnergyDirection};
use smgeo::residuals::ResidualReport;
use smgeo::specfile::{parse_minimize_spec, parse_surface_spec};

#[derive(Parser)]
#[command(
    name = "smgeo",
    version,
    about = "Singular minimal (alpha-minimal) hypersurface numerics",
    after_help = "Worker threads honor the SMGEO_THREADS environment variable \
                  (default: available parallelism). Outputs are deterministic \
                  for a fixed seed regardless of the thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the alpha-catenary equation f''/(1+f'^2) = alpha/f
    Catenary(CatenaryArgs),
    /// Evaluate the singular-minimal residual of a surface spec over a grid
    Residual(ResidualArgs),
    /// Minimize the discrete potential alpha-energy of a Dirichlet field
    Minimize(MinimizeArgs),
    /// Classify a surface spec, or run a falsification sweep
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct CatenaryArgs {
    /// exponent alpha
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// f at the start of the interval (must be positive)
    #[arg(long, allow_hyphen_values = true)]
    f0: f64,
    /// initial slope (initial-value mode)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "f_end")]
    df0: Option<f64>,
    /// f at the end of the interval (boundary-value mode; solved by shooting)
    #[arg(long, allow_hyphen_values = true)]
    f_end: Option<f64>,
    /// start of the parameter interval
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    /// end of the parameter interval
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    /// integration step (initial-value mode)
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// shooting tolerance on the boundary miss (boundary-value mode)
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// fit (1/lambda)cosh(lambda s + mu) to the solution and print lambda, mu
    #[arg(long)]
    fit: bool,
    /// output CSV path ("-" for stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ResidualArgs {
    /// surface spec JSON path
    #[arg(long)]
    spec: PathBuf,
    /// pointwise CSV output path ("-" for stdout; omit to skip)
    #[arg(long)]
    out_csv: Option<String>,
    /// JSON summary path ("-" for stdout)
    #[arg(long, default_value = "-")]
    out_summary: String,
}

#[derive(Args)]
struct MinimizeArgs {
    /// minimize spec JSON path
    #[arg(long)]
    spec: PathBuf,
    /// converged field CSV path ("-" for stdout; omit to skip)
    #[arg(long)]
    out_field: Option<String>,
    /// field header JSON path (omit to skip)
    #[arg(long)]
    out_header: Option<String>,
    /// run report JSON path ("-" for stdout)
    #[arg(long, default_value = "-")]
    report: String,
}

#[derive(Args)]
struct ClassifyArgs {
    /// surface spec JSON path (single classification)
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    spec: Option<PathBuf>,
    /// run a falsification sweep with this many trials
    #[arg(long)]
    sweep: Option<usize>,
    /// family for the sweep: translation, affine, or cylinder
    #[arg(long, requires = "sweep")]
    family: Option<String>,
    /// alpha for the sweep
    #[arg(long, allow_hyphen_values = true, requires = "sweep")]
    alpha: Option<f64>,
    /// sweep seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// residual RMS tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// verdict / sweep report JSON path ("-" for stdout)
    #[arg(long, default_value = "-")]
    out: String,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catenary(args) => cmd_catenary(args),
        Command::Residual(args) => cmd_residual(args),
        Command::Minimize(args) => cmd_minimize(args),
        Command::Classify(args) => cmd_classify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("SMGEO_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Validation(_) | Error::Evaluation { .. } => 2,
        Error::Singular { .. }
        | Error::NoConvergence { .. }
        | Error::Halfspace { .. }
        | Error::Internal(_) => 3,
    }
}

fn write_output(path: &str, contents: &str) -> Result<(), Error> {
    if path == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(contents.as_bytes())
            .map_err(|e| Error::Internal(format!("stdout: {e}")))?;
        Ok(())
    } else {
        fs::write(path, contents).map_err(|e| Error::Validation(format!("write {path}: {e}")))
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Validation(format!("read {}: {e}", path.display())))
}

fn sample_to_csv(sample: &FunctionSample) -> String {
    let mut out = String::from("s,f,df\n");
    let derivs = sample.derivatives().unwrap_or(&[]);
    for i in 0..sample.len() {
        let df = derivs.get(i).copied().unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{},{}\n",
            format_f64(sample.abscissae()[i]),
            format_f64(sample.values()[i]),
            format_f64(df)
        ));
    }
    out
}

fn cmd_catenary(args: CatenaryArgs) -> Result<ExitCode, Error> {
    let sample = match args.f_end {
        Some(f_end) => {
            shoot_catenary_bvp(args.alpha, args.from, args.f0, args.to, f_end, args.tol)?
        }
        None => {
            let ivp = CatenaryIvp {
                alpha: args.alpha,
                s0: args.from,
                f0: args.f0,
                df0: args.df0.unwrap_or(0.0),
                s1: args.to,
                step: args.step,
            };
            integrate_catenary(&ivp)?
        }
    };
    let fit_line = if args.fit {
        let fit = fit_catenary(&sample)?;
        Some(format!(
            "lambda = {}, mu = {}, rms = {}\n",
            format_f64(fit.lambda),
            format_f64(fit.mu),
            format_f64(fit.rms)
        ))
    } else {
        None
    };
    write_output(&args.out, &sample_to_csv(&sample))?;
    if let Some(line) = fit_line {
        print!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ResidualSummary {
    rms: f64,
    max_abs: f64,
    samples: usize,
    domain_violations: usize,
}

fn report_to_csv(columns: &[String], report: &ResidualReport) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for (point, residual) in report.points.iter().zip(&report.residuals) {
        for c in point {
            out.push_str(&format_f64(*c));
            out.push(',');
        }
        out.push_str(&format_f64(*residual));
        out.push('\n');
    }
    out
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Internal(format!("json: {e}")))
}

fn cmd_residual(args: ResidualArgs) -> Result<ExitCode, Error> {
    let job = parse_surface_spec(&read_input(&args.spec)?)?;
    let report = job.evaluate()?;
    let summary = ResidualSummary {
        rms: report.rms,
        max_abs: report.max_abs,
        samples: report.sample_count(),
        domain_violations: report.domain_violations,
    };
    let csv = args
        .out_csv
        .as_ref()
        .map(|_| report_to_csv(&job.columns(), &report));
    let summary_json = to_json_pretty(&summary)?;
    if let (Some(path), Some(csv)) = (&args.out_csv, &csv) {
        write_output(path, csv)?;
    }
    write_output(&args.out_summary, &summary_json)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MinimizeReport {
    converged: bool,
    iterations: usize,
    final_gradient_norm: f64,
    energy_initial: f64,
    energy_final: f64,
    el_residual_rms: f64,
    el_residual_max: f64,
    el_domain_violations: usize,
    header: FieldHeader,
    energy_trace: Vec<f64>,
}

fn cmd_minimize(args: MinimizeArgs) -> Result<ExitCode, Error> {
    let job = parse_minimize_spec(&read_input(&args.spec)?)?;
    let outcome = minimize_energy(&job.field, &job.opts)?;
    let el = el_residual_of_field(&outcome.field, &job.opts)?;
    let u_name = match job.opts.direction {
        EnergyDirection::Vertical => "vertical",
        EnergyDirection::Horizontal => "horizontal",
    };
    let header = FieldHeader::for_field(&outcome.field, Some(job.opts.alpha), Some(u_name));
    let report = MinimizeReport {
        converged: outcome.converged,
        iterations: outcome.iterations,
        final_gradient_norm: outcome.final_gradient_norm,
        energy_initial: *outcome.energy_trace.first().unwrap_or(&f64::NAN),
        energy_final: *outcome.energy_trace.last().unwrap_or(&f64::NAN),
        el_residual_rms: el.rms,
        el_residual_max: el.max_abs,
        el_domain_violations: el.domain_violations,
        header,
        energy_trace: outcome.energy_trace.clone(),
    };
    let report_json = to_json_pretty(&report)?;
    if let Some(path) = &args.out_field {
        write_output(path, &write_field_csv(&outcome.field))?;
    }
    if let Some(path) = &args.out_header {
        write_output(path, &write_field_header(&report.header)?)?;
    }
    write_output(&args.report, &report_json)?;
    if outcome.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "did not reach gradient tolerance: final norm {}",
            outcome.final_gradient_norm
        );
        Ok(ExitCode::from(3))
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode, Error> {
    let mut opts = ClassifyOpts::default();
    if let Some(tol) = args.tol {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::validation("tol must be positive"));
        }
        opts.tol = tol;
    }
    let json = match (&args.spec, args.sweep) {
        (Some(path), None) => {
            let job = parse_surface_spec(&read_input(path)?)?;
            let classification = job.classify(Some(opts))?;
            to_json_pretty(&classification)?
        }
        (None, Some(trials)) => {
            let family = Family::from_str(
                args.family
                    .as_deref()
                    .ok_or_else(|| Error::validation("--sweep needs --family"))?,
            )?;
            let alpha = args
                .alpha
                .ok_or_else(|| Error::validation("--sweep needs --alpha"))?;
            let report = falsification_sweep(family, alpha, trials, args.seed, &opts)?;
            to_json_pretty(&report)?
        }
        _ => unreachable!("clap enforces spec xor sweep"),
    };
    write_output(&args.out, &json)?;
    Ok(ExitCode::SUCCESS)
}
