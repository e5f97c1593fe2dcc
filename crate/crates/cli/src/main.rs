//! Command-line front end: single-point evaluations, correlation sweeps,
//! qubit scans, and the self-validation suite.

mod config;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CommandKind, OutputFormat, PartialConfig, RunConfig, StateKind};
use entfi::{
    averaged_qubit_fisher, channel_matrix, closed_form_en, closed_form_fisher, correlation_sweep,
    en_from_fisher, f_factor, fisher_information, ln_qubit, log_negativity, log_negativity_mixture,
    log_negativity_pure, make_photon_subtracted_mixed, make_photon_subtracted_pure,
    make_qubit_state, make_squeezed, mutual_information, onoff_success_probability,
    BeamSplitterSpec, BellSource, EnKind, QubitEntangledState, SweepConfig, SweepKind,
    TruncationSpec,
};
use output::{fmt_sig9, write_sweep_csv, write_sweep_json};

#[derive(Parser)]
#[command(
    name = "entfi",
    version,
    about = "Continuous-variable entanglement via logarithmic negativity and QPSK Fisher information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one state: Fisher information, negativity, predictors
    Point(PointArgs),
    /// Correlation sweep over photon-subtracted pure states (closed forms)
    SweepPure(SweepArgs),
    /// Correlation sweep over on/off-heralded mixed states (fully numeric)
    SweepMixed(SweepArgs),
    /// Photon-number-qubit scan: phi-averaged Fisher information vs negativity
    Qubit(QubitArgs),
    /// Run the oracle/cross-check suite; exit 0 iff every check passes
    Validate(ValidateArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fock cutoff override (auto-selected from lambda when absent)
    #[arg(long)]
    n_max: Option<usize>,
    /// Maximum neglected probability weight for auto truncation
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Relative weight below which mixture components are dropped
    #[arg(long)]
    component_tol: Option<f64>,
    /// Gauss-Legendre points per axis per quadrant
    #[arg(long)]
    quad_points: Option<usize>,
    /// Integration half-width (auto-grown when absent)
    #[arg(long)]
    half_width: Option<f64>,
    /// Central-difference step for the beta derivative
    #[arg(long)]
    deriv_step: Option<f64>,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Print the resolved configuration as canonical JSON before running
    #[arg(long, default_value_t = false)]
    print_config: bool,
}

#[derive(Args, Default)]
struct PointArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Squeezing parameter lambda = tanh r
    #[arg(long)]
    lambda: Option<f64>,
    /// Tap transmittance (required for the ng-* kinds)
    #[arg(long)]
    transmittance: Vec<f64>,
    /// State family
    #[arg(long, value_enum)]
    kind: Option<StateKind>,
    /// Signal amplitude; when given, also reports the mutual information
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Default)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    lambda_start: Option<f64>,
    #[arg(long)]
    lambda_stop: Option<f64>,
    #[arg(long)]
    lambda_count: Option<usize>,
    /// Tap transmittance; repeat for several values
    #[arg(long)]
    transmittance: Vec<f64>,
}

#[derive(Args, Default)]
struct QubitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Mixedness t of the qubit state
    #[arg(long = "t")]
    qubit_t: Option<f64>,
    /// |c0| of the qubit state; leave unset to sweep a grid
    #[arg(long = "c0")]
    qubit_c0: Option<f64>,
    /// Number of phi grid points for the average
    #[arg(long)]
    n_phi: Option<usize>,
}

#[derive(Args, Default)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Entfi(entfi::Error),
    Io(std::io::Error),
    Usage(String),
    ValidationFailed,
}

impl From<entfi::Error> for CliError {
    fn from(e: entfi::Error) -> Self {
        CliError::Entfi(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Entfi(entfi::Error::Domain(_)) => 2,
            CliError::Entfi(entfi::Error::Numeric(_)) => 3,
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::ValidationFailed => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Entfi(e) => e.to_string(),
            CliError::Io(e) => format!("io error: {e}"),
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::ValidationFailed => "validation failed".to_string(),
        }
    }
}

fn load_config_layer(path: &Option<PathBuf>) -> Result<PartialConfig, CliError> {
    match path {
        None => Ok(PartialConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config file {}: {e}", p.display())))
        }
    }
}

fn resolve(
    common: &CommonArgs,
    extra: PartialConfig,
    command: CommandKind,
) -> Result<RunConfig, CliError> {
    let file_layer = load_config_layer(&common.config)?;
    let flag_layer = PartialConfig {
        n_max: common.n_max,
        tail_tol: common.tail_tol,
        component_tol: common.component_tol,
        quad_points: common.quad_points,
        half_width: common.half_width,
        deriv_step: common.deriv_step,
        out: common.out.clone(),
        format: common.format,
        ..extra
    };
    let cfg = flag_layer.merged_over(file_layer).resolve(command);
    if common.print_config {
        println!("{}", cfg.canonical_json());
    }
    Ok(cfg)
}

fn auto_trunc(cfg: &RunConfig, lambda: f64, t: Option<f64>) -> Result<TruncationSpec, CliError> {
    Ok(match cfg.n_max {
        Some(n) => TruncationSpec::new(n, cfg.tail_tol)?,
        None => match t {
            Some(t) => TruncationSpec::auto_subtracted(lambda, t, cfg.tail_tol)?,
            None => TruncationSpec::auto_squeezed(lambda, cfg.tail_tol)?,
        },
    })
}

struct PointReport {
    kind: StateKind,
    lambda: f64,
    transmittance: Option<f64>,
    j_numeric: f64,
    j_closed: Option<f64>,
    en_numeric: f64,
    en_closed: Option<f64>,
    f: f64,
    en_pred: f64,
    p_det: f64,
    mutual_info: Option<(f64, f64)>,
}

impl PointReport {
    fn print(&self, mut w: impl Write) -> std::io::Result<()> {
        let kind = match self.kind {
            StateKind::Sq => "sq",
            StateKind::NgPure => "ng-pure",
            StateKind::NgMixed => "ng-mixed",
        };
        writeln!(w, "kind            = {kind}")?;
        writeln!(w, "lambda          = {}", fmt_sig9(self.lambda))?;
        if let Some(t) = self.transmittance {
            writeln!(w, "transmittance   = {}", fmt_sig9(t))?;
            writeln!(w, "lambda*T        = {}", fmt_sig9(self.lambda * t))?;
        }
        writeln!(w, "J0 (numeric)    = {}", fmt_sig9(self.j_numeric))?;
        match self.j_closed {
            Some(j) => writeln!(w, "J0 (closed)     = {}", fmt_sig9(j))?,
            None => writeln!(w, "J0 (closed)     = n/a")?,
        }
        writeln!(w, "EN (numeric)    = {}", fmt_sig9(self.en_numeric))?;
        match self.en_closed {
            Some(en) => writeln!(w, "EN (closed)     = {}", fmt_sig9(en))?,
            None => writeln!(w, "EN (closed)     = n/a")?,
        }
        writeln!(w, "f factor        = {}", fmt_sig9(self.f))?;
        writeln!(w, "EN predicted    = {}", fmt_sig9(self.en_pred))?;
        let rel = if self.en_numeric != 0.0 {
            ((self.en_numeric - self.en_pred) / self.en_numeric).abs()
        } else {
            0.0
        };
        writeln!(w, "rel error       = {}", fmt_sig9(rel))?;
        writeln!(w, "P_det           = {}", fmt_sig9(self.p_det))?;
        if let Some((beta, info)) = self.mutual_info {
            writeln!(w, "I(beta={}) = {} bits", fmt_sig9(beta), fmt_sig9(info))?;
        }
        Ok(())
    }
}

fn cmd_point(args: PointArgs) -> Result<(), CliError> {
    let extra = PartialConfig {
        lambda: args.lambda,
        transmittance: if args.transmittance.is_empty() {
            None
        } else {
            Some(args.transmittance.clone())
        },
        kind: args.kind,
        beta: args.beta,
        ..Default::default()
    };
    let cfg = resolve(&args.common, extra, CommandKind::Point)?;
    let kind = cfg
        .kind
        .ok_or_else(|| CliError::Usage("point requires --kind".into()))?;
    let lambda = cfg
        .lambda
        .ok_or_else(|| CliError::Usage("point requires --lambda".into()))?;
    let needs_t = !matches!(kind, StateKind::Sq);
    let t = cfg.transmittance.first().copied();
    if needs_t && t.is_none() {
        return Err(CliError::Usage("this kind requires --transmittance".into()));
    }
    let icfg = cfg.integrator();
    let dcfg = cfg.derivative();

    let report = match kind {
        StateKind::Sq => {
            let trunc = auto_trunc(&cfg, lambda, None)?;
            let state = make_squeezed(lambda, trunc)?;
            let j_numeric = fisher_information(BellSource::Schmidt(&state), &dcfg, &icfg)?;
            let en_numeric = log_negativity_pure(&state);
            let mutual_info = match cfg.beta {
                Some(beta) => {
                    let cm = channel_matrix(BellSource::Schmidt(&state), beta, &icfg)?;
                    Some((beta, mutual_information(&cm)))
                }
                None => None,
            };
            PointReport {
                kind,
                lambda,
                transmittance: None,
                j_numeric,
                j_closed: Some(closed_form_fisher(EnKind::Sq, lambda, 0.0)?),
                en_numeric,
                en_closed: Some(closed_form_en(EnKind::Sq, lambda, 0.0)?),
                f: 1.0,
                en_pred: en_from_fisher(j_numeric, 1.0),
                p_det: 1.0,
                mutual_info,
            }
        }
        StateKind::NgPure => {
            let t = t.expect("checked above");
            let bs = BeamSplitterSpec::new(t)?;
            let trunc = auto_trunc(&cfg, lambda, Some(t))?;
            let (state, p_det) = make_photon_subtracted_pure(lambda, &bs, trunc)?;
            let j_numeric = fisher_information(BellSource::Schmidt(&state), &dcfg, &icfg)?;
            let f = f_factor(lambda * t);
            let mutual_info = match cfg.beta {
                Some(beta) => {
                    let cm = channel_matrix(BellSource::Schmidt(&state), beta, &icfg)?;
                    Some((beta, mutual_information(&cm)))
                }
                None => None,
            };
            PointReport {
                kind,
                lambda,
                transmittance: Some(t),
                j_numeric,
                j_closed: Some(closed_form_fisher(EnKind::Ng, lambda, t)?),
                en_numeric: log_negativity_pure(&state),
                en_closed: Some(closed_form_en(EnKind::Ng, lambda, t)?),
                f,
                en_pred: en_from_fisher(j_numeric, f),
                p_det,
                mutual_info,
            }
        }
        StateKind::NgMixed => {
            let t = t.expect("checked above");
            let bs = BeamSplitterSpec::new(t)?;
            let trunc = auto_trunc(&cfg, lambda, None)?;
            let mix = make_photon_subtracted_mixed(lambda, &bs, trunc, cfg.component_tol)?;
            let j_numeric = fisher_information(BellSource::Mixture(&mix), &dcfg, &icfg)?;
            let mutual_info = match cfg.beta {
                Some(beta) => {
                    let cm = channel_matrix(BellSource::Mixture(&mix), beta, &icfg)?;
                    Some((beta, mutual_information(&cm)))
                }
                None => None,
            };
            PointReport {
                kind,
                lambda,
                transmittance: Some(t),
                j_numeric,
                j_closed: None,
                en_numeric: log_negativity_mixture(&mix)?.value,
                en_closed: None,
                f: 1.0,
                en_pred: en_from_fisher(j_numeric, 1.0),
                p_det: onoff_success_probability(lambda, &bs),
                mutual_info,
            }
        }
    };

    match &cfg.out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            report.print(&mut file)?;
        }
        None => report.print(std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, kind: SweepKind) -> Result<(), CliError> {
    let extra = PartialConfig {
        lambda_start: args.lambda_start,
        lambda_stop: args.lambda_stop,
        lambda_count: args.lambda_count,
        transmittance: if args.transmittance.is_empty() {
            None
        } else {
            Some(args.transmittance.clone())
        },
        ..Default::default()
    };
    let command = match kind {
        SweepKind::Pure => CommandKind::SweepPure,
        SweepKind::Mixed => CommandKind::SweepMixed,
    };
    let cfg = resolve(&args.common, extra, command)?;
    let lambdas = cfg.lambda_grid();
    if !lambdas.is_empty() && cfg.transmittance.is_empty() {
        return Err(CliError::Usage(
            "sweep requires at least one --transmittance".into(),
        ));
    }
    let sweep_cfg = SweepConfig {
        tail_tol: cfg.tail_tol,
        component_tol: cfg.component_tol,
        n_max_override: cfg.n_max,
        integrator: cfg.integrator(),
        derivative: cfg.derivative(),
    };
    let rows = correlation_sweep(kind, &lambdas, &cfg.transmittance, &sweep_cfg);
    let failed = rows.iter().filter(|r| r.error.is_some()).count();

    let write_to = |w: &mut dyn Write| -> std::io::Result<()> {
        match cfg.format {
            OutputFormat::Csv => write_sweep_csv(w, &rows),
            OutputFormat::Json => write_sweep_json(w, &rows),
        }
    };
    match &cfg.out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            write_to(&mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            write_to(&mut stdout.lock())?;
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
        return Err(CliError::Entfi(entfi::Error::Numeric(format!(
            "{failed} sweep rows failed"
        ))));
    }
    Ok(())
}

const QUBIT_HEADER: &str = "t,c0_abs,product,J0_avg,EN,error";

fn cmd_qubit(args: QubitArgs) -> Result<(), CliError> {
    let extra = PartialConfig {
        qubit_t: args.qubit_t,
        qubit_c0: args.qubit_c0,
        n_phi: args.n_phi,
        ..Default::default()
    };
    let cfg = resolve(&args.common, extra, CommandKind::Qubit)?;

    if let (Some(t), Some(c0)) = (cfg.qubit_t, cfg.qubit_c0) {
        // single point: detailed report
        let state = QubitEntangledState::new(c0, 0.0, t)?;
        let result =
            averaged_qubit_fisher(&state, cfg.n_phi, &cfg.derivative(), &cfg.integrator())?;
        let en_closed = ln_qubit(&state);
        let en_dense = log_negativity(&make_qubit_state(&state, false))?.value;
        let mut out: Box<dyn Write> = match &cfg.out {
            Some(path) => Box::new(fs::File::create(path)?),
            None => Box::new(std::io::stdout()),
        };
        writeln!(out, "t                 = {}", fmt_sig9(t))?;
        writeln!(out, "c0_abs            = {}", fmt_sig9(c0))?;
        writeln!(out, "product t|c0||c1| = {}", fmt_sig9(result.product))?;
        writeln!(out, "J0 (phi-avg)      = {}", fmt_sig9(result.j_avg))?;
        writeln!(out, "EN (closed)       = {}", fmt_sig9(en_closed))?;
        writeln!(out, "EN (numeric)      = {}", fmt_sig9(en_dense))?;
        return Ok(());
    }

    // grid scan over |c0| at fixed t (default 1), one row per point
    let t = cfg.qubit_t.unwrap_or(1.0);
    let mut lines = Vec::new();
    let mut failed = 0;
    for i in 1..=9 {
        let c0 = 0.1 * i as f64;
        let state = QubitEntangledState::new(c0, 0.0, t)?;
        let en = ln_qubit(&state);
        match averaged_qubit_fisher(&state, cfg.n_phi, &cfg.derivative(), &cfg.integrator()) {
            Ok(r) => lines.push(format!(
                "{},{},{},{},{},",
                fmt_sig9(t),
                fmt_sig9(c0),
                fmt_sig9(r.product),
                fmt_sig9(r.j_avg),
                fmt_sig9(en)
            )),
            Err(e) => {
                failed += 1;
                lines.push(format!(
                    "{},{},{},NaN,{},{}",
                    fmt_sig9(t),
                    fmt_sig9(c0),
                    fmt_sig9(state.coherence_product()),
                    fmt_sig9(en),
                    e
                ));
            }
        }
    }
    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    writeln!(out, "{QUBIT_HEADER}")?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    if failed > 0 {
        return Err(CliError::Entfi(entfi::Error::Numeric(format!(
            "{failed} qubit rows failed"
        ))));
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let cfg = resolve(&args.common, PartialConfig::default(), CommandKind::Validate)?;
    let results = entfi::run_validation(&entfi::ValidateOptions::default());
    let all_passed = results.iter().all(|r| r.passed);
    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    match cfg.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &results)?;
            out.write_all(b"\n")?;
        }
        OutputFormat::Csv => {
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {} — {}", r.name, r.detail)?;
            }
            writeln!(
                out,
                "{} of {} checks passed",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            )?;
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(args) => cmd_point(args),
        Command::SweepPure(args) => cmd_sweep(args, SweepKind::Pure),
        Command::SweepMixed(args) => cmd_sweep(args, SweepKind::Mixed),
        Command::Qubit(args) => cmd_qubit(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
