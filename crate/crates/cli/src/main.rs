use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wallach_flow::emit::{self, Format};
use wallach_flow::region::GridSpec;
use wallach_flow::{
    classify_sectional, closed_form_threshold, critical_threshold, plane_curvature, ricci_coefficients,
    ricci_signature, sample_curves, sample_regions, simulate, CurveId, Error, EventKind, FlowOptions, Metric,
    PlaneProbe, SpaceKind,
};

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wallach",
    version,
    about = "Ricci flow and curvature tools for the Wallach flag manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow from (x1, x2, x3); events go to stdout when --out is set, stderr otherwise.
    Flow(FlowArgs),
    /// Sectional-curvature class and Ricci signature of a metric.
    Classify(ClassifyArgs),
    /// Sample the Valiev curve and the Ricci boundary curves r(s).
    Roots(RootsArgs),
    /// Critical s* below which Ricci positivity is lost along the boundary curve.
    Thresholds(ThresholdsArgs),
    /// Classify a grid of normalized metrics (1, 1 + r, s).
    Regions(RegionsArgs),
    /// Sectional curvature of the probe plane (t, x) on an equal-pair metric.
    ProbePlane(ProbeArgs),
}

#[derive(Args)]
struct SpaceArg {
    /// su3, sp3 or f4
    #[arg(long, value_parser = parse_space, conflicts_with = "d")]
    space: Option<SpaceKind>,
    /// Same as --space, given as 2, 4 or 8
    #[arg(long, value_parser = parse_d)]
    d: Option<SpaceKind>,
}

impl SpaceArg {
    fn get(&self) -> Option<SpaceKind> {
        self.space.or(self.d)
    }

    fn require(&self) -> Result<SpaceKind, Error> {
        self.get()
            .ok_or_else(|| Error::Domain("--space (or --d) is required".into()))
    }
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, allow_negative_numbers = true)]
    x1: f64,
    #[arg(long, allow_negative_numbers = true)]
    x2: f64,
    #[arg(long, allow_negative_numbers = true)]
    x3: f64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Output file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    space: SpaceArg,
    #[command(flatten)]
    metric: MetricArgs,
    /// Final time; negative runs the flow backward
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t_end: f64,
    #[arg(long, default_value_t = FlowOptions::default().rel_tol)]
    rtol: f64,
    #[arg(long, default_value_t = FlowOptions::default().abs_tol)]
    atol: f64,
    #[arg(long, default_value_t = FlowOptions::default().max_step)]
    max_step: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    space: SpaceArg,
    #[command(flatten)]
    metric: MetricArgs,
}

#[derive(Args)]
struct RootsArgs {
    /// Restrict to one Ricci curve (the Valiev curve is always included)
    #[command(flatten)]
    space: SpaceArg,
    /// s_min:s_max:n
    #[arg(long, default_value = "0.005:0.995:200")]
    s_range: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ThresholdsArgs {
    #[command(flatten)]
    space: SpaceArg,
}

#[derive(Args)]
struct RegionsArgs {
    /// s_min:s_max:n_s,r_min:r_max:n_r
    #[arg(long, default_value = "0.005:0.995:200,0:0.45:200")]
    grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
}

fn parse_space(s: &str) -> Result<SpaceKind, String> {
    SpaceKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown space {s:?} (expected su3, sp3 or f4)"))
}

fn parse_d(s: &str) -> Result<SpaceKind, String> {
    let d: u32 = s.parse().map_err(|e| format!("{e}"))?;
    SpaceKind::from_d(d).map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Invalid(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_numerical() => Failure::Numerical(e.to_string()),
            Error::Io(_) => Failure::Io(e.to_string()),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Writes the whole payload at once so a failed command leaves no partial file.
fn emit_to(out: &Option<PathBuf>, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn metric_of(space: &SpaceArg, m: &MetricArgs) -> Result<Metric, Error> {
    Metric::new(m.x1, m.x2, m.x3, space.require()?)
}

fn run_flow(a: &FlowArgs) -> CmdResult {
    let m0 = metric_of(&a.space, &a.metric)?;
    let opts = FlowOptions {
        rel_tol: a.rtol,
        abs_tol: a.atol,
        max_step: a.max_step,
        ..FlowOptions::with_t_end(a.t_end)
    };
    let (traj, events) = simulate(&m0, &opts, &EventKind::MONITORS)?;

    let mut buf = Vec::new();
    emit::write_trajectory(&mut buf, &traj, a.output.format)?;
    emit_to(&a.output.out, &buf)?;

    let mut ev = Vec::new();
    emit::write_events(&mut ev, &events)?;
    if a.output.out.is_some() {
        io::stdout().lock().write_all(&ev)?;
    } else {
        io::stderr().lock().write_all(&ev)?;
    }
    Ok(())
}

fn run_classify(a: &ClassifyArgs) -> CmdResult {
    let m = metric_of(&a.space, &a.metric)?;
    let class = classify_sectional(&m);
    let rho = ricci_coefficients(&m).rho;
    let mut out = io::stdout().lock();
    writeln!(out, "sectional {}", class.tag)?;
    if let Some(w) = class.witness {
        writeln!(
            out,
            "witness t={} x={}",
            emit::fmt_f64(w.t_param),
            emit::fmt_f64(w.x_param)
        )?;
    }
    writeln!(out, "ricci_sig {}", ricci_signature(&m))?;
    writeln!(
        out,
        "rho {} {} {}",
        emit::fmt_f64(rho[0]),
        emit::fmt_f64(rho[1]),
        emit::fmt_f64(rho[2])
    )?;
    Ok(())
}

fn run_roots(a: &RootsArgs) -> CmdResult {
    let (lo, hi, n) = wallach_flow::region::parse_range(&a.s_range)?;
    if !(lo > 0.0 && lo < hi && hi < 1.0) || n < 2 {
        return Err(Failure::Invalid(format!(
            "--s-range {:?}: need 0 < s_min < s_max < 1 and n >= 2",
            a.s_range
        )));
    }
    let ids: Vec<CurveId> = match a.space.get() {
        Some(kind) => vec![CurveId::Valiev, CurveId::ricci(kind)],
        None => CurveId::ALL.to_vec(),
    };
    let curves = sample_curves(&ids, &wallach_flow::region::linspace(lo, hi, n));
    let mut buf = Vec::new();
    emit::write_curves(&mut buf, &curves, a.output.format)?;
    emit_to(&a.output.out, &buf)
}

fn run_thresholds(a: &ThresholdsArgs) -> CmdResult {
    let kinds: Vec<SpaceKind> = match a.space.get() {
        Some(k) => vec![k],
        None => SpaceKind::ALL.to_vec(),
    };
    let mut out = io::stdout().lock();
    writeln!(out, "space,d,s_star,closed_form")?;
    for kind in kinds {
        let s = critical_threshold(kind)?;
        writeln!(
            out,
            "{},{},{},{}",
            kind,
            kind.d(),
            emit::fmt_f64(s),
            emit::fmt_f64(closed_form_threshold(kind))
        )?;
    }
    Ok(())
}

fn run_regions(a: &RegionsArgs) -> CmdResult {
    let spec: GridSpec = a.grid.parse()?;
    let grid = sample_regions(&spec)?;
    let mut buf = Vec::new();
    emit::write_regions(&mut buf, &grid, a.output.format)?;
    emit_to(&a.output.out, &buf)
}

fn run_probe(a: &ProbeArgs) -> CmdResult {
    let k = plane_curvature(PlaneProbe {
        t_param: a.t,
        x_param: a.x,
    })?;
    writeln!(io::stdout().lock(), "{}", emit::fmt_f64(k))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Flow(a) => run_flow(a),
        Command::Classify(a) => run_classify(a),
        Command::Roots(a) => run_roots(a),
        Command::Thresholds(a) => run_thresholds(a),
        Command::Regions(a) => run_regions(a),
        Command::ProbePlane(a) => run_probe(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::FAILURE
        }
    }
}
