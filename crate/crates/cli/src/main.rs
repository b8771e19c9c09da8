#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ergm_extremal::classifier::{phase_sweep, Classification, LimitSet};
use ergm_extremal::criticals::{gamma_n, gamma_n_star, gamma_tilde_n, slope};
use ergm_extremal::curves::{e_k, goodman, inflection_point, kruskal_katona, lower_boundary, t_k};
use ergm_extremal::mcmc::{self, SimConfig};
use ergm_extremal::table1::{self, TABLE_TOL};
use ergm_extremal::{classify, Direction, Error, Exec, GraphonDescriptor, Minimizer, ParamPoint};
use serde::Serialize;

const THREADS_VAR: &str = "ERGM_EXTREMAL_THREADS";
const EXIT_UNCLASSIFIED: u8 = 2;

type SequenceFn = fn(u64) -> ergm_extremal::Result<f64>;

#[derive(Parser)]
#[command(name = "ergm-extremal", version, about = "Extremal phase diagram of edge-triangle ERGMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Name the limiting graphon set at one parameter point (JSON).
    Classify(ClassifyArgs),
    /// Recompute the reference table of interior edge densities.
    Table1(FormatArgs),
    /// Sample the boundary curves of the edge-triangle region (CSV).
    Curves(CurvesArgs),
    /// Classify along a line of `a` values (CSV).
    Phase(PhaseArgs),
    /// Tabulate critical slopes or one of the critical exponent sequences.
    Criticals(CriticalsArgs),
    /// Run a Glauber chain and summarize it (JSON).
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Neg,
    Pos,
    Hplus,
    Hminus,
    Vertical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Sequence {
    GammaN,
    GammaTildeN,
    GammaNStar,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ClassifyArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, value_enum, default_value = "neg")]
    direction: DirectionArg,
    /// `beta1` for the vertical direction.
    #[arg(long)]
    beta1: Option<f64>,
    /// Chromatic number of the graph for the vertical direction.
    #[arg(long)]
    chromatic: Option<u32>,
    /// Clique size for the positive direction.
    #[arg(long, default_value_t = 3)]
    clique: u32,
}

#[derive(Args)]
struct FormatArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1000)]
    resolution: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PhaseArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    a_min: f64,
    #[arg(long)]
    a_max: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalsArgs {
    #[arg(long, required_unless_present = "sequence")]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 10)]
    k_max: u64,
    #[arg(long, value_enum, conflicts_with = "gamma")]
    sequence: Option<Sequence>,
    #[arg(long, default_value_t = 10)]
    n_max: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, default_value_t = 0.0)]
    beta2: f64,
    #[arg(long, default_value_t = 1000)]
    sweeps: u64,
    #[arg(long, default_value_t = 100)]
    burnin: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-sweep densities here as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Serialize)]
struct ClassifyOutput {
    kind: &'static str,
    members: Vec<GraphonDescriptor>,
    oracle_e: f64,
    certified: bool,
}

impl ClassifyOutput {
    fn classified(c: &Classification) -> Self {
        let oracle_e = match &c.oracle {
            Some(m) => m.e_star,
            None => c.set.members[0].edge_density(),
        };
        ClassifyOutput { kind: c.set.kind(), members: c.set.members.clone(), oracle_e, certified: c.certified }
    }

    fn unclassified(oracle: &Minimizer) -> Self {
        ClassifyOutput { kind: "unclassified", members: Vec::new(), oracle_e: oracle.e_star, certified: false }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().with_context(|| format!("{THREADS_VAR}={raw:?} is not a thread count"))?;
    if threads == 0 {
        bail!("{THREADS_VAR} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Classify(args) => cmd_classify(&args, &mut out),
        Command::Table1(args) => cmd_table1(args.format, &mut out),
        Command::Curves(args) => with_output(args.output.as_ref(), &mut out, |w| cmd_curves(&args, w)),
        Command::Phase(args) => with_output(args.output.as_ref(), &mut out, |w| cmd_phase(&args, w)),
        Command::Criticals(args) => cmd_criticals(&args, &mut out),
        Command::Simulate(args) => cmd_simulate(&args, &mut out),
    }
}

/// Runs `f` against the file at `path` when given, otherwise against `out`.
fn with_output(
    path: Option<&PathBuf>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<ExitCode>,
) -> Result<ExitCode> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            let mut w = BufWriter::new(file);
            let code = f(&mut w)?;
            w.flush()?;
            Ok(code)
        }
        None => f(out),
    }
}

fn param_point(args: &ClassifyArgs) -> ParamPoint {
    let direction = match args.direction {
        DirectionArg::Neg => Direction::NegativeBeta2,
        DirectionArg::Pos => Direction::PositiveBeta2,
        DirectionArg::Hplus => Direction::HorizontalPlus,
        DirectionArg::Hminus => Direction::HorizontalMinus,
        DirectionArg::Vertical => Direction::Vertical,
    };
    ParamPoint {
        gamma: args.gamma,
        a: args.a,
        b: args.b,
        direction,
        beta1: args.beta1,
        chromatic_r: args.chromatic,
        clique_s: args.clique,
    }
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let (payload, code) = match classify(&param_point(args)) {
        Ok(c) => (ClassifyOutput::classified(&c), ExitCode::SUCCESS),
        Err(Error::Unclassified(u)) => {
            eprintln!("note: {}", u.reason);
            (ClassifyOutput::unclassified(&u.oracle), ExitCode::from(EXIT_UNCLASSIFIED))
        }
        Err(e) => return Err(e.into()),
    };
    serde_json::to_writer(&mut *out, &payload)?;
    writeln!(out)?;
    Ok(code)
}

fn cmd_table1(format: Format, out: &mut dyn Write) -> Result<ExitCode> {
    let rows = table1::compute_all()?;
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "gamma,a,segment,computed,reference,deviation")?;
            for r in &rows {
                let c = r.cell;
                writeln!(out, "{},{},{},{},{},{}", c.gamma, c.a, c.segment, r.e_star, c.reference, r.deviation)?;
            }
        }
        Format::Table => {
            writeln!(out, "{:>8} {:>14} {:>4} {:>10} {:>10} {:>10}", "gamma", "a", "k", "computed", "reference", "|diff|")?;
            for r in &rows {
                let c = r.cell;
                writeln!(
                    out,
                    "{:>8} {:>14.6e} {:>4} {:>10.6} {:>10.3} {:>10.2e}",
                    c.gamma, c.a, c.segment, r.e_star, c.reference, r.deviation
                )?;
            }
            writeln!(out, "max |computed - reference| = {worst:.3e} (tolerance {TABLE_TOL:e})")?;
        }
    }
    if worst > TABLE_TOL {
        eprintln!("error: deviation {worst:e} exceeds {TABLE_TOL:e}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_curves(args: &CurvesArgs, out: &mut dyn Write) -> Result<ExitCode> {
    if args.resolution < 10 {
        bail!("--resolution must be at least 10, got {}", args.resolution);
    }
    if !(args.gamma > 0.0 && args.gamma.is_finite()) {
        bail!("--gamma must be positive, got {}", args.gamma);
    }
    let res = args.resolution as f64;
    let mut es: Vec<f64> = (0..=args.resolution).map(|i| i as f64 / res).collect();
    es.extend((1..).map(e_k).take_while(|&e| e <= 1.0 - 1.0 / res));
    es.sort_by(f64::total_cmp);
    es.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
    writeln!(out, "e,lower,upper,goodman")?;
    for e in es {
        let lower = lower_boundary(e, args.gamma)?;
        writeln!(out, "{e},{lower},{},{}", kruskal_katona(e, 3, args.gamma), goodman(e, args.gamma))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// `e_star` and `segment` cells; ties list every member, joined by `;`.
fn phase_cells(set: &LimitSet) -> (String, String) {
    let e: Vec<String> = set.members.iter().map(|m| m.edge_density().to_string()).collect();
    let seg: Vec<String> = set
        .members
        .iter()
        .map(|m| match m {
            GraphonDescriptor::Interior { segment, .. } => segment.to_string(),
            // a Turán point with k classes closes segment k - 1
            GraphonDescriptor::Turan { k, scale } if *scale == 1.0 && *k >= 2 => (k - 1).to_string(),
            _ => String::new(),
        })
        .collect();
    (e.join(";"), seg.join(";"))
}

fn cmd_phase(args: &PhaseArgs, out: &mut dyn Write) -> Result<ExitCode> {
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    if !(args.a_min < args.a_max) {
        bail!("--a-min must be below --a-max");
    }
    let span = args.a_max - args.a_min;
    let last = (args.steps - 1) as f64;
    let grid: Vec<f64> = (0..args.steps).map(|i| args.a_min + span * i as f64 / last).collect();
    let rows = phase_sweep(args.gamma, &grid, args.b, Exec::Parallel)?;
    writeln!(out, "a,kind,e_star,segment")?;
    for row in rows {
        match row.result {
            Ok(c) => {
                let (e, seg) = phase_cells(&c.set);
                writeln!(out, "{},{},{e},{seg}", row.a, c.set.kind())?;
            }
            Err(Error::Unclassified(u)) => {
                let seg = u.oracle.segment.map(|s| s.to_string()).unwrap_or_default();
                writeln!(out, "{},unclassified,{},{seg}", row.a, u.oracle.e_star)?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_rows(out: &mut dyn Write, format: Format, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.join(","))?;
            }
        }
        Format::Table => {
            let line: Vec<String> = header.iter().map(|h| format!("{h:>22}")).collect();
            writeln!(out, "{}", line.join(" "))?;
            for r in rows {
                let line: Vec<String> = r.iter().map(|c| format!("{c:>22}")).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    header
                        .iter()
                        .zip(r)
                        .map(|(h, c)| {
                            let v = c.parse::<f64>().map(serde_json::Value::from).unwrap_or(serde_json::Value::Null);
                            (h.to_string(), v)
                        })
                        .collect()
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &objs)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn cmd_criticals(args: &CriticalsArgs, out: &mut dyn Write) -> Result<ExitCode> {
    if let Some(seq) = args.sequence {
        let (first, f, asymptote): (u64, SequenceFn, fn(f64) -> f64) = match seq {
            Sequence::GammaN => (3, gamma_n, |n| 2.0 * n / 9.0),
            Sequence::GammaTildeN => (2, gamma_tilde_n, |n| 4.0 * n / 9.0),
            Sequence::GammaNStar => (3, gamma_n_star, |_| 2.0 / 3.0),
        };
        if args.n_max < first {
            bail!("--n-max must be at least {first} for this sequence");
        }
        let mut rows = Vec::new();
        for n in first..=args.n_max {
            let v = f(n)?;
            let lim = asymptote(n as f64);
            rows.push(vec![n.to_string(), v.to_string(), lim.to_string(), (v / lim).to_string()]);
        }
        write_rows(out, args.format, &["n", "value", "asymptote", "ratio"], &rows)?;
    } else {
        let gamma = args.gamma.expect("clap requires gamma without sequence");
        if !(gamma > 0.0 && gamma.is_finite()) {
            bail!("--gamma must be positive, got {gamma}");
        }
        if args.k_max < 2 {
            bail!("--k-max must be at least 2");
        }
        let mut rows = Vec::new();
        for k in 2..=args.k_max {
            let infl = inflection_point(k, gamma)?.map(|i| i.to_string()).unwrap_or_default();
            rows.push(vec![k.to_string(), e_k(k).to_string(), t_k(k).to_string(), slope(k, gamma).to_string(), infl]);
        }
        write_rows(out, args.format, &["k", "e_k", "t_k", "s_k", "i_k"], &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let cfg = SimConfig {
        n: args.n,
        gamma: args.gamma,
        beta2: args.beta2,
        a: args.a,
        b: args.b,
        sweeps: args.sweeps,
        burnin: args.burnin,
        seed: args.seed,
        record_trace: args.trace.is_some(),
    };
    // open the trace file before the run so a bad path fails fast
    let trace_file = match &args.trace {
        Some(p) => Some(File::create(p).with_context(|| format!("cannot write trace to {}", p.display()))?),
        None => None,
    };
    let mut summary = mcmc::run(&cfg)?;
    if let (Some(file), Some(trace)) = (trace_file, summary.trace.take()) {
        let mut w = BufWriter::new(file);
        mcmc::write_trace_csv(&trace, &mut w)?;
        w.flush()?;
    }
    serde_json::to_writer_pretty(&mut *out, &summary)?;
    writeln!(out)?;
    Ok(ExitCode::SUCCESS)
}
