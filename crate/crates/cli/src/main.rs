use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fmc_core::config::load_flow_config;
use fmc_core::flow::{run, FlowConfig};
use fmc_core::geometry::shapes::Shape;
use fmc_core::geometry::{validate_orders, HeightField, ReferenceCurve};
use fmc_core::io::{read_curve_csv, write_trajectory_csv};
use fmc_core::nonlocal::NonlocalOperatorTable;
use fmc_core::pde::{solve_linear, LinearHeatProblem};
use fmc_core::rhs::rhs_consistency;
use fmc_core::verify::{run_all, Suite, VerifyConfig};

#[derive(Parser)]
#[command(name = "fmc", version, about = "Fractional mean curvature flow of closed planar curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the discrete eigenvalues mu_k of the fractional Laplacian on the unit circle as CSV.
    Spectrum(SpectrumArgs),
    /// Solve the linear fractional heat equation on the unit circle and print CSV `t,node,u`.
    Heat(HeatArgs),
    /// Run the verification suite, or the parametrization identity check with `verify rhs`.
    Verify(VerifyArgs),
    /// Evolve a curve by the flow described in a `key = value` config file.
    Evolve(EvolveArgs),
    /// Operator table utilities.
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long = "N", default_value_t = 512)]
    n: usize,
    /// Largest wavenumber listed.
    #[arg(long, default_value_t = 8)]
    kmax: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeatMode {
    /// Free decay of `u0 = cos(theta)`.
    Decay,
    /// Zero initial data driven by the static source `g = 1 + cos(2 theta)`.
    Forced,
}

#[derive(Args)]
struct HeatArgs {
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long = "N", default_value_t = 128)]
    n: usize,
    #[arg(long = "T", default_value_t = 0.1)]
    t: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = HeatMode::Decay)]
    mode: HeatMode,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    target: Option<VerifyTarget>,
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long = "N", default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Path of the JSON report.
    #[arg(long, default_value = "verify_report.json")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Residual of the parametrization identity for `u = amplitude cos(2 theta)` on the unit circle, as JSON.
    Rhs(RhsArgs),
}

#[derive(Args)]
struct RhsArgs {
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    amplitude: f64,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// Initial curve as CSV `param,x,y`; defaults to the configured shape.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Directory receiving `trajectory.csv` and `report.json`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum TableAction {
    /// Write the fractional Laplacian matrix as little-endian f64 rows after a u64 size header.
    Export {
        #[arg(long, default_value = "circle")]
        shape: Shape,
        #[arg(long = "N", default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_suite(text: &str) -> Result<Suite, String> {
    text.parse().map_err(|e: fmc_core::Error| e.to_string())
}

/// Checks `s` alone, with a Hölder exponent that is always admissible for it.
fn validate_s(s: f64) -> Result<()> {
    Ok(validate_orders(s, 0.25 * (1.0 - s))?)
}

fn unit_circle(n: usize) -> Result<ReferenceCurve> {
    Ok(ReferenceCurve::from_nodes(Shape::Circle { radius: 1.0 }.sample(n))?)
}

fn spectrum(args: &SpectrumArgs) -> Result<()> {
    validate_s(args.s)?;
    let base = unit_circle(args.n)?;
    let table = NonlocalOperatorTable::assemble(&base, args.s)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["k", "mu_k"])?;
    for k in 0..=args.kmax {
        let u: Vec<f64> = base.params().iter().map(|t| (k as f64 * t).cos()).collect();
        let au = table.fractional_laplacian_apply(&u)?;
        let mu = -au.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / u.iter().map(|b| b * b).sum::<f64>();
        out.write_record([k.to_string(), format!("{mu:.12e}")])?;
    }
    out.flush()?;
    Ok(())
}

fn heat(args: &HeatArgs) -> Result<()> {
    validate_orders(args.s, args.alpha)?;
    let base = unit_circle(args.n)?;
    let table = NonlocalOperatorTable::assemble(&base, args.s)?;
    let params = base.params();
    let problem = match args.mode {
        HeatMode::Decay => LinearHeatProblem::free(&table, params.iter().map(|t| t.cos()).collect(), args.t, args.dt),
        HeatMode::Forced => {
            let mut p = LinearHeatProblem::free(&table, vec![0.0; args.n], args.t, args.dt);
            p.forcing_g = params.iter().map(|t| 1.0 + (2.0 * t).cos()).collect();
            p
        }
    };
    let traj = solve_linear(&problem)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["t", "node", "u"])?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for (node, u) in state.iter().enumerate() {
            out.write_record([t.to_string(), node.to_string(), u.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn verify_rhs(args: &RhsArgs) -> Result<()> {
    let base = unit_circle(args.n)?;
    let u = HeightField::from_fn(&base, args.s, args.alpha, |t| args.amplitude * (2.0 * t).cos())?;
    let table = NonlocalOperatorTable::assemble(&base, args.s)?;
    let rep = rhs_consistency(&table, &u)?;
    let json = serde_json::json!({
        "residual_c0": rep.residual_c0,
        "residual_alpha": rep.residual_alpha,
        "N": args.n,
        "amplitude": args.amplitude,
        "s": args.s,
        "alpha": args.alpha,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    if let Some(VerifyTarget::Rhs(rhs)) = &args.target {
        verify_rhs(rhs)?;
        return Ok(true);
    }
    let cfg = VerifyConfig { suite: args.suite, seed: args.seed, n: args.n, s: args.s, alpha: args.alpha };
    let report = run_all(&cfg)?;
    report.write(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    for c in &report.checks {
        eprintln!("{:<14} {}", format!("[{:?}]", c.status), c.name);
    }
    eprintln!(
        "{} passed, {} failed, {} measured-only; report written to {}",
        report.passed,
        report.failed,
        report.measured_only,
        args.out.display()
    );
    Ok(report.all_passed())
}

fn evolve(args: &EvolveArgs) -> Result<()> {
    let cfg: FlowConfig = load_flow_config(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let initial = match &args.curve {
        Some(path) => read_curve_csv(File::open(path).with_context(|| format!("opening {}", path.display()))?)?,
        None => cfg.shape.sample(cfg.n),
    };
    if initial.len() != cfg.n {
        bail!("curve has {} nodes but the config asks for N = {}", initial.len(), cfg.n);
    }
    let out = run(&initial, &cfg)?;
    std::fs::create_dir_all(&args.out)?;
    let traj_path = args.out.join("trajectory.csv");
    write_trajectory_csv(BufWriter::new(File::create(&traj_path)?), &out.trajectory)?;
    let report_path = args.out.join("report.json");
    let mut w = BufWriter::new(File::create(&report_path)?);
    serde_json::to_writer_pretty(&mut w, &out.report)?;
    writeln!(w)?;
    eprintln!(
        "stopped: {:?} at t = {} after {} steps; wrote {} and {}",
        out.report.stop_reason,
        out.report.final_time,
        out.report.steps,
        traj_path.display(),
        report_path.display()
    );
    Ok(())
}

fn table(action: &TableAction) -> Result<()> {
    let TableAction::Export { shape, n, s, out } = action;
    validate_s(*s)?;
    let base = ReferenceCurve::from_nodes(shape.sample(*n))?;
    let table = NonlocalOperatorTable::assemble(&base, *s)?;
    let mut w = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
    table.write_binary(&mut w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum(a).map(|_| true),
        Command::Heat(a) => heat(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Evolve(a) => evolve(a).map(|_| true),
        Command::Table { action } => table(action).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
