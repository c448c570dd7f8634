use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use esns::analysis::{geometry_convergence_report, EocTable};
use esns::checks::{format_table, run_checks, CheckOptions};
use esns::config::{RunConfig, Scheme};
use esns::geometry::{AnalyticSurface, SurfaceKind};
use esns::output::{write_eoc_csv, write_steps_csv, write_sweep_csv, write_vtu, RunSummary};
use esns::solver::{run_simulation_with, run_sweep};
use esns::{Error, Result};

#[derive(Parser)]
#[command(name = "esns", version, about = "Navier-Stokes on evolving spheres with Taylor-Hood surface finite elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its summary, per-step errors and VTU snapshots.
    Run(RunArgs),
    /// Run a refinement sweep and write the convergence and EOC tables.
    Sweep(SweepArgs),
    /// Run the property suite and print a pass/fail table.
    Check(CheckArgs),
    /// Normal and area errors of the initial meshes with observed orders.
    GeomReport(GeomArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML or JSON run configuration.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Named preset used when no config file is given.
    #[arg(long, default_value = "paper-case1")]
    preset: String,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(long)]
    klambda: Option<usize>,
    #[arg(long)]
    kg: Option<usize>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    dt0: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for assembly and solves.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Write a VTU snapshot every this many steps (0 disables).
    #[arg(long)]
    vtu_every: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Refinement levels, contiguous and increasing.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    levels: Vec<usize>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct GeomArgs {
    #[arg(long, value_parser = parse_surface, default_value = "moving_sphere")]
    benchmark: SurfaceKind,
    /// Geometry orders to report.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    kg: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    levels: Vec<usize>,
    /// Directory for `geometry.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown scheme '{s}', expected lmm_dir, lmm_cov or pm"))
}

fn parse_surface(s: &str) -> std::result::Result<SurfaceKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown benchmark '{s}', expected moving_sphere, oscillating_sphere or stationary_sphere"))
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                other => other,
            })?,
            None => RunConfig::preset(&self.preset)?,
        };
        if let Some(v) = self.level {
            c.level = v;
        }
        if let Some(v) = self.scheme {
            c.scheme = v;
        }
        if let Some(v) = self.klambda {
            c.k_lambda = v;
        }
        if let Some(v) = self.kg {
            c.k_g = v;
        }
        if let Some(v) = self.t_end {
            c.t_end = Some(v);
        }
        if let Some(v) = self.dt0 {
            c.dt0 = v;
        }
        if let Some(v) = &self.out {
            c.output.dir = Some(v.clone());
        }
        if let Some(v) = self.threads {
            c.threads = Some(v);
        }
        c.validate()?;
        Ok(c)
    }

    fn name(&self) -> String {
        match &self.config {
            Some(p) => p.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned()),
            None => self.preset.clone(),
        }
    }
}

fn set_threads(n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("threads: {e}")))?;
    }
    Ok(())
}

fn out_dir(config: &RunConfig, name: &str) -> PathBuf {
    config.output.dir.clone().unwrap_or_else(|| Path::new("out").join(name))
}

fn run(args: &RunArgs) -> Result<()> {
    let mut config = args.config.resolve()?;
    if let Some(v) = args.vtu_every {
        config.output.vtu_every = v;
    }
    set_threads(config.threads)?;
    let dir = out_dir(&config, &args.config.name());
    std::fs::create_dir_all(&dir)?;
    let every = config.output.vtu_every;
    let result = run_simulation_with(&config, &mut |problem, state, snap| {
        if every > 0 && state.step % every == 0 {
            let path = dir.join(format!("solution_{:04}.vtu", state.step));
            write_vtu(&path, &snap.mesh, &problem.space, &state.u, &state.p, state.l.as_ref())?;
        }
        Ok(())
    })?;
    let tau = (config.scheme == Scheme::Pm).then(|| config.tau.eval(result.report.h));
    RunSummary::new(&config, tau, &result.report, &result.records).write(&dir.join("summary.json"))?;
    write_steps_csv(&dir.join("steps.csv"), &result.records)?;
    let r = &result.report;
    println!(
        "level {} h {:.4} dt {:.3e}: e_u_ah {:.3e} e_u_h1 {:.3e} e_Pu {:.3e} e_n {:.3e} e_p {:.3e} ({:.1} s)",
        r.level, r.h, r.dt, r.e_u_ah, r.e_u_h1, r.e_pu_linf_l2, r.e_n_linf_l2, r.e_p_l2l2, r.walltime_s
    );
    println!("wrote {}", dir.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let config = args.config.resolve()?;
    set_threads(config.threads)?;
    let dir = out_dir(&config, &args.config.name());
    let reports = run_sweep(&config, &args.levels)?;
    write_sweep_csv(&dir.join("sweep.csv"), &reports)?;
    for r in &reports {
        println!("level {} h {:.4}: e_u_ah {:.3e} e_p {:.3e} e_n {:.3e} e_Pu {:.3e}", r.level, r.h, r.e_u_ah, r.e_p_l2l2, r.e_n_linf_l2, r.e_pu_linf_l2);
    }
    if reports.len() >= 2 {
        let table = EocTable::from_reports(&reports)?;
        write_eoc_csv(&dir.join("eoc.csv"), &table)?;
        for (lc, lf, rates) in &table.rows {
            let cols: Vec<String> = table.columns.iter().zip(rates).map(|(c, r)| format!("{c} {r:.2}")).collect();
            println!("EOC {lc}->{lf}: {}", cols.join(", "));
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn check(args: &CheckArgs) -> Result<bool> {
    set_threads(args.threads)?;
    let rows = run_checks(&CheckOptions { seed: args.seed, ..Default::default() })?;
    print!("{}", format_table(&rows));
    Ok(rows.iter().all(|r| r.passed))
}

fn geom_report(args: &GeomArgs) -> Result<()> {
    let surface = AnalyticSurface::new(args.benchmark);
    let mut reports = Vec::new();
    for &kg in &args.kg {
        let r = geometry_convergence_report(surface, kg, &args.levels)?;
        println!("k_g = {kg}");
        println!("{:>5} {:>8} {:>12} {:>12} {:>8} {:>8}", "level", "h", "normal", "area", "EOC n", "EOC A");
        for (i, row) in r.rows.iter().enumerate() {
            let rate = |v: &[f64]| i.checked_sub(1).and_then(|j| v.get(j)).map_or(String::from("-"), |x| format!("{x:.2}"));
            println!(
                "{:>5} {:>8.4} {:>12.4e} {:>12.4e} {:>8} {:>8}",
                row.level,
                row.h,
                row.normal_error,
                row.area_error,
                rate(&r.normal_orders),
                rate(&r.area_orders)
            );
        }
        reports.push(r);
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(&reports).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        std::fs::write(dir.join("geometry.json"), text + "\n")?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> ExitCode {
    let root = match e {
        Error::Step { source, .. } => source.as_ref(),
        other => other,
    };
    if root.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Check(a) => check(a),
        Command::GeomReport(a) => geom_report(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            info!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            error!("{e}");
            exit_code(&e)
        }
    }
}
