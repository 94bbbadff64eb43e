use clap::{Parser, Subcommand, ValueEnum};
use rmm::bench::{self, BenchOptions, Manifest, Scale};
use rmm::driver::output::{csv_string, write_csv};
use rmm::driver::{run_config, RunConfig};
use rmm::reconstruction::GeometryMode;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "solver", version, about = "Rezoning moving-mesh finite-volume solver")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the main result table to this CSV file.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration file.
    Run { config: PathBuf },
    /// Run a benchmark suite.
    Bench {
        suite: Suite,
        #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
        scale: ScaleArg,
        /// Directory for CSV/VTK artifacts and the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Geometry modes of the sine and tpe suites.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModeArg::Tpe2, ModeArg::Gcl, ModeArg::Nongcl])]
        modes: Vec<ModeArg>,
        /// Include the double Mach reflection in the shock suite.
        #[arg(long)]
        dmr: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Tpe,
    Sine,
    Shock,
    Consistency,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Tpe2,
    Gcl,
    Nongcl,
}

impl ModeArg {
    fn mode(self) -> GeometryMode {
        match self {
            ModeArg::Tpe2 => GeometryMode::Tpe2,
            ModeArg::Gcl => GeometryMode::Gcl,
            ModeArg::Nongcl => GeometryMode::NonGcl,
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{}_{}.{}", stem, suffix, ext))
}

fn run(path: &Path, cli: &Cli) -> rmm::Result<()> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.problem.seed = seed;
    }
    if let Some(csv) = &cli.csv {
        cfg.output.errors_csv = Some(csv.display().to_string());
    }
    let (sim, s) = run_config(&cfg)?;
    println!("config    {}", cfg.hash());
    println!("steps     {}", s.steps);
    println!("t         {}", sim.t);
    println!("levels    {:.3}", s.mean_levels);
    println!("residual  {:.3e}", s.max_residual);
    println!("Lw_max    {:.4}", s.max_lipschitz);
    if let Some((l1, linf)) = s.errors {
        println!("L1        {:.6e}", l1);
        println!("Linf      {:.6e}", linf);
    }
    println!("runtime   {:.2} s", s.runtime_s);
    Ok(())
}

fn bench_cmd(cli: &Cli, suite: Suite, scale: ScaleArg, out: &Option<PathBuf>, modes: &[ModeArg], dmr: bool) -> rmm::Result<()> {
    let opts = BenchOptions {
        scale: if scale == ScaleArg::Paper { Scale::Paper } else { Scale::Desk },
        seed: cli.seed.unwrap_or(0),
        out: out.clone(),
        include_dmr: dmr,
    };
    let mut manifest = Manifest::default();
    match suite {
        Suite::Tpe => {
            let modes: Vec<GeometryMode> = modes.iter().map(|m| m.mode()).collect();
            let report = bench::tpe_suite(&opts, &modes, &[0, 1, 2])?;
            bench::write_tpe(&opts, &mut manifest, &report)?;
            print!("{}", csv_string(&report.rows)?);
            if let Some(p) = &cli.csv {
                write_csv(p, &report.rows)?;
            }
        }
        Suite::Sine => {
            for m in modes {
                let report = bench::sine_convergence(&opts, m.mode())?;
                bench::write_sine(&opts, &mut manifest, &report)?;
                println!("# {}  max conservation residual {:.3e}", m.mode().name(), report.max_residual());
                print!("{}", csv_string(&report.rows)?);
                if let Some(p) = &cli.csv {
                    let p = if modes.len() > 1 { with_suffix(p, m.mode().name()) } else { p.clone() };
                    write_csv(&p, &report.rows)?;
                }
            }
        }
        Suite::Shock => {
            let report = bench::shock_suite(&opts, &mut manifest)?;
            print!("{}", csv_string(&report.rows)?);
            if let Some(gap) = report.riemann_level_gap {
                println!("# riemann2d L1(rho) gap between 2 and 6 levels: {:.3}% of range", 100.0 * gap);
            }
            if let Some(p) = &cli.csv {
                write_csv(p, &report.rows)?;
            }
        }
        Suite::Consistency => {
            let report = bench::consistency_suite(&opts, &mut manifest)?;
            print!("{}", csv_string(&report.rows)?);
            if let Some(p) = &cli.csv {
                write_csv(p, &report.rows)?;
            }
        }
    }
    if let Some(dir) = &opts.out {
        manifest.write(dir)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::Run { config } => run(config, &cli),
        Command::Bench {
            suite,
            scale,
            out,
            modes,
            dmr,
        } => bench_cmd(&cli, *suite, *scale, out, modes, *dmr),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}
