//! `ddoec` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ddoec::netsim::CopPoint;
use ddoec::optimizer::Scheme;
use ddoec::pipeline::stages::{self, Layout, TrialFilter};
use ddoec::pipeline::{load_config, validate_on_simulator, Algorithm, ExperimentConfig, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "ddoec", version, about = "Positioning-error compensation experiments for user-centric ultra-dense networks")]
struct Cli {
    /// TOML config file, or a run manifest to replay. Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output root; overrides `out_dir` from the config.
    #[arg(long, global = true, env = "DDOEC_OUT")]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the COP grid and write the ideal, erroneous and residual databases.
    GenData,
    /// Fit Model-E, Model-R and the oracle models on the databases.
    Train,
    /// Run SA/GA trials on the surrogate fitness.
    Optimize {
        #[arg(long, value_parser = parse_algo)]
        algo: Option<Algorithm>,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Option<Scheme>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Validate optimized COPs on the simulator, or a single `--cop`.
    Validate {
        /// `lambda_dbs,r_sz,p_tx_dbm`
        #[arg(long, value_parser = parse_cop, requires = "alpha")]
        cop: Option<CopPoint>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// gen-data, train, optimize, validate and report in one go.
    Experiment,
    /// Write summary.csv, traces, iterations.csv and plots from validated runs.
    Report,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("expected `sa` or `ga`, got `{s}`"))
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    match Scheme::parse(s) {
        Some(Scheme::Oracle) | None => Err(format!("expected `baseline` or `ddoec`, got `{s}`")),
        Some(x) => Ok(x),
    }
}

fn parse_cop(s: &str) -> Result<CopPoint, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[l, r, p] => Ok(CopPoint::new(l, r, p)),
        _ => Err(format!("expected three comma-separated values, got {}", v.len())),
    }
}

fn run(cli: Cli) -> ddoec::Result<()> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    let layout = Layout::new(cli.out.clone().unwrap_or_else(|| cfg.out_dir.clone()));
    let report = |m: &RunManifest| println!("{}: wrote {} file(s); manifest in {}", m.stage, m.outputs.len(), layout.root.display());
    match cli.command {
        Command::GenData => report(&stages::stage_gen_data(&cfg, &layout)?),
        Command::Train => report(&stages::stage_train(&cfg, &layout)?),
        Command::Optimize { algo, scheme, alpha } => {
            let filter = TrialFilter { algorithm: algo, scheme, alpha_se: alpha };
            report(&stages::stage_optimize(&cfg, &layout, &filter)?)
        }
        Command::Validate { cop: Some(cop), alpha, seed } => {
            let (art, _) = stages::load_artifacts(&layout)?;
            let spec = art.normalizers.spec(alpha.expect("clap enforces --alpha"))?;
            let v = validate_on_simulator(&cop, &cfg, &spec, seed)?;
            println!("objective,ase_norm,ee_norm,ase,ee");
            println!("{},{},{},{},{}", v.objective, v.ase_norm, v.ee_norm, v.ase, v.ee);
        }
        Command::Validate { cop: None, .. } => report(&stages::stage_validate(&cfg, &layout)?),
        Command::Experiment => {
            for m in stages::stage_experiment(&cfg, &layout)? {
                report(&m);
            }
        }
        Command::Report => report(&stages::stage_report(&cfg, &layout)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => {
            eprintln!("ddoec: error[runtime]: {e}");
            return ExitCode::from(1);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
            eprintln!("ddoec: error[{}]: {msg}", e.kind());
            ExitCode::from(1)
        }
    }
}
