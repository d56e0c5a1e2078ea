use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nhwave::scenario::{
    self, preset, ExecuteOptions, RunManifest, ScenarioConfig, ScenarioError, PRESETS,
};
use nhwave::Backend;

/// Exit code for bad input: unknown preset, invalid config, bad override.
const EXIT_CONFIG: u8 = 2;
/// Exit code when a solver aborted on non-finite fields.
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "nhwave", version, about = "Thin-layer emitter simulations: Bloch vs non-Hermitian models")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write spectra, probe series and diagnostics.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Check a config file and print the resolved scenario.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print a preset as a TOML config, a starting point for custom runs.
    ShowConfig {
        #[arg(long)]
        preset: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario.
    #[arg(long, conflicts_with_all = ["config", "manifest"])]
    preset: Option<String>,
    /// TOML config file.
    #[arg(long, conflicts_with = "manifest")]
    config: Option<PathBuf>,
    /// Re-run the scenario recorded in a manifest.json.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated subset of bloch, nh1, nh2.
    #[arg(long, value_delimiter = ',')]
    backends: Option<Vec<Backend>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted `key=value` setting, repeatable, e.g. `pulse.e0_v_per_m=1e9`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Run backends one after another instead of on separate threads.
    #[arg(long)]
    serial: bool,
}

enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Solver(e.into())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)
}

fn load(args: &RunArgs) -> Result<ScenarioConfig, Failure> {
    let base = match (&args.preset, &args.config, &args.manifest) {
        (Some(name), _, _) => preset(name)?,
        (_, Some(path), _) => ScenarioConfig::from_toml_str(&read(path)?)?,
        (_, _, Some(path)) => RunManifest::from_json(&read(path)?)?.config,
        _ => {
            return Err(Failure::Config(anyhow::anyhow!(
                "one of --preset, --config or --manifest is required"
            )))
        }
    };
    let mut cfg = base.with_overrides(&args.overrides)?;
    if let Some(b) = &args.backends {
        cfg.backends = b.clone();
        cfg.validate()?;
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let cfg = load(&args)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(if cfg.name.is_empty() { "custom" } else { &cfg.name }));
    let out = scenario::execute_to_dir(&cfg, &dir, ExecuteOptions { parallel: !args.serial })?;
    for (b, r) in &out.runs {
        let d = &r.records.diagnostics;
        println!(
            "{b}: {} steps, {:.1} fs simulated, {:.1} s, pole events {}, max norm drift {:.2e}",
            d.steps,
            d.final_time * 1e15,
            d.runtime_s,
            d.pole_events,
            d.max_norm_drift
        );
    }
    println!("wrote {}", dir.display());
    if out.succeeded() {
        Ok(())
    } else {
        let list: Vec<String> = out.failures.iter().map(|(b, e)| format!("{b}: {e}")).collect();
        Err(Failure::Solver(anyhow::anyhow!("solver aborted ({})", list.join("; "))))
    }
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = ScenarioConfig::from_toml_str(&read(path)?)?;
    let m = RunManifest::new(&cfg)?;
    println!("config ok: {}", if cfg.name.is_empty() { "(unnamed)" } else { &cfg.name });
    println!("  hash         {}", m.config_hash);
    println!("  backends     {:?}", cfg.backends);
    println!("  density      {:.6e} m^-3", m.density_m3);
    println!("  eta          {:.6e}", m.eta_effective);
    println!("  peak field   {:.4e} V/m ({:.4} au)", cfg.pulse.e0_v_per_m, m.field_au);
    println!("  grid         {} nodes, dt = {:.4e} s", m.setup.layout.nz, m.dt);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            for p in PRESETS {
                let c = preset(p).expect("built-in preset");
                println!("{p:<26} E0 = {:.0e} V/m, eta = {:e}", c.pulse.e0_v_per_m, c.medium.eta);
            }
            Ok(())
        }
        Command::Validate { config } => validate(&config),
        Command::ShowConfig { preset: name } => preset(&name)
            .map(|c| print!("{}", c.to_toml_string()))
            .map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
