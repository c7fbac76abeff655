use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use weakval::config::{GridSpec, OperatorSpec, StateSpec};
use weakval::{builtin_config, list_builtin, parse_scenario, run_scenario, CliError, Kind, RunOptions, ScenarioConfig};
use weakval_core::ensemble::Schedule;

#[derive(Parser)]
#[command(name = "weakval", version, about = "Pointer-model simulations of weak, protective and post-selected measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak value of an observable between two states
    #[command(name = "weakvalue")]
    WeakValue(Overrides),
    /// Impulsive measurement ensemble with pointer readout
    Impulsive(Overrides),
    /// Mean of weak readings without post-selection
    WeakEnsemble(Overrides),
    /// Pointer distribution after post-selection
    #[command(name = "postselect")]
    PostSelect(Overrides),
    /// Protective measurement on a non-degenerate level, scanned over T
    Protective(Overrides),
    /// Adiabatic measurement under a non-hermitian Hamiltonian
    #[command(name = "nonhermitian")]
    NonHermitian(Overrides),
    /// Two-state vector protected by a spin ancilla
    #[command(name = "protect2sv")]
    Protect2sv(Overrides),
    /// Bra/ket fidelity of the decaying two-level toy
    KaonToy(Overrides),
    /// Scenario files and built-ins
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Run a JSON scenario file or a built-in by name
    Run {
        source: String,
        #[command(flatten)]
        overrides: Box<Overrides>,
    },
    /// List built-in scenarios
    List,
}

/// Values given here replace those in the scenario. Operators and states
/// take a preset name or a JSON array of `[re, im]` pairs.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "T")]
    total_time: Option<f64>,
    #[arg(long = "N")]
    ancilla_spin: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    grid_m: Option<usize>,
    #[arg(long)]
    grid_l: Option<f64>,
    #[arg(long)]
    pre: Option<String>,
    #[arg(long)]
    post: Option<String>,
    #[arg(long)]
    observable: Option<String>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    hamiltonian: Option<String>,
    /// RK4 steps per ramp
    #[arg(long)]
    steps: Option<usize>,
    /// Number of T-doublings in protective scans
    #[arg(long)]
    doublings: Option<u32>,
    #[arg(long)]
    bins: Option<usize>,
    /// Run everything on the calling thread
    #[arg(long)]
    serial: bool,
}

fn spec<T: DeserializeOwned>(flag: &str, text: &str, named: fn(String) -> T) -> Result<T, CliError> {
    if !text.trim_start().starts_with('[') {
        return Ok(named(text.to_string()));
    }
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("--{flag}: {e}"),
    })
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) -> Result<(), CliError> {
        macro_rules! set {
            ($($field:ident <- $src:ident),*) => {
                $(if let Some(v) = self.$src.clone() { cfg.$field = Some(v); })*
            };
        }
        set!(seed <- seed, output <- out, samples <- samples, delta <- delta,
             total_time <- total_time, ancilla_spin <- ancilla_spin, lambda <- lambda,
             theta <- theta, epsilon <- epsilon, steps <- steps, doublings <- doublings, bins <- bins);
        if self.grid_m.is_some() || self.grid_l.is_some() {
            let g = cfg.grid.get_or_insert(GridSpec::default());
            if self.grid_m.is_some() {
                g.points = self.grid_m;
            }
            if self.grid_l.is_some() {
                g.extent = self.grid_l;
            }
        }
        if let Some(t) = &self.pre {
            cfg.pre_state = Some(spec("pre", t, StateSpec::Named)?);
        }
        if let Some(t) = &self.post {
            cfg.post_state = Some(spec("post", t, StateSpec::Named)?);
        }
        if let Some(t) = &self.observable {
            cfg.observable = Some(spec("observable", t, OperatorSpec::Named)?);
        }
        if let Some(t) = &self.system {
            cfg.system = Some(spec("system", t, OperatorSpec::Named)?);
        }
        if let Some(t) = &self.hamiltonian {
            cfg.hamiltonian = Some(spec("hamiltonian", t, OperatorSpec::Named)?);
        }
        Ok(())
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            schedule: if self.serial { Schedule::Serial } else { Schedule::Parallel },
        }
    }
}

fn load(source: &str) -> Result<ScenarioConfig, CliError> {
    if let Some(cfg) = builtin_config(source) {
        return cfg;
    }
    let text = std::fs::read_to_string(source)?;
    parse_scenario(&text)
}

fn run_with(mut cfg: ScenarioConfig, overrides: &Overrides) -> Result<(), CliError> {
    overrides.apply(&mut cfg)?;
    for path in run_scenario(&cfg, &overrides.options())? {
        println!("{}", path.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (kind, overrides) = match cli.command {
        Command::Scenario(ScenarioCommand::List) => {
            print!("{}", list_builtin());
            return Ok(());
        }
        Command::Scenario(ScenarioCommand::Run { source, overrides }) => return run_with(load(&source)?, &overrides),
        Command::WeakValue(o) => (Kind::WeakValue, o),
        Command::Impulsive(o) => (Kind::Impulsive, o),
        Command::WeakEnsemble(o) => (Kind::WeakEnsemble, o),
        Command::PostSelect(o) => (Kind::PostSelect, o),
        Command::Protective(o) => (Kind::Protective, o),
        Command::NonHermitian(o) => (Kind::NonHermitian, o),
        Command::Protect2sv(o) => (Kind::Protect2sv, o),
        Command::KaonToy(o) => (Kind::KaonToy, o),
    };
    run_with(ScenarioConfig::new(kind), &overrides)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
