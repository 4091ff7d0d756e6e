use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "tim", version, about = "Interference-alignment schemes, bounds and learned colorings")]
pub struct Cli {
    /// Base seed for every random choice of the run.
    #[arg(long, global = true, env = "TIM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for instance-level parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate a dataset directory (manifest plus one file per instance).
    Gen(GenArgs),
    /// Print the acyclic-subgraph DoF bound of each instance.
    Bound(InputArgs),
    /// Run the method ladder on every instance.
    Solve(SolveArgs),
    /// Train the coloring agent and write a checkpoint.
    Train(TrainArgs),
    /// Compare the trained agent against SLI and TabuCol.
    Eval(EvalArgs),
    /// Check a scheme against an instance.
    Verify(VerifyArgs),
    /// Render an instance, optionally labeled by a scheme or coloring.
    Export(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
    /// Output directory.
    #[arg(long, global = true, default_value = "dataset")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 100)]
    pub count: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    /// Directed Erdős–Rényi conflict graphs.
    Er {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        /// Keep each message with this probability (speculative, off by default).
        #[arg(long)]
        q: Option<f64>,
    },
    /// Undirected graphs of a fixed chromatic number, for the coloring agent.
    ErChi {
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 5)]
        chi: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_draws: usize,
    },
    /// Device-to-device layouts with line-of-sight path loss.
    Wireless {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        density: f64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    /// Dataset directories or instance files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderMethod {
    Osia,
    Ovia,
    Ssia,
    Svia,
    SimoVector,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Receive antennas; overrides the count stored in topology files.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest stream count of the vector stages.
    #[arg(long, default_value_t = 2)]
    pub max_b: usize,
    /// Ladder stages to run besides TDMA.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "osia,ovia,ssia,svia")]
    pub methods: Vec<LadderMethod>,
    /// Node-expansion budget per exact search (0 = unlimited).
    #[arg(long, default_value_t = tim_core::ia::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Channel draws for generic-rank checks.
    #[arg(long, default_value_t = tim_core::ia::DEFAULT_TRIALS)]
    pub trials: usize,
    /// JSON-lines output ("-" for stdout).
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Also write the proportions table as CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnvArgs {
    /// Palette size S; defaults to the dataset's chromatic number.
    #[arg(long)]
    pub colors: Option<usize>,
    /// Episode step limit L.
    #[arg(long, default_value_t = tim_core::env::DEFAULT_LIMIT)]
    pub limit: usize,
    /// Weight of the early-completion reward.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    #[arg(long, default_value_t = 16)]
    pub episodes: usize,
    #[arg(long, default_value_t = tim_core::agent::DEFAULT_HIDDEN)]
    pub hidden: usize,
    #[arg(long, default_value = "checkpoint.json")]
    pub checkpoint: PathBuf,
    /// Training curve as CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Sampled rollouts per graph; the best completed one counts.
    #[arg(long, default_value_t = tim_core::agent::DEFAULT_ROLLOUTS)]
    pub rollouts: usize,
    #[arg(long, default_value_t = 1000)]
    pub tabu_iters: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, default_value_t = tim_core::ia::DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, conflicts_with = "coloring")]
    pub scheme: Option<PathBuf>,
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// DOT output ("-" for stdout).
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Also write the instance and labels as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}
