use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "repulsion",
    version,
    about = "Repulsion functionals on generational sets, their minimizing measures, \
             Riesz 1-energy estimates, and equilibrium weights of separated point \
             configurations"
)]
pub struct Cli {
    /// Master seed for every randomized path.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker thread cap (numbers are identical for any value).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Primary output file; stdout when omitted. When set, a sidecar
    /// <out-stem>.manifest.json records the invocation.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Primary artifact family; each subcommand has a natural default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a generational set and emit its JSON description.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },

    /// Find the repulsion-minimizing leaf measure of a set.
    Minimize {
        /// Set description JSON.
        #[arg(long)]
        set: PathBuf,
        /// `cantor` (4^l) or an explicit increasing list like 1,4,16.
        #[arg(long)]
        schedule: String,
    },

    /// Evaluate the repulsion form of a measure, by both evaluators.
    Repulsion {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        schedule: String,
        /// `equidistributed`, `point:<leaf>`, or a leaf,mass CSV path.
        #[arg(long, default_value = "equidistributed")]
        measure: String,
    },

    /// Monte Carlo 1-energy of a measure on a geometric set.
    Energy {
        #[arg(long)]
        set: PathBuf,
        /// `equidistributed`, `point:<leaf>`, or a leaf,mass CSV path.
        #[arg(long, default_value = "equidistributed")]
        measure: String,
        /// Sample rounds (at least 10000).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Also report the certified repulsion lower bound for this schedule.
        #[arg(long)]
        schedule: Option<String>,
        /// Diameter comparability constant used by the bound.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// Separation comparability constant validated by the bound.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },

    /// Build and solve one repulsion-matrix instance.
    Matrix {
        #[command(flatten)]
        source: InstanceSource,
    },

    /// Sweep instances for negative equilibrium weights.
    Conjecture {
        /// Inclusive cantor generation range, e.g. 1..5 or a single 3.
        #[arg(long)]
        cantor: Option<String>,
        /// Sweep seeded random configurations instead.
        #[arg(long)]
        random: bool,
        /// Number of random configurations.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Points per random configuration.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Ball radius for random configurations.
        #[arg(long, default_value_t = 0.01)]
        r: f64,
        /// Box sidelength for random configurations.
        #[arg(long = "box", default_value_t = 1.0)]
        box_size: f64,
        /// Solve these configuration JSON files (repeatable).
        #[arg(long)]
        config: Vec<PathBuf>,
    },

    /// Capacity-statistic table over cantor generations or config files.
    Capacity {
        /// Inclusive cantor generation range, e.g. 1..5 or a single 3.
        #[arg(long)]
        cantor: Option<String>,
        /// Configuration JSON files (repeatable); the first column is then
        /// the point count.
        #[arg(long)]
        config: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum GenerateKind {
    /// Four-corner Cantor generation n, with geometry.
    Cantor {
        #[arg(long)]
        n: usize,
    },
    /// Uniform-branching tree from a child-count profile like 2,3.
    Socialist {
        #[arg(long)]
        profile: String,
    },
    /// Seeded random filtration, 1..=max-children children per node.
    Random {
        /// Deepest generation.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_children: usize,
    },
}

#[derive(Args)]
pub struct InstanceSource {
    /// Configuration JSON file: { "r": .., "points": [[x, y], ..] }.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cantor generation 1..=7.
    #[arg(long)]
    pub cantor: Option<usize>,
    /// Seeded random configuration with this many points.
    #[arg(long)]
    pub random: Option<usize>,
    /// Ball radius for --random.
    #[arg(long, default_value_t = 0.01)]
    pub r: f64,
    /// Box sidelength for --random.
    #[arg(long = "box", default_value_t = 1.0)]
    pub box_size: f64,
}
