use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsscomm::benchgen::LfrParams;
use dsscomm::io::CoverFormat;
use dsscomm::{CommunityDefinition, DetectParams, SimilarityKind};

mod run;

use run::CliError;

/// Community detection with the Dynamic Structural Similarity.
#[derive(Debug, Parser)]
#[command(name = "dsscomm", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect disjoint communities; writes `label community` lines.
    Detect {
        /// Edge list, one `u v` pair per line.
        input: PathBuf,
        /// Partition output file.
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Detect overlapping communities; writes a fuzzy cover and its crisp cut.
    DetectOverlap {
        /// Edge list, one `u v` pair per line.
        input: PathBuf,
        /// Fuzzy cover output: one community per line, `label:probability` entries.
        #[arg(long)]
        fuzzy: PathBuf,
        /// Crisp cover output: one community per line. With --alpha-sweep this
        /// is a prefix and every threshold gets its own `<path>.alpha<value>` file.
        #[arg(long)]
        crisp: PathBuf,
        /// Membership threshold of the crisp cut. 0 keeps every positive
        /// membership, so the crisp cover is the fuzzy cover's full support.
        #[arg(long, default_value_t = 0.0, conflicts_with = "alpha_sweep")]
        alpha: f64,
        /// Write crisp cuts at 0.005, 0.01, 0.02, 0.03, 0.04 and 0.05 instead of --alpha.
        #[arg(long)]
        alpha_sweep: bool,
        /// Also write the underlying disjoint partition.
        #[arg(long, value_name = "PATH")]
        partition: Option<PathBuf>,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Compare two partitions (sqrt-NMI) or two covers (overlapping NMI and
    /// adjusted Omega); prints a single `key=value` line.
    Eval {
        /// Detected partition or cover.
        detected: PathBuf,
        /// Ground truth partition or cover.
        truth: PathBuf,
        /// Whether both files hold partitions or covers.
        #[arg(long, value_enum, default_value_t = EvalMode::Partition)]
        mode: EvalMode,
        /// Layout of the ground-truth file in cover mode.
        #[arg(long, value_enum, default_value_t = TruthFormat::Cover)]
        gt_format: TruthFormat,
    },
    /// Generate an LFR-like benchmark: `<prefix>.edges`, `<prefix>.cover`,
    /// `<prefix>.nodewise` and a `<prefix>.json` metadata file.
    Gen {
        #[command(flatten)]
        lfr: LfrArgs,
        /// Output path prefix.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate, detect and evaluate in one run; prints one CSV row.
    ///
    /// Overlap scores are the best over the crisp cuts at 0.005..0.05. The nmi
    /// column is empty when the ground truth overlaps. wall_ms covers the
    /// detection stages only.
    Bench {
        #[command(flatten)]
        lfr: LfrArgs,
        #[command(flatten)]
        detect: DetectArgs,
        /// Print the CSV header line first.
        #[arg(long)]
        header: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Partition,
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TruthFormat {
    Cover,
    Nodewise,
}

impl From<TruthFormat> for CoverFormat {
    fn from(f: TruthFormat) -> Self {
        match f {
            TruthFormat::Cover => CoverFormat::Cover,
            TruthFormat::Nodewise => CoverFormat::Nodewise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Similarity {
    /// Dynamic Structural Similarity (fixed-point iteration).
    Dss,
    /// Local cosine similarity of closed neighborhoods.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Definition {
    /// Internal degree exceeds external degree.
    Weak,
    /// Internal edges exceed the edges toward any single neighbor community.
    MostWeak,
}

#[derive(Debug, Clone, Args)]
struct DetectArgs {
    /// Edge similarity driving the merges.
    #[arg(long, value_enum, default_value_t = Similarity::Dss)]
    similarity: Similarity,
    /// Fixed-point iterations T of the DSS.
    #[arg(short = 't', long, default_value_t = dsscomm::dss::DEFAULT_ITERATIONS)]
    iterations: usize,
    /// Community definition CD each community must satisfy.
    #[arg(long = "cd", value_enum, default_value_t = Definition::MostWeak)]
    definition: Definition,
    /// Minimum community size K.
    #[arg(short = 'k', long, default_value_t = 2)]
    min_size: usize,
    /// ε-core tolerance. A bare flag means ε = 0; without the flag no
    /// community is flagged as a core.
    #[arg(
        long,
        visible_alias = "overlap",
        value_name = "EPS",
        num_args = 0..=1,
        default_missing_value = "0"
    )]
    eps: Option<f64>,
    /// Worker threads for the similarity computation (0 uses every core).
    /// Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write the edge similarities as `u v value` lines.
    #[arg(long, value_name = "PATH")]
    dump_similarity: Option<PathBuf>,
}

impl DetectArgs {
    fn kind(&self) -> SimilarityKind {
        match self.similarity {
            Similarity::Dss => SimilarityKind::Dss,
            Similarity::Cosine => SimilarityKind::Cosine,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.similarity {
            Similarity::Dss => "dss",
            Similarity::Cosine => "cosine",
        }
    }

    fn params(&self) -> Result<DetectParams, CliError> {
        if self.min_size == 0 {
            return Err(CliError::Usage("-k must be at least 1".into()));
        }
        if let Some(eps) = self.eps {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--eps must be a non-negative number, got {eps}"
                )));
            }
        }
        Ok(DetectParams {
            definition: match self.definition {
                Definition::Weak => CommunityDefinition::Weak,
                Definition::MostWeak => CommunityDefinition::MostWeak,
            },
            min_size: self.min_size,
            eps: self.eps,
        })
    }
}

#[derive(Debug, Clone, Args)]
struct LfrArgs {
    /// Number of nodes.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Target average degree.
    #[arg(long, default_value_t = 10.0)]
    avgk: f64,
    /// Maximum degree.
    #[arg(long, default_value_t = 50)]
    maxk: usize,
    /// Degree distribution exponent (negative).
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    tau1: f64,
    /// Community size distribution exponent (negative).
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    tau2: f64,
    /// Minimum community size.
    #[arg(long, default_value_t = 10)]
    minc: usize,
    /// Maximum community size.
    #[arg(long, default_value_t = 50)]
    maxc: usize,
    /// Mixing parameter: fraction of each node's edges leaving its communities.
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    /// Number of overlapping nodes.
    #[arg(long, default_value_t = 0)]
    on: usize,
    /// Memberships per overlapping node.
    #[arg(long, default_value_t = 1)]
    om: usize,
    /// Random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl From<&LfrArgs> for LfrParams {
    fn from(a: &LfrArgs) -> Self {
        LfrParams {
            n: a.n,
            avgk: a.avgk,
            maxk: a.maxk,
            tau1: a.tau1,
            tau2: a.tau2,
            minc: a.minc,
            maxc: a.maxc,
            mu: a.mu,
            on: a.on,
            om: a.om,
            seed: a.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
