use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zerogap_core::codegen::PackedCode;
use zerogap_core::experiment::{self, error_exit_code, PipelineConfig, RunOutput};
use zerogap_core::Channel;

#[derive(Parser)]
#[command(
    name = "zerogap",
    version,
    about = "Zero-error vs epsilon-error sum-rate experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random erasure/identity channel with alphabet 2^q.
    Sample {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact zero-error sum rate, largest BPIS and BPIS floor per channel.
    Exact {
        /// Channel file or builtin; all 16 binary channels when omitted.
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Largest Q^n the exhaustive search accepts.
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Largest bipartite independent set of a channel's conflict graph.
    Bpis {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Maximum number of left vertices for the exact search.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte Carlo check of the largest-BPIS bound on random channels.
    #[command(name = "prop5-sweep")]
    RandomBpisSweep {
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Grid of the sum-rate upper bound 2q(1-1/n)(1+gamma).
    #[command(name = "theorem3-sweep")]
    UpperBoundSweep {
        /// Largest q in the grid.
        #[arg(long, default_value_t = 8)]
        q: u32,
        /// Largest n in the grid.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0])]
        gamma: Vec<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build the uniform family pair and check it.
    #[command(name = "uniform-construct")]
    UniformConstruct {
        /// Alphabet 2^q.
        #[arg(long, default_value_t = 1, conflicts_with = "alphabet")]
        q: u32,
        /// Explicit alphabet size (for sizes that are not powers of two).
        #[arg(long)]
        alphabet: Option<usize>,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Exhaustive below this many cross pairs, otherwise audit this many.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sample conditioned channels, pack uniform families and verify.
    Pipeline(PipelineArgs),
    /// Check a packed code against a channel.
    Verify {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        code: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Closed-form bounds.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Evaluate a bound, e.g. `bounds eval upper_bound --params q=20,n=4,gamma=0.5`.
    Eval {
        name: String,
        #[arg(long, default_value = "")]
        params: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// List bound names.
    List,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.01)]
    slack: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draws per family before packing.
    #[arg(long, default_value_t = 256)]
    budget: usize,
    /// Override the derived packing distance d.
    #[arg(long)]
    raw_d: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_rejections: usize,
    /// Write the first trial's packed code here.
    #[arg(long)]
    code_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Core(zerogap_core::Error),
    Io(String),
}

impl From<zerogap_core::Error> for Failure {
    fn from(e: zerogap_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_channel(arg: &str) -> Result<Channel, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        Ok(read(path)?.parse::<Channel>()?)
    } else {
        Ok(Channel::builtin(arg)?)
    }
}

fn emit(out: &OutArg, output: &RunOutput) -> Result<(), Failure> {
    match &out.out {
        Some(p) => fs::write(p, &output.text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let (output, out) = match cli.command {
        Command::Sample { q, eps, seed, out } => (experiment::sample(q, eps, seed)?, out),
        Command::Exact {
            channel,
            n,
            budget,
            out,
        } => {
            let channels = channel.map(|c| load_channel(&c).map(|ch| vec![(c, ch)])).transpose()?;
            (experiment::exact(channels, n, budget)?, out)
        }
        Command::Bpis {
            channel,
            n,
            budget,
            out,
        } => (experiment::bpis(&load_channel(&channel)?, n, budget)?, out),
        Command::RandomBpisSweep {
            q,
            eps,
            trials,
            seed,
            out,
        } => (experiment::random_bpis_sweep(q, eps, trials, seed)?.0, out),
        Command::UpperBoundSweep { q, n, gamma, eps, out } => (experiment::upper_bound_sweep(q, n, &gamma, eps)?, out),
        Command::UniformConstruct {
            q,
            alphabet,
            n,
            gamma,
            budget,
            seed,
            out,
        } => {
            let q_size = match alphabet {
                Some(a) => a,
                None => 1usize
                    .checked_shl(q)
                    .ok_or_else(|| Failure::Core(zerogap_core::Error::Domain(format!("q = {q} is too large"))))?,
            };
            (experiment::uniform_construct(q_size, n, gamma, budget, seed)?, out)
        }
        Command::Pipeline(a) => {
            let cfg = PipelineConfig {
                q_bits: a.q,
                n: a.n,
                eps: a.eps,
                gamma: a.gamma,
                slack: a.slack,
                trials: a.trials,
                seed: a.seed,
                sample_cap: a.budget,
                raw_d: a.raw_d,
                max_rejections: a.max_rejections,
            };
            let (output, trials) = experiment::pipeline(&cfg)?;
            if let (Some(path), Some(first)) = (&a.code_out, trials.first()) {
                fs::write(path, first.code.to_text()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            (output, a.out)
        }
        Command::Verify { channel, code, out } => {
            let channel = load_channel(&channel)?;
            let code: PackedCode = read(&code)?.parse()?;
            (experiment::verify(&channel, &code)?, out)
        }
        Command::Bounds { command } => match command {
            BoundsCommand::Eval { name, params, out } => {
                let params = experiment::parse_params(&params)?;
                (experiment::bounds_eval(&name, &params)?, out)
            }
            BoundsCommand::List => {
                for name in zerogap_core::bounds::BOUND_NAMES {
                    println!("{name}");
                }
                return Ok(0);
            }
        },
    };
    emit(&out, &output)?;
    Ok(output.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
