mod expr;
mod job;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use feynsec::decomp::{DecompError, DEFAULT_CAP};
use feynsec::graphpoly::GraphError;
use feynsec::hironaka::{play_with, BPolicy, GameConfig, GameError, Offset, PointSet, Strategy};
use feynsec::mcint::{with_thread_pool, MCConfig, McError};
use feynsec::pipeline::{decompose_graph, pipeline, PipelineConfig, PipelineError};
use feynsec::polylog::PolylogError;
use feynsec::words::{
    antipode_quasi, antipode_shuffle, coproduct, lyndon_words, quasi_shuffle, shuffle, Letter, MergePairing, Word,
    WordsError,
};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("{file}:{line}:{column}: {msg}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Polylog(#[from] PolylogError),
    #[error(transparent)]
    Words(#[from] WordsError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Pipeline(PipelineError::Decomp(DecompError::StrategyFailure { .. }))
            | CliError::Pipeline(PipelineError::Decomp(DecompError::Game(GameError::StrategyFailure(_))))
            | CliError::Game(GameError::StrategyFailure(_)) => 4,
            CliError::Pipeline(PipelineError::Mc(McError::Threads(_))) => 2,
            CliError::Game(GameError::BadMove(_) | GameError::Empty | GameError::Dimension(..)) => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reply {
    Max,
    Min,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OffsetArg {
    Unit,
    Extracted,
}

#[derive(Parser, Debug)]
#[command(name = "feynsec", version, about = "Sector decomposition of Feynman integrals")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Laurent coefficients of a graph integral.
    Evaluate {
        graph: PathBuf,
        /// Highest ε order; defaults to the one in the graph file.
        #[arg(long, allow_negative_numbers = true)]
        order: Option<i32>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 2009)]
        seed: u64,
        #[arg(long, default_value = "pairdiff", value_parser = parse_strategy)]
        strategy: Strategy,
    },
    /// Print the final sectors of a graph integral.
    Decompose {
        graph: PathBuf,
        #[arg(long, default_value = "pairdiff", value_parser = parse_strategy)]
        strategy: Strategy,
    },
    /// Play the polyhedra game, points given as comma-separated coordinates.
    Game {
        #[arg(required = true)]
        points: Vec<String>,
        #[arg(long, default_value = "pairdiff", value_parser = parse_strategy)]
        strategy: Strategy,
        /// Player B's reply rule.
        #[arg(long, value_enum, default_value = "max")]
        reply: Reply,
        /// Seed for the random reply rule.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "unit")]
        offset: OffsetArg,
        #[arg(long, default_value_t = feynsec::hironaka::MOVE_CAP)]
        max_moves: usize,
    },
    /// Shuffle-algebra operations on words; one character per letter, `e` is the empty word.
    Words {
        #[command(subcommand)]
        op: WordsOp,
    },
    /// Evaluate a polylogarithm expression such as `Li(2,1;0.5,1)` or `Z(10;2;1)`.
    Polylog { expr: String },
}

#[derive(Subcommand, Debug)]
enum WordsOp {
    Shuffle {
        u: String,
        v: String,
    },
    /// Quasi-shuffle with the free merge of letters.
    Quasi {
        u: String,
        v: String,
    },
    Coproduct {
        w: String,
    },
    Antipode {
        w: String,
        #[arg(long)]
        quasi: bool,
    },
    /// Lyndon words over the given letters up to a length.
    Lyndon {
        alphabet: String,
        max_len: usize,
    },
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: GameError| e.to_string())
}

fn parse_point(s: &str) -> Result<Vec<u32>, CliError> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad point {s:?}")))
        })
        .collect()
}

fn evaluate(
    path: &Path,
    order: Option<i32>,
    samples: u64,
    seed: u64,
    strategy: Strategy,
    format: Format,
) -> Result<String, CliError> {
    let job = job::load(path)?;
    let mc = MCConfig::new(samples, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = PipelineConfig {
        target_order: order.unwrap_or(job.order),
        strategy,
        mc,
        cap: DEFAULT_CAP,
    };
    let r = with_thread_pool(|| pipeline(&job.graph, &job.kinematics, job.dim_anchor, &cfg))
        .map_err(PipelineError::from)??;
    Ok(match format {
        Format::Text => r.series.iter().map(|(o, c, e)| format!("{o} {c:?} {e:?}\n")).collect(),
        Format::Json => {
            let v = json!({ "series": r.series, "diagnostics": r.diagnostics });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
    })
}

fn decompose(path: &Path, strategy: Strategy, format: Format) -> Result<String, CliError> {
    let job = job::load(path)?;
    let (primary, sectors) =
        with_thread_pool(|| decompose_graph(&job.graph, &job.kinematics, job.dim_anchor, strategy, DEFAULT_CAP))
            .map_err(PipelineError::from)??;
    Ok(match format {
        Format::Text => {
            let mut out = format!("primary {primary}\nsectors {}\n", sectors.len());
            for (i, s) in sectors.iter().enumerate() {
                out.push_str(&format!("{i} {s}\n"));
            }
            out
        }
        Format::Json => {
            let list: Vec<String> = sectors.iter().map(|s| s.to_string()).collect();
            format!("{}\n", json!({ "primary": primary, "sectors": list }))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn game(
    points: &[String],
    strategy: Strategy,
    reply: Reply,
    seed: u64,
    offset: OffsetArg,
    max_moves: usize,
    format: Format,
) -> Result<String, CliError> {
    let pts: Vec<Vec<u32>> = points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?;
    let dim = pts.first().map_or(0, Vec::len);
    let m = PointSet::new(dim, pts)?;
    let b = match reply {
        Reply::Max => BPolicy::MaxCoordinate,
        Reply::Min => BPolicy::MinCoordinate,
        Reply::Random => BPolicy::Random(seed),
    };
    let cfg = GameConfig {
        offset: match offset {
            OffsetArg::Unit => Offset::Unit,
            OffsetArg::Extracted => Offset::Extracted,
        },
        move_cap: max_moves,
        ..GameConfig::default()
    };
    let (n, t) = play_with(&m, strategy, b, &cfg)?;
    // coordinates are shown 1-based, like the variables x1, x2, ...
    let subset = |s: &[usize]| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
    Ok(match format {
        Format::Text => {
            let mut out = format!("start {}\n", t.start);
            for (k, r) in t.moves.iter().enumerate() {
                out.push_str(&format!(
                    "{} S={{{}}} pick={} -> {} measure {} -> {}\n",
                    k + 1,
                    subset(&r.mv.subset),
                    r.mv.pick + 1,
                    r.position,
                    r.measure_before,
                    r.measure_after
                ));
            }
            out.push_str(&format!("moves {n}\n"));
            out
        }
        Format::Json => {
            let moves: Vec<_> = t
                .moves
                .iter()
                .map(|r| {
                    json!({
                        "subset": r.mv.subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "pick": r.mv.pick + 1,
                        "position": r.position.to_string(),
                    })
                })
                .collect();
            format!(
                "{}\n",
                json!({ "start": t.start.to_string(), "moves": n, "transcript": moves })
            )
        }
    })
}

fn words(op: &WordsOp) -> Result<String, CliError> {
    let w = |s: &str| Word::<Letter>::parse(s);
    let out = match op {
        WordsOp::Shuffle { u, v } => shuffle(&w(u), &w(v)).to_string(),
        WordsOp::Quasi { u, v } => quasi_shuffle(&w(u), &w(v), &MergePairing)?.to_string(),
        WordsOp::Coproduct { w: x } => coproduct(&w(x)).to_string(),
        WordsOp::Antipode { w: x, quasi: false } => antipode_shuffle(&w(x)).to_string(),
        WordsOp::Antipode { w: x, quasi: true } => antipode_quasi(&w(x), &MergePairing)?.to_string(),
        WordsOp::Lyndon { alphabet, max_len } => {
            let mut letters: Vec<Letter> = alphabet.chars().map(Letter::new).collect();
            letters.sort();
            letters.dedup();
            lyndon_words(&letters, *max_len)
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    Ok(format!("{out}\n"))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Evaluate {
            graph,
            order,
            samples,
            seed,
            strategy,
        } => evaluate(graph, *order, *samples, *seed, *strategy, format),
        Command::Decompose { graph, strategy } => decompose(graph, *strategy, format),
        Command::Game {
            points,
            strategy,
            reply,
            seed,
            offset,
            max_moves,
        } => game(points, *strategy, *reply, *seed, *offset, *max_moves, format),
        Command::Words { op } => words(op),
        Command::Polylog { expr: e } => {
            let v = expr::evaluate(e)?;
            Ok(match format {
                Format::Text => format!("{}\n", v.text()),
                Format::Json => format!("{}\n", v.json()),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
