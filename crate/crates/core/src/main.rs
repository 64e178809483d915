use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use freevol::filling::{check_filling, check_f3_classes, WhiteheadGraph};
use freevol::pingpong::{
    certify, classify, factors, no_periodic_orbit_factored, sample_ping_pong, PingPongConfig, TwistWord, DEFAULT_LAMBDA_Q,
};
use freevol::splittings::{CyclicSplitting, PairSpec, SplittingPair, SCHEMA};
use freevol::stallings::LabeledGraph;
use freevol::twisting::{check_theorem_b, constants, TwistError};
use freevol::volume::{bilipschitz_sample, volume_report};
use freevol::words::{CyclicWord, Word};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "freevol", version, about = "Free volume, Dehn twists and filling pairs of cyclic splittings of free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args)]
struct PairArg {
    /// Pair of splittings (JSON).
    #[arg(long)]
    pair: PathBuf,
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long = "max-len", default_value_t = 12)]
    max_len: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Fold generators into the core graph of the subgroup they generate.
    Fold {
        #[arg(short = 'k', long = "rank")]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Free volume of a subgroup with respect to a splitting.
    Volume {
        #[arg(long)]
        splitting: PathBuf,
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check whether two splittings fill (exit 0 fills, 1 not, 2 unknown).
    Fill {
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        out: Output,
    },
    /// Whitehead-minimize cyclic words and test them for separability.
    Whitehead {
        #[arg(short = 'k', long = "rank")]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Bounded cancellation and twist constants for a pair.
    Constants {
        #[command(flatten)]
        pair: PairArg,
        /// Rank bound for subgroups; defaults to the ambient rank minus one.
        #[arg(long = "subgroup-rank")]
        subgroup_rank: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the linear volume bounds under the twist of the first tree.
    Theoremb {
        #[command(flatten)]
        pair: PairArg,
        #[arg(short = 'n', long)]
        power: u32,
        #[arg(required = true)]
        words: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Sample the ratio of summed tree volumes to word length.
    Sample {
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Ping-pong threshold, classification and certificates.
    Pingpong {
        #[command(subcommand)]
        command: PingPongCommand,
    },
}

#[derive(Subcommand)]
enum PingPongCommand {
    /// Certify a twist word such as "1:+N 2:-N" (exit 0 certified, 1 twist power, 3 hypotheses not met).
    Gen {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        word: String,
        #[arg(long = "lambda-q", default_value_t = DEFAULT_LAMBDA_Q)]
        lambda_q: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Classify a cyclic subgroup or proper free factor.
    Classify {
        #[command(flatten)]
        pair: PairArg,
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long = "lambda-q", default_value_t = DEFAULT_LAMBDA_Q)]
        lambda_q: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Sample subgroups and check that each twist sends them across.
    Lemma {
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Search short conjugacy classes for periodic orbits of a twist word.
    Orbits {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        word: String,
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
        #[arg(long = "max-power", default_value_t = 4)]
        max_power: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    result: T,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn emit<T: Serialize>(out: &Output, command: &str, result: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    if out.json {
        let s = serde_json::to_string_pretty(&Envelope { schema: SCHEMA, command, result })?;
        println!("{s}");
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn parse_words(words: &[String], k: usize) -> Result<Vec<Word>, Failure> {
    words
        .iter()
        .map(|s| {
            let w = Word::parse_in_rank(s, k)?;
            if w.is_empty() {
                return Err(Failure(format!("word `{s}` is trivial")));
            }
            Ok(w)
        })
        .collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_pair(arg: &PairArg) -> Result<SplittingPair, Failure> {
    let spec: PairSpec = serde_json::from_str(&read(&arg.pair)?)?;
    Ok(SplittingPair::from_spec(&spec)?)
}

fn graph_text(g: &LabeledGraph) -> String {
    format!("vertices {}\nedges {}\nrank {}\n", g.num_vertices(), g.num_edges(), g.fundamental_rank())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Fold { rank, words, dot, out } => {
            let gens = parse_words(&words, rank)?;
            let g = LabeledGraph::from_generators(rank, &gens).fold(true);
            if dot {
                print!("{}", g.to_dot());
                return Ok(0);
            }
            let form = g.canonical_form();
            emit(&out, "fold", &form, || graph_text(&g))?;
            Ok(0)
        }
        Command::Volume { splitting, words, dot, out } => {
            let s = CyclicSplitting::from_json(&read(&splitting)?)?;
            let gens = parse_words(&words, s.rank())?;
            let report = volume_report(&s, &gens)?;
            if dot {
                print!("{}", report.to_dot());
                return Ok(0);
            }
            emit(&out, "volume", &report, || {
                format!(
                    "free_volume {}\nquotient_edges {}\nessential_chains {}\nessential_vertices {}\n",
                    report.free_volume,
                    report.quotient_edges,
                    report.essential_chains().count(),
                    report.essential_vertices.len()
                )
            })?;
            Ok(0)
        }
        Command::Fill { pair, out } => {
            let cert = check_filling(&load_pair(&pair)?);
            emit(&out, "fill", &cert, || {
                let mut s = format!(
                    "f2 {}\nf3 {}\nverdict {:?}\nminimized {}\n",
                    cert.f2.holds,
                    cert.f3.holds,
                    cert.verdict,
                    cert.f3.minimized.classes.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
                );
                if let Some(note) = &cert.note {
                    s.push_str(&format!("note {note}\n"));
                }
                s
            })?;
            Ok(cert.verdict.exit_code() as u8)
        }
        Command::Whitehead { rank, words, dot, out } => {
            let classes: Vec<CyclicWord> = parse_words(&words, rank)?.iter().map(CyclicWord::new).collect();
            let e = check_f3_classes(rank, classes);
            if dot {
                print!("{}", WhiteheadGraph::to_dot(&e.graph));
                return Ok(0);
            }
            emit(&out, "whitehead", &e, || {
                format!(
                    "minimized {}\nlength {}\nmoves {}\nconnected {}\ncut_vertex {}\nseparable {}\n",
                    e.minimized.classes.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                    e.minimized.total_length,
                    e.minimized.moves.len(),
                    e.connected,
                    e.cut_vertex.map_or("none".to_string(), |l| l.to_string()),
                    !e.holds
                )
            })?;
            Ok(u8::from(!e.holds))
        }
        Command::Constants { pair, subgroup_rank, out } => {
            let p = load_pair(&pair)?;
            let r = subgroup_rank.unwrap_or(p.rank().saturating_sub(1).max(1));
            let both = [constants(r, &p)?, constants(r, &p.swapped())?];
            emit(&out, "constants", &both, || {
                both.iter()
                    .enumerate()
                    .map(|(i, k)| format!("twist {}: B {} M {} C {} ell {}\n", i + 1, k.b, k.m, k.c, k.ell))
                    .collect()
            })?;
            Ok(0)
        }
        Command::Theoremb { pair, power, words, out } => {
            let p = load_pair(&pair)?;
            let gens = parse_words(&words, p.rank())?;
            let k = constants(p.rank().saturating_sub(1).max(1), &p)?;
            let report = match check_theorem_b(&p, &gens, power, &k) {
                Ok(r) => r,
                Err(TwistError::HypothesisViolated(msg)) => {
                    eprintln!("hypotheses not met: {msg}");
                    return Ok(3);
                }
                Err(e) => return Err(e.into()),
            };
            emit(&out, "theoremb", &report, || {
                report
                    .checks
                    .iter()
                    .map(|c| format!("n {:+}: volume {} in [{}, {}] {}\n", c.exponent, c.volume, c.lower, c.upper, c.lower_ok && c.upper_ok))
                    .collect()
            })?;
            Ok(u8::from(!report.holds()))
        }
        Command::Sample { pair, sampling, out } => {
            let p = load_pair(&pair)?;
            let s = bilipschitz_sample(&p, sampling.trials, sampling.max_len, sampling.seed);
            emit(&out, "sample", &s, || {
                format!(
                    "used {}\nzero_sums {}\nmin_ratio {}\nmax_ratio {}\n",
                    s.used,
                    s.zero_sums,
                    s.min_ratio.map_or("none".into(), |r| format!("{r:.4}")),
                    s.max_ratio.map_or("none".into(), |r| format!("{r:.4}"))
                )
            })?;
            Ok(0)
        }
        Command::Pingpong { command } => pingpong(command),
    }
}

fn pingpong(command: PingPongCommand) -> Outcome {
    match command {
        PingPongCommand::Gen { pair, word, lambda_q, out } => {
            let cfg = PingPongConfig::new(&load_pair(&pair)?, lambda_q)?;
            let w = TwistWord::parse(&word, cfg.n_i64()?)?;
            let cert = certify(&cfg, &w);
            emit(&out, "pingpong gen", &cert, || {
                let mut s = format!("word {}\nN {}\nverdict {:?}\n", cert.word, cert.n, cert.verdict);
                for c in &cert.trail {
                    s.push_str(&format!("  {} {} ({})\n", c.name, c.passed, c.detail));
                }
                s
            })?;
            Ok(cert.verdict.exit_code() as u8)
        }
        PingPongCommand::Classify { pair, words, lambda_q, out } => {
            let cfg = PingPongConfig::new(&load_pair(&pair)?, lambda_q)?;
            let gens = parse_words(&words, cfg.pair.rank())?;
            let c = classify(&cfg, &gens)?;
            emit(&out, "pingpong classify", &c, || format!("{:?} vol_t1 {} vol_t2 {}\n", c.side, c.vol_t1, c.vol_t2))?;
            Ok(0)
        }
        PingPongCommand::Lemma { pair, sampling, out } => {
            let cfg = PingPongConfig::new(&load_pair(&pair)?, DEFAULT_LAMBDA_Q)?;
            let runs = [
                sample_ping_pong(&cfg, 1, sampling.trials, sampling.max_len, sampling.seed)?,
                sample_ping_pong(&cfg, 2, sampling.trials, sampling.max_len, sampling.seed.wrapping_add(1))?,
            ];
            emit(&out, "pingpong lemma", &runs, || {
                runs.iter().map(|r| format!("twist {}: cases {} violations {}\n", r.twist, r.cases.len(), r.violations)).collect()
            })?;
            Ok(u8::from(runs.iter().any(|r| r.violations > 0)))
        }
        PingPongCommand::Orbits { pair, word, max_len, max_power, seed, out } => {
            let cfg = PingPongConfig::new(&load_pair(&pair)?, DEFAULT_LAMBDA_Q)?;
            let w = TwistWord::parse(&word, cfg.n_i64()?)?;
            let r = no_periodic_orbit_factored(&factors(&cfg, &w), max_len, max_power, seed);
            emit(&out, "pingpong orbits", &r, || {
                format!(
                    "classes {}\nviolations {}\nunresolved {}\npassed {}\n",
                    r.classes,
                    r.violation_count,
                    r.unresolved.len(),
                    r.passed()
                )
            })?;
            Ok(if r.violation_count > 0 {
                1
            } else if !r.unresolved.is_empty() {
                2
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
