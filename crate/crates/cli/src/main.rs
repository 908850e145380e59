use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use medf_core::bounds::{check_growth, classify_regime, constant_medf, reindex_sequence};
use medf_core::coding::verify_appropriate;
use medf_core::oracle::{run_suite, Standard, Suite, VerifyConfig};
use medf_core::probe::{match_finder, pigeonhole_bound};
use medf_core::{
    BitSeq, BoundSpec, ConstructionContext, Error, FinSeq, LiftContext, Nat, PairCodec, ProbeConfig, Strategy, Tree,
};

const SCAN_BOUND: usize = 1 << 24;

/// Exit statuses.
const VIOLATED: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "medf", version, about = "Closed maximal eventually different families on finite prefixes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Bound function as JSON, e.g. {"prefix":[2,5,45],"tail":{"kind":"infinity"}}.
    #[arg(long, global = true)]
    fspec: Option<PathBuf>,
    /// Write JSONL here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Largest number of objects enumerated before giving up.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the growth condition up to the horizon.
    GrowthCheck,
    /// Report liminf/limit behaviour and the resulting regime.
    Classify,
    /// Compute the reindex sequence e_0 < e_1 < ….
    Reindex {
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Draw every e_m from {n : F(n) < ∞}.
        #[arg(long)]
        compact: bool,
    },
    /// Round-trip the pair codec and check appropriateness level by level.
    CodecSelftest {
        #[arg(long, default_value_t = 10_000)]
        codes: u64,
    },
    /// Evaluate e, the marked set and ê for a context (g, c).
    Member {
        #[arg(long)]
        g: FinSeq,
        #[arg(long)]
        c: BitSeq,
    },
    #[command(subcommand)]
    Tree(TreeCommand),
    #[command(subcommand)]
    Lift(LiftCommand),
    /// Search for a family member agreeing often with g.
    Probe {
        #[arg(long)]
        g: FinSeq,
        #[arg(long, default_value_t = 1)]
        min_agreements: usize,
        #[arg(long, default_value = "literal")]
        strategy: Strategy,
        /// Longest stem tried in the first case.
        #[arg(long, default_value_t = 4)]
        max_stem: usize,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Values drawn at coordinates with F(n) = ∞.
        #[arg(long, default_value_t = 8)]
        value_cap: u64,
        #[arg(long)]
        compact: bool,
    },
}

#[derive(Subcommand)]
enum TreeCommand {
    /// List the nodes of one level.
    Enum {
        #[arg(long)]
        level: usize,
        /// Values tried at coordinates with F(n) = ∞.
        #[arg(long)]
        value_cap: Option<u64>,
    },
    /// Check whether a sequence is a node.
    Check {
        #[arg(long)]
        node: FinSeq,
    },
}

#[derive(Subcommand)]
enum LiftCommand {
    /// Extend values given on E to a prefix of the full sequence.
    Extend {
        #[arg(long)]
        f: FinSeq,
        #[arg(long)]
        compact: bool,
    },
    /// Check whether g is a prefix of a lifted member.
    Check {
        #[arg(long)]
        g: FinSeq,
        #[arg(long)]
        compact: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Ad,
    Ed,
    Tree,
    Lift,
    All,
}

enum Failure {
    Usage(String),
    Inconclusive(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::ScanBoundExceeded { .. } | Error::HorizonTooSmall { .. } => {
                Failure::Inconclusive(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

struct Out {
    w: Box<dyn Write>,
}

impl Out {
    fn record(&mut self, v: &Value) -> io::Result<()> {
        serde_json::to_writer(&mut self.w, v)?;
        self.w.write_all(b"\n")
    }
}

fn load_spec(global: &Global) -> Result<BoundSpec, Failure> {
    let path = global.fspec.as_ref().ok_or_else(|| Failure::Usage("--fspec is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    BoundSpec::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        VIOLATED
    }
}

fn run(cli: Cli, out: &mut Out) -> Result<u8, Failure> {
    let g = &cli.global;
    let spec = load_spec(g)?;
    match cli.command {
        Command::GrowthCheck => {
            let r = check_growth(&spec, g.horizon.unwrap_or(8));
            out.record(&json!({ "command": "growth-check", "pass": r.passed(), "report": r }))?;
            Ok(status(r.passed()))
        }
        Command::Classify => {
            let regime = classify_regime(&spec);
            let constants = constant_medf(&spec).ok().map(|fs| fs.len());
            out.record(&json!({
                "command": "classify",
                "regime": regime,
                "pigeonhole_bound": pigeonhole_bound(&spec).map(|m| medf_core::json::nat_value(&m)),
                "constant_family_size": constants,
            }))?;
            Ok(0)
        }
        Command::Reindex { count, compact } => {
            let r = reindex_sequence(&spec, count, compact, SCAN_BOUND)?;
            let composed = r.composed_spec(&spec);
            out.record(&json!({
                "command": "reindex",
                "entries": r.entries,
                "compact": compact,
                "composed": composed.prefix(),
            }))?;
            Ok(0)
        }
        Command::CodecSelftest { codes } => {
            let codec = PairCodec::new(spec.clone());
            let mut failure = None;
            for code in 0..codes {
                let code = Nat::from(code);
                let p = codec.decode(&code);
                if codec.encode_pair(&p).ok().as_ref() != Some(&code) {
                    failure = Some(json!({ "code": medf_core::json::nat_value(&code), "pair": p }));
                    break;
                }
            }
            let level_bound = codec.infinite_from().map_or(g.horizon.unwrap_or(4), |l| l.saturating_sub(1));
            let r = verify_appropriate(&codec, level_bound, g.budget)?;
            let pass = failure.is_none() && r.passed();
            out.record(&json!({
                "command": "codec-selftest",
                "pass": pass,
                "round_trip_codes": codes,
                "round_trip_failure": failure,
                "appropriateness": r,
            }))?;
            Ok(status(pass))
        }
        Command::Member { g: seq, c } => {
            let ctx = ConstructionContext::from_spec(&spec, seq, c)?;
            let upto = g.horizon.unwrap_or(ctx.len());
            let e = ctx.e_prefix(upto)?;
            let e_hat = ctx.e_hat_prefix(upto)?;
            let in_tree = Tree::from_codec(ctx.codec().clone()).contains(&e_hat);
            out.record(&json!({
                "command": "member",
                "g": ctx.g(),
                "c": ctx.c(),
                "good": medf_core::construction::is_good(ctx.c()),
                "e": e,
                "marked_set": ctx.marked_set()?,
                "e_hat": e_hat,
                "in_tree": in_tree,
            }))?;
            Ok(0)
        }
        Command::Tree(TreeCommand::Enum { level, value_cap }) => {
            let tree = Tree::new(&spec);
            for f in tree.level(level, value_cap, g.budget)? {
                out.record(&json!({ "f": f, "valid": true }))?;
            }
            Ok(0)
        }
        Command::Tree(TreeCommand::Check { node }) => {
            let tree = Tree::new(&spec);
            let valid_len = tree.valid_prefix_len(&node);
            let valid = valid_len == node.len();
            out.record(&json!({ "f": node, "valid": valid, "valid_prefix_len": valid_len }))?;
            Ok(status(valid))
        }
        Command::Lift(LiftCommand::Extend { f, compact }) => {
            let horizon = g.horizon.unwrap_or(16);
            let lift = LiftContext::new(&spec, horizon, compact, SCAN_BOUND)?;
            let lifted = lift.lift_member_prefix(&f, horizon)?;
            out.record(&json!({
                "command": "lift-extend",
                "f": f,
                "e": lift.reindex().entries,
                "g": lifted,
            }))?;
            Ok(0)
        }
        Command::Lift(LiftCommand::Check { g: seq, compact }) => {
            let horizon = g.horizon.unwrap_or(seq.len()).max(seq.len());
            let lift = LiftContext::new(&spec, horizon, compact, SCAN_BOUND)?;
            let member = lift.lift_membership(&seq);
            out.record(&json!({ "command": "lift-check", "g": seq, "member": member }))?;
            Ok(status(member))
        }
        Command::Probe { g: seq, min_agreements, strategy, max_stem } => {
            let codec = PairCodec::new(spec);
            let r = match_finder(&codec, &seq, ProbeConfig { min_agreements, strategy, max_stem })?;
            let found = r.found;
            out.record(&json!({ "command": "probe", "report": r }))?;
            Ok(if found { 0 } else { INCONCLUSIVE })
        }
        Command::Verify { suite, samples, value_cap, compact } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Ad => vec![Suite::Ad],
                SuiteArg::Ed => vec![Suite::Ed],
                SuiteArg::Tree => vec![Suite::Tree],
                SuiteArg::Lift => vec![Suite::Lift],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let cfg = VerifyConfig {
                horizon: g.horizon.unwrap_or(3),
                seed: g.seed,
                samples,
                budget: g.budget,
                value_cap,
                compact,
            };
            let mut pass = true;
            for s in suites {
                let r = run_suite(&Standard, s, &spec, &cfg)?;
                pass &= r.pass;
                out.record(&serde_json::to_value(&r).map_err(Error::from)?)?;
            }
            Ok(status(pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let w: Box<dyn Write> = match &cli.global.output {
        Some(path) => match fs::File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("medf: {}: {e}", path.display());
                return ExitCode::from(USAGE);
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut out = Out { w };
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("medf: {msg}");
            USAGE
        }
        Err(Failure::Inconclusive(msg)) => {
            eprintln!("medf: inconclusive: {msg}");
            INCONCLUSIVE
        }
        Err(Failure::Io(e)) => {
            eprintln!("medf: {e}");
            USAGE
        }
    };
    if let Err(e) = out.w.flush() {
        eprintln!("medf: {e}");
        return ExitCode::from(USAGE);
    }
    ExitCode::from(code)
}
