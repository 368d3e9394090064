use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use partref::engine::{quotient, refine_hopcroft, refine_naive, Partition, WeightKind};
use partref::gen::{generate, Family, GenSpec};
use partref::io::{self, Format};
use partref::oracle::{bisim_bruteforce, partitions_equal, MAX_ORACLE_STATES};
use partref::wtree::{audit_tree, audit_tree_with_choice};
use partref::Coalgebra;

mod bench;

#[derive(Parser)]
#[command(name = "partref", version, about = "Minimize state-based systems by partition refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the bisimilarity partition of a system.
    Minimize(MinimizeArgs),
    /// Run every algorithm and the brute-force oracle and compare partitions.
    Compare(CompareArgs),
    /// Check the weighted-tree lemmas and Hopcroft's inequality on a tree file.
    AuditTree(AuditArgs),
    /// Generate a seeded random instance as coalgebra JSON.
    Gen(GenArgs),
    /// Run seeded sweeps and write per-run counters as CSV.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Algo {
    Naive,
    Hopcroft,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum Weight {
    Card,
    Pred,
    Reach,
}

impl From<Weight> for WeightKind {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Card => WeightKind::Card,
            Weight::Pred => WeightKind::Pred,
            Weight::Reach => WeightKind::Reach,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum FamilyArg {
    Dfa,
    Nfa,
    Lts,
    Mc,
    Mdp,
    Chain,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Dfa => Family::Dfa,
            FamilyArg::Nfa => Family::Nfa,
            FamilyArg::Lts => Family::Lts,
            FamilyArg::Mc => Family::Mc,
            FamilyArg::Mdp => Family::Mdp,
            FamilyArg::Chain => Family::Chain,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    input: PathBuf,
    /// coalg-json, dfa-text, aut or mc-tsv
    #[arg(long, default_value = "coalg-json", value_parser = parse_format)]
    format: Format,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "hopcroft")]
    algo: Algo,
    /// Heavy-child weight; hopcroft only (default card).
    #[arg(long, value_enum)]
    weight: Option<Weight>,
    /// Emit the refinement tree and its audit; fails if the audit fails.
    #[arg(long)]
    audit: bool,
    /// Emit run counters.
    #[arg(long)]
    stats: bool,
    /// Include wall-clock time in the counters.
    #[arg(long, requires = "stats")]
    timing: bool,
    /// Verify the result is a signature-consistent fixpoint.
    #[arg(long)]
    check_invariants: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// System file; omit to compare a batch of generated instances.
    input: Option<PathBuf>,
    #[arg(long, default_value = "coalg-json", value_parser = parse_format)]
    format: Format,
    #[arg(long, value_enum, default_value = "dfa")]
    family: FamilyArg,
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Generated instances have 1..=max-states states.
    #[arg(long, default_value_t = 50)]
    max_states: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AuditArgs {
    tree: PathBuf,
    /// Ignore recorded heavy marks and choose heavy children by weight.
    #[arg(long)]
    recompute_heavy: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    states: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
    #[arg(long, default_value_t = 3)]
    out_degree: usize,
    /// Output labels for mc and mdp; 0 for none.
    #[arg(long, default_value_t = 2)]
    labels: usize,
    /// Size of the random core the instance is lifted from.
    #[arg(long)]
    core: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure kinds mapped onto exit codes.
pub(crate) enum Failure {
    /// Unreadable input, bad flags or parse errors: exit 2.
    Usage(String),
    /// Disagreement or failed check: exit 1.
    Check(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub(crate) fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_system(input: &Path, format: Format) -> Result<Coalgebra, Failure> {
    io::parse_input(input, format).map_err(|e| usage(format!("{}: {e}", input.display())))
}

fn minimize(args: MinimizeArgs) -> Outcome {
    if args.algo == Algo::Naive && (args.weight.is_some() || args.audit) {
        return Err(usage("--weight and --audit need --algo hopcroft"));
    }
    let coalg = read_system(&args.input.input, args.input.format)?;
    let kind: WeightKind = args.weight.unwrap_or(Weight::Card).into();
    let mut doc = serde_json::Map::new();
    let mut failed = Vec::new();
    let (partition, stats) = match args.algo {
        Algo::Naive => {
            let run = refine_naive(&coalg);
            (run.partition, run.stats)
        }
        Algo::Hopcroft => {
            let run = refine_hopcroft(&coalg, kind);
            if args.audit {
                let report = run.tree.audit(kind).map_err(usage)?;
                if !report.all_ok() {
                    failed.push("refinement tree audit failed".to_string());
                }
                doc.insert("tree".into(), io::tree_json(&run.tree));
                doc.insert("audit".into(), serde_json::to_value(&report).expect("reports serialize"));
            }
            if args.check_invariants {
                if let Err(e) = run.tree.check_structure() {
                    failed.push(format!("refinement tree: {e}"));
                }
            }
            (run.partition, run.stats)
        }
    };
    if args.check_invariants && quotient(&coalg, &partition).is_err() {
        failed.push("output partition is not signature-consistent".into());
    }
    doc.insert("blocks".into(), io::partition_json(&partition)["blocks"].take());
    if args.stats {
        doc.insert("stats".into(), io::stats_json(&stats, args.timing));
    }
    let mut text = serde_json::to_string(&Value::Object(doc)).expect("json");
    text.push('\n');
    emit(&text, args.out.as_deref())?;
    match failed.is_empty() {
        true => Ok(()),
        false => Err(Failure::Check(failed.join("; "))),
    }
}

/// Partitions from every algorithm on one system, and whether they agree.
fn compare_one(coalg: &Coalgebra) -> (bool, Value) {
    let naive = refine_naive(coalg).partition;
    let mut results: Vec<(String, Partition)> = vec![("naive".into(), naive.clone())];
    for k in WeightKind::ALL {
        results.push((format!("hopcroft-{k}"), refine_hopcroft(coalg, k).partition));
    }
    if coalg.n_states() <= MAX_ORACLE_STATES {
        results.push(("oracle".into(), bisim_bruteforce(coalg).expect("within the oracle limit")));
    }
    let agree = results.iter().all(|(_, p)| partitions_equal(p, &naive).expect("same state count"));
    let blocks: serde_json::Map<String, Value> = results.iter().map(|(name, p)| (name.clone(), json!(p.n_blocks()))).collect();
    (agree, json!({ "states": coalg.n_states(), "agree": agree, "blocks": blocks }))
}

fn compare(args: CompareArgs) -> Outcome {
    let (agree, doc) = match &args.input {
        Some(path) => compare_one(&read_system(path, args.format)?),
        None => {
            if args.max_states == 0 {
                return Err(usage("--max-states must be positive"));
            }
            let mut mismatches = Vec::new();
            for i in 0..args.count {
                let seed = args.seed.wrapping_add(i);
                let n = 1 + (seed % args.max_states as u64) as usize;
                let coalg: Coalgebra = generate(&GenSpec::new(args.family.into(), n, seed)).map_err(usage)?;
                if !compare_one(&coalg).0 {
                    mismatches.push(seed);
                }
            }
            let family = Family::from(args.family);
            let ok = mismatches.is_empty();
            (ok, json!({ "family": family.as_str(), "instances": args.count, "agree": ok, "mismatched_seeds": mismatches }))
        }
    };
    emit(&format!("{doc}\n"), None)?;
    if agree {
        Ok(())
    } else {
        Err(Failure::Check("partitions disagree".into()))
    }
}

fn audit(args: AuditArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.tree).map_err(|e| usage(format!("{}: {e}", args.tree.display())))?;
    let file = io::tree_from_json(&text).map_err(|e| usage(format!("{}: {e}", args.tree.display())))?;
    let report = match (&file.heavy, args.recompute_heavy) {
        (Some(h), false) => audit_tree_with_choice(&file.tree, &file.weights, h),
        _ => audit_tree(&file.tree, &file.weights),
    }
    .map_err(usage)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json")), None)?;
    if report.all_ok() {
        Ok(())
    } else {
        Err(Failure::Check("audit failed".into()))
    }
}

fn gen(args: GenArgs) -> Outcome {
    let spec = GenSpec {
        family: args.family.into(),
        n_states: args.states,
        alphabet: args.alphabet,
        out_degree: args.out_degree,
        labels: args.labels,
        core_states: args.core,
        seed: args.seed,
    };
    let coalg: Coalgebra = generate(&spec).map_err(usage)?;
    let mut text = io::write_coalgebra_json(&coalg);
    text.push('\n');
    emit(&text, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Minimize(a) => minimize(a),
        Command::Compare(a) => compare(a),
        Command::AuditTree(a) => audit(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("partref: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("partref: {m}");
            ExitCode::from(2)
        }
    }
}
