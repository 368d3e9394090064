use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use partref::engine::{refine_hopcroft, refine_naive, RunStats, WeightKind};
use partref::gen::{generate, Family, GenSpec};
use partref::Coalgebra;

use crate::{emit, usage, Algo, FamilyArg, Outcome, Weight};

#[derive(Args)]
pub(crate) struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dfa")]
    families: Vec<FamilyArg>,
    #[arg(long, value_delimiter = ',', default_value = "64,256,1024")]
    sizes: Vec<usize>,
    /// Seeds 0..seeds per (family, size).
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "naive,hopcroft")]
    algos: Vec<Algo>,
    /// Weights for hopcroft runs.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "card,pred,reach")]
    weights: Vec<Weight>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    family: &'static str,
    n: usize,
    seed: u64,
    algo: &'static str,
    weight: &'static str,
    iterations: u64,
    splits: u64,
    dirty_markings: u64,
    markdirty_touches: u64,
    signatures_computed: u64,
    wall_ms: f64,
}

fn row(spec: &GenSpec, algo: &'static str, weight: &'static str, s: &RunStats) -> Row {
    Row {
        family: spec.family.as_str(),
        n: spec.n_states,
        seed: spec.seed,
        algo,
        weight,
        iterations: s.iterations,
        splits: s.splits,
        dirty_markings: s.dirty_markings,
        markdirty_touches: s.markdirty_touches,
        signatures_computed: s.signatures_computed,
        wall_ms: s.wall_time.as_secs_f64() * 1e3,
    }
}

pub(crate) fn run(args: BenchArgs) -> Outcome {
    let mut specs = Vec::new();
    for &f in &args.families {
        for &n in &args.sizes {
            for seed in 0..args.seeds {
                specs.push(GenSpec::new(Family::from(f), n, seed));
            }
        }
    }
    let cells: Vec<Vec<Row>> = specs
        .par_iter()
        .map(|spec| {
            let coalg: Coalgebra = generate(spec).map_err(usage)?;
            let mut rows = Vec::new();
            for &algo in &args.algos {
                match algo {
                    Algo::Naive => rows.push(row(spec, "naive", "", &refine_naive(&coalg).stats)),
                    Algo::Hopcroft => {
                        for &w in &args.weights {
                            let kind = WeightKind::from(w);
                            rows.push(row(spec, "hopcroft", kind.as_str(), &refine_hopcroft(&coalg, kind).stats));
                        }
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let mut out = csv::Writer::from_writer(Vec::new());
    for r in cells.iter().flatten() {
        out.serialize(r).map_err(usage)?;
    }
    let bytes = out.into_inner().map_err(usage)?;
    emit(&String::from_utf8(bytes).expect("csv is utf-8"), args.out.as_deref())
}
