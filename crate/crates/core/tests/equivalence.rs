use partref::engine::{quotient, refine_hopcroft, refine_naive, Partition, WeightKind};
use partref::gen::{generate, Family, GenSpec};
use partref::oracle::{bisim_bruteforce, partitions_equal};
use partref::Coalgebra;

fn instance(family: Family, seed: u64) -> Coalgebra {
    let n = 1 + (seed as usize * 7) % 30;
    generate(&GenSpec::new(family, n, seed)).unwrap()
}

#[test]
fn all_algorithms_agree() {
    for family in Family::RANDOM {
        let mut nontrivial = 0;
        for seed in 0..150 {
            let c = instance(family, seed);
            let oracle = bisim_bruteforce(&c).unwrap();
            let naive = refine_naive(&c).partition;
            assert!(partitions_equal(&naive, &oracle).unwrap(), "{family} seed {seed}: naive");
            for k in WeightKind::ALL {
                let run = refine_hopcroft(&c, k);
                assert!(partitions_equal(&run.partition, &oracle).unwrap(), "{family} seed {seed}: {k}");
                run.tree.check_structure().unwrap();
            }
            if oracle.n_blocks() > 1 && oracle.n_blocks() < c.n_states() {
                nontrivial += 1;
            }
        }
        assert!(nontrivial > 30, "{family}: only {nontrivial} instances with proper classes");
    }
}

#[test]
fn quotients_are_minimal() {
    for family in Family::RANDOM {
        for seed in 0..40 {
            let c = instance(family, seed);
            let p = refine_naive(&c).partition;
            let q = quotient(&c, &p).unwrap();
            assert_eq!(refine_hopcroft(&q, WeightKind::Card).partition, Partition::discrete(q.n_states()));
        }
    }
}

#[test]
fn chain_needs_one_split_per_state() {
    for n in [1usize, 2, 5, 17] {
        let c: Coalgebra = generate(&GenSpec::new(Family::Chain, n, 0)).unwrap();
        let run = refine_hopcroft(&c, WeightKind::Card);
        assert_eq!(run.partition, Partition::discrete(n));
        assert_eq!(run.stats.splits as usize, n - 1);
        assert_eq!(bisim_bruteforce(&c).unwrap(), Partition::discrete(n));
    }
}
