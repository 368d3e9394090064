use proptest::prelude::*;

use partref::engine::{refine_naive, Partition};
use partref::gen::{generate, Family, GenSpec};
use partref::sysmodel::{build_pred_index, reachable_targets, signature_of, FunctorExpr};
use partref::Coalgebra;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::RANDOM.to_vec())
}

fn system(family: Family, n: usize, seed: u64) -> Coalgebra {
    generate(&GenSpec::new(family, n, seed)).unwrap()
}

proptest! {
    #[test]
    fn predecessors_match_signature_oracle(f in family(), n in 1usize..25, seed in any::<u64>()) {
        let c = system(f, n, seed);
        let idx = build_pred_index(&c);
        // y occurs in c(x) iff giving y alone a fresh label changes the signature.
        let base: Vec<usize> = (0..n).collect();
        let mut m = 0;
        for y in 0..n {
            let mut fresh = base.clone();
            fresh[y] = n;
            let expect: Vec<usize> = (0..n)
                .filter(|&x| signature_of(c.value(x), &base[..]) != signature_of(c.value(x), &fresh[..]))
                .collect();
            prop_assert_eq!(idx.preds(y), &expect[..]);
            m += expect.len();
        }
        prop_assert_eq!(idx.total_size(), m);
        let union: Vec<usize> = (0..n).filter(|&y| !idx.preds(y).is_empty()).collect();
        prop_assert_eq!(reachable_targets(&c), union);
    }

    #[test]
    fn relabelling_keeps_verdicts(f in family(), n in 1usize..20, seed in any::<u64>(), blocks in 1usize..5) {
        let c = system(f, n, seed);
        let a: Vec<usize> = (0..n).map(|s| (s * 7 + seed as usize) % blocks).collect();
        let b: Vec<usize> = a.iter().map(|&l| 1000 - 3 * l).collect();
        for x in 0..n {
            for y in 0..n {
                let va = signature_of(c.value(x), &a[..]) == signature_of(c.value(y), &a[..]);
                let vb = signature_of(c.value(x), &b[..]) == signature_of(c.value(y), &b[..]);
                prop_assert_eq!(va, vb);
            }
        }
    }

    #[test]
    fn signature_classes_never_merge(f in family(), n in 1usize..20, seed in any::<u64>()) {
        let c = system(f, n, seed);
        let coarse: Vec<usize> = (0..n).map(|s| s % 2).collect();
        let fine: Vec<usize> = (0..n).map(|s| s % 4).collect();
        for x in 0..n {
            for y in 0..n {
                let eq_fine = signature_of(c.value(x), &fine[..]) == signature_of(c.value(y), &fine[..]);
                let eq_coarse = signature_of(c.value(x), &coarse[..]) == signature_of(c.value(y), &coarse[..]);
                prop_assert!(!eq_fine || eq_coarse);
            }
        }
    }

    #[test]
    fn pure_distributions_collapse(n in 1usize..30, seed in any::<u64>()) {
        let c: Coalgebra = generate(&GenSpec { labels: 0, ..GenSpec::new(Family::Mc, n, seed) }).unwrap();
        prop_assert_eq!(c.functor(), &FunctorExpr::markov_chain());
        let one = vec![0usize; n];
        let sig = signature_of(c.value(0), &one[..]);
        prop_assert!((0..n).all(|s| signature_of(c.value(s), &one[..]) == sig));
        prop_assert_eq!(refine_naive(&c).partition, Partition::trivial(n));
    }

    #[test]
    fn constant_signature_iff_no_successors(f in family(), n in 2usize..15, seed in any::<u64>()) {
        let c = system(f, n, seed);
        let ident: Vec<usize> = (0..n).collect();
        let one = vec![n; n];
        for x in 0..n {
            let constant = signature_of(c.value(x), &ident[..]) == signature_of(c.value(x), &one[..]);
            prop_assert_eq!(constant, c.value(x).occurring_states().is_empty());
        }
    }

    #[test]
    fn functor_display_round_trips(f in family(), alphabet in 1usize..4, labels in 0usize..3) {
        let spec = GenSpec { alphabet, labels, ..GenSpec::new(f, 1, 0) };
        let functor = spec.functor();
        prop_assert_eq!(FunctorExpr::parse(&functor.to_string()).unwrap(), functor);
    }
}
