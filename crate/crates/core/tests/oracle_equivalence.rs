mod common;

use common::fixtures::*;
use common::oracle;
use freevol::volume::translation_length;
use freevol::words::enumerate_cyclic_words;

#[test]
fn chain_formula_matches_tree_for_short_classes() {
    for (name, s) in all_splittings() {
        let max = if s.rank() == 2 { 7 } else { 5 };
        let mut mismatches = Vec::new();
        for c in enumerate_cyclic_words(s.rank(), max) {
            let g = c.word();
            let a = translation_length(&s, g);
            let b = oracle::translation_length(&s, g);
            if a != b {
                mismatches.push(format!("{g}: chains {a}, tree {b}"));
            }
        }
        assert!(mismatches.is_empty(), "{name}: {} mismatches, first {:?}", mismatches.len(), &mismatches[..mismatches.len().min(10)]);
    }
}

#[test]
fn syllables_agree_with_tree() {
    for (name, s) in all_splittings() {
        for c in enumerate_cyclic_words(s.rank(), 5) {
            if let Some(l) = oracle::syllable_length(&s, c.word()) {
                assert_eq!(l, oracle::translation_length(&s, c.word()), "{name} {}", c.word());
            }
        }
    }
}

#[test]
fn quotient_oracle_on_cyclic_classes() {
    for (name, s) in all_splittings() {
        for c in enumerate_cyclic_words(s.rank(), 5) {
            let q = oracle::quotient(&s, std::slice::from_ref(c.word()));
            assert_eq!(q.free_edges, oracle::translation_length(&s, c.word()), "{name} {}", c.word());
        }
    }
}

#[test]
fn two_generator_subgroups_match_quotient() {
    use freevol::volume::free_volume;
    use freevol::words::Word;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (name, s) in all_splittings() {
        let k = s.rank();
        let mut bad = Vec::new();
        for _ in 0..400 {
            let gens: Vec<Word> = (0..2)
                .map(|_| {
                    let len = rng.gen_range(1..=6);
                    Word::reduce((0..len).map(|_| freevol::words::Letter::from_index(rng.gen_range(0..2 * k))))
                })
                .collect();
            if gens.iter().any(|g| g.is_empty()) {
                continue;
            }
            let q = oracle::quotient(&s, &gens);
            let v = free_volume(&s, &gens).unwrap();
            if q.free_edges != v {
                bad.push(format!("{} {}: chains {v}, quotient {q:?}", gens[0], gens[1]));
            }
        }
        assert!(bad.is_empty(), "{name}: {} mismatches {:?}", bad.len(), &bad[..bad.len().min(8)]);
    }
}

#[test]
fn local_rules_agree_on_cyclic_classes() {
    use freevol::volume::volume_report;
    for (name, s) in all_splittings() {
        let max = if s.rank() == 2 { 6 } else { 4 };
        for c in enumerate_cyclic_words(s.rank(), max) {
            let r = volume_report(&s, std::slice::from_ref(c.word())).unwrap();
            assert_eq!(r.local_rule_volume, r.free_volume, "{name} {}", c.word());
            assert!(r.reclassification_rounds <= r.graph.edges().len() + 1);
        }
    }
}

#[test]
fn local_rules_miss_loops_inside_chain_images() {
    use freevol::volume::volume_report;
    let s = t_ab_c();
    let r = volume_report(&s, &ws(&["bc", "a"])).unwrap();
    assert_eq!(r.free_volume, 1);
    assert_eq!(r.local_rule_volume, 0);
    assert_eq!(oracle::quotient(&s, &ws(&["bc", "a"])).free_edges, 1);
}

#[test]
fn quotient_edges_match_oracle() {
    use freevol::volume::volume_report;
    use freevol::words::{Letter, Word};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut disagreements = 0;
    let mut total = 0;
    for (name, s) in all_splittings() {
        let k = s.rank();
        for _ in 0..200 {
            let count = rng.gen_range(1..=3);
            let gens: Vec<Word> = (0..count)
                .map(|_| {
                    let len = rng.gen_range(1..=7);
                    Word::reduce((0..len).map(|_| Letter::from_index(rng.gen_range(0..2 * k))))
                })
                .filter(|g| !g.is_empty())
                .collect();
            if gens.is_empty() {
                continue;
            }
            let q = oracle::quotient(&s, &gens);
            let r = volume_report(&s, &gens).unwrap();
            assert_eq!((r.quotient_edges, r.free_volume), (q.edges, q.free_edges), "{name} {gens:?}");
            total += 1;
            disagreements += (r.local_rule_volume != r.free_volume) as usize;
        }
    }
    eprintln!("local rule disagreements: {disagreements}/{total}");
}
