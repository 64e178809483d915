mod common;

use common::fixtures::*;
use freevol::filling::whitehead_minimize;
use freevol::volume::{free_volume, translation_length};
use freevol::words::{CyclicWord, Letter, Word};
use proptest::prelude::*;

fn word(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..2 * k, 1..=max_len)
        .prop_map(|v| Word::reduce(v.into_iter().map(Letter::from_index)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_is_conjugation_invariant(g in word(3, 10), h in word(3, 6)) {
        for (_, s) in all_splittings() {
            if g.max_gen().max(h.max_gen()).unwrap_or(0) >= s.rank() {
                continue;
            }
            prop_assert_eq!(translation_length(&s, &g), translation_length(&s, &g.conjugate_by(&h)));
        }
    }

    #[test]
    fn length_scales_with_powers(g in word(3, 8), n in 1i64..5) {
        prop_assume!(!g.is_empty());
        for (_, s) in all_splittings() {
            if g.max_gen().unwrap_or(0) >= s.rank() {
                continue;
            }
            let l = translation_length(&s, &g);
            prop_assert_eq!(translation_length(&s, &g.pow(n)), n as usize * l);
            prop_assert_eq!(translation_length(&s, &g.pow(-n)), n as usize * l);
        }
    }

    #[test]
    fn cyclic_volume_is_conjugation_invariant(g in word(3, 8), h in word(3, 5)) {
        prop_assume!(!g.is_empty());
        let s = t_ac_b();
        let a = free_volume(&s, &[g.clone()]).unwrap();
        let b = free_volume(&s, &[g.conjugate_by(&h)]).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn whitehead_never_lengthens(g in word(2, 10), h in word(2, 10)) {
        prop_assume!(!g.is_empty() && !h.is_empty());
        let classes = vec![CyclicWord::new(&g), CyclicWord::new(&h)];
        let before: usize = classes.iter().map(|c| c.len()).sum();
        let m = whitehead_minimize(2, &classes);
        prop_assert!(m.total_length <= before);
        prop_assert_eq!(m.total_length, m.classes.iter().map(|c| c.len()).sum::<usize>());
    }
}
