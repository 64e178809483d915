use freevol::splittings::{CyclicSplitting, SplittingPair};
use freevol::words::{Automorphism, Word};

pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

pub fn ws(v: &[&str]) -> Vec<Word> {
    v.iter().map(|s| w(s)).collect()
}

/// a -> b -> c -> ab
pub fn rotation() -> Automorphism {
    Automorphism::parse(&["b", "c", "ab"]).unwrap()
}

/// <a, c> *_<c> <b, c>
pub fn t_ac_b() -> CyclicSplitting {
    CyclicSplitting::amalgam(&["a", "b", "c"], &[0, 2], &[1], "c").unwrap()
}

/// <a, b> *_<ab> <ab, c>
pub fn t_ab_c() -> CyclicSplitting {
    CyclicSplitting::amalgam(&["a", "b", "c"], &[0, 1], &[2], "ab").unwrap()
}

/// F_2 as an HNN extension of <a> with stable letter b.
pub fn t_hnn_f2() -> CyclicSplitting {
    CyclicSplitting::hnn(&["a", "b"], &[0], 1, "a").unwrap()
}

/// F_3 as an HNN extension of <a, b> over the commutator, stable letter c.
pub fn t_hnn_commutator() -> CyclicSplitting {
    CyclicSplitting::hnn(&["a", "b", "c"], &[0, 1], 2, "abAB").unwrap()
}

/// Edge word with a nontrivial border, so lifts can overlap.
pub fn t_bordered() -> CyclicSplitting {
    CyclicSplitting::amalgam(&["a", "b", "c"], &[0, 1], &[2], "aba").unwrap()
}

/// `T` and `T phi^-6`.
pub fn pair_sixth_power() -> SplittingPair {
    let t1 = t_ac_b();
    let t2 = t1.transform(&rotation().pow(-6).unwrap()).unwrap();
    SplittingPair::new(t1, t2).unwrap()
}

/// `T` and `T phi`.
pub fn pair_rotation() -> SplittingPair {
    let t1 = t_ac_b();
    let t2 = t1.transform(&rotation()).unwrap();
    SplittingPair::new(t1, t2).unwrap()
}

pub fn all_splittings() -> Vec<(&'static str, CyclicSplitting)> {
    vec![
        ("ac_b", t_ac_b()),
        ("ab_c", t_ab_c()),
        ("hnn_f2", t_hnn_f2()),
        ("hnn_commutator", t_hnn_commutator()),
        ("bordered", t_bordered()),
        ("sixth_power", pair_sixth_power().t2),
        ("rotation", pair_rotation().t2),
    ]
}

/// F_3 as an HNN extension of <a, b> over aab, stable letter c.
pub fn t_hnn_aab() -> CyclicSplitting {
    CyclicSplitting::hnn(&["a", "b", "c"], &[0, 1], 2, "aab").unwrap()
}

/// A filling pair with bounded cancellation 1 in both directions.
pub fn pair_filling() -> SplittingPair {
    let t2 = t_hnn_aab().transform(&Automorphism::parse(&["ac", "cbc", "c"]).unwrap()).unwrap();
    SplittingPair::new(t_hnn_commutator(), t2).unwrap()
}
