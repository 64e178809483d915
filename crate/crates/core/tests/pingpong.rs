mod common;

use common::fixtures::*;
use freevol::pingpong::*;
use freevol::splittings::SplittingPair;
use freevol::volume::bilipschitz_sample;
use freevol::words::{Automorphism, Word};

fn config() -> PingPongConfig {
    PingPongConfig::new(&pair_filling(), DEFAULT_LAMBDA_Q).unwrap()
}

fn abelianization(phi: &Automorphism) -> Vec<Vec<i64>> {
    phi.images()
        .iter()
        .map(|img| {
            let mut row = vec![0; phi.rank()];
            for l in img.letters() {
                row[l.gen()] += if l.is_inverse() { -1 } else { 1 };
            }
            row
        })
        .collect()
}

#[test]
fn filling_fixture_constants() {
    let cfg = config();
    assert_eq!((cfg.b, cfg.m, cfg.c), (1, 98, 107));
    assert_eq!(cfg.ell, [4, 4]);
    assert_eq!(cfg.n, 77);
    assert!(cfg.n * 4 - cfg.c >= 2 * (cfg.m + 1));
    assert!((cfg.n - 1) * 4 - cfg.c < 2 * (cfg.m + 1));
}

#[test]
fn sixth_power_threshold_is_reported() {
    let cfg = PingPongConfig::new(&pair_sixth_power(), DEFAULT_LAMBDA_Q).unwrap();
    println!("B = {}, M = {}, C = {}, ell = {:?}, N = {}", cfg.b, cfg.m, cfg.c, cfg.ell, cfg.n);
    assert!(cfg.n > 0 && cfg.ell.iter().all(|&l| l > 0));
    let c = cfg.c.saturating_add(2 * (cfg.m + 1));
    assert!(cfg.n * cfg.ell[0] as u128 >= c && cfg.n * cfg.ell[1] as u128 >= c);
}

#[test]
fn edge_elements_classify_to_their_sides() {
    let cfg = config();
    let c1 = cfg.pair.t1.ambient_edge_word();
    let c2 = cfg.pair.t2.ambient_edge_word();
    assert_eq!(classify(&cfg, &[c1]).unwrap().side, Side::X1);
    assert_eq!(classify(&cfg, &[c2]).unwrap().side, Side::X2);
    let ex = PingPongConfig::new(&pair_sixth_power(), DEFAULT_LAMBDA_Q).unwrap();
    let x = classify(&ex, &[w("c")]).unwrap();
    assert_eq!((x.vol_t1, x.vol_t2, x.side), (0, 2, Side::X1));
    // The edge element of the second tree has length 4 in the first.
    let y = classify(&ex, &[w("cababbc")]).unwrap();
    assert_eq!((y.vol_t1, y.vol_t2, y.side), (4, 0, Side::X2));
    assert!(matches!(classify(&cfg, &ws(&["a", "b", "c"])), Err(PingPongError::NotProperSubgroup { .. })));
}

#[test]
fn realize_examples() {
    let cfg = PingPongConfig::new(&pair_sixth_power(), DEFAULT_LAMBDA_Q).unwrap();
    assert_eq!(realize(&cfg, &TwistWord::default()), Automorphism::identity(3));
    let d = realize(&cfg, &TwistWord::parse("1:1", 0).unwrap());
    assert_eq!(d, Automorphism::parse(&["a", "cbC", "c"]).unwrap());
    let comm = realize(&cfg, &TwistWord::parse("1:1 2:1 1:-1 2:-1", 0).unwrap());
    assert_ne!(comm, Automorphism::identity(3));
    assert_eq!(abelianization(&comm), abelianization(&Automorphism::identity(3)));
}

#[test]
fn realize_is_a_homomorphism() {
    let cfg = config();
    let words = ["1:2 2:-1", "2:3", "1:-1 2:1 1:2", "2:-2 1:1"];
    for a in words {
        for b in words {
            let (u, v) = (TwistWord::parse(a, 0).unwrap(), TwistWord::parse(b, 0).unwrap());
            assert_eq!(realize(&cfg, &u.concat(&v)), realize(&cfg, &u).compose(&realize(&cfg, &v)), "{a} . {b}");
        }
    }
}

#[test]
fn certificate_verdicts() {
    let cfg = config();
    let n = cfg.n_i64().unwrap();
    let verdict = |s: &str| certify(&cfg, &TwistWord::parse(s, n).unwrap()).verdict;
    assert_eq!(verdict("1:+N"), IwipVerdict::ConjugateToTwistPower);
    assert_eq!(verdict("1:+N 2:+N"), IwipVerdict::FullyIrreducibleHyperbolic);
    assert_eq!(verdict("1:+N 2:N-1"), IwipVerdict::HypothesesNotMet);
    assert_eq!(verdict("1:+1 2:+N"), IwipVerdict::HypothesesNotMet);
    assert_eq!(verdict("2:-N 1:N"), IwipVerdict::FullyIrreducibleHyperbolic);
    assert_eq!(verdict("1:N 2:-N 1:N"), IwipVerdict::HypothesesNotMet);
    assert_eq!(verdict("1:N 2:1 1:-N"), IwipVerdict::ConjugateToTwistPower);
    assert_eq!(verdict(""), IwipVerdict::Trivial);
    let cert = certify(&cfg, &TwistWord::parse("1:+N 2:N-1", n).unwrap());
    let failed: Vec<_> = cert.trail.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    assert_eq!(failed, ["endpoint_rule"]);
    assert_eq!(cert.verdict.exit_code(), 3);
}

#[test]
fn periodic_orbit_examples() {
    let id = Automorphism::identity(3);
    let r = empirical_no_periodic_orbit(&id, 3, 2, 1);
    assert!(!r.passed());
    assert_eq!(r.violations[0].power, 1);
    let cfg = config();
    let d1 = cfg.twist(1, 1);
    let r = empirical_no_periodic_orbit(&d1, 4, 4, 1);
    assert!(r.violation_count > 0);
    let c1 = freevol::words::CyclicWord::new(&w("abAB"));
    assert_eq!(d1.apply_cyclic(&c1), c1);
    let phi = Automorphism::parse(&["b", "c", "ab"]).unwrap();
    let r = empirical_no_periodic_orbit(&phi, 4, 2, 1);
    println!("rotation: {} violations", r.violation_count);
}

#[test]
fn certified_word_has_no_short_periodic_class() {
    let cfg = config();
    let w = TwistWord::parse("1:+N 2:+N", cfg.n_i64().unwrap()).unwrap();
    let r = no_periodic_orbit_factored(&factors(&cfg, &w), 5, 2, 4);
    assert!(r.passed(), "{:?}", r.violations);
}

#[test]
fn twists_swap_sides() {
    let cfg = config();
    for id in [1, 2] {
        let s = sample_ping_pong(&cfg, id, 5, 6, 21).unwrap();
        assert_eq!(s.cases.len(), 10);
        assert_eq!(s.violations, 0);
    }
}

#[test]
fn bilipschitz_examples() {
    let same = SplittingPair::new(t_ac_b(), t_ac_b()).unwrap();
    let s = bilipschitz_sample(&same, 200, 3, 1);
    assert!(s.zero_sums > 0);
    assert_eq!(s.used + s.zero_sums, 200);
    let s = bilipschitz_sample(&pair_sixth_power(), 100, 12, 2);
    assert_eq!(s.zero_sums, 0);
    assert!(s.min_ratio.unwrap() > 0.0 && s.max_ratio.unwrap().is_finite());
    let _ = Word::identity();
}
