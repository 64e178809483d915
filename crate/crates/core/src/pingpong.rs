//! Ping-pong between two filling splittings: the threshold exponent, the
//! two volume-ratio classes, twist words and their certificates.

use std::fmt;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::splittings::{SplittingPair, SCHEMA};
use crate::stallings::core_of;
use crate::twisting::{constants, random_word, TwistConstants, TwistError};
use crate::volume::{free_volume, VolumeError};
use crate::words::{enumerate_cyclic_words, Automorphism, CyclicWord, Letter, Word};

/// Default denominator of `λ = (q + 1) / q`.
pub const DEFAULT_LAMBDA_Q: u64 = 1_000_003;

#[derive(Debug, Error)]
pub enum PingPongError {
    #[error("edge element of T{0} is elliptic in the other tree; the pair does not fill")]
    NotFillingEvidence(usize),
    #[error("subgroup of rank {rank} is neither cyclic nor of rank below {k}")]
    NotProperSubgroup { rank: usize, k: usize },
    #[error("bad twist word: {0}")]
    Parse(String),
    #[error("threshold {0} does not fit a machine exponent")]
    ThresholdTooLarge(u128),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Twist(#[from] TwistError),
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongConfig {
    #[serde(skip)]
    pub pair: SplittingPair,
    pub lambda: [u64; 2],
    /// Twisting along `T₁` measured in `T₂`, and the reverse.
    pub constants: [TwistConstants; 2],
    pub b: usize,
    pub m: u128,
    pub c: u128,
    /// `ℓ_{T₂}(c₁)` and `ℓ_{T₁}(c₂)`.
    pub ell: [usize; 2],
    pub n: u128,
}

/// Least `N` with `N ℓᵢ − C ≥ 2(M + 1)` for both translation lengths.
pub fn compute_n(ell: [usize; 2], c: u128, m: u128) -> Result<u128, PingPongError> {
    let need = c.saturating_add(m.saturating_add(1).saturating_mul(2));
    let mut n = 0;
    for (i, &l) in ell.iter().enumerate() {
        if l == 0 {
            return Err(PingPongError::NotFillingEvidence(i + 1));
        }
        let l = l as u128;
        n = n.max(need / l + u128::from(need % l != 0));
    }
    Ok(n)
}

impl PingPongConfig {
    /// Constants for subgroups of rank below the ambient rank.
    pub fn new(pair: &SplittingPair, lambda_q: u64) -> Result<Self, PingPongError> {
        let r = pair.rank().saturating_sub(1).max(1);
        let forward = constants(r, pair)?;
        let backward = constants(r, &pair.swapped())?;
        let b = forward.b.max(backward.b);
        let m = forward.m.max(backward.m);
        let c = forward.c.max(backward.c);
        let ell = [forward.ell, backward.ell];
        let n = compute_n(ell, c, m)?;
        Ok(PingPongConfig { pair: pair.clone(), lambda: [lambda_q + 1, lambda_q], constants: [forward, backward], b, m, c, ell, n })
    }

    pub fn lambda(&self) -> Ratio<u64> {
        Ratio::new(self.lambda[0], self.lambda[1])
    }

    /// `δᵢ^e` as an automorphism of the ambient basis.
    pub fn twist(&self, id: u8, e: i64) -> Automorphism {
        self.pair.get(id as usize).dehn_twist_power(e)
    }

    pub fn n_i64(&self) -> Result<i64, PingPongError> {
        i64::try_from(self.n).map_err(|_| PingPongError::ThresholdTooLarge(self.n))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    X1,
    X2,
    Tie,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub side: Side,
    pub vol_t1: usize,
    pub vol_t2: usize,
}

impl Classification {
    /// `|X| = vol_{T₁}(X) + vol_{T₂}(X)`.
    pub fn size(&self) -> usize {
        self.vol_t1 + self.vol_t2
    }
}

/// Side of `X` given by volume ratio against `λ`. Equality is reported as a
/// tie instead of being broken.
pub fn classify_volumes(lambda: Ratio<u64>, vol_t1: usize, vol_t2: usize) -> Side {
    let (p, q) = (*lambda.numer() as u128, *lambda.denom() as u128);
    let (v1, v2) = (vol_t1 as u128, vol_t2 as u128);
    if v1 * q < p * v2 {
        Side::X1
    } else if v2 * p < q * v1 {
        Side::X2
    } else {
        Side::Tie
    }
}

pub fn classify(config: &PingPongConfig, gens: &[Word]) -> Result<Classification, PingPongError> {
    let k = config.pair.rank();
    let rank = core_of(k, gens).fundamental_rank();
    if rank > 1 && rank >= k {
        return Err(PingPongError::NotProperSubgroup { rank, k });
    }
    let vol_t1 = free_volume(&config.pair.t1, gens)?;
    let vol_t2 = free_volume(&config.pair.t2, gens)?;
    Ok(Classification { side: classify_volumes(config.lambda(), vol_t1, vol_t2), vol_t1, vol_t2 })
}

/// Alternating product `δ_{i₁}^{e₁} δ_{i₂}^{e₂} ⋯`, read left to right as a
/// composition of maps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TwistWord(pub Vec<(u8, i64)>);

impl TwistWord {
    pub fn new(syllables: Vec<(u8, i64)>) -> Result<Self, PingPongError> {
        for (i, &(id, e)) in syllables.iter().enumerate() {
            if id != 1 && id != 2 {
                return Err(PingPongError::Parse(format!("twist id {id} is not 1 or 2")));
            }
            if e == 0 {
                return Err(PingPongError::Parse(format!("syllable {} has exponent 0", i + 1)));
            }
            if i > 0 && syllables[i - 1].0 == id {
                return Err(PingPongError::Parse(format!("syllables {} and {} use the same twist", i, i + 1)));
            }
        }
        Ok(TwistWord(syllables))
    }

    /// Parses `"1:+N 2:-N+3 1:5"`; `N` stands for the threshold `n`.
    pub fn parse(s: &str, n: i64) -> Result<Self, PingPongError> {
        let bad = |t: &str| PingPongError::Parse(format!("cannot read syllable `{t}`"));
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (id, exp) = tok.split_once(':').ok_or_else(|| bad(tok))?;
            let id: u8 = id.parse().map_err(|_| bad(tok))?;
            out.push((id, parse_exponent(exp, n).ok_or_else(|| bad(tok))?));
        }
        TwistWord::new(out)
    }

    pub fn syllables(&self) -> &[(u8, i64)] {
        &self.0
    }

    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        let mut out = self.0.clone();
        for &(id, e) in &other.0 {
            match out.last_mut() {
                Some(last) if last.0 == id => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((id, e)),
            }
        }
        TwistWord(out)
    }

    /// Merges the last syllable into the first while they use the same twist.
    pub fn cyclically_reduced(&self) -> TwistWord {
        let mut s = self.0.clone();
        while s.len() > 1 && s[0].0 == s[s.len() - 1].0 {
            let (_, e) = s.pop().expect("nonempty");
            s[0].1 += e;
            if s[0].1 == 0 {
                s.remove(0);
            }
        }
        TwistWord(s)
    }
}

fn parse_exponent(s: &str, n: i64) -> Option<i64> {
    let (sign, rest) = match s.as_bytes().first()? {
        b'+' => (1i64, &s[1..]),
        b'-' => (-1, &s[1..]),
        _ => (1, s),
    };
    let split = rest.find(['+', '-']).unwrap_or(rest.len());
    let (base, offset) = rest.split_at(split);
    let base = match base.strip_suffix('N') {
        Some("") => n,
        Some(k) => k.parse::<i64>().ok()?.checked_mul(n)?,
        None => base.parse().ok()?,
    };
    let offset: i64 = if offset.is_empty() { 0 } else { offset.parse().ok()? };
    sign.checked_mul(base)?.checked_add(offset)
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(id, e)| format!("{id}:{e:+}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Twist powers whose composition, leftmost first as maps, is the word.
pub fn factors(config: &PingPongConfig, w: &TwistWord) -> Vec<Automorphism> {
    w.0.iter().map(|&(id, e)| config.twist(id, e)).collect()
}

/// Applies `f₁ ∘ ⋯ ∘ f_m` to `g`, giving up past `budget` letters.
fn apply_factors(factors: &[Automorphism], g: &Word, budget: usize) -> Option<Word> {
    let mut cur = g.clone();
    for f in factors.iter().rev() {
        let bound: usize = cur.letters().iter().map(|l| f.image(l.gen()).len()).sum();
        if bound > budget {
            return None;
        }
        cur = f.apply(&cur);
    }
    Some(cur)
}

pub fn realize(config: &PingPongConfig, w: &TwistWord) -> Automorphism {
    factors(config, w).iter().fold(Automorphism::identity(config.pair.rank()), |acc, f| acc.compose(f))
}

/// Realizes the word unless some image would exceed `budget` letters.
pub fn realize_bounded(config: &PingPongConfig, w: &TwistWord, budget: usize) -> Option<Automorphism> {
    let fs = factors(config, w);
    let images = (0..config.pair.rank())
        .map(|i| apply_factors(&fs, &Word::letter(Letter::new(i, false)), budget))
        .collect::<Option<Vec<_>>>()?;
    Some(Automorphism::from_images_unchecked(images))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IwipVerdict {
    FullyIrreducibleHyperbolic,
    ConjugateToTwistPower,
    HypothesesNotMet,
    Trivial,
}

impl IwipVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            IwipVerdict::FullyIrreducibleHyperbolic => 0,
            IwipVerdict::ConjugateToTwistPower | IwipVerdict::Trivial => 1,
            IwipVerdict::HypothesesNotMet => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IwipCertificate {
    pub schema: &'static str,
    pub word: String,
    pub syllables: Vec<(u8, i64)>,
    pub n: u128,
    pub b: usize,
    pub m: u128,
    pub c: u128,
    pub ell: [usize; 2],
    pub nontrivial: bool,
    pub conjugate_to_twist_power: bool,
    pub fully_irreducible_hyperbolic: bool,
    pub verdict: IwipVerdict,
    pub trail: Vec<Check>,
    /// Images of the ambient basis, when small enough to write out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<Vec<Word>>,
}

/// Letter budget for writing the realized automorphism into a certificate.
pub const REALIZE_BUDGET: usize = 1 << 20;

/// Checks the exponent hypotheses on `w`. The word is padded to start with
/// `δ₁` and end with `δ₂`; padded endpoint exponents must both vanish or both
/// reach `N`, and all other exponents must reach `N`.
pub fn certify(config: &PingPongConfig, w: &TwistWord) -> IwipCertificate {
    let n = config.n;
    let reduced = w.cyclically_reduced();
    let mut trail = Vec::new();
    let nontrivial = !reduced.0.is_empty();
    trail.push(Check { name: "nontrivial", passed: nontrivial, detail: format!("cyclic reduction `{reduced}`") });
    let single = reduced.0.len() == 1;
    trail.push(Check {
        name: "not_single_twist_power",
        passed: nontrivial && !single,
        detail: format!("{} syllable(s) after cyclic reduction", reduced.0.len()),
    });
    let verdict = if !nontrivial {
        IwipVerdict::Trivial
    } else if single {
        IwipVerdict::ConjugateToTwistPower
    } else {
        let mut padded = w.0.clone();
        if padded.first().is_some_and(|s| s.0 == 2) {
            padded.insert(0, (1, 0));
        }
        if padded.last().is_some_and(|s| s.0 == 1) {
            padded.push((2, 0));
        }
        let big = |e: i64| e.unsigned_abs() as u128 >= n;
        let last = padded.len() - 1;
        let interior: Vec<usize> = (1..last).filter(|&i| !big(padded[i].1)).collect();
        trail.push(Check {
            name: "interior_exponents_at_least_n",
            passed: interior.is_empty(),
            detail: if interior.is_empty() {
                format!("all interior |e| >= {n}")
            } else {
                format!("syllables {:?} below {n}", interior.iter().map(|&i| padded[i]).collect::<Vec<_>>())
            },
        });
        let (e1, en) = (padded[0].1, padded[last].1);
        let endpoints_ok = (e1 == 0 && en == 0) || (big(e1) && big(en));
        trail.push(Check {
            name: "endpoint_rule",
            passed: endpoints_ok,
            detail: format!("first δ1 exponent {e1}, last δ2 exponent {en}"),
        });
        if interior.is_empty() && endpoints_ok {
            IwipVerdict::FullyIrreducibleHyperbolic
        } else {
            IwipVerdict::HypothesesNotMet
        }
    };
    let automorphism = realize_bounded(config, w, REALIZE_BUDGET).map(|a| a.images().to_vec());
    IwipCertificate {
        schema: SCHEMA,
        word: w.to_string(),
        syllables: w.0.clone(),
        n,
        b: config.b,
        m: config.m,
        c: config.c,
        ell: config.ell,
        nontrivial,
        conjugate_to_twist_power: verdict == IwipVerdict::ConjugateToTwistPower,
        fully_irreducible_hyperbolic: verdict == IwipVerdict::FullyIrreducibleHyperbolic,
        verdict,
        trail,
        automorphism,
    }
}

type Perm = Vec<u32>;

fn perm_inverse(p: &[u32]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j as usize] = i as u32;
    }
    inv
}

/// A homomorphism to a symmetric group, given on generators and inverses.
#[derive(Clone)]
struct PermRep {
    letters: Vec<Perm>,
}

impl PermRep {
    fn new(gens: Vec<Perm>) -> Self {
        let letters = gens.into_iter().flat_map(|p| [perm_inverse(&p), p]).collect::<Vec<_>>();
        // Letter index is `2 * gen + inverse`; reorder to match.
        let letters = letters.chunks(2).flat_map(|c| [c[1].clone(), c[0].clone()]).collect();
        PermRep { letters }
    }

    fn degree(&self) -> usize {
        self.letters[0].len()
    }

    fn eval(&self, w: &Word) -> Perm {
        (0..self.degree() as u32)
            .map(|mut x| {
                for l in w.letters() {
                    x = self.letters[l.index()][x as usize];
                }
                x
            })
            .collect()
    }

    /// `self ∘ f`.
    fn precompose(&self, f: &Automorphism) -> PermRep {
        PermRep::new((0..f.rank()).map(|i| self.eval(f.image(i))).collect())
    }
}

fn cycle_type(p: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicViolation {
    pub class: CyclicWord,
    pub power: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicReport {
    pub max_len: usize,
    pub max_power: usize,
    pub classes: usize,
    pub separated_by_permutation: usize,
    pub separated_exactly: usize,
    pub violations: Vec<PeriodicViolation>,
    pub violation_count: usize,
    /// Pairs neither separated by a permutation nor small enough to compare.
    pub unresolved: Vec<PeriodicViolation>,
}

impl PeriodicReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.unresolved.is_empty()
    }
}

const REPORT_LIMIT: usize = 20;
const EXACT_BUDGET: usize = 1 << 21;

/// Looks for `[φᵖ(g)] = [g]` over cyclic words `|g| ≤ max_len`.
pub fn empirical_no_periodic_orbit(phi: &Automorphism, max_len: usize, max_power: usize, seed: u64) -> PeriodicReport {
    no_periodic_orbit_factored(std::slice::from_ref(phi), max_len, max_power, seed)
}

/// As [`empirical_no_periodic_orbit`] for `φ = f₁ ∘ ⋯ ∘ f_m`.
///
/// Conjugate elements have equal cycle type under every permutation
/// representation, so a differing cycle type separates the classes. Pairs
/// that no sampled representation separates are compared exactly.
pub fn no_periodic_orbit_factored(factors: &[Automorphism], max_len: usize, max_power: usize, seed: u64) -> PeriodicReport {
    let k = factors.first().map_or(0, Automorphism::rank);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reps: Vec<PermRep> = (0..16)
        .map(|i| {
            let deg = 5 + i;
            PermRep::new(
                (0..k)
                    .map(|_| {
                        let mut p: Perm = (0..deg as u32).collect();
                        p.shuffle(&mut rng);
                        p
                    })
                    .collect(),
            )
        })
        .collect();
    // powers[r][p - 1] = reps[r] ∘ φᵖ, built on demand.
    let mut powers: Vec<Vec<PermRep>> = vec![Vec::new(); reps.len()];
    let classes = enumerate_cyclic_words(k, max_len);
    let mut report = PeriodicReport {
        max_len,
        max_power,
        classes: classes.len(),
        separated_by_permutation: 0,
        separated_exactly: 0,
        violations: Vec::new(),
        violation_count: 0,
        unresolved: Vec::new(),
    };
    for class in &classes {
        let g = class.word();
        for p in 1..=max_power {
            let mut separated = false;
            for r in 0..reps.len() {
                while powers[r].len() < p {
                    let prev = powers[r].last().unwrap_or(&reps[r]).clone();
                    let next = factors.iter().fold(prev, |acc, f| acc.precompose(f));
                    powers[r].push(next);
                }
                if cycle_type(&reps[r].eval(g)) != cycle_type(&powers[r][p - 1].eval(g)) {
                    separated = true;
                    break;
                }
            }
            if separated {
                report.separated_by_permutation += 1;
                continue;
            }
            let all: Vec<Automorphism> = factors.iter().cycle().take(factors.len() * p).cloned().collect();
            match apply_factors(&all, g, EXACT_BUDGET) {
                Some(img) if CyclicWord::new(&img) == *class => {
                    report.violation_count += 1;
                    if report.violations.len() < REPORT_LIMIT {
                        report.violations.push(PeriodicViolation { class: class.clone(), power: p });
                    }
                }
                Some(_) => report.separated_exactly += 1,
                None => {
                    if report.unresolved.len() < REPORT_LIMIT {
                        report.unresolved.push(PeriodicViolation { class: class.clone(), power: p });
                    }
                }
            }
        }
    }
    report
}

/// A sampled candidate: a cyclic subgroup or a proper free factor.
#[derive(Clone, Debug, Serialize)]
pub struct Sampled {
    pub generators: Vec<Word>,
    pub before: Classification,
    pub exponent: i64,
    pub after: Classification,
    pub expected: Side,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongSample {
    pub twist: u8,
    pub draws: usize,
    pub cases: Vec<Sampled>,
    pub violations: usize,
}

/// Random basis of `F_k` by Nielsen moves; the first `rank` elements span a
/// free factor.
pub fn random_free_factor(rng: &mut impl Rng, k: usize, rank: usize, moves: usize) -> Vec<Word> {
    let mut basis: Vec<Word> = (0..k).map(|i| Word::letter(Letter::new(i, false))).collect();
    for _ in 0..moves {
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen() { basis[j].clone() } else { basis[j].inverse() };
        basis[i] = if rng.gen() { basis[i].mul(&other) } else { other.mul(&basis[i]) };
    }
    basis.truncate(rank);
    basis
}

/// Draws `X` on the side opposite to twist `id`, applies `δ_id^{±N}` and checks
/// that `X` crosses to the other side and grows.
pub fn sample_ping_pong(config: &PingPongConfig, id: u8, trials: usize, max_len: usize, seed: u64) -> Result<PingPongSample, PingPongError> {
    let k = config.pair.rank();
    let n = config.n_i64()?;
    let (from, to) = if id == 1 { (Side::X2, Side::X1) } else { (Side::X1, Side::X2) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PingPongSample { twist: id, draws: 0, cases: Vec::new(), violations: 0 };
    let twists = [config.twist(id, n), config.twist(id, -n)];
    while out.cases.len() < 2 * trials && out.draws < 1000 * trials {
        out.draws += 1;
        let gens = match rng.gen_range(0..3) {
            0 => vec![random_word(&mut rng, k, 1..=max_len, None)],
            r => {
                let moves = rng.gen_range(1..=6);
                random_free_factor(&mut rng, k, r.min(k - 1), moves)
            }
        };
        if gens.iter().any(|g| g.is_empty() || g.len() > max_len) {
            continue;
        }
        let before = classify(config, &gens)?;
        if before.side != from {
            continue;
        }
        for (sign, d) in [(1, &twists[0]), (-1, &twists[1])] {
            let image: Vec<Word> = gens.iter().map(|g| d.apply(g)).collect();
            let after = classify(config, &image)?;
            let ok = after.side == to && after.size() > before.size();
            out.violations += usize::from(!ok);
            out.cases.push(Sampled { generators: gens.clone(), before: before.clone(), exponent: sign * n, after, expected: to, ok });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(compute_n([2, 2], 10, 1).unwrap(), 7);
        assert_eq!(compute_n([1, 1], 0, 0).unwrap(), 2);
        assert!(matches!(compute_n([0, 3], 1, 1), Err(PingPongError::NotFillingEvidence(1))));
    }

    #[test]
    fn ties_are_detected() {
        let l = Ratio::new(3u64, 2);
        assert_eq!(classify_volumes(l, 3, 2), Side::Tie);
        assert_eq!(classify_volumes(l, 0, 4), Side::X1);
        assert_eq!(classify_volumes(l, 4, 0), Side::X2);
        assert_eq!(classify_volumes(l, 0, 0), Side::Tie);
    }

    #[test]
    fn parse_twist_words() {
        let w = TwistWord::parse("1:+N 2:-N+3 1:5", 10).unwrap();
        assert_eq!(w.0, vec![(1, 10), (2, -7), (1, 5)]);
        assert_eq!(TwistWord::parse("1:2N 2:-3N-1", 4).unwrap().0, vec![(1, 8), (2, -13)]);
        assert!(TwistWord::parse("1:N 1:N", 3).is_err());
        assert!(TwistWord::parse("1:0", 3).is_err());
        assert!(TwistWord::parse("3:1", 3).is_err());
        assert_eq!(w.cyclically_reduced().0, vec![(1, 15), (2, -7)]);
        assert!(TwistWord::parse("1:2 2:1 1:-2", 3).unwrap().cyclically_reduced().0 == vec![(2, 1)]);
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&[1, 2, 0, 4, 3, 5]), vec![1, 2, 3]);
        let rep = PermRep::new(vec![vec![1, 2, 0], vec![1, 0, 2]]);
        let w = Word::parse("aB").unwrap();
        let p = rep.eval(&w);
        let back = rep.eval(&w.inverse());
        assert!((0..3).all(|i| back[p[i] as usize] == i as u32));
    }
}
