//! Volume growth under a Dehn twist: bounded cancellation, graph surgery,
//! safe pieces and the linear bounds relating two trees.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::splittings::{CyclicSplitting, EdgeClass, SplittingPair};
use crate::stallings::{core_of, is_malnormal, LabeledGraph};
use crate::volume::{analyze, free_volume, translation_length, VolumeError};
use crate::words::{cyclically_reduce, Automorphism, AutomorphismError, Letter, Word};

#[derive(Debug, Error)]
pub enum TwistError {
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error("edge word is not in reduced form for the measuring tree")]
    NotReduced,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Bounded cancellation constant of a change of basis.
#[derive(Clone, Debug, Serialize)]
pub struct Bcc {
    pub value: usize,
    /// A reduced product `w w'` in source letters whose images cancel
    /// exactly `value` letters.
    pub witness: Option<(Word, Word)>,
}

/// Letters cancelled between `psi(w)` and `psi(w2)`.
pub fn cancellation(psi: &Automorphism, w: &Word, w2: &Word) -> usize {
    let a = psi.apply(w).len();
    let b = psi.apply(w2).len();
    let ab = psi.apply(&w.mul(w2)).len();
    (a + b - ab) / 2
}

/// A point of the source tree mapping to the current target vertex, given by
/// the endpoints of the edge it lies on (equal for a vertex).
#[derive(Clone)]
struct Preimage {
    near: Word,
    far: Word,
}

impl Preimage {
    fn new(a: Word, b: Word) -> Self {
        if a.len() <= b.len() {
            Preimage { near: a, far: b }
        } else {
            Preimage { near: b, far: a }
        }
    }
    fn cone(&self) -> Letter {
        self.far.first().expect("preimage at the base vertex")
    }
}

/// Exact bounded cancellation constant of `psi`, which sends source letter
/// `i` to a word in target letters.
///
/// Lift `psi` to a map of Cayley trees that is linear on edges. The
/// preimages of a target vertex `p` are `phi(p)` together with
/// `phi(p) * E`, where `E` lists the interior points of edges mapping to the
/// identity. Cancellation `m` occurs exactly when some `p` with `|p| = m`
/// has preimages in two different cones at the base vertex. That set of
/// `p` is prefix closed, so a search outward from the identity finds it.
pub fn bcc(psi: &Automorphism) -> Result<Bcc, AutomorphismError> {
    let phi = psi.invert()?;
    let k = psi.rank();
    let mut interior: Vec<(Word, usize)> = Vec::new();
    for i in 0..k {
        let img = psi.image(i);
        for j in 1..img.len() {
            interior.push((phi.apply(&img.prefix(j)).inverse(), i));
        }
    }
    let preimages = |fp: &Word| -> Vec<Preimage> {
        let mut out = vec![Preimage::new(fp.clone(), fp.clone())];
        for (g, i) in &interior {
            let a = fp.mul(g);
            let b = a.mul(&Word::letter(Letter::new(*i, false)));
            out.push(Preimage::new(a, b));
        }
        out
    };

    let mut best: Option<(Word, Vec<Preimage>)> = None;
    let mut stack: Vec<(Word, Word)> = (0..2 * k)
        .map(|i| {
            let y = Word::letter(Letter::from_index(i));
            let fy = phi.apply(&y);
            (y, fy)
        })
        .collect();
    while let Some((p, fp)) = stack.pop() {
        let pts = preimages(&fp);
        let cones: BTreeSet<Letter> = pts.iter().map(Preimage::cone).collect();
        if cones.len() < 2 {
            continue;
        }
        if best.as_ref().is_none_or(|(q, _)| p.len() > q.len()) {
            best = Some((p.clone(), pts));
        }
        let last = p.last().expect("nonempty");
        for i in 0..2 * k {
            let y = Letter::from_index(i);
            if y == last.inverse() {
                continue;
            }
            let step = Word::letter(y);
            stack.push((p.mul(&step), fp.mul(&phi.apply(&step))));
        }
    }

    let Some((p, pts)) = best else {
        return Ok(Bcc { value: 0, witness: None });
    };
    // an endpoint whose image runs through p
    let through = |pt: &Preimage| -> Word {
        if !pt.near.is_empty() && p.is_prefix_of(&psi.apply(&pt.near)) {
            pt.near.clone()
        } else {
            pt.far.clone()
        }
    };
    let first = &pts[0];
    let other = pts.iter().find(|q| q.cone() != first.cone()).expect("two cones");
    let (s, s2) = (through(first), through(other));
    Ok(Bcc { value: p.len(), witness: Some((s.inverse(), s2)) })
}

/// Change of basis between two relative bases written in ambient letters:
/// source letter `i` goes to `source[i]` written in the target basis.
pub fn basis_change(source: &[Word], target: &[Word]) -> Result<Automorphism, AutomorphismError> {
    let s = Automorphism::new(source.to_vec())?;
    let t = Automorphism::new(target.to_vec())?;
    Ok(t.invert()?.compose(&s))
}

#[derive(Clone, Debug, Serialize)]
pub struct CancellationSample {
    pub trials: usize,
    pub max_cancellation: usize,
    /// Samples whose cancellation exceeded the constant.
    pub exceeded: usize,
    pub attained: bool,
    /// Samples drawn as random extensions of the witness pair.
    pub witness_extensions: usize,
}

pub(crate) fn random_word(rng: &mut ChaCha8Rng, k: usize, lens: std::ops::RangeInclusive<usize>, first_not: Option<Letter>) -> Word {
    let len = rng.gen_range(lens);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_index(rng.gen_range(0..2 * k));
        let bad = match letters.last() {
            Some(&prev) => l == prev.inverse(),
            None => Some(l) == first_not,
        };
        if !bad {
            letters.push(l);
        }
    }
    Word::reduce(letters)
}

/// Random reduced products `w w'`, measuring cancellation in the target
/// basis. Half the samples extend the witness pair on the outside.
pub fn sample_cancellation(psi: &Automorphism, constant: &Bcc, trials: usize, max_len: usize, seed: u64) -> CancellationSample {
    let k = psi.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CancellationSample { trials, max_cancellation: 0, exceeded: 0, attained: false, witness_extensions: 0 };
    for t in 0..trials {
        let (w, w2) = match &constant.witness {
            Some((a, b)) if t % 2 == 1 => {
                out.witness_extensions += 1;
                let left = random_word(&mut rng, k, 0..=max_len, None).inverse();
                let left = if left.last().is_some_and(|l| Some(l.inverse()) == a.first()) { Word::identity() } else { left };
                let right = random_word(&mut rng, k, 0..=max_len, b.last().map(|l| l.inverse()));
                (left.mul(a), b.mul(&right))
            }
            _ => {
                let w = random_word(&mut rng, k, 1..=max_len, None);
                let w2 = random_word(&mut rng, k, 1..=max_len, w.last().map(|l| l.inverse()));
                (w, w2)
            }
        };
        let c = cancellation(psi, &w, &w2);
        out.max_cancellation = out.max_cancellation.max(c);
        if c > constant.value {
            out.exceeded += 1;
        }
        if c == constant.value {
            out.attained = true;
        }
    }
    out
}

/// An edge element conjugated into reduced form for a second tree.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedEdgeWord {
    /// `c = conjugator * ambient * conjugator^-1`.
    pub conjugator: Word,
    pub ambient: Word,
    /// `ambient` in the relative letters of the measuring tree.
    pub relative: Word,
    pub elliptic: bool,
}

/// Reduced form: cyclically reduced in relative letters, and (unless
/// elliptic) the base vertex of its circle is a crossing vertex, so that
/// essential pieces of powers never straddle the base vertex.
pub fn is_t2_reduced(relative: &Word, s2: &CyclicSplitting) -> bool {
    if relative.is_empty() || !relative.is_cyclically_reduced() {
        return false;
    }
    let report = analyze(s2, &LabeledGraph::circle(s2.rank(), relative));
    report.free_volume == 0 || report.crossing_vertices.first() == Some(&0)
}

pub fn make_reduced(c: &Word, s2: &CyclicSplitting) -> ReducedEdgeWord {
    let rel = s2.to_relative(c);
    let (cyc, conj) = cyclically_reduce(&rel);
    let w = cyc.word().clone();
    let mut shift = 0;
    let mut elliptic = true;
    if !w.is_empty() {
        let report = analyze(s2, &LabeledGraph::circle(s2.rank(), &w));
        elliptic = report.free_volume == 0;
        if !elliptic {
            shift = report.crossing_vertices.first().copied().unwrap_or(0);
        }
    }
    let u = w.prefix(shift);
    let rot = u.inverse().mul(&w).mul(&u);
    ReducedEdgeWord {
        conjugator: s2.to_ambient(&conj.mul(&u)),
        ambient: s2.to_ambient(&rot),
        relative: rot,
        elliptic,
    }
}

/// Essential pieces of the segment spelling `relative^ell`.
#[derive(Clone, Debug, Serialize)]
pub struct SafePieces {
    pub segment_length: usize,
    pub essential_pieces: usize,
    pub safe: usize,
}

/// Counts essential pieces of the segment for `relative^ell` that avoid the
/// vertices of the `b` edges at either end.
pub fn safe_pieces(ell: usize, relative: &Word, s2: &CyclicSplitting, b: usize) -> Result<SafePieces, TwistError> {
    if !is_t2_reduced(relative, s2) {
        return Err(TwistError::NotReduced);
    }
    if ell == 0 {
        return Ok(SafePieces { segment_length: 0, essential_pieces: 0, safe: 0 });
    }
    let seg = relative.pow(ell as i64);
    let len = seg.len();
    let report = analyze(s2, &LabeledGraph::circle(s2.rank(), &seg));
    // circle vertex i sits after i letters; vertex 0 is both ends
    let unsafe_vertex = |v: usize| v <= b || v + b >= len;
    let mut pieces: Vec<BTreeSet<usize>> = report.essential_vertices.iter().map(|&v| BTreeSet::from([v])).collect();
    for ch in report.essential_chains() {
        let mut vs = ch.image_vertices.clone();
        vs.extend(ch.chain_vertices.iter().copied());
        pieces.push(vs);
    }
    let safe = pieces.iter().filter(|vs| !vs.iter().any(|&v| unsafe_vertex(v))).count();
    Ok(SafePieces { segment_length: len, essential_pieces: pieces.len(), safe })
}

/// Core graph of the image of a subgroup graph under `nu`.
pub fn graph_composition(g: &LabeledGraph, nu: &Automorphism) -> LabeledGraph {
    let mut out = LabeledGraph::new(nu.rank());
    for _ in 0..g.num_vertices() {
        out.add_vertex();
    }
    for e in g.edges() {
        out.add_path(e.src, e.dst, nu.image(e.label));
    }
    out.set_basepoint(g.basepoint());
    out.fold(g.basepoint().is_some())
}

#[derive(Clone, Debug, Serialize)]
pub struct Segment {
    pub crossing_vertex: usize,
    pub new_vertex: usize,
    pub power: i64,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeredGraph {
    /// Unfolded, in the relative letters of the twisting tree.
    pub graph: LabeledGraph,
    pub segments: Vec<Segment>,
    pub power: i64,
}

impl SurgeredGraph {
    pub fn folded(&self) -> LabeledGraph {
        self.graph.fold(false)
    }
}

/// Inserts a segment spelling `c^n` at every crossing vertex of the core
/// graph and moves the far-side edges there. Folding the result gives the
/// core graph of the twisted subgroup.
pub fn graph_surgery(core: &LabeledGraph, s1: &CyclicSplitting, n: i64) -> SurgeredGraph {
    let mut graph = core.clone();
    graph.set_basepoint(None);
    let mut segments = Vec::new();
    if n == 0 {
        return SurgeredGraph { graph, segments, power: n };
    }
    let report = analyze(s1, core);
    let cn = s1.edge_word().pow(n);
    for &v in &report.crossing_vertices {
        let v2 = graph.add_vertex();
        let edges = graph.add_path(v, v2, &cn).into_iter().map(|(e, _)| e).collect();
        for (e, orig) in core.edges().iter().enumerate() {
            let cur = graph.edge(e);
            let (mut src, mut dst) = (cur.src, cur.dst);
            match s1.edge_class(orig.label) {
                EdgeClass::B0 => {
                    if orig.src == v {
                        src = v2;
                    }
                    if orig.dst == v {
                        dst = v2;
                    }
                }
                EdgeClass::Stable if orig.src == v => src = v2,
                _ => {}
            }
            graph.set_endpoints(e, src, dst);
        }
        segments.push(Segment { crossing_vertex: v, new_vertex: v2, power: n, edges });
    }
    SurgeredGraph { graph, segments, power: n }
}

/// Core graph, in relative letters of `s1`, of the word-level twist of `gens`.
pub fn twisted_core(s1: &CyclicSplitting, gens: &[Word], n: i64) -> LabeledGraph {
    let d = s1.dehn_twist_power(n);
    let rel: Vec<Word> = gens.iter().map(|g| s1.to_relative(&d.apply(g))).collect();
    core_of(s1.rank(), &rel)
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistConstants {
    pub rank_bound: usize,
    pub b: usize,
    /// Bounded cancellation in each direction between the twisting basis
    /// (conjugated to put its edge element in reduced form) and the
    /// measuring basis.
    pub directed_bcc: [usize; 2],
    pub m: u128,
    pub c: u128,
    pub reduced_edge_word: ReducedEdgeWord,
    /// Translation length of the twisting edge element in the measuring tree.
    pub ell: usize,
}

/// Upper bound on the number of edge paths with at most `2b` edges through
/// a vertex of valence at least three, over core graphs of rank at most `r`.
///
/// Such a graph has at most `2r - 2` branch vertices and valence at most
/// `2r`, so there are at most `2r (2r-1)^(j-1)` reduced paths of length
/// `j >= 1` leaving a vertex. A path through a branch vertex splits there
/// into two such paths.
pub fn m_bound(r: usize, b: usize) -> u128 {
    if r <= 1 {
        return 1;
    }
    let r = r as u128;
    let paths = |j: usize| -> u128 {
        if j == 0 {
            1
        } else {
            (2 * r).saturating_mul((2 * r - 1).saturating_pow(j as u32 - 1))
        }
    };
    let mut total: u128 = 0;
    for len in 0..=2 * b {
        for j in 0..=len {
            total = total.saturating_add(paths(j).saturating_mul(paths(len - j)));
        }
    }
    (2 * r - 2).saturating_mul(total).max(1)
}

/// Constants for twisting along `pair.t1` and measuring in `pair.t2`, for
/// subgroups of rank at most `r`.
pub fn constants(r: usize, pair: &SplittingPair) -> Result<TwistConstants, TwistError> {
    let (t1, t2) = (&pair.t1, &pair.t2);
    let c1 = t1.ambient_edge_word();
    let red = make_reduced(&c1, t2);
    let t1r = t1.conjugate(&red.conjugator.inverse());
    let psi = t2.marking_inverse().compose(t1r.marking());
    let forward = bcc(&psi)?.value;
    let backward = bcc(&psi.invert()?)?.value;
    let b = forward.max(backward);
    let m = m_bound(r, b);
    let c = (4 * b as u128 + 5).saturating_add(m);
    Ok(TwistConstants {
        rank_bound: r,
        b,
        directed_bcc: [forward, backward],
        m,
        c,
        ell: translation_length(t2, &c1),
        reduced_edge_word: red,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub exponent: i64,
    pub volume: usize,
    pub lower: i128,
    pub upper: i128,
    pub lower_margin: i128,
    pub upper_margin: i128,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremBReport {
    pub vol_t1: usize,
    pub vol_t2: usize,
    pub ell: usize,
    pub n: u32,
    pub checks: Vec<BoundCheck>,
}

impl TheoremBReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.lower_ok && c.upper_ok)
    }
}

fn sat(x: u128) -> i128 {
    i128::try_from(x).unwrap_or(i128::MAX)
}

/// Evaluates both linear bounds for the twists by `+n` and `-n`.
pub fn check_theorem_b(pair: &SplittingPair, gens: &[Word], n: u32, k: &TwistConstants) -> Result<TheoremBReport, TwistError> {
    let core = core_of(pair.rank(), gens);
    if core.num_edges() == 0 {
        return Err(VolumeError::TrivialSubgroup.into());
    }
    let rank = core.fundamental_rank();
    if rank > k.rank_bound {
        return Err(TwistError::HypothesisViolated(format!("rank {rank} exceeds bound {}", k.rank_bound)));
    }
    if rank > 1 && !is_malnormal(&core) {
        return Err(TwistError::HypothesisViolated("subgroup is neither cyclic nor malnormal".into()));
    }
    let vol_t1 = free_volume(&pair.t1, gens)?;
    let vol_t2 = free_volume(&pair.t2, gens)?;
    let ell = k.ell;
    let (v1, v2) = (vol_t1 as i128, vol_t2 as i128);
    let growth = n as i128 * ell as i128;
    let (c, m) = (sat(k.c), sat(k.m));
    let lower = v1.saturating_mul(growth.saturating_sub(c)).saturating_sub(m.saturating_mul(v2));
    let upper = v1.saturating_mul(growth.saturating_add(c)).saturating_add(m.saturating_mul(v2));
    let mut checks = Vec::new();
    for sign in [1i64, -1] {
        let exponent = sign * n as i64;
        let d = pair.t1.dehn_twist_power(exponent);
        let twisted: Vec<Word> = gens.iter().map(|g| d.apply(g)).collect();
        let volume = free_volume(&pair.t2, &twisted)?;
        let v = volume as i128;
        checks.push(BoundCheck {
            exponent,
            volume,
            lower,
            upper,
            lower_margin: v.saturating_sub(lower),
            upper_margin: upper.saturating_sub(v),
            lower_ok: v >= lower,
            upper_ok: v <= upper,
        });
    }
    Ok(TheoremBReport { vol_t1, vol_t2, ell, n, checks })
}
