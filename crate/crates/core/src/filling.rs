//! Filling conditions for a pair of cyclic splittings.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::splittings::{SplittingPair, SCHEMA};
use crate::stallings::{core_of, pullback};
use crate::volume::free_volume;
use crate::words::{Automorphism, CyclicWord, Letter, Word};

/// Name of the external criterion used for (F3), recorded in certificates.
pub const F3_CRITERION: &str = "whitehead-minimal-graph-connected-without-cut-vertex";

/// Whitehead graph of a set of cyclic words: vertices are the `2k` signed
/// letters, one edge `{x⁻¹, y}` per cyclically adjacent pair `x·y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteheadGraph {
    pub rank: usize,
    pub edges: Vec<(Letter, Letter)>,
}

impl WhiteheadGraph {
    pub fn new(rank: usize, classes: &[CyclicWord]) -> Self {
        let mut edges = Vec::new();
        for c in classes {
            let l = c.word().letters();
            for i in 0..l.len() {
                let x = l[i];
                let y = l[(i + 1) % l.len()];
                let (u, v) = (x.inverse(), y);
                edges.push(if u <= v { (u, v) } else { (v, u) });
            }
        }
        WhiteheadGraph { rank, edges }
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); 2 * self.rank];
        for &(u, v) in &self.edges {
            adj[u.index()].push(v.index());
            adj[v.index()].push(u.index());
        }
        adj
    }

    /// Number of components after deleting `removed` (if any).
    fn components_without(&self, adj: &[Vec<usize>], removed: Option<usize>) -> usize {
        let n = adj.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] || Some(s) == removed {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] && Some(v) != removed {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components_without(&self.neighbours(), None) == 1
    }

    /// Smallest vertex whose removal disconnects a connected graph.
    pub fn cut_vertex(&self) -> Option<Letter> {
        let adj = self.neighbours();
        if self.components_without(&adj, None) != 1 {
            return None;
        }
        (0..adj.len()).find(|&v| self.components_without(&adj, Some(v)) > 1).map(Letter::from_index)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph whitehead {\n");
        for i in 0..2 * self.rank {
            out.push_str(&format!("  \"{}\";\n", Letter::from_index(i)));
        }
        for (u, v) in &self.edges {
            out.push_str(&format!("  \"{u}\" -- \"{v}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Type-II Whitehead automorphism `(A, a)`: each generator `x ≠ a^±1` maps to
/// `a⁻¹ x` if `x⁻¹ ∈ A`, then right-multiplied by `a` if `x ∈ A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteheadMove {
    pub multiplier: Letter,
    pub set: Vec<Letter>,
}

impl WhiteheadMove {
    pub fn automorphism(&self, rank: usize) -> Automorphism {
        let a = self.multiplier;
        let images = (0..rank)
            .map(|g| {
                let x = Letter::new(g, false);
                if g == a.gen() {
                    return Word::letter(x);
                }
                let mut letters = Vec::with_capacity(3);
                if self.set.contains(&x.inverse()) {
                    letters.push(a.inverse());
                }
                letters.push(x);
                if self.set.contains(&x) {
                    letters.push(a);
                }
                Word::reduce(letters)
            })
            .collect();
        Automorphism::from_images_unchecked(images)
    }
}

impl fmt::Display for WhiteheadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: String = self.set.iter().map(|l| l.to_char()).collect();
        write!(f, "({{{set}}}, {})", self.multiplier)
    }
}

/// Nontrivial type-II moves in a fixed order: multiplier, then subset bitmask.
pub fn whitehead_moves(rank: usize) -> Vec<WhiteheadMove> {
    let mut moves = Vec::new();
    for ai in 0..2 * rank {
        let a = Letter::from_index(ai);
        let others: Vec<Letter> = (0..2 * rank).map(Letter::from_index).filter(|l| l.gen() != a.gen()).collect();
        let full = (1u64 << others.len()) - 1;
        // Mask 0 is the identity and the full mask is conjugation by `a`.
        for mask in 1..full {
            let mut set = vec![a];
            set.extend(others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l));
            set.sort();
            moves.push(WhiteheadMove { multiplier: a, set });
        }
    }
    moves
}

#[derive(Clone, Debug, Serialize)]
pub struct LoggedMove {
    #[serde(rename = "move")]
    pub mv: WhiteheadMove,
    pub length_after: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Minimized {
    pub classes: Vec<CyclicWord>,
    pub total_length: usize,
    pub moves: Vec<LoggedMove>,
}

impl Minimized {
    /// Applies the logged moves to `input` in order.
    pub fn replay(&self, rank: usize, input: &[CyclicWord]) -> Vec<CyclicWord> {
        self.moves.iter().fold(input.to_vec(), |cur, m| {
            let phi = m.mv.automorphism(rank);
            cur.iter().map(|c| phi.apply_cyclic(c)).collect()
        })
    }
}

fn total_length(classes: &[CyclicWord]) -> usize {
    classes.iter().map(CyclicWord::len).sum()
}

/// Descends by the first strictly length-decreasing Whitehead move until none
/// applies.
pub fn whitehead_minimize(rank: usize, classes: &[CyclicWord]) -> Minimized {
    let moves = whitehead_moves(rank);
    let mut current = classes.to_vec();
    let mut length = total_length(&current);
    let mut log = Vec::new();
    'descent: loop {
        for mv in &moves {
            let phi = mv.automorphism(rank);
            let next: Vec<CyclicWord> = current.iter().map(|c| phi.apply_cyclic(c)).collect();
            let next_length = total_length(&next);
            if next_length < length {
                current = next;
                length = next_length;
                log.push(LoggedMove { mv: mv.clone(), length_after: length });
                continue 'descent;
            }
        }
        break;
    }
    Minimized { classes: current, total_length: length, moves: log }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexPairEvidence {
    pub t1_vertex: usize,
    pub t2_vertex: usize,
    pub component_ranks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct F2Evidence {
    pub holds: bool,
    pub pairs: Vec<VertexPairEvidence>,
}

/// Free action on `T₁ × T₂`: every pullback of a `T₁` vertex group with a
/// `T₂` vertex group is a forest.
pub fn check_f2(pair: &SplittingPair) -> F2Evidence {
    let k = pair.rank();
    let cores = |i: usize| -> Vec<_> { pair.get(i).vertex_groups().iter().map(|g| core_of(k, g)).collect() };
    let (c1, c2) = (cores(1), cores(2));
    let mut pairs = Vec::new();
    for (i, g1) in c1.iter().enumerate() {
        for (j, g2) in c2.iter().enumerate() {
            let component_ranks = pullback(g1, g2).iter().map(|c| c.rank).collect();
            pairs.push(VertexPairEvidence { t1_vertex: i, t2_vertex: j, component_ranks });
        }
    }
    let holds = pairs.iter().all(|p| p.component_ranks.iter().all(|&r| r == 0));
    F2Evidence { holds, pairs }
}

#[derive(Clone, Debug, Serialize)]
pub struct F3Evidence {
    pub holds: bool,
    pub criterion: &'static str,
    pub classes: Vec<CyclicWord>,
    pub minimized: Minimized,
    pub graph: WhiteheadGraph,
    pub connected: bool,
    pub cut_vertex: Option<Letter>,
}

/// Decides whether the classes of `c₁` and `c₂` are jointly separable; a
/// non-separable pair satisfies (F3).
pub fn check_f3(pair: &SplittingPair) -> F3Evidence {
    let classes = vec![CyclicWord::new(&pair.t1.ambient_edge_word()), CyclicWord::new(&pair.t2.ambient_edge_word())];
    check_f3_classes(pair.rank(), classes)
}

pub fn check_f3_classes(rank: usize, classes: Vec<CyclicWord>) -> F3Evidence {
    let minimized = whitehead_minimize(rank, &classes);
    let graph = WhiteheadGraph::new(rank, &minimized.classes);
    let connected = graph.is_connected();
    let cut_vertex = graph.cut_vertex();
    F3Evidence {
        holds: connected && cut_vertex.is_none(),
        criterion: F3_CRITERION,
        classes,
        minimized,
        graph,
        connected,
        cut_vertex,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fills,
    NotFilling,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fills => 0,
            Verdict::NotFilling => 1,
            Verdict::Unknown => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FillingCertificate {
    pub schema: &'static str,
    pub f2: F2Evidence,
    pub f3: F3Evidence,
    pub fills: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn check_filling(pair: &SplittingPair) -> FillingCertificate {
    let f2 = check_f2(pair);
    let f3 = check_f3(pair);
    let (verdict, note) = match (f2.holds, f3.holds) {
        (false, _) => (Verdict::NotFilling, Some("a nontrivial element fixes a vertex in both trees".to_string())),
        (true, true) => (Verdict::Fills, None),
        (true, false) => (
            Verdict::Unknown,
            Some(format!(
                "edge elements {} and {} are separable; (F1) may still hold and can be checked per free factor",
                pair.t1.ambient_edge_word(),
                pair.t2.ambient_edge_word()
            )),
        ),
    };
    FillingCertificate { schema: SCHEMA, fills: verdict == Verdict::Fills, f2, f3, verdict, note }
}

#[derive(Clone, Debug, Serialize)]
pub struct F1Check {
    pub generators: Vec<Word>,
    pub vol_t1: usize,
    pub vol_t2: usize,
    pub holds: bool,
}

/// `vol_{T₁}(X) + vol_{T₂}(X) > 0` for one candidate subgroup `X`.
pub fn check_f1_for(pair: &SplittingPair, gens: &[Word]) -> Result<F1Check, crate::volume::VolumeError> {
    let vol_t1 = free_volume(&pair.t1, gens)?;
    let vol_t2 = free_volume(&pair.t2, gens)?;
    Ok(F1Check { generators: gens.to_vec(), vol_t1, vol_t2, holds: vol_t1 + vol_t2 > 0 })
}

/// Sum of both volumes for every cyclic class up to `max_len`, keyed by the
/// classes with zero total. Used to sample the filling consequence.
pub fn zero_volume_classes(pair: &SplittingPair, max_len: usize) -> BTreeMap<String, (usize, usize)> {
    use crate::volume::translation_length;
    crate::words::enumerate_cyclic_words(pair.rank(), max_len)
        .into_iter()
        .filter_map(|c| {
            let v1 = translation_length(&pair.t1, c.word());
            let v2 = translation_length(&pair.t2, c.word());
            (v1 + v2 == 0).then(|| (c.to_string(), (v1, v2)))
        })
        .collect()
}
