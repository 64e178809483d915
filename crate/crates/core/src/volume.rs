//! Free volume of a finitely generated subgroup relative to a splitting,
//! read off the subgroup's core graph in relative letters.
//!
//! A lift is a path reading the edge word `c`; a chain is a maximal
//! sequence of lifts, each starting where the previous one ends. Chains and
//! vertices that separate the two kinds of edges ("essential" pieces) are the
//! free edges of the quotient of the minimal subtree.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::splittings::{CyclicSplitting, EdgeClass, SplittingPair};
use crate::stallings::{core_of, LabeledGraph};
use crate::words::{CyclicWord, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VolumeError {
    #[error("the subgroup is trivial")]
    TrivialSubgroup,
    #[error("generator rank {found} does not match splitting rank {expected}")]
    RankMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Lift {
    pub start: usize,
    pub end: usize,
    pub edges: Vec<usize>,
    /// Vertices along the path, `start` first and `end` last.
    pub vertices: Vec<usize>,
}

/// Whether a chain gives an edge of the quotient of the minimal subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStatus {
    Essential,
    /// The vertex-group side containing the chain adds nothing beyond the
    /// edge group; the chain lies inside the far vertex tree.
    AbsorbedFar,
    /// The far vertex tree adds nothing beyond the edge group.
    AbsorbedNear,
}

/// Classification by the local adjacency rules alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalStatus {
    Essential,
    /// Only far-side edges, all at chain vertices.
    FarSideOnly,
    /// Only near-side edges.
    NearSideOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    pub lifts: Vec<usize>,
    pub closed: bool,
    pub chain_vertices: Vec<usize>,
    pub image_edges: BTreeSet<usize>,
    pub image_vertices: BTreeSet<usize>,
    pub status: ChainStatus,
    pub local_status: LocalStatus,
}

impl Chain {
    pub fn is_essential(&self) -> bool {
        self.status == ChainStatus::Essential
    }
    pub fn simply_connected(&self) -> bool {
        !self.closed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub free_volume: usize,
    /// Edges of the quotient of the minimal subtree, free or not.
    pub quotient_edges: usize,
    /// Volume from the local adjacency rules with edge reclassification.
    pub local_rule_volume: usize,
    pub reclassification_rounds: usize,
    pub reclassified_edges: Vec<usize>,
    pub graph: LabeledGraph,
    pub edge_classes: Vec<EdgeClass>,
    pub lifts: Vec<Lift>,
    pub chains: Vec<Chain>,
    pub essential_vertices: Vec<usize>,
    pub crossing_vertices: Vec<usize>,
    /// Pairs of distinct chains whose images share an edge.
    pub overlapping_chain_pairs: usize,
}

impl VolumeReport {
    pub fn essential_chains(&self) -> impl Iterator<Item = &Chain> {
        self.chains.iter().filter(|c| c.is_essential())
    }

    /// DOT drawing: far-side edges blue, essential chain images bold red,
    /// essential vertices filled, crossing vertices boxed.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let chain_edges: BTreeSet<usize> = self.essential_chains().flat_map(|c| c.image_edges.iter().copied()).collect();
        let mut s = String::from("digraph volume {\n  rankdir=LR;\n");
        for v in 0..self.graph.num_vertices() {
            let shape = if self.crossing_vertices.contains(&v) { "box" } else { "circle" };
            let fill = if self.essential_vertices.contains(&v) { ", style=filled, fillcolor=gold" } else { "" };
            let _ = writeln!(s, "  {v} [shape={shape}{fill}];");
        }
        for (i, e) in self.graph.edges().iter().enumerate() {
            let color = match self.edge_classes[i] {
                EdgeClass::A | EdgeClass::A0 => "black",
                EdgeClass::B0 | EdgeClass::Stable => "blue",
            };
            let (color, width) = if chain_edges.contains(&i) { ("red", 2.5) } else { (color, 1.0) };
            let label = crate::words::Letter::new(e.label, false);
            let _ = writeln!(s, "  {} -> {} [label=\"{label}\", color={color}, penwidth={width}];", e.src, e.dst);
        }
        s.push_str("}\n");
        s
    }
}

/// Core graph of `<gens>` in the relative letters of `s`.
pub fn lambda_graph(s: &CyclicSplitting, gens: &[Word]) -> Result<LabeledGraph, VolumeError> {
    let rel: Vec<Word> = gens.iter().map(|g| s.to_relative(g)).collect();
    let core = core_of(s.rank(), &rel);
    if core.num_edges() == 0 {
        return Err(VolumeError::TrivialSubgroup);
    }
    Ok(core)
}

pub fn volume_report(s: &CyclicSplitting, gens: &[Word]) -> Result<VolumeReport, VolumeError> {
    if let Some(g) = gens.iter().filter_map(|w| w.max_gen()).max() {
        if g >= s.rank() {
            return Err(VolumeError::RankMismatch { expected: s.rank(), found: g + 1 });
        }
    }
    Ok(analyze(s, &lambda_graph(s, gens)?))
}

pub fn free_volume(s: &CyclicSplitting, gens: &[Word]) -> Result<usize, VolumeError> {
    Ok(volume_report(s, gens)?.free_volume)
}

/// Translation length of `g`; zero for the identity.
pub fn translation_length(s: &CyclicSplitting, g: &Word) -> usize {
    match free_volume(s, std::slice::from_ref(g)) {
        Ok(v) => v,
        Err(_) => 0,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Out,
    In,
}

/// One sampled cyclic class with both tree volumes and its length in the rose.
#[derive(Clone, Debug, Serialize)]
pub struct RatioSample {
    pub class: CyclicWord,
    pub vol_t1: usize,
    pub vol_t2: usize,
    pub rose: usize,
}

impl RatioSample {
    pub fn ratio(&self) -> f64 {
        (self.vol_t1 + self.vol_t2) as f64 / self.rose as f64
    }

    fn lt(&self, other: &RatioSample) -> bool {
        (self.vol_t1 + self.vol_t2) * other.rose < (other.vol_t1 + other.vol_t2) * self.rose
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BilipschitzSample {
    pub trials: usize,
    pub used: usize,
    /// Samples with `vol_{T₁} + vol_{T₂} = 0`, excluded from the ratios.
    pub zero_sums: usize,
    pub min: Option<RatioSample>,
    pub max: Option<RatioSample>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

/// Extremal ratios `(vol_{T₁} + vol_{T₂}) / |g|` over random cyclic words of
/// length at most `max_len`.
pub fn bilipschitz_sample(pair: &SplittingPair, trials: usize, max_len: usize, seed: u64) -> BilipschitzSample {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = pair.rank();
    let mut out = BilipschitzSample { trials, used: 0, zero_sums: 0, min: None, max: None, min_ratio: None, max_ratio: None };
    for _ in 0..trials {
        let class = loop {
            let c = CyclicWord::new(&crate::twisting::random_word(&mut rng, k, 1..=max_len, None));
            if !c.is_empty() {
                break c;
            }
        };
        let sample = RatioSample {
            vol_t1: translation_length(&pair.t1, class.word()),
            vol_t2: translation_length(&pair.t2, class.word()),
            rose: class.len(),
            class,
        };
        if sample.vol_t1 + sample.vol_t2 == 0 {
            out.zero_sums += 1;
            continue;
        }
        out.used += 1;
        if out.min.as_ref().map_or(true, |m| sample.lt(m)) {
            out.min = Some(sample.clone());
        }
        if out.max.as_ref().map_or(true, |m| m.lt(&sample)) {
            out.max = Some(sample);
        }
    }
    out.min_ratio = out.min.as_ref().map(RatioSample::ratio);
    out.max_ratio = out.max.as_ref().map(RatioSample::ratio);
    out
}

/// Chain analysis of a folded core graph written in relative letters.
pub fn analyze(s: &CyclicSplitting, graph: &LabeledGraph) -> VolumeReport {
    let adj = graph.adjacency();
    let n = graph.num_vertices();
    let c = s.edge_word().letters();
    let hnn = s.is_hnn();

    let mut lifts = Vec::new();
    let mut lift_at = vec![usize::MAX; n];
    for u in 0..n {
        let mut v = u;
        let mut edges = Vec::with_capacity(c.len());
        let mut vertices = vec![u];
        let mut ok = true;
        for &l in c {
            match adj.step(v, l) {
                Some((e, w)) => {
                    edges.push(e);
                    vertices.push(w);
                    v = w;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            lift_at[u] = lifts.len();
            lifts.push(Lift { start: u, end: v, edges, vertices });
        }
    }

    // successor is injective since c^-1 is read deterministically as well
    let succ: Vec<Option<usize>> = lifts.iter().map(|l| Some(lift_at[l.end]).filter(|&i| i != usize::MAX)).collect();
    let mut has_pred = vec![false; lifts.len()];
    for s in succ.iter().flatten() {
        has_pred[*s] = true;
    }
    let mut visited = vec![false; lifts.len()];
    let mut chains = Vec::new();
    let build = |start: usize, visited: &mut Vec<bool>| {
        let mut ids = Vec::new();
        let mut cur = start;
        let mut closed = false;
        loop {
            visited[cur] = true;
            ids.push(cur);
            match succ[cur] {
                Some(nx) if nx == start => {
                    closed = true;
                    break;
                }
                Some(nx) if !visited[nx] => cur = nx,
                _ => break,
            }
        }
        let mut chain_vertices: Vec<usize> = ids.iter().map(|&i| lifts[i].start).collect();
        if !closed {
            chain_vertices.push(lifts[*ids.last().expect("nonempty")].end);
        }
        let image_edges = ids.iter().flat_map(|&i| lifts[i].edges.iter().copied()).collect();
        let image_vertices = ids.iter().flat_map(|&i| lifts[i].vertices.iter().copied()).collect();
        Chain {
            lifts: ids,
            closed,
            chain_vertices,
            image_edges,
            image_vertices,
            status: ChainStatus::Essential,
            local_status: LocalStatus::Essential,
        }
    };
    for i in 0..lifts.len() {
        if !has_pred[i] && !visited[i] {
            chains.push(build(i, &mut visited));
        }
    }
    for i in 0..lifts.len() {
        if !visited[i] {
            chains.push(build(i, &mut visited));
        }
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in graph.edges().iter().enumerate() {
        incident[e.src].push(i);
        if e.dst != e.src {
            incident[e.dst].push(i);
        }
    }
    // (edge, vertex on the chain, side of the edge at that vertex)
    let adjacent: Vec<Vec<(usize, usize, Side)>> = chains
        .iter()
        .map(|ch| {
            let mut v = Vec::new();
            for &x in &ch.image_vertices {
                for &e in &incident[x] {
                    if ch.image_edges.contains(&e) {
                        continue;
                    }
                    let ed = graph.edge(e);
                    if ed.src == x {
                        v.push((e, x, Side::Out));
                    }
                    if ed.dst == x {
                        v.push((e, x, Side::In));
                    }
                }
            }
            v
        })
        .collect();

    let classes: Vec<EdgeClass> = graph.edges().iter().map(|e| s.edge_class(e.label)).collect();
    let local = local_rules(&chains, &adjacent, &classes, &incident, graph, hnn);
    for (ch, st) in chains.iter_mut().zip(&local.status) {
        ch.local_status = *st;
    }

    // Quotient graph: one edge per orbit of right multiplication by c
    // (a chain, or a vertex that is no chain vertex), joining the vertex
    // orbits on either side.
    let mut orbit_of_vertex = vec![usize::MAX; n];
    let mut orbits: Vec<(Option<usize>, usize, bool)> = Vec::new(); // (chain, vertex, closed)
    for (i, ch) in chains.iter().enumerate() {
        for &v in &ch.chain_vertices {
            orbit_of_vertex[v] = orbits.len();
        }
        orbits.push((Some(i), ch.chain_vertices[0], ch.closed));
    }
    for v in 0..n {
        if orbit_of_vertex[v] == usize::MAX {
            orbit_of_vertex[v] = orbits.len();
            orbits.push((None, v, false));
        }
    }
    let (node_rank, ends) = quotient_nodes(s, graph, &lifts, &orbits);
    let alive = prune_quotient(&node_rank, &ends, &orbits);

    for (o, &(chain, _, _)) in orbits.iter().enumerate() {
        if let Some(i) = chain {
            chains[i].status = alive[o];
        }
    }
    let essential_vertices: Vec<usize> = orbits
        .iter()
        .zip(&alive)
        .filter(|(o, st)| o.0.is_none() && **st == ChainStatus::Essential)
        .map(|(o, _)| o.1)
        .collect();
    let mut crossing = BTreeSet::new();
    let crossing_site = |v: usize| {
        if hnn {
            incident[v].iter().any(|&e| classes[e] == EdgeClass::Stable && graph.edge(e).src == v)
        } else {
            incident[v].iter().any(|&e| classes[e] == EdgeClass::B0)
        }
    };
    for &v in &essential_vertices {
        if crossing_site(v) {
            crossing.insert(v);
        }
    }
    for ch in chains.iter().filter(|c| c.is_essential()) {
        for &v in &ch.chain_vertices {
            if crossing_site(v) {
                crossing.insert(v);
            }
        }
    }
    let free_volume =
        chains.iter().filter(|c| c.is_essential() && c.simply_connected()).count() + essential_vertices.len();
    let quotient_edges = alive.iter().filter(|s| **s == ChainStatus::Essential).count();

    let mut overlapping_chain_pairs = 0;
    for i in 0..chains.len() {
        for j in i + 1..chains.len() {
            if chains[i].image_edges.intersection(&chains[j].image_edges).next().is_some() {
                overlapping_chain_pairs += 1;
            }
        }
    }

    VolumeReport {
        free_volume,
        quotient_edges,
        local_rule_volume: local.volume,
        reclassification_rounds: local.rounds,
        reclassified_edges: local.reclassified,
        graph: graph.clone(),
        edge_classes: classes,
        lifts,
        chains,
        essential_vertices,
        crossing_vertices: crossing.into_iter().collect(),
        overlapping_chain_pairs,
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let z = self.0[y];
            self.0[y] = r;
            y = z;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Vertex orbits of the quotient with the ranks of their groups, and the
/// (near, far) endpoints of each orbit edge.
fn quotient_nodes(
    s: &CyclicSplitting,
    graph: &LabeledGraph,
    lifts: &[Lift],
    orbits: &[(Option<usize>, usize, bool)],
) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = graph.num_vertices();
    // nodes 0..n: near side; n..2n: far side
    let mut links: Vec<(usize, usize)> = Vec::new();
    for e in graph.edges() {
        match s.edge_class(e.label) {
            EdgeClass::A | EdgeClass::A0 => links.push((e.src, e.dst)),
            EdgeClass::B0 => links.push((n + e.src, n + e.dst)),
            EdgeClass::Stable => links.push((n + e.src, e.dst)),
        }
    }
    for l in lifts {
        links.push((n + l.start, n + l.end));
    }
    let mut uf = UnionFind::new(2 * n);
    for &(a, b) in &links {
        uf.union(a, b);
    }
    let mut verts = vec![0i64; 2 * n];
    let mut edges = vec![0i64; 2 * n];
    for i in 0..2 * n {
        let r = uf.find(i);
        verts[r] += 1;
    }
    for &(a, _) in &links {
        let r = uf.find(a);
        edges[r] += 1;
    }
    let mut near_present = vec![false; 2 * n];
    for v in 0..n {
        let r = uf.find(v);
        near_present[r] = true;
    }
    let mut rank: Vec<usize> = (0..2 * n).map(|i| (edges[i] - verts[i] + 1).max(0) as usize).collect();
    let hnn = s.is_hnn();
    let mut ends = Vec::with_capacity(orbits.len());
    for &(_, v, _) in orbits {
        let near = uf.find(v);
        let far = uf.find(n + v);
        // for an HNN extension the far side is a vertex-group orbit only if
        // it reaches the near layer through a stable edge
        let far = if hnn && !near_present[far] {
            rank.push(0);
            rank.len() - 1
        } else {
            far
        };
        ends.push((near, far));
    }
    (rank, ends)
}

/// Strips leaves whose group equals the incident edge group.
fn prune_quotient(rank: &[usize], ends: &[(usize, usize)], orbits: &[(Option<usize>, usize, bool)]) -> Vec<ChainStatus> {
    let m = rank.len();
    let mut deg = vec![0usize; m];
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &(a, b)) in ends.iter().enumerate() {
        deg[a] += 1;
        deg[b] += 1;
        at[a].push(i);
        if a != b {
            at[b].push(i);
        }
    }
    let mut status = vec![ChainStatus::Essential; ends.len()];
    let mut alive = vec![true; ends.len()];
    let edge_rank = |i: usize| orbits[i].2 as usize;
    let mut queue: std::collections::VecDeque<usize> = (0..m).filter(|&x| deg[x] == 1).collect();
    while let Some(x) = queue.pop_front() {
        if deg[x] != 1 {
            continue;
        }
        let Some(&i) = at[x].iter().find(|&&i| alive[i]) else { continue };
        if rank[x] != edge_rank(i) {
            continue;
        }
        let (a, b) = ends[i];
        alive[i] = false;
        status[i] = if x == a { ChainStatus::AbsorbedFar } else { ChainStatus::AbsorbedNear };
        deg[a] -= 1;
        deg[b] -= 1;
        let y = if x == a { b } else { a };
        if deg[y] == 1 {
            queue.push_back(y);
        }
    }
    status
}

struct LocalRules {
    status: Vec<LocalStatus>,
    volume: usize,
    rounds: usize,
    reclassified: Vec<usize>,
}

/// The adjacency rules for chains, with nonessential chains' edges
/// reclassified until nothing changes.
fn local_rules(
    chains: &[Chain],
    adjacent: &[Vec<(usize, usize, Side)>],
    original: &[EdgeClass],
    incident: &[Vec<usize>],
    graph: &LabeledGraph,
    hnn: bool,
) -> LocalRules {
    let mut classes = original.to_vec();
    let mut status = vec![LocalStatus::Essential; chains.len()];
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for ((ch, adj), st) in chains.iter().zip(adjacent).zip(status.iter_mut()) {
            let is_cv = |v: usize| ch.chain_vertices.contains(&v);
            let (far, near) = if hnn {
                (
                    adj.iter().all(|&(e, v, side)| classes[e] == EdgeClass::Stable && side == Side::Out && is_cv(v)),
                    adj.iter().all(|&(e, _, side)| classes[e] == EdgeClass::A0 || side == Side::In),
                )
            } else {
                (
                    adj.iter().all(|&(e, v, _)| classes[e] == EdgeClass::B0 && is_cv(v)),
                    adj.iter().all(|&(e, _, _)| classes[e] == EdgeClass::A),
                )
            };
            *st = if far {
                LocalStatus::FarSideOnly
            } else if near {
                LocalStatus::NearSideOnly
            } else {
                LocalStatus::Essential
            };
            if *st != LocalStatus::FarSideOnly {
                continue;
            }
            if hnn {
                for &(e, _, side) in adj {
                    if side == Side::Out && classes[e] == EdgeClass::Stable {
                        classes[e] = EdgeClass::A0;
                        changed = true;
                    }
                }
            } else {
                for &e in &ch.image_edges {
                    if classes[e] != EdgeClass::B0 {
                        classes[e] = EdgeClass::B0;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let n = graph.num_vertices();
    let mut essential_cv = vec![false; n];
    let mut any_cv = vec![false; n];
    for (ch, st) in chains.iter().zip(&status) {
        for &v in &ch.chain_vertices {
            any_cv[v] = true;
            essential_cv[v] |= *st == LocalStatus::Essential;
        }
    }
    let touches = |v: usize, class: EdgeClass| incident[v].iter().any(|&e| classes[e] == class);
    let vertices = (0..n)
        .filter(|&v| {
            if hnn {
                !any_cv[v]
                    && incident[v].iter().any(|&e| classes[e] == EdgeClass::Stable && graph.edge(e).src == v)
            } else {
                !essential_cv[v] && touches(v, EdgeClass::A) && touches(v, EdgeClass::B0)
            }
        })
        .count();
    let sc = chains.iter().zip(&status).filter(|(c, st)| **st == LocalStatus::Essential && !c.closed).count();
    LocalRules {
        status,
        volume: sc + vertices,
        rounds,
        reclassified: (0..classes.len()).filter(|&e| classes[e] != original[e]).collect(),
    }
}
