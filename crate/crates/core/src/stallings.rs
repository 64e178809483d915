//! Labelled graphs, Stallings folding, pullbacks and canonical forms.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::words::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// A directed graph with edges labelled by generators `0..rank`. Reading an
/// edge backwards reads the inverse letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledGraph {
    rank: usize,
    num_vertices: usize,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FoldOp {
    /// Identify `removed` with `kept`; both leave (or both enter) `vertex`.
    Fold { vertex: usize, label: usize, outgoing: bool, kept: usize, removed: usize },
    /// Delete a hanging edge.
    Prune { edge: usize },
}

/// The fold and prune steps in the order they were applied. Vertex and edge
/// ids refer to the input graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldTrace {
    pub keep_basepoint: bool,
    pub ops: Vec<FoldOp>,
}

impl FoldTrace {
    /// Re-applies the recorded steps to `input`.
    pub fn replay(&self, input: &LabeledGraph) -> LabeledGraph {
        let mut f = Folder::new(input);
        for op in &self.ops {
            match *op {
                FoldOp::Fold { kept, removed, vertex, outgoing, .. } => {
                    f.fold_pair(vertex, outgoing, kept, removed)
                }
                FoldOp::Prune { edge } => f.kill(edge),
            }
        }
        f.finish(self.keep_basepoint)
    }
}

impl LabeledGraph {
    pub fn new(rank: usize) -> Self {
        LabeledGraph { rank, num_vertices: 0, edges: Vec::new(), basepoint: None }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, label: usize) -> usize {
        assert!(src < self.num_vertices && dst < self.num_vertices && label < self.rank);
        self.edges.push(Edge { src, dst, label });
        self.edges.len() - 1
    }

    /// Adds a path spelling `w` from `from` to `to`; `w` must be nonempty.
    /// Returns the traversal as `(edge, forward)` pairs.
    pub fn add_path(&mut self, from: usize, to: usize, w: &Word) -> Vec<(usize, bool)> {
        assert!(!w.is_empty(), "cannot add an empty path");
        let n = w.len();
        let mut prev = from;
        let mut out = Vec::with_capacity(n);
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == n { to } else { self.add_vertex() };
            let e = if l.is_inverse() {
                self.add_edge(next, prev, l.gen())
            } else {
                self.add_edge(prev, next, l.gen())
            };
            out.push((e, !l.is_inverse()));
            prev = next;
        }
        out
    }

    /// Reattaches edge `e`, keeping its label.
    pub fn set_endpoints(&mut self, e: usize, src: usize, dst: usize) {
        assert!(src < self.num_vertices && dst < self.num_vertices);
        self.edges[e].src = src;
        self.edges[e].dst = dst;
    }

    pub fn set_basepoint(&mut self, v: Option<usize>) {
        self.basepoint = v;
    }

    /// The wedge of loops spelling `gens`, based at vertex 0.
    pub fn from_generators(rank: usize, gens: &[Word]) -> Self {
        let mut g = LabeledGraph::new(rank);
        let base = g.add_vertex();
        g.basepoint = Some(base);
        for w in gens.iter().filter(|w| !w.is_empty()) {
            g.add_path(base, base, w);
        }
        g
    }

    /// The cycle spelling a cyclically reduced nonempty word.
    pub fn circle(rank: usize, w: &Word) -> Self {
        let mut g = LabeledGraph::new(rank);
        let v = g.add_vertex();
        g.add_path(v, v, w);
        g
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }
    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    /// Rank of the fundamental group, `E - V + 1` (0 for the empty graph).
    pub fn fundamental_rank(&self) -> usize {
        if self.num_vertices == 0 {
            0
        } else {
            (self.edges.len() + 1).saturating_sub(self.num_vertices)
        }
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vertices];
        for e in &self.edges {
            d[e.src] += 1;
            d[e.dst] += 1;
        }
        d
    }

    pub fn fold(&self, keep_basepoint: bool) -> LabeledGraph {
        self.fold_with_trace(keep_basepoint).0
    }

    /// Folds (lowest vertex first, then lowest label, outgoing before
    /// incoming) and prunes hanging trees. Without `keep_basepoint` the
    /// result is the core graph and carries no basepoint.
    pub fn fold_with_trace(&self, keep_basepoint: bool) -> (LabeledGraph, FoldTrace) {
        let mut f = Folder::new(self);
        let mut ops = Vec::new();
        while let Some(v) = f.pending.pop_first() {
            if f.find(v) != v {
                continue;
            }
            if let Some((label, outgoing, kept, removed)) = f.first_conflict(v) {
                ops.push(FoldOp::Fold { vertex: v, label, outgoing, kept, removed });
                f.fold_pair(v, outgoing, kept, removed);
            }
        }
        ops.extend(f.prune(keep_basepoint).into_iter().map(|edge| FoldOp::Prune { edge }));
        let g = f.finish(keep_basepoint);
        (g, FoldTrace { keep_basepoint, ops })
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    /// Membership test; needs a folded graph with a basepoint.
    pub fn contains(&self, w: &Word) -> bool {
        let Some(b) = self.basepoint else { return false };
        self.adjacency().read(b, w.letters()) == Some(b)
    }

    /// BFS normal form. Based graphs start at the basepoint; unbased ones take
    /// the least encoding over all start vertices. Intended for folded,
    /// connected graphs.
    pub fn canonical_form(&self) -> CanonicalForm {
        let adj = self.adjacency();
        if let Some(b) = self.basepoint {
            let mut cf = self.encode_from(&adj, b);
            cf.based = true;
            return cf;
        }
        (0..self.num_vertices)
            .map(|v| self.encode_from(&adj, v))
            .min()
            .unwrap_or(CanonicalForm { num_vertices: 0, edges: Vec::new(), based: false })
    }

    fn encode_from(&self, adj: &Adjacency, start: usize) -> CanonicalForm {
        let mut order = vec![usize::MAX; self.num_vertices];
        let mut queue = VecDeque::new();
        let mut next = 0;
        order[start] = 0;
        next += 1;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for label in 0..self.rank {
                for outgoing in [true, false] {
                    let nb = if outgoing { adj.out(v, label) } else { adj.inc(v, label) };
                    if let Some((_, w)) = nb {
                        if order[w] == usize::MAX {
                            order[w] = next;
                            next += 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        let mut edges: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .filter(|e| order[e.src] != usize::MAX)
            .map(|e| (order[e.src], order[e.dst], e.label))
            .collect();
        edges.sort_unstable();
        CanonicalForm { num_vertices: next, edges, based: false }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  rankdir=LR;\n");
        for v in 0..self.num_vertices {
            let shape = if Some(v) == self.basepoint { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {v} [shape={shape}];");
        }
        for e in &self.edges {
            let l = Letter::new(e.label, false);
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", e.src, e.dst, l);
        }
        s.push_str("}\n");
        s
    }
}

/// Output of [`LabeledGraph::canonical_form`]; equal forms mean isomorphic
/// labelled graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalForm {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, usize)>,
    pub based: bool,
}

/// Outgoing and incoming edge per `(vertex, label)` in a folded graph.
#[derive(Clone, Debug)]
pub struct Adjacency {
    rank: usize,
    out: Vec<Option<(usize, usize)>>,
    inc: Vec<Option<(usize, usize)>>,
}

impl Adjacency {
    fn new(g: &LabeledGraph) -> Self {
        let k = g.rank.max(1);
        let mut out = vec![None; g.num_vertices * k];
        let mut inc = vec![None; g.num_vertices * k];
        for (i, e) in g.edges.iter().enumerate() {
            out[e.src * k + e.label].get_or_insert((i, e.dst));
            inc[e.dst * k + e.label].get_or_insert((i, e.src));
        }
        Adjacency { rank: k, out, inc }
    }

    pub fn out(&self, v: usize, label: usize) -> Option<(usize, usize)> {
        self.out[v * self.rank + label]
    }

    pub fn inc(&self, v: usize, label: usize) -> Option<(usize, usize)> {
        self.inc[v * self.rank + label]
    }

    /// The edge read by letter `l` at `v`, with its far endpoint.
    pub fn step(&self, v: usize, l: Letter) -> Option<(usize, usize)> {
        if l.is_inverse() {
            self.inc(v, l.gen())
        } else {
            self.out(v, l.gen())
        }
    }

    pub fn read(&self, v: usize, letters: &[Letter]) -> Option<usize> {
        letters.iter().try_fold(v, |u, &l| self.step(u, l).map(|(_, w)| w))
    }

    /// Reads as far as possible; returns the vertex reached and how many
    /// letters were read.
    pub fn read_prefix(&self, v: usize, letters: &[Letter]) -> (usize, usize) {
        let mut u = v;
        for (i, &l) in letters.iter().enumerate() {
            match self.step(u, l) {
                Some((_, w)) => u = w,
                None => return (u, i),
            }
        }
        (u, letters.len())
    }
}

struct Folder {
    rank: usize,
    parent: Vec<usize>,
    edges: Vec<Edge>,
    alive: Vec<bool>,
    incident: Vec<Vec<usize>>,
    pending: BTreeSet<usize>,
    basepoint: Option<usize>,
}

impl Folder {
    fn new(g: &LabeledGraph) -> Self {
        let mut incident = vec![Vec::new(); g.num_vertices];
        for (i, e) in g.edges.iter().enumerate() {
            incident[e.src].push(i);
            if e.dst != e.src {
                incident[e.dst].push(i);
            }
        }
        Folder {
            rank: g.rank,
            parent: (0..g.num_vertices).collect(),
            edges: g.edges.clone(),
            alive: vec![true; g.edges.len()],
            incident,
            pending: (0..g.num_vertices).collect(),
            basepoint: g.basepoint,
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = v;
        while self.parent[x] != r {
            let nx = self.parent[x];
            self.parent[x] = r;
            x = nx;
        }
        r
    }

    fn kill(&mut self, e: usize) {
        self.alive[e] = false;
    }

    /// Lowest `(label, direction)` at `v` carried by two live edges.
    fn first_conflict(&mut self, v: usize) -> Option<(usize, bool, usize, usize)> {
        let mut list = std::mem::take(&mut self.incident[v]);
        list.retain(|&e| self.alive[e]);
        list.sort_unstable();
        list.dedup();
        let mut slots: BTreeMap<(usize, bool), Vec<usize>> = BTreeMap::new();
        for &e in &list {
            let Edge { src, dst, label } = self.edges[e];
            if self.find(src) == v {
                slots.entry((label, false)).or_default().push(e);
            }
            if self.find(dst) == v {
                slots.entry((label, true)).or_default().push(e);
            }
        }
        self.incident[v] = list;
        // key (label, false) = outgoing sorts before incoming
        slots
            .into_iter()
            .find(|(_, es)| es.len() > 1)
            .map(|((label, incoming), es)| (label, !incoming, es[0], es[1]))
    }

    fn fold_pair(&mut self, v: usize, outgoing: bool, kept: usize, removed: usize) {
        let far = |f: &mut Folder, e: usize| {
            let Edge { src, dst, .. } = f.edges[e];
            if outgoing {
                f.find(dst)
            } else {
                f.find(src)
            }
        };
        let w1 = far(self, kept);
        let w2 = far(self, removed);
        self.kill(removed);
        let v = self.find(v);
        self.pending.insert(v);
        if w1 != w2 {
            let (keep, gone) = (w1.min(w2), w1.max(w2));
            self.parent[gone] = keep;
            let moved = std::mem::take(&mut self.incident[gone]);
            self.incident[keep].extend(moved);
            self.pending.insert(keep);
        }
    }

    /// Removes hanging edges; returns them in removal order.
    fn prune(&mut self, keep_basepoint: bool) -> Vec<usize> {
        let n = self.parent.len();
        let mut deg = vec![0usize; n];
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in 0..self.edges.len() {
            if !self.alive[e] {
                continue;
            }
            let s = self.find(self.edges[e].src);
            let d = self.find(self.edges[e].dst);
            deg[s] += 1;
            deg[d] += 1;
            inc[s].push(e);
            if d != s {
                inc[d].push(e);
            }
        }
        let base = if keep_basepoint { self.basepoint.map(|b| self.find(b)) } else { None };
        let mut queue: BTreeSet<usize> =
            (0..n).filter(|&v| deg[v] == 1 && Some(v) != base).collect();
        let mut removed = Vec::new();
        while let Some(v) = queue.pop_first() {
            let Some(&e) = inc[v].iter().find(|&&e| self.alive[e]) else { continue };
            self.kill(e);
            removed.push(e);
            deg[v] -= 1;
            let s = self.find(self.edges[e].src);
            let d = self.find(self.edges[e].dst);
            let w = if s == v { d } else { s };
            deg[w] -= 1;
            if deg[w] == 1 && Some(w) != base {
                queue.insert(w);
            }
        }
        removed
    }

    fn finish(mut self, keep_basepoint: bool) -> LabeledGraph {
        let n = self.parent.len();
        let mut used = vec![false; n];
        for e in 0..self.edges.len() {
            if self.alive[e] {
                let s = self.find(self.edges[e].src);
                let d = self.find(self.edges[e].dst);
                used[s] = true;
                used[d] = true;
            }
        }
        let base = if keep_basepoint { self.basepoint.map(|b| self.find(b)) } else { None };
        if let Some(b) = base {
            used[b] = true;
        }
        let mut id = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            if used[v] {
                id[v] = count;
                count += 1;
            }
        }
        let mut g = LabeledGraph::new(self.rank);
        g.num_vertices = count;
        for e in 0..self.edges.len() {
            if self.alive[e] {
                let s = self.find(self.edges[e].src);
                let d = self.find(self.edges[e].dst);
                g.edges.push(Edge { src: id[s], dst: id[d], label: self.edges[e].label });
            }
        }
        g.basepoint = base.map(|b| id[b]);
        g
    }
}

/// One connected component of a pullback, cored.
#[derive(Clone, Debug, Serialize)]
pub struct PullbackComponent {
    pub rank: usize,
    pub core: LabeledGraph,
    /// Contains some pair `(v, v)`; only meaningful for self-pullbacks.
    pub diagonal: bool,
}

/// Connected components of the fibre product of two folded graphs that
/// contain at least one edge. Components are enumerated lazily from pairs of
/// equally labelled edges, so conjugate intersections are all found.
pub fn pullback(g1: &LabeledGraph, g2: &LabeledGraph) -> Vec<PullbackComponent> {
    let k = g1.rank.max(g2.rank);
    let a1 = g1.adjacency();
    let a2 = g2.adjacency();
    let mut by_label2: Vec<Vec<&Edge>> = vec![Vec::new(); k];
    for e in &g2.edges {
        by_label2[e.label].push(e);
    }
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut comps = Vec::new();
    for e1 in &g1.edges {
        for e2 in &by_label2[e1.label] {
            let seed = (e1.src, e2.src);
            if seen.contains_key(&seed) {
                continue;
            }
            let mut graph = LabeledGraph::new(k);
            let mut queue = VecDeque::new();
            let mut diagonal = false;
            let v0 = graph.add_vertex();
            seen.insert(seed, v0);
            let mut local: HashMap<(usize, usize), usize> = HashMap::new();
            local.insert(seed, v0);
            queue.push_back(seed);
            while let Some((u1, u2)) = queue.pop_front() {
                diagonal |= u1 == u2;
                let here = local[&(u1, u2)];
                for label in 0..k {
                    let (Some((_, w1)), Some((_, w2))) = (
                        if label < g1.rank { a1.out(u1, label) } else { None },
                        if label < g2.rank { a2.out(u2, label) } else { None },
                    ) else {
                        continue;
                    };
                    let there = match local.get(&(w1, w2)) {
                        Some(&t) => t,
                        None => {
                            let t = graph.add_vertex();
                            local.insert((w1, w2), t);
                            seen.insert((w1, w2), t);
                            queue.push_back((w1, w2));
                            t
                        }
                    };
                    graph.add_edge(here, there, label);
                }
                for label in 0..k {
                    let (Some((_, w1)), Some((_, w2))) = (
                        if label < g1.rank { a1.inc(u1, label) } else { None },
                        if label < g2.rank { a2.inc(u2, label) } else { None },
                    ) else {
                        continue;
                    };
                    if !local.contains_key(&(w1, w2)) {
                        let t = graph.add_vertex();
                        local.insert((w1, w2), t);
                        seen.insert((w1, w2), t);
                        queue.push_back((w1, w2));
                    }
                }
            }
            let rank = graph.fundamental_rank();
            comps.push(PullbackComponent { rank, core: graph.fold(false), diagonal });
        }
    }
    comps
}

/// A folded core graph carries a malnormal subgroup iff every non-diagonal
/// component of its self-pullback is a tree.
pub fn is_malnormal(core: &LabeledGraph) -> bool {
    pullback(core, core).iter().all(|c| c.diagonal || c.rank == 0)
}

/// Folded core of the subgroup generated by `gens`, without basepoint.
pub fn core_of(rank: usize, gens: &[Word]) -> LabeledGraph {
    LabeledGraph::from_generators(rank, gens).fold(false)
}
