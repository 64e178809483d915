//! Translation lengths computed directly in the Bass–Serre tree, by
//! enumerating the coset vertices visited by `g` and `g^2`.

use std::collections::{HashMap, VecDeque};

use freevol::splittings::{CyclicSplitting, SplittingKind};
use freevol::stallings::{Adjacency, LabeledGraph};
use freevol::words::{cyclically_reduce, Letter, Word};

/// Left cosets `xV` of a subgroup, keyed by reading `x^-1` into its
/// based Stallings graph as far as possible.
struct Cosets {
    adj: Adjacency,
    base: usize,
}

impl Cosets {
    fn new(rank: usize, gens: &[Word]) -> Self {
        let g = LabeledGraph::from_generators(rank, gens).fold(true);
        Cosets { adj: g.adjacency(), base: g.basepoint().unwrap() }
    }

    fn key(&self, x: &[Letter]) -> (usize, Vec<Letter>) {
        let inv: Vec<Letter> = x.iter().rev().map(|l| l.inverse()).collect();
        let (v, n) = self.adj.read_prefix(self.base, &inv);
        (v, inv[n..].to_vec())
    }
}

type Node = (usize, (usize, Vec<Letter>));

#[derive(Default)]
struct Tree {
    ids: HashMap<Node, usize>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    fn node(&mut self, n: Node) -> usize {
        if let Some(&i) = self.ids.get(&n) {
            return i;
        }
        let i = self.adj.len();
        self.ids.insert(n, i);
        self.adj.push(Vec::new());
        i
    }

    fn link(&mut self, a: usize, b: usize) {
        if a != b && !self.adj[a].contains(&b) {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
    }

    fn distances(&self, from: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.adj.len()];
        d[from] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    }
}

/// Translation length of `g` (ambient letters) in the tree of `s`.
pub fn translation_length(s: &CyclicSplitting, g: &Word) -> usize {
    let rel = s.to_relative(g);
    if rel.is_empty() {
        return 0;
    }
    let u = cyclically_reduce(&rel).0.word().clone();
    let u2: Vec<Letter> = u.letters().iter().chain(u.letters()).copied().collect();
    let k = s.rank();
    let groups = s.relative_vertex_groups();
    let cosets: Vec<Cosets> = groups.iter().map(|g| Cosets::new(k, g)).collect();
    let mut tree = Tree::default();
    let n = u.len();
    let (v0, v1, v2);
    match s.kind() {
        SplittingKind::Amalgam { a_part, .. } => {
            let ty = |l: Letter| if a_part.contains(&l.gen()) { 0 } else { 1 };
            let node = |t: usize, i: usize, tree: &mut Tree| tree.node((t, cosets[t].key(&u2[..i])));
            v0 = node(0, 0, &mut tree);
            let mut prev = v0;
            let mut marks = [0usize; 2];
            for i in 0..u2.len() {
                let t = ty(u2[i]);
                let cur = node(t, i, &mut tree);
                tree.link(prev, cur);
                prev = cur;
                if i + 1 == n || i + 1 == 2 * n {
                    let a = node(0, i + 1, &mut tree);
                    tree.link(prev, a);
                    marks[(i + 1) / n - 1] = a;
                }
            }
            v1 = marks[0];
            v2 = marks[1];
        }
        SplittingKind::Hnn { stable, .. } => {
            let node = |i: usize, tree: &mut Tree| tree.node((0, cosets[0].key(&u2[..i])));
            v0 = node(0, &mut tree);
            let mut prev = v0;
            let mut marks = [0usize; 2];
            for i in 0..u2.len() {
                let next = node(i + 1, &mut tree);
                if u2[i].gen() == *stable {
                    tree.link(prev, next);
                } else {
                    assert_eq!(prev, next, "vertex-group letter moved the coset");
                }
                prev = next;
                if i + 1 == n || i + 1 == 2 * n {
                    marks[(i + 1) / n - 1] = next;
                }
            }
            v1 = marks[0];
            v2 = marks[1];
        }
    }
    let d = tree.distances(v0);
    d[v2].saturating_sub(d[v1])
}

/// Independent check for amalgams: twice the number of maximal runs of
/// A-letters that are not powers of the edge word, when a B0 letter occurs.
pub fn syllable_length(s: &CyclicSplitting, g: &Word) -> Option<usize> {
    let SplittingKind::Amalgam { a_part, .. } = s.kind() else { return None };
    let rel = s.to_relative(g);
    if rel.is_empty() {
        return Some(0);
    }
    let u = cyclically_reduce(&rel).0.word().clone();
    let l = u.letters();
    let in_a = |x: &Letter| a_part.contains(&x.gen());
    let Some(start) = l.iter().position(|x| !in_a(x)) else { return Some(0) };
    let n = l.len();
    // rotate so the word starts with a B0 letter; then split into syllables
    let rot: Vec<Letter> = (0..n).map(|i| l[(start + i) % n]).collect();
    let c = s.edge_word();
    let mut syllables: Vec<(bool, Vec<Letter>)> = Vec::new();
    for &x in &rot {
        match syllables.last_mut() {
            Some((a, v)) if *a == in_a(&x) => v.push(x),
            _ => syllables.push((in_a(&x), vec![x])),
        }
    }
    // B-syllables: B0 runs together with adjacent c-powers. An A-run is
    // trivial in the syllable count when it is a power of c.
    let is_c_power = |v: &[Letter]| {
        let w = Word::reduce(v.iter().copied());
        (-(v.len() as i64)..=(v.len() as i64)).any(|k| c.pow(k) == w)
    };
    let count = syllables.iter().filter(|(a, v)| *a && !is_c_power(v)).count();
    Some(2 * count)
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
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Quotient of the minimal subtree by `H`: edge count and free volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quotient {
    pub edges: usize,
    pub free_edges: usize,
}

/// Builds the finite part of `H \ T` seen by the core graph of `H`, using
/// double cosets: vertex orbits are components of the vertex-group letters
/// in the Schreier graph, edge orbits are orbits of right multiplication by
/// the edge word. Hanging leaves whose group equals the edge group are then
/// pruned to reach the minimal subtree.
pub fn quotient(s: &CyclicSplitting, gens: &[Word]) -> Quotient {
    let rel: Vec<Word> = gens.iter().map(|g| s.to_relative(g)).collect();
    let core = freevol::stallings::core_of(s.rank(), &rel);
    let n = core.num_vertices();
    if core.num_edges() == 0 {
        return Quotient { edges: 0, free_edges: 0 };
    }
    let adj = core.adjacency();
    let c = s.edge_word().letters();
    let lift: Vec<Option<usize>> = (0..n).map(|u| adj.read(u, c)).collect();
    let mut orbit = UnionFind::new(n);
    for u in 0..n {
        if let Some(v) = lift[u] {
            orbit.union(u, v);
        }
    }
    let mut closed = vec![true; n];
    for u in 0..n {
        if lift[u].is_none() {
            let r = orbit.find(u);
            closed[r] = false;
        }
    }
    // group vertices: (rank); graph edges: (a, b, edge rank)
    let mut vertex_rank: Vec<i64>;
    let mut gedges: Vec<(usize, usize, usize)> = Vec::new();
    let comp_ranks = |uf: &mut UnionFind, nodes: usize, links: &[(usize, usize)]| {
        let mut v = vec![0i64; nodes];
        let mut e = vec![0i64; nodes];
        for i in 0..nodes {
            let r = uf.find(i);
            v[r] += 1;
        }
        for &(a, _) in links {
            let r = uf.find(a);
            e[r] += 1;
        }
        (0..nodes).map(|i| e[i] - v[i] + 1).collect::<Vec<i64>>()
    };
    match s.kind() {
        SplittingKind::Amalgam { a_part, .. } => {
            let mut a_links = Vec::new();
            let mut b_links = Vec::new();
            for e in core.edges() {
                if a_part.contains(&e.label) {
                    a_links.push((e.src, e.dst));
                } else {
                    b_links.push((e.src, e.dst));
                }
            }
            for u in 0..n {
                if let Some(v) = lift[u] {
                    b_links.push((u, v));
                }
            }
            let mut ua = UnionFind::new(n);
            let mut ub = UnionFind::new(n);
            for &(x, y) in &a_links {
                ua.union(x, y);
            }
            for &(x, y) in &b_links {
                ub.union(x, y);
            }
            let ra = comp_ranks(&mut ua, n, &a_links);
            let rb = comp_ranks(&mut ub, n, &b_links);
            // vertex ids: A-comps as 0..n, B-comps as n..2n
            vertex_rank = (0..2 * n).map(|i| if i < n { ra[i] } else { rb[i - n] }).collect();
            let mut present = vec![false; 2 * n];
            for u in 0..n {
                if orbit.find(u) == u {
                    let a = ua.find(u);
                    let b = n + ub.find(u);
                    present[a] = true;
                    present[b] = true;
                    gedges.push((a, b, closed[u] as usize));
                }
            }
            for i in 0..2 * n {
                if !present[i] {
                    vertex_rank[i] = -1;
                }
            }
        }
        SplittingKind::Hnn { stable, .. } => {
            // node p: coset point p on the vertex side; node n + q: point q on
            // the edge side, joined to p by a stable edge q -> p.
            let mut links = Vec::new();
            for e in core.edges() {
                if e.label == *stable {
                    links.push((n + e.src, e.dst));
                } else {
                    links.push((e.src, e.dst));
                }
            }
            for u in 0..n {
                if let Some(v) = lift[u] {
                    links.push((n + u, n + v));
                }
            }
            let mut uf = UnionFind::new(2 * n);
            for &(x, y) in &links {
                uf.union(x, y);
            }
            let ranks = comp_ranks(&mut uf, 2 * n, &links);
            let mut has_vertex_side = vec![false; 2 * n];
            for p in 0..n {
                let r = uf.find(p);
                has_vertex_side[r] = true;
            }
            vertex_rank = (0..2 * n).map(|i| if has_vertex_side[i] { ranks[i] } else { -1 }).collect();
            for u in 0..n {
                if orbit.find(u) == u {
                    let a = uf.find(u);
                    let far = uf.find(n + u);
                    let b = if has_vertex_side[far] {
                        far
                    } else {
                        vertex_rank.push(0);
                        vertex_rank.len() - 1
                    };
                    gedges.push((a, b, closed[u] as usize));
                }
            }
        }
    }
    // prune leaves whose vertex group equals the edge group
    let mut alive = vec![true; gedges.len()];
    loop {
        let mut deg = vec![0usize; vertex_rank.len()];
        for (i, &(a, b, _)) in gedges.iter().enumerate() {
            if alive[i] {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        let leaf = gedges.iter().enumerate().find(|&(i, &(a, b, r))| {
            alive[i]
                && a != b
                && ((deg[a] == 1 && vertex_rank[a] == r as i64) || (deg[b] == 1 && vertex_rank[b] == r as i64))
        });
        match leaf {
            Some((i, _)) => alive[i] = false,
            None => break,
        }
    }
    let live: Vec<_> = gedges.iter().zip(&alive).filter(|(_, a)| **a).map(|(e, _)| *e).collect();
    Quotient { edges: live.len(), free_edges: live.iter().filter(|e| e.2 == 0).count() }
}
