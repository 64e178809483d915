//! Reduced words, cyclic words and automorphisms of a free group `F_k`.
//!
//! Letters are written with lowercase names for generators and uppercase
//! names for their inverses. The identity prints as `1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stallings::LabeledGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {0:?}")]
    InvalidLetter(char),
    #[error("letter {letter:?} is outside a basis of rank {rank}")]
    OutOfRange { letter: char, rank: usize },
    #[error("rank {0} is not supported (1..=26)")]
    BadRank(usize),
    #[error("basis names must be distinct lowercase letters")]
    BadNames,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomorphismError {
    #[error("images do not form a basis: {0}")]
    NotAnAutomorphism(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
}

/// A signed generator. The encoding `2 * gen + inv` makes the derived order
/// `a < A < b < B < ...`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter((gen as u32) << 1 | inverse as u32)
    }
    pub fn gen(self) -> usize {
        (self.0 >> 1) as usize
    }
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
    /// Dense index in `0..2k`, following the letter order.
    pub fn index(self) -> usize {
        self.0 as usize
    }
    pub fn from_index(i: usize) -> Self {
        Letter(i as u32)
    }
    pub fn to_char(self) -> char {
        let c = (b'a' + self.gen() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
    pub fn from_char(c: char) -> Result<Self, WordError> {
        if c.is_ascii_lowercase() {
            Ok(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Ok(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            Err(WordError::InvalidLetter(c))
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Parses a word in the standard alphabet; `1` and the empty string give
    /// the identity.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity());
        }
        let letters = s.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>()?;
        Ok(Word::reduce(letters))
    }

    /// Parses and checks that every letter lies in a basis of rank `k`.
    pub fn parse_in_rank(s: &str, k: usize) -> Result<Self, WordError> {
        let w = Word::parse(s)?;
        if let Some(l) = w.0.iter().find(|l| l.gen() >= k) {
            return Err(WordError::OutOfRange { letter: l.to_char(), rank: k });
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }
    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }
    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Self {
        let c = self.cancellation(other);
        let mut v = Vec::with_capacity(self.len() + other.len() - 2 * c);
        v.extend_from_slice(&self.0[..self.len() - c]);
        v.extend_from_slice(&other.0[c..]);
        Word(v)
    }

    /// Number of letters cancelled in the product `self * other`.
    pub fn cancellation(&self, other: &Word) -> usize {
        self.0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count()
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let (core, conj) = cyclic_core(&base);
        let mut v = Vec::with_capacity(core.len() * n.unsigned_abs() as usize + 2 * conj.len());
        v.extend_from_slice(&conj.0);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&core.0);
        }
        v.extend(conj.inverse().0);
        Word::reduce(v)
    }

    pub fn conjugate_by(&self, g: &Word) -> Self {
        g.mul(self).mul(&g.inverse())
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen()).max()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n..].to_vec())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Splits `w = g * core * g^-1` with `core` cyclically reduced (not rotated).
fn cyclic_core(w: &Word) -> (Word, Word) {
    let n = w.len();
    let mut i = 0;
    while 2 * i + 1 < n && w.0[i] == w.0[n - 1 - i].inverse() {
        i += 1;
    }
    (Word(w.0[i..n - i].to_vec()), Word(w.0[..i].to_vec()))
}

/// A conjugacy class, stored as its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Word);

impl CyclicWord {
    /// The class of `w`.
    pub fn new(w: &Word) -> Self {
        cyclically_reduce(w).0
    }

    /// Assumes `letters` is reduced and cyclically reduced.
    fn from_core(core: &[Letter]) -> (Self, usize) {
        let r = least_rotation(core);
        let mut v = core[r..].to_vec();
        v.extend_from_slice(&core[..r]);
        (CyclicWord(Word(v)), r)
    }

    pub fn word(&self) -> &Word {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Minimal `p` with `w = r^p` for a primitive root `r`, as `(r, p)`.
    pub fn root(&self) -> (CyclicWord, usize) {
        let n = self.len();
        if n == 0 {
            return (self.clone(), 1);
        }
        let period = minimal_period(self.0.letters());
        let root = Word(self.0.letters()[..period].to_vec());
        (CyclicWord::new(&root), n / period)
    }

    pub fn inverse(&self) -> Self {
        CyclicWord::new(&self.0.inverse())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// Smallest period dividing the length, for a cyclic sequence.
fn minimal_period(v: &[Letter]) -> usize {
    let n = v.len();
    (1..=n)
        .filter(|p| n % p == 0)
        .find(|&p| (0..n).all(|i| v[i] == v[(i + p) % n]))
        .unwrap_or(n)
}

/// Start index of the lexicographically least rotation (two-pointer scan).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j) % n.max(1)
}

/// Returns the canonical cyclic word of `w` and a conjugator `g` with
/// `w = g * canonical * g^-1`.
pub fn cyclically_reduce(w: &Word) -> (CyclicWord, Word) {
    let (core, g) = cyclic_core(w);
    let (cw, r) = CyclicWord::from_core(core.letters());
    let conj = g.mul(&Word(core.0[..r].to_vec()));
    (cw, conj)
}

/// Whether the class of `w` is a proper power, and its exponent.
pub fn is_proper_power(c: &CyclicWord) -> (bool, usize) {
    let (_, p) = c.root();
    (p > 1, p)
}

/// All conjugacy classes of nontrivial elements of `F_k` with cyclic length
/// at most `max_len`, ordered by length and then lexicographically.
pub fn enumerate_cyclic_words(k: usize, max_len: usize) -> Vec<CyclicWord> {
    fn extend(k: usize, n: usize, cur: &mut Vec<Letter>, out: &mut Vec<CyclicWord>) {
        if cur.len() == n {
            let (first, last) = (cur[0], cur[n - 1]);
            if (n == 1 || first != last.inverse()) && least_rotation(cur) == 0 {
                out.push(CyclicWord(Word(cur.clone())));
            }
            return;
        }
        for i in 0..2 * k {
            let l = Letter::from_index(i);
            if cur.last() == Some(&l.inverse()) {
                continue;
            }
            // the first letter must be least among all letters used
            if !cur.is_empty() && l < cur[0] {
                continue;
            }
            cur.push(l);
            extend(k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_len {
        extend(k, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// A basis of `F_k` with lowercase display names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    names: Vec<char>,
}

impl Basis {
    pub fn standard(k: usize) -> Result<Self, WordError> {
        if k == 0 || k > 26 {
            return Err(WordError::BadRank(k));
        }
        Ok(Basis { names: (0..k).map(|i| (b'a' + i as u8) as char).collect() })
    }

    pub fn with_names(names: Vec<char>) -> Result<Self, WordError> {
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        if names.is_empty()
            || names.len() > 26
            || seen.len() != names.len()
            || !names.iter().all(|c| c.is_ascii_lowercase())
        {
            return Err(WordError::BadNames);
        }
        Ok(Basis { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn parse(&self, s: &str) -> Result<Word, WordError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity());
        }
        let mut v = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let lower = ch.to_ascii_lowercase();
            let gen = self
                .names
                .iter()
                .position(|&n| n == lower)
                .ok_or(WordError::OutOfRange { letter: ch, rank: self.rank() })?;
            if !ch.is_ascii_alphabetic() {
                return Err(WordError::InvalidLetter(ch));
            }
            v.push(Letter::new(gen, ch.is_ascii_uppercase()));
        }
        Ok(Word::reduce(v))
    }

    pub fn format(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|l| {
                let c = self.names[l.gen()];
                if l.is_inverse() {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }
}

/// An endomorphism of `F_k` given by generator images. Values built through
/// [`Automorphism::new`] are checked to be invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Automorphism {
    images: Vec<Word>,
}

impl Automorphism {
    pub fn identity(k: usize) -> Self {
        Automorphism { images: (0..k).map(|i| Word::letter(Letter::new(i, false))).collect() }
    }

    pub fn new(images: Vec<Word>) -> Result<Self, AutomorphismError> {
        let a = Automorphism { images };
        if !validate_automorphism(&a.images) {
            return Err(AutomorphismError::NotAnAutomorphism(
                "images do not fold to the rose".into(),
            ));
        }
        Ok(a)
    }

    /// Parses images such as `["b", "c", "ab"]`.
    pub fn parse(images: &[&str]) -> Result<Self, AutomorphismError> {
        let k = images.len();
        let words = images
            .iter()
            .map(|s| Word::parse_in_rank(s, k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AutomorphismError::NotAnAutomorphism(e.to_string()))?;
        Automorphism::new(words)
    }

    /// Builds without checking invertibility.
    pub fn from_images_unchecked(images: Vec<Word>) -> Self {
        Automorphism { images }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.gen()];
            if l.is_inverse() {
                for &x in img.letters().iter().rev() {
                    push_reduced(&mut out, x.inverse());
                }
            } else {
                for &x in img.letters() {
                    push_reduced(&mut out, x);
                }
            }
        }
        Word(out)
    }

    pub fn apply_cyclic(&self, c: &CyclicWord) -> CyclicWord {
        CyclicWord::new(&self.apply(c.word()))
    }

    /// `compose(f, g)` applies `g` first: `compose(f, g)(w) = f(g(w))`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism { images: other.images.iter().map(|w| self.apply(w)).collect() }
    }

    pub fn pow(&self, n: i64) -> Result<Automorphism, AutomorphismError> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut acc = Automorphism::identity(self.rank());
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc);
        }
        Ok(acc)
    }

    /// Inverse by greedy length-decreasing Nielsen reduction of the images.
    /// Lowest indices win ties. Falls back to labelled folding when the greedy
    /// descent stalls above total length `k`.
    pub fn invert(&self) -> Result<Automorphism, AutomorphismError> {
        match nielsen_inverse(&self.images) {
            Some(inv) => Ok(inv),
            None => folding_inverse(&self.images),
        }
    }

    /// Longest generator image.
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

fn push_reduced(out: &mut Vec<Letter>, x: Letter) {
    if out.last() == Some(&x.inverse()) {
        out.pop();
    } else {
        out.push(x);
    }
}

/// Whether `images` is a basis of `F_k`, by folding the rose of the images.
pub fn validate_automorphism(images: &[Word]) -> bool {
    let k = images.len();
    if k == 0 || images.iter().any(|w| w.is_empty() || w.max_gen().is_some_and(|g| g >= k)) {
        return false;
    }
    let g = LabeledGraph::from_generators(k, images).fold(true);
    g.num_vertices() == 1 && g.num_edges() == k
}

fn nielsen_inverse(images: &[Word]) -> Option<Automorphism> {
    let k = images.len();
    let mut u: Vec<Word> = images.to_vec();
    // track[i] is a word v with phi(v) = u[i]
    let mut track: Vec<Word> = (0..k).map(|i| Word::letter(Letter::new(i, false))).collect();
    loop {
        let total: usize = u.iter().map(|w| w.len()).sum();
        if total == k {
            break;
        }
        let mut best: Option<(usize, usize, usize, bool, bool)> = None;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                for inv in [false, true] {
                    let uj = if inv { u[j].inverse() } else { u[j].clone() };
                    for left in [false, true] {
                        let c = if left { uj.cancellation(&u[i]) } else { u[i].cancellation(&uj) };
                        let new_len = u[i].len() + uj.len() - 2 * c;
                        if new_len < u[i].len() {
                            let gain = u[i].len() - new_len;
                            if best.is_none_or(|b| gain > b.0) {
                                best = Some((gain, i, j, inv, left));
                            }
                        }
                    }
                }
            }
        }
        let (_, i, j, inv, left) = best?;
        let (uj, tj) = if inv {
            (u[j].inverse(), track[j].inverse())
        } else {
            (u[j].clone(), track[j].clone())
        };
        if left {
            u[i] = uj.mul(&u[i]);
            track[i] = tj.mul(&track[i]);
        } else {
            u[i] = u[i].mul(&uj);
            track[i] = track[i].mul(&tj);
        }
    }
    let mut inv = vec![Word::identity(); k];
    let mut seen = vec![false; k];
    for i in 0..k {
        let l = u[i].first()?;
        if seen[l.gen()] {
            return None;
        }
        seen[l.gen()] = true;
        inv[l.gen()] = if l.is_inverse() { track[i].inverse() } else { track[i].clone() };
    }
    Some(Automorphism { images: inv })
}

/// Inverse via folding the rose of images while carrying, for each edge, a
/// word in the formal image generators.
fn folding_inverse(images: &[Word]) -> Result<Automorphism, AutomorphismError> {
    let k = images.len();
    let bad = || AutomorphismError::NotAnAutomorphism("images do not form a basis".into());
    if images.iter().any(|w| w.is_empty() || w.max_gen().is_some_and(|g| g >= k)) {
        return Err(bad());
    }
    // edges: (src, dst, label, weight); vertex 0 is the base.
    let mut edges: Vec<Option<(usize, usize, usize, Word)>> = Vec::new();
    let mut nv = 1;
    for (i, w) in images.iter().enumerate() {
        let n = w.len();
        let mut prev = 0;
        for (p, &l) in w.letters().iter().enumerate() {
            let next = if p + 1 == n {
                0
            } else {
                nv += 1;
                nv - 1
            };
            let weight = if p == 0 { Word::letter(Letter::new(i, false)) } else { Word::identity() };
            let (s, d, wt) = if l.is_inverse() { (next, prev, weight.inverse()) } else { (prev, next, weight) };
            edges.push(Some((s, d, l.gen(), wt)));
            prev = next;
        }
    }
    loop {
        // find two live edges with the same label and direction at a vertex
        let mut found = None;
        'outer: for a in 0..edges.len() {
            let Some((sa, da, la, _)) = edges[a].clone() else { continue };
            for b in a + 1..edges.len() {
                let Some((sb, db, lb, _)) = edges[b].clone() else { continue };
                if la != lb {
                    continue;
                }
                if sa == sb {
                    found = Some((a, b, true));
                    break 'outer;
                }
                if da == db {
                    found = Some((a, b, false));
                    break 'outer;
                }
            }
        }
        let Some((a, b, out)) = found else { break };
        let (sa, da, _, wa) = edges[a].clone().unwrap();
        let (sb, db, _, wb) = edges[b].clone().unwrap();
        // far endpoints
        let (va, vb) = if out { (da, db) } else { (sa, sb) };
        if va == vb {
            if wa != wb {
                return Err(bad());
            }
            edges[b] = None;
            continue;
        }
        // gauge the far endpoint that is not the base so the weights agree
        let (keep, gone, wk, wg, gone_edge) =
            if vb != 0 { (va, vb, wa, wb, b) } else { (vb, va, wb, wa, a) };
        let h = if out { wk.inverse().mul(&wg) } else { wk.mul(&wg.inverse()) };
        let h_inv = h.inverse();
        for e in edges.iter_mut().flatten() {
            if e.0 == gone {
                e.3 = h.mul(&e.3);
            }
            if e.1 == gone {
                e.3 = e.3.mul(&h_inv);
            }
        }
        edges[gone_edge] = None;
        for e in edges.iter_mut().flatten() {
            if e.0 == gone {
                e.0 = keep;
            }
            if e.1 == gone {
                e.1 = keep;
            }
        }
    }
    let live: Vec<_> = edges.into_iter().flatten().collect();
    if live.len() != k || live.iter().any(|e| e.0 != 0 || e.1 != 0) {
        return Err(bad());
    }
    let mut inv = vec![Word::identity(); k];
    for (_, _, label, w) in live {
        // weight word is in formal generators y_i which stand for images
        inv[label] = w;
    }
    Ok(Automorphism { images: inv })
}
