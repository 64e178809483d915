//! One-edge cyclic splittings of `F_k`, given by a relative basis.
//!
//! A splitting is described in relative letters: relative generator `i`
//! stands for the ambient word `relative_basis[i]`. Indices in JSON are
//! 1-based; in memory they are 0-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{is_proper_power, Automorphism, CyclicWord, Letter, Word};

pub const SCHEMA: &str = "freevol/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindSpec {
    Amalgam { a_part: Vec<usize>, b0_part: Vec<usize> },
    Hnn { a0_part: Vec<usize>, stable_letter: usize },
}

/// Serialized form of a splitting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingSpec {
    #[serde(default = "schema_tag")]
    pub schema: String,
    pub rank: usize,
    pub relative_basis: Vec<String>,
    #[serde(flatten)]
    pub kind: KindSpec,
    /// Written in relative letters.
    pub edge_word: String,
}

fn schema_tag() -> String {
    SCHEMA.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Diagnostic {
    UnsupportedSchema { found: String },
    BadWord { index: usize, message: String },
    NotABasis { message: String },
    IndexOutOfRange { index: usize },
    DuplicateIndex { index: usize },
    MissingIndex { index: usize },
    EmptyVertexPart,
    EdgeWordEmpty,
    EdgeWordOutsideVertexGroup { letter: String },
    EdgeWordNotCyclicallyReduced,
    EdgeWordProperPower { exponent: usize },
    EdgeGroupIsVertexGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub schema: &'static str,
    pub valid: bool,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum SplittingError {
    #[error("invalid splitting: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("rank mismatch between splitting ({splitting}) and automorphism ({automorphism})")]
    RankMismatch { splitting: usize, automorphism: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplittingKind {
    /// `A *_<c> B` with `A = <a_part>` and `B = <c, b0_part>`.
    Amalgam { a_part: Vec<usize>, b0_part: Vec<usize> },
    /// `A *_<c>` with `A = <a0_part, t^-1 c t>` and stable letter `t`.
    Hnn { a0_part: Vec<usize>, stable: usize },
}

/// Role of a relative letter, used to tag graph edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    A,
    B0,
    A0,
    Stable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSplitting {
    relative_basis: Vec<Word>,
    kind: SplittingKind,
    edge_word: Word,
    rel: Automorphism,
    rel_inv: Automorphism,
}

/// Checks a serialized splitting and lists every problem found.
pub fn validate(spec: &SplittingSpec) -> ValidationReport {
    let diagnostics = match parse_spec(spec) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    };
    ValidationReport { schema: SCHEMA, valid: diagnostics.is_empty(), diagnostics }
}

fn parse_spec(spec: &SplittingSpec) -> Result<CyclicSplitting, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    if spec.schema != SCHEMA {
        diags.push(Diagnostic::UnsupportedSchema { found: spec.schema.clone() });
    }
    let k = spec.rank;
    let mut basis = Vec::new();
    for (i, s) in spec.relative_basis.iter().enumerate() {
        match Word::parse_in_rank(s, k) {
            Ok(w) => basis.push(w),
            Err(e) => diags.push(Diagnostic::BadWord { index: i + 1, message: e.to_string() }),
        }
    }
    let edge = match Word::parse_in_rank(&spec.edge_word, k) {
        Ok(w) => Some(w),
        Err(e) => {
            diags.push(Diagnostic::BadWord { index: 0, message: e.to_string() });
            None
        }
    };
    let check_index = |i: usize, d: &mut Vec<Diagnostic>| {
        if i == 0 || i > k {
            d.push(Diagnostic::IndexOutOfRange { index: i });
            None
        } else {
            Some(i - 1)
        }
    };
    let kind = match &spec.kind {
        KindSpec::Amalgam { a_part, b0_part } => {
            let a: Vec<usize> = a_part.iter().filter_map(|&i| check_index(i, &mut diags)).collect();
            let b: Vec<usize> = b0_part.iter().filter_map(|&i| check_index(i, &mut diags)).collect();
            if a.is_empty() || b.is_empty() {
                diags.push(Diagnostic::EmptyVertexPart);
            }
            check_partition(k, a.iter().chain(&b).copied(), &mut diags);
            SplittingKind::Amalgam { a_part: a, b0_part: b }
        }
        KindSpec::Hnn { a0_part, stable_letter } => {
            let a: Vec<usize> = a0_part.iter().filter_map(|&i| check_index(i, &mut diags)).collect();
            let t = check_index(*stable_letter, &mut diags);
            check_partition(k, a.iter().copied().chain(t), &mut diags);
            SplittingKind::Hnn { a0_part: a, stable: t.unwrap_or(0) }
        }
    };
    if basis.len() != k {
        diags.push(Diagnostic::NotABasis {
            message: format!("expected {k} words, found {}", spec.relative_basis.len()),
        });
    }
    let rel = if basis.len() == k && k > 0 { Automorphism::new(basis.clone()).ok() } else { None };
    if rel.is_none() && basis.len() == k {
        diags.push(Diagnostic::NotABasis { message: "relative basis does not fold to the rose".into() });
    }
    if let Some(c) = &edge {
        check_edge_word(&kind, c, &mut diags);
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let rel = rel.expect("checked above");
    let rel_inv = rel.invert().map_err(|e| vec![Diagnostic::NotABasis { message: e.to_string() }])?;
    Ok(CyclicSplitting { relative_basis: basis, kind, edge_word: edge.expect("checked above"), rel, rel_inv })
}

fn check_partition(k: usize, idx: impl Iterator<Item = usize>, diags: &mut Vec<Diagnostic>) {
    let mut seen = vec![false; k];
    for i in idx {
        if seen[i] {
            diags.push(Diagnostic::DuplicateIndex { index: i + 1 });
        }
        seen[i] = true;
    }
    for (i, s) in seen.iter().enumerate() {
        if !s {
            diags.push(Diagnostic::MissingIndex { index: i + 1 });
        }
    }
}

fn check_edge_word(kind: &SplittingKind, c: &Word, diags: &mut Vec<Diagnostic>) {
    if c.is_empty() {
        diags.push(Diagnostic::EdgeWordEmpty);
        return;
    }
    let part = match kind {
        SplittingKind::Amalgam { a_part, .. } => a_part,
        SplittingKind::Hnn { a0_part, .. } => a0_part,
    };
    if let Some(l) = c.letters().iter().find(|l| !part.contains(&l.gen())) {
        diags.push(Diagnostic::EdgeWordOutsideVertexGroup { letter: l.to_string() });
    }
    if !c.is_cyclically_reduced() {
        diags.push(Diagnostic::EdgeWordNotCyclicallyReduced);
    }
    let (power, exponent) = is_proper_power(&CyclicWord::new(c));
    if power {
        diags.push(Diagnostic::EdgeWordProperPower { exponent });
    }
    if let SplittingKind::Amalgam { a_part, .. } = kind {
        if a_part.len() == 1 && c.len() == 1 {
            diags.push(Diagnostic::EdgeGroupIsVertexGroup);
        }
    }
}

impl CyclicSplitting {
    pub fn from_spec(spec: &SplittingSpec) -> Result<Self, SplittingError> {
        parse_spec(spec).map_err(SplittingError::Invalid)
    }

    pub fn from_json(s: &str) -> Result<Self, Box<dyn std::error::Error>> {
        let spec: SplittingSpec = serde_json::from_str(s)?;
        Ok(CyclicSplitting::from_spec(&spec)?)
    }

    /// Amalgam with relative basis given by ambient words (0-based parts).
    pub fn amalgam(
        relative_basis: &[&str],
        a_part: &[usize],
        b0_part: &[usize],
        edge_word: &str,
    ) -> Result<Self, SplittingError> {
        let spec = SplittingSpec {
            schema: SCHEMA.into(),
            rank: relative_basis.len(),
            relative_basis: relative_basis.iter().map(|s| s.to_string()).collect(),
            kind: KindSpec::Amalgam {
                a_part: a_part.iter().map(|i| i + 1).collect(),
                b0_part: b0_part.iter().map(|i| i + 1).collect(),
            },
            edge_word: edge_word.into(),
        };
        Self::from_spec(&spec)
    }

    /// HNN extension with relative basis given by ambient words (0-based).
    pub fn hnn(
        relative_basis: &[&str],
        a0_part: &[usize],
        stable: usize,
        edge_word: &str,
    ) -> Result<Self, SplittingError> {
        let spec = SplittingSpec {
            schema: SCHEMA.into(),
            rank: relative_basis.len(),
            relative_basis: relative_basis.iter().map(|s| s.to_string()).collect(),
            kind: KindSpec::Hnn {
                a0_part: a0_part.iter().map(|i| i + 1).collect(),
                stable_letter: stable + 1,
            },
            edge_word: edge_word.into(),
        };
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> SplittingSpec {
        SplittingSpec {
            schema: SCHEMA.into(),
            rank: self.rank(),
            relative_basis: self.relative_basis.iter().map(|w| w.to_string()).collect(),
            kind: match &self.kind {
                SplittingKind::Amalgam { a_part, b0_part } => KindSpec::Amalgam {
                    a_part: a_part.iter().map(|i| i + 1).collect(),
                    b0_part: b0_part.iter().map(|i| i + 1).collect(),
                },
                SplittingKind::Hnn { a0_part, stable } => KindSpec::Hnn {
                    a0_part: a0_part.iter().map(|i| i + 1).collect(),
                    stable_letter: stable + 1,
                },
            },
            edge_word: self.edge_word.to_string(),
        }
    }

    pub fn rank(&self) -> usize {
        self.relative_basis.len()
    }
    pub fn relative_basis(&self) -> &[Word] {
        &self.relative_basis
    }
    pub fn kind(&self) -> &SplittingKind {
        &self.kind
    }
    pub fn is_hnn(&self) -> bool {
        matches!(self.kind, SplittingKind::Hnn { .. })
    }
    /// Edge word in relative letters.
    pub fn edge_word(&self) -> &Word {
        &self.edge_word
    }
    pub fn ambient_edge_word(&self) -> Word {
        self.to_ambient(&self.edge_word)
    }
    /// Relative letter `i` maps to `relative_basis[i]`.
    pub fn marking(&self) -> &Automorphism {
        &self.rel
    }
    pub fn marking_inverse(&self) -> &Automorphism {
        &self.rel_inv
    }

    pub fn to_relative(&self, w: &Word) -> Word {
        self.rel_inv.apply(w)
    }
    pub fn to_ambient(&self, w: &Word) -> Word {
        self.rel.apply(w)
    }

    pub fn edge_class(&self, label: usize) -> EdgeClass {
        match &self.kind {
            SplittingKind::Amalgam { a_part, .. } => {
                if a_part.contains(&label) {
                    EdgeClass::A
                } else {
                    EdgeClass::B0
                }
            }
            SplittingKind::Hnn { stable, .. } => {
                if label == *stable {
                    EdgeClass::Stable
                } else {
                    EdgeClass::A0
                }
            }
        }
    }

    /// Generators of the vertex groups, in relative letters.
    pub fn relative_vertex_groups(&self) -> Vec<Vec<Word>> {
        let gen = |i: usize| Word::letter(Letter::new(i, false));
        match &self.kind {
            SplittingKind::Amalgam { a_part, b0_part } => {
                let a = a_part.iter().map(|&i| gen(i)).collect();
                let mut b = vec![self.edge_word.clone()];
                b.extend(b0_part.iter().map(|&i| gen(i)));
                vec![a, b]
            }
            SplittingKind::Hnn { a0_part, stable } => {
                let mut a: Vec<Word> = a0_part.iter().map(|&i| gen(i)).collect();
                let t = gen(*stable);
                a.push(t.inverse().mul(&self.edge_word).mul(&t));
                vec![a]
            }
        }
    }

    /// Generators of the vertex groups, in ambient letters.
    pub fn vertex_groups(&self) -> Vec<Vec<Word>> {
        self.relative_vertex_groups()
            .into_iter()
            .map(|g| g.iter().map(|w| self.to_ambient(w)).collect())
            .collect()
    }

    /// `n`-th power of the twist in relative coordinates.
    pub fn relative_twist_power(&self, n: i64) -> Automorphism {
        let k = self.rank();
        let cn = self.edge_word.pow(n);
        let images = (0..k)
            .map(|i| {
                let x = Word::letter(Letter::new(i, false));
                match &self.kind {
                    SplittingKind::Amalgam { b0_part, .. } if b0_part.contains(&i) => x.conjugate_by(&cn),
                    SplittingKind::Hnn { stable, .. } if *stable == i => cn.mul(&x),
                    _ => x,
                }
            })
            .collect();
        Automorphism::from_images_unchecked(images)
    }

    /// The Dehn twist, in ambient letters.
    pub fn dehn_twist(&self) -> Automorphism {
        self.dehn_twist_power(1)
    }

    pub fn dehn_twist_power(&self, n: i64) -> Automorphism {
        self.rel.compose(&self.relative_twist_power(n)).compose(&self.rel_inv)
    }

    /// Same tree with every relative basis element conjugated: `x -> g x g^-1`.
    pub fn conjugate(&self, g: &Word) -> CyclicSplitting {
        let k = self.rank();
        let inner = |h: &Word| {
            Automorphism::from_images_unchecked(
                (0..k).map(|i| Word::letter(Letter::new(i, false)).conjugate_by(h)).collect(),
            )
        };
        let rel = inner(g).compose(&self.rel);
        let rel_inv = self.rel_inv.compose(&inner(&g.inverse()));
        CyclicSplitting {
            relative_basis: rel.images().to_vec(),
            kind: self.kind.clone(),
            edge_word: self.edge_word.clone(),
            rel,
            rel_inv,
        }
    }

    /// The splitting `T phi`, whose length function is `g -> l_T(phi(g))`.
    pub fn transform(&self, phi: &Automorphism) -> Result<CyclicSplitting, SplittingError> {
        if phi.rank() != self.rank() {
            return Err(SplittingError::RankMismatch { splitting: self.rank(), automorphism: phi.rank() });
        }
        let inv = phi.invert().map_err(|e| {
            SplittingError::Invalid(vec![Diagnostic::NotABasis { message: e.to_string() }])
        })?;
        let rel = inv.compose(&self.rel);
        let rel_inv = self.rel_inv.compose(phi);
        Ok(CyclicSplitting {
            relative_basis: rel.images().to_vec(),
            kind: self.kind.clone(),
            edge_word: self.edge_word.clone(),
            rel,
            rel_inv,
        })
    }
}

/// Two splittings of the same free group.
#[derive(Clone, Debug)]
pub struct SplittingPair {
    pub t1: CyclicSplitting,
    pub t2: CyclicSplitting,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairSpec {
    #[serde(default = "schema_tag")]
    pub schema: String,
    pub t1: SplittingSpec,
    pub t2: SplittingSpec,
}

impl SplittingPair {
    pub fn new(t1: CyclicSplitting, t2: CyclicSplitting) -> Result<Self, SplittingError> {
        if t1.rank() != t2.rank() {
            return Err(SplittingError::RankMismatch { splitting: t1.rank(), automorphism: t2.rank() });
        }
        Ok(SplittingPair { t1, t2 })
    }

    pub fn from_spec(spec: &PairSpec) -> Result<Self, SplittingError> {
        if spec.schema != SCHEMA {
            return Err(SplittingError::Invalid(vec![Diagnostic::UnsupportedSchema {
                found: spec.schema.clone(),
            }]));
        }
        Self::new(CyclicSplitting::from_spec(&spec.t1)?, CyclicSplitting::from_spec(&spec.t2)?)
    }

    pub fn to_spec(&self) -> PairSpec {
        PairSpec { schema: SCHEMA.into(), t1: self.t1.to_spec(), t2: self.t2.to_spec() }
    }

    pub fn rank(&self) -> usize {
        self.t1.rank()
    }

    pub fn swapped(&self) -> SplittingPair {
        SplittingPair { t1: self.t2.clone(), t2: self.t1.clone() }
    }

    pub fn get(&self, i: usize) -> &CyclicSplitting {
        if i == 1 {
            &self.t1
        } else {
            &self.t2
        }
    }
}
