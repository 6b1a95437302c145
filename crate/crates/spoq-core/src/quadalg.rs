//! Free graded associative algebras, finitely presented quotients, exact
//! membership in bounded pieces of two-sided ideals, quotient dimensions
//! and rewriting systems for normal forms.
//!
//! Ideal pieces are computed block by block. Every generator carries a
//! weight vector; when all relations are weight-homogeneous the ideal
//! splits into weight blocks, and when they are also Z-homogeneous it
//! splits further by degree. A block at degree d is spanned by the
//! relations living there plus g·B and B·g for blocks B at degree d−1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::linalg::{add_into, Echelon, SparseVec};
use crate::qscalars::{rational_string, RationalFunction, Scalar, ScalarError};

pub type Word = Vec<u16>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("relation {0} is not Z2-homogeneous")]
    InhomogeneousRelation(usize),
    #[error("degree bound {bound} is below the degree {degree} of the element")]
    DegreeBound { bound: usize, degree: usize },
    #[error("relation {0} cannot be oriented (its leading word is the empty word)")]
    NonOrientable(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: u8,
    pub weight: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenAlphabet {
    gens: Vec<Generator>,
    by_name: HashMap<String, u16>,
}

impl GenAlphabet {
    pub fn new(gens: Vec<Generator>) -> Self {
        let by_name: HashMap<String, u16> = gens.iter().enumerate().map(|(k, g)| (g.name.clone(), k as u16)).collect();
        assert_eq!(by_name.len(), gens.len(), "generator names must be unique");
        GenAlphabet { gens, by_name }
    }
    pub fn len(&self) -> usize {
        self.gens.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
    pub fn get(&self, g: u16) -> &Generator {
        &self.gens[g as usize]
    }
    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }
    pub fn index(&self, name: &str) -> Option<u16> {
        self.by_name.get(name).copied()
    }
    pub fn word_parity(&self, w: &[u16]) -> u8 {
        w.iter().fold(0, |p, &g| p ^ self.gens[g as usize].parity)
    }
    pub fn word_weight(&self, w: &[u16]) -> Vec<i32> {
        let dim = self.gens.first().map_or(0, |g| g.weight.len());
        let mut acc = vec![0; dim];
        for &g in w {
            for (a, b) in acc.iter_mut().zip(self.gens[g as usize].weight.iter()) {
                *a += b;
            }
        }
        acc
    }
    pub fn word_string(&self, w: &[u16]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&g| self.gens[g as usize].name.as_str()).collect::<Vec<_>>().join(" ")
    }
    /// Parse a space-separated word of generator names.
    pub fn parse_word(&self, s: &str) -> Result<Word, QuadError> {
        s.split_whitespace()
            .map(|t| self.index(t).ok_or_else(|| QuadError::UnknownGenerator(t.to_string())))
            .collect()
    }
    /// Same alphabet with all weights removed (used when relations are not weight-homogeneous).
    fn unweighted(&self) -> Self {
        GenAlphabet::new(self.gens.iter().map(|g| Generator { weight: vec![], ..g.clone() }).collect())
    }
}

/// Finite linear combination of words.
#[derive(Clone, PartialEq)]
pub struct FreeElement<F: Scalar> {
    terms: BTreeMap<Word, F>,
}

impl<F: Scalar> Default for FreeElement<F> {
    fn default() -> Self {
        FreeElement { terms: BTreeMap::new() }
    }
}

impl<F: Scalar> fmt::Debug for FreeElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})·{w:?}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

impl<F: Scalar> FreeElement<F> {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn scalar(c: F) -> Self {
        Self::term(vec![], c)
    }
    pub fn one() -> Self {
        Self::scalar(F::one())
    }
    pub fn gen(g: u16) -> Self {
        Self::term(vec![g], F::one())
    }
    pub fn word(w: Word) -> Self {
        Self::term(w, F::one())
    }
    pub fn term(w: Word, c: F) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }
    pub fn from_terms<I: IntoIterator<Item = (Word, F)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (w, c) in it {
            e.add_term(w, c);
        }
        e
    }
    pub fn add_term(&mut self, w: Word, c: F) {
        add_into(&mut self.terms, w, c);
    }
    pub fn terms(&self) -> &BTreeMap<Word, F> {
        &self.terms
    }
    pub fn into_terms(self) -> BTreeMap<Word, F> {
        self.terms
    }
    pub fn coeff(&self, w: &[u16]) -> F {
        self.terms.get(w).cloned().unwrap_or_else(F::zero)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Largest word length (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }
    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).min().unwrap_or(0)
    }
    pub fn is_z_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }
    /// Z2 degree if homogeneous.
    pub fn parity(&self, a: &GenAlphabet) -> Option<u8> {
        let ps: BTreeSet<u8> = self.terms.keys().map(|w| a.word_parity(w)).collect();
        match ps.len() {
            0 => Some(0),
            1 => ps.into_iter().next(),
            _ => None,
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&F::one().neg()))
    }
    pub fn scale(&self, a: &F) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        FreeElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.mul(a))).collect() }
    }
    /// Product in the free algebra (concatenation).
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a.mul(b));
            }
        }
        out
    }
    pub fn left_mul_gen(&self, g: u16) -> Self {
        FreeElement {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(g);
                    v.extend_from_slice(w);
                    (v, c.clone())
                })
                .collect(),
        }
    }
    pub fn right_mul_gen(&self, g: u16) -> Self {
        FreeElement {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let mut v = w.clone();
                    v.push(g);
                    (v, c.clone())
                })
                .collect(),
        }
    }
    /// Part of the given word length.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        FreeElement { terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }
    pub fn map_scalars<G: Scalar>(&self, f: impl Fn(&F) -> Result<G, ScalarError>) -> Result<FreeElement<G>, ScalarError> {
        let mut out = FreeElement::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c)?);
        }
        Ok(out)
    }
    pub fn display(&self, a: &GenAlphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({c}) {}", a.word_string(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl FreeElement<RationalFunction> {
    pub fn specialize(&self, q0: &BigRational) -> Result<FreeElement<BigRational>, ScalarError> {
        self.map_scalars(|c| c.specialize(q0))
    }
    pub fn to_json(&self, a: &GenAlphabet) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| {
                    json!({"word": w.iter().map(|&g| a.get(g).name.clone()).collect::<Vec<_>>(), "coeff": c.to_json()})
                })
                .collect(),
        )
    }
}

/// Generators plus relations (each of Z-degree ≤ 2 in practice, possibly
/// with a constant part).
#[derive(Clone, Debug)]
pub struct Presentation<F: Scalar> {
    pub alphabet: GenAlphabet,
    pub relations: Vec<FreeElement<F>>,
}

impl<F: Scalar> Presentation<F> {
    pub fn new(alphabet: GenAlphabet, relations: Vec<FreeElement<F>>) -> Result<Self, QuadError> {
        let relations: Vec<_> = relations.into_iter().filter(|r| !r.is_zero()).collect();
        for (k, r) in relations.iter().enumerate() {
            if r.parity(&alphabet).is_none() {
                return Err(QuadError::InhomogeneousRelation(k));
            }
        }
        Ok(Presentation { alphabet, relations })
    }

    pub fn with_relation(&self, r: FreeElement<F>) -> Result<Self, QuadError> {
        let mut rels = self.relations.clone();
        rels.push(r);
        Self::new(self.alphabet.clone(), rels)
    }

    pub fn without_relation(&self, k: usize) -> Self {
        let mut p = self.clone();
        p.relations.remove(k);
        p
    }

    pub fn is_homogeneous(&self) -> bool {
        self.relations.iter().all(|r| r.is_z_homogeneous())
    }

    pub fn map_scalars<G: Scalar>(&self, f: impl Fn(&F) -> Result<G, ScalarError> + Copy) -> Result<Presentation<G>, ScalarError> {
        Ok(Presentation {
            alphabet: self.alphabet.clone(),
            relations: self.relations.iter().map(|r| r.map_scalars(f)).collect::<Result<_, _>>()?,
        })
    }
}

impl Presentation<RationalFunction> {
    pub fn specialize(&self, q0: &BigRational) -> Result<Presentation<BigRational>, ScalarError> {
        self.map_scalars(|c| c.specialize(q0))
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "generators": self.alphabet.gens().iter().map(|g| json!({"name": g.name, "parity": g.parity})).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|r| r.to_json(&self.alphabet)).collect::<Vec<_>>(),
        })
    }
    pub fn from_json(v: &serde_json::Value) -> Result<Self, QuadError> {
        let bad = |s: &str| QuadError::Scalar(ScalarError::Parse(s.to_string()));
        let gens = v.get("generators").and_then(|g| g.as_array()).ok_or_else(|| bad("missing generators"))?;
        let gens: Vec<Generator> = gens
            .iter()
            .map(|g| {
                Ok(Generator {
                    name: g.get("name").and_then(|n| n.as_str()).ok_or_else(|| bad("generator name"))?.to_string(),
                    parity: g.get("parity").and_then(|p| p.as_u64()).ok_or_else(|| bad("generator parity"))? as u8 & 1,
                    weight: vec![],
                })
            })
            .collect::<Result<_, QuadError>>()?;
        let alphabet = GenAlphabet::new(gens);
        let mut rels = Vec::new();
        for r in v.get("relations").and_then(|r| r.as_array()).ok_or_else(|| bad("missing relations"))? {
            let mut e = FreeElement::zero();
            for t in r.as_array().ok_or_else(|| bad("relation must be a list of terms"))? {
                let word: Word = t
                    .get("word")
                    .and_then(|w| w.as_array())
                    .ok_or_else(|| bad("term word"))?
                    .iter()
                    .map(|n| {
                        let n = n.as_str().unwrap_or_default();
                        alphabet.index(n).ok_or_else(|| QuadError::UnknownGenerator(n.to_string()))
                    })
                    .collect::<Result<_, _>>()?;
                let c = RationalFunction::from_json(t.get("coeff").ok_or_else(|| bad("term coeff"))?)?;
                e.add_term(word, c);
            }
            rels.push(e);
        }
        Self::new(alphabet, rels)
    }
}

/// Column key: words compared by length first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DegLex(pub Word);

impl Ord for DegLex {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}
impl PartialOrd for DegLex {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

type BlockKey = (usize, Vec<i32>);

/// Bounded pieces of the two-sided ideal generated by a presentation's relations.
pub struct IdealPieces<F: Scalar> {
    alphabet: GenAlphabet,
    relations: Vec<FreeElement<F>>,
    homogeneous: bool,
    memo: HashMap<BlockKey, Echelon<DegLex, F>>,
}

impl<F: Scalar> IdealPieces<F> {
    pub fn new(p: &Presentation<F>) -> Self {
        let weighted = p.relations.iter().all(|r| {
            let ws: BTreeSet<Vec<i32>> = r.terms().keys().map(|w| p.alphabet.word_weight(w)).collect();
            ws.len() <= 1
        });
        let alphabet = if weighted { p.alphabet.clone() } else { p.alphabet.unweighted() };
        IdealPieces { alphabet, relations: p.relations.clone(), homogeneous: p.is_homogeneous(), memo: HashMap::new() }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    fn weight_of(&self, w: &[u16]) -> Vec<i32> {
        self.alphabet.word_weight(w)
    }

    fn sub_weight(&self, w: &[i32], g: u16) -> Vec<i32> {
        w.iter().zip(self.alphabet.get(g).weight.iter()).map(|(a, b)| a - b).collect()
    }

    fn to_vec(e: &FreeElement<F>) -> SparseVec<DegLex, F> {
        e.terms().iter().map(|(w, c)| (DegLex(w.clone()), c.clone())).collect()
    }

    /// Block at degree `d` (exact degree for homogeneous ideals, ≤ d otherwise).
    fn block(&mut self, d: usize, wt: &[i32]) -> &Echelon<DegLex, F> {
        let key = (d, wt.to_vec());
        if !self.memo.contains_key(&key) {
            let e = self.compute_block(d, wt);
            self.memo.insert(key.clone(), e);
        }
        &self.memo[&key]
    }

    fn compute_block(&mut self, d: usize, wt: &[i32]) -> Echelon<DegLex, F> {
        let mut e = if !self.homogeneous && d > 0 { self.block(d - 1, wt).clone() } else { Echelon::new() };
        let rels: Vec<FreeElement<F>> = self
            .relations
            .iter()
            .filter(|r| {
                let dd = r.degree();
                (if self.homogeneous { dd == d } else { dd <= d })
                    && r.terms().keys().next().is_some_and(|w| self.weight_of(w) == wt)
            })
            .cloned()
            .collect();
        for r in &rels {
            e.insert(Self::to_vec(r));
        }
        if d >= 1 {
            for g in 0..self.alphabet.len() as u16 {
                let sw = self.sub_weight(wt, g);
                let rows = self.block(d - 1, &sw).row_vectors();
                for row in rows {
                    let left: SparseVec<DegLex, F> = row
                        .iter()
                        .map(|(w, c)| {
                            let mut v = Vec::with_capacity(w.0.len() + 1);
                            v.push(g);
                            v.extend_from_slice(&w.0);
                            (DegLex(v), c.clone())
                        })
                        .collect();
                    e.insert(left);
                    let right: SparseVec<DegLex, F> = row
                        .iter()
                        .map(|(w, c)| {
                            let mut v = w.0.clone();
                            v.push(g);
                            (DegLex(v), c.clone())
                        })
                        .collect();
                    e.insert(right);
                }
            }
        }
        e
    }

    /// Split an element into its blocks at bound `d`.
    fn split(&self, x: &FreeElement<F>, d: usize) -> BTreeMap<BlockKey, SparseVec<DegLex, F>> {
        let mut parts: BTreeMap<BlockKey, SparseVec<DegLex, F>> = BTreeMap::new();
        for (w, c) in x.terms() {
            let key = (if self.homogeneous { w.len() } else { d }, self.weight_of(w));
            parts.entry(key).or_default().insert(DegLex(w.clone()), c.clone());
        }
        parts
    }

    /// Membership of x in the ideal piece of filtration degree ≤ d.
    pub fn contains(&mut self, x: &FreeElement<F>, d: usize) -> Result<bool, QuadError> {
        if x.degree() > d {
            return Err(QuadError::DegreeBound { bound: d, degree: x.degree() });
        }
        for ((dd, wt), v) in self.split(x, d) {
            if !self.block(dd, &wt).contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Normal form of x modulo the ideal piece of degree ≤ d: the unique
    /// representative supported on non-pivot words.
    pub fn reduce(&mut self, x: &FreeElement<F>, d: usize) -> FreeElement<F> {
        let mut out = FreeElement::zero();
        for ((dd, wt), v) in self.split(x, d) {
            for (w, c) in self.block(dd, &wt).reduce(v) {
                out.add_term(w.0, c);
            }
        }
        out
    }

    /// Dimension of the ideal piece of words with the given length (homogeneous)
    /// or length ≤ d (filtered), summed over all weight blocks.
    fn rank_at(&mut self, d: usize, words_by_weight: &BTreeMap<Vec<i32>, usize>) -> usize {
        words_by_weight.keys().map(|wt| self.block(d, wt).rank()).sum()
    }
}

fn all_words(ngen: usize, len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..ngen as u16).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

/// Dimensions of the quotient pieces of degree ≤ 0, ..., ≤ D (cumulative).
pub fn quotient_dims<F: Scalar>(p: &Presentation<F>, max_d: usize) -> Vec<usize> {
    let mut pieces = IdealPieces::new(p);
    let ngen = p.alphabet.len();
    let mut out = Vec::new();
    let mut cumulative = 0usize;
    for d in 0..=max_d {
        let mut by_weight: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
        for w in all_words(ngen, d) {
            *by_weight.entry(pieces.weight_of(&w)).or_default() += 1;
        }
        let words_d: usize = by_weight.values().sum();
        if pieces.homogeneous {
            let rank = pieces.rank_at(d, &by_weight);
            cumulative += words_d - rank;
            out.push(cumulative);
        } else {
            // filtered: all words of length ≤ d, blocks keyed by weight only
            let mut all: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
            for dd in 0..=d {
                for w in all_words(ngen, dd) {
                    *all.entry(pieces.weight_of(&w)).or_default() += 1;
                }
            }
            let total: usize = all.values().sum();
            let rank = pieces.rank_at(d, &all);
            out.push(total - rank);
        }
    }
    out
}

/// How a membership verdict was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Symbolic,
    Specialized(Vec<BigRational>),
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Symbolic => "proved (symbolic)".into(),
            Mode::Specialized(qs) => format!("evidence (specialized at {} points)", qs.len()),
        }
    }
    pub fn points(&self) -> Vec<String> {
        match self {
            Mode::Symbolic => vec![],
            Mode::Specialized(qs) => qs.iter().map(rational_string).collect(),
        }
    }
}

/// Membership of x in the ideal piece ≤ D, symbolically or at each of the
/// given specializations (all must agree for a positive verdict).
pub fn ideal_member(p: &Presentation<RationalFunction>, x: &FreeElement<RationalFunction>, d: usize, mode: &Mode) -> Result<bool, QuadError> {
    if x.degree() > d {
        return Err(QuadError::DegreeBound { bound: d, degree: x.degree() });
    }
    match mode {
        Mode::Symbolic => IdealPieces::new(p).contains(x, d),
        Mode::Specialized(qs) => {
            let res: Result<Vec<bool>, QuadError> = qs
                .par_iter()
                .map(|q0| {
                    let ps = p.specialize(q0)?;
                    let xs = x.specialize(q0)?;
                    IdealPieces::new(&ps).contains(&xs, d)
                })
                .collect();
            Ok(res?.into_iter().all(|b| b))
        }
    }
}

/// Batch membership sharing the ideal pieces: one verdict per element.
pub fn ideal_member_all(
    p: &Presentation<RationalFunction>,
    xs: &[FreeElement<RationalFunction>],
    d: usize,
    mode: &Mode,
) -> Result<Vec<bool>, QuadError> {
    for x in xs {
        if x.degree() > d {
            return Err(QuadError::DegreeBound { bound: d, degree: x.degree() });
        }
    }
    match mode {
        Mode::Symbolic => {
            let mut pieces = IdealPieces::new(p);
            xs.iter().map(|x| pieces.contains(x, d)).collect()
        }
        Mode::Specialized(qs) => {
            let per_point: Result<Vec<Vec<bool>>, QuadError> = qs
                .par_iter()
                .map(|q0| {
                    let ps = p.specialize(q0)?;
                    let mut pieces = IdealPieces::new(&ps);
                    xs.iter().map(|x| pieces.contains(&x.specialize(q0)?, d)).collect()
                })
                .collect();
            let per_point = per_point?;
            Ok((0..xs.len()).map(|k| per_point.iter().all(|v| v[k])).collect())
        }
    }
}

/// A check that can run against ideal pieces over any scalar field, given a
/// conversion of ℚ(q) coefficients into that field.
pub trait PointCheck: Sync {
    fn run<F: Scalar>(&self, ip: &mut IdealPieces<F>, conv: &(dyn Fn(&RationalFunction) -> Result<F, ScalarError> + Sync)) -> Result<bool, QuadError>;
}

/// Membership of one element in the ideal piece ≤ d.
pub struct Member<'a> {
    pub x: &'a FreeElement<RationalFunction>,
    pub d: usize,
}

impl PointCheck for Member<'_> {
    fn run<F: Scalar>(&self, ip: &mut IdealPieces<F>, conv: &(dyn Fn(&RationalFunction) -> Result<F, ScalarError> + Sync)) -> Result<bool, QuadError> {
        ip.contains(&self.x.map_scalars(conv)?, self.d)
    }
}

/// Pairs of words (left factor, right factor) with coefficients: an element
/// of the tensor square of the free algebra.
pub type Tensor<F> = BTreeMap<(Word, Word), F>;

/// Membership of a tensor in J⊗T + T⊗J with both factors bounded by d,
/// decided as (NF ⊗ NF)(x) = 0.
pub struct TensorMember<'a> {
    pub x: &'a Tensor<RationalFunction>,
    pub d: usize,
}

impl PointCheck for TensorMember<'_> {
    fn run<F: Scalar>(&self, ip: &mut IdealPieces<F>, conv: &(dyn Fn(&RationalFunction) -> Result<F, ScalarError> + Sync)) -> Result<bool, QuadError> {
        let mut by_right: BTreeMap<Word, FreeElement<F>> = BTreeMap::new();
        for ((a, b), c) in self.x {
            by_right.entry(b.clone()).or_default().add_term(a.clone(), conv(c)?);
        }
        let mut by_left: BTreeMap<Word, FreeElement<F>> = BTreeMap::new();
        for (b, left) in by_right {
            for (a, c) in ip.reduce(&left, self.d).into_terms() {
                by_left.entry(a).or_default().add_term(b.clone(), c);
            }
        }
        for right in by_left.values() {
            if !ip.reduce(right, self.d).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Ideal pieces for one presentation, either over ℚ(q) or at several
/// specializations at once (a verdict is positive only if every point agrees).
pub struct Checker {
    mode: Mode,
    symbolic: Option<IdealPieces<RationalFunction>>,
    points: Vec<(BigRational, IdealPieces<BigRational>)>,
}

impl Checker {
    pub fn new(p: &Presentation<RationalFunction>, mode: &Mode) -> Result<Self, QuadError> {
        Ok(match mode {
            Mode::Symbolic => Checker { mode: mode.clone(), symbolic: Some(IdealPieces::new(p)), points: vec![] },
            Mode::Specialized(qs) => Checker {
                mode: mode.clone(),
                symbolic: None,
                points: qs.iter().map(|q0| Ok((q0.clone(), IdealPieces::new(&p.specialize(q0)?)))).collect::<Result<_, QuadError>>()?,
            },
        })
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn check<C: PointCheck>(&mut self, c: &C) -> Result<bool, QuadError> {
        if let Some(ip) = self.symbolic.as_mut() {
            return c.run(ip, &|x: &RationalFunction| Ok(x.clone()));
        }
        let res: Result<Vec<bool>, QuadError> = self
            .points
            .par_iter_mut()
            .map(|(q0, ip)| {
                let q0 = q0.clone();
                c.run(ip, &move |x: &RationalFunction| x.specialize(&q0))
            })
            .collect();
        Ok(res?.into_iter().all(|b| b))
    }

    pub fn contains(&mut self, x: &FreeElement<RationalFunction>, d: usize) -> Result<bool, QuadError> {
        if x.degree() > d {
            return Err(QuadError::DegreeBound { bound: d, degree: x.degree() });
        }
        self.check(&Member { x, d })
    }

    pub fn tensor_contains(&mut self, x: &Tensor<RationalFunction>, d: usize) -> Result<bool, QuadError> {
        self.check(&TensorMember { x, d })
    }
}

// ---------------------------------------------------------------------------
// Rewriting
// ---------------------------------------------------------------------------

/// Rules leading word → lower terms, for a degree-lexicographic order given
/// by generator ranks (larger rank = larger generator).
#[derive(Clone, Debug)]
pub struct RewriteSystem<F: Scalar> {
    rank: Vec<u16>,
    rules: BTreeMap<Word, FreeElement<F>>,
}

/// An overlap whose two reductions have different normal forms.
#[derive(Clone, Debug)]
pub struct Ambiguity<F: Scalar> {
    pub word: Word,
    pub residue: FreeElement<F>,
}

impl<F: Scalar> RewriteSystem<F> {
    /// `order[k]` is the generator at rank k (ascending).
    pub fn new(p: &Presentation<F>, order: &[u16]) -> Result<Self, QuadError> {
        let mut rank = vec![0u16; p.alphabet.len()];
        for (k, &g) in order.iter().enumerate() {
            rank[g as usize] = k as u16;
        }
        let ranked = |w: &Word| DegLex(w.iter().map(|&g| rank[g as usize]).collect());
        let mut e: Echelon<DegLex, F> = Echelon::new();
        for r in &p.relations {
            e.insert(r.terms().iter().map(|(w, c)| (ranked(w), c.clone())).collect());
        }
        let unrank = |w: &DegLex| -> Word { w.0.iter().map(|&k| order[k as usize]).collect() };
        let mut rules = BTreeMap::new();
        for row in e.rows() {
            let (lead, _) = row.last().expect("nonempty row");
            if lead.0.is_empty() {
                return Err(QuadError::NonOrientable(format!("{:?}", row.iter().map(|(w, c)| (unrank(w), c.to_string())).collect::<Vec<_>>())));
            }
            let mut rhs = FreeElement::zero();
            for (w, c) in &row[..row.len() - 1] {
                rhs.add_term(unrank(w), c.neg());
            }
            rules.insert(unrank(lead), rhs);
        }
        Ok(RewriteSystem { rank, rules })
    }

    pub fn rules(&self) -> &BTreeMap<Word, FreeElement<F>> {
        &self.rules
    }

    fn key(&self, w: &Word) -> DegLex {
        DegLex(w.iter().map(|&g| self.rank[g as usize]).collect())
    }

    fn find_redex(&self, w: &Word) -> Option<(usize, &Word)> {
        for start in 0..w.len() {
            for (lead, _) in self.rules.range(w[start..start + 1].to_vec()..) {
                if lead.first() != w.get(start) {
                    break;
                }
                if w[start..].starts_with(lead) {
                    return Some((start, lead));
                }
            }
        }
        None
    }

    pub fn is_reduced(&self, w: &Word) -> bool {
        self.find_redex(w).is_none()
    }

    /// Fully reduced form; terminates because each step lowers the leading word.
    pub fn normal_form(&self, x: &FreeElement<F>) -> FreeElement<F> {
        let mut work: BTreeMap<DegLex, (Word, F)> = x.terms().iter().map(|(w, c)| (self.key(w), (w.clone(), c.clone()))).collect();
        let mut out = FreeElement::zero();
        while let Some((_, (w, c))) = work.pop_last() {
            match self.find_redex(&w) {
                None => out.add_term(w, c),
                Some((start, lead)) => {
                    let rhs = &self.rules[lead];
                    for (v, a) in rhs.terms() {
                        let mut nw = w[..start].to_vec();
                        nw.extend_from_slice(v);
                        nw.extend_from_slice(&w[start + lead.len()..]);
                        let k = self.key(&nw);
                        let t = a.mul(&c);
                        match work.get_mut(&k) {
                            Some((_, x)) => {
                                *x = x.add(&t);
                                if x.is_zero() {
                                    work.remove(&k);
                                }
                            }
                            None => {
                                if !t.is_zero() {
                                    work.insert(k, (nw, t));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Overlap and inclusion ambiguities up to word length `max_d`, with the
    /// nonzero differences of their two reductions.
    pub fn ambiguities(&self, max_d: usize) -> Vec<Ambiguity<F>> {
        let mut out = Vec::new();
        let leads: Vec<&Word> = self.rules.keys().collect();
        for a in &leads {
            for b in &leads {
                // overlaps: suffix of a = prefix of b
                for k in 1..a.len().min(b.len()) {
                    if a[a.len() - k..] == b[..k] {
                        let mut w = a.to_vec();
                        w.extend_from_slice(&b[k..]);
                        if w.len() > max_d {
                            continue;
                        }
                        let via_a = {
                            let mut e = self.rules[*a].clone();
                            e = e.mul(&FreeElement::word(b[k..].to_vec()));
                            self.normal_form(&e)
                        };
                        let via_b = {
                            let e = FreeElement::word(a[..a.len() - k].to_vec()).mul(&self.rules[*b]);
                            self.normal_form(&e)
                        };
                        let residue = via_a.sub(&via_b);
                        if !residue.is_zero() {
                            out.push(Ambiguity { word: w, residue });
                        }
                    }
                }
                // inclusions: b strictly inside a
                if a != b && b.len() < a.len() && a.len() <= max_d {
                    for s in 0..=a.len() - b.len() {
                        if a[s..s + b.len()] == b[..] {
                            let via_a = self.normal_form(&self.rules[*a]);
                            let e = FreeElement::word(a[..s].to_vec())
                                .mul(&self.rules[*b])
                                .mul(&FreeElement::word(a[s + b.len()..].to_vec()));
                            let residue = via_a.sub(&self.normal_form(&e));
                            if !residue.is_zero() {
                                out.push(Ambiguity { word: a.to_vec(), residue });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of reduced words of each length 0..=max_d, cumulated.
    pub fn reduced_word_counts(&self, ngen: usize, max_d: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut frontier: Vec<Word> = vec![vec![]];
        let mut total = 0;
        for d in 0..=max_d {
            if d > 0 {
                frontier = frontier
                    .into_iter()
                    .flat_map(|w| {
                        (0..ngen as u16).map(move |g| {
                            let mut v = w.clone();
                            v.push(g);
                            v
                        })
                    })
                    .filter(|w| self.is_reduced(w))
                    .collect();
            }
            total += frontier.len();
            out.push(total);
        }
        out
    }
}

pub fn rewrite_normal_form<F: Scalar>(p: &Presentation<F>, order: &[u16], x: &FreeElement<F>) -> Result<FreeElement<F>, QuadError> {
    Ok(RewriteSystem::new(p, order)?.normal_form(x))
}

pub fn ambiguity_report<F: Scalar>(p: &Presentation<F>, order: &[u16], max_d: usize) -> Result<Vec<Ambiguity<F>>, QuadError> {
    Ok(RewriteSystem::new(p, order)?.ambiguities(max_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalars::rat;
    use proptest::prelude::*;

    type Q = BigRational;

    fn alphabet(names: &[(&str, u8)]) -> GenAlphabet {
        GenAlphabet::new(names.iter().map(|(n, p)| Generator { name: n.to_string(), parity: *p, weight: vec![] }).collect())
    }

    #[test]
    fn free_algebra_dims() {
        let a = alphabet(&[("a", 0), ("b", 0), ("c", 1)]);
        let p: Presentation<Q> = Presentation::new(a, vec![]).unwrap();
        assert_eq!(quotient_dims(&p, 3), vec![1, 4, 13, 40]);
    }

    #[test]
    fn commutative_plane() {
        // xy − yx: dims of polynomial ring in 2 variables
        let a = alphabet(&[("x", 0), ("y", 0)]);
        let r = FreeElement::word(vec![0, 1]).sub(&FreeElement::word(vec![1, 0]));
        let p: Presentation<Q> = Presentation::new(a, vec![r.clone()]).unwrap();
        assert_eq!(quotient_dims(&p, 3), vec![1, 3, 6, 10]);
        let mut ip = IdealPieces::new(&p);
        assert!(ip.contains(&r, 2).unwrap());
        assert!(!ip.contains(&FreeElement::gen(0), 1).unwrap());
        assert!(ip.contains(&FreeElement::gen(0), 0).is_err());
        // x·(xy − yx) is in the degree-3 piece
        assert!(ip.contains(&FreeElement::gen(0).mul(&r), 3).unwrap());
    }

    #[test]
    fn inhomogeneous_weyl_algebra() {
        // yx − xy − 1: filtered dims of the Weyl algebra = (d+1)(d+2)/2
        let a = alphabet(&[("x", 0), ("y", 0)]);
        let r = FreeElement::word(vec![1, 0]).sub(&FreeElement::word(vec![0, 1])).sub(&FreeElement::one());
        let p: Presentation<Q> = Presentation::new(a, vec![r]).unwrap();
        assert_eq!(quotient_dims(&p, 3), vec![1, 3, 6, 10]);
        let rw = RewriteSystem::new(&p, &[0, 1]).unwrap();
        assert!(rw.ambiguities(4).is_empty());
        let nf = rw.normal_form(&FreeElement::word(vec![1, 1, 0]));
        // yyx = xyy + 2y
        let expect = FreeElement::word(vec![0, 1, 1]).add(&FreeElement::term(vec![1], rat(2, 1)));
        assert_eq!(nf, expect);
    }

    #[test]
    fn odd_square_rule() {
        let a = alphabet(&[("x", 1)]);
        let p: Presentation<Q> = Presentation::new(a, vec![FreeElement::word(vec![0, 0])]).unwrap();
        let nf = rewrite_normal_form(&p, &[0], &FreeElement::word(vec![0, 0])).unwrap();
        assert!(nf.is_zero());
        assert_eq!(quotient_dims(&p, 3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn constant_relation_is_not_orientable() {
        let a = alphabet(&[("x", 0)]);
        let p: Presentation<Q> = Presentation::new(a, vec![FreeElement::one()]).unwrap();
        assert!(matches!(RewriteSystem::new(&p, &[0]), Err(QuadError::NonOrientable(_))));
    }

    #[test]
    fn inhomogeneous_parity_rejected() {
        let a = alphabet(&[("x", 0), ("y", 1)]);
        let r: FreeElement<Q> = FreeElement::word(vec![0]).add(&FreeElement::word(vec![1]));
        assert!(matches!(Presentation::new(a, vec![r]), Err(QuadError::InhomogeneousRelation(0))));
    }

    #[test]
    fn unresolved_overlap_reported() {
        // rules xy → 0 and yz → x over a free alphabet: the overlap xyz gives 0 vs xx
        let a = alphabet(&[("x", 0), ("y", 0), ("z", 0)]);
        let r1 = FreeElement::word(vec![0, 1]);
        let r2 = FreeElement::word(vec![1, 2]).sub(&FreeElement::word(vec![0]));
        let p: Presentation<Q> = Presentation::new(a, vec![r1, r2]).unwrap();
        let amb = ambiguity_report(&p, &[0, 1, 2], 3).unwrap();
        assert_eq!(amb.len(), 1);
        assert_eq!(amb[0].word, vec![0, 1, 2]);
    }

    #[test]
    fn json_round_trip() {
        let a = GenAlphabet::new(vec![
            Generator { name: "x".into(), parity: 0, weight: vec![] },
            Generator { name: "y".into(), parity: 1, weight: vec![] },
        ]);
        let r = FreeElement::term(vec![0, 0], RationalFunction::q()).add(&FreeElement::scalar(RationalFunction::one()));
        let p = Presentation::new(a, vec![r]).unwrap();
        let v = p.to_json();
        let back = Presentation::from_json(&v).unwrap();
        assert_eq!(back.relations, p.relations);
    }

    proptest! {
        #[test]
        fn membership_is_monotone_in_degree(c in prop::collection::vec(-3i64..4, 4)) {
            let a = alphabet(&[("x", 0), ("y", 0)]);
            let r = FreeElement::word(vec![0, 1]).sub(&FreeElement::term(vec![1, 0], rat(2, 1)));
            let p: Presentation<Q> = Presentation::new(a, vec![r.clone()]).unwrap();
            let x = FreeElement::term(vec![0], rat(c[0], 1)).mul(&r)
                .add(&r.mul(&FreeElement::term(vec![1], rat(c[1], 1))))
                .add(&FreeElement::term(vec![0, 0, 1], rat(c[2], 1)).scale(&rat(c[3], 1)));
            let mut ip = IdealPieces::new(&p);
            let m3 = ip.contains(&x, 3).unwrap();
            let m4 = ip.contains(&x, 4).unwrap();
            prop_assert!(!m3 || m4);
            prop_assert_eq!(m3, c[2] * c[3] == 0);
        }

        #[test]
        fn normal_form_is_idempotent_and_linear(c in prop::collection::vec(-3i64..4, 3)) {
            let a = alphabet(&[("x", 0), ("y", 0)]);
            let r = FreeElement::word(vec![1, 0]).sub(&FreeElement::term(vec![0, 1], rat(3, 1)));
            let p: Presentation<Q> = Presentation::new(a, vec![r]).unwrap();
            let rw = RewriteSystem::new(&p, &[0, 1]).unwrap();
            let x = FreeElement::term(vec![1, 1, 0], rat(c[0], 1)).add(&FreeElement::term(vec![1, 0], rat(c[1], 1)));
            let y = FreeElement::term(vec![1, 0, 0], rat(c[2], 1));
            let nx = rw.normal_form(&x);
            prop_assert_eq!(rw.normal_form(&nx), nx.clone());
            prop_assert_eq!(rw.normal_form(&x.add(&y)), nx.add(&rw.normal_form(&y)));
        }
    }
}
