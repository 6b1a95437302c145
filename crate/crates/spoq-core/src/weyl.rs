//! Quadratic comodule algebras on generators x_i: subcomodule and endomorphism
//! criteria, and the quantum Weyl superalgebra with its three relation
//! sources (explicit list, image of F, Kulish form).
//!
//! Elements of 𝕂 ⊕ (V⊗V) are sparse vectors keyed by index words: `[]` is the
//! constant, `[i, j]` stands for x_i x_j.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::json;

use crate::frt::{t_gen, t_parity, FrtAlgebra};
use crate::graded::{matrix_to_coeff, pdiff, sigma, GradedIndex, GradedOperator};
use crate::linalg::{map_scalars, Echelon, SparseVec};
use crate::quadalg::{
    quotient_dims, Checker, FreeElement, GenAlphabet, Generator, IdealPieces, Mode, PointCheck, Presentation, QuadError, RewriteSystem, Word,
};
use crate::qscalars::{RationalFunction, Scalar, ScalarError};
use crate::report::{CheckResult, SYMBOLIC};
use crate::rmatrix::{SpoData, SpoError};

type RF = RationalFunction;
pub type QuadVec<F> = SparseVec<Vec<i32>, F>;

fn addv(v: &mut QuadVec<RF>, k: Vec<i32>, c: RF) {
    crate::linalg::add_into(v, k, c);
}

pub fn x_name(i: i32) -> String {
    format!("x{i}")
}

pub fn x_alphabet(idx: &GradedIndex) -> GenAlphabet {
    GenAlphabet::new(idx.indices().into_iter().map(|i| Generator { name: x_name(i), parity: idx.parity(i), weight: idx.weight(i) }).collect())
}

pub fn to_element(idx: &GradedIndex, v: &QuadVec<RF>) -> FreeElement<RF> {
    FreeElement::from_terms(v.iter().map(|(k, c)| (k.iter().map(|&i| idx.pos(i) as u16).collect::<Word>(), c.clone())))
}

pub fn from_element(idx: &GradedIndex, e: &FreeElement<RF>) -> QuadVec<RF> {
    e.terms().iter().map(|(w, c)| (w.iter().map(|&g| idx.at(g as usize)).collect(), c.clone())).collect()
}

/// Default rewriting order, ascending: x_r < … < x_1 < x_{−1} < … < x_{−r}.
pub fn weyl_order(idx: &GradedIndex) -> Vec<u16> {
    idx.indices().into_iter().rev().map(|i| idx.pos(i) as u16).collect()
}

pub fn specialize_vec(v: &QuadVec<RF>, q0: &BigRational) -> Result<QuadVec<BigRational>, ScalarError> {
    map_scalars(v, |c| c.specialize(q0))
}

// ---------------------------------------------------------------------------
// Relation sources
// ---------------------------------------------------------------------------

/// Kulish form: (R̂ − q)(e_k ⊗ e_l) read as x-words, minus C^q_{kl} c. The
/// columns of R̂ are taken directly from the R table:
/// R̂_{(u,v),(k,l)} = σ_{uv} σ(η_u − η_l, η_k) R_{vu,kl}.
pub fn kulish_relations(data: &SpoData, c: &RF) -> Vec<QuadVec<RF>> {
    let idx = &data.idx;
    let table = data.r_table();
    let mut cols: BTreeMap<(i32, i32), QuadVec<RF>> = BTreeMap::new();
    for (&(v, u, k, l), r) in &table {
        let s = idx.sigma_ij(u, v) * sigma(pdiff(idx.parity(u), idx.parity(l)), idx.parity(k));
        addv(cols.entry((k, l)).or_default(), vec![u, v], r.sign_mul(s));
    }
    let mut out = Vec::new();
    for k in idx.indices() {
        for l in idx.indices() {
            let mut col = cols.remove(&(k, l)).unwrap_or_default();
            addv(&mut col, vec![k, l], data.q().neg());
            addv(&mut col, vec![], data.c(k, l).mul(c).neg());
            out.push(col);
        }
    }
    out
}

pub fn rhat_minus_q_image(data: &SpoData) -> Vec<QuadVec<RF>> {
    kulish_relations(data, &RF::zero())
}

/// b̃(e_i ⊗ e_j) = C^q_{ij}: the pairing whose constant matches the explicit
/// t-relation.
pub fn b_tilde(data: &SpoData, i: i32, j: i32) -> RF {
    data.c(i, j)
}

/// Image of F(u) = R̂(u) − q·u − c·b̃(u) over the basis of V⊗V, computed by
/// applying the operator R̂ (matrix route).
pub fn image_f_relations(data: &SpoData, c: &RF) -> Vec<QuadVec<RF>> {
    let idx = &data.idx;
    let rhat = data.build_rhat();
    let shifted = rhat.sub(&GradedOperator::identity(idx, 2).scale(&data.q())).expect("same arity");
    let mut out = Vec::new();
    for u in idx.multi_indices(2) {
        let basis: BTreeMap<Vec<i32>, RF> = [(u.clone(), RF::one())].into_iter().collect();
        let mut v: QuadVec<RF> = shifted.apply(&basis);
        addv(&mut v, vec![], b_tilde(data, u[0], u[1]).mul(c).neg());
        out.push(v);
    }
    out
}

/// x_i² for odd i, and x_i x_j − σ_{ij} q x_j x_i for i < j, i ≠ −j.
pub fn base_relations(data: &SpoData) -> Vec<(String, QuadVec<RF>)> {
    let idx = &data.idx;
    let mut out = Vec::new();
    for i in idx.indices() {
        if idx.parity(i) == 1 {
            out.push((format!("x{i}^2"), [(vec![i, i], RF::one())].into_iter().collect()));
        }
    }
    for i in idx.indices() {
        for j in idx.indices() {
            if i < j && i != -j {
                let mut v = QuadVec::new();
                addv(&mut v, vec![i, j], RF::one());
                addv(&mut v, vec![j, i], data.q().sign_mul(-idx.sigma_ij(i, j)));
                out.push((format!("x{i} x{j} - sigma q x{j} x{i}"), v));
            }
        }
    }
    out
}

/// The relation tying the pairs j−1 and j (2 ≤ j ≤ r):
/// q^{−σ_{j−1}} x_{1−j}x_{j−1} − σ_{j−1} q x_{j−1}x_{1−j} − σ_{j−1}σ_j x_{−j}x_j + σ_{j−1} q^{1−σ_j} x_j x_{−j}.
pub fn pair_relation(data: &SpoData, j: i32) -> QuadVec<RF> {
    let idx = &data.idx;
    let (s1, s) = (idx.sigma_i(j - 1), idx.sigma_i(j));
    let mut v = QuadVec::new();
    addv(&mut v, vec![1 - j, j - 1], data.q_pow(-s1 as i64));
    addv(&mut v, vec![j - 1, 1 - j], data.q().sign_mul(-s1));
    addv(&mut v, vec![-j, j], RF::from_int(-(s1 * s) as i64));
    addv(&mut v, vec![j, -j], data.q_pow(1 - s as i64).sign_mul(s1));
    v
}

/// x_{−1}x_1 − q² x_1x_{−1} + (q − q⁻¹) Σ_{i≥2} ((C^q)⁻¹)_{i,−i} x_i x_{−i} = q^{2d} c.
pub fn t_relation(data: &SpoData, c: &RF) -> QuadVec<RF> {
    let mut v = QuadVec::new();
    addv(&mut v, vec![-1, 1], RF::one());
    addv(&mut v, vec![1, -1], data.q_pow(2).neg());
    for i in 2..=data.idx.r() {
        addv(&mut v, vec![i, -i], data.qd().mul(&data.cinv(i, -i)));
    }
    addv(&mut v, vec![], data.q_pow(2 * data.idx.d() as i64).mul(c).neg());
    v
}

/// System (I), one relation per i < 0:
/// q^{σ_i} x_{−i}x_i − σ_i q⁻¹ x_i x_{−i} + (q − q⁻¹) σ_i C_{i,−i} Σ_{j<i} (C⁻¹)_{−j,j} x_{−j}x_j = σ_i C_{i,−i} q^{2d} c.
pub fn system_one(data: &SpoData, c: &RF) -> Vec<(String, QuadVec<RF>)> {
    let idx = &data.idx;
    let q2d = data.q_pow(2 * idx.d() as i64);
    (-idx.r()..=-1)
        .map(|i| {
            let s = idx.sigma_i(i);
            let mut v = QuadVec::new();
            addv(&mut v, vec![-i, i], data.q_pow(s as i64));
            addv(&mut v, vec![i, -i], data.q_pow(-1).sign_mul(-s));
            for j in idx.indices() {
                if j < i {
                    addv(&mut v, vec![-j, j], data.qd().mul(&data.c(i, -i)).mul(&data.cinv(-j, j)).sign_mul(s));
                }
            }
            addv(&mut v, vec![], data.c(i, -i).mul(&q2d).mul(c).sign_mul(-s));
            (format!("system I, i = {i}"), v)
        })
        .collect()
}

/// System (II), one relation per i < 0:
/// q^{−σ_i} x_i x_{−i} − σ_i q x_{−i}x_i − (q − q⁻¹) σ_i C_{−i,i} Σ_{j<i} (C⁻¹)_{j,−j} x_j x_{−j} = σ_i C_{−i,i} c.
pub fn system_two(data: &SpoData, c: &RF) -> Vec<(String, QuadVec<RF>)> {
    let idx = &data.idx;
    (-idx.r()..=-1)
        .map(|i| {
            let s = idx.sigma_i(i);
            let mut v = QuadVec::new();
            addv(&mut v, vec![i, -i], data.q_pow(-s as i64));
            addv(&mut v, vec![-i, i], data.q().sign_mul(-s));
            for j in idx.indices() {
                if j < i {
                    addv(&mut v, vec![j, -j], data.qd().mul(&data.c(-i, i)).mul(&data.cinv(j, -j)).sign_mul(-s));
                }
            }
            addv(&mut v, vec![], data.c(-i, i).mul(c).sign_mul(-s));
            (format!("system II, i = {i}"), v)
        })
        .collect()
}

/// Presentation after rescaling x′_i = r_i x_i with r_i r_{−i} = 1/c_i (i < 0):
/// in the pair relations only the products 1/c_i survive.
pub fn rescaled_relations(data: &SpoData, c: &RF) -> Vec<(String, QuadVec<RF>)> {
    let idx = &data.idx;
    let q2d = data.q_pow(2 * idx.d() as i64);
    let rr = |j: i32| data.c(j, -j).inv().expect("nonzero metric");
    let mut out = base_relations(data);
    for i in -idx.r()..=-1 {
        let s = idx.sigma_i(i);
        let mut v = QuadVec::new();
        addv(&mut v, vec![i, -i], rr(i).mul(&data.q_pow(-1)));
        addv(&mut v, vec![-i, i], data.q_pow(s as i64).mul(&rr(i)).sign_mul(-s));
        for j in idx.indices() {
            if j < i {
                addv(&mut v, vec![-j, j], data.qd().mul(&rr(j)).neg());
            }
        }
        addv(&mut v, vec![], q2d.mul(c));
        out.push((format!("rescaled, i = {i}"), v));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// The explicit list: x_i² (odd), q-commutation, pair relations and the
    /// t-relation. For n = 0 the t-relation is unavailable and system (I)
    /// takes the place of the last r relations.
    Explicit,
    SystemOne,
    SystemTwo,
    ImageF,
    Kulish,
}

impl Source {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "explicit" => Some(Source::Explicit),
            "system1" | "systemI" => Some(Source::SystemOne),
            "system2" | "systemII" => Some(Source::SystemTwo),
            "imageF" | "imagef" => Some(Source::ImageF),
            "kulish" => Some(Source::Kulish),
            _ => None,
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            Source::Explicit => "explicit",
            Source::SystemOne => "system1",
            Source::SystemTwo => "system2",
            Source::ImageF => "imageF",
            Source::Kulish => "kulish",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeylPresentation {
    pub data: SpoData,
    pub c: RF,
    pub source: Source,
    /// (provenance tag, relation)
    pub relations: Vec<(String, QuadVec<RF>)>,
}

impl WeylPresentation {
    pub fn presentation(&self) -> Presentation<RF> {
        let idx = &self.data.idx;
        Presentation::new(x_alphabet(idx), self.relations.iter().map(|(_, v)| to_element(idx, v)).collect())
            .expect("Weyl relations are Z2-homogeneous")
    }
    pub fn vectors(&self) -> Vec<QuadVec<RF>> {
        self.relations.iter().map(|(_, v)| v.clone()).collect()
    }
    pub fn span(&self) -> Echelon<Vec<i32>, RF> {
        Echelon::from_vectors(self.vectors())
    }
}

pub fn build_weyl(data: &SpoData, c: &RF, source: Source) -> WeylPresentation {
    let relations = match source {
        Source::Explicit => {
            let mut rels = base_relations(data);
            if data.idx.n >= 1 {
                for j in 2..=data.idx.r() {
                    rels.push((format!("pair relation j = {j}"), pair_relation(data, j)));
                }
                rels.push(("t-relation".into(), t_relation(data, c)));
            } else {
                rels.extend(system_one(data, c));
            }
            rels
        }
        Source::SystemOne => {
            let mut rels = base_relations(data);
            rels.extend(system_one(data, c));
            rels
        }
        Source::SystemTwo => {
            let mut rels = base_relations(data);
            rels.extend(system_two(data, c));
            rels
        }
        Source::ImageF => image_f_relations(data, c)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (format!("F(basis {k})"), v))
            .collect(),
        Source::Kulish => kulish_relations(data, c)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (format!("Kulish column {k}"), v))
            .collect(),
    };
    WeylPresentation { data: data.clone(), c: c.clone(), source, relations }
}

/// Expected number of explicit relations: 2m + 2r(r−1) + r.
pub fn explicit_count(idx: &GradedIndex) -> usize {
    let (r, m) = (idx.r() as usize, idx.m);
    2 * m + 2 * r * (r - 1) + r
}

/// Expected dimension of image(R̂ − q): 2r² − r + 2m.
pub fn image_dimension(idx: &GradedIndex) -> usize {
    let (r, m) = (idx.r() as usize, idx.m);
    2 * r * r - r + 2 * m
}

/// Used by the metric oracle: at c = 1 and a fixed specialization, the
/// explicit list lies in (and spans) the Kulish span.
pub fn t_relation_matches_kulish(data: &SpoData, q0: &BigRational) -> bool {
    let go = || -> Result<bool, ScalarError> {
        let one = RF::one();
        let kul: Vec<_> = kulish_relations(data, &one).iter().map(|v| specialize_vec(v, q0)).collect::<Result<_, _>>()?;
        let k = Echelon::from_vectors(kul);
        let ex: Vec<_> = build_weyl(data, &one, Source::Explicit).vectors().iter().map(|v| specialize_vec(v, q0)).collect::<Result<_, _>>()?;
        let e = Echelon::from_vectors(ex);
        Ok(e.same_span(&k))
    };
    go().unwrap_or(false)
}

fn span_witness(a: &Echelon<Vec<i32>, RF>, b: &Echelon<Vec<i32>, RF>) -> serde_json::Value {
    let miss: Vec<String> = a.missing_from(b).iter().take(2).map(vec_string).collect();
    json!(miss)
}

pub fn vec_string(v: &QuadVec<RF>) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(k, c)| {
            let w = if k.is_empty() { "1".to_string() } else { k.iter().map(|&i| x_name(i)).collect::<Vec<_>>().join(" ") };
            format!("({c}) {w}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The three sources (and both systems) span the same subspace of 𝕂 ⊕ V⊗V.
pub fn weyl_equivalences(data: &SpoData, c: &RF) -> Vec<CheckResult> {
    let kul = build_weyl(data, c, Source::Kulish).span();
    let mut out = Vec::new();
    let mut sources = vec![Source::ImageF, Source::SystemOne, Source::SystemTwo];
    if data.idx.n >= 1 {
        sources.insert(0, Source::Explicit);
    }
    for s in sources {
        let w = build_weyl(data, c, s);
        let e = w.span();
        let same = e.same_span(&kul);
        out.push(CheckResult::new(
            &format!("weyl-span-{}", s.name()),
            format!("{} relations span the Kulish relation space (c = {c})", s.name()),
            SYMBOLIC,
            same,
            json!({
                "relations": w.relations.len(),
                "rank": e.rank(),
                "kulish_rank": kul.rank(),
                "not_in_kulish": span_witness(&kul, &e),
                "not_in_source": span_witness(&e, &kul),
            }),
        ));
    }
    out.push(CheckResult::new(
        "weyl-explicit-count",
        "the explicit list has 2m + 2r(r-1) + r relations",
        SYMBOLIC,
        build_weyl(data, c, Source::Explicit).relations.len() == explicit_count(&data.idx),
        json!({"expected": explicit_count(&data.idx)}),
    ));
    if c.is_zero() {
        let rk = kul.rank();
        let op = data.build_rhat().sub(&GradedOperator::identity(&data.idx, 2).scale(&data.q())).expect("arity");
        let oprank = crate::rmatrix::operator_rank(&op);
        out.push(CheckResult::new(
            "weyl-dimension",
            "dim image(R^ - q) = 2r^2 - r + 2m",
            SYMBOLIC,
            rk == image_dimension(&data.idx) && oprank == rk,
            json!({"rank": rk, "operator_rank": oprank, "expected": image_dimension(&data.idx)}),
        ));
    }
    out
}

/// Σ_j ((C^q)⁻¹)_{j,−j} x_j x_{−j} − (q^d − q^{−d})/(q − q⁻¹) q^d c.
pub fn canonical_invariant_image(data: &SpoData, c: &RF) -> QuadVec<RF> {
    let idx = &data.idx;
    let d = idx.d() as i64;
    let mut v = QuadVec::new();
    for j in idx.indices() {
        addv(&mut v, vec![j, -j], data.cinv(j, -j));
    }
    let qn = data.q_pow(d).sub(&data.q_pow(-d)).div(&data.qd()).expect("q - 1/q is nonzero");
    addv(&mut v, vec![], qn.mul(&data.q_pow(d)).mul(c).neg());
    v
}

pub fn check_canonical_image(data: &SpoData, c: &RF) -> CheckResult {
    let v = canonical_invariant_image(data, c);
    let span = build_weyl(data, c, Source::Kulish).span();
    let member = span.contains(&v);
    let constant_vanishes = !v.contains_key(&vec![]);
    CheckResult::new(
        "weyl-invariant-image",
        "canonical image of the invariant lies in the relation space",
        SYMBOLIC,
        member && (data.idx.d() != 0 || constant_vanishes),
        json!({"element": vec_string(&v), "constant_vanishes": constant_vanishes}),
    )
}

// ---------------------------------------------------------------------------
// Comodule structure
// ---------------------------------------------------------------------------

/// δ(x_a x_b) = Σ σ(η_a, η_j − η_a) σ(η_b, η_l − η_b) σ(deg t_{ja}, η_l) x_j x_l ⊗ t_{ja} t_{lb}; δ(1) = 1 ⊗ 1.
pub fn delta(idx: &GradedIndex, v: &QuadVec<RF>) -> Vec<(Vec<i32>, Word, RF)> {
    let mut out = Vec::new();
    for (k, c) in v {
        match k.as_slice() {
            [] => out.push((vec![], vec![], c.clone())),
            [a, b] => {
                let (a, b) = (*a, *b);
                for j in idx.indices() {
                    for l in idx.indices() {
                        let s = sigma(idx.parity(a), pdiff(idx.parity(j), idx.parity(a)))
                            * sigma(idx.parity(b), pdiff(idx.parity(l), idx.parity(b)))
                            * sigma(t_parity(idx, j, a), idx.parity(l));
                        out.push((vec![j, l], vec![t_gen(idx, j, a), t_gen(idx, l, b)], c.sign_mul(s)));
                    }
                }
            }
            _ => panic!("only elements of K + V⊗V are supported"),
        }
    }
    out
}

/// (π_W ⊗ NF_J)(δ(w)) = 0 for every w, where π_W has kernel W.
pub struct SubcomoduleCheck<'a> {
    pub idx: &'a GradedIndex,
    pub w: &'a [QuadVec<RF>],
    pub targets: &'a [QuadVec<RF>],
}

impl PointCheck for SubcomoduleCheck<'_> {
    fn run<F: Scalar>(&self, ip: &mut IdealPieces<F>, conv: &(dyn Fn(&RF) -> Result<F, ScalarError> + Sync)) -> Result<bool, QuadError> {
        let ech: Echelon<Vec<i32>, F> = Echelon::from_vectors(self.w.iter().map(|v| map_scalars(v, conv)).collect::<Result<Vec<_>, _>>()?);
        for target in self.targets {
            let mut by_t: BTreeMap<Word, QuadVec<F>> = BTreeMap::new();
            for (k, tw, c) in delta(self.idx, target) {
                crate::linalg::add_into(by_t.entry(tw).or_default(), k, conv(&c)?);
            }
            let mut by_k: BTreeMap<Vec<i32>, FreeElement<F>> = BTreeMap::new();
            for (tw, v) in by_t {
                for (k, c) in ech.reduce(v) {
                    by_k.entry(k).or_default().add_term(tw.clone(), c);
                }
            }
            for e in by_k.values() {
                if !ip.reduce(e, 2).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// δ(W) ⊂ W ⊗ SPO + (𝕂 ⊕ V⊗V) ⊗ J_SPO (filtration ≤ 2), with a witness on failure.
pub fn subcomodule_check(data: &SpoData, w: &[QuadVec<RF>], mode: &Mode) -> Result<(bool, Option<String>), SpoError> {
    let alg = FrtAlgebra::new(data, true);
    let mut chk = Checker::new(&alg.presentation, mode).map_err(quad)?;
    let basis: Vec<QuadVec<RF>> = Echelon::from_vectors(w.to_vec()).row_vectors();
    let all = chk.check(&SubcomoduleCheck { idx: &data.idx, w: &basis, targets: &basis }).map_err(quad)?;
    if all {
        return Ok((true, None));
    }
    for b in &basis {
        if !chk.check(&SubcomoduleCheck { idx: &data.idx, w: &basis, targets: std::slice::from_ref(b) }).map_err(quad)? {
            return Ok((false, Some(vec_string(b))));
        }
    }
    Ok((false, None))
}

fn quad(e: QuadError) -> SpoError {
    match e {
        QuadError::Scalar(s) => SpoError::Scalar(s),
        other => SpoError::InvalidMetric(other.to_string()),
    }
}

/// Σ σ(η_j−η_l, η_a−η_k) S_{ij,ab} t_{ak}t_{bl} − Σ σ(η_j−η_b, η_i−η_k) t_{ia}t_{jb} S_{ab,kl} for all i,j,k,l.
pub fn endo_items(data: &SpoData, s: &GradedOperator<RF>) -> Vec<(String, FreeElement<RF>)> {
    let idx = &data.idx;
    let table = matrix_to_coeff(s);
    let p = |x: i32| idx.parity(x);
    let mut out = Vec::new();
    for i in idx.indices() {
        for j in idx.indices() {
            for k in idx.indices() {
                for l in idx.indices() {
                    let mut e = FreeElement::zero();
                    for a in idx.indices() {
                        for b in idx.indices() {
                            if let Some(x) = table.get(&(i, j, a, b)) {
                                let sg = sigma(pdiff(p(j), p(l)), pdiff(p(a), p(k)));
                                e.add_term(vec![t_gen(idx, a, k), t_gen(idx, b, l)], x.sign_mul(sg));
                            }
                            if let Some(x) = table.get(&(a, b, k, l)) {
                                let sg = sigma(pdiff(p(j), p(b)), pdiff(p(i), p(k)));
                                e.add_term(vec![t_gen(idx, i, a), t_gen(idx, j, b)], x.sign_mul(-sg));
                            }
                        }
                    }
                    if !e.is_zero() {
                        out.push((format!("S-relation ({i},{j},{k},{l})"), e));
                    }
                }
            }
        }
    }
    out
}

/// S is an endomorphism of the comodule V⊗V (modulo J_SPO).
pub fn endo_check(data: &SpoData, s: &GradedOperator<RF>, mode: &Mode) -> Result<CheckResult, SpoError> {
    if s.degree != 0 {
        return Err(SpoError::InvalidMetric("endomorphism check needs a degree-0 operator".into()));
    }
    let alg = FrtAlgebra::new(data, true);
    let mut chk = alg.checker(mode).map_err(quad)?;
    crate::frt::membership_check("comodule-endomorphism", "(S (x) 1) T1 T2 = T1 T2 (S (x) 1) modulo J_SPO", &mut chk, &alg, &endo_items(data, s), 2)
        .map_err(quad)
}

/// Subcomodule check on the Weyl relation span plus the rescaled presentation.
pub fn weyl_comodule_check(data: &SpoData, c: &RF, mode: &Mode) -> Result<Vec<CheckResult>, SpoError> {
    let w = build_weyl(data, c, Source::Kulish);
    let (ok, witness) = subcomodule_check(data, &w.vectors(), mode)?;
    let mut out = vec![CheckResult::new(
        "weyl-subcomodule",
        format!("the Weyl relation space is a subcomodule (c = {c})"),
        mode.label(),
        ok,
        json!({"witness": witness, "points": mode.points()}),
    )];
    let resc: Vec<QuadVec<RF>> = rescaled_relations(data, c).into_iter().map(|x| x.1).collect();
    let same = Echelon::from_vectors(resc.clone()).same_span(&w.span());
    let p1 = w.presentation();
    let p2 = Presentation::new(x_alphabet(&data.idx), resc.iter().map(|v| to_element(&data.idx, v)).collect()).map_err(quad)?;
    let q0 = crate::qscalars::rat(3, 1);
    let d1 = quotient_dims(&p1.specialize(&q0)?, 3);
    let d2 = quotient_dims(&p2.specialize(&q0)?, 3);
    out.push(CheckResult::new(
        "weyl-rescaled",
        "rescaled-generator presentation generates the same ideal",
        SYMBOLIC,
        same && d1 == d2,
        json!({"dims": d1, "rescaled_dims": d2}),
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// PBW
// ---------------------------------------------------------------------------

/// Ordered-monomial counts: coefficients of (1+z)^{2m}/(1−z)^{2n}, cumulated
/// when `filtered`.
pub fn ordered_monomial_counts(n: usize, m: usize, max_d: usize, filtered: bool) -> Vec<usize> {
    let mut poly = vec![0usize; max_d + 1];
    poly[0] = 1;
    for _ in 0..2 * m {
        for d in (1..=max_d).rev() {
            poly[d] += poly[d - 1];
        }
    }
    for _ in 0..2 * n {
        for d in 1..=max_d {
            poly[d] += poly[d - 1];
        }
    }
    if filtered {
        for d in 1..=max_d {
            poly[d] += poly[d - 1];
        }
    }
    poly
}

/// Quotient dimensions (cumulative) and the ambiguity report up to `max_d`.
pub fn pbw_check(w: &WeylPresentation, max_d: usize, mode: &Mode) -> Result<CheckResult, SpoError> {
    let idx = &w.data.idx;
    let p = w.presentation();
    let expected = ordered_monomial_counts(idx.n, idx.m, max_d, true);
    let (dims, amb, reduced) = match mode {
        Mode::Symbolic => {
            let rw = RewriteSystem::new(&p, &weyl_order(idx)).map_err(quad)?;
            let amb: Vec<String> = rw.ambiguities(max_d).iter().map(|a| p.alphabet.word_string(&a.word)).collect();
            (vec![quotient_dims(&p, max_d)], amb, rw.reduced_word_counts(idx.dim(), max_d))
        }
        Mode::Specialized(qs) => {
            let mut dims = Vec::new();
            let mut amb = Vec::new();
            let mut reduced = Vec::new();
            for q0 in qs {
                let ps = p.specialize(q0)?;
                dims.push(quotient_dims(&ps, max_d));
                let rw = RewriteSystem::new(&ps, &weyl_order(idx)).map_err(quad)?;
                amb.extend(rw.ambiguities(max_d).iter().map(|a| ps.alphabet.word_string(&a.word)));
                reduced = rw.reduced_word_counts(idx.dim(), max_d);
            }
            (dims, amb, reduced)
        }
    };
    let ok = dims.iter().all(|d| *d == expected) && amb.is_empty() && reduced == expected;
    Ok(CheckResult::new(
        "weyl-pbw",
        format!("filtered dimensions equal ordered-monomial counts and all overlaps resolve up to degree {max_d} (c = {})", w.c),
        mode.label(),
        ok,
        json!({"dims": dims[0], "expected": expected, "reduced_words": reduced, "ambiguities": amb.iter().take(5).collect::<Vec<_>>()}),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalars::rat;

    fn c0() -> RF {
        RF::zero()
    }
    fn c1() -> RF {
        RF::one()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(ordered_monomial_counts(1, 1, 3, false), vec![1, 4, 8, 12]);
        assert_eq!(ordered_monomial_counts(1, 0, 3, true), vec![1, 3, 6, 10]);
    }

    #[test]
    fn kulish_matches_image_f() {
        for (n, m) in [(1, 0), (0, 1), (1, 1), (2, 0)] {
            let data = SpoData::standard(n, m).unwrap();
            for c in [c0(), c1()] {
                let a = build_weyl(&data, &c, Source::Kulish).span();
                let b = build_weyl(&data, &c, Source::ImageF).span();
                assert!(a.same_span(&b), "({n},{m}) c={c}");
            }
        }
    }

    #[test]
    fn equivalences_small() {
        for (n, m) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1), (1, 2)] {
            let data = SpoData::standard(n, m).unwrap();
            for c in [c0(), c1()] {
                for r in weyl_equivalences(&data, &c) {
                    assert!(r.passed, "({n},{m}) c={c}: {:?}", r);
                }
                assert!(check_canonical_image(&data, &c).passed, "({n},{m}) c={c}");
            }
        }
    }

    #[test]
    fn quantum_plane_normal_form() {
        let data = SpoData::standard(1, 0).unwrap();
        let idx = &data.idx;
        let w = build_weyl(&data, &c0(), Source::Explicit);
        let p = w.presentation();
        let rw = RewriteSystem::new(&p, &weyl_order(idx)).unwrap();
        let x = FreeElement::word(vec![idx.pos(-1) as u16, idx.pos(1) as u16]);
        let expect = FreeElement::term(vec![idx.pos(1) as u16, idx.pos(-1) as u16], RF::q_pow(2));
        assert_eq!(rw.normal_form(&x), expect);
        assert!(rw.ambiguities(3).is_empty());
        let ordered = FreeElement::word(vec![idx.pos(1) as u16, idx.pos(1) as u16, idx.pos(-1) as u16]);
        assert_eq!(rw.normal_form(&ordered), ordered);
    }

    #[test]
    fn odd_squares_vanish() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let p = build_weyl(&data, &c1(), Source::Kulish).presentation();
        let rw = RewriteSystem::new(&p, &weyl_order(idx)).unwrap();
        for i in [2, -2] {
            let g = idx.pos(i) as u16;
            assert!(rw.normal_form(&FreeElement::word(vec![g, g])).is_zero());
        }
    }

    #[test]
    fn subcomodules() {
        let data = SpoData::standard(1, 1).unwrap();
        let a: QuadVec<RF> = data.invariant_a().into_iter().collect();
        let mode = Mode::Specialized(vec![rat(3, 1), rat(5, 2)]);
        assert!(subcomodule_check(&data, &[a], &mode).unwrap().0);
        assert!(subcomodule_check(&data, &rhat_minus_q_image(&data), &mode).unwrap().0);
        let e11: QuadVec<RF> = [(vec![1, 1], RF::one())].into_iter().collect();
        let (ok, witness) = subcomodule_check(&data, &[e11], &mode).unwrap();
        assert!(!ok && witness.is_some());
    }

    #[test]
    fn endomorphisms() {
        let data = SpoData::standard(1, 0).unwrap();
        let idx = &data.idx;
        for s in [data.build_rhat(), GradedOperator::identity(idx, 2), data.build_k()] {
            assert!(endo_check(&data, &s, &Mode::Symbolic).unwrap().passed);
        }
        let e = GradedOperator::<RF>::elementary(idx, 1, 1).graded_tensor(&GradedOperator::identity(idx, 1));
        assert!(!endo_check(&data, &e, &Mode::Symbolic).unwrap().passed);
    }

    #[test]
    fn pbw_small() {
        let data = SpoData::standard(1, 0).unwrap();
        for c in [c0(), c1()] {
            let w = build_weyl(&data, &c, Source::Kulish);
            assert!(pbw_check(&w, 4, &Mode::Symbolic).unwrap().passed, "c={c}");
        }
    }

    #[test]
    fn q_equals_one_limit_is_supercommutative() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let w = build_weyl(&data, &c0(), Source::Kulish);
        let one = rat(1, 1);
        let span: Echelon<Vec<i32>, BigRational> =
            Echelon::from_vectors(w.vectors().iter().map(|v| specialize_vec(v, &one).unwrap()).collect::<Vec<_>>());
        let mut sc: Vec<QuadVec<BigRational>> = Vec::new();
        for i in idx.indices() {
            for j in idx.indices() {
                let mut v = QuadVec::new();
                crate::linalg::add_into(&mut v, vec![i, j], rat(1, 1));
                crate::linalg::add_into(&mut v, vec![j, i], rat(-idx.sigma_ij(i, j) as i64, 1));
                if !v.is_empty() {
                    sc.push(v);
                }
            }
        }
        assert!(span.same_span(&Echelon::from_vectors(sc)));
    }

    mod props {
        use super::*;
        use crate::quadalg::IdealPieces;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn normal_form_is_reduced_and_congruent(w in prop::collection::vec(0u16..4, 1..5)) {
                let data = SpoData::standard(1, 1).unwrap();
                let p = build_weyl(&data, &RF::one(), Source::Kulish).presentation().specialize(&rat(3, 1)).unwrap();
                let rw = RewriteSystem::new(&p, &weyl_order(&data.idx)).unwrap();
                let x = FreeElement::word(w.clone());
                let nf = rw.normal_form(&x);
                prop_assert_eq!(rw.normal_form(&nf), nf.clone());
                for (word, _) in nf.terms() {
                    prop_assert!(rw.is_reduced(word));
                }
                let mut ip = IdealPieces::new(&p);
                prop_assert!(ip.contains(&x.sub(&nf), w.len()).unwrap());
            }
        }
    }
}
