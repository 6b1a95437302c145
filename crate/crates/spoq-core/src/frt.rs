//! The FRT bialgebra A(R) on generators t_{ij} and its quotient SPO_q by
//! Q′ − 1: relations, coproduct and counit, the quadratic elements Q′/Q″,
//! the antipode matrix, and the identities they satisfy.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::json;

use crate::graded::{matrix_to_coeff, pdiff, sigma, CoeffTable, GradedIndex};
use crate::linalg::{Echelon, SparseVec};
use crate::quadalg::{quotient_dims, Checker, DegLex, FreeElement, GenAlphabet, Generator, Mode, Presentation, QuadError, Tensor, Word};
use crate::qscalars::{RationalFunction, Scalar};
use crate::report::{CheckResult, SYMBOLIC};
use crate::rmatrix::{SpoData, SpoError};

type RF = RationalFunction;
type Elem = FreeElement<RF>;

/// Generator index of t_{ij}.
pub fn t_gen(idx: &GradedIndex, i: i32, j: i32) -> u16 {
    (idx.pos(i) * idx.dim() + idx.pos(j)) as u16
}

/// (i, j) of a generator.
pub fn t_indices(idx: &GradedIndex, g: u16) -> (i32, i32) {
    let g = g as usize;
    (idx.at(g / idx.dim()), idx.at(g % idx.dim()))
}

/// Z2 degree η_i + η_j of t_{ij}.
pub fn t_parity(idx: &GradedIndex, i: i32, j: i32) -> u8 {
    pdiff(idx.parity(j), idx.parity(i))
}

pub fn t_name(i: i32, j: i32) -> String {
    format!("t({i},{j})")
}

/// Alphabet {t_{ij}}; the weight of t_{ij} is (wt e_i, wt e_j).
pub fn t_alphabet(idx: &GradedIndex) -> GenAlphabet {
    let mut gens = Vec::new();
    for i in idx.indices() {
        for j in idx.indices() {
            let mut weight = idx.weight(i);
            weight.extend(idx.weight(j));
            gens.push(Generator { name: t_name(i, j), parity: t_parity(idx, i, j), weight });
        }
    }
    GenAlphabet::new(gens)
}

pub fn t(idx: &GradedIndex, i: i32, j: i32) -> Elem {
    FreeElement::gen(t_gen(idx, i, j))
}

pub fn tt(idx: &GradedIndex, i: i32, j: i32, k: i32, l: i32, c: RF) -> Elem {
    FreeElement::term(vec![t_gen(idx, i, j), t_gen(idx, k, l)], c)
}

fn word_parity(idx: &GradedIndex, w: &[u16]) -> u8 {
    w.iter().fold(0, |p, &g| {
        let (i, j) = t_indices(idx, g);
        p ^ t_parity(idx, i, j)
    })
}

/// X_{ij,kl} = Σ σ(η_j−η_l, η_a−η_k) R_{ij,ab} t_{ak} t_{bl} − Σ σ(η_j−η_b, η_a−η_k) t_{jb} t_{ia} R_{ab,kl}.
pub fn x_relation(idx: &GradedIndex, table: &CoeffTable<RF>, i: i32, j: i32, k: i32, l: i32) -> Elem {
    let p = |x: i32| idx.parity(x);
    let mut e = FreeElement::zero();
    for a in idx.indices() {
        for b in idx.indices() {
            if let Some(r) = table.get(&(i, j, a, b)) {
                let s = sigma(pdiff(p(j), p(l)), pdiff(p(a), p(k)));
                e.add_term(vec![t_gen(idx, a, k), t_gen(idx, b, l)], r.sign_mul(s));
            }
            if let Some(r) = table.get(&(a, b, k, l)) {
                let s = sigma(pdiff(p(j), p(b)), pdiff(p(a), p(k)));
                e.add_term(vec![t_gen(idx, j, b), t_gen(idx, i, a)], r.sign_mul(-s));
            }
        }
    }
    e
}

/// All nonzero X_{ij,kl}, in index order, labelled by (i,j,k,l).
pub fn relations_from_table(idx: &GradedIndex, table: &CoeffTable<RF>) -> Vec<((i32, i32, i32, i32), Elem)> {
    let mut out = Vec::new();
    for i in idx.indices() {
        for j in idx.indices() {
            for k in idx.indices() {
                for l in idx.indices() {
                    let x = x_relation(idx, table, i, j, k, l);
                    if !x.is_zero() {
                        out.push(((i, j, k, l), x));
                    }
                }
            }
        }
    }
    out
}

/// A(R), or SPO_q when `spo` is set.
#[derive(Clone, Debug)]
pub struct FrtAlgebra {
    pub data: SpoData,
    pub spo: bool,
    pub table: CoeffTable<RF>,
    pub presentation: Presentation<RF>,
}

impl FrtAlgebra {
    pub fn new(data: &SpoData, spo: bool) -> Self {
        Self::from_table(data, data.r_table(), spo)
    }

    /// A(R) for an arbitrary coefficient table (e.g. a perturbed or inverted R).
    pub fn from_table(data: &SpoData, table: CoeffTable<RF>, spo: bool) -> Self {
        let idx = &data.idx;
        let mut rels: Vec<Elem> = relations_from_table(idx, &table).into_iter().map(|x| x.1).collect();
        if spo {
            rels.push(q_prime(data, -1).sub(&FreeElement::one()));
        }
        let presentation = Presentation::new(t_alphabet(idx), rels).expect("FRT relations are Z2-homogeneous");
        FrtAlgebra { data: data.clone(), spo, table, presentation }
    }

    pub fn idx(&self) -> &GradedIndex {
        &self.data.idx
    }

    pub fn checker(&self, mode: &Mode) -> Result<Checker, QuadError> {
        Checker::new(&self.presentation, mode)
    }
}

// ---------------------------------------------------------------------------
// Coproduct and counit
// ---------------------------------------------------------------------------

/// Δ(t_{ij}) = Σ_k σ(η_k − η_i, η_k − η_j) t_{ik} ⊗ t_{kj}
pub fn coproduct_gen(idx: &GradedIndex, i: i32, j: i32) -> Vec<(i32, i32)> {
    idx.indices().into_iter().map(|k| (k, sigma(pdiff(idx.parity(k), idx.parity(i)), pdiff(idx.parity(k), idx.parity(j))))).collect()
}

/// Algebra-map extension of Δ with (a⊗b)(c⊗d) = σ(deg b, deg c) ac⊗bd.
pub fn coproduct_word<F: Scalar>(idx: &GradedIndex, w: &[u16]) -> Tensor<F> {
    let mut acc: Tensor<F> = [((vec![], vec![]), F::one())].into_iter().collect();
    for &g in w {
        let (i, j) = t_indices(idx, g);
        let mut next: Tensor<F> = BTreeMap::new();
        for ((a, b), c) in &acc {
            let pb = word_parity(idx, b);
            for (k, s) in coproduct_gen(idx, i, j) {
                let s = s * sigma(pb, t_parity(idx, i, k));
                let mut a2 = a.clone();
                a2.push(t_gen(idx, i, k));
                let mut b2 = b.clone();
                b2.push(t_gen(idx, k, j));
                crate::linalg::add_into(&mut next, (a2, b2), c.sign_mul(s));
            }
        }
        acc = next;
    }
    acc
}

pub fn coproduct<F: Scalar>(idx: &GradedIndex, x: &FreeElement<F>) -> Tensor<F> {
    let mut out: Tensor<F> = BTreeMap::new();
    for (w, c) in x.terms() {
        for (k, v) in coproduct_word::<F>(idx, w) {
            crate::linalg::add_into(&mut out, k, v.mul(c));
        }
    }
    out
}

/// ε(t_{ij}) = δ_{ij}, extended multiplicatively.
pub fn counit<F: Scalar>(idx: &GradedIndex, x: &FreeElement<F>) -> F {
    let mut acc = F::zero();
    for (w, c) in x.terms() {
        if w.iter().all(|&g| {
            let (i, j) = t_indices(idx, g);
            i == j
        }) {
            acc = acc.add(c);
        }
    }
    acc
}

/// x ⊗ y in the tensor square.
pub fn tensor_of<F: Scalar>(x: &FreeElement<F>, y: &FreeElement<F>) -> Tensor<F> {
    let mut out = BTreeMap::new();
    for (a, c) in x.terms() {
        for (b, d) in y.terms() {
            crate::linalg::add_into(&mut out, (a.clone(), b.clone()), c.mul(d));
        }
    }
    out
}

pub fn tensor_sub<F: Scalar>(x: &Tensor<F>, y: &Tensor<F>) -> Tensor<F> {
    let mut out = x.clone();
    for (k, v) in y {
        crate::linalg::add_into(&mut out, k.clone(), v.neg());
    }
    out
}

type Triple = BTreeMap<(Word, Word, Word), RF>;

/// (Δ⊗id)Δ and (id⊗Δ)Δ on a generator.
pub fn coassociativity_sides(idx: &GradedIndex, i: i32, j: i32) -> (Triple, Triple) {
    let d = coproduct_word::<RF>(idx, &[t_gen(idx, i, j)]);
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for ((a, b), c) in &d {
        for ((a1, a2), c1) in coproduct_word::<RF>(idx, a) {
            crate::linalg::add_into(&mut left, (a1, a2, b.clone()), c1.mul(c));
        }
        for ((b1, b2), c2) in coproduct_word::<RF>(idx, b) {
            crate::linalg::add_into(&mut right, (a.clone(), b1, b2), c2.mul(c));
        }
    }
    (left, right)
}

// ---------------------------------------------------------------------------
// Q′, Q″ and the antipode
// ---------------------------------------------------------------------------

/// B_{kl} = Σ_{ab} σ_{l,b} σ_{b,a} C^q_{ab} t_{ak} t_{bl}
pub fn b_elem(data: &SpoData, k: i32, l: i32) -> Elem {
    let idx = &data.idx;
    let mut e = FreeElement::zero();
    for a in idx.indices() {
        let b = -a;
        let s = idx.sigma_ij(l, b) * idx.sigma_ij(b, a);
        e = e.add(&tt(idx, a, k, b, l, data.c(a, b).sign_mul(s)));
    }
    e
}

/// A_{ij} = Σ_{ab} σ_{i,b} ((C^q)⁻¹)_{ab} t_{ia} t_{jb}
pub fn a_elem(data: &SpoData, i: i32, j: i32) -> Elem {
    let idx = &data.idx;
    let mut e = FreeElement::zero();
    for a in idx.indices() {
        let b = -a;
        e = e.add(&tt(idx, i, a, j, b, data.cinv(a, b).sign_mul(idx.sigma_ij(i, b))));
    }
    e
}

/// Q′_{k,l} = (C^q_{k,−k})⁻¹ B_{k,−l}; Q′ = Q′_{k,k} at the reference index.
pub fn q_prime_kl(data: &SpoData, k: i32, l: i32) -> Elem {
    b_elem(data, k, -l).scale(&data.c(k, -k).inv().expect("nonzero metric"))
}

pub fn q_prime(data: &SpoData, k: i32) -> Elem {
    q_prime_kl(data, k, k)
}

/// Q″_{i,j} = (σ_i ((C^q)⁻¹)_{i,−i})⁻¹ A_{i,−j}; Q″ = Q″_{i,i} at the reference index.
pub fn q_double_prime_ij(data: &SpoData, i: i32, j: i32) -> Elem {
    let norm = data.cinv(i, -i).sign_mul(data.idx.sigma_i(i));
    a_elem(data, i, -j).scale(&norm.inv().expect("nonzero metric"))
}

pub fn q_double_prime(data: &SpoData, i: i32) -> Elem {
    q_double_prime_ij(data, i, i)
}

/// t′_{ij} = σ_i σ_{ij} ((C^q)⁻¹)_{i,−i} C^q_{−j,j} t_{−j,−i}, as (coefficient, (−j, −i)).
pub fn antipode_matrix(data: &SpoData) -> BTreeMap<(i32, i32), (RF, (i32, i32))> {
    let idx = &data.idx;
    let mut out = BTreeMap::new();
    for i in idx.indices() {
        for j in idx.indices() {
            let c = data.cinv(i, -i).mul(&data.c(-j, j)).sign_mul(idx.sigma_i(i) * idx.sigma_ij(i, j));
            out.insert((i, j), (c, (-j, -i)));
        }
    }
    out
}

/// T′ = F_r⁻¹ T^{st} F_r with (T^{st})_{kl} = σ(η_l, η_l − η_k) t_{lk}, as free elements.
pub fn antipode_via_supertranspose(data: &SpoData) -> Result<BTreeMap<(i32, i32), Elem>, SpoError> {
    let idx = &data.idx;
    let ind = idx.indices();
    // F_r is antidiagonal: (F_r⁻¹)_{i,−i} = 1 / (F_r)_{−i,i}
    let finv = |i: i32, k: i32| -> Result<RF, SpoError> {
        if k != -i {
            return Ok(RF::zero());
        }
        Ok(data.f_r(-i, i).inv()?)
    };
    let mut out = BTreeMap::new();
    for &i in &ind {
        for &j in &ind {
            let mut e = FreeElement::zero();
            for &k in &ind {
                let a = finv(i, k)?;
                if a.is_zero() {
                    continue;
                }
                for &l in &ind {
                    let b = data.f_r(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let s = sigma(idx.parity(l), pdiff(idx.parity(l), idx.parity(k)));
                    e = e.add(&t(idx, l, k).scale(&a.mul(&b).sign_mul(s)));
                }
            }
            out.insert((i, j), e);
        }
    }
    Ok(out)
}

/// Applying the antipode matrix twice: t″_{ij} = coefficient · t_{ij}.
pub fn s_squared(data: &SpoData) -> BTreeMap<(i32, i32), RF> {
    let s = antipode_matrix(data);
    s.iter()
        .map(|(&(i, j), (c, target))| {
            let (c2, back) = &s[target];
            assert_eq!(*back, (i, j));
            ((i, j), c.mul(c2))
        })
        .collect()
}

/// Σ_k σ(η_k−η_i, η_k−η_j) t′_{ik} t_{kj} (or t_{ik} t′_{kj} when `swapped`).
pub fn tinv_product(data: &SpoData, i: i32, j: i32, swapped: bool) -> Elem {
    let idx = &data.idx;
    let s = antipode_matrix(data);
    let mut e = FreeElement::zero();
    for k in idx.indices() {
        let sg = sigma(pdiff(idx.parity(k), idx.parity(i)), pdiff(idx.parity(k), idx.parity(j)));
        let term = if swapped {
            let (c, (a, b)) = &s[&(k, j)];
            tt(idx, i, k, *a, *b, c.sign_mul(sg))
        } else {
            let (c, (a, b)) = &s[&(i, k)];
            tt(idx, *a, *b, k, j, c.sign_mul(sg))
        };
        e = e.add(&term);
    }
    e
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

fn verdict_mode(mode: &Mode) -> String {
    mode.label()
}

fn elem_json(alg: &FrtAlgebra, x: &Elem) -> serde_json::Value {
    json!(x.display(&alg.presentation.alphabet))
}

/// Check a labelled list of elements for membership in the ideal piece ≤ d;
/// the first failure becomes the witness.
pub fn membership_check(
    anchor: &str,
    description: &str,
    chk: &mut Checker,
    alg: &FrtAlgebra,
    items: &[(String, Elem)],
    d: usize,
) -> Result<CheckResult, QuadError> {
    let mut failures = Vec::new();
    for (label, x) in items {
        if !chk.contains(x, d)? {
            failures.push(json!({"element": label, "value": elem_json(alg, x)}));
            if failures.len() >= 3 {
                break;
            }
        }
    }
    Ok(CheckResult::new(
        anchor,
        description,
        verdict_mode(chk.mode()),
        failures.is_empty(),
        json!({"checked": items.len(), "degree_bound": d, "points": chk.mode().points(), "failures": failures}),
    ))
}

/// Q′_{kl} − δ_{kl}Q′ and Q″_{ij} − δ_{ij}Q″ for all index pairs.
pub fn q_matrix_items(data: &SpoData) -> Vec<(String, Elem)> {
    let idx = &data.idx;
    let qp = q_prime(data, -1);
    let qpp = q_double_prime(data, -1);
    let mut items = Vec::new();
    for k in idx.indices() {
        for l in idx.indices() {
            let mut x = q_prime_kl(data, k, l);
            if k == l {
                x = x.sub(&qp);
            }
            items.push((format!("Q'_({k},{l}) - delta Q'"), x));
        }
    }
    for i in idx.indices() {
        for j in idx.indices() {
            let mut x = q_double_prime_ij(data, i, j);
            if i == j {
                x = x.sub(&qpp);
            }
            items.push((format!("Q''_({i},{j}) - delta Q''"), x));
        }
    }
    items
}

pub fn tinv_items(data: &SpoData) -> Vec<(String, Elem)> {
    let idx = &data.idx;
    let qp = q_prime(data, -1);
    let mut items = Vec::new();
    for swapped in [false, true] {
        for i in idx.indices() {
            for j in idx.indices() {
                let mut x = tinv_product(data, i, j, swapped);
                if i == j {
                    x = x.sub(&qp);
                }
                let name = if swapped { "T T'" } else { "T' T" };
                items.push((format!("({name})_({i},{j}) - delta Q'"), x));
            }
        }
    }
    items
}

/// Degree-2 identities in A(R): the Q′/Q″ matrices, Q′ − Q″, both antipode
/// products, ε(Q′) = 1, and A(R̃) = A(R).
pub fn check_frt_identities(data: &SpoData, mode: &Mode) -> Result<Vec<CheckResult>, SpoError> {
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(quad)?;
    let mut out = Vec::new();
    out.push(
        membership_check(
            "q-matrix-identities",
            "Q'_{kl} - delta_{kl} Q' and Q''_{ij} - delta_{ij} Q'' lie in J(R) for all index pairs",
            &mut chk,
            &alg,
            &q_matrix_items(data),
            2,
        )
        .map_err(quad)?,
    );
    let diff = vec![("Q' - Q''".to_string(), q_prime(data, -1).sub(&q_double_prime(data, -1)))];
    out.push(membership_check("q-prime-equals-q-double-prime", "Q' - Q'' lies in J(R)", &mut chk, &alg, &diff, 2).map_err(quad)?);
    out.push(
        membership_check("antipode-inverse-products", "T'T = TT' = 1 (x) Q' modulo J(R), both orders", &mut chk, &alg, &tinv_items(data), 2)
            .map_err(quad)?,
    );
    let eps = counit(&data.idx, &q_prime(data, -1));
    out.push(CheckResult::new("counit-of-q", "epsilon(Q') = 1", SYMBOLIC, eps.is_one(), json!({"value": eps.to_string()})));
    out.push(check_rtilde_same_algebra(data)?);
    Ok(out)
}

fn quad(e: QuadError) -> SpoError {
    match e {
        QuadError::Scalar(s) => SpoError::Scalar(s),
        other => SpoError::InvalidMetric(other.to_string()),
    }
}

fn relation_span(idx: &GradedIndex, table: &CoeffTable<RF>) -> Echelon<DegLex, RF> {
    Echelon::from_vectors(relations_from_table(idx, table).into_iter().map(|(_, x)| -> SparseVec<DegLex, RF> {
        x.terms().iter().map(|(w, c)| (DegLex(w.clone()), c.clone())).collect()
    }))
}

/// Row spaces of the degree-2 relations of A(R) and A(R̃) coincide.
pub fn check_rtilde_same_algebra(data: &SpoData) -> Result<CheckResult, SpoError> {
    let rt = data.build_rtilde()?;
    let a = relation_span(&data.idx, &data.r_table());
    let b = relation_span(&data.idx, &matrix_to_coeff(&rt));
    let same = a.same_span(&b);
    Ok(CheckResult::new(
        "frt-rtilde",
        "A(R~) = A(R): equal relation row spaces in degree 2",
        SYMBOLIC,
        same,
        json!({"rank": a.rank(), "rank_tilde": b.rank()}),
    ))
}

/// Δ(Q′) − Q′⊗Q′ ∈ J⊗T + T⊗J and Q′t_{ij} − t_{ij}Q′ ∈ J(R).
pub fn check_q_properties(data: &SpoData, mode: &Mode) -> Result<Vec<CheckResult>, SpoError> {
    let idx = &data.idx;
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(quad)?;
    let qp = q_prime(data, -1);
    let gl = tensor_sub(&coproduct(idx, &qp), &tensor_of(&qp, &qp));
    let grouplike = chk.tensor_contains(&gl, 2).map_err(quad)?;
    let mut out = vec![CheckResult::new(
        "q-group-like",
        "Delta(Q') - Q' (x) Q' lies in J(R) (x) T + T (x) J(R) at bidegree (2,2)",
        mode.label(),
        grouplike,
        json!({"points": mode.points()}),
    )];
    let items: Vec<(String, Elem)> = idx
        .indices()
        .into_iter()
        .flat_map(|i| idx.indices().into_iter().map(move |j| (i, j)))
        .map(|(i, j)| {
            let g = t(idx, i, j);
            (format!("[Q', t({i},{j})]"), qp.mul(&g).sub(&g.mul(&qp)))
        })
        .collect();
    out.push(membership_check("q-central", "Q' t_{ij} - t_{ij} Q' lies in J(R) (degree 3)", &mut chk, &alg, &items, 3).map_err(quad)?);
    Ok(out)
}

/// Q′ built at every reference index agrees modulo J(R).
pub fn check_q_independence(data: &SpoData, mode: &Mode) -> Result<CheckResult, SpoError> {
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(quad)?;
    let base = q_prime(data, -1);
    let items: Vec<(String, Elem)> = data
        .idx
        .indices()
        .into_iter()
        .map(|k| (format!("Q'[{k}] - Q'[-1]"), q_prime(data, k).sub(&base)))
        .collect();
    membership_check("q-independence", "Q' does not depend on the reference index (modulo J(R))", &mut chk, &alg, &items, 2).map_err(quad)
}

/// Both constructions of T′ agree, and S² acts by d_i d_{−j}.
pub fn check_antipode(data: &SpoData) -> Result<Vec<CheckResult>, SpoError> {
    let idx = &data.idx;
    let formula = antipode_matrix(data);
    let via = antipode_via_supertranspose(data)?;
    let mut bad = Vec::new();
    for ((i, j), (c, (a, b))) in &formula {
        if via[&(*i, *j)] != t(idx, *a, *b).scale(c) {
            bad.push(json!([i, j]));
        }
    }
    let mut out = vec![CheckResult::new(
        "antipode-matrix",
        "t'_{ij} from the closed formula equals (F_r^-1 T^st F_r)_{ij}",
        SYMBOLIC,
        bad.is_empty(),
        json!({"mismatches": bad}),
    )];
    let s2 = s_squared(data);
    let mut bad2 = Vec::new();
    for ((i, j), c) in &s2 {
        let expect = data.d_i(*i).mul(&data.d_i(-*j));
        if *c != expect {
            bad2.push(json!({"i": i, "j": j, "got": c.to_string(), "expected": expect.to_string()}));
        }
    }
    out.push(CheckResult::new(
        "antipode-square",
        "S^2(t_{ij}) = d_i d_{-j} t_{ij}",
        SYMBOLIC,
        bad2.is_empty(),
        json!({"mismatches": bad2}),
    ));
    Ok(out)
}

/// Identities in SPO_q: (B_{kl} − C_{kl}) and (A_{ij} − σ_{ij}(C⁻¹)_{ij}) lie in the filtered ideal ≤ 2.
pub fn spo_items(data: &SpoData) -> Vec<(String, Elem)> {
    let idx = &data.idx;
    let mut items = Vec::new();
    for k in idx.indices() {
        for l in idx.indices() {
            let x = b_elem(data, k, l).sub(&FreeElement::scalar(data.c(k, l)));
            items.push((format!("B_({k},{l}) - C_({k},{l})"), x));
        }
    }
    for i in idx.indices() {
        for j in idx.indices() {
            let x = a_elem(data, i, j).sub(&FreeElement::scalar(data.cinv(i, j).sign_mul(idx.sigma_ij(i, j))));
            items.push((format!("A_({i},{j}) - sigma Cinv_({i},{j})"), x));
        }
    }
    items
}

pub fn check_spo_identities(data: &SpoData, mode: &Mode) -> Result<CheckResult, SpoError> {
    let alg = FrtAlgebra::new(data, true);
    let mut chk = alg.checker(mode).map_err(quad)?;
    membership_check(
        "spo-metric-identities",
        "sum sigma C t t - C and sum sigma Cinv t t - sigma Cinv lie in J_SPO (filtration <= 2)",
        &mut chk,
        &alg,
        &spo_items(data),
        2,
    )
    .map_err(quad)
}

fn square(idx: &GradedIndex, i: i32, j: i32) -> Word {
    vec![t_gen(idx, i, j), t_gen(idx, i, j)]
}

/// The four products t²_{2,−2}t²_{−2,−2}, t²_{2,−2}t²_{2,2}, t²_{−2,−2}t²_{−2,2}, t²_{2,2}t²_{−2,2}.
pub fn nilpotency_items(data: &SpoData) -> Vec<(String, Elem)> {
    let idx = &data.idx;
    [((2, -2), (-2, -2)), ((2, -2), (2, 2)), ((-2, -2), (-2, 2)), ((2, 2), (-2, 2))]
        .into_iter()
        .map(|((a, b), (c, d))| {
            let mut w = square(idx, a, b);
            w.extend(square(idx, c, d));
            (format!("t({a},{b})^2 t({c},{d})^2"), FreeElement::word(w))
        })
        .collect()
}

pub fn check_nilpotency(data: &SpoData, mode: &Mode) -> Result<CheckResult, SpoError> {
    if data.idx.r() < 2 {
        return Err(SpoError::InvalidMetric("nilpotency products need r >= 2".into()));
    }
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(quad)?;
    membership_check("nilpotent-products", "products of squares of odd-row generators vanish in A(R) (degree 4)", &mut chk, &alg, &nilpotency_items(data), 4)
        .map_err(quad)
}

/// Experiment: is t²_{2,−2} in the filtered SPO ideal ≤ 2? Reported, not asserted.
pub fn square_experiment(data: &SpoData, mode: &Mode) -> Result<serde_json::Value, SpoError> {
    let alg = FrtAlgebra::new(data, true);
    let mut chk = alg.checker(mode).map_err(quad)?;
    let x = FreeElement::word(square(&data.idx, 2, -2));
    let member = chk.contains(&x, 2).map_err(quad)?;
    Ok(json!({"element": "t(2,-2)^2", "degree_bound": 2, "mode": mode.label(), "in_ideal": member}))
}

/// Structural facts about Δ and ε on generators, and Δ(X) ∈ J⊗T + T⊗J.
pub fn check_bialgebra_structure(data: &SpoData, mode: &Mode) -> Result<Vec<CheckResult>, SpoError> {
    let idx = &data.idx;
    let mut coassoc = true;
    let mut counit_ok = true;
    let mut rescaled = true;
    for i in idx.indices() {
        for j in idx.indices() {
            let (l, r) = coassociativity_sides(idx, i, j);
            coassoc &= l == r;
            let d = coproduct_word::<RF>(idx, &[t_gen(idx, i, j)]);
            let mut left = FreeElement::zero();
            let mut right = FreeElement::zero();
            for ((a, b), c) in &d {
                left = left.add(&FreeElement::word(b.clone()).scale(&counit(idx, &FreeElement::<RF>::word(a.clone())).mul(c)));
                right = right.add(&FreeElement::word(a.clone()).scale(&counit(idx, &FreeElement::<RF>::word(b.clone())).mul(c)));
            }
            counit_ok &= left == t(idx, i, j) && right == t(idx, i, j);
            // t~_{ij} = σ(η_j, η_i − η_j) t_{ij} has Δ(t~_{ij}) = Σ_k t~_{ik} ⊗ t~_{kj}
            let resc = |a: i32, b: i32| sigma(idx.parity(b), pdiff(idx.parity(a), idx.parity(b)));
            let lhs: Tensor<RF> = d.iter().map(|(k, c)| (k.clone(), c.sign_mul(resc(i, j)))).collect();
            let mut rhs: Tensor<RF> = BTreeMap::new();
            for k in idx.indices() {
                rhs.insert((vec![t_gen(idx, i, k)], vec![t_gen(idx, k, j)]), RF::from_int((resc(i, k) * resc(k, j)) as i64));
            }
            rescaled &= lhs == rhs;
        }
    }
    let mut out = vec![
        CheckResult::new("coassociativity", "(Delta (x) id) Delta = (id (x) Delta) Delta on all generators", SYMBOLIC, coassoc, json!({})),
        CheckResult::new("counit-axiom", "(eps (x) id) Delta = id = (id (x) eps) Delta on all generators", SYMBOLIC, counit_ok, json!({})),
        CheckResult::new("rescaled-coproduct", "Delta(t~_{ij}) = sum_k t~_{ik} (x) t~_{kj}", SYMBOLIC, rescaled, json!({})),
    ];
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(quad)?;
    let mut bad = Vec::new();
    for (key, x) in relations_from_table(idx, &alg.table) {
        if !chk.tensor_contains(&coproduct(idx, &x), 2).map_err(quad)? {
            bad.push(json!(key));
            break;
        }
    }
    out.push(CheckResult::new(
        "biideal",
        "Delta(X_{ij,kl}) lies in J(R) (x) T + T (x) J(R) at bidegree (2,2)",
        mode.label(),
        bad.is_empty(),
        json!({"failures": bad, "points": mode.points()}),
    ));
    let dims = quotient_dims(&alg.presentation.map_scalars(|c| c.specialize(&crate::qscalars::rat(3, 1))).map_err(SpoError::Scalar)?, 0);
    out.push(CheckResult::new(
        "degree-zero-piece",
        "the degree-0 piece of A(R) is one-dimensional (no antipode in A(R))",
        SYMBOLIC,
        dims[0] == 1,
        json!({"dim": dims[0]}),
    ));
    Ok(out)
}

/// Dimension of the degree-2 piece of A(R) (computed at a specialization).
pub fn degree_two_dimension(data: &SpoData, q0: &BigRational) -> Result<usize, SpoError> {
    let alg = FrtAlgebra::new(data, false);
    let p = alg.presentation.specialize(q0)?;
    let dims = quotient_dims(&p, 2);
    Ok(dims[2] - dims[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedOperator;
    use crate::qscalars::rat;

    #[test]
    fn relation_parities_are_homogeneous() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let table = data.r_table();
        for ((i, j, k, l), x) in relations_from_table(idx, &table) {
            let expect = pdiff(idx.parity(k), idx.parity(i)) ^ pdiff(idx.parity(l), idx.parity(j));
            let ps: std::collections::BTreeSet<u8> = x.terms().keys().map(|w| word_parity(idx, w)).collect();
            assert_eq!(ps.len(), 1);
            assert_eq!(*ps.iter().next().unwrap(), expect);
        }
    }

    #[test]
    fn identity_r_gives_supercommutators() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let table = matrix_to_coeff(&GradedOperator::<RF>::identity(idx, 2));
        let alg = FrtAlgebra::from_table(&data, table, false);
        let mut chk = alg.checker(&Mode::Symbolic).unwrap();
        for i in idx.indices() {
            for j in idx.indices() {
                for k in idx.indices() {
                    for l in idx.indices() {
                        let s = sigma(t_parity(idx, i, j), t_parity(idx, k, l));
                        let x = tt(idx, i, j, k, l, RF::one()).sub(&tt(idx, k, l, i, j, RF::from_int(s as i64)));
                        assert!(chk.contains(&x, 2).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn generator_not_in_ideal() {
        let data = SpoData::standard(1, 0).unwrap();
        let alg = FrtAlgebra::new(&data, false);
        let mut chk = alg.checker(&Mode::Symbolic).unwrap();
        assert!(!chk.contains(&t(&data.idx, 1, -1), 1).unwrap());
        for x in &alg.presentation.relations {
            assert!(chk.contains(x, 2).unwrap());
        }
    }

    #[test]
    fn frt_identities_small() {
        for (n, m) in [(1, 0), (0, 1)] {
            let data = SpoData::standard(n, m).unwrap();
            for r in check_frt_identities(&data, &Mode::Symbolic).unwrap() {
                assert!(r.passed, "({n},{m}) {:?}", r);
            }
        }
    }

    #[test]
    fn antipode_small() {
        for (n, m) in [(1, 0), (0, 1), (1, 1)] {
            let data = SpoData::standard(n, m).unwrap();
            for r in check_antipode(&data).unwrap() {
                assert!(r.passed, "({n},{m}) {:?}", r);
            }
        }
    }

    #[test]
    fn bialgebra_structure_small() {
        let data = SpoData::standard(1, 0).unwrap();
        for r in check_bialgebra_structure(&data, &Mode::Symbolic).unwrap() {
            assert!(r.passed, "{:?}", r);
        }
    }

    #[test]
    fn q_properties_small() {
        let data = SpoData::standard(1, 0).unwrap();
        for r in check_q_properties(&data, &Mode::Symbolic).unwrap() {
            assert!(r.passed, "{:?}", r);
        }
        assert!(check_q_independence(&data, &Mode::Symbolic).unwrap().passed);
        assert!(check_spo_identities(&data, &Mode::Symbolic).unwrap().passed);
    }

    #[test]
    fn even_squares_are_not_nilpotent() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let alg = FrtAlgebra::new(&data, false);
        let mut chk = alg.checker(&Mode::Specialized(vec![rat(3, 1)])).unwrap();
        for (i, j) in [(1, 1), (2, 2), (1, -1)] {
            let g = t_gen(idx, i, j);
            assert!(!chk.contains(&FreeElement::word(vec![g; 4]), 4).unwrap(), "t({i},{j})^4");
        }
        let mut w = square(idx, 2, -2);
        w.extend(square(idx, 1, 1));
        assert!(!chk.contains(&FreeElement::word(w), 4).unwrap());
    }

    #[test]
    fn flipped_metric_breaks_q_matrix() {
        let data = SpoData::standard(1, 0).unwrap();
        let bad = crate::rmatrix::with_flipped_sign(&data, 1);
        let res = check_frt_identities(&bad, &Mode::Specialized(vec![rat(3, 1)])).unwrap();
        assert!(!res[0].passed);
    }

    #[test]
    fn coproduct_is_even_and_counital() {
        let data = SpoData::standard(1, 1).unwrap();
        let idx = &data.idx;
        let d = coproduct_word::<RF>(idx, &[t_gen(idx, 2, -1), t_gen(idx, 1, 2)]);
        for (a, b) in d.keys() {
            assert_eq!(word_parity(idx, a) ^ word_parity(idx, b), t_parity(idx, 2, -1) ^ t_parity(idx, 1, 2));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn counit_axiom_on_words(w in prop::collection::vec(0u16..16, 0..4)) {
                let data = SpoData::standard(1, 1).unwrap();
                let idx = &data.idx;
                let d = coproduct_word::<RF>(idx, &w);
                let mut left = FreeElement::zero();
                let mut right = FreeElement::zero();
                for ((a, b), c) in &d {
                    left = left.add(&FreeElement::word(b.clone()).scale(&counit(idx, &FreeElement::<RF>::word(a.clone())).mul(c)));
                    right = right.add(&FreeElement::word(a.clone()).scale(&counit(idx, &FreeElement::<RF>::word(b.clone())).mul(c)));
                }
                let x = FreeElement::word(w);
                prop_assert_eq!(&left, &x);
                prop_assert_eq!(&right, &x);
            }

            #[test]
            fn coproduct_preserves_parity(w in prop::collection::vec(0u16..16, 1..4)) {
                let data = SpoData::standard(1, 1).unwrap();
                let alpha = t_alphabet(&data.idx);
                let p = alpha.word_parity(&w);
                for ((a, b), _) in coproduct_word::<RF>(&data.idx, &w) {
                    prop_assert_eq!(alpha.word_parity(&a) ^ alpha.word_parity(&b), p);
                }
            }
        }
    }
}
