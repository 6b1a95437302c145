//! The universal r-form ρ on A(R): generator table, recursive evaluation on
//! words, and the coquasitriangularity axioms.

use std::collections::HashMap;

use serde_json::json;

use crate::frt::{a_elem, antipode_matrix, b_elem, coproduct_gen, counit, q_prime, relations_from_table, t_gen, t_indices, t_parity, FrtAlgebra};
use crate::graded::{matrix_to_coeff, pdiff, sigma, CoeffTable, GradedIndex};
use crate::quadalg::{FreeElement, Mode, Word};
use crate::qscalars::{RationalFunction, Scalar};
use crate::report::{CheckResult, SYMBOLIC};
use crate::rmatrix::{SpoData, SpoError};

type RF = RationalFunction;

/// ρ on generator pairs, extended to words by the multiplicativity rules
/// ρ(g a′, b) = Σ σ(deg a′, deg b¹) ρ(g, b¹) ρ(a′, b²) and
/// ρ(g, b₀ b′) = Σ ρ(g¹, b′) ρ(g², b₀). Results are memoized.
pub struct RForm<F: Scalar> {
    idx: GradedIndex,
    table: HashMap<(u16, u16), F>,
    memo: HashMap<(Word, Word), F>,
}

impl<F: Scalar> RForm<F> {
    /// ρ(t_{ik}, t_{jl}) = σ(η_i − η_k, η_j − η_l) R_{ij,kl}
    pub fn from_r_table(idx: &GradedIndex, r: &CoeffTable<F>) -> Self {
        let mut table = HashMap::new();
        for (&(i, j, k, l), v) in r {
            let s = sigma(t_parity(idx, i, k), t_parity(idx, j, l));
            table.insert((t_gen(idx, i, k), t_gen(idx, j, l)), v.sign_mul(s));
        }
        RForm { idx: idx.clone(), table, memo: HashMap::new() }
    }

    /// ρ′(a, b) = σ(deg a, deg b) ρ̃(b, a) on generators, with ρ̃ built from R̃.
    pub fn inverse_from_rtilde(idx: &GradedIndex, rtilde: &CoeffTable<F>) -> Self {
        let tilde = Self::from_r_table(idx, rtilde);
        let mut table = HashMap::new();
        for (&(a, b), v) in &tilde.table {
            let (ai, aj) = t_indices(idx, a);
            let (bi, bj) = t_indices(idx, b);
            let s = sigma(t_parity(idx, ai, aj), t_parity(idx, bi, bj));
            table.insert((b, a), v.sign_mul(s));
        }
        RForm { idx: idx.clone(), table, memo: HashMap::new() }
    }

    pub fn gen_value(&self, a: u16, b: u16) -> F {
        self.table.get(&(a, b)).cloned().unwrap_or_else(F::zero)
    }

    fn parity(&self, w: &[u16]) -> u8 {
        w.iter().fold(0, |p, &g| {
            let (i, j) = t_indices(&self.idx, g);
            p ^ t_parity(&self.idx, i, j)
        })
    }

    fn counit_word(&self, w: &[u16]) -> F {
        if w.iter().all(|&g| {
            let (i, j) = t_indices(&self.idx, g);
            i == j
        }) {
            F::one()
        } else {
            F::zero()
        }
    }

    /// Δ of a word with graded product signs (words of the same length).
    fn split(&self, w: &[u16]) -> Vec<(Word, Word, i32)> {
        let mut acc: Vec<(Word, Word, i32)> = vec![(vec![], vec![], 1)];
        for &g in w {
            let (i, j) = t_indices(&self.idx, g);
            let mut next = Vec::with_capacity(acc.len() * self.idx.dim());
            for (a, b, s) in &acc {
                let pb = self.parity(b);
                for (k, sk) in coproduct_gen(&self.idx, i, j) {
                    let mut a2 = a.clone();
                    a2.push(t_gen(&self.idx, i, k));
                    let mut b2 = b.clone();
                    b2.push(t_gen(&self.idx, k, j));
                    next.push((a2, b2, s * sk * sigma(pb, t_parity(&self.idx, i, k))));
                }
            }
            acc = next;
        }
        acc
    }

    /// ρ on a pair of words.
    pub fn eval_words(&mut self, a: &[u16], b: &[u16]) -> F {
        if a.is_empty() {
            return self.counit_word(b);
        }
        if b.is_empty() {
            return self.counit_word(a);
        }
        if a.len() == 1 && b.len() == 1 {
            return self.gen_value(a[0], b[0]);
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut acc = F::zero();
        if a.len() >= 2 {
            let (g, rest) = (&a[..1], &a[1..]);
            let pr = self.parity(rest);
            for (b1, b2, s) in self.split(b) {
                let x = self.eval_words(g, &b1);
                if x.is_zero() {
                    continue;
                }
                let y = self.eval_words(rest, &b2);
                acc = acc.add(&x.mul(&y).sign_mul(s * sigma(pr, self.parity(&b1))));
            }
        } else {
            let (b0, rest) = (&b[..1], &b[1..]);
            for (a1, a2, s) in self.split(a) {
                let x = self.eval_words(&a1, rest);
                if x.is_zero() {
                    continue;
                }
                let y = self.eval_words(&a2, b0);
                acc = acc.add(&x.mul(&y).sign_mul(s));
            }
        }
        self.memo.insert(key, acc.clone());
        acc
    }

    /// Alternative evaluation that always peels the right argument first
    /// (used as an order-consistency oracle).
    pub fn eval_words_right_first(&mut self, a: &[u16], b: &[u16]) -> F {
        if a.is_empty() {
            return self.counit_word(b);
        }
        if b.is_empty() {
            return self.counit_word(a);
        }
        if a.len() == 1 && b.len() == 1 {
            return self.gen_value(a[0], b[0]);
        }
        let mut acc = F::zero();
        if b.len() >= 2 {
            let (b0, rest) = (&b[..1], &b[1..]);
            for (a1, a2, s) in self.split(a) {
                let x = self.eval_words_right_first(&a1, rest);
                if x.is_zero() {
                    continue;
                }
                let y = self.eval_words_right_first(&a2, b0);
                acc = acc.add(&x.mul(&y).sign_mul(s));
            }
        } else {
            let (g, rest) = (&a[..1], &a[1..]);
            let pr = self.parity(rest);
            for (b1, b2, s) in self.split(b) {
                let x = self.eval_words_right_first(g, &b1);
                if x.is_zero() {
                    continue;
                }
                let y = self.eval_words_right_first(rest, &b2);
                acc = acc.add(&x.mul(&y).sign_mul(s * sigma(pr, self.parity(&b1))));
            }
        }
        acc
    }

    /// Bilinear extension.
    pub fn eval(&mut self, a: &FreeElement<F>, b: &FreeElement<F>) -> F {
        let mut acc = F::zero();
        for (u, x) in a.terms() {
            for (v, y) in b.terms() {
                let r = self.eval_words(u, v);
                if !r.is_zero() {
                    acc = acc.add(&r.mul(x).mul(y));
                }
            }
        }
        acc
    }
}

pub fn rform_of(data: &SpoData) -> RForm<RF> {
    RForm::from_r_table(&data.idx, &data.r_table())
}

pub fn rform_inverse_of(data: &SpoData) -> Result<RForm<RF>, SpoError> {
    Ok(RForm::inverse_from_rtilde(&data.idx, &matrix_to_coeff(&data.build_rtilde()?)))
}

fn gens(idx: &GradedIndex) -> Vec<(i32, i32)> {
    idx.indices().into_iter().flat_map(|i| idx.indices().into_iter().map(move |j| (i, j))).collect()
}

fn words_up_to(ngen: usize, d: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..d {
        layer = layer
            .into_iter()
            .flat_map(|w| {
                (0..ngen as u16).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// ρ vanishes on (relation, word) and (word, relation) for words of length
/// ≤ max_len; ρ preserves weight, so only weight-balanced pairs are evaluated.
/// In SPO mode the elements B_{kl} − C_{kl}, A_{ij} − σ(C⁻¹)_{ij} and Q′ − 1 are
/// additionally paired against all generators.
pub fn rform_welldefined(data: &SpoData, table: &CoeffTable<RF>, max_len: usize, spo: bool, rho: &mut RForm<RF>) -> CheckResult {
    let idx = &data.idx;
    let ngen = idx.dim() * idx.dim();
    let rels: Vec<(String, FreeElement<RF>)> =
        relations_from_table(idx, table).into_iter().map(|(k, x)| (format!("X{k:?}"), x)).collect();
    let words = words_up_to(ngen, max_len);
    let mut bad = Vec::new();
    let mut evaluated = 0usize;
    let balanced = |x: &FreeElement<RF>, w: &Word| -> bool {
        let mut bal = vec![0i32; idx.r() as usize];
        let mut acc = |ws: &[u16]| {
            for &g in ws {
                let (i, j) = t_indices(idx, g);
                bal[i.unsigned_abs() as usize - 1] += i.signum();
                bal[j.unsigned_abs() as usize - 1] -= j.signum();
            }
        };
        acc(x.terms().keys().next().map(|v| v.as_slice()).unwrap_or(&[]));
        acc(w);
        bal.iter().all(|&b| b == 0)
    };
    for (label, x) in &rels {
        for w in &words {
            if !balanced(x, w) {
                continue;
            }
            evaluated += 1;
            let u = FreeElement::word(w.clone());
            let l = rho.eval(x, &u);
            let r = rho.eval(&u, x);
            if !l.is_zero() || !r.is_zero() {
                bad.push(json!({"relation": label, "word": w, "left": l.to_string(), "right": r.to_string()}));
                break;
            }
        }
        if bad.len() >= 3 {
            break;
        }
    }
    if spo {
        let mut extra: Vec<(String, FreeElement<RF>)> = vec![("Q' - 1".into(), q_prime(data, -1).sub(&FreeElement::one()))];
        for k in idx.indices() {
            for l in idx.indices() {
                extra.push((format!("B({k},{l}) - C"), b_elem(data, k, l).sub(&FreeElement::scalar(data.c(k, l)))));
                extra.push((
                    format!("A({k},{l}) - sigma Cinv"),
                    a_elem(data, k, l).sub(&FreeElement::scalar(data.cinv(k, l).sign_mul(idx.sigma_ij(k, l)))),
                ));
            }
        }
        for (label, x) in &extra {
            for (i, j) in gens(idx) {
                let u = crate::frt::t(idx, i, j);
                evaluated += 1;
                let l = rho.eval(x, &u);
                let r = rho.eval(&u, x);
                if !l.is_zero() || !r.is_zero() {
                    bad.push(json!({"element": label, "generator": [i, j], "left": l.to_string(), "right": r.to_string()}));
                }
            }
        }
    }
    CheckResult::new(
        if spo { "rform-welldefined-spo" } else { "rform-welldefined" },
        format!("rho vanishes on relations paired with words of length <= {max_len}"),
        SYMBOLIC,
        bad.is_empty(),
        json!({"pairs": evaluated, "failures": bad}),
    )
}

/// Generator table, unit laws, convolution inverse and the antipode
/// compatibility ρ(S(a), b) = ρ′(a, b).
pub fn rform_axioms(data: &SpoData) -> Result<Vec<CheckResult>, SpoError> {
    let idx = &data.idx;
    let table = data.r_table();
    let mut rho = rform_of(data);
    let rhop = rform_inverse_of(data)?;
    let gs = gens(idx);
    let p = |x: i32| idx.parity(x);

    let mut table_ok = true;
    for &(i, k) in &gs {
        for &(j, l) in &gs {
            let r = table.get(&(i, j, k, l)).cloned().unwrap_or_else(RF::zero);
            let s = sigma(pdiff(p(i), p(k)), pdiff(p(j), p(l)));
            table_ok &= rho.eval_words(&[t_gen(idx, i, k)], &[t_gen(idx, j, l)]) == r.sign_mul(s);
        }
    }
    let mut unit_ok = rho.eval_words(&[], &[]).is_one();
    for &(i, j) in &gs {
        let g = [t_gen(idx, i, j)];
        let e = if i == j { RF::one() } else { RF::zero() };
        unit_ok &= rho.eval_words(&g, &[]) == e && rho.eval_words(&[], &g) == e;
    }

    // Σ σ(α², β¹) ρ(a¹, b¹) ρ′(a², b²) = ε(a)ε(b), and with ρ, ρ′ swapped
    let mut inv_bad = Vec::new();
    for &(i, k) in &gs {
        for &(j, l) in &gs {
            let expect = if i == k && j == l { RF::one() } else { RF::zero() };
            for swapped in [false, true] {
                let mut acc = RF::zero();
                for (x, sx) in coproduct_gen(idx, i, k) {
                    for (y, sy) in coproduct_gen(idx, j, l) {
                        let a1 = t_gen(idx, i, x);
                        let a2 = t_gen(idx, x, k);
                        let b1 = t_gen(idx, j, y);
                        let b2 = t_gen(idx, y, l);
                        let s = sx * sy * sigma(t_parity(idx, x, k), t_parity(idx, j, y));
                        let (f1, f2) = if swapped { (&rhop, &rho) } else { (&rho, &rhop) };
                        let v = f1.gen_value(a1, b1).mul(&f2.gen_value(a2, b2));
                        acc = acc.add(&v.sign_mul(s));
                    }
                }
                if acc != expect {
                    inv_bad.push(json!({"a": [i, k], "b": [j, l], "swapped": swapped, "value": acc.to_string()}));
                }
            }
        }
    }

    // ρ(S(t_{ik}), t_{jl}) = ρ′(t_{ik}, t_{jl})
    let s = antipode_matrix(data);
    let mut anti_bad = Vec::new();
    for &(i, k) in &gs {
        let (c, (a, b)) = &s[&(i, k)];
        for &(j, l) in &gs {
            let lhs = rho.gen_value(t_gen(idx, *a, *b), t_gen(idx, j, l)).mul(c);
            let rhs = rhop.gen_value(t_gen(idx, i, k), t_gen(idx, j, l));
            if lhs != rhs {
                anti_bad.push(json!({"a": [i, k], "b": [j, l], "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
            }
        }
    }

    Ok(vec![
        CheckResult::new("rform-generator-table", "rho(t_ik, t_jl) = sigma(eta_i - eta_k, eta_j - eta_l) R_{ij,kl}", SYMBOLIC, table_ok, json!({})),
        CheckResult::new("rform-unit", "rho(a,1) = rho(1,a) = eps(a)", SYMBOLIC, unit_ok, json!({})),
        CheckResult::new(
            "rform-convolution-inverse",
            "rho * rho' = rho' * rho = eps (x) eps on generator pairs",
            SYMBOLIC,
            inv_bad.is_empty(),
            json!({"failures": inv_bad.iter().take(3).collect::<Vec<_>>()}),
        ),
        CheckResult::new(
            "rform-antipode",
            "rho(S(a), b) = rho'(a, b) on generator pairs",
            SYMBOLIC,
            anti_bad.is_empty(),
            json!({"failures": anti_bad.iter().take(3).collect::<Vec<_>>()}),
        ),
    ])
}

/// Generalized commutation relation on generator pairs:
/// Σ σ(α², β¹) ρ(a¹, b¹) a² b² − Σ σ(α¹ + α², β¹) b¹ a¹ ρ(a², b²) ∈ J(R).
pub fn comrel_items(data: &SpoData) -> Vec<(String, FreeElement<RF>)> {
    let idx = &data.idx;
    let rho = rform_of(data);
    let gs = gens(idx);
    let mut items = Vec::new();
    for &(i, k) in &gs {
        for &(j, l) in &gs {
            let mut e = FreeElement::zero();
            for (x, sx) in coproduct_gen(idx, i, k) {
                for (y, sy) in coproduct_gen(idx, j, l) {
                    let (a1, a2) = (t_gen(idx, i, x), t_gen(idx, x, k));
                    let (b1, b2) = (t_gen(idx, j, y), t_gen(idx, y, l));
                    let (pa1, pa2, pb1) = (t_parity(idx, i, x), t_parity(idx, x, k), t_parity(idx, j, y));
                    let v = rho.gen_value(a1, b1);
                    if !v.is_zero() {
                        e.add_term(vec![a2, b2], v.sign_mul(sx * sy * sigma(pa2, pb1)));
                    }
                    let w = rho.gen_value(a2, b2);
                    if !w.is_zero() {
                        e.add_term(vec![b1, a1], w.sign_mul(-sx * sy * sigma(pa1 ^ pa2, pb1)));
                    }
                }
            }
            items.push((format!("comrel(t({i},{k}), t({j},{l}))"), e));
        }
    }
    items
}

pub fn check_comrel(data: &SpoData, mode: &Mode) -> Result<CheckResult, SpoError> {
    let alg = FrtAlgebra::new(data, false);
    let mut chk = alg.checker(mode).map_err(|e| SpoError::InvalidMetric(e.to_string()))?;
    crate::frt::membership_check(
        "rform-commutation",
        "generalized commutation relation on generator pairs holds modulo J(R)",
        &mut chk,
        &alg,
        &comrel_items(data),
        2,
    )
    .map_err(|e| SpoError::InvalidMetric(e.to_string()))
}

/// ε applied to relations (a cheap necessary condition for well-definedness).
pub fn relations_have_zero_counit(data: &SpoData) -> bool {
    relations_from_table(&data.idx, &data.r_table()).iter().all(|(_, x)| counit(&data.idx, x).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::perturbed_r;

    #[test]
    fn generator_values() {
        let data = SpoData::standard(1, 0).unwrap();
        let idx = &data.idx;
        let mut rho = rform_of(&data);
        assert_eq!(rho.eval_words(&[t_gen(idx, 1, 1)], &[t_gen(idx, 1, 1)]), RF::q());
        assert_eq!(rho.eval_words(&[t_gen(idx, 1, 1)], &[]), RF::one());
        assert!(rho.eval_words(&[t_gen(idx, 1, -1)], &[]).is_zero());
    }

    #[test]
    fn evaluation_orders_agree() {
        for (n, m) in [(1, 0), (0, 1), (1, 1)] {
            let data = SpoData::standard(n, m).unwrap();
            let idx = &data.idx;
            let mut rho = rform_of(&data);
            let mut rho2 = rform_of(&data);
            let gs: Vec<u16> = (0..(idx.dim() * idx.dim()) as u16).collect();
            for (s, &a) in gs.iter().enumerate() {
                let b = gs[(s * 7 + 3) % gs.len()];
                let c = gs[(s * 5 + 1) % gs.len()];
                let d = gs[(s * 3 + 2) % gs.len()];
                assert_eq!(rho.eval_words(&[a, b], &[c, d]), rho2.eval_words_right_first(&[a, b], &[c, d]), "({n},{m})");
            }
        }
    }

    #[test]
    fn axioms_small() {
        for (n, m) in [(1, 0), (0, 1), (1, 1)] {
            let data = SpoData::standard(n, m).unwrap();
            for r in rform_axioms(&data).unwrap() {
                assert!(r.passed, "({n},{m}) {:?}", r);
            }
        }
    }

    #[test]
    fn welldefined_small() {
        let data = SpoData::standard(1, 0).unwrap();
        let mut rho = rform_of(&data);
        assert!(rform_welldefined(&data, &data.r_table(), 2, true, &mut rho).passed);
        assert!(relations_have_zero_counit(&data));
    }

    #[test]
    fn comrel_small() {
        let data = SpoData::standard(1, 0).unwrap();
        assert!(check_comrel(&data, &Mode::Symbolic).unwrap().passed);
    }

    #[test]
    fn perturbed_r_breaks_welldefinedness() {
        let data = SpoData::standard(1, 0).unwrap();
        let bad = matrix_to_coeff(&perturbed_r(&data, (1, 1, 1, 1)));
        let mut rho = RForm::from_r_table(&data.idx, &bad);
        assert!(!rform_welldefined(&data, &bad, 2, false, &mut rho).passed);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn left_and_right_expansions_agree(a in prop::collection::vec(0u16..16, 0..3), b in prop::collection::vec(0u16..16, 0..3)) {
                let data = SpoData::standard(1, 1).unwrap();
                let mut rho = rform_of(&data);
                let mut oracle = rform_of(&data);
                prop_assert_eq!(rho.eval_words(&a, &b), oracle.eval_words_right_first(&a, &b));
            }
        }
    }
}
