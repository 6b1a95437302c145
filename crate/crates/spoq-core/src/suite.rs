//! Named check suites shared by the CLI and the acceptance target.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::frt::{self, t_parity, tt, FrtAlgebra};
use crate::graded::{matrix_to_coeff, sigma, ybe_check, GradedOperator};
use crate::linalg::Echelon;
use crate::qscalars::{rat, rational_string, RationalFunction, Scalar};
use crate::quadalg::Mode;
use crate::report::{CheckResult, SYMBOLIC};
use crate::rform;
use crate::rmatrix::{self, SpoData, SpoError};
use crate::weyl::{self, QuadVec, Source};

type RF = RationalFunction;

/// First five primes: the default specialization set for heavy checks.
pub fn default_points() -> Vec<BigRational> {
    [2, 3, 5, 7, 11].iter().map(|&p| rat(p, 1)).collect()
}

/// `k` distinct rationals a/b with 2 ≤ a ≤ 97, 1 ≤ b ≤ 9, avoiding 0 and ±1,
/// drawn from a ChaCha stream seeded with `seed`.
pub fn random_points(seed: u64, k: usize) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BigRational> = Vec::new();
    while out.len() < k {
        let x = rat(rng.gen_range(2..=97), rng.gen_range(1..=9));
        if x != rat(1, 1) && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    RMatrix,
    Frt,
    Spo,
    RForm,
    Weyl,
    All,
}

impl Suite {
    pub fn includes(&self, s: Suite) -> bool {
        *self == Suite::All || *self == s
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub points: Points,
    pub max_degree: usize,
    pub max_len: usize,
    pub c: RF,
    /// Check r-form well-definedness on SPO (with Q − 1) rather than A(R).
    pub spo: bool,
}

/// How checks too large for symbolic elimination are run.
#[derive(Clone, Debug, PartialEq)]
pub enum Points {
    /// Symbolic when r = 1, default primes otherwise.
    Auto,
    Symbolic,
    Specialized(Vec<BigRational>),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { points: Points::Auto, max_degree: 5, max_len: 2, c: RF::zero(), spo: true }
    }
}

impl SuiteConfig {
    /// Mode for checks whose ideal pieces grow quickly with r.
    pub fn heavy_mode(&self, data: &SpoData) -> Mode {
        match &self.points {
            Points::Specialized(p) => Mode::Specialized(p.clone()),
            Points::Symbolic => Mode::Symbolic,
            Points::Auto if data.idx.r() <= 1 => Mode::Symbolic,
            Points::Auto => Mode::Specialized(default_points()),
        }
    }
}

/// A finished check together with its wall-clock time.
#[derive(Clone, Debug)]
pub struct Timed {
    pub result: CheckResult,
    pub elapsed: Duration,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn push_all(out: &mut Vec<Timed>, rs: Vec<CheckResult>, d: Duration) {
    let k = rs.len().max(1) as u32;
    out.extend(rs.into_iter().map(|result| Timed { result, elapsed: d / k }));
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

fn witness_json<F: Scalar>(w: &Option<(Vec<i32>, Vec<i32>, F, F)>) -> serde_json::Value {
    match w {
        None => json!(null),
        Some((u, s, a, b)) => json!({"row": u, "col": s, "R12R13R23": a.to_string(), "R23R13R12": b.to_string()}),
    }
}

/// Graded Yang–Baxter equation in matrix and braid form.
pub fn check_ybe(r: &GradedOperator<RF>) -> Result<CheckResult, SpoError> {
    let rep = ybe_check(r)?;
    Ok(CheckResult::new(
        "graded-ybe",
        "R12 R13 R23 = R23 R13 R12 and the braid relation for R^ = P R",
        SYMBOLIC,
        rep.holds && rep.braid_holds,
        json!({"matrix_form": rep.holds, "braid_form": rep.braid_holds, "witness": witness_json(&rep.witness)}),
    ))
}

pub fn check_q_one(data: &SpoData) -> Result<CheckResult, SpoError> {
    let one = rat(1, 1);
    let r1 = data.build_r().specialize(&one)?;
    let id = GradedOperator::identity(&data.idx, 2);
    let diff = r1.first_difference(&id);
    Ok(CheckResult::new(
        "r-at-q-one",
        "R specializes to the identity at q = 1",
        SYMBOLIC,
        diff.is_none(),
        json!({"witness": witness_json(&diff)}),
    ))
}

pub fn check_rhat_routes(data: &SpoData) -> CheckResult {
    let a = data.build_rhat();
    let b = data.build_rhat_expansion();
    CheckResult::new("rhat-expansion", "P R equals the elementary-matrix expansion of R^", SYMBOLIC, a == b, json!({"nnz": a.nnz()}))
}

pub fn check_minpoly(data: &SpoData) -> Result<Vec<CheckResult>, SpoError> {
    let mp = rmatrix::minpoly_rhat(data, 4)?;
    let deg = mp.len() - 1;
    let mut out = vec![CheckResult::new(
        "rhat-minimal-polynomial",
        "minimal polynomial of R^ has degree <= 3",
        SYMBOLIC,
        deg <= 3,
        json!({"degree": deg, "coefficients": mp.iter().map(|c| c.to_string()).collect::<Vec<_>>()}),
    )];
    out.push(check_k_span(data, "k-in-hecke-span"));
    Ok(out)
}

pub fn check_k_span(data: &SpoData, anchor: &str) -> CheckResult {
    match rmatrix::k_in_hecke_span(data) {
        Ok(c) => CheckResult::new(
            anchor,
            "K = a id + b R^ + c R^2",
            SYMBOLIC,
            true,
            json!({"coefficients": c.iter().map(|x| x.to_string()).collect::<Vec<_>>()}),
        ),
        Err(e) => CheckResult::new(anchor, "K = a id + b R^ + c R^2", SYMBOLIC, false, json!({"error": e.to_string()})),
    }
}

/// With R = id the FRT relations are exactly the graded commutators.
pub fn check_frt_identity_limit(data: &SpoData) -> Result<CheckResult, SpoError> {
    let idx = &data.idx;
    let table = matrix_to_coeff(&GradedOperator::<RF>::identity(idx, 2));
    let alg = FrtAlgebra::from_table(data, table, false);
    let mut chk = alg.checker(&Mode::Symbolic).map_err(quad)?;
    let mut items = Vec::new();
    for i in idx.indices() {
        for j in idx.indices() {
            for k in idx.indices() {
                for l in idx.indices() {
                    let s = sigma(t_parity(idx, i, j), t_parity(idx, k, l));
                    let x = tt(idx, i, j, k, l, RF::one()).sub(&tt(idx, k, l, i, j, RF::from_int(s as i64)));
                    if !x.is_zero() {
                        items.push((format!("[t({i},{j}), t({k},{l})]"), x));
                    }
                }
            }
        }
    }
    let mut r = frt::membership_check("frt-identity-limit", "A(id): graded commutators lie in J(id)", &mut chk, &alg, &items, 2).map_err(quad)?;
    // and conversely every relation of A(id) is a graded commutator: equal ranks
    let span = Echelon::from_vectors(items.iter().map(|(_, x)| x.terms().iter().map(|(w, c)| (w.clone(), c.clone())).collect()));
    let rels = Echelon::from_vectors(alg.presentation.relations.iter().map(|x| x.terms().iter().map(|(w, c)| (w.clone(), c.clone())).collect()));
    let same = span.same_span(&rels);
    r.passed &= same;
    r.detail["same_span"] = json!(same);
    Ok(r)
}

/// Weyl relations at q = 1, c = 0 are the graded commutators x_i x_j − σ_{ij} x_j x_i.
pub fn check_weyl_q_one(data: &SpoData) -> Result<CheckResult, SpoError> {
    let idx = &data.idx;
    let one = rat(1, 1);
    let w = weyl::build_weyl(data, &RF::zero(), Source::Kulish);
    let span: Echelon<Vec<i32>, BigRational> =
        Echelon::from_vectors(w.vectors().iter().map(|v| weyl::specialize_vec(v, &one)).collect::<Result<Vec<_>, _>>()?);
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
    let same = span.same_span(&Echelon::from_vectors(sc));
    Ok(CheckResult::new("weyl-q-one-limit", "Weyl relations at q = 1, c = 0 are the graded commutators", SYMBOLIC, same, json!({"rank": span.rank()})))
}

/// One perturbed R entry must break the YBE (with a witness).
pub fn control_perturbed_ybe(data: &SpoData) -> Result<CheckResult, SpoError> {
    let bad = rmatrix::perturbed_r(data, (1, -1, 1, -1));
    let mut r = check_ybe(&bad)?;
    r.anchor = "control-perturbed-ybe".into();
    r.description = "perturbing one R entry breaks the YBE (expected failure)".into();
    Ok(r)
}

/// A sign-flipped metric must leave K outside span{id, R̂, R̂²}.
pub fn control_flipped_metric(data: &SpoData) -> CheckResult {
    let bad = rmatrix::with_flipped_sign(data, 1);
    let mut r = check_k_span(&bad, "control-flipped-metric");
    r.description = "with c_1 sign-flipped, K in span{id, R^, R^2} (expected failure)".into();
    r
}

/// Dropping the last system-(I) relation changes the filtered dimensions.
pub fn control_dropped_relation(data: &SpoData, c: &RF, max_d: usize) -> Result<CheckResult, SpoError> {
    let mut w = weyl::build_weyl(data, c, Source::SystemOne);
    let dropped = w.relations.pop().map(|(tag, _)| tag);
    let mut r = weyl::pbw_check(&w, max_d, &Mode::Specialized(vec![rat(3, 1)]))?;
    r.anchor = "control-dropped-relation".into();
    r.description = format!("PBW dimensions with {} removed (expected failure)", dropped.unwrap_or_default());
    Ok(r)
}

fn quad(e: crate::quadalg::QuadError) -> SpoError {
    SpoError::InvalidMetric(e.to_string())
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

pub fn rmatrix_suite(data: &SpoData) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    let (r, d) = timed(|| check_ybe(&data.build_r()));
    push_all(&mut out, vec![r?], d);
    let (r, d) = timed(|| check_q_one(data));
    push_all(&mut out, vec![r?, check_rhat_routes(data)], d);
    let (r, d) = timed(|| check_minpoly(data));
    push_all(&mut out, r?, d);
    Ok(out)
}

pub fn frt_suite(data: &SpoData, cfg: &SuiteConfig) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    // a broken metric shows up first as a YBE failure
    let (r, d) = timed(|| check_ybe(&data.build_r()));
    push_all(&mut out, vec![r?], d);
    let light = if data.idx.r() <= 2 { Mode::Symbolic } else { cfg.heavy_mode(data) };
    let (r, d) = timed(|| frt::check_frt_identities(data, &light));
    push_all(&mut out, r?, d);
    let (r, d) = timed(|| frt::check_q_independence(data, &light));
    push_all(&mut out, vec![r?], d);
    let (r, d) = timed(|| frt::check_antipode(data));
    push_all(&mut out, r?, d);
    let (r, d) = timed(|| frt::check_bialgebra_structure(data, &cfg.heavy_mode(data)));
    push_all(&mut out, r?, d);
    let (r, d) = timed(|| frt::check_q_properties(data, &cfg.heavy_mode(data)));
    push_all(&mut out, r?, d);
    if data.idx.n == 1 && data.idx.m == 1 {
        let (r, d) = timed(|| frt::check_nilpotency(data, &cfg.heavy_mode(data)));
        push_all(&mut out, vec![r?], d);
    }
    let (r, d) = timed(|| check_frt_identity_limit(data));
    push_all(&mut out, vec![r?], d);
    Ok(out)
}

pub fn spo_suite(data: &SpoData, cfg: &SuiteConfig) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    let (r, d) = timed(|| frt::check_spo_identities(data, &cfg.heavy_mode(data)));
    push_all(&mut out, vec![r?], d);
    let (r, d) = timed(|| frt::check_antipode(data));
    push_all(&mut out, r?.into_iter().filter(|x| x.anchor == "antipode-square").collect(), d);
    Ok(out)
}

pub fn rform_suite(data: &SpoData, cfg: &SuiteConfig) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    let (r, d) = timed(|| rform::rform_axioms(data));
    push_all(&mut out, r?, d);
    let (r, d) = timed(|| {
        let mut rho = rform::rform_of(data);
        rform::rform_welldefined(data, &data.r_table(), cfg.max_len, cfg.spo, &mut rho)
    });
    push_all(&mut out, vec![r], d);
    let (r, d) = timed(|| rform::check_comrel(data, &cfg.heavy_mode(data)));
    push_all(&mut out, vec![r?], d);
    Ok(out)
}

pub fn weyl_suite(data: &SpoData, cfg: &SuiteConfig) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    let c = &cfg.c;
    let (r, d) = timed(|| weyl::weyl_equivalences(data, c));
    push_all(&mut out, r, d);
    let (r, d) = timed(|| weyl::check_canonical_image(data, c));
    push_all(&mut out, vec![r], d);
    let (r, d) = timed(|| weyl::weyl_comodule_check(data, c, &cfg.heavy_mode(data)));
    push_all(&mut out, r?, d);
    let (r, d) = timed(|| weyl::endo_check(data, &data.build_rhat(), &cfg.heavy_mode(data)));
    push_all(&mut out, vec![r?], d);
    let pbw_mode = if data.idx.r() <= 1 { Mode::Symbolic } else { Mode::Specialized(vec![cfg.heavy_mode(data).points_or_default()]) };
    let (r, d) = timed(|| weyl::pbw_check(&weyl::build_weyl(data, c, Source::Kulish), cfg.max_degree, &pbw_mode));
    push_all(&mut out, vec![r?], d);
    if c.is_zero() {
        let (r, d) = timed(|| check_weyl_q_one(data));
        push_all(&mut out, vec![r?], d);
    }
    Ok(out)
}

/// Run a suite; the report lists checks in a fixed order.
pub fn run_suite(data: &SpoData, suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Timed>, SpoError> {
    let mut out = Vec::new();
    if suite.includes(Suite::RMatrix) {
        out.extend(rmatrix_suite(data)?);
    }
    if suite.includes(Suite::Frt) {
        out.extend(frt_suite(data, cfg)?);
    }
    if suite.includes(Suite::Spo) {
        out.extend(spo_suite(data, cfg)?);
    }
    if suite.includes(Suite::RForm) {
        out.extend(rform_suite(data, cfg)?);
    }
    if suite.includes(Suite::Weyl) {
        out.extend(weyl_suite(data, cfg)?);
    }
    Ok(out)
}

pub fn points_string(ps: &[BigRational]) -> String {
    ps.iter().map(rational_string).collect::<Vec<_>>().join(",")
}

impl Mode {
    /// First specialization point, or q = 3 in symbolic mode.
    pub fn points_or_default(&self) -> BigRational {
        match self {
            Mode::Specialized(p) if !p.is_empty() => p[0].clone(),
            _ => rat(3, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_are_reproducible_and_admissible() {
        let a = random_points(42, 5);
        assert_eq!(a, random_points(42, 5));
        assert_ne!(a, random_points(43, 5));
        for (i, x) in a.iter().enumerate() {
            assert!(*x != rat(0, 1) && *x != rat(1, 1) && *x != rat(-1, 1));
            assert!(!a[..i].contains(x));
        }
    }

    #[test]
    fn rmatrix_suite_one_zero() {
        let data = SpoData::standard(1, 0).unwrap();
        for t in rmatrix_suite(&data).unwrap() {
            assert!(t.result.passed, "{:?}", t.result);
        }
    }

    #[test]
    fn controls_fail() {
        let data = SpoData::standard(1, 0).unwrap();
        let r = control_perturbed_ybe(&data).unwrap();
        assert!(!r.passed && !r.detail["witness"].is_null());
        assert!(!control_flipped_metric(&data).passed);
        assert!(!control_dropped_relation(&data, &RF::zero(), 3).unwrap().passed);
    }
}
