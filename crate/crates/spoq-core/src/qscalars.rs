//! Exact arithmetic in Q(q): Laurent polynomials with rational coefficients,
//! rational functions in canonical form, and specialization at rational q.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {0}")]
    Pole(String),
    #[error("cannot specialize a Laurent expression at q = 0")]
    ZeroSpecialization,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Field operations shared by exact scalars. Every algorithm above this
/// module is generic over it, so the same code runs over Q(q) or over Q at a
/// specialization.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;

    fn div(&self, o: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&o.inv()?))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn sign_mul(&self, s: i32) -> Self {
        if s < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        if Zero::is_zero(self) {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(format!("not a rational: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(BigRational::new(a, b))
    } else {
        Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
    }
}

pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials
// ---------------------------------------------------------------------------

/// Dense Laurent polynomial: `coeffs[k]` is the coefficient of `q^(lo+k)`.
/// Trimmed on both ends, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }
    pub fn one() -> Self {
        Self::constant(<BigRational as One>::one())
    }
    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }
    pub fn monomial(c: BigRational, e: i64) -> Self {
        if Zero::is_zero(&c) {
            return Self::zero();
        }
        LaurentPoly { lo: e, coeffs: vec![c] }
    }
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(<BigRational as One>::one(), e)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let terms: Vec<(i64, BigRational)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![<BigRational as Zero>::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| Zero::is_zero(*c)).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.lo == 0 && self.coeffs.len() == 1 && One::is_one(&self.coeffs[0])
    }
    /// Lowest exponent with nonzero coefficient.
    pub fn valuation(&self) -> i64 {
        self.lo
    }
    /// Highest exponent with nonzero coefficient.
    pub fn degree(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }
    pub fn coeff(&self, e: i64) -> BigRational {
        if e < self.lo {
            return <BigRational as Zero>::zero();
        }
        self.coeffs.get((e - self.lo) as usize).cloned().unwrap_or_else(<BigRational as Zero>::zero)
    }
    pub fn lead(&self) -> &BigRational {
        self.coeffs.last().expect("lead of zero polynomial")
    }
    /// Nonzero `(exponent, coefficient)` pairs, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(move |(k, c)| (self.lo + k as i64, c))
    }
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }
    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.lo == 0 && self.coeffs.len() == 1)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(o.lo);
        let hi = self.degree().max(o.degree());
        let mut coeffs = vec![<BigRational as Zero>::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lo - lo) as usize + k] += c;
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            coeffs[(o.lo - lo) as usize + k] += c;
        }
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }
    pub fn neg(&self) -> Self {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![<BigRational as Zero>::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (b, y) in o.coeffs.iter().enumerate() {
                if !Zero::is_zero(y) {
                    coeffs[a + b] += x * y;
                }
            }
        }
        let mut p = LaurentPoly { lo: self.lo + o.lo, coeffs };
        p.trim();
        p
    }
    pub fn scale(&self, c: &BigRational) -> Self {
        if Zero::is_zero(c) {
            return Self::zero();
        }
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn eval(&self, q0: &BigRational) -> Result<BigRational, ScalarError> {
        if self.is_zero() {
            return Ok(<BigRational as Zero>::zero());
        }
        if Zero::is_zero(q0) && self.lo < 0 {
            return Err(ScalarError::ZeroSpecialization);
        }
        // Horner on the polynomial part, then multiply by q0^lo.
        let mut acc = <BigRational as Zero>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q0 + c;
        }
        Ok(acc * pow_rat(q0, self.lo))
    }

    /// Substitute q -> q^k (k >= 1).
    pub fn substitute_power(&self, k: i64) -> Self {
        assert!(k >= 1);
        Self::from_terms(self.terms().map(|(e, c)| (e * k, c.clone())))
    }

    /// Polynomial part as ascending coefficient vector (valuation must be >= 0 after shift).
    fn poly_coeffs(&self) -> Vec<BigRational> {
        self.coeffs.clone()
    }
    fn from_poly(lo: i64, coeffs: Vec<BigRational>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }
}

pub fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match e {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{}", rational_string(&a))?;
            } else if One::is_one(&a) {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", rational_string(&a))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Integer polynomial gcd (primitive pseudo-remainder sequence)
// ---------------------------------------------------------------------------

fn trim_int(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    trim_int(&mut p);
    if p.is_empty() {
        return p;
    }
    let mut g = content(&p);
    if p.last().unwrap().is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for c in p.iter_mut() {
            *c = &*c / &g;
        }
    }
    p
}

/// Pseudo-remainder of a by b (both nonzero, deg a >= deg b).
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        let shift = dr - db;
        for (k, bc) in b.iter().enumerate() {
            r[shift + k] -= &lr * bc;
        }
        trim_int(&mut r);
    }
    r
}

fn int_poly_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let mut a = primitive(a);
    let mut b = primitive(b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = primitive(prem(&a, &b));
        a = b;
        b = r;
    }
    a
}

/// Clear denominators of a rational coefficient vector.
fn to_int_poly(p: &[BigRational]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect()
}

/// Exact division of rational polynomials (ascending coefficients); panics if inexact.
fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
        return vec![];
    }
    let mut quo = vec![<BigRational as Zero>::zero(); r.len() - db];
    let lb = b[db].clone();
    for k in (0..quo.len()).rev() {
        let c = &r[k + db] / &lb;
        if !Zero::is_zero(&c) {
            for (j, bc) in b.iter().enumerate() {
                r[k + j] -= &c * bc;
            }
        }
        quo[k] = c;
    }
    debug_assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
    quo
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// Element of Q(q) as num/den with: den has nonzero constant term, den is
/// monic, and gcd(num, den) = 1 in Q[q] once powers of q are cleared. This
/// form is unique, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalFunction { num: p, den: LaurentPoly::one() }
    }
    pub fn constant(c: BigRational) -> Self {
        Self::from_laurent(LaurentPoly::constant(c))
    }
    pub fn int(n: i64) -> Self {
        Self::constant(rat(n, 1))
    }
    pub fn q() -> Self {
        Self::q_pow(1)
    }
    pub fn q_pow(e: i64) -> Self {
        Self::from_laurent(LaurentPoly::q_pow(e))
    }
    /// q - q^{-1}
    pub fn q_minus_qinv() -> Self {
        Self::from_laurent(LaurentPoly::from_terms([(1, rat(1, 1)), (-1, rat(-1, 1))]))
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }
    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    fn normalize(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::from_laurent(LaurentPoly::zero());
        }
        let v = den.valuation();
        let (mut num, mut den) = (num.shift(-v), den.shift(-v));
        if den.degree() == 0 {
            let c = den.lead().recip();
            return Self::from_laurent(num.scale(&c));
        }
        let nv = num.valuation();
        let g = int_poly_gcd(to_int_poly(&num.poly_coeffs()), to_int_poly(&den.poly_coeffs()));
        if g.len() > 1 {
            let g: Vec<BigRational> = g.into_iter().map(BigRational::from_integer).collect();
            num = LaurentPoly::from_poly(nv, poly_div_exact(&num.poly_coeffs(), &g));
            den = LaurentPoly::from_poly(0, poly_div_exact(&den.poly_coeffs(), &g));
        }
        let l = den.lead().recip();
        if !One::is_one(&l) {
            num = num.scale(&l);
            den = den.scale(&l);
        }
        RationalFunction { num, den }
    }

    /// Value at q = q0.
    pub fn specialize(&self, q0: &BigRational) -> Result<BigRational, ScalarError> {
        if Zero::is_zero(q0) {
            return Err(ScalarError::ZeroSpecialization);
        }
        let d = self.den.eval(q0)?;
        if Zero::is_zero(&d) {
            return Err(ScalarError::Pole(rational_string(q0)));
        }
        Ok(self.num.eval(q0)? / d)
    }

    /// Substitute q -> q^k; used to move between the q and v (q = v^2) pictures.
    pub fn substitute_power(&self, k: i64) -> Self {
        Self::normalize(self.num.substitute_power(k), self.den.substitute_power(k))
    }

    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// If this is ±q^k, return (sign, k).
    pub fn as_signed_monomial(&self) -> Option<(i32, i64)> {
        if !self.is_laurent() || self.num.coeffs.len() != 1 {
            return None;
        }
        let c = &self.num.coeffs[0];
        if One::is_one(c) {
            Some((1, self.num.lo))
        } else if One::is_one(&(-c)) {
            Some((-1, self.num.lo))
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Result<Self, ScalarError> {
        parse_rf(s)
    }
}

impl Scalar for RationalFunction {
    fn zero() -> Self {
        Self::from_laurent(LaurentPoly::zero())
    }
    fn one() -> Self {
        Self::from_laurent(LaurentPoly::one())
    }
    fn from_int(n: i64) -> Self {
        Self::int(n)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn add(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return Self::from_laurent(self.num.add(&o.num));
            }
            return Self::normalize(self.num.add(&o.num), self.den.clone());
        }
        Self::normalize(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_laurent(self.num.mul(&o.num));
        }
        Self::normalize(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Ord for RationalFunction {
    /// Arbitrary but deterministic total order (for sorting in reports).
    fn cmp(&self, o: &Self) -> Ordering {
        let key = |p: &LaurentPoly| (p.lo, p.coeffs.clone());
        key(&self.num).cmp(&key(&o.num)).then_with(|| key(&self.den).cmp(&key(&o.den)))
    }
}
impl PartialOrd for RationalFunction {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

macro_rules! rf_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: &RationalFunction) -> RationalFunction {
                Scalar::$f(self, o)
            }
        }
        impl std::ops::$tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                Scalar::$f(&self, &o)
            }
        }
    };
}
rf_binop!(Add, add, add);
rf_binop!(Sub, sub, sub);
rf_binop!(Mul, mul, mul);

impl std::ops::Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        Scalar::neg(&self)
    }
}

// ---------------------------------------------------------------------------
// Parsing: sums of monomials like "2*q^3 - q^-1 + 1/2", optionally "(..)/(..)"
// ---------------------------------------------------------------------------

pub fn parse_laurent(s: &str) -> Result<LaurentPoly, ScalarError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ScalarError::Parse("empty expression".into()));
    }
    let bytes: Vec<char> = s.chars().collect();
    let mut terms = Vec::new();
    let mut start = 0;
    // split at top-level + or - that are not exponent signs
    let mut pieces = Vec::new();
    for k in 1..bytes.len() {
        if (bytes[k] == '+' || bytes[k] == '-') && bytes[k - 1] != '^' {
            pieces.push(bytes[start..k].iter().collect::<String>());
            start = k;
        }
    }
    pieces.push(bytes[start..].iter().collect::<String>());
    for piece in pieces {
        let (sign, body) = match piece.strip_prefix('-') {
            Some(b) => (-1, b.to_string()),
            None => (1, piece.trim_start_matches('+').to_string()),
        };
        let bad = || ScalarError::Parse(format!("bad term {piece:?}"));
        let (coef, exp) = if let Some(pos) = body.find('q') {
            let cpart = body[..pos].trim_end_matches('*');
            let coef = if cpart.is_empty() { rat(1, 1) } else { parse_rational(cpart)? };
            let rest = &body[pos + 1..];
            let exp = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^').ok_or_else(bad)?.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| bad())?
            };
            (coef, exp)
        } else {
            (parse_rational(&body)?, 0)
        };
        terms.push((exp, coef * BigRational::from_integer(BigInt::from(sign))));
    }
    Ok(LaurentPoly::from_terms(terms))
}

fn parse_rf(s: &str) -> Result<RationalFunction, ScalarError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(rest) = t.strip_prefix('(') {
        if let Some(close) = rest.find(')') {
            let num = parse_laurent(&rest[..close])?;
            let after = &rest[close + 1..];
            if after.is_empty() {
                return Ok(RationalFunction::from_laurent(num));
            }
            let den_s = after.strip_prefix('/').ok_or_else(|| ScalarError::Parse(s.into()))?;
            let den_s = den_s.trim_start_matches('(').trim_end_matches(')');
            return RationalFunction::new(num, parse_laurent(den_s)?);
        }
    }
    // a plain rational like "3/2" is a constant, not a quotient of polynomials
    if !t.contains('q') {
        return Ok(RationalFunction::constant(parse_rational(&t)?));
    }
    Ok(RationalFunction::from_laurent(parse_laurent(&t)?))
}

// ---------------------------------------------------------------------------
// JSON: {"num": [[exp, "p/r"], ...], "den": [...]}
// ---------------------------------------------------------------------------

pub fn laurent_to_json(p: &LaurentPoly) -> serde_json::Value {
    serde_json::Value::Array(
        p.terms()
            .map(|(e, c)| serde_json::json!([e, rational_string(c)]))
            .collect(),
    )
}

pub fn laurent_from_json(v: &serde_json::Value) -> Result<LaurentPoly, ScalarError> {
    let arr = v.as_array().ok_or_else(|| ScalarError::Parse("expected [[exp, coeff], ...]".into()))?;
    let mut terms = Vec::new();
    for t in arr {
        let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| ScalarError::Parse(format!("bad term {t}")))?;
        let e = pair[0].as_i64().ok_or_else(|| ScalarError::Parse(format!("bad exponent {}", pair[0])))?;
        let c = match &pair[1] {
            serde_json::Value::String(s) => parse_rational(s)?,
            serde_json::Value::Number(n) => {
                BigRational::from_integer(BigInt::from(n.as_i64().ok_or_else(|| ScalarError::Parse(format!("bad coefficient {n}")))?))
            }
            other => return Err(ScalarError::Parse(format!("bad coefficient {other}"))),
        };
        terms.push((e, c));
    }
    Ok(LaurentPoly::from_terms(terms))
}

impl RationalFunction {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"num": laurent_to_json(&self.num), "den": laurent_to_json(&self.den)})
    }
    pub fn from_json(v: &serde_json::Value) -> Result<Self, ScalarError> {
        match v {
            serde_json::Value::String(s) => Self::parse(s),
            serde_json::Value::Number(_) => Self::parse(&v.to_string()),
            serde_json::Value::Object(o) => {
                let num = laurent_from_json(o.get("num").ok_or_else(|| ScalarError::Parse("missing num".into()))?)?;
                let den = match o.get("den") {
                    Some(d) => laurent_from_json(d)?,
                    None => LaurentPoly::one(),
                };
                Self::new(num, den)
            }
            serde_json::Value::Array(_) => Ok(Self::from_laurent(laurent_from_json(v)?)),
            _ => Err(ScalarError::Parse(format!("not a rational function: {v}"))),
        }
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rf(s: &str) -> RationalFunction {
        RationalFunction::parse(s).unwrap()
    }

    #[test]
    fn q_minus_qinv_times_q_plus_qinv() {
        let a = rf("q - q^-1");
        let b = rf("q + q^-1");
        assert_eq!(a.mul(&b), rf("q^2 - q^-2"));
    }

    #[test]
    fn self_subtraction_vanishes() {
        let a = rf("(q^2+3)/(q-5)");
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn cancels_common_factor() {
        let a = rf("(q^2-1)/(q)");
        let b = rf("q - 1");
        assert_eq!(a.div(&b).unwrap(), rf("(q+1)/(q)"));
        assert_eq!(a.div(&b).unwrap(), rf("1 + q^-1"));
    }

    #[test]
    fn specialization_examples() {
        let a = rf("q - q^-1");
        assert_eq!(a.specialize(&rat(1, 1)).unwrap(), rat(0, 1));
        assert_eq!(a.specialize(&rat(2, 1)).unwrap(), rat(3, 2));
        let b = rf("(1)/(q-1)");
        assert!(matches!(b.specialize(&rat(1, 1)), Err(ScalarError::Pole(_))));
        assert_eq!(a.specialize(&rat(0, 1)), Err(ScalarError::ZeroSpecialization));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(rf("q").div(&RationalFunction::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn canonical_denominator_is_monic_with_unit_constant_term() {
        let a = rf("(3*q^5)/(6*q^2 - 2*q^3)");
        assert!(a.denom().valuation() == 0);
        assert!(One::is_one(a.denom().lead()));
        assert_eq!(a, rf("(-3*q^3)/(2*q - 6)"));
    }

    #[test]
    fn json_round_trip() {
        let a = rf("(q^2 - 1/3)/(q + 7)");
        let v = a.to_json();
        assert_eq!(RationalFunction::from_json(&v).unwrap(), a);
        let s = serde_json::to_string(&a).unwrap();
        let b: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(rf("q - q^-1").to_string(), "q - q^-1");
        assert_eq!(rf("-2*q^3 + 1/2").to_string(), "-2*q^3 + 1/2");
    }

    #[test]
    fn signed_monomials_are_recognised() {
        assert_eq!(rf("-q^-1").as_signed_monomial(), Some((-1, -1)));
        assert_eq!(rf("q + 1").as_signed_monomial(), None);
    }

    #[test]
    fn v_substitution() {
        let a = rf("q - q^-1");
        assert_eq!(a.substitute_power(2), rf("q^2 - q^-2"));
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..4, -4i64..5), 0..4)
            .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, rat(c, 1)))))
    }

    fn arb_rf() -> impl Strategy<Value = RationalFunction> {
        (arb_laurent(), arb_laurent()).prop_filter_map("nonzero den", |(n, d)| RationalFunction::new(n, d).ok())
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn canonical_form_is_unique(a in arb_rf(), b in arb_rf()) {
            // (a*b)/b reconstructs a structurally whenever b != 0
            if !b.is_zero() {
                prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
            }
            prop_assert_eq!(a.sub(&b).is_zero(), a == b);
        }

        #[test]
        fn specialization_is_a_ring_map(a in arb_rf(), b in arb_rf(), k in 2i64..9) {
            let q0 = rat(k, 3);
            if let (Ok(x), Ok(y)) = (a.specialize(&q0), b.specialize(&q0)) {
                prop_assert_eq!(a.mul(&b).specialize(&q0).unwrap(), &x * &y);
                prop_assert_eq!(a.add(&b).specialize(&q0).unwrap(), &x + &y);
            }
        }
    }
}
