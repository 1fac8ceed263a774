//! Exact polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::scalar::{Precision, Real};

/// Dense univariate polynomial, constant term first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c·x^k.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// x itself.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// c0 + c1·x.
    pub fn linear(c0: BigRational, c1: BigRational) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_real<S: Real>(&self, x: &S, prec: Precision) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + S::from_rational(c, prec);
        }
        acc
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sum of absolute coefficient values.
    pub fn l1_norm(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |a, c| a + c.abs())
    }

    /// P(c0 + c1·t) as a polynomial in t.
    pub fn affine_compose(&self, c0: &BigRational, c1: &BigRational) -> Self {
        let lin = Self::linear(c0.clone(), c1.clone());
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }

    /// ∫₀¹ of the polynomial.
    pub fn integrate_unit(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |a, (k, c)| a + c / BigRational::from_integer(BigInt::from(k + 1)))
    }

    /// ∫₀¹ t^a (1−t)^b p(t) dt.
    pub fn beta_moment(&self, a: usize, b: usize) -> BigRational {
        let fb = factorial(b);
        self.coeffs.iter().enumerate().fold(BigRational::zero(), |acc, (k, c)| {
            acc + c * BigRational::new(factorial(a + k) * &fb, factorial(a + k + b + 1))
        })
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Coefficients as `a/b` strings, constant first.
    pub fn to_rational_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly{:?}", self.to_rational_strings())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<'a> Add<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Parse one coefficient token: integer, decimal with optional exponent, or `a/b`.
pub fn parse_rational(tok: &str) -> Option<BigRational> {
    let t = tok.trim().replace('\u{2212}', "-");
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(&t)
}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (neg, body) = match t.as_bytes().first()? {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut v = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        v *= num_traits::pow(ten, shift as usize);
    } else {
        v /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -v } else { v })
}

/// Parse a comma separated coefficient list, constant term first.
///
/// Token positions in errors are 1-based.
pub fn parse_poly_spec(s: &str) -> Result<RationalPoly> {
    if s.trim().is_empty() {
        return Err(Error::Parse { position: 1, token: s.to_string() });
    }
    let mut coeffs = Vec::new();
    for (i, tok) in s.split(',').enumerate() {
        match parse_rational(tok) {
            Some(q) => coeffs.push(q),
            None => return Err(Error::Parse { position: i + 1, token: tok.trim().to_string() }),
        }
    }
    Ok(RationalPoly::new(coeffs))
}

impl FromStr for RationalPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly_spec(s)
    }
}

/// Q_u(x) = ∫₀¹ θ^u P(x + θ(1−x)) dθ.
pub fn compute_q(p: &RationalPoly, u: usize) -> RationalPoly {
    // (x + θ(1−x))^k = Σ_l C(k,l) θ^l (1−x)^l x^{k−l}
    let one_minus_x = RationalPoly::from_ints(&[1, -1]);
    let deg = p.coeffs.len();
    let omx_pows: Vec<RationalPoly> = (0..deg).map(|l| one_minus_x.pow(l)).collect();
    let mut acc = RationalPoly::zero();
    for (k, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for l in 0..=k {
            let w = c * BigRational::new(binomial(k, l), BigInt::from(u + l + 1));
            let term = &RationalPoly::monomial(w, k - l) * &omx_pows[l];
            acc = &acc + &term;
        }
    }
    acc
}

/// Polynomial in two variables with sparse exact coefficients keyed by (x-power, y-power).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<(usize, usize), BigRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0, 0)
    }

    pub fn monomial(c: BigRational, a: usize, b: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// c0 + cx·x + cy·y.
    pub fn linear(c0: BigRational, cx: BigRational, cy: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c0);
        p.add_term(1, 0, cx);
        p.add_term(0, 1, cy);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), BigRational)>) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: usize, b: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// p(x) embedded as a polynomial in x.
    pub fn in_x(p: &RationalPoly) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| ((k, 0), c.clone())))
    }

    /// p(y) embedded as a polynomial in y.
    pub fn in_y(p: &RationalPoly) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| ((0, k), c.clone())))
    }

    /// p(x + y).
    pub fn in_sum(p: &RationalPoly) -> Self {
        let mut out = Self::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for t in 0..=k {
                out.add_term(t, k - t, c * BigRational::from_integer(binomial(k, t)));
            }
        }
        out
    }

    /// Multiply by x^a y^b.
    pub fn shift(&self, a: usize, b: usize) -> Self {
        BivariatePoly { terms: self.terms.iter().map(|(&(i, j), c)| ((i + a, j + b), c.clone())).collect() }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, c)| (k, c * s)))
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (&(a, b), c)| {
            acc + c * num_traits::pow(x.clone(), a) * num_traits::pow(y.clone(), b)
        })
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.terms.iter().map(|(&(a, b), c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(a as i32) * y.powi(b as i32)).sum()
    }
}

impl<'a> Add<&'a BivariatePoly> for &'a BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a BivariatePoly> for &'a BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut acc: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            for (&(i, j), d) in &rhs.terms {
                *acc.entry((a + i, b + j)).or_insert_with(BigRational::zero) += c * d;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        BivariatePoly { terms: acc }
    }
}

/// ∫₀¹∫₀^{1−x} x^a y^b dy dx = a!·b!/(a+b+2)!.
pub fn triangle_monomial(a: usize, b: usize) -> BigRational {
    BigRational::new(factorial(a) * factorial(b), factorial(a + b + 2))
}

/// Exact integral of `f` over the triangle x, y ≥ 0, x + y ≤ 1.
pub fn triangle_integral(f: &BivariatePoly) -> BigRational {
    f.terms().fold(BigRational::zero(), |acc, (&(a, b), c)| acc + c * triangle_monomial(a, b))
}
