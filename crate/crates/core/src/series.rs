//! Series coefficients î, k̂, the denominator D and the criterion function f_r.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{binomial, factorial, q, qpow};
use crate::error::{Error, Result};
use crate::moments::{i_p_bilinear, i_p_bound, k_p_bilinear, k_p_bound, IIndex, KIndex};
use crate::poly::{compute_q, RationalPoly};
use crate::scalar::{pi_lower, pi_upper, Precision, Real};

pub const DEFAULT_TRUNCATION: usize = 80;
pub const DEFAULT_PRECISION: Precision = 256;

/// Everything that determines one evaluation of f_r.
#[derive(Clone, Debug, PartialEq)]
pub struct GapConfig {
    pub r: u32,
    pub eta: BigRational,
    pub poly: RationalPoly,
    /// Series truncation J.
    pub truncation: usize,
    pub precision: Precision,
    /// Upper end of the κ scan, in units of π.
    pub scan_max: BigRational,
}

impl GapConfig {
    pub fn new(r: u32, poly: RationalPoly) -> Self {
        GapConfig {
            r,
            eta: q(1, 2),
            poly,
            truncation: DEFAULT_TRUNCATION,
            precision: DEFAULT_PRECISION,
            scan_max: q(4, 1),
        }
    }

    /// r = 2 with P(x) = 1 − 0.1x + 100x² − 0.2x³.
    pub fn paper() -> Self {
        Self::new(2, RationalPoly::new(vec![q(1, 1), q(-1, 10), q(100, 1), q(-1, 5)]))
    }

    pub fn with_truncation(mut self, j: usize) -> Self {
        self.truncation = j;
        self
    }

    pub fn with_precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config("r must be ≥ 1".into()));
        }
        if !self.eta.is_positive() || self.eta > q(1, 2) {
            return Err(Error::Config(format!("eta must lie in (0, 1/2], got {}", self.eta)));
        }
        if self.poly.is_zero() {
            return Err(Error::Config("P must not be identically zero".into()));
        }
        if self.truncation == 0 {
            return Err(Error::Config("J must be ≥ 1".into()));
        }
        if self.precision < 64 {
            return Err(Error::Config(format!("precision {} < 64 bits", self.precision)));
        }
        if !self.scan_max.is_positive() {
            return Err(Error::Config("scan_max must be positive".into()));
        }
        Ok(())
    }
}

fn r_u(r: u32) -> usize {
    r as usize
}

/// î with the Q_{n4} factor from `p1` and the Q_{n5} factor from `p2`.
pub fn i_hat_bilinear(r: u32, j: usize, eta: &BigRational, p1: &RationalPoly, p2: &RationalPoly) -> BigRational {
    let ru = r_u(r);
    let a = i_p_bilinear(&IIndex::new(r, [ru, ru, j, ru - 1, ru - 1]), p1, p2);
    let b = i_p_bilinear(&IIndex::new(r, [ru + 1, ru, j, ru, ru - 1]), p1, p2);
    let c = i_p_bilinear(&IIndex::new(r, [ru, ru + 1, j, ru - 1, ru]), p1, p2);
    -a / eta + b + c
}

/// î(r,j,η) = −η⁻¹ i_P(r,r,j,r−1,r−1) + i_P(r+1,r,j,r,r−1) + i_P(r,r+1,j,r−1,r).
pub fn i_hat(r: u32, j: usize, eta: &BigRational, p: &RationalPoly) -> BigRational {
    i_hat_bilinear(r, j, eta, p, p)
}

/// Index range n = −2..=min(j, r−2) of the k̂ sum, with sign, weight and k_P index.
fn k_hat_terms(r: u32, j: usize, eta: &BigRational) -> Vec<(BigRational, KIndex)> {
    let ri = r as i64;
    let hi = (j as i64).min(ri - 2);
    (-2..=hi)
        .map(|n| {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            let w = BigRational::new(
                BigInt::from(sign) * binomial(r_u(r), (n + 2) as usize),
                factorial((j as i64 - n) as usize) * factorial((ri + n + 1) as usize),
            );
            let idx =
                KIndex::new(r, [(j as i64 - n) as usize, (ri + n + 2) as usize, (ri + n + 1) as usize], eta.clone());
            (w, idx)
        })
        .collect()
}

/// k̂ with P(x+y) from `p1` and Q_{n3} from `p2`.
pub fn k_hat_bilinear(r: u32, j: usize, eta: &BigRational, p1: &RationalPoly, p2: &RationalPoly) -> BigRational {
    let s = k_hat_terms(r, j, eta)
        .into_iter()
        .fold(BigRational::zero(), |acc, (w, idx)| acc + w * k_p_bilinear(&idx, p1, p2));
    -BigRational::from_integer(factorial(r_u(r) - 1)) * s
}

/// k̂(r,j,η) = −(r−1)! Σ_{n=−2}^{min(j,r−2)} (−1)ⁿ C(r,n+2)/((j−n)!(r+n+1)!) k_P(j−n, r+n+2, r+n+1).
pub fn k_hat(r: u32, j: usize, eta: &BigRational, p: &RationalPoly) -> BigRational {
    k_hat_bilinear(r, j, eta, p, p)
}

/// Rational part of D, bilinear form: Q_{r−1}[P1] against Q_{r−1}[P2] and Q_r[P2].
pub fn d_rational_bilinear(r: u32, p1: &RationalPoly, p2: &RationalPoly, eta: &BigRational) -> BigRational {
    let ru = r_u(r);
    let q1 = compute_q(p1, ru - 1);
    let a = &q1 * &compute_q(p2, ru - 1);
    let b = &q1 * &compute_q(p2, ru);
    a.beta_moment(ru * ru - 1, 2 * ru) / eta
        - BigRational::from_integer(2.into()) * b.beta_moment(ru * ru - 1, 2 * ru + 1)
}

/// D/π = η⁻¹∫α^{r²−1}(1−α)^{2r}Q_{r−1}² − 2∫α^{r²−1}(1−α)^{2r+1}Q_{r−1}Q_r, with sign checks.
pub fn d_rational(r: u32, p: &RationalPoly, eta: &BigRational) -> Result<BigRational> {
    let d = d_rational_bilinear(r, p, p, eta);
    if d.is_zero() {
        Err(Error::DegenerateMollifier)
    } else if d.is_negative() {
        Err(Error::InfeasibleMollifier)
    } else {
        Ok(d)
    }
}

/// D = π·(rational part).
pub fn d_denominator<S: Real>(r: u32, p: &RationalPoly, eta: &BigRational, prec: Precision) -> Result<S> {
    let d = d_rational(r, p, eta)?;
    Ok(S::pi(prec) * S::from_rational(&d, prec))
}

/// A_j = (−1)^j/4^j · (r·î(r,2j,η)/(2j+1)! + k̂(r,2j,η)/(2j+1)), bilinear in P.
pub fn criterion_coefficient_bilinear(
    r: u32,
    j: usize,
    eta: &BigRational,
    p1: &RationalPoly,
    p2: &RationalPoly,
) -> BigRational {
    let ih = i_hat_bilinear(r, 2 * j, eta, p1, p2);
    let kh = k_hat_bilinear(r, 2 * j, eta, p1, p2);
    let inner = BigRational::from_integer(BigInt::from(r)) * ih / BigRational::from_integer(factorial(2 * j + 1))
        + kh / BigRational::from_integer(BigInt::from(2 * j + 1));
    let sign = if j.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign, BigInt::one() << (2 * j)) * inner
}

pub fn criterion_coefficient(r: u32, j: usize, eta: &BigRational, p: &RationalPoly) -> BigRational {
    criterion_coefficient_bilinear(r, j, eta, p, p)
}

/// Which part of the series a tail bound covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    IHatTail,
    KHatTail,
    Combined,
}

/// Rigorous bound on |Σ_{j>J}| of the criterion series.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCertificate {
    pub truncation: usize,
    /// Exact rational upper bound.
    pub bound: BigRational,
    pub method: TailMethod,
    pub i_part: BigRational,
    pub k_part: BigRational,
}

impl TailCertificate {
    pub fn bound_real<S: Real>(&self, prec: Precision) -> S {
        S::from_rational(&self.bound, prec)
    }

    pub fn log10_bound(&self) -> f64 {
        log10_rational(&self.bound)
    }
}

/// log₁₀ of a positive rational without overflowing f64.
pub fn log10_rational(x: &BigRational) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    let bits = |b: &BigInt| b.bits() as i64;
    let (n, d) = (x.numer(), x.denom());
    let sn = (bits(n) - 60).max(0);
    let sd = (bits(d) - 60).max(0);
    let nf = (n >> sn as usize).to_f64().unwrap_or(f64::NAN);
    let df = (d >> sd as usize).to_f64().unwrap_or(f64::NAN);
    nf.log10() - df.log10() + (sn - sd) as f64 * std::f64::consts::LOG10_2
}

/// Majorant of |î(r,2j,η)| from the crude i_P bound.
pub fn i_hat_bound(r: u32, j2: usize, eta: &BigRational, p: &RationalPoly) -> BigRational {
    let ru = r_u(r);
    let b1 = i_p_bound(&IIndex::new(r, [ru, ru, j2, ru - 1, ru - 1]), p);
    let b2 = i_p_bound(&IIndex::new(r, [ru + 1, ru, j2, ru, ru - 1]), p);
    let b3 = i_p_bound(&IIndex::new(r, [ru, ru + 1, j2, ru - 1, ru]), p);
    b1 / eta + b2 + b3
}

/// Majorant of |k̂(r,2j,η)| from k_P_bound.
pub fn k_hat_bound(r: u32, j2: usize, eta: &BigRational, p: &RationalPoly) -> Result<BigRational> {
    let mut s = BigRational::zero();
    for (w, idx) in k_hat_terms(r, j2, eta) {
        s += w.abs() * k_p_bound(&idx, p)?;
    }
    Ok(BigRational::from_integer(factorial(r_u(r) - 1)) * s)
}

/// Exact series: A_j for j = 1..=J and the rational part of D.
#[derive(Clone, Debug)]
pub struct CriterionSeries {
    pub config: GapConfig,
    /// Unnormalized A_j, index 0 holds j = 1.
    pub raw: Vec<BigRational>,
    pub d_rational: BigRational,
    /// A_j / D_rat; the value is Σ normalized_j κ^{2j+1} π^{2j}.
    pub normalized: Vec<BigRational>,
}

impl CriterionSeries {
    pub fn new(config: &GapConfig) -> Result<Self> {
        config.validate()?;
        let d = d_rational(config.r, &config.poly, &config.eta)?;
        let raw: Vec<BigRational> =
            (1..=config.truncation).map(|j| criterion_coefficient(config.r, j, &config.eta, &config.poly)).collect();
        Ok(Self::from_parts(config.clone(), raw, d))
    }

    /// Assemble from precomputed A_j (for example a Gram-matrix contraction).
    pub fn from_parts(config: GapConfig, raw: Vec<BigRational>, d_rational: BigRational) -> Self {
        let normalized = raw.iter().map(|a| a / &d_rational).collect();
        CriterionSeries { config, raw, d_rational, normalized }
    }

    pub fn realize<S: Real>(&self) -> RealSeries<S> {
        let prec = self.config.precision;
        RealSeries {
            coeffs: self.normalized.iter().map(|b| S::from_rational(b, prec)).collect(),
            pi: S::pi(prec),
            prec,
        }
    }

    /// Bound on the omitted terms j > J at c = κπ.
    pub fn tail_certificate(&self, kappa: &BigRational) -> Result<TailCertificate> {
        tail_certificate_parts(&self.config, &self.d_rational, kappa)
    }

    pub fn evaluate<S: Real>(&self, kappa: &BigRational) -> Result<SeriesEvaluation<S>> {
        if !kappa.is_positive() {
            return Err(Error::Domain("κ must be positive".into()));
        }
        let rs = self.realize::<S>();
        let (value, rounding) = rs.eval_with_rounding(kappa);
        let tail = self.tail_certificate(kappa)?;
        Ok(SeriesEvaluation { coefficients: self.normalized.clone(), kappa: kappa.clone(), value, rounding, tail })
    }
}

/// Coefficients converted to a working scalar, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct RealSeries<S> {
    pub coeffs: Vec<S>,
    pi: S,
    prec: Precision,
}

impl<S: Real> RealSeries<S> {
    pub fn eval(&self, kappa: &S) -> S {
        let cpi = kappa.clone() * self.pi.clone();
        let t = cpi.clone() * cpi;
        let mut acc = S::zero();
        for b in self.coeffs.iter().rev() {
            acc = acc * t.clone() + b.clone();
        }
        acc * t * kappa.clone()
    }

    /// Value and a floating-rounding allowance (exact rational).
    pub fn eval_with_rounding(&self, kappa: &BigRational) -> (S, BigRational) {
        let k = S::from_rational(kappa, self.prec);
        let value = self.eval(&k);
        let cpi = k.clone() * self.pi.clone();
        let t = cpi.clone() * cpi;
        let mut abs_sum = S::zero();
        let mut tp = t.clone() * k.clone();
        for b in &self.coeffs {
            abs_sum = abs_sum + b.abs() * tp.clone();
            tp = tp * t.clone();
        }
        let n = self.coeffs.len() as i64;
        let mult = BigRational::from_integer(BigInt::from(6 * n + 16));
        let rounding = abs_sum.to_rational().abs() * value.unit_roundoff() * mult;
        (value, rounding)
    }
}

/// One evaluation of f_r with its certificate.
#[derive(Clone, Debug)]
pub struct SeriesEvaluation<S> {
    /// A_j/D_rat for j = 1..=J.
    pub coefficients: Vec<BigRational>,
    /// c = κπ.
    pub kappa: BigRational,
    pub value: S,
    /// Allowance for floating rounding in `value`.
    pub rounding: BigRational,
    pub tail: TailCertificate,
}

impl<S: Real> SeriesEvaluation<S> {
    /// value + tail + rounding, as a rational upper bound on f_r.
    pub fn upper_bound(&self) -> BigRational {
        self.value.to_rational() + &self.tail.bound + &self.rounding
    }

    /// Whether value + tail + rounding < 1.
    pub fn certified_below_one(&self) -> bool {
        self.upper_bound() < BigRational::one()
    }
}

/// f_r(κπ) for a configuration.
pub fn f_r<S: Real>(kappa: &BigRational, config: &GapConfig) -> Result<SeriesEvaluation<S>> {
    if config.eta != q(1, 2) {
        return Err(Error::Unsupported("f_r is defined at eta = 1/2".into()));
    }
    CriterionSeries::new(config)?.evaluate(kappa)
}

fn tail_certificate_parts(config: &GapConfig, d_rat: &BigRational, kappa: &BigRational) -> Result<TailCertificate> {
    if !kappa.is_positive() {
        return Err(Error::Domain("κ must be positive".into()));
    }
    let r = config.r;
    let jn = config.truncation + 1;
    let c_hi = kappa * pi_upper();
    let c2 = &c_hi * &c_hi;
    let prefactor =
        qpow(&c_hi, 2 * jn + 1) / (BigRational::from_integer(BigInt::one() << (2 * jn)) * pi_lower() * d_rat);

    let ib = i_hat_bound(r, 2 * jn, &config.eta, &config.poly);
    let t_i =
        &prefactor * BigRational::from_integer(BigInt::from(r)) * ib / BigRational::from_integer(factorial(2 * jn + 1));
    let rho_i = &c2 / BigRational::from_integer(BigInt::from(4 * (2 * jn + 2) * (2 * jn + 3)));

    let kb = k_hat_bound(r, 2 * jn, &config.eta, &config.poly)?;
    let t_k = &prefactor * kb / BigRational::from_integer(BigInt::from(2 * jn + 1));
    let lo = (2 * jn + 3) as i64 - r as i64;
    if lo <= 0 {
        return Err(Error::CertificateUnavailable(format!("J = {} too small for r = {r}", config.truncation)));
    }
    let rho_k = &c2 / BigRational::from_integer(BigInt::from(lo * (lo + 1)));

    let one = BigRational::one();
    if rho_i >= one || rho_k >= one {
        return Err(Error::CertificateUnavailable(format!(
            "term ratio not below 1 at J = {}; raise J",
            config.truncation
        )));
    }
    let i_part = t_i / (&one - rho_i);
    let k_part = t_k / (&one - rho_k);
    Ok(TailCertificate {
        truncation: config.truncation,
        bound: &i_part + &k_part,
        method: TailMethod::Combined,
        i_part,
        k_part,
    })
}

/// The crude tail estimate for the î-part, step for step:
/// r·4(r²−1)!·c‖P‖₁² / (√(2π) D (2J)^{r²+1}) · e^{−2Jg}/(2g), g = log(2J) − log(c/2) − 1.
pub fn paper_i_tail_chain<S: Real>(config: &GapConfig, kappa: &BigRational) -> Result<S> {
    let prec = config.precision;
    let r = config.r as usize;
    let two_j = S::from_int(2 * config.truncation as i64, prec);
    let c = S::from_rational(kappa, prec) * S::pi(prec);
    let g = two_j.ln() - (c.clone() / S::from_int(2, prec)).ln() - S::from_int(1, prec);
    if !(g > S::zero()) {
        return Err(Error::CertificateUnavailable(format!("log(2J) ≤ log(c/2) + 1 at J = {}", config.truncation)));
    }
    let d = d_denominator::<S>(config.r, &config.poly, &config.eta, prec)?;
    let norm = config.poly.l1_norm();
    let lead = BigRational::from_integer(BigInt::from(4 * r) * factorial(r * r - 1)) * &norm * &norm;
    let sqrt2pi = (S::from_int(2, prec) * S::pi(prec)).sqrt();
    let front = S::from_rational(&lead, prec) * c / (sqrt2pi * d * two_j.powi((r * r + 1) as u32));
    let decay = (-(two_j * g.clone())).exp() / (S::from_int(2, prec) * g);
    Ok(front * decay)
}

/// Coefficients of z^j in the m-series, j = 1..=jmax (index 0 holds j = 1):
/// η^{j+(r+1)²+1}(r·î(r,j,η)/j! + k̂(r,j,η)).
pub fn m_series_coeffs(r: u32, eta: &BigRational, p: &RationalPoly, jmax: usize) -> Vec<BigRational> {
    let base = r_u(r + 1).pow(2) + 1;
    (1..=jmax)
        .map(|j| {
            let ih = i_hat(r, j, eta, p);
            let kh = k_hat(r, j, eta, p);
            qpow(eta, j + base)
                * (BigRational::from_integer(BigInt::from(r)) * ih / BigRational::from_integer(factorial(j)) + kh)
        })
        .collect()
}

/// Closed form for (r = 1, P = 1): the m-series coefficient at j = 2k equals
/// bracket_k(η)/(2·(2k+3)!), where the halving absorbs the T/π against T/(2π) normalization
/// and (iαL)^{2k} = (−1)^k(αL)^{2k} carries the alternating sign.
pub fn r1_closed_form_coefficient(k: usize, eta: &BigRational) -> BigRational {
    assert!(k >= 1, "closed form starts at k = 1");
    let m = 2 * k + 3;
    let mq = BigRational::from_integer(BigInt::from(m));
    let bracket = (-q(3, 1) * qpow(eta, 2) + &mq * qpow(eta, 3)) / q(3, 1)
        - &mq / BigRational::from_integer(BigInt::from(k + 2)) * qpow(eta, 2 * k + 4)
        + qpow(eta, 2 * k + 5)
        + qpow(eta, 2) * qpow(&(BigRational::one() - eta), m);
    bracket / BigRational::from_integer(BigInt::from(2) * factorial(m))
}

/// 2·CT(I) − CT(J) with θ normalized out; vanishes identically.
pub fn ct_consistency(r: u32, p: &RationalPoly, eta: &BigRational) -> BigRational {
    let ru = r_u(r);
    let e = (ru + 1).pow(2);
    let a = qpow(eta, e - 1);
    let b = qpow(eta, e);
    let c = qpow(eta, e + 1);
    let ip = |n: [usize; 5]| i_p_bilinear(&IIndex::new(r, n), p, p);
    let kp = |n: [usize; 3]| k_p_bilinear(&KIndex::new(r, n, eta.clone()), p, p);

    let rq = BigRational::from_integer(BigInt::from(r));
    let ct_i1 = &rq
        * (-(&b) * ip([ru, ru, 0, ru - 1, ru - 1])
            + &c * (ip([ru + 1, ru, 0, ru, ru - 1]) + ip([ru, ru + 1, 0, ru - 1, ru])));
    let ct_i21 = &c * (kp([1, ru + 1, ru]) - q(1, 2) * kp([2, ru, ru - 1]));
    let ct_i22 = -BigRational::new(BigInt::from(ru - 1), BigInt::from(2 * (ru + 1))) * &c * kp([0, ru + 2, ru + 1]);

    let q0 = compute_q(p, ru - 1);
    let q1 = compute_q(p, ru);
    let ct_j = -(a * (&q0 * &q0).beta_moment(ru * ru - 1, 2 * ru)
        - BigRational::from_integer(2.into()) * b * (&q0 * &q1).beta_moment(ru * ru - 1, 2 * ru + 1));

    BigRational::from_integer(2.into()) * (ct_i1 + ct_i21 + ct_i22) - ct_j
}

/// r/(r+1) − 1/2 − (r−1)/(2(r+1)).
pub fn ct_kernel(r: u32) -> BigRational {
    let r = r as i64;
    q(r, r + 1) - q(1, 2) - q(r - 1, 2 * (r + 1))
}
