//! Arithmetic functions over a smallest-prime-factor sieve, and the Euler products a_r, C_r.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinat::{bernoulli, binomial, binomial_u64, factorial, q};
use crate::error::{Error, Result};
use crate::poly::RationalPoly;
use crate::scalar::{compensated_sum, Neumaier, Precision, Real};

pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;

/// Positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { value: 1, factors: Vec::new() }
    }

    /// Build from (prime, exponent) pairs; primes are trusted, order and overflow are checked.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Precondition("primes must be strictly increasing".into()));
            }
        }
        for &(p, a) in &factors {
            if a == 0 || p < 2 {
                return Err(Error::Precondition(format!("bad factor {p}^{a}")));
            }
            let pa = p.checked_pow(a).ok_or_else(|| Error::Precondition("value overflows u64".into()))?;
            value = value.checked_mul(pa).ok_or_else(|| Error::Precondition("value overflows u64".into()))?;
        }
        Ok(FactoredInteger { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == 1)
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &(p, a)| acc * (p - 1) * p.pow(a - 1))
    }

    /// Möbius function.
    pub fn mobius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Product of two factored integers.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(p, a)), Some(&(q, b))) if p == q => {
                    out.push((p, a + b));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, a)), Some(&(q, _))) if p < q => {
                    out.push((p, a));
                    i += 1;
                }
                (Some(&(p, a)), None) => {
                    out.push((p, a));
                    i += 1;
                }
                (_, Some(&(q, b))) => {
                    out.push((q, b));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self::from_factors(out)
    }
}

/// Smallest-prime-factor table up to a fixed limit.
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: u64) -> Self {
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        if n >= 1 {
            spf[1] = 1;
        }
        Sieve { spf, primes }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit() && self.spf[n as usize] as u64 == n
    }

    /// Smallest prime factor of 2 ≤ n ≤ limit.
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn check(&self, n: u64) -> Result<()> {
        if n > self.limit() {
            Err(Error::Capacity { value: n, limit: self.limit() })
        } else {
            Ok(())
        }
    }

    pub fn factorize(&self, n: u64) -> Result<FactoredInteger> {
        if n == 0 {
            return Err(Error::Domain("factorize requires n ≥ 1".into()));
        }
        self.check(n)?;
        let mut m = n;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            factors.push((p, a));
        }
        Ok(FactoredInteger { value: n, factors })
    }

    /// Values of a multiplicative function on 1..=n_max, built from its prime-power values.
    pub fn multiplicative_table<T: Clone>(
        &self,
        n_max: u64,
        one: T,
        mut prime_power: impl FnMut(u64, u32) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Vec<T>> {
        self.check(n_max)?;
        let n = n_max as usize;
        let mut out = vec![one.clone(); n + 1];
        for i in 2..=n {
            let p = self.spf[i] as usize;
            let mut m = i;
            let mut a = 0u32;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            let pp = prime_power(p as u64, a);
            out[i] = if m == 1 { pp } else { mul(&out[m], &pp) };
        }
        Ok(out)
    }
}

/// d_r(p^a) = C(a+r−1, a).
pub fn d_r_prime_power(r: u32, a: u32) -> BigUint {
    binomial((a + r) as usize - 1, a as usize).to_biguint().expect("nonnegative")
}

/// d_r(p^a) as a float, for sieve sums.
pub fn d_r_prime_power_f64(r: u32, a: u32) -> f64 {
    binomial_u64((a + r - 1) as u64, a as u64) as f64
}

/// Number of ordered r-tuples with product n.
pub fn d_r(n: &FactoredInteger, r: u32) -> BigUint {
    assert!(r >= 1, "d_r needs r ≥ 1");
    n.factors().iter().fold(BigUint::one(), |acc, &(_, a)| acc * d_r_prime_power(r, a))
}

/// H_{λ,r}(x) = λ Σ_{i<r} C(r−1,i)(−1)^i x^i/(λ+i).
pub fn h_poly(lambda: u32, r: u32) -> RationalPoly {
    assert!(lambda >= 1 && r >= 1, "H_{{λ,r}} needs λ, r ≥ 1");
    let coeffs = (0..r as usize)
        .map(|i| {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            BigRational::new(
                BigInt::from(sign) * binomial(r as usize - 1, i) * BigInt::from(lambda),
                BigInt::from(lambda as usize + i),
            )
        })
        .collect();
    RationalPoly::new(coeffs)
}

/// σ_r(m) = ∏_{p^λ‖m} d_r(p^λ) H_{λ,r}(1/p).
pub fn sigma_r(m: &FactoredInteger, r: u32) -> BigRational {
    m.factors().iter().fold(BigRational::one(), |acc, &(p, lam)| {
        let h = h_poly(lam, r).eval(&q(1, p as i64));
        acc * BigRational::from_integer(d_r_prime_power(r, lam).into()) * h
    })
}

/// σ_r(m) from the defining series ∏ (1−1/p)^r p^λ Σ_{j≥λ} d_r(p^j)p^{−j}, truncated after `terms` terms.
pub fn sigma_r_series(m: &FactoredInteger, r: u32, terms: u32) -> BigRational {
    m.factors().iter().fold(BigRational::one(), |acc, &(p, lam)| {
        let x = q(1, p as i64);
        let mut s = BigRational::zero();
        let mut xp = num_traits::pow(x.clone(), lam as usize);
        for j in lam..lam + terms {
            s += BigRational::from_integer(d_r_prime_power(r, j).into()) * &xp;
            xp *= &x;
        }
        let pre =
            num_traits::pow(BigRational::one() - &x, r as usize) * BigRational::from_integer(BigInt::from(p).pow(lam));
        acc * pre * s
    })
}

/// σ_r(m) as a float, from prime-power data.
pub fn sigma_r_prime_power_f64(p: u64, lam: u32, r: u32) -> f64 {
    let h = h_poly(lam, r).eval(&q(1, p as i64));
    d_r_prime_power_f64(r, lam) * h.to_f64().unwrap_or(f64::NAN)
}

/// p^z for complex z.
pub fn prime_pow_complex<S: Real>(p: u64, z: &Complex<S>, prec: Precision) -> Complex<S> {
    let lp = S::from_int(p as i64, prec).ln();
    let mag = (z.re.clone() * lp.clone()).exp();
    let arg = z.im.clone() * lp;
    Complex::new(mag.clone() * arg.cos(), mag * arg.sin())
}

/// R_k(s) = ∏_{p^λ‖k} (1 − 1/p + λ(1−p^{−s})(1−p^{s−1})).
pub fn r_k<S: Real>(k: &FactoredInteger, s: &Complex<S>, prec: Precision) -> Complex<S> {
    let one = Complex::new(S::from_int(1, prec), S::zero());
    let mut acc = one.clone();
    for &(p, lam) in k.factors() {
        let inv_p = S::from_rational(&q(1, p as i64), prec);
        let p_neg_s = prime_pow_complex(p, &(-s.clone()), prec);
        let p_s_m1 = prime_pow_complex(p, &(s.clone() - one.clone()), prec);
        let lam_c = S::from_int(lam as i64, prec);
        let local = Complex::new(S::from_int(1, prec) - inv_p, S::zero())
            + (one.clone() - p_neg_s) * (one.clone() - p_s_m1) * lam_c;
        acc = acc * local;
    }
    acc
}

/// R_k(1) = φ(k)/k, exact.
pub fn r_k_at_one(k: &FactoredInteger) -> BigRational {
    // the λ-term vanishes since p^{s−1} = 1
    k.factors().iter().fold(BigRational::one(), |acc, &(p, _)| acc * (BigRational::one() - q(1, p as i64)))
}

/// k_p(α) = (1−p^{iα})(1−p^{−1−iα})/(1−1/p).
pub fn k_p<S: Real>(p: u64, alpha: &S, prec: Precision) -> Complex<S> {
    let one = Complex::new(S::from_int(1, prec), S::zero());
    let ia = Complex::new(S::zero(), alpha.clone());
    let a = one.clone() - prime_pow_complex(p, &ia, prec);
    let b = one.clone() - prime_pow_complex(p, &(-one.clone() - ia), prec);
    let den = S::from_int(1, prec) - S::from_rational(&q(1, p as i64), prec);
    let num = a * b;
    Complex::new(num.re / den.clone(), num.im / den)
}

/// f(k) = ∏_{p^a‖k} (1 + a·k_p(α)) p^{−a}, which equals R_k(1+iα)/φ(k).
pub fn f_weight<S: Real>(k: &FactoredInteger, alpha: &S, prec: Precision) -> Complex<S> {
    let mut acc = Complex::new(S::from_int(1, prec), S::zero());
    for &(p, a) in k.factors() {
        acc = acc * f_prime_power(p, a, alpha, prec);
    }
    acc
}

/// Local factor (1 + a·k_p(α)) p^{−a}.
pub fn f_prime_power<S: Real>(p: u64, a: u32, alpha: &S, prec: Precision) -> Complex<S> {
    let kp = k_p(p, alpha, prec);
    let av = S::from_int(a as i64, prec);
    let inv = S::from_rational(&BigRational::new(BigInt::one(), BigInt::from(p).pow(a)), prec);
    let one = S::from_int(1, prec);
    Complex::new((one + kp.re * av.clone()) * inv.clone(), kp.im * av * inv)
}

/// A truncated Euler product with a bound on the omitted factors.
#[derive(Clone, Debug)]
pub struct EulerProductValue<S> {
    pub r: u32,
    pub cutoff: u64,
    pub value: S,
    pub tail_bound: S,
}

/// Closed form of the local factor of a_r in x = 1/p:
/// (1−x)^{r²} Σ_m C(m+r−1,m)² x^m = (1−x)^{(r−1)²} Σ_{k<r} C(r−1,k)² x^k.
pub fn a_r_local_poly(r: u32) -> RationalPoly {
    let r1 = r as usize - 1;
    let narayana = RationalPoly::new((0..=r1).map(|k| BigRational::from_integer(binomial(r1, k).pow(2))).collect());
    &RationalPoly::from_ints(&[1, -1]).pow(r1 * r1) * &narayana
}

/// Inner series of the local factor summed until the term drops below 2^{−prec}.
pub fn a_r_local_series<S: Real>(r: u32, p: u64, prec: Precision) -> S {
    let x = S::from_rational(&q(1, p as i64), prec);
    let eps = S::from_rational(&BigRational::new(BigInt::one(), BigInt::one() << prec), prec);
    let mut s = S::zero();
    let mut xm = S::from_int(1, prec);
    let mut m = 0u64;
    loop {
        let c = S::from_rational(&BigRational::from_integer(binomial(m as usize + r as usize - 1, m as usize)), prec);
        let t = c.clone() * c * xm.clone();
        s = s + t.clone();
        if m > 2 * r as u64 && t < eps {
            break;
        }
        xm = xm * x.clone();
        m += 1;
    }
    let one_minus = S::from_int(1, prec) - x;
    one_minus.powi(r * r) * s
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Coefficients e_1..=e_n of log L(x) for a polynomial L with L(0) = 1.
pub fn log_series(l: &RationalPoly, n: usize) -> Vec<BigRational> {
    assert!(l.coeff(0).is_one(), "log series needs L(0) = 1");
    // k e_k = k l_k − Σ_{i<k} i e_i l_{k−i}
    let mut e: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    for k in 1..=n {
        let mut acc = BigRational::from_integer(BigInt::from(k)) * l.coeff(k);
        for i in 1..k {
            acc -= BigRational::from_integer(BigInt::from(i)) * &e[i] * l.coeff(k - i);
        }
        e[k] = acc / BigRational::from_integer(BigInt::from(k));
    }
    e
}

/// ζ(s) for an integer s ≥ 2 by Euler–Maclaurin, with a bound on the remainder.
pub fn zeta_int<S: Real>(s: u32, prec: Precision) -> (S, BigRational) {
    assert!(s >= 2, "zeta_int needs s ≥ 2");
    let m = 16 + prec as u64 / 4;
    let target = BigRational::new(BigInt::one(), BigInt::one() << (prec + 16));
    let mut acc: Vec<S> = (1..m).map(|n| S::from_int(1, prec) / S::from_int(n as i64, prec).powi(s)).collect();
    let mq = BigRational::from_integer(BigInt::from(m));
    let m_pow = num_traits::pow(mq.clone(), s as usize);
    // M^{1−s}/(s−1) + M^{−s}/2
    let mut closed = &mq / (&m_pow * BigRational::from_integer(BigInt::from(s - 1))) + m_pow.recip() / q(2, 1);
    let mut rising = BigRational::from_integer(BigInt::from(s));
    let mut mpow = &m_pow * &mq;
    let mut err = BigRational::zero();
    for j in 1..=200usize {
        let t = bernoulli(2 * j) / BigRational::from_integer(factorial(2 * j)) * &rising / &mpow;
        if t.abs() < target {
            err = t.abs();
            break;
        }
        closed += t;
        // (s)_{2j+1} and M^{s+2j+1}
        rising *= BigRational::from_integer(BigInt::from((s as usize + 2 * j - 1) * (s as usize + 2 * j)));
        mpow = mpow * &mq * &mq;
        err = target.clone();
    }
    acc.push(S::from_rational(&closed, prec));
    let value = compensated_sum(acc);
    let rounding = value.unit_roundoff() * BigRational::from_integer(BigInt::from(4 * m + 16));
    (value, err * q(2, 1) + rounding)
}

fn mobius_small(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Prime zeta P(k) = Σ_p p^{−k} = Σ_m μ(m)/m · log ζ(mk), with an error bound.
pub fn prime_zeta<S: Real>(k: u32, prec: Precision) -> (S, BigRational) {
    assert!(k >= 2, "prime_zeta needs k ≥ 2");
    let stop = prec as u32 + 20;
    let mut terms = Vec::new();
    let mut err = BigRational::zero();
    let mut m = 1u32;
    while m * k <= stop {
        let mu = mobius_small(m as u64);
        if mu != 0 {
            let (z, ze) = zeta_int::<S>(m * k, prec);
            // |log(z+δ) − log z| ≤ δ/(z − δ) ≤ 2δ
            err += ze * q(2, 1);
            terms.push(z.ln() * S::from_int(mu, prec) / S::from_int(m as i64, prec));
        }
        m += 1;
    }
    // Σ_{m' ≥ m} log ζ(m'k)/m' ≤ Σ 2·2^{−m'k}
    err += BigRational::new(BigInt::from(4), BigInt::one() << (m * k) as usize);
    let v = compensated_sum(terms);
    let rounding = v.unit_roundoff() * BigRational::from_integer(BigInt::from(8 * m as u64 + 16));
    (v, err + rounding)
}

/// a_r = ∏_p (1−1/p)^{r²} Σ_m (Γ(r+m)/(Γ(r)m!))² p^{−m}.
///
/// The product runs over p ≤ `cutoff`; the rest enters through log L(1/p) = Σ e_k p^{−k},
/// using Σ_{p>N} p^{−k} = P(k) − Σ_{p≤N} p^{−k} for 2 ≤ k ≤ K. The bound covers the omitted
/// k > K via |e_k| ≤ r²ρ^k, Σ_{p>N} p^{−k} ≤ N^{1−k}, and the rounding of every step.
pub fn a_r<S: Real>(r: u32, cutoff: u64, prec: Precision) -> Result<EulerProductValue<S>> {
    if r == 0 {
        return Err(Error::Config("a_r needs r ≥ 1".into()));
    }
    if prec < 64 {
        return Err(Error::Config(format!("precision {prec} < 64 bits")));
    }
    if cutoff < 2 {
        return Err(Error::Config("cutoff must be ≥ 2".into()));
    }
    let local = a_r_local_poly(r);
    let primes = primes_up_to(cutoff);
    let mut value = S::from_int(1, prec);
    for &p in &primes {
        let x = S::from_rational(&q(1, p as i64), prec);
        value = value * local.eval_real(&x, prec);
    }
    let u = value.unit_roundoff();
    let mut err = &u * BigRational::from_integer(BigInt::from(4 * primes.len() as u64 + 16));
    if local.degree() == Some(0) {
        let tail_bound = value.clone() * S::from_rational(&err, prec);
        return Ok(EulerProductValue { r, cutoff, value, tail_bound });
    }

    // ρ bounds 1/|root| over the roots of L via the Cauchy bound
    let r1 = r as usize - 1;
    let rho = BigRational::from_integer(BigInt::one() + binomial(r1, r1 / 2).pow(2));
    let n = BigRational::from_integer(BigInt::from(cutoff));
    if rho.clone() * q(2, 1) >= n {
        return Err(Error::Config(format!("cutoff {cutoff} too small for r = {r}")));
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << (prec + 8));
    let r2 = BigRational::from_integer(BigInt::from(r * r));
    let ratio = &rho / &n;
    let mut kmax = 2usize;
    let omitted = loop {
        // Σ_{k>K} r²ρ^k N^{1−k} = r² N ratio^{K+1}/(1 − ratio)
        let b = &r2 * &n * num_traits::pow(ratio.clone(), kmax + 1) / (BigRational::one() - &ratio);
        if b < target || kmax > 4 * prec {
            break b;
        }
        kmax += 1;
    };
    err += omitted;

    let e = log_series(&local, kmax);
    let mut powsum: Vec<Neumaier<S>> = vec![Neumaier::new(); kmax + 1];
    for &p in &primes {
        let x = S::from_rational(&q(1, p as i64), prec);
        let mut xk = x.clone() * x.clone();
        for acc in powsum.iter_mut().skip(2) {
            acc.add(xk.clone());
            xk = xk * x.clone();
        }
    }
    let mut tail_log = S::zero();
    for k in 2..=kmax {
        if e[k].is_zero() {
            continue;
        }
        let (pz, pe) = prime_zeta::<S>(k as u32, prec);
        let partial = powsum[k].total();
        let t = pz - partial;
        let t_err = pe + &u * BigRational::from_integer(BigInt::from(2 * primes.len() as u64 + 64));
        err += e[k].abs() * t_err;
        tail_log = tail_log + S::from_rational(&e[k], prec) * t;
    }
    value = value * tail_log.exp();
    err += &u * q(32, 1);
    if err >= q(1, 2) {
        return Err(Error::CertificateUnavailable("Euler tail error does not close".into()));
    }
    // |e^E − 1| ≤ 2|E| for |E| ≤ 1/2
    let tail_bound = value.clone() * S::from_rational(&(err * q(2, 1)), prec);
    Ok(EulerProductValue { r, cutoff, value, tail_bound })
}

pub const DEFAULT_EULER_CUTOFF: u64 = 1_000_000;

/// C_r = a_{r+1}/((r²−1)!((r−1)!)²).
pub fn c_r<S: Real>(r: u32, prec: Precision) -> Result<EulerProductValue<S>> {
    c_r_with_cutoff(r, DEFAULT_EULER_CUTOFF, prec)
}

pub fn c_r_with_cutoff<S: Real>(r: u32, cutoff: u64, prec: Precision) -> Result<EulerProductValue<S>> {
    if r == 0 {
        return Err(Error::Config("C_r needs r ≥ 1".into()));
    }
    let a = a_r::<S>(r + 1, cutoff, prec)?;
    let r = r as usize;
    let den = factorial(r * r - 1) * factorial(r - 1).pow(2);
    let scale = S::from_rational(&BigRational::new(BigInt::one(), den), prec);
    Ok(EulerProductValue { r: r as u32, cutoff, value: a.value * scale.clone(), tail_bound: a.tail_bound * scale })
}

/// C_j(k) = Σ_{p|k} (log p)^j/p + Σ_{p^a‖k, a≥2} a (log p)^j.
pub fn c_j<S: Real>(k: &FactoredInteger, j: u32, prec: Precision) -> S {
    let mut s = S::zero();
    for &(p, a) in k.factors() {
        let lj = S::from_int(p as i64, prec).ln().powi(j);
        s = s + lj.clone() / S::from_int(p as i64, prec);
        if a >= 2 {
            s = s + lj * S::from_int(a as i64, prec);
        }
    }
    s
}

/// C_0(k) exactly.
pub fn c_0_exact(k: &FactoredInteger) -> BigRational {
    k.factors().iter().fold(BigRational::zero(), |acc, &(p, a)| {
        let mut t = acc + q(1, p as i64);
        if a >= 2 {
            t += BigRational::from_integer(BigInt::from(a));
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigReal;

    fn sieve() -> Sieve {
        Sieve::new(20_000)
    }

    #[test]
    fn factorize_examples() {
        let s = sieve();
        assert_eq!(s.factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(s.factorize(1).unwrap().factors().is_empty());
        assert_eq!(s.factorize(9973).unwrap().factors(), &[(9973, 1)]);
        assert_eq!(s.factorize(20_001), Err(Error::Capacity { value: 20_001, limit: 20_000 }));
    }

    #[test]
    fn d_r_examples() {
        let s = sieve();
        assert_eq!(d_r(&s.factorize(6).unwrap(), 2), BigUint::from(4u32));
        assert_eq!(d_r(&s.factorize(4).unwrap(), 3), BigUint::from(6u32));
        assert_eq!(d_r(&s.factorize(1).unwrap(), 5), BigUint::one());
        assert_eq!(d_r(&s.factorize(360).unwrap(), 1), BigUint::one());
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_poly(1, 2), RationalPoly::new(vec![q(1, 1), q(-1, 2)]));
        assert_eq!(h_poly(1, 1), RationalPoly::one());
        for lam in 1..6 {
            for r in 1..6 {
                assert_eq!(h_poly(lam, r).coeff(0), q(1, 1));
                assert_eq!(h_poly(lam, r).degree(), Some(r as usize - 1));
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let s = sieve();
        assert_eq!(sigma_r(&s.factorize(2).unwrap(), 2), q(3, 2));
        assert_eq!(sigma_r(&s.factorize(4).unwrap(), 2), q(2, 1));
        assert_eq!(sigma_r(&FactoredInteger::one(), 3), q(1, 1));
    }

    #[test]
    fn r_k_examples() {
        let s = sieve();
        let one = Complex::new(1.0f64, 0.0);
        let r6 = r_k(&s.factorize(6).unwrap(), &one, 53);
        assert!((r6.re - 1.0 / 3.0).abs() < 1e-15 && r6.im.abs() < 1e-15);
        let r4 = r_k(&s.factorize(4).unwrap(), &one, 53);
        assert!((r4.re - 0.5).abs() < 1e-15);
        let z = Complex::new(0.3f64, 1.7);
        assert_eq!(r_k(&FactoredInteger::one(), &z, 53), Complex::new(1.0, 0.0));
        assert_eq!(r_k_at_one(&s.factorize(6).unwrap()), q(1, 3));
    }

    #[test]
    fn k_p_examples() {
        let k0 = k_p(2, &0.0f64, 53);
        assert!(k0.norm() < 1e-16);
        let a = k_p(2, &0.1f64, 53);
        let b = k_p(2, &-0.1f64, 53);
        assert!((a.re - b.re).abs() < 1e-16 && (a.im + b.im).abs() < 1e-16);
        // direct formula at 50 digits: (1−2^{0.1i})(1−2^{−1−0.1i})/(1/2)
        let big = k_p(2, &BigReal::from_rational(&q(1, 10), 192), 192);
        assert!((big.re.to_f64() - a.re).abs() < 1e-15);
        assert!((big.im.to_f64() - a.im).abs() < 1e-15);
    }

    #[test]
    fn f_weight_matches_r_k() {
        let s = sieve();
        let alpha = 0.37f64;
        for k in [1u64, 2, 12, 97, 360, 1001] {
            let fk = s.factorize(k).unwrap();
            let lhs = f_weight(&fk, &alpha, 53);
            let rk = r_k(&fk, &Complex::new(1.0, alpha), 53) / fk.phi() as f64;
            assert!((lhs - rk).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn local_closed_form_matches_series() {
        for r in 1..=5 {
            let poly = a_r_local_poly(r);
            for p in [2u64, 3, 7, 101] {
                let series: BigReal = a_r_local_series(r, p, 128);
                let closed: BigReal = poly.eval_real(&BigReal::from_rational(&q(1, p as i64), 128), 128);
                let diff = (series - closed).abs().to_f64();
                assert!(diff < 1e-30, "r={r} p={p} diff={diff}");
            }
        }
        assert_eq!(a_r_local_poly(2), RationalPoly::from_ints(&[1, 0, -1]));
    }

    #[test]
    fn a_1_is_one() {
        let a = a_r::<f64>(1, 1000, 64).unwrap();
        assert_eq!(a.value, 1.0);
    }

    #[test]
    fn c_r_small_cutoff() {
        let c = c_r_with_cutoff::<f64>(1, 10_000, 64).unwrap();
        let a2 = a_r::<f64>(2, 10_000, 64).unwrap();
        assert_eq!(c.value, a2.value);
    }

    #[test]
    fn zeta_values() {
        let (z2, e2) = zeta_int::<BigReal>(2, 256);
        let pi = BigReal::pi(256);
        let diff = (z2 - pi.clone() * pi / BigReal::from_int(6, 256)).abs();
        assert!(diff.to_rational() <= e2);
        assert!(diff.to_f64() < 1e-70);
        let (z3, _) = zeta_int::<f64>(3, 53);
        assert!((z3 - 1.2020569031595942).abs() < 1e-15);
    }

    #[test]
    fn prime_zeta_two() {
        let (p2, _) = prime_zeta::<f64>(2, 53);
        assert!((p2 - 0.45224742004106549850).abs() < 1e-14);
        let direct: f64 = primes_up_to(100).iter().map(|&p| 1.0 / (p * p) as f64).sum();
        assert!(p2 > direct);
    }

    #[test]
    fn log_series_of_one_minus_x_squared() {
        let e = log_series(&RationalPoly::from_ints(&[1, 0, -1]), 8);
        assert_eq!(e[2], q(-1, 1));
        assert_eq!(e[4], q(-1, 2));
        assert!(e[3].is_zero());
        assert_eq!(e[8], q(-1, 4));
    }

    #[test]
    fn accelerated_a_2_at_small_cutoff() {
        let a = a_r::<BigReal>(2, 1000, 128).unwrap();
        let pi = BigReal::pi(128);
        let diff = (a.value.clone() - BigReal::from_int(6, 128) / (pi.clone() * pi)).abs();
        assert!(diff <= a.tail_bound);
        assert!(diff.to_f64() < 1e-30);
    }

    #[test]
    fn multiplicative_table_matches_factorize() {
        let s = sieve();
        let t = s.multiplicative_table(1000, 1u64, |_, a| a as u64 + 1, |a, b| a * b).unwrap();
        for n in 1..=1000u64 {
            let d = d_r(&s.factorize(n).unwrap(), 2);
            assert_eq!(BigUint::from(t[n as usize]), d);
        }
    }

    #[test]
    fn c_0_prime() {
        let s = sieve();
        for p in [2u64, 3, 5, 9973] {
            assert_eq!(c_0_exact(&s.factorize(p).unwrap()), q(1, p as i64));
        }
        assert_eq!(c_0_exact(&s.factorize(12).unwrap()), q(1, 2) + q(1, 3) + q(2, 1));
    }
}
