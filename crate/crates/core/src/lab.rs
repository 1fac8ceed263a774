//! Brute-force checks of the arithmetic lemmas behind the moment formulas.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{a_r, c_j, d_r_prime_power, d_r_prime_power_f64, h_poly, k_p, sigma_r, FactoredInteger, Sieve};
use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::poly::RationalPoly;
use crate::scalar::{Neumaier, Precision, Real};

pub const CSV_HEADER: [&str; 8] = ["x", "lhs_re", "lhs_im", "main_re", "main_im", "ratio_re", "ratio_im", "deviation"];

/// One sum against its predicted main term.
#[derive(Clone, Debug)]
pub struct ComparisonRow<S> {
    pub x: u64,
    pub lhs: Complex<S>,
    pub main: Complex<S>,
    /// lhs/main; `None` when main is zero.
    pub ratio: Option<Complex<S>>,
    pub deviation: Complex<S>,
}

impl<S: Real> ComparisonRow<S> {
    pub fn new(x: u64, lhs: Complex<S>, main: Complex<S>) -> Self {
        let ratio = if main.re.is_zero() && main.im.is_zero() { None } else { Some(lhs.clone() / main.clone()) };
        let deviation = lhs.clone() - main.clone();
        ComparisonRow { x, lhs, main, ratio, deviation }
    }

    pub fn real(x: u64, lhs: S, main: S) -> Self {
        Self::new(x, Complex::new(lhs, S::zero()), Complex::new(main, S::zero()))
    }

    pub fn ratio_re(&self) -> f64 {
        self.ratio.as_ref().map_or(f64::NAN, |r| r.re.to_f64())
    }

    /// |ratio − 1|.
    pub fn distance_from_one(&self) -> f64 {
        self.ratio.as_ref().map_or(f64::NAN, |r| (r.re.to_f64() - 1.0).hypot(r.im.to_f64()))
    }

    /// CSV fields in [`CSV_HEADER`] order.
    ///
    /// The deviation column is signed for real rows and a modulus for complex rows.
    pub fn csv_record(&self) -> Vec<String> {
        let (rr, ri) = match &self.ratio {
            Some(r) => (r.re.to_decimal(), r.im.to_decimal()),
            None => ("NaN".into(), "NaN".into()),
        };
        let dev = if self.lhs.im.is_zero() && self.main.im.is_zero() {
            self.deviation.re.to_decimal()
        } else {
            let d = &self.deviation;
            (d.re.clone() * d.re.clone() + d.im.clone() * d.im.clone()).sqrt().to_decimal()
        };
        vec![
            self.x.to_string(),
            self.lhs.re.to_decimal(),
            self.lhs.im.to_decimal(),
            self.main.re.to_decimal(),
            self.main.im.to_decimal(),
            rr,
            ri,
            dev,
        ]
    }
}

/// Compensated accumulator for complex terms.
struct Acc<S> {
    re: Neumaier<S>,
    im: Neumaier<S>,
}

impl<S: Real> Acc<S> {
    fn new() -> Self {
        Acc { re: Neumaier::new(), im: Neumaier::new() }
    }

    fn add_real(&mut self, x: S) {
        self.re.add(x);
    }

    fn add(&mut self, z: Complex<S>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(self) -> Complex<S> {
        Complex::new(self.re.total(), self.im.total())
    }
}

/// ∫₀^u δ^k g(δ) dδ, exact.
fn power_moment(g: &RationalPoly, k: usize, u: &BigRational) -> BigRational {
    g.coeffs().iter().enumerate().fold(BigRational::zero(), |acc, (i, c)| {
        let e = i + k + 1;
        acc + c * num_traits::pow(u.clone(), e) / BigRational::from_integer(BigInt::from(e))
    })
}

/// Horner evaluation with coefficients already in S.
fn horner<S: Real>(coeffs: &[S], t: &S) -> S {
    coeffs.iter().rev().fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
}

fn check_theta(theta: &BigRational) -> Result<()> {
    if theta < &BigRational::zero() || theta >= &BigRational::one() {
        return Err(Error::Precondition(format!("theta must lie in [0, 1), got {theta}")));
    }
    Ok(())
}

/// Prime factorization of n·k, with n given in factored form and k ≤ sieve limit.
fn merged_factors(sieve: &Sieve, k: u64, n: &FactoredInteger) -> Result<Vec<(u64, u32)>> {
    let mut out: Vec<(u64, u32)> = sieve.factorize(k)?.factors().to_vec();
    for &(p, a) in n.factors() {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some(e) => e.1 += a,
            None => out.push((p, a)),
        }
    }
    Ok(out)
}

/// Residual of (1−x)^r Σ_{j≥λ} d_r(p^j)x^j − d_r(p^λ)x^λ H_{λ,r}(x), truncated to degree `order`.
pub fn check_lemma6(r: u32, lambda: u32, order: usize) -> Result<RationalPoly> {
    if r == 0 || lambda == 0 {
        return Err(Error::Domain("check_lemma6 needs r, λ ≥ 1".into()));
    }
    if order < (lambda + r) as usize {
        return Err(Error::Precondition(format!("order {order} < λ + r = {}", lambda + r)));
    }
    let series = RationalPoly::new(
        (0..=order)
            .map(|j| {
                if j < lambda as usize {
                    BigRational::zero()
                } else {
                    BigRational::from_integer(d_r_prime_power(r, j as u32).into())
                }
            })
            .collect(),
    );
    let one_minus = RationalPoly::linear(BigRational::one(), -BigRational::one()).pow(r as usize);
    let lhs = &one_minus * &series;
    let lhs = RationalPoly::new(lhs.coeffs().iter().take(order + 1).cloned().collect());
    let d = BigRational::from_integer(d_r_prime_power(r, lambda).into());
    let rhs = &RationalPoly::monomial(d, lambda as usize) * &h_poly(lambda, r);
    Ok(&lhs - &rhs)
}

/// Σ_{h≤x} d_r(nh)/h against σ_r(n)(log x)^r/r!.
pub fn check_divisor_mean<S: Real>(
    sieve: &Sieve,
    r: u32,
    n: &FactoredInteger,
    x: u64,
    prec: Precision,
) -> Result<ComparisonRow<S>> {
    if r == 0 || x < 2 {
        return Err(Error::Domain("check_divisor_mean needs r ≥ 1 and x ≥ 2".into()));
    }
    sieve.check(x)?;
    let dr = sieve.multiplicative_table(x, 1.0f64, |_, a| d_r_prime_power_f64(r, a), |a, b| a * b)?;
    let mut acc = Acc::new();
    for h in 1..=x {
        let mut d = dr[h as usize];
        let mut m = h;
        for &(p, a) in n.factors() {
            let mut b = 0;
            while m % p == 0 {
                m /= p;
                b += 1;
            }
            d = d / d_r_prime_power_f64(r, b) * d_r_prime_power_f64(r, a + b);
        }
        acc.add_real(S::from_float(d, prec) / S::from_int(h as i64, prec));
    }
    let lx = S::from_int(x as i64, prec).ln();
    let main = S::from_rational(&sigma_r(n, r), prec) * lx.powi(r)
        / S::from_rational(&BigRational::from_integer(factorial(r as usize)), prec);
    Ok(ComparisonRow::new(x, acc.total(), Complex::new(main, S::zero())))
}

/// Σ_{m≤x^{1−θ}} φ(m)σ_r(m)²m⁻² g(log m/log x) against a_{r+1}(log x)^{r²}/(r²−1)!·∫₀^{1−θ}δ^{r²−1}g.
pub fn check_sigma_mean<S: Real>(
    sieve: &Sieve,
    r: u32,
    x: u64,
    g: &RationalPoly,
    theta: &BigRational,
    prec: Precision,
) -> Result<ComparisonRow<S>> {
    if r == 0 || x < 2 {
        return Err(Error::Domain("check_sigma_mean needs r ≥ 1 and x ≥ 2".into()));
    }
    check_theta(theta)?;
    sieve.check(x)?;
    let lx = S::from_int(x as i64, prec).ln();
    let ymax = if theta.is_zero() {
        x
    } else {
        (S::from_rational(&(BigRational::one() - theta), prec) * lx.clone()).exp().to_f64().floor() as u64
    };
    let w = sieve.multiplicative_table(
        ymax,
        1.0f64,
        |p, lam| {
            let pf = p as f64;
            let phi_over = (1.0 - 1.0 / pf) / pf.powi(lam as i32);
            let s = crate::arith::sigma_r_prime_power_f64(p, lam, r);
            phi_over * s * s
        },
        |a, b| a * b,
    )?;
    let gc: Vec<S> = g.coeffs().iter().map(|c| S::from_rational(c, prec)).collect();
    let mut acc = Acc::new();
    for m in 1..=ymax {
        let t = S::from_int(m as i64, prec).ln() / lx.clone();
        acc.add_real(S::from_float(w[m as usize], prec) * horner(&gc, &t));
    }
    let r2 = (r * r) as usize;
    let a = a_r::<crate::scalar::BigReal>(r + 1, crate::arith::DEFAULT_EULER_CUTOFF, prec.max(64))?;
    let integral = power_moment(g, r2 - 1, &(BigRational::one() - theta));
    let main = S::from_rational(&a.value.to_rational(), prec)
        * lx.powi(r2 as u32)
        * S::from_rational(&(integral / BigRational::from_integer(factorial(r2 - 1))), prec);
    Ok(ComparisonRow::new(x, acc.total(), Complex::new(main, S::zero())))
}

/// Number of Taylor terms of p^{iα} so the omitted part of the main term is below 10⁻²⁰.
pub fn prime_sum_terms(alpha: f64, log_y: f64, w: u32, g_norm: f64) -> usize {
    let z = alpha.abs() * log_y;
    let mut term = log_y.powi(w as i32) * g_norm;
    let mut j = 0usize;
    // term_j = z^j/j!·(log y)^w·‖g‖₁ bounds the j-th summand
    loop {
        if (j as f64) > z && term < 1e-20 {
            return j;
        }
        j += 1;
        term *= z / j as f64;
        if j > 10_000 {
            return j;
        }
    }
}

/// Σ_{p≤y^{1−θ}} (log p)^w p^{iα−1} g(log p/log y) against its Taylor-expanded main term.
pub fn check_prime_sum<S: Real>(
    sieve: &Sieve,
    w: u32,
    alpha: &S,
    theta: &BigRational,
    y: u64,
    g: &RationalPoly,
    prec: Precision,
) -> Result<ComparisonRow<S>> {
    if w == 0 {
        return Err(Error::Precondition("check_prime_sum needs w ≥ 1".into()));
    }
    if y < 2 {
        return Err(Error::Domain("check_prime_sum needs y ≥ 2".into()));
    }
    check_theta(theta)?;
    sieve.check(y)?;
    let ly = S::from_int(y as i64, prec).ln();
    let u = BigRational::one() - theta;
    let cap = if theta.is_zero() { y } else { (S::from_rational(&u, prec) * ly.clone()).exp().to_f64().floor() as u64 };
    let gc: Vec<S> = g.coeffs().iter().map(|c| S::from_rational(c, prec)).collect();
    let mut acc = Acc::new();
    for &p in sieve.primes() {
        if p as u64 > cap {
            break;
        }
        let lp = S::from_int(p as i64, prec).ln();
        let mag = lp.powi(w) / S::from_int(p as i64, prec) * horner(&gc, &(lp.clone() / ly.clone()));
        let arg = alpha.clone() * lp;
        acc.add(Complex::new(mag.clone() * arg.cos(), mag * arg.sin()));
    }
    let g_norm = g.l1_norm().to_f64().unwrap_or(f64::INFINITY);
    let jmax = prime_sum_terms(alpha.to_f64(), ly.to_f64(), w, g_norm);
    let mut main = Complex::new(S::zero(), S::zero());
    // (iα)^j/j!·(log y)^{j+w}, built up incrementally
    let mut coef = Complex::new(ly.powi(w), S::zero());
    for j in 0..=jmax {
        let integral = S::from_rational(&power_moment(g, j + w as usize - 1, &u), prec);
        main = main + Complex::new(coef.re.clone() * integral.clone(), coef.im.clone() * integral);
        let step = Complex::new(S::zero(), alpha.clone() * ly.clone() / S::from_int(j as i64 + 1, prec));
        coef = coef * step;
    }
    Ok(ComparisonRow::new(y, acc.total(), main))
}

/// Σ_{k≤x} d_r(mk)f(nk) against σ_r(m)/n·l^r Σ_j C(r,j)(−iαl)^j/(r+j)!, l = log x.
pub fn check_f_mean<S: Real>(
    sieve: &Sieve,
    r: u32,
    m: &FactoredInteger,
    n: &FactoredInteger,
    alpha: &S,
    x: u64,
    prec: Precision,
) -> Result<ComparisonRow<S>> {
    if r == 0 || x < 2 {
        return Err(Error::Domain("check_f_mean needs r ≥ 1 and x ≥ 2".into()));
    }
    if !n.is_squarefree() {
        return Err(Error::Precondition(format!("n = {} is not squarefree", n.value())));
    }
    if !m.value().is_multiple_of(n.value()) {
        return Err(Error::Precondition(format!("n = {} does not divide m = {}", n.value(), m.value())));
    }
    sieve.check(x)?;
    let mut kp: Vec<Option<Complex<S>>> = vec![None; x as usize + 1];
    let mut kp_extra: Vec<(u64, Complex<S>)> = Vec::new();
    for &p in sieve.primes() {
        if p as u64 > x {
            break;
        }
        kp[p as usize] = Some(k_p(p as u64, alpha, prec));
    }
    for &(p, _) in n.factors() {
        if p > x {
            kp_extra.push((p, k_p(p, alpha, prec)));
        }
    }
    let lookup = |p: u64| -> Complex<S> {
        if p <= x {
            kp[p as usize].clone().expect("sieved prime")
        } else {
            kp_extra.iter().find(|(q, _)| *q == p).expect("factor of n").1.clone()
        }
    };
    let one = S::from_int(1, prec);
    let mut acc = Acc::new();
    for k in 1..=x {
        let mut d = 1.0f64;
        for (_, a) in merged_factors(sieve, k, m)? {
            d *= d_r_prime_power_f64(r, a);
        }
        let mut f = Complex::new(one.clone(), S::zero());
        let mut denom = 1.0f64;
        for (p, a) in merged_factors(sieve, k, n)? {
            let kv = lookup(p);
            let av = S::from_int(a as i64, prec);
            f = f * Complex::new(one.clone() + kv.re * av.clone(), kv.im * av);
            denom *= (p as f64).powi(a as i32);
        }
        let scale = S::from_float(d, prec) / S::from_float(denom, prec);
        acc.add(Complex::new(f.re * scale.clone(), f.im * scale));
    }
    let l = S::from_int(x as i64, prec).ln();
    let mut poly = Complex::new(S::zero(), S::zero());
    let mut pw = Complex::new(one.clone(), S::zero());
    let step = Complex::new(S::zero(), -(alpha.clone() * l.clone()));
    for j in 0..=r as usize {
        let c = S::from_rational(&BigRational::new(binomial(r as usize, j), factorial(r as usize + j)), prec);
        poly = poly + Complex::new(pw.re.clone() * c.clone(), pw.im.clone() * c);
        pw = pw * step.clone();
    }
    let pre = S::from_rational(&sigma_r(m, r), prec) / S::from_int(n.value() as i64, prec) * l.powi(r);
    let main = Complex::new(poly.re * pre.clone(), poly.im * pre);
    Ok(ComparisonRow::new(x, acc.total(), main))
}

/// Largest cutoff accepted by [`growth_lemma9`]; the double sum is quadratic in x.
pub const GROWTH_LIMIT: u64 = 5000;

/// S(x)/(log x)^{r²+r} with S(x) = Σ_{h,k≤x} d_r(h)d_r(k)(h,k)/(hk)·C_j(k/(h,k)).
pub fn growth_lemma9<S: Real>(sieve: &Sieve, r: u32, j: u32, xs: &[u64], prec: Precision) -> Result<Vec<(u64, S)>> {
    let xmax = xs.iter().copied().max().unwrap_or(0);
    if xmax > GROWTH_LIMIT {
        return Err(Error::Capacity { value: xmax, limit: GROWTH_LIMIT });
    }
    if r == 0 || xs.iter().any(|&x| x < 2) {
        return Err(Error::Domain("growth_lemma9 needs r ≥ 1 and every x ≥ 2".into()));
    }
    sieve.check(xmax)?;
    let dr = sieve.multiplicative_table(xmax, 1.0f64, |_, a| d_r_prime_power_f64(r, a), |a, b| a * b)?;
    let mut cj = vec![S::zero(); xmax as usize + 1];
    for k in 2..=xmax {
        cj[k as usize] = c_j::<S>(&sieve.factorize(k)?, j, prec);
    }
    let dr_s: Vec<S> = dr.iter().map(|&v| S::from_float(v, prec)).collect();
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut acc = Acc::new();
        for h in 1..=x {
            for k in 1..=x {
                let g = h.gcd(&k);
                let c = &cj[(k / g) as usize];
                if c.is_zero() {
                    continue;
                }
                let w = dr_s[h as usize].clone() * dr_s[k as usize].clone() / S::from_int((h / g * k) as i64, prec);
                acc.add_real(w * c.clone());
            }
        }
        let lx = S::from_int(x as i64, prec).ln();
        out.push((x, acc.total().re / lx.powi(r * r + r)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::q;

    #[test]
    fn lemma6_small() {
        assert!(check_lemma6(2, 1, 50).unwrap().is_zero());
        assert!(check_lemma6(1, 4, 50).unwrap().is_zero());
        assert!(matches!(check_lemma6(3, 5, 7), Err(Error::Precondition(_))));
    }

    #[test]
    fn harmonic_deviation() {
        let s = Sieve::new(100_000);
        let row = check_divisor_mean::<f64>(&s, 1, &FactoredInteger::one(), 100_000, 53).unwrap();
        assert!((row.deviation.re - 0.5772156649).abs() < 1e-4);
        assert!(matches!(
            check_divisor_mean::<f64>(&s, 1, &FactoredInteger::one(), 100_001, 53),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn f_mean_preconditions() {
        let s = Sieve::new(1000);
        let m = FactoredInteger::from_factors(vec![(2, 2)]).unwrap();
        let n4 = FactoredInteger::from_factors(vec![(2, 2)]).unwrap();
        let n3 = FactoredInteger::from_factors(vec![(3, 1)]).unwrap();
        assert!(matches!(check_f_mean::<f64>(&s, 2, &m, &n4, &0.0, 100, 53), Err(Error::Precondition(_))));
        assert!(matches!(check_f_mean::<f64>(&s, 2, &m, &n3, &0.0, 100, 53), Err(Error::Precondition(_))));
    }

    #[test]
    fn f_mean_at_zero_is_scaled_divisor_mean() {
        let s = Sieve::new(5000);
        let m = FactoredInteger::from_factors(vec![(2, 1), (3, 1)]).unwrap();
        let n = FactoredInteger::from_factors(vec![(3, 1)]).unwrap();
        let f = check_f_mean::<f64>(&s, 2, &m, &n, &0.0, 5000, 53).unwrap();
        let d = check_divisor_mean::<f64>(&s, 2, &m, 5000, 53).unwrap();
        assert!((f.lhs.re * 3.0 - d.lhs.re).abs() < 1e-9 * d.lhs.re);
        assert!(f.lhs.im.abs() < 1e-12);
    }

    #[test]
    fn prime_sum_term_count_grows_with_alpha() {
        assert!(prime_sum_terms(0.0, 13.8, 1, 1.0) <= 1);
        assert!(prime_sum_terms(0.1, 13.8, 1, 1.0) > prime_sum_terms(0.01, 13.8, 1, 1.0));
    }

    #[test]
    fn power_moment_exact() {
        let g = RationalPoly::from_ints(&[1, 1]);
        // ∫₀^{1/2} δ(1+δ) = 1/8 + 1/24
        assert_eq!(power_moment(&g, 1, &q(1, 2)), q(1, 6));
    }

    #[test]
    fn growth_capacity() {
        let s = Sieve::new(10_000);
        assert!(matches!(growth_lemma9::<f64>(&s, 1, 0, &[6000], 53), Err(Error::Capacity { .. })));
    }
}
