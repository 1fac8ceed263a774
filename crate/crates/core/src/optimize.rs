//! The gap bound λ_r = sup{κ : f_r(κπ) < 1} and a search over mollifier polynomials.

use std::cell::Cell;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinat::q;
use crate::error::{Error, Result};
use crate::poly::{parse_rational, RationalPoly};
use crate::scalar::{BigReal, Precision, Real};
use crate::series::{
    criterion_coefficient_bilinear, d_rational_bilinear, CriterionSeries, GapConfig, SeriesEvaluation,
};

pub const SCAN_POINTS: usize = 512;
pub const BISECTION_BITS: usize = 60;

/// Result of locating λ_r for one configuration.
#[derive(Clone, Debug)]
pub struct LambdaReport<S = BigReal> {
    pub config: GapConfig,
    /// κ* with c* = κ*π; equal to the certified point c_lo/π.
    pub kappa_star: BigRational,
    pub c_star: S,
    /// λ lower bound c*/π = κ*.
    pub lambda_lower: BigRational,
    /// f at c*, with tail certificate.
    pub f_at_c_star: SeriesEvaluation<S>,
    /// (κ_lo, κ_hi) with f(κ_lo) < 1 ≤ f(κ_hi); `None` when the scan hit scan_max.
    pub bracket: Option<(BigRational, BigRational)>,
    pub boundary: bool,
}

impl<S: Real> LambdaReport<S> {
    pub fn lambda_f64(&self) -> f64 {
        self.lambda_lower.to_f64().unwrap_or(f64::NAN)
    }

    /// 1 − (value + tail + rounding), exact.
    pub fn margin(&self) -> BigRational {
        BigRational::one() - self.f_at_c_star.upper_bound()
    }

    pub fn certified(&self) -> bool {
        self.f_at_c_star.certified_below_one()
    }
}

/// Last upward crossing of `f` through 1 on a uniform grid over (0, kmax], refined by bisection.
///
/// Returns the bracket, or `None` when f < 1 on the whole grid.
fn locate_crossing<F: FnMut(&BigRational) -> bool>(
    kmax: &BigRational,
    points: usize,
    bits: usize,
    mut below_one: F,
) -> Option<(BigRational, BigRational)> {
    let step = kmax / BigRational::from_integer(BigInt::from(points));
    let grid: Vec<bool> = (1..=points).map(|i| below_one(&(&step * BigRational::from_integer(i.into())))).collect();
    // f(0) = 0 < 1
    let mut last = None;
    let mut prev = true;
    for (i, &b) in grid.iter().enumerate() {
        if prev && !b {
            last = Some(i);
        }
        prev = b;
    }
    let i = last?;
    let mut lo = &step * BigRational::from_integer(i.into());
    let mut hi = &step * BigRational::from_integer((i + 1).into());
    let two = BigRational::from_integer(2.into());
    for _ in 0..bits {
        let mid = (&lo + &hi) / &two;
        if below_one(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// λ_r with f evaluated in the scalar `S`.
pub fn lambda_r_in<S: Real>(config: &GapConfig) -> Result<LambdaReport<S>> {
    let series = CriterionSeries::new(config)?;
    lambda_from_series(&series)
}

/// λ_r at the configured arbitrary precision.
pub fn lambda_r(config: &GapConfig) -> Result<LambdaReport<BigReal>> {
    lambda_r_in::<BigReal>(config)
}

pub fn lambda_from_series<S: Real>(series: &CriterionSeries) -> Result<LambdaReport<S>> {
    let config = &series.config;
    let prec = config.precision;
    let rs = series.realize::<S>();
    let one = S::from_int(1, prec);
    let below = |k: &BigRational| rs.eval(&S::from_rational(k, prec)) < one;
    let bracket = locate_crossing(&config.scan_max, SCAN_POINTS, BISECTION_BITS, below);

    let (mut kappa, boundary) = match &bracket {
        Some((lo, _)) => (lo.clone(), false),
        None => (config.scan_max.clone(), true),
    };
    let mut eval = series.evaluate::<S>(&kappa)?;
    // step back until value + tail + rounding < 1
    let nudge = &config.scan_max / BigRational::from_integer(BigInt::from(SCAN_POINTS) << BISECTION_BITS);
    let mut tries = 0;
    while !eval.certified_below_one() {
        tries += 1;
        if tries > 64 {
            return Err(Error::Search("could not certify f < 1 below the crossing".into()));
        }
        kappa = &kappa - &nudge * BigRational::from_integer(BigInt::one() << tries);
        if !kappa.is_positive() {
            return Err(Error::Search("certification walked to κ ≤ 0".into()));
        }
        eval = series.evaluate::<S>(&kappa)?;
    }
    let c_star = S::from_rational(&kappa, prec) * S::pi(prec);
    Ok(LambdaReport {
        config: config.clone(),
        kappa_star: kappa.clone(),
        c_star,
        lambda_lower: kappa,
        f_at_c_star: eval,
        bracket,
        boundary,
    })
}

/// Machine-checkable record of a λ computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: u32,
    pub eta: String,
    pub poly: Vec<String>,
    #[serde(rename = "J")]
    pub truncation: usize,
    pub precision_bits: usize,
    pub kappa_star: String,
    pub partial_sum: String,
    /// Truncation tail plus floating-rounding allowance.
    pub tail_bound: String,
    /// 1 − (partial_sum + tail_bound).
    pub margin: String,
    /// A_j/D_rat for j = 1..=J; f = Σ coefficient_j κ^{2j+1} π^{2j}.
    pub coefficients: Vec<String>,
}

fn rational_decimal(x: &BigRational, prec: Precision) -> String {
    BigReal::from_rational(x, prec).to_decimal()
}

pub fn certify<S: Real>(report: &LambdaReport<S>) -> Certificate {
    let cfg = &report.config;
    let ev = &report.f_at_c_star;
    let tail = &ev.tail.bound + &ev.rounding;
    Certificate {
        r: cfg.r,
        eta: cfg.eta.to_string(),
        poly: cfg.poly.to_rational_strings(),
        truncation: cfg.truncation,
        precision_bits: cfg.precision,
        kappa_star: report.kappa_star.to_string(),
        partial_sum: ev.value.to_decimal(),
        tail_bound: rational_decimal(&tail, cfg.precision),
        margin: rational_decimal(&report.margin(), cfg.precision),
        coefficients: ev.coefficients.iter().map(|c| c.to_string()).collect(),
    }
}

fn parse_field(s: &str, name: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::Verification(format!("unparsable {name}: {s}")))
}

/// Recompute a certificate from its inputs and check every field.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    let eta = parse_field(&cert.eta, "eta")?;
    let coeffs = cert.poly.iter().map(|s| parse_field(s, "poly")).collect::<Result<Vec<_>>>()?;
    let kappa = parse_field(&cert.kappa_star, "kappa_star")?;
    let mut cfg = GapConfig::new(cert.r, RationalPoly::new(coeffs));
    cfg.eta = eta;
    cfg.truncation = cert.truncation;
    cfg.precision = cert.precision_bits;
    let series = CriterionSeries::new(&cfg)?;
    if series.normalized.len() != cert.coefficients.len() {
        return Err(Error::Verification("coefficient count mismatch".into()));
    }
    for (j, (mine, theirs)) in series.normalized.iter().zip(&cert.coefficients).enumerate() {
        if *mine != parse_field(theirs, "coefficient")? {
            return Err(Error::Verification(format!("coefficient A_{} differs", j + 1)));
        }
    }
    let ev = series.evaluate::<BigReal>(&kappa)?;
    if ev.value.to_decimal() != cert.partial_sum {
        return Err(Error::Verification("partial sum differs".into()));
    }
    let tail = &ev.tail.bound + &ev.rounding;
    if rational_decimal(&tail, cfg.precision) != cert.tail_bound {
        return Err(Error::Verification("tail bound differs".into()));
    }
    if !ev.certified_below_one() {
        return Err(Error::Verification("value + tail is not below 1".into()));
    }
    Ok(())
}

/// Criterion coefficients as quadratic forms in the coefficient vector of P.
///
/// A_j(P) = pᵀ M_j p and D_rat(P) = pᵀ N p over the monomial basis.
#[derive(Clone, Debug)]
pub struct GramModel {
    pub r: u32,
    pub degree: usize,
    pub truncation: usize,
    pub eta: BigRational,
    pub m: Vec<Vec<Vec<BigRational>>>,
    pub n: Vec<Vec<BigRational>>,
    /// M_j·(κ_ref π)^{2j} in f64, so f64 never underflows.
    m_scaled: Vec<Vec<Vec<f64>>>,
    n_f64: Vec<Vec<f64>>,
    kappa_ref: f64,
}

impl GramModel {
    pub fn new(r: u32, degree: usize, truncation: usize, eta: BigRational, kappa_ref: &BigRational) -> Self {
        let basis: Vec<RationalPoly> = (0..=degree).map(|a| RationalPoly::monomial(BigRational::one(), a)).collect();
        let m: Vec<Vec<Vec<BigRational>>> = (1..=truncation)
            .map(|j| {
                basis
                    .iter()
                    .map(|pa| basis.iter().map(|pb| criterion_coefficient_bilinear(r, j, &eta, pa, pb)).collect())
                    .collect()
            })
            .collect();
        let n: Vec<Vec<BigRational>> =
            basis.iter().map(|pa| basis.iter().map(|pb| d_rational_bilinear(r, pa, pb, &eta)).collect()).collect();

        let prec = 128;
        let cpi2 = {
            let c = BigReal::from_rational(kappa_ref, prec) * BigReal::pi(prec);
            c.clone() * c
        };
        let mut scale = BigReal::from_int(1, prec);
        let mut m_scaled = Vec::with_capacity(truncation);
        for mj in &m {
            scale = scale * cpi2.clone();
            m_scaled.push(
                mj.iter()
                    .map(|row| row.iter().map(|e| (BigReal::from_rational(e, prec) * scale.clone()).to_f64()).collect())
                    .collect(),
            );
        }
        let n_f64 = n.iter().map(|row| row.iter().map(|e| e.to_f64().unwrap_or(f64::NAN)).collect()).collect();
        GramModel {
            r,
            degree,
            truncation,
            eta,
            m,
            n,
            m_scaled,
            n_f64,
            kappa_ref: kappa_ref.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn form(mat: &[Vec<f64>], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, row) in mat.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                s += p[a] * v * p[b];
            }
        }
        s
    }

    fn form_exact(mat: &[Vec<BigRational>], p: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (a, row) in mat.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                s += &p[a] * v * &p[b];
            }
        }
        s
    }

    /// Exact A_j and D_rat for a coefficient vector.
    pub fn exact(&self, p: &RationalPoly) -> (Vec<BigRational>, BigRational) {
        let v: Vec<BigRational> = (0..=self.degree).map(|k| p.coeff(k)).collect();
        let a = self.m.iter().map(|mj| Self::form_exact(mj, &v)).collect();
        (a, Self::form_exact(&self.n, &v))
    }

    /// f64 proxy: coefficients of f in powers of (κ/κ_ref)², or `None` if D ≤ 0.
    pub fn float_series(&self, p: &[f64]) -> Option<Vec<f64>> {
        let d = Self::form(&self.n_f64, p);
        if !(d > 0.0) {
            return None;
        }
        Some(self.m_scaled.iter().map(|mj| Self::form(mj, p) / d).collect())
    }

    pub fn float_value(&self, b: &[f64], kappa: f64) -> f64 {
        let t = (kappa / self.kappa_ref).powi(2);
        let mut acc = 0.0;
        for v in b.iter().rev() {
            acc = acc * t + v;
        }
        acc * t * kappa
    }

    /// λ from the f64 proxy, same scan and bisection as [`lambda_r`].
    pub fn float_lambda(&self, p: &[f64], scan_max: f64) -> Option<f64> {
        let b = self.float_series(p)?;
        let step = scan_max / SCAN_POINTS as f64;
        let mut last = None;
        let mut prev = true;
        for i in 1..=SCAN_POINTS {
            let below = self.float_value(&b, step * i as f64) < 1.0;
            if prev && !below {
                last = Some(i - 1);
            }
            prev = below;
        }
        let Some(i) = last else {
            return Some(scan_max);
        };
        let (mut lo, mut hi) = (step * i as f64, step * (i + 1) as f64);
        for _ in 0..BISECTION_BITS {
            let mid = 0.5 * (lo + hi);
            if self.float_value(&b, mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// Progress of a polynomial search.
#[derive(Clone, Debug)]
pub struct SearchState {
    pub r: u32,
    pub degree: usize,
    /// Best coefficient vector, constant term 1.
    pub coefficients: Vec<BigRational>,
    pub best: LambdaReport<BigReal>,
    pub budget: usize,
    pub evaluations: usize,
    pub seed: u64,
    /// Best proxy λ after each restart.
    pub trace: Vec<f64>,
}

/// Search settings beyond (r, degree, budget, seed).
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub truncation: usize,
    pub precision: Precision,
    pub scan_max: BigRational,
    /// Iterations per Nelder–Mead restart.
    pub restart_iters: u64,
    /// Half-width, in asinh units, of the random starting box.
    pub start_spread: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            truncation: crate::series::DEFAULT_TRUNCATION,
            precision: crate::series::DEFAULT_PRECISION,
            scan_max: q(4, 1),
            restart_iters: 150,
            start_spread: 6.0,
        }
    }
}

struct Objective<'a> {
    model: &'a GramModel,
    scan_max: f64,
    evals: Cell<usize>,
    budget: usize,
    best: Cell<(f64, usize)>,
    log: std::cell::RefCell<Vec<(f64, Vec<f64>)>>,
}

/// Free coefficients are parameterized as p_k = sinh(u_k) so wide magnitude ranges stay reachable.
fn to_coeffs(u: &[f64]) -> Vec<f64> {
    std::iter::once(1.0).chain(u.iter().map(|v| v.sinh())).collect()
}

impl CostFunction for &Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, u: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let n = self.evals.get();
        if n >= self.budget {
            return Ok(f64::INFINITY);
        }
        self.evals.set(n + 1);
        let p = to_coeffs(u);
        let lam = self.model.float_lambda(&p, self.scan_max);
        match lam {
            Some(l) if l.is_finite() => {
                self.log.borrow_mut().push((l, p));
                let (b, _) = self.best.get();
                if l > b {
                    self.best.set((l, n));
                }
                Ok(-l)
            }
            _ => Ok(f64::INFINITY),
        }
    }
}

/// Deterministic derivative-free search over P with P(0) = 1.
pub fn optimize_poly(r: u32, degree: usize, budget: usize, seed: u64) -> Result<SearchState> {
    optimize_poly_with(r, degree, budget, seed, &SearchOptions::default())
}

fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Round to 12 significant digits as an exact decimal rational.
fn round_coeff(x: f64) -> BigRational {
    let s = format!("{:.11e}", x);
    parse_rational(&s).unwrap_or_else(|| f64_to_rational(x))
}

pub fn optimize_poly_with(
    r: u32,
    degree: usize,
    budget: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<SearchState> {
    if budget == 0 {
        return Err(Error::Config("budget must be ≥ 1".into()));
    }
    let eta = q(1, 2);
    let mk_config = |poly: RationalPoly| {
        let mut c = GapConfig::new(r, poly);
        c.truncation = opts.truncation;
        c.precision = opts.precision;
        c.scan_max = opts.scan_max.clone();
        c
    };
    let baseline = lambda_r(&mk_config(RationalPoly::one()))?;
    if degree == 0 {
        return Ok(SearchState {
            r,
            degree,
            coefficients: vec![BigRational::one()],
            best: baseline,
            budget,
            evaluations: 1,
            seed,
            trace: Vec::new(),
        });
    }

    let model = GramModel::new(r, degree, opts.truncation, eta, &opts.scan_max);
    let scan_max = opts.scan_max.to_f64().unwrap_or(4.0);
    let obj = Objective {
        model: &model,
        scan_max,
        evals: Cell::new(0),
        budget,
        best: Cell::new((f64::NEG_INFINITY, 0)),
        log: std::cell::RefCell::new(Vec::new()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    let mut restart = 0usize;
    while obj.evals.get() < budget {
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; degree]
        } else {
            (0..degree).map(|_| rng.random_range(-opts.start_spread..opts.start_spread)).collect()
        };
        let mut simplex = vec![start.clone()];
        for k in 0..degree {
            let mut v = start.clone();
            v[k] += 1.0;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-10).map_err(|e| Error::Search(e.to_string()))?;
        let res = Executor::new(&obj, solver).configure(|s| s.max_iters(opts.restart_iters)).run();
        if let Err(e) = res {
            return Err(Error::Search(e.to_string()));
        }
        trace.push(obj.best.get().0);
        restart += 1;
        if restart > 10 * budget {
            break;
        }
    }

    // certify candidates, best proxy first, until one certifies above the baseline
    let mut log = obj.log.into_inner();
    log.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut best_state = (vec![BigRational::one()], baseline);
    for (lam, p) in log.iter().take(5) {
        if *lam <= best_state.1.lambda_f64() {
            break;
        }
        let coeffs: Vec<BigRational> =
            std::iter::once(BigRational::one()).chain(p[1..].iter().map(|&c| round_coeff(c))).collect();
        let poly = RationalPoly::new(coeffs.clone());
        let cfg = mk_config(poly.clone());
        let (raw, d) = model.exact(&poly);
        if !d.is_positive() {
            continue;
        }
        let series = CriterionSeries::from_parts(cfg, raw, d);
        if let Ok(rep) = lambda_from_series::<BigReal>(&series) {
            if rep.lambda_lower > best_state.1.lambda_lower {
                best_state = (coeffs, rep);
                break;
            }
        }
    }
    Ok(SearchState {
        r,
        degree,
        coefficients: best_state.0,
        best: best_state.1,
        budget,
        evaluations: obj.evals.get(),
        seed,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_on_a_line() {
        // f(κ) = κ/3 crosses 1 at κ = 3
        let br = locate_crossing(&q(4, 1), 64, 40, |k| k < &q(3, 1)).unwrap();
        assert!(br.0 < q(3, 1) && br.1 >= q(3, 1));
        assert!(&br.1 - &br.0 < q(1, 1 << 30));
        assert!(locate_crossing(&q(4, 1), 64, 40, |_| true).is_none());
    }

    #[test]
    fn last_upward_crossing_is_taken() {
        // below on (0,1) ∪ (2,3), above elsewhere
        let br = locate_crossing(&q(4, 1), 400, 30, |k| (k < &q(1, 1)) || (k > &q(2, 1) && k < &q(3, 1))).unwrap();
        assert!((br.0.to_f64().unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn gram_matches_direct() {
        let p = RationalPoly::new(vec![q(1, 1), q(-1, 10), q(100, 1), q(-1, 5)]);
        let model = GramModel::new(2, 3, 4, q(1, 2), &q(4, 1));
        let (a, d) = model.exact(&p);
        let cfg = GapConfig::paper().with_truncation(4);
        let s = CriterionSeries::new(&cfg).unwrap();
        assert_eq!(a, s.raw);
        assert_eq!(d, s.d_rational);
    }
}
