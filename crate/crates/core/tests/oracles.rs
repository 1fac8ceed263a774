//! Worked examples for the arithmetic kernel, Euler products and the criterion series.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use zgap_core::arith::*;
use zgap_core::combinat::{factorial, q};
use zgap_core::moments::{i_p, i_p_bound, k_p as k_int, k_p_bound, IIndex, KIndex};
use zgap_core::poly::RationalPoly;
use zgap_core::scalar::{BigReal, Real};
use zgap_core::series::*;

#[test]
fn factorization_and_divisors() {
    let s = Sieve::new(10_000);
    assert_eq!(s.factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
    assert!(s.factorize(1).unwrap().factors().is_empty());
    assert_eq!(s.factorize(9973).unwrap().factors(), &[(9973, 1)]);
    assert_eq!(d_r(&s.factorize(6).unwrap(), 2), 4u32.into());
    assert_eq!(d_r(&s.factorize(4).unwrap(), 3), 6u32.into());
    assert_eq!(d_r(&s.factorize(9240).unwrap(), 1), 1u32.into());
}

#[test]
fn r_k_and_k_p() {
    let s = Sieve::new(100);
    assert_eq!(r_k_at_one(&s.factorize(6).unwrap()), q(1, 3));
    assert_eq!(r_k_at_one(&s.factorize(4).unwrap()), q(1, 2));
    let one: Complex<f64> = r_k(&FactoredInteger::one(), &Complex::new(0.3, 2.0), 53);
    assert_eq!(one, Complex::new(1.0, 0.0));

    let k0 = k_p::<f64>(2, &0.0, 53);
    assert!(k0.norm() < 1e-15);
    let a = k_p::<f64>(2, &0.1, 53);
    let b = k_p::<f64>(2, &-0.1, 53);
    assert!((a - b.conj()).norm() < 1e-15);
    // independent evaluation at 256 bits
    let hi = k_p::<BigReal>(2, &BigReal::from_rational(&q(1, 10), 256), 256);
    assert!((a.re - hi.re.to_f64()).abs() < 1e-15 && (a.im - hi.im.to_f64()).abs() < 1e-15);
}

#[test]
fn euler_products() {
    let a3_lo = a_r::<BigReal>(3, 100_000, 128).unwrap();
    let a3_hi = a_r::<BigReal>(3, 1_000_000, 128).unwrap();
    let diff = (a3_lo.value.clone() - a3_hi.value.clone()).abs();
    assert!(diff <= a3_lo.tail_bound.clone() + a3_hi.tail_bound.clone());

    let c1 = c_r::<BigReal>(1, 128).unwrap();
    let a2 = a_r::<BigReal>(2, DEFAULT_EULER_CUTOFF, 128).unwrap();
    assert_eq!(c1.value, a2.value);
    let c2 = c_r::<BigReal>(2, 128).unwrap();
    assert_eq!(c2.value.to_rational(), (a3_hi.value.clone() / BigReal::from_int(6, 128)).to_rational());
    let c3 = c_r_with_cutoff::<f64>(3, 10_000, 64).unwrap();
    let a4 = a_r::<f64>(4, 10_000, 64).unwrap();
    let den: f64 = (factorial(8) * 4u32).to_f64().unwrap();
    assert!((c3.value - a4.value / den).abs() < 1e-15 * c3.value);
}

#[test]
fn structure_bounds_on_random_indices() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(239);
    let p = GapConfig::paper().poly;
    for _ in 0..200 {
        let r = rng.random_range(1..=3);
        let n: [usize; 5] = std::array::from_fn(|_| rng.random_range(0..6));
        let idx = IIndex::new(r, n);
        assert!(i_p(&idx, &p).abs() <= i_p_bound(&idx, &p));
        let kidx = KIndex::new(r, [n[0], n[1], n[2]], q(1, 2));
        assert!(k_int(&kidx, &p).abs() <= k_p_bound(&kidx, &p).unwrap());
    }
    let s = q(-3, 2);
    let idx = IIndex::new(2, [1, 2, 3, 1, 1]);
    assert_eq!(i_p_bound(&idx, &p.scale(&s)), &s * &s * i_p_bound(&idx, &p));
}

#[test]
fn series_building_blocks() {
    let one = RationalPoly::one();
    let h = q(1, 2);
    assert_eq!(i_hat(1, 0, &h, &one), q(-1, 6));
    assert_eq!(k_hat(1, 0, &h, &one), q(-1, 4));
    assert_eq!(d_rational(1, &one, &h).unwrap(), q(5, 12));
    let p = GapConfig::paper().poly;
    let s = q(7, 3);
    assert_eq!(i_hat(2, 4, &h, &p.scale(&s)), &s * &s * i_hat(2, 4, &h, &p));
    assert_eq!(k_hat(2, 4, &h, &p.scale(&s)), &s * &s * k_hat(2, 4, &h, &p));
}

#[test]
fn i_hat_paper_bound() {
    let h = q(1, 2);
    let p = GapConfig::paper().poly;
    for r in 1..=3usize {
        for j in 1..=12usize {
            let bound = p.l1_norm().pow(2)
                * BigRational::new(factorial(r * r - 1), (2 * j + 1).into())
                * BigRational::new(factorial(r + 2 * j + 1) * 4, factorial(r * r + r + 2 * j + 1));
            assert!(i_hat(r as u32, 2 * j, &h, &p).abs() <= bound, "r={r} j={j}");
        }
    }
}

#[test]
fn partial_sums_stay_within_tail() {
    let base = GapConfig::paper().with_truncation(30);
    let kappa = q(29125, 10000);
    let short = CriterionSeries::new(&base).unwrap().evaluate::<BigReal>(&kappa).unwrap();
    let long = CriterionSeries::new(&base.clone().with_truncation(45)).unwrap().evaluate::<BigReal>(&kappa).unwrap();
    let gap = (short.value.to_rational() - long.value.to_rational()).abs();
    assert!(gap <= &short.tail.bound + &short.rounding + &long.rounding);
}

#[test]
fn series_near_zero() {
    let s = CriterionSeries::new(&GapConfig::paper().with_truncation(10)).unwrap();
    let rs = s.realize::<f64>();
    assert_eq!(rs.eval(&0.0), 0.0);
    // f(κ)/κ³ tends to the leading coefficient times π²
    let lead = s.normalized[0].to_f64().unwrap() * std::f64::consts::PI.powi(2);
    let k = 1e-4;
    assert!((rs.eval(&k) / k.powi(3) - lead).abs() < 1e-6 * lead.abs());
}

#[test]
fn paper_partial_sum_is_close() {
    let ev = f_r::<BigReal>(&q(29125, 10000), &GapConfig::paper()).unwrap();
    assert!((ev.value.to_f64() - 0.9999845837).abs() < 1e-8);
    assert!(ev.certified_below_one());
}

#[test]
fn constant_term_checks() {
    assert!(ct_consistency(2, &GapConfig::paper().poly, &q(1, 2)).is_zero());
    assert!(ct_consistency(1, &RationalPoly::one(), &q(1, 2)).is_zero());
    for r in 1..=10 {
        assert!(ct_kernel(r).is_zero());
    }
}
