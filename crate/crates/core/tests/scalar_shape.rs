//! The same computations across f32, f64 and BigReal.

use zgap_core::arith::a_r;
use zgap_core::combinat::q;
use zgap_core::lab::check_divisor_mean;
use zgap_core::scalar::compensated_sum;
use zgap_core::series::{CriterionSeries, GapConfig};
use zgap_core::{arith::FactoredInteger, arith::Sieve, BigReal, RationalPoly, Real};

fn series_value<S: Real>(kappa: &zgap_core::Rational) -> f64 {
    let s = CriterionSeries::new(&GapConfig::new(2, RationalPoly::one()).with_truncation(40)).unwrap();
    let rs = s.realize::<S>();
    rs.eval(&S::from_rational(kappa, 128)).to_f64()
}

#[test]
fn series_agrees_across_scalars() {
    let k = q(5, 2);
    let big = series_value::<BigReal>(&k);
    let f64v = series_value::<f64>(&k);
    let f32v = series_value::<f32>(&k);
    assert!((big - f64v).abs() < 1e-12);
    assert!((big - f32v).abs() < 1e-4);
}

fn euler<S: Real>() -> f64 {
    a_r::<S>(2, 10_000, 64).unwrap().value.to_f64()
}

#[test]
fn euler_product_across_scalars() {
    let six = 6.0 / std::f64::consts::PI.powi(2);
    assert!((euler::<BigReal>() - six).abs() < 1e-15);
    assert!((euler::<f64>() - six).abs() < 1e-13);
    assert!((euler::<f32>() - six).abs() < 1e-5);
}

#[test]
fn lab_sums_across_scalars() {
    let s = Sieve::new(2000);
    let one = FactoredInteger::one();
    let a = check_divisor_mean::<f64>(&s, 2, &one, 2000, 53).unwrap();
    let b = check_divisor_mean::<BigReal>(&s, 2, &one, 2000, 128).unwrap();
    assert!((a.lhs.re - b.lhs.re.to_f64()).abs() < 1e-12);
}

#[test]
fn rationals_round_trip() {
    let x = q(-355, 113);
    let b = BigReal::from_rational(&x, 512);
    assert!((b.to_rational() - &x) * q(1, 1) < q(1, 1_000_000_000));
    assert_eq!(f64::from_rational(&q(1, 4), 53).to_rational(), q(1, 4));
    assert_eq!(f32::from_int(7, 24), 7.0);
}

#[test]
fn compensated_sum_is_generic() {
    let terms = [1e16, 1.0, -1e16, 1.0];
    assert_eq!(compensated_sum(terms.iter().copied()), 2.0);
    let big: Vec<BigReal> = terms.iter().map(|&t| BigReal::from_float(t, 64)).collect();
    assert_eq!(compensated_sum(big).to_f64(), 2.0);
}
