//! Exact triangle integrals against Gauss–Legendre quadrature.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zgap_core::combinat::q;
use zgap_core::moments::{i_p, k_p, IIndex, KIndex};
use zgap_core::poly::{triangle_integral, BivariatePoly, RationalPoly};
use zgap_core::series::{d_rational, GapConfig};

fn rule(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).unwrap())
}

fn eval(p: &RationalPoly, x: f64) -> f64 {
    p.to_f64_coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// ∫_0^1 ∫_0^{1−x} f(x, y) dy dx.
fn triangle_quad(gl: &GaussLegendre, f: impl Fn(f64, f64) -> f64) -> f64 {
    gl.integrate(0.0, 1.0, |x| gl.integrate(0.0, 1.0 - x, |y| f(x, y)))
}

/// Q_u[P](x) = ∫_0^1 θ^u P(x + θ(1−x)) dθ.
fn q_quad(gl: &GaussLegendre, p: &RationalPoly, u: usize, x: f64) -> f64 {
    gl.integrate(0.0, 1.0, |t| t.powi(u as i32) * eval(p, x + t * (1.0 - x)))
}

#[test]
fn random_polynomials_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(183);
    let gl = rule(16);
    for _ in 0..100 {
        let mut f = BivariatePoly::zero();
        let terms = rng.random_range(1..8);
        for _ in 0..terms {
            let a = rng.random_range(0..=12usize);
            let b = rng.random_range(0..=(12 - a));
            f.add_term(a, b, q(rng.random_range(-50..=50), rng.random_range(1..=7)));
        }
        let exact = triangle_integral(&f).to_f64().unwrap();
        let num = triangle_quad(&gl, |x, y| f.eval_f64(x, y));
        assert!((exact - num).abs() < 1e-12, "{exact} vs {num}");
    }
}

#[test]
fn structure_integrals_match_quadrature() {
    let p = GapConfig::paper().poly;
    let gl = rule(24);
    let idx = IIndex::new(2, [2, 2, 3, 1, 2]);
    let exact = i_p(&idx, &p).to_f64().unwrap();
    let num = triangle_quad(&gl, |x, y| {
        x.powi(3)
            * (1.0 - x).powi(2)
            * (1.0 - x - y).powi(2)
            * y.powi(3)
            * q_quad(&gl, &p, 1, x)
            * q_quad(&gl, &p, 2, x + y)
    });
    assert!((exact - num).abs() < 1e-12 * exact.abs().max(1.0), "{exact} vs {num}");

    let kidx = KIndex::new(2, [3, 4, 3], q(1, 2));
    let exact = k_p(&kidx, &p).to_f64().unwrap();
    let num = triangle_quad(&gl, |x, y| {
        x * (2.0 - x).powi(3) * y.powi(3) * (1.0 - y).powi(4) * eval(&p, x + y) * q_quad(&gl, &p, 3, y)
    });
    assert!((exact - num).abs() < 1e-12 * exact.abs().max(1.0), "{exact} vs {num}");
}

#[test]
fn denominator_matches_quadrature() {
    let p = GapConfig::paper().poly;
    let gl = rule(24);
    let exact = d_rational(2, &p, &q(1, 2)).unwrap().to_f64().unwrap();
    let num = gl.integrate(0.0, 1.0, |a| {
        let q1 = q_quad(&gl, &p, 1, a);
        let q2 = q_quad(&gl, &p, 2, a);
        2.0 * a.powi(3) * (1.0 - a).powi(4) * q1 * q1 - 2.0 * a.powi(3) * (1.0 - a).powi(5) * q1 * q2
    });
    assert!(exact > 0.0);
    assert!((exact - num).abs() < 1e-12 * exact, "{exact} vs {num}");
}
