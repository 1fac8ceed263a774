//! The structure integrals i_P and k_P over the triangle x, y ≥ 0, x + y ≤ 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinat::{binomial, factorial, q};
use crate::error::{Error, Result};
use crate::poly::{compute_q, triangle_integral, BivariatePoly, RationalPoly};

/// Index vector (n1..n5) of i_P.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IIndex {
    pub r: u32,
    pub n: [usize; 5],
}

impl IIndex {
    pub fn new(r: u32, n: [usize; 5]) -> Self {
        IIndex { r, n }
    }
}

/// Index vector (n1, n2, n3) of k_P together with η.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KIndex {
    pub r: u32,
    pub n: [usize; 3],
    pub eta: BigRational,
}

impl KIndex {
    pub fn new(r: u32, n: [usize; 3], eta: BigRational) -> Self {
        KIndex { r, n, eta }
    }
}

/// Integer numerators over a common denominator.
struct Scaled {
    nums: Vec<BigInt>,
    den: BigInt,
}

impl Scaled {
    fn from_poly(p: &RationalPoly) -> Self {
        let den = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let nums = p.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Scaled { nums, den }
    }
}

/// ∫∫_T X(x)·Y(y)·S(x+y) dy dx, exactly.
///
/// Expands S(x+y) binomially and sums a!b!/(a+b+2)! over a common factorial denominator,
/// so the inner loop is pure integer arithmetic.
pub fn triangle_product_integral(x: &RationalPoly, y: &RationalPoly, s: &RationalPoly) -> BigRational {
    if x.is_zero() || y.is_zero() || s.is_zero() {
        return BigRational::zero();
    }
    let (sx, sy, ss) = (Scaled::from_poly(x), Scaled::from_poly(y), Scaled::from_poly(s));
    let top = sx.nums.len() + sy.nums.len() + ss.nums.len();
    let fact: Vec<BigInt> = (0..=top + 2).map(factorial).collect();
    // tail[m] = (top+2)!/(m+2)!
    let mut tail = vec![BigInt::one(); top + 1];
    for m in (0..top).rev() {
        tail[m] = &tail[m + 1] * BigInt::from(m + 3);
    }

    let mut acc = BigInt::zero();
    for (k, sk) in ss.nums.iter().enumerate() {
        if sk.is_zero() {
            continue;
        }
        for t in 0..=k {
            let w = sk * binomial(k, t);
            let mut inner = BigInt::zero();
            for (a, xa) in sx.nums.iter().enumerate() {
                if xa.is_zero() {
                    continue;
                }
                let fa = xa * &fact[a + t];
                let mut row = BigInt::zero();
                for (b, yb) in sy.nums.iter().enumerate() {
                    if yb.is_zero() {
                        continue;
                    }
                    let bb = b + k - t;
                    row += yb * &fact[bb] * &tail[a + t + bb];
                }
                inner += fa * row;
            }
            acc += w * inner;
        }
    }
    BigRational::new(acc, sx.den * sy.den * ss.den * &fact[top + 2])
}

fn monomial(k: usize) -> RationalPoly {
    RationalPoly::monomial(BigRational::one(), k)
}

/// (c − x)^n by the binomial theorem.
fn shifted_power(c: &BigRational, n: usize) -> RationalPoly {
    RationalPoly::new(
        (0..=n)
            .map(|i| {
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                BigRational::from_integer(binomial(n, i) * sign) * num_traits::pow(c.clone(), n - i)
            })
            .collect(),
    )
}

/// i_P with the two P-derived factors taken from different polynomials:
/// ∫∫ x^{r²−1}(1−x)^{n1}(1−x−y)^{n2} y^{n3} Q_{n4}[P1](x) Q_{n5}[P2](x+y).
pub fn i_p_bilinear(idx: &IIndex, p1: &RationalPoly, p2: &RationalPoly) -> BigRational {
    let [n1, n2, n3, n4, n5] = idx.n;
    let r2 = (idx.r * idx.r) as usize;
    let one = BigRational::one();
    let x = &(&monomial(r2 - 1) * &shifted_power(&one, n1)) * &compute_q(p1, n4);
    let y = monomial(n3);
    let s = &shifted_power(&one, n2) * &compute_q(p2, n5);
    triangle_product_integral(&x, &y, &s)
}

pub fn i_p(idx: &IIndex, p: &RationalPoly) -> BigRational {
    i_p_bilinear(idx, p, p)
}

/// k_P with P(x+y) from `p1` and Q_{n3} from `p2`:
/// ∫∫ x^{r−1}(η⁻¹−x)^{n1} y^{r²−1}(1−y)^{n2} P1(x+y) Q_{n3}[P2](y).
pub fn k_p_bilinear(idx: &KIndex, p1: &RationalPoly, p2: &RationalPoly) -> BigRational {
    let [n1, n2, n3] = idx.n;
    let r = idx.r as usize;
    let inv_eta = idx.eta.recip();
    let x = &monomial(r - 1) * &shifted_power(&inv_eta, n1);
    let y = &(&monomial(r * r - 1) * &shifted_power(&BigRational::one(), n2)) * &compute_q(p2, n3);
    triangle_product_integral(&x, &y, p1)
}

pub fn k_p(idx: &KIndex, p: &RationalPoly) -> BigRational {
    k_p_bilinear(idx, p, p)
}

/// Reference evaluation of i_P through a full bivariate expansion.
pub fn i_p_expanded(idx: &IIndex, p: &RationalPoly) -> BigRational {
    let [n1, n2, n3, n4, n5] = idx.n;
    let r2 = (idx.r * idx.r) as usize;
    let one = BigRational::one;
    let f = BivariatePoly::monomial(one(), r2 - 1, n3);
    let f = &f * &BivariatePoly::linear(one(), -one(), BigRational::zero()).pow(n1);
    let f = &f * &BivariatePoly::linear(one(), -one(), -one()).pow(n2);
    let f = &f * &BivariatePoly::in_x(&compute_q(p, n4));
    let f = &f * &BivariatePoly::in_sum(&compute_q(p, n5));
    triangle_integral(&f)
}

/// Reference evaluation of k_P through a full bivariate expansion.
pub fn k_p_expanded(idx: &KIndex, p: &RationalPoly) -> BigRational {
    let [n1, n2, n3] = idx.n;
    let r = idx.r as usize;
    let one = BigRational::one;
    let f = BivariatePoly::monomial(one(), r - 1, r * r - 1);
    let f = &f * &BivariatePoly::linear(idx.eta.recip(), -one(), BigRational::zero()).pow(n1);
    let f = &f * &BivariatePoly::linear(one(), BigRational::zero(), -one()).pow(n2);
    let f = &f * &BivariatePoly::in_sum(p);
    let f = &f * &BivariatePoly::in_y(&compute_q(p, n3));
    triangle_integral(&f)
}

/// ‖P‖₁²(r²−1)!(n1+n3+1)!/((n1+n3+r²+1)!(n3+1)) ≥ |i_P|.
pub fn i_p_bound(idx: &IIndex, p: &RationalPoly) -> BigRational {
    let [n1, _, n3, _, _] = idx.n;
    let r2 = (idx.r * idx.r) as usize;
    let norm = p.l1_norm();
    &norm
        * &norm
        * BigRational::new(
            factorial(r2 - 1) * factorial(n1 + n3 + 1),
            factorial(n1 + n3 + r2 + 1) * BigInt::from(n3 + 1),
        )
}

/// ‖P‖₁²·2^{n1}(r²−1)!·n2!/(r·(r²+n2)!) ≥ |k_P|, valid for η = 1/2.
pub fn k_p_bound(idx: &KIndex, p: &RationalPoly) -> Result<BigRational> {
    if idx.eta != q(1, 2) {
        return Err(Error::Unsupported(format!("k_P bound needs eta = 1/2, got {}", idx.eta)));
    }
    let [n1, n2, _] = idx.n;
    let r = idx.r as usize;
    let norm = p.l1_norm();
    Ok(&norm
        * &norm
        * BigRational::new(
            (BigInt::one() << n1) * factorial(r * r - 1) * factorial(n2),
            BigInt::from(r) * factorial(r * r + n2),
        ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> RationalPoly {
        RationalPoly::one()
    }

    fn half() -> BigRational {
        q(1, 2)
    }

    #[test]
    fn i_p_examples() {
        assert_eq!(i_p(&IIndex::new(1, [0, 0, 0, 0, 0]), &one()), q(1, 2));
        assert_eq!(i_p(&IIndex::new(1, [1, 1, 0, 0, 0]), &one()), q(1, 8));
        assert_eq!(i_p(&IIndex::new(2, [0, 0, 0, 0, 0]), &one()), q(1, 20));
    }

    #[test]
    fn k_p_examples() {
        assert_eq!(k_p(&KIndex::new(1, [0, 0, 0], half()), &one()), q(1, 2));
        assert_eq!(k_p(&KIndex::new(1, [2, 1, 0], half()), &one()), q(9, 10));
        assert_eq!(k_p(&KIndex::new(1, [1, 2, 1], half()), &one()), q(1, 5));
    }

    #[test]
    fn fast_path_matches_expansion() {
        let p = RationalPoly::new(vec![q(1, 1), q(-1, 10), q(100, 1), q(-1, 5)]);
        for r in 1..=3 {
            for n in [[0, 0, 0, 0, 0], [2, 1, 3, 1, 2], [3, 3, 7, 2, 3], [1, 0, 12, 0, 4]] {
                let idx = IIndex::new(r, n);
                assert_eq!(i_p(&idx, &p), i_p_expanded(&idx, &p), "{idx:?}");
            }
            for n in [[0, 0, 0], [5, 2, 1], [9, 4, 3], [2, 0, 5]] {
                for eta in [q(1, 2), q(1, 3), q(2, 5)] {
                    let idx = KIndex::new(r, n, eta);
                    assert_eq!(k_p(&idx, &p), k_p_expanded(&idx, &p), "{idx:?}");
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(i_p_bound(&IIndex::new(1, [0, 0, 0, 0, 0]), &one()), q(1, 2));
        assert_eq!(k_p_bound(&KIndex::new(1, [0, 0, 0], half()), &one()).unwrap(), q(1, 1));
        assert_eq!(k_p_bound(&KIndex::new(1, [2, 1, 0], half()), &one()).unwrap(), q(2, 1));
        assert!(matches!(k_p_bound(&KIndex::new(1, [0, 0, 0], q(1, 3)), &one()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bilinear_in_p() {
        let p = RationalPoly::new(vec![q(3, 7), q(-2, 1), q(5, 3)]);
        let s = q(-7, 4);
        let sp = p.scale(&s);
        let ii = IIndex::new(2, [2, 2, 4, 1, 2]);
        assert_eq!(i_p(&ii, &sp), &s * &s * i_p(&ii, &p));
        let ki = KIndex::new(2, [4, 3, 2], half());
        assert_eq!(k_p(&ki, &sp), &s * &s * k_p(&ki, &p));
    }
}
