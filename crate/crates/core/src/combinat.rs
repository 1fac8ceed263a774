//! Cached factorials and small rational helpers.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

static FACTORIALS: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// n! as an unbounded integer, memoized process wide.
pub fn factorial(n: usize) -> BigInt {
    {
        let t = FACTORIALS.read().expect("factorial cache");
        if let Some(v) = t.get(n) {
            return v.clone();
        }
    }
    let mut t = FACTORIALS.write().expect("factorial cache");
    if t.is_empty() {
        t.push(BigInt::one());
    }
    while t.len() <= n {
        let k = t.len();
        let next = &t[k - 1] * BigInt::from(k);
        t.push(next);
    }
    t[n].clone()
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_u64(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = acc.gcd(&den);
        acc = (acc / g) * (num / (den / g));
    }
    acc
}

/// Shorthand for an exact fraction.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// q^e for a nonnegative integer exponent.
pub fn qpow(base: &BigRational, e: usize) -> BigRational {
    num_traits::pow(base.clone(), e)
}

/// a!·b!/(a+b+1)!, the Beta integral ∫₀¹ t^a (1−t)^b dt.
pub fn beta_int(a: usize, b: usize) -> BigRational {
    BigRational::new(factorial(a) * factorial(b), factorial(a + b + 1))
}

static BERNOULLI: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// B_0..=B_n with B_1 = −1/2, from Σ_{k≤m} C(m+1,k) B_k = 0; memoized.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    {
        let t = BERNOULLI.read().expect("bernoulli cache");
        if t.len() > n {
            return t[..=n].to_vec();
        }
    }
    let mut b = BERNOULLI.write().expect("bernoulli cache");
    while b.len() <= n {
        let m = b.len();
        let next = if m == 0 {
            BigRational::one()
        } else if m > 1 && m % 2 == 1 {
            BigRational::zero()
        } else {
            let mut s = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    s += BigRational::from_integer(binomial(m + 1, k)) * bk;
                }
            }
            -s / BigRational::from_integer(BigInt::from(m + 1))
        };
        b.push(next);
    }
    b[..=n].to_vec()
}

/// B_n, memoized.
pub fn bernoulli(n: usize) -> BigRational {
    {
        let t = BERNOULLI.read().expect("bernoulli cache");
        if let Some(v) = t.get(n) {
            return v.clone();
        }
    }
    bernoulli_numbers(n)[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[12], q(-691, 2730));
        assert!(b[7].is_zero());
    }

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(10), BigInt::from(3_628_800));
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial_u64(60, 30), 118_264_581_564_861_424);
        assert_eq!(beta_int(1, 1), q(1, 6));
    }
}
