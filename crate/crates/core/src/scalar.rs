//! Scalar abstraction shared by every floating evaluation in the crate.
//!
//! Exact work is done in [`BigRational`]; anything transcendental goes
//! through a [`Real`], which is implemented for `f32`, `f64` and the
//! arbitrary precision [`BigReal`].

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

/// Working precision in bits.
pub type Precision = usize;

const RM: RoundingMode = RoundingMode::ToEven;
const MIN_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Real scalar used by the evaluators.
///
/// Constructors take a precision argument that fixed-width types ignore.
pub trait Real:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Effective mantissa width in bits.
    fn mantissa_bits(&self) -> Precision;
    fn from_rational(q: &BigRational, prec: Precision) -> Self;
    fn from_int(n: i64, prec: Precision) -> Self;
    fn from_float(x: f64, prec: Precision) -> Self;
    fn pi(prec: Precision) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value of the stored binary number.
    fn to_rational(&self) -> BigRational;
    /// Decimal rendering carrying the full stored precision.
    fn to_decimal(&self) -> String;

    fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            n >>= 1;
        }
        acc
    }

    /// Unit roundoff `2^(1 - mantissa_bits)` as a rational.
    fn unit_roundoff(&self) -> BigRational {
        let bits = self.mantissa_bits().max(2) - 1;
        BigRational::new(BigInt::one(), BigInt::one() << bits)
    }
}

fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

macro_rules! impl_real_prim {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            fn mantissa_bits(&self) -> Precision {
                $bits
            }
            fn from_rational(q: &BigRational, _: Precision) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_int(n: i64, _: Precision) -> Self {
                n as $t
            }
            fn from_float(x: f64, _: Precision) -> Self {
                x as $t
            }
            fn pi(_: Precision) -> Self {
                std::f64::consts::PI as $t
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn to_rational(&self) -> BigRational {
                f64_to_rational(*self as f64)
            }
            fn to_decimal(&self) -> String {
                format!("{:e}", self)
            }
            fn powi(&self, n: u32) -> Self {
                <$t>::powi(*self, n as i32)
            }
        }
    };
}

impl_real_prim!(f32, 24);
impl_real_prim!(f64, 53);

/// Arbitrary precision binary float carrying its working precision.
///
/// Binary operations round to the larger of the two operand precisions.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: Precision,
}

impl BigReal {
    pub fn new(v: BigFloat, prec: Precision) -> Self {
        BigReal { v, prec: prec.max(MIN_BITS) }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.v
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// Re-round to a different working precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let mut v = self.v.clone();
        let prec = prec.max(MIN_BITS);
        v.set_precision(prec, RM).expect("precision change");
        BigReal { v, prec }
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    fn from_bigint(n: &BigInt, prec: Precision) -> BigFloat {
        // Horner in base 2^64 at a width large enough to stay exact.
        let (sign, words) = n.to_u64_digits();
        let exact = (words.len() * 64 + 64).max(prec);
        let shift = BigFloat::from_u128(1u128 << 64, exact);
        let mut acc = BigFloat::from_word(0, exact);
        for w in words.iter().rev() {
            acc = acc.mul(&shift, exact, RM).add(&BigFloat::from_word(*w, exact), exact, RM);
        }
        if sign == num_bigint::Sign::Minus {
            acc.inv_sign();
        }
        acc
    }

    fn wrap(&self, v: BigFloat, other: &Self) -> Self {
        BigReal { v, prec: self.prec.max(other.prec) }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} bits)", self.to_decimal(), self.prec)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                let p = self.prec.max(rhs.prec);
                let v = self.v.$m(&rhs.v, p, RM);
                self.wrap(v, &rhs)
            }
        }
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let p = self.prec.max(rhs.prec);
                let v = self.v.$m(&rhs.v, p, RM);
                self.wrap(v, rhs)
            }
        }
    };
}

big_binop!(Add, add);
big_binop!(Sub, sub);
big_binop!(Mul, mul);
big_binop!(Div, div);

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        let v = self.v.rem(&rhs.v);
        self.wrap(v, &rhs)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { v: self.v.neg(), prec: self.prec }
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal { v: BigFloat::from_word(0, MIN_BITS), prec: MIN_BITS }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal { v: BigFloat::from_word(1, MIN_BITS), prec: MIN_BITS }
    }
}

/// Error from parsing a [`BigReal`] literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBigRealError;

impl fmt::Display for ParseBigRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid real literal")
    }
}

impl std::error::Error for ParseBigRealError {}

impl Num for BigReal {
    type FromStrRadixErr = ParseBigRealError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let rdx = match radix {
            2 => Radix::Bin,
            8 => Radix::Oct,
            10 => Radix::Dec,
            16 => Radix::Hex,
            _ => return Err(ParseBigRealError),
        };
        let prec = 256;
        let v = with_consts(|cc| BigFloat::parse(s, rdx, prec, RM, cc));
        if v.is_nan() {
            Err(ParseBigRealError)
        } else {
            Ok(BigReal { v, prec })
        }
    }
}

impl Real for BigReal {
    fn mantissa_bits(&self) -> Precision {
        self.prec
    }

    fn from_rational(q: &BigRational, prec: Precision) -> Self {
        let prec = prec.max(MIN_BITS);
        let n = BigReal::from_bigint(q.numer(), prec);
        let d = BigReal::from_bigint(q.denom(), prec);
        BigReal { v: n.div(&d, prec, RM), prec }
    }

    fn from_int(n: i64, prec: Precision) -> Self {
        let prec = prec.max(MIN_BITS);
        BigReal { v: BigFloat::from_i64(n, prec), prec }
    }

    fn from_float(x: f64, prec: Precision) -> Self {
        let prec = prec.max(MIN_BITS);
        BigReal { v: BigFloat::from_f64(x, prec), prec }
    }

    fn pi(prec: Precision) -> Self {
        let prec = prec.max(MIN_BITS);
        BigReal { v: with_consts(|cc| cc.pi(prec, RM)), prec }
    }

    fn ln(&self) -> Self {
        let v = with_consts(|cc| self.v.ln(self.prec, RM, cc));
        BigReal { v, prec: self.prec }
    }

    fn exp(&self) -> Self {
        let v = with_consts(|cc| self.v.exp(self.prec, RM, cc));
        BigReal { v, prec: self.prec }
    }

    fn sqrt(&self) -> Self {
        BigReal { v: self.v.sqrt(self.prec, RM), prec: self.prec }
    }

    fn sin(&self) -> Self {
        let v = with_consts(|cc| self.v.sin(self.prec, RM, cc));
        BigReal { v, prec: self.prec }
    }

    fn cos(&self) -> Self {
        let v = with_consts(|cc| self.v.cos(self.prec, RM, cc));
        BigReal { v, prec: self.prec }
    }

    fn abs(&self) -> Self {
        BigReal { v: self.v.abs(), prec: self.prec }
    }

    fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> BigRational {
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            return BigRational::zero();
        };
        if self.v.is_zero() {
            return BigRational::zero();
        }
        // value = 0.m * 2^e with m stored little-endian
        let m = BigInt::from(BigUint::new(words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect()));
        let shift = e as i64 - 64 * words.len() as i64;
        let mut q = if shift >= 0 {
            BigRational::from_integer(m << shift as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-shift) as usize)
        };
        if sign == Sign::Neg {
            q = -q;
        }
        q
    }

    fn to_decimal(&self) -> String {
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

/// Rational enclosure of pi used by rigorous bounds.
pub fn pi_lower() -> BigRational {
    BigRational::new(BigInt::from(31_415_926_535u64), BigInt::from(10_000_000_000u64))
}

/// Rational enclosure of pi used by rigorous bounds.
pub fn pi_upper() -> BigRational {
    BigRational::new(BigInt::from(31_415_926_536u64), BigInt::from(10_000_000_000u64))
}

/// Running Neumaier compensated sum.
#[derive(Clone, Debug)]
pub struct Neumaier<S> {
    sum: S,
    comp: S,
}

impl<S: Real> Neumaier<S> {
    pub fn new() -> Self {
        Neumaier { sum: S::zero(), comp: S::zero() }
    }

    pub fn add(&mut self, x: S) {
        let t = self.sum.clone() + x.clone();
        let c = if self.sum.abs() >= x.abs() {
            (self.sum.clone() - t.clone()) + x
        } else {
            (x - t.clone()) + self.sum.clone()
        };
        self.comp = self.comp.clone() + c;
        self.sum = t;
    }

    pub fn total(&self) -> S {
        self.sum.clone() + self.comp.clone()
    }
}

impl<S: Real> Default for Neumaier<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Neumaier compensated summation.
pub fn compensated_sum<S: Real>(terms: impl IntoIterator<Item = S>) -> S {
    let mut acc = Neumaier::new();
    for x in terms {
        acc.add(x);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn raw_parts_round_trip() {
        for (n, d) in [(3, 4), (3, 1), (-5, 2), (1, 1 << 40), (123456789, 1)] {
            let x = BigReal::from_rational(&q(n, d), 128);
            assert_eq!(x.to_rational(), q(n, d));
        }
    }

    #[test]
    fn one_third_is_close() {
        let x = BigReal::from_rational(&q(1, 3), 256);
        let err = (x.to_rational() - q(1, 3)).abs();
        assert!(err < BigRational::new(1.into(), BigInt::one() << 250));
    }

    #[test]
    fn pi_enclosure() {
        let p = BigReal::pi(256).to_rational();
        assert!(pi_lower() < p && p < pi_upper());
    }

    #[test]
    fn big_transcendentals_match_f64() {
        let x = BigReal::from_float(0.7, 128);
        assert!((x.ln().to_f64() - 0.7f64.ln()).abs() < 1e-15);
        assert!((x.exp().to_f64() - 0.7f64.exp()).abs() < 1e-15);
        assert!((x.sin().to_f64() - 0.7f64.sin()).abs() < 1e-15);
        assert!((x.sqrt().to_f64() - 0.7f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn precision_propagates() {
        let a = BigReal::from_int(1, 512);
        let b = BigReal::one();
        assert_eq!((a / (b + BigReal::from_int(2, 64))).precision(), 512);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let s = compensated_sum([1.0f64, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }
}
