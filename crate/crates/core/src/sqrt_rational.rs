use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::surd::Surd;

/// Signed square root of a rational number, `s·√r`.
///
/// This is the natural codomain of Wigner 3-j and 6-j symbols under the
/// Condon–Shortley convention. The radicand is kept in lowest terms (by
/// `BigRational`) and `sign == 0` exactly when the radicand is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: i8,
    radicand: BigRational,
}

impl Default for SignedSqrtRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl SignedSqrtRational {
    pub fn zero() -> Self {
        SignedSqrtRational {
            sign: 0,
            radicand: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SignedSqrtRational {
            sign: 1,
            radicand: BigRational::one(),
        }
    }

    pub fn new(sign: i8, radicand: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return domain("radicand must be non-negative");
        }
        if !(-1..=1).contains(&sign) {
            return domain("sign must be -1, 0 or +1");
        }
        if (sign == 0) != radicand.is_zero() {
            return domain("sign must be zero exactly when the radicand is zero");
        }
        Ok(SignedSqrtRational { sign, radicand })
    }

    /// `sign · √radicand`, with the sign forced to zero for a zero radicand.
    pub(crate) fn from_parts(sign: i8, radicand: BigRational) -> Self {
        if radicand.is_zero() || sign == 0 {
            SignedSqrtRational::zero()
        } else {
            SignedSqrtRational {
                sign: sign.signum(),
                radicand,
            }
        }
    }

    /// The exact value `q` (stored as `sign(q)·√(q²)`).
    pub fn from_rational(q: &BigRational) -> Self {
        let sign = if q.is_positive() {
            1
        } else if q.is_negative() {
            -1
        } else {
            0
        };
        SignedSqrtRational::from_parts(sign, q * q)
    }

    pub fn from_integer(n: i64) -> Self {
        SignedSqrtRational::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Principal root `+√q`.
    pub fn sqrt(q: BigRational) -> Result<Self> {
        if q.is_negative() {
            return domain("square root of a negative rational");
        }
        Ok(SignedSqrtRational::from_parts(1, q))
    }

    /// Value `signed_square.signum() · √|signed_square|`.
    pub fn from_signed_square(signed_square: BigRational) -> Self {
        let sign = if signed_square.is_positive() {
            1
        } else if signed_square.is_negative() {
            -1
        } else {
            0
        };
        SignedSqrtRational::from_parts(sign, signed_square.abs())
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The square of the value, which is always rational.
    pub fn square(&self) -> BigRational {
        self.radicand.clone()
    }

    /// `sign · radicand`.
    pub fn signed_square(&self) -> BigRational {
        match self.sign {
            0 => BigRational::zero(),
            1 => self.radicand.clone(),
            _ => -self.radicand.clone(),
        }
    }

    /// The value as an element of the multi-quadratic field.
    pub fn to_surd(&self) -> Surd {
        let root = Surd::sqrt_of(&self.radicand);
        if self.sign < 0 {
            -root
        } else {
            root
        }
    }

    /// Converts a surd that is a single term `c·√d` back; `None` for a
    /// genuine sum of radicals.
    pub fn from_surd(x: &Surd) -> Option<Self> {
        let (c, d) = x.as_single_term()?;
        let sq = &c * &c * BigRational::from_integer(BigInt::from(d));
        Some(SignedSqrtRational::from_signed_square(if c.is_negative() {
            -sq
        } else {
            sq
        }))
    }

    /// Correctly rounded conversion: the result is `sign · round(√radicand)`
    /// with round-to-nearest-even.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let mag = sqrt_rational_rounded(self.radicand.numer().magnitude(), self.radicand.denom().magnitude());
        if self.sign < 0 {
            -mag
        } else {
            mag
        }
    }
}

fn bits(x: &BigUint) -> i64 {
    x.bits() as i64
}

fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `round(√(p/q))` for positive `p`, `q`.
fn sqrt_rational_rounded(p: &BigUint, q: &BigUint) -> f64 {
    // Scale by 4^e so that x = p·4^e/q has ~132 bits, giving a ~66-bit root.
    let e = (132 - (bits(p) - bits(q)) + 1).div_euclid(2);
    let (num, den) = if e >= 0 {
        (p << (2 * e as usize), q.clone())
    } else {
        (p.clone(), q << (2 * (-e) as usize))
    };
    let (x, rem) = num.div_rem(&den);
    let s = x.sqrt();
    let sticky = !rem.is_zero() || &s * &s != x;

    let b = bits(&s);
    let shift = b - 53;
    debug_assert!(shift > 1);
    let one = BigUint::one();
    let mut mant = &s >> (shift as usize);
    let low = &s & ((&one << (shift as usize)) - &one);
    let half = &one << ((shift - 1) as usize);
    let round_up = match low.cmp(&half) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => sticky || mant.is_odd(),
    };
    if round_up {
        mant += &one;
    }
    let m: u64 = mant.try_into().expect("53-bit mantissa");
    let mut exp = shift - e;
    let mut value = m as f64;
    // Apply the binary exponent in steps that stay inside the normal range.
    while exp > 1000 {
        value *= pow2(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        value *= pow2(-1000);
        exp += 1000;
    }
    value * pow2(exp)
}

impl Neg for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> Self {
        SignedSqrtRational {
            sign: -self.sign,
            radicand: self.radicand,
        }
    }
}

impl Neg for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        -self.clone()
    }
}

impl Mul for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: &SignedSqrtRational) -> SignedSqrtRational {
        SignedSqrtRational::from_parts(self.sign * rhs.sign, &self.radicand * &rhs.radicand)
    }
}

impl Mul for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: SignedSqrtRational) -> SignedSqrtRational {
        &self * &rhs
    }
}

impl Div for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn div(self, rhs: &SignedSqrtRational) -> SignedSqrtRational {
        assert!(!rhs.is_zero(), "division by zero");
        SignedSqrtRational::from_parts(self.sign * rhs.sign, &self.radicand / &rhs.radicand)
    }
}

impl fmt::Display for SignedSqrtRational {
    /// `a*sqrt(b)` with the square part of the radicand pulled out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surd())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    sign: i8,
    num: String,
    den: String,
}

impl Serialize for SignedSqrtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            sign: self.sign,
            num: self.radicand.numer().to_string(),
            den: self.radicand.denom().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedSqrtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let num: BigUint = w.num.parse().map_err(D::Error::custom)?;
        let den: BigUint = w.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        let r = BigRational::new(
            BigInt::from_biguint(Sign::Plus, num),
            BigInt::from_biguint(Sign::Plus, den),
        );
        SignedSqrtRational::new(w.sign, r).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn invariants_enforced() {
        assert!(SignedSqrtRational::new(1, q(0, 1)).is_err());
        assert!(SignedSqrtRational::new(0, q(1, 2)).is_err());
        assert!(SignedSqrtRational::new(1, q(-1, 2)).is_err());
        assert!(SignedSqrtRational::new(-1, q(2, 4)).is_ok());
        assert_eq!(SignedSqrtRational::new(-1, q(2, 4)).unwrap().radicand(), &q(1, 2));
    }

    #[test]
    fn float_conversion_matches_libm_on_simple_cases() {
        for n in 1..200i64 {
            for d in 1..12i64 {
                let x = SignedSqrtRational::sqrt(q(n, d)).unwrap().to_f64();
                // For these sizes (n/d) is exact-ish; check against sqrt of the
                // correctly rounded quotient within one ulp.
                let approx = (n as f64 / d as f64).sqrt();
                assert!((x - approx).abs() <= approx * 2.3e-16, "{n}/{d}: {x} vs {approx}");
            }
        }
        assert_eq!(SignedSqrtRational::sqrt(q(4, 9)).unwrap().to_f64(), 2.0 / 3.0);
        assert_eq!(SignedSqrtRational::from_integer(-3).to_f64(), -3.0);
        assert_eq!(
            SignedSqrtRational::sqrt(q(2, 1)).unwrap().to_f64(),
            std::f64::consts::SQRT_2
        );
        assert_eq!(
            SignedSqrtRational::sqrt(q(1, 2)).unwrap().to_f64(),
            std::f64::consts::FRAC_1_SQRT_2
        );
    }

    #[test]
    fn json_shape() {
        let x = SignedSqrtRational::from_signed_square(q(-3, 4));
        let j = serde_json::to_value(&x).unwrap();
        assert_eq!(j, serde_json::json!({"sign": -1, "num": "3", "den": "4"}));
        let back: SignedSqrtRational = serde_json::from_value(j).unwrap();
        assert_eq!(back, x);
        assert!(
            serde_json::from_value::<SignedSqrtRational>(serde_json::json!({"sign": 0, "num": "3", "den": "4"}))
                .is_err()
        );
    }

    #[test]
    fn display_pulls_out_squares() {
        let x = SignedSqrtRational::from_signed_square(q(-3, 4));
        assert_eq!(x.to_string(), "-1/2*sqrt(3)");
        assert_eq!(SignedSqrtRational::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn squaring_float_reproduces_radicand(n in 1u64..1_000_000, d in 1u64..1_000_000, neg in any::<bool>()) {
            let r = BigRational::new(BigInt::from(n), BigInt::from(d));
            let x = SignedSqrtRational::from_parts(if neg { -1 } else { 1 }, r.clone());
            let f = x.to_f64();
            let want = n as f64 / d as f64;
            prop_assert!(((f * f) - want).abs() <= want * 1e-15);
            prop_assert_eq!(f < 0.0, neg);
            prop_assert_eq!(SignedSqrtRational::from_surd(&x.to_surd()), Some(x));
        }
    }
}
