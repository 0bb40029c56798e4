use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// An integer or half-odd-integer, stored as twice its value so that
/// angular momenta `j ∈ {0, ½, 1, …}` and projections are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    /// Value `twice / 2`.
    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    #[inline]
    pub const fn integer(k: i32) -> Self {
        HalfInt(2 * k)
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// `2j + 1`, the dimension of the spin-`j` multiplet.
    #[inline]
    pub fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// Spin of an `n`-dimensional local space, `j = (n − 1)/2`.
    pub fn spin_of_dim(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("local dimension must be at least 1");
        }
        Ok(HalfInt(n as i32 - 1))
    }

    /// Checks that `self` is a valid angular momentum magnitude.
    pub fn check_magnitude(self) -> Result<()> {
        if self.0 < 0 {
            return domain(format!("negative angular momentum {self}"));
        }
        Ok(())
    }

    /// Checks that `m` is a valid projection of `self`: `|m| ≤ j` and
    /// `j − m` integral.
    pub fn check_projection(self, m: HalfInt) -> Result<()> {
        self.check_magnitude()?;
        if m.0.abs() > self.0 {
            return domain(format!("projection {m} exceeds magnitude {self}"));
        }
        if (self.0 - m.0) % 2 != 0 {
            return domain(format!("projection {m} has wrong parity for {self}"));
        }
        Ok(())
    }

    /// Projections `+j, j − 1, …, −j` in descending order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let tj = self.0;
        (0..=tj.max(-1)).map(move |k| HalfInt(tj - 2 * k))
    }
}

impl From<i32> for HalfInt {
    fn from(k: i32) -> Self {
        HalfInt::integer(k)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
