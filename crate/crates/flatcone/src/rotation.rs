//! Exact angle arithmetic for rational multiples of pi.
//!
//! Gluing rotations, cone angles, and holonomy values are all stored as
//! reduced fractions of pi so that the decision procedures stay exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An angle expressed as an exact rational multiple of pi, unnormalized.
///
/// Cone angles (which may exceed 2 pi) and running holonomy sums live here;
/// use [`RotationClass`] for values that are only meaningful mod 2 pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalAngle(Ratio<i64>);

impl RationalAngle {
    pub const fn zero() -> Self {
        RationalAngle(Ratio::new_raw(0, 1))
    }

    pub const fn pi() -> Self {
        RationalAngle(Ratio::new_raw(1, 1))
    }

    pub const fn two_pi() -> Self {
        RationalAngle(Ratio::new_raw(2, 1))
    }

    /// Angle `(num/den) * pi`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        RationalAngle(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        RationalAngle(r)
    }

    /// The fraction of pi.
    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn radians(&self) -> f64 {
        (*self.0.numer() as f64 / *self.0.denom() as f64) * std::f64::consts::PI
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True iff the angle is an integer multiple of pi.
    pub fn is_integer_multiple_of_pi(&self) -> bool {
        *self.0.denom() == 1
    }

    /// Reduce mod 2 pi into `[0, 2 pi)`.
    pub fn mod_two_pi(&self) -> RotationClass {
        RotationClass::new(self.numer(), self.denom())
    }

    pub fn scale(&self, k: i64) -> Self {
        RationalAngle(self.0 * Ratio::from_integer(k))
    }
}

impl Add for RationalAngle {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        RationalAngle(self.0 + rhs.0)
    }
}

impl Sub for RationalAngle {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        RationalAngle(self.0 - rhs.0)
    }
}

impl Neg for RationalAngle {
    type Output = Self;
    fn neg(self) -> Self {
        RationalAngle(-self.0)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}pi", self.0.numer())
        } else {
            write!(f, "{}pi/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// A rotation angle as a reduced fraction of pi, normalized to `[0, 2 pi)`.
///
/// This is the holonomy value type: compositions of gluing rotations are
/// sums of these mod 2 pi, and the `Hol(S) = ±Id` test is membership in
/// `{0, pi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RotationClass(Ratio<i64>);

impl RotationClass {
    pub const fn zero() -> Self {
        RotationClass(Ratio::new_raw(0, 1))
    }

    pub const fn pi() -> Self {
        RotationClass(Ratio::new_raw(1, 1))
    }

    /// Rotation by `(num/den) * pi`, reduced mod 2 pi into `[0, 2 pi)`.
    pub fn new(num: i64, den: i64) -> Self {
        let r = Ratio::new(num, den);
        let two = Ratio::from_integer(2);
        let mut m = r % two;
        if m.is_negative() {
            m += two;
        }
        RotationClass(m)
    }

    pub fn angle(&self) -> RationalAngle {
        RationalAngle(self.0)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn radians(&self) -> f64 {
        (*self.0.numer() as f64 / *self.0.denom() as f64) * std::f64::consts::PI
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_pi(&self) -> bool {
        self.0 == Ratio::from_integer(1)
    }

    /// Membership in the ±Id subgroup of SO(2).
    pub fn is_plus_minus_identity(&self) -> bool {
        self.is_zero() || self.is_pi()
    }

    pub fn compose(&self, other: RotationClass) -> RotationClass {
        RotationClass::new(
            self.numer() * other.denom() + other.numer() * self.denom(),
            self.denom() * other.denom(),
        )
    }

    pub fn inverse(&self) -> RotationClass {
        RotationClass::new(-self.numer(), self.denom())
    }

    /// Cosine/sine pair of the rotation, exact for the common axis cases.
    pub fn cos_sin(&self) -> (f64, f64) {
        match (self.numer(), self.denom()) {
            (0, _) => (1.0, 0.0),
            (1, 1) => (-1.0, 0.0),
            (1, 2) => (0.0, 1.0),
            (3, 2) => (0.0, -1.0),
            _ => {
                let r = self.radians();
                (r.cos(), r.sin())
            }
        }
    }
}

impl fmt::Display for RotationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.angle().fmt(f)
    }
}

// Wire format: a `[num, den]` pair, the rotation as a reduced fraction of pi.
impl Serialize for RotationClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.numer(), self.denom()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RotationClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (num, den) = <(i64, i64)>::deserialize(deserializer)?;
        if den == 0 {
            return Err(D::Error::custom("rotation_pi denominator must be nonzero"));
        }
        Ok(RotationClass::new(num, den))
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.numer(), self.denom()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (num, den) = <(i64, i64)>::deserialize(deserializer)?;
        if den == 0 {
            return Err(D::Error::custom("angle denominator must be nonzero"));
        }
        Ok(RationalAngle::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_lands_in_zero_two_pi() {
        assert_eq!(RotationClass::new(-1, 2), RotationClass::new(3, 2));
        assert_eq!(RotationClass::new(7, 2), RotationClass::new(3, 2));
        assert_eq!(RotationClass::new(4, 1), RotationClass::zero());
        assert_eq!(RotationClass::new(6, 3), RotationClass::zero());
    }

    #[test]
    fn compose_is_exact() {
        let a = RotationClass::new(2, 3);
        let b = RotationClass::new(4, 3);
        assert!(a.compose(b).is_zero());
        assert!(a.compose(a.inverse()).is_zero());
        assert_eq!(
            RotationClass::pi().compose(RotationClass::pi()),
            RotationClass::zero()
        );
    }

    #[test]
    fn pm_identity_membership() {
        assert!(RotationClass::zero().is_plus_minus_identity());
        assert!(RotationClass::pi().is_plus_minus_identity());
        assert!(!RotationClass::new(2, 3).is_plus_minus_identity());
        assert!(!RotationClass::new(1, 2).is_plus_minus_identity());
    }

    #[test]
    fn axis_cos_sin_is_exact() {
        assert_eq!(RotationClass::pi().cos_sin(), (-1.0, 0.0));
        assert_eq!(RotationClass::new(1, 2).cos_sin(), (0.0, 1.0));
        assert_eq!(RotationClass::new(-1, 2).cos_sin(), (0.0, -1.0));
    }
}
