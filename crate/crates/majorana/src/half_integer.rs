//! Half-integer angular momentum labels stored as doubled integers.
//!
//! Spin labels take values in {0, 1/2, 1, 3/2, ...} and projections in the
//! same lattice; storing `2j` keeps every selection rule exact. No floating
//! point is involved in half-integer arithmetic.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A half-integer `j` represented exactly by `2j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Builds from the doubled value, so `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn integer_value(self) -> Option<i64> {
        if self.twice % 2 == 0 {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub const fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// Hilbert-space dimension `2j + 1` of a spin-`j` system.
    ///
    /// Panics if `self` is negative or not representable as a dimension.
    pub fn dimension(self) -> usize {
        assert!(self.twice >= 0, "spin must be non-negative");
        self.twice as usize + 1
    }

    /// Same parity check as `2m ≡ 2j (mod 2)`: `m` is a valid projection
    /// lattice point for this spin.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    /// Iterates `m = -j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j2 = self.twice;
        (-j2..=j2).step_by(2).map(HalfInt::from_twice)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Accepts `"3"`, `"-2"`, `"5/2"`, `"-1/2"`.
impl FromStr for HalfInt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| format!("invalid half-integer: {s:?}"))?;
            Ok(HalfInt::from_twice(n))
        } else {
            let n: i64 = s
                .parse()
                .map_err(|_| format!("invalid half-integer: {s:?}"))?;
            Ok(HalfInt::from_int(n))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_both_forms() {
        for (text, twice) in [("3", 6), ("-2", -4), ("5/2", 5), ("-1/2", -1), ("0", 0)] {
            let h: HalfInt = text.parse().unwrap();
            assert_eq!(h.twice(), twice);
            assert_eq!(h.to_string(), text);
        }
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = HalfInt::from_twice(5); // 5/2
        let b = HalfInt::from_twice(1); // 1/2
        assert_eq!((a + b).twice(), 6);
        assert_eq!((a - b).twice(), 4);
        assert_eq!((-a).twice(), -5);
        assert!(!a.is_integer());
        assert_eq!((a + b).integer_value(), Some(3));
    }

    #[test]
    fn projections_cover_the_ladder() {
        let s: Vec<i64> = HalfInt::from_twice(3).projections().map(|m| m.twice()).collect();
        assert_eq!(s, vec![-3, -1, 1, 3]);
        assert_eq!(HalfInt::from_int(1).dimension(), 3);
    }

    #[test]
    fn serde_round_trips_as_text() {
        let h = HalfInt::from_twice(-7);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, "\"-7/2\"");
        let back: HalfInt = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }
}
