//! Picard-lattice arithmetic on Hirzebruch surfaces.
//!
//! The Picard group of the Hirzebruch surface `F_n` is free of rank two,
//! generated by the class `C` of the negative section (`C^2 = -n`) and the
//! class `F` of a ruling fiber, with `C.F = 1` and `F^2 = 0`.  On `F_0`
//! (the quadric) the two generators are the fibers of the two rulings and
//! play symmetric roles.  A class is written `aC + bF`.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar used throughout the defect computations.
pub type Rational = Ratio<i64>;

/// Errors produced by Picard-lattice operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    /// Two classes living on different Hirzebruch surfaces were combined.
    #[error("ambient mismatch: class on F_{left} paired with class on F_{right}")]
    AmbientMismatch { left: u32, right: u32 },
}

/// An integral divisor class `aC + bF` on the Hirzebruch surface `F_n`.
///
/// Coefficients are `i64`: every coefficient occurring in the classification
/// is bounded by 42 and every intersection number by a few thousand, so
/// fixed-width arithmetic is exact here.  Computations that can genuinely
/// grow (determinants, Smith normal forms) use big integers instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    /// Index of the ambient surface `F_n`.
    pub n: u32,
    /// Coefficient of the section class `C`.
    pub a: i64,
    /// Coefficient of the fiber class `F`.
    pub b: i64,
}

impl DivisorClass {
    /// The class `aC + bF` on `F_n`.
    pub fn new(n: u32, a: i64, b: i64) -> Self {
        Self { n, a, b }
    }

    /// The section class `C` on `F_n` (the fiber of the first ruling on `F_0`).
    pub fn section(n: u32) -> Self {
        Self::new(n, 1, 0)
    }

    /// The fiber class `F` on `F_n` (the fiber of the second ruling on `F_0`).
    pub fn fiber(n: u32) -> Self {
        Self::new(n, 0, 1)
    }

    /// Intersection number of two classes on the same surface:
    /// `(aC+bF).(cC+dF) = ad + bc - nac`.
    pub fn intersection(&self, other: &DivisorClass) -> Result<i64, PicardError> {
        if self.n != other.n {
            return Err(PicardError::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = i64::from(self.n);
        Ok(self.a * other.b + self.b * other.a - n * self.a * other.a)
    }

    /// Self-intersection `2ab - na^2`.
    pub fn self_intersection(&self) -> i64 {
        self.intersection(self).expect("same ambient")
    }

    /// Whether `k` divides the class coefficient-wise; the zero class is
    /// divisible by every `k`.  Requires `k >= 2`.
    pub fn divisible_by(&self, k: i64) -> bool {
        debug_assert!(k >= 2, "divisibility is only asked for k >= 2");
        self.a.rem_euclid(k) == 0 && self.b.rem_euclid(k) == 0
    }

    /// Whether the class can be the class of an irreducible curve: the two
    /// ruling classes always qualify; otherwise `a >= 1` and `b >= n*a`
    /// (`b >= 1` on `F_0`).
    pub fn is_irreducible_class(&self) -> bool {
        if (self.a, self.b) == (1, 0) || (self.a, self.b) == (0, 1) {
            return true;
        }
        let floor = if self.n == 0 {
            1
        } else {
            i64::from(self.n) * self.a
        };
        self.a >= 1 && self.b >= floor
    }

    /// Promote to a rational class.
    pub fn to_rational(self) -> RationalDivisorClass {
        RationalDivisorClass {
            n: self.n,
            a: Rational::from_integer(self.a),
            b: Rational::from_integer(self.b),
        }
    }
}

/// The canonical class `K = -2C - (n+2)F` of `F_n`.
pub fn canonical_class(n: u32) -> DivisorClass {
    DivisorClass::new(n, -2, -(i64::from(n) + 2))
}

/// A divisor class with exact rational coefficients, used for the canonical
/// defect `K + sum_i (1 - 1/b_i) B_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalDivisorClass {
    /// Index of the ambient surface `F_n`.
    pub n: u32,
    /// Coefficient of `C`.
    pub a: Rational,
    /// Coefficient of `F`.
    pub b: Rational,
}

impl RationalDivisorClass {
    /// The zero class on `F_n`.
    pub fn zero(n: u32) -> Self {
        Self {
            n,
            a: Rational::from_integer(0),
            b: Rational::from_integer(0),
        }
    }

    /// `self + w * cls`, failing on an ambient mismatch.
    pub fn add_scaled(
        &self,
        w: Rational,
        cls: &DivisorClass,
    ) -> Result<RationalDivisorClass, PicardError> {
        if self.n != cls.n {
            return Err(PicardError::AmbientMismatch {
                left: self.n,
                right: cls.n,
            });
        }
        Ok(Self {
            n: self.n,
            a: self.a + w * Rational::from_integer(cls.a),
            b: self.b + w * Rational::from_integer(cls.b),
        })
    }

    /// Whether both coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.a == Rational::from_integer(0) && self.b == Rational::from_integer(0)
    }
}
