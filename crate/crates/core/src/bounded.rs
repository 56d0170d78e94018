//! Values paired with a guaranteed truncation-error radius.

use std::cmp::Ordering;

/// A real result with a certified bound on the truncation error of the
/// series evaluation that produced it. The radius does not account for
/// f64 representation rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub radius: f64,
}

impl Bounded {
    pub fn exact(value: f64) -> Self {
        Bounded { value, radius: 0.0 }
    }

    pub fn new(value: f64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Bounded { value, radius }
    }

    /// Midpoint/radius form of an interval enclosure.
    pub fn from_interval(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Bounded { value: 0.5 * (lo + hi), radius: 0.5 * (hi - lo) }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.value + self.radius
    }

    pub fn sign(&self) -> SignClass {
        if self.lower() > 0.0 {
            SignClass::Positive
        } else if self.upper() < 0.0 {
            SignClass::Negative
        } else {
            SignClass::Undecided
        }
    }

    /// True when the other enclosure lies entirely above this one.
    pub fn certainly_below(&self, other: &Bounded) -> bool {
        self.upper() < other.lower()
    }
}

/// Sign of a quantity as far as its enclosure certifies it.
/// `Zero` is only produced by exact-rational evaluation paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    Positive,
    Negative,
    Zero,
    Undecided,
}

impl SignClass {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => SignClass::Positive,
            Ordering::Less => SignClass::Negative,
            Ordering::Equal => SignClass::Zero,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            SignClass::Positive => "+",
            SignClass::Negative => "-",
            SignClass::Zero => "0",
            SignClass::Undecided => "?",
        }
    }

    /// Certified `≤ 0` (negative or exactly zero).
    pub fn nonpositive(&self) -> bool {
        matches!(self, SignClass::Negative | SignClass::Zero)
    }
}
