//! Normalized p-adic valuations with honest indeterminacy.
//!
//! A valuation is reported as `Exact(r)` only when it is fully determined by
//! the known digits of the value in question. When every known digit
//! vanishes, all we can assert is a lower bound, reported as `AtLeast(r)`.
//! The exact zero has valuation `Infinite`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Exact rational number used for valuations (`ord_p(p) = 1` normalization).
pub type Rat = Ratio<i64>;

/// Outcome of a valuation computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// The valuation is exactly determined.
    Exact(Rat),
    /// All known digits vanish; the valuation is at least this bound.
    AtLeast(Rat),
    /// The value is exactly zero.
    Infinite,
}

impl Valuation {
    pub fn exact_int(v: i64) -> Self {
        Valuation::Exact(Rat::from_integer(v))
    }

    pub fn at_least_int(v: i64) -> Self {
        Valuation::AtLeast(Rat::from_integer(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// The exactly determined value, if there is one.
    pub fn exact(&self) -> Option<Rat> {
        match self {
            Valuation::Exact(r) => Some(*r),
            _ => None,
        }
    }

    /// A lower bound valid in every case.
    pub fn lower_bound(&self) -> Option<Rat> {
        match self {
            Valuation::Exact(r) | Valuation::AtLeast(r) => Some(*r),
            Valuation::Infinite => None,
        }
    }

    /// Sum of valuations, as for a product of values.
    pub fn add(&self, other: &Valuation) -> Valuation {
        use Valuation::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(a), AtLeast(b)) | (AtLeast(a), Exact(b)) | (AtLeast(a), AtLeast(b)) => {
                AtLeast(a + b)
            }
        }
    }

    /// `self < other`, provable from the available information.
    pub fn provably_less_than(&self, other: &Valuation) -> bool {
        match (self, other) {
            (Valuation::Exact(a), Valuation::Exact(b)) => a < b,
            (Valuation::Exact(a), Valuation::AtLeast(b)) => a < b,
            (Valuation::Exact(_), Valuation::Infinite) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(r) => write!(f, "{}", r),
            Valuation::AtLeast(r) => write!(f, ">= {}", r),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_valuation(&s).ok_or_else(|| serde::de::Error::custom(format!("bad valuation `{s}`")))
    }
}

fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        Some(Rat::new(num.trim().parse().ok()?, den.trim().parse().ok()?))
    } else {
        Some(Rat::from_integer(s.parse().ok()?))
    }
}

fn parse_valuation(s: &str) -> Option<Valuation> {
    let s = s.trim();
    if s == "+inf" {
        Some(Valuation::Infinite)
    } else if let Some(rest) = s.strip_prefix(">=") {
        Some(Valuation::AtLeast(parse_rat(rest)?))
    } else {
        Some(Valuation::Exact(parse_rat(s)?))
    }
}
