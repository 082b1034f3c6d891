//! Extended naturals ℕ∞ = ℕ ∪ {∞}, the coefficient semiring of formal
//! power series. Arithmetic follows the extended table:
//! `0·∞ = ∞·0 = 0`, `0* = 1`, and for n ≠ 0: `n + ∞ = ∞`, `n·∞ = ∞`,
//! `n* = ∞`. The order is total with ∞ on top.

use std::fmt;
use std::ops::{Add, Mul};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u128),
    Inf,
}

pub use ExtNat::{Fin, Inf};

impl ExtNat {
    pub const ZERO: ExtNat = Fin(0);
    pub const ONE: ExtNat = Fin(1);

    pub fn is_zero(self) -> bool {
        self == Fin(0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    /// Kleene star in ℕ∞: `0* = 1`, `n* = ∞` for n ≠ 0.
    pub fn star(self) -> ExtNat {
        if self.is_zero() {
            Fin(1)
        } else {
            Inf
        }
    }

    /// Countable summation: ∞ as soon as one summand is ∞ or infinitely
    /// many are nonzero; otherwise the finite sum.
    pub fn countable_sum(
        terms: impl IntoIterator<Item = ExtNat>,
        infinitely_many_nonzero: bool,
    ) -> ExtNat {
        if infinitely_many_nonzero {
            return Inf;
        }
        terms.into_iter().fold(Fin(0), |acc, t| acc + t)
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a.checked_add(b).expect("ExtNat overflow")),
            _ => Inf,
        }
    }
}

impl Mul for ExtNat {
    type Output = ExtNat;
    fn mul(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (Fin(0), _) | (_, Fin(0)) => Fin(0),
            (Fin(a), Fin(b)) => Fin(a.checked_mul(b).expect("ExtNat overflow")),
            _ => Inf,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (Fin(_), Inf) => std::cmp::Ordering::Less,
            (Inf, Fin(_)) => std::cmp::Ordering::Greater,
            (Inf, Inf) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Inf => write!(f, "INF"),
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        Fin(n as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_table() {
        assert_eq!(Fin(0).star(), Fin(1));
        assert_eq!(Fin(0) * Inf, Fin(0));
        assert_eq!(Inf * Fin(0), Fin(0));
        assert_eq!(Fin(2).star(), Inf);
        assert_eq!(Inf.star(), Inf);
        assert_eq!(Fin(3) + Inf, Inf);
        assert_eq!(Fin(3) * Inf, Inf);
        assert_eq!(Fin(2) + Fin(5), Fin(7));
        assert_eq!(Fin(2) * Fin(5), Fin(10));
    }

    #[test]
    fn order_has_inf_on_top() {
        assert!(Fin(u128::MAX) < Inf);
        assert!(Fin(0) < Fin(1));
        assert_eq!(Inf.max(Fin(7)), Inf);
    }

    #[test]
    fn countable_sum_rules() {
        assert_eq!(ExtNat::countable_sum([Fin(1), Fin(2)], false), Fin(3));
        assert_eq!(ExtNat::countable_sum([Fin(1), Inf], false), Inf);
        assert_eq!(ExtNat::countable_sum([], true), Inf);
    }
}
