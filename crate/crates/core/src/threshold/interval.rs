use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// The half-open interval `(lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenClosed<T: Clone + Integer> {
    pub lo: Ratio<T>,
    pub hi: Ratio<T>,
}

impl<T: Clone + Integer> OpenClosed<T> {
    pub fn new(lo: Ratio<T>, hi: Ratio<T>) -> Self {
        OpenClosed { lo, hi }
    }

    /// `((mu - 1)/q, mu/q]`.
    pub fn from_mu(mu: T, q: T) -> Self {
        let lo = Ratio::new(mu.clone() - T::one(), q.clone());
        OpenClosed {
            lo,
            hi: Ratio::new(mu, q),
        }
    }

    pub fn contains(&self, x: &Ratio<T>) -> bool {
        &self.lo < x && x <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn width(&self) -> Ratio<T> {
        if self.is_empty() {
            Ratio::zero()
        } else {
            self.hi.clone() - self.lo.clone()
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        OpenClosed {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }
}

impl<T: Clone + Integer + One + fmt::Display> fmt::Display for OpenClosed<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}
