//! Scalar abstraction for the generic matrix and determinant code.
//!
//! Exact p-adic scalars carry context (the prime, a cyclotomic level, a
//! precision) that a context-free `zero()`/`one()` cannot supply, so the
//! neutral elements are derived from an existing value via `zero_like`.
//! Zero-ness comes in two provable strengths and an indeterminate middle:
//! `is_exactly_zero` (constructed zero) and `is_provably_nonzero` (some known
//! digit is set); values that are zero at the working precision are neither.

use crate::error::ArithError;

pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn is_exactly_zero(&self) -> bool;
    fn is_provably_nonzero(&self) -> bool;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
}

/// Division that is exact whenever the divisor is provably nonzero; used by
/// fraction-free elimination, where quotients are known to lie in the ring.
pub trait ExactDiv: Ring {
    fn exact_div(&self, rhs: &Self) -> Result<Self, ArithError>;
}

impl Ring for crate::padic::PadicNumber {
    fn zero_like(&self) -> Self {
        crate::padic::PadicNumber::exact_zero(self.prime())
    }
    fn is_exactly_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn is_provably_nonzero(&self) -> bool {
        self.is_provably_nonzero()
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add_ref(rhs)
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub_ref(rhs)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul_ref(rhs)
    }
    fn ring_neg(&self) -> Self {
        self.neg_ref()
    }
}

impl ExactDiv for crate::padic::PadicNumber {
    fn exact_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.div_ref(rhs)
    }
}
