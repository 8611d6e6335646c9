//! Exact scalars: rationals and towers of algebraic extensions of Q.

mod rat;
mod tower;

pub use rat::{square_class, ParseRatError, Rat};
pub use tower::{common_tower, sqrt_adjoin, FieldElem, Step, TowerField};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    /// Inversion of a nonzero element that is not a unit: some step polynomial
    /// of the tower was reducible.
    #[error("element is a zero divisor in the tower (a step polynomial is reducible)")]
    ZeroDivisor,
    #[error("zero input")]
    ZeroInput,
    #[error("step polynomial must be monic of degree >= 2")]
    BadMinpoly,
}

/// The operations the exact linear algebra needs from a coefficient type.
///
/// Elements of a tower carry their tower with them, so the additive and
/// multiplicative identities are produced from an existing element.
pub trait Field: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;
}

impl Field for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        Rat::inv(self)
    }
}

impl Field for FieldElem {
    fn zero_like(&self) -> Self {
        self.tower().zero()
    }
    fn one_like(&self) -> Self {
        self.tower().one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        FieldElem::inv(self)
    }
}
