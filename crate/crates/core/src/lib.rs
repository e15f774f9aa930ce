//! Exact p-adic linear algebra for the logarithmic matrices attached to
//! supersingular abelian varieties.
//!
//! The crate builds, from per-prime Frobenius matrices C_v in
//! GL_{2gf_v}(Z_p), the matrices C_{v,n} over the Iwasawa algebra, their
//! products H_{v,n}, the block-diagonal H_n, and the minors selected by
//! index tuples; evaluates everything at finite-order characters inside the
//! cyclotomic extensions Q_p(zeta_{p^n}); and certifies, by exact valuation
//! comparison, the non-vanishing condition that bounds Mordell-Weil ranks
//! along the cyclotomic tower.
//!
//! All arithmetic is exact with honest precision: values are known modulo
//! p^N, a vanishing digit pattern is never promoted to an exact zero, and
//! every reported valuation is either exactly determined or an explicit
//! lower bound.
//!
//! The matrix and polynomial layers are generic over the scalar through the
//! [`ring::Ring`] trait; the concrete scalars are [`padic::PadicNumber`],
//! [`cyclotomic::CycloElement`] and [`iwasawa::IwasawaSeries`], with the
//! matrix aliases below.

pub mod config;
pub mod criterion;
pub mod cyclotomic;
pub mod error;
pub mod iwasawa;
pub mod logmat;
pub mod matrix;
pub mod padic;
pub mod poly;
pub mod report;
pub mod ring;
pub mod sampling;
pub mod valuation;

pub use cyclotomic::CycloElement;
pub use error::{ArithError, ConfigError};
pub use iwasawa::IwasawaSeries;
pub use padic::PadicNumber;
pub use valuation::{Rat, Valuation};

/// Matrix over Q_p scalars.
pub type PadicMatrix = matrix::Matrix<PadicNumber>;
/// Matrix over the Iwasawa algebra (series entries, symbolic form).
pub type SeriesMatrix = matrix::Matrix<IwasawaSeries>;
/// Matrix over a cyclotomic extension (evaluated form).
pub type CycloMatrix = matrix::Matrix<CycloElement>;
