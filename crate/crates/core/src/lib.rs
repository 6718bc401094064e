//! Exact partition functions of the three-dimensional vertex model built from
//! the q=0 oscillator solution of the tetrahedron equation, with the
//! symmetric-function identities they satisfy.
//!
//! Polynomials are generic over the coefficient ring ([`poly::Coeff`]); the
//! aliases below fix the rings used throughout.

pub mod error;
pub mod fock;
pub mod lattice;
pub mod network;
pub mod poly;
pub mod symfunc;
pub mod verify;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{FockError, LatticeError, NetworkError, PolyError, SymError};
pub use network::{Convention, LayerEngine, PartitionSpec};
pub use poly::{Binding, LaurentPoly, Monomial, Var};

/// Integer Laurent polynomials, the ring every identity lives in.
pub type Poly = LaurentPoly<BigInt>;
/// Rational Laurent polynomials, for specializations that leave the integers.
pub type RatPoly = LaurentPoly<BigRational>;
