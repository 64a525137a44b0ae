//! Exact construction and certification of bi-Poisson Gaudin pencils.
//!
//! The crate builds the pencil `t1 eta1 + t2 eta2` on products of duals of
//! Lie algebras (and the canonical `sl2` model on `R^{2N}`), generates the
//! involutive families obtained from Casimirs pulled back along the pencil of
//! moment maps and from argument translation, and certifies their properties
//! with exact rational arithmetic. A floating-point RK4 integrator provides a
//! dynamical cross-check of conservation.

pub mod error;
pub mod flow;
pub mod gaudin;
pub mod golden;
pub mod liealg;
pub mod linalg;
pub mod poisson;
pub mod polyring;
pub mod rat;
pub mod verify;

pub use error::{Error, Result};
pub use liealg::LieAlgebra;
pub use poisson::{Bivector, Pencil, PencilDirection};
pub use polyring::{ParamPoly, PoleComposition, Poly};
pub use rat::Q;
