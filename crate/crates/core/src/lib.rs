//! Exact q-series machinery, Sturm-sequence certification and high-precision
//! evaluation for the optimal auxiliary function of the 24-dimensional sphere
//! packing linear programming bound.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated Laurent series in `q^{1/2}` over exact rationals.
//! * [`forms`]: Eisenstein series, theta fourth powers and the quasimodular
//!   forms `φ, φ₁, φ₂, ψ_I, ψ_S, ψ_T`.
//! * [`bounds`]: polynomial coefficient-growth bounds and truncation tails.
//! * [`sturm`]: exact rational polynomials and Sturm root counting.
//! * [`certify`]: reduction of the modular-form inequalities to polynomial
//!   sign conditions, and their certification.
//! * [`magic`]: high-precision evaluation of the eigenfunctions `a`, `b`, the
//!   auxiliary function `f`, exact special values and the density bound.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod forms;
pub mod magic;
pub mod real;
pub mod series;
pub mod sturm;

pub use error::{Error, Result};
pub use series::{FormalSeries, HalfExp, Rat};
