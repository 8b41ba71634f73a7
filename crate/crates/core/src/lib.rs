//! Exact verification of q-Pochhammer duality identities and of the level
//! correspondence between equivariant K-theoretic I-functions of the
//! Grassmannians `Gr(r, n)` and `Gr(n - r, n)`.
//!
//! Identities are rational-function identities, so they are checked by
//! exact evaluation at random generic points over the rationals or a large
//! prime field. An independent residue/quadrature path cross-checks the
//! sums from the integral side.

pub mod compositions;
pub mod duality;
pub mod error;
pub mod exec;
pub mod field;
pub mod grassmann;
pub mod qseries;
pub mod report;
pub mod residue;
pub mod runner;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, Fp, ParameterPoint, Rational};
