pub mod classify;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod linalg;
pub mod moduli;
pub mod module;
pub mod monodromy;
pub mod poly;
pub mod sampling;
pub mod scalar;
pub mod scan;
pub mod verify;
pub mod weil;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{Matrix, SubspaceBasis, LieAlgebraBasis};
pub use poly::Poly;
pub use scalar::{Cyclo, PrimeContext, Scalar, Valuation};
