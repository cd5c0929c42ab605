pub mod charpoly;
pub mod correlation;
pub mod error;
pub mod higher_block;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod scan;
pub mod sft;
pub mod span;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{IntMatrix, Matrix, PolyMatrix};
pub use poly::{IntPoly, Poly, RatPoly};
pub use roots::{largest_real_root, RootEstimate};
