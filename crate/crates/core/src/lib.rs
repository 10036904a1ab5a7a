pub mod error;
pub mod field;
pub mod linalg;
pub mod ncalgebra;
pub mod parse;
pub mod qfield;
pub mod rmatrix;
pub mod symfun;
pub mod tensor;
pub mod verifier;
