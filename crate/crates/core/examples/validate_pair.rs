//! Preflight validation of an R-matrix pair: braid relations, compatibility,
//! Hecke condition, closedness with the matrix D, twist properties and height.
//!
//! ```bash
//! cargo run -p qma --example validate_pair
//! ```

use qma::qfield::QRat;
use qma::rmatrix::{builtin, Family, RMatrixPair};
use qma::tensor::SparseOp;

fn main() {
    for family in [Family::RttStandard, Family::ReStandard, Family::InverseTwistStandard] {
        let pair = builtin(family, 2).expect("built-in family");
        let v = pair.validate(4).expect("built-ins validate");
        println!("{family}: height {}", v.height());
        for c in &v.report().checks {
            println!("  {:<26} {}", c.name, if c.passed { "ok" } else { "FAILED" });
        }
        println!("  D = {:?}", v.d());
    }

    // the identity is a braid solution but not a closed F
    let bad = RMatrixPair::new(qma::rmatrix::standard_r(2), SparseOp::identity(2, 2), QRat::q());
    match bad.validate(4) {
        Ok(_) => println!("unexpectedly valid"),
        Err(fail) => {
            let last = fail.report.checks.last().expect("some check ran");
            println!("F = I rejected at {}: {}", last.name, fail.error);
        }
    }
}
