//! Power sums, elementary and complete symmetric elements of the
//! characteristic subalgebra, and the matching matrix powers.
//!
//! ```bash
//! cargo run -p qma --example symmetric_functions
//! ```

use qma::ncalgebra::QuantumMatrixAlgebra;
use qma::rmatrix::{builtin, Family};

fn main() -> qma::error::Result<()> {
    let pair = builtin(Family::RttStandard, 2)?.validate(4).expect("valid pair");
    let alg = QuantumMatrixAlgebra::new(pair)?;
    for k in 1..=3 {
        println!("{}", alg.power_sum(k)?);
        println!("{}", alg.elementary(k)?);
        println!("{}", alg.complete(k)?);
    }
    let m2 = alg.matrix_power(2)?;
    println!("\nM^2 entry (0,0): {}", m2.entry(0, 0));
    println!("wedge power of degree 3 vanishes: {}", alg.wedge_power(3)?.value.is_zero());
    println!("M^0 = {:?}", alg.zeroth_power()?.value);
    Ok(())
}
