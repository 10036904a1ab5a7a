//! At q = 1 with R = F = P the algebra is commutative and the identities
//! collapse to the classical ones: sigma_2 is the determinant and the
//! Cayley-Hamilton sum is M^2 - tr(M) M + det(M).
//!
//! ```bash
//! cargo run -p qma --example classical_limit
//! ```

use qma::field::parse_rational;
use qma::ncalgebra::{abelianize, QuantumMatrixAlgebra};
use qma::rmatrix::{builtin, Family};
use qma::verifier::cayley_hamilton_sum;

fn main() -> qma::error::Result<()> {
    let one = parse_rational("1").expect("rational");
    let pair = builtin(Family::RttClassical, 2)?.at(&one)?.validate(4).expect("valid at q = 1");
    let alg = QuantumMatrixAlgebra::new(pair)?;

    println!("sigma_2 = {}", alg.elementary(2)?.value);
    print!("commutative image:");
    for (word, c) in abelianize(&alg.elementary(2)?.value) {
        let letters: Vec<String> = word.iter().map(ToString::to_string).collect();
        print!(" ({c})*{}", letters.join("*"));
    }
    println!();

    let ch = cayley_hamilton_sum(&alg)?;
    for (r, c, p) in ch.entries() {
        println!("CH entry ({r},{c}) reduces to {}", alg.ideal().reduce(p));
    }
    println!("CH sum is zero modulo commutators: {}", ch.entries().all(|(_, _, p)| alg.ideal().contains(p)));
    Ok(())
}
