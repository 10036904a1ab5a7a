//! The Cayley-Hamilton-Newton identities and their corollaries, proved
//! exactly modulo the ideal for one pair.
//!
//! ```bash
//! cargo run -p qma --example chn_identities
//! ```

use qma::ncalgebra::QuantumMatrixAlgebra;
use qma::rmatrix::{builtin, Family};
use qma::symfun::CharKind;
use qma::verifier::{check_cayley_hamilton, check_chn, check_chn_sym, check_commutativity, check_newton, check_wronski};

fn show(name: &str, outcome: qma::verifier::Outcome) {
    match outcome {
        Ok(()) => println!("{name:<24} holds"),
        Err(m) => println!("{name:<24} FAILS: {m}"),
    }
}

fn main() -> qma::error::Result<()> {
    let pair = builtin(Family::ReStandard, 2)?.validate(4).expect("valid pair");
    let alg = QuantumMatrixAlgebra::new(pair)?;
    for k in 1..=2 {
        show(&format!("wedge identity k={k}"), check_chn(&alg, k)?);
        show(&format!("symmetric identity k={k}"), check_chn_sym(&alg, k)?);
    }
    for k in 1..=3 {
        show(&format!("Newton k={k}"), check_newton(&alg, k)?);
        show(&format!("Wronski k={k}"), check_wronski(&alg, k)?);
    }
    show("Cayley-Hamilton", check_cayley_hamilton(&alg)?);
    show(
        "[s1, sigma2]",
        check_commutativity(&alg, (CharKind::PowerSum, 1), (CharKind::Elementary, 2))?,
    );
    Ok(())
}
