//! The quadratic algebra of a validated pair: the matrices M_k, the defining
//! relations, ideal components and exact membership, and the trace-shift
//! identities checked in the free algebra.
//!
//! ```bash
//! cargo run -p qma --example algebra_relations
//! ```

use qma::ncalgebra::{membership, NCPoly, QuantumMatrixAlgebra};
use qma::qfield::QRat;
use qma::rmatrix::{builtin, Family};

fn main() -> qma::error::Result<()> {
    let pair = builtin(Family::ReStandard, 2)?.validate(4).expect("valid pair");
    let alg = QuantumMatrixAlgebra::new(pair)?;

    println!("M_2 =\n{:?}", alg.mbar(2)?);
    println!("{} nonzero relation entries, for example", alg.relations().len());
    for rel in alg.relations().iter().take(3) {
        println!("  {:?} {:?}: {}", rel.row, rel.col, rel.poly);
    }
    for d in 2..=4 {
        let c = alg.ideal().component(d);
        println!("degree {d}: ideal dimension {} of {}", c.dimension(), c.ambient_dimension());
    }

    let basis = alg.ideal().component(2);
    let m = |i, j| NCPoly::<QRat>::generator(i, j);
    let (member, residual) = membership(&m(0, 1).mul(&m(1, 0)), &basis);
    println!("M[0,1]*M[1,0] in ideal: {member}, normal form {residual}");

    println!("free-algebra shift identities: {:?}", alg.check_lemma_a(3)?.is_ok());
    println!("relations in every slot: {:?}", alg.check_lemma_c(2)?.is_ok());
    Ok(())
}
