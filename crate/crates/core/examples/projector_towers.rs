//! The q-antisymmetrizer and q-symmetrizer towers built from a Hecke
//! R-matrix, and how the antisymmetrizers detect the height.
//!
//! ```bash
//! cargo run -p qma --example projector_towers
//! ```

use qma::qfield::QRat;
use qma::rmatrix::{antisymmetrizers, height, reflected_antisymmetrizers, standard_r, symmetrizers};
use qma::tensor::SparseOp;

fn main() -> qma::error::Result<()> {
    let r = standard_r(2);
    let q = QRat::q();
    let a = antisymmetrizers(&r, &q, 3)?;
    let s = symmetrizers(&r, &q, 3)?;
    for k in 1..=3 {
        let ak = a.level(k).expect("level built");
        let sk = s.level(k).expect("level built");
        println!(
            "k={k}: rank A = {}, rank S = {}, A idempotent {}, S idempotent {}",
            ak.rank_exact(),
            sk.rank_exact(),
            ak.compose(ak)? == *ak,
            sk.compose(sk)? == *sk
        );
    }
    let sum = a.level(2).expect("A2").add(s.level(2).expect("S2"))?;
    println!("A^(2) + S^(2) = I: {}", sum == SparseOp::identity(2, 2));

    let reflected = reflected_antisymmetrizers(&r, 3)?;
    println!("reflected A tower equals S tower: {}", reflected.levels() == s.levels());

    let (n, _) = height(&standard_r(3), &q, 5)?;
    println!("height of the N=3 standard R-matrix: {n}");
    Ok(())
}
