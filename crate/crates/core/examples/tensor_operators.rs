//! Sparse operators on tensor powers of V: slot embeddings, chains,
//! partial traces and exact inverses.
//!
//! ```bash
//! cargo run -p qma --example tensor_operators
//! ```

use qma::qfield::QRat;
use qma::rmatrix::standard_r;
use qma::tensor::{chain, embed, SparseOp};

fn main() -> qma::error::Result<()> {
    let r = standard_r(2);
    println!("R on V (x) V:\n{r:?}");

    let r1 = embed(&r, 1, 3)?;
    let r2 = embed(&r, 2, 3)?;
    let lhs = r1.compose(&r2)?.compose(&r1)?;
    let rhs = r2.compose(&r1)?.compose(&r2)?;
    println!("braid relation on V^3 holds: {}", lhs == rhs);

    let c = chain(&r, 1, 2, 3)?;
    println!("R_1 R_2 has {} nonzero entries", c.nnz());

    let inv = r.inverse()?;
    println!("R R^-1 = I: {}", r.compose(&inv)? == SparseOp::identity(2, 2));

    let p = SparseOp::<QRat>::permutation(2);
    let traced = p.partial_trace(None, &[2])?;
    println!("Tr_2 P = I: {}", traced == SparseOp::identity(2, 1));
    println!("rank of R - q I: {}", r.sub(&SparseOp::scalar_identity(2, 2, QRat::q()))?.rank_exact());
    Ok(())
}
