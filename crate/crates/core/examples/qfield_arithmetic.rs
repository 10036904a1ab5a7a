//! Exact arithmetic in Q(q): q-numbers, the reflection q -> -1/q, and
//! specialization at rational points.
//!
//! ```bash
//! cargo run -p qma --example qfield_arithmetic
//! ```

use qma::field::parse_rational;
use qma::parse::parse_coeff;
use qma::qfield::{qnum, QRat};

fn main() {
    for k in 0..5 {
        println!("{k}_q = {}", qnum(k));
    }

    let x = parse_coeff("(q^3 - q^-3)/(q - q^-1)").expect("valid expression");
    println!("\n(q^3 - q^-3)/(q - q^-1) = {x}");
    assert_eq!(x, qnum(3));

    let frac = parse_coeff("1/(q + 1)").expect("valid expression");
    let sum = &frac + &QRat::q();
    println!("1/(q+1) + q = {sum}");
    println!("reflected:    {}", sum.reflect());
    assert_eq!(sum.reflect().reflect(), sum);

    let at2 = parse_rational("2").expect("rational");
    println!("3_q at q = 2: {}", qnum(3).eval_at(&at2).expect("no pole"));
    let pole = parse_rational("-1").expect("rational");
    match frac.eval_at(&pole) {
        Ok(v) => println!("1/(q+1) at -1 = {v}"),
        Err(e) => println!("1/(q+1) at -1: {e}"),
    }
}
