use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qma::field::{Field, Rational};
use qma::ncalgebra::{Generator, Monomial, NCPoly, QuantumMatrixAlgebra};
use qma::parse::{parse_ncpoly, read_matrix, write_matrix};
use qma::qfield::{qnum, LaurentPoly, QRat};
use qma::rmatrix::{builtin, Family};
use qma::tensor::SparseOp;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn laurent() -> impl Strategy<Value = LaurentPoly> + Clone {
    prop::collection::vec((-3i32..=3, -4i64..=4), 0..4)
        .prop_map(|terms| LaurentPoly::from_terms(terms.into_iter().map(|(e, c)| (e, rat(c)))))
}

fn qrat() -> impl Strategy<Value = QRat> + Clone {
    (laurent(), laurent()).prop_filter_map("zero denominator", |(n, d)| QRat::new(n, d))
}

fn nonzero_qrat() -> impl Strategy<Value = QRat> {
    qrat().prop_filter("zero", |x| !x.is_zero())
}

fn generator() -> impl Strategy<Value = Generator> {
    (0usize..2, 0usize..2).prop_map(|(i, j)| Generator::new(i, j))
}

fn monomial(max: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(generator(), 0..=max).prop_map(Monomial::from)
}

fn ncpoly<F: Field + std::fmt::Debug>(coeff: impl Strategy<Value = F>, max: usize) -> impl Strategy<Value = NCPoly<F>> {
    prop::collection::vec((coeff, monomial(max)), 0..4).prop_map(|terms| {
        let mut p = NCPoly::zero();
        for (c, m) in terms {
            p.add_term(m, &c);
        }
        p
    })
}

fn small_rational() -> impl Strategy<Value = Rational> + Clone {
    (-5i64..=5).prop_map(rat)
}

fn op2(dim: usize) -> impl Strategy<Value = SparseOp<Rational>> {
    let size = dim * dim;
    prop::collection::vec((0..size, 0..size, -3i64..=3), 0..8).prop_map(move |entries| {
        let mut op = SparseOp::zero(dim, 2);
        for (r, c, v) in entries {
            op.set(r, c, rat(v));
        }
        op
    })
}

fn qop2() -> impl Strategy<Value = SparseOp<QRat>> {
    prop::collection::vec((0usize..4, 0usize..4, qrat()), 0..6).prop_map(|entries| {
        let mut op = SparseOp::zero(2, 2);
        for (r, c, v) in entries {
            op.set(r, c, v);
        }
        op
    })
}

fn rtt() -> &'static QuantumMatrixAlgebra<QRat> {
    static ALG: OnceLock<QuantumMatrixAlgebra<QRat>> = OnceLock::new();
    ALG.get_or_init(|| {
        let pair = builtin(Family::RttStandard, 2).unwrap().validate(4).unwrap();
        QuantumMatrixAlgebra::new(pair).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qrat_ring_axioms(a in qrat(), b in qrat(), c in qrat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn qrat_inverse(a in nonzero_qrat()) {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn qrat_canonical_form_is_unique(a in qrat(), b in nonzero_qrat()) {
        let scaled = QRat::new(&a.numer().clone() * &b.numer().clone(), &a.denom().clone() * &b.numer().clone()).unwrap();
        prop_assert_eq!(scaled, a);
    }

    #[test]
    fn reflect_is_involutive_homomorphism(a in qrat(), b in qrat()) {
        prop_assert_eq!(a.reflect().reflect(), a.clone());
        prop_assert_eq!((&a + &b).reflect(), &a.reflect() + &b.reflect());
        prop_assert_eq!((&a * &b).reflect(), &a.reflect() * &b.reflect());
    }

    #[test]
    fn evaluation_is_homomorphism(a in qrat(), b in qrat(), x in 2i64..=20) {
        let x = rat(x);
        if let (Ok(ea), Ok(eb)) = (a.eval_at(&x), b.eval_at(&x)) {
            prop_assert_eq!((&a + &b).eval_at(&x).unwrap(), &ea + &eb);
            prop_assert_eq!((&a * &b).eval_at(&x).unwrap(), &ea * &eb);
        }
    }

    #[test]
    fn qnum_matches_symmetric_sum(k in 1u32..8, x in 2i64..=9) {
        let x = rat(x);
        let expected = (0..k as i32).fold(rat(0), |acc, j| acc + Field::powi(&x, k as i32 - 1 - 2 * j).unwrap());
        prop_assert_eq!(qnum(k).eval_at(&x).unwrap(), expected);
    }

    #[test]
    fn disjoint_slots_commute(a in op2(2), b in op2(2)) {
        let a1 = a.embed_at(1, 4).unwrap();
        let b3 = b.embed_at(3, 4).unwrap();
        prop_assert_eq!(a1.compose(&b3).unwrap(), b3.compose(&a1).unwrap());
        prop_assert_eq!(a1.compose(&b3).unwrap(), a.tensor(&b).unwrap());
    }

    #[test]
    fn embedding_respects_composition(a in op2(2), b in op2(2), pos in 1usize..=2) {
        let lhs = a.compose(&b).unwrap().embed_at(pos, 3).unwrap();
        let rhs = a.embed_at(pos, 3).unwrap().compose(&b.embed_at(pos, 3).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn free_product_is_associative(a in ncpoly(small_rational(), 2), b in ncpoly(small_rational(), 2), c in ncpoly(small_rational(), 2)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn scalar_entries_embed_consistently(a in op2(2), b in op2(2)) {
        let lifted = a.lift::<NCPoly<Rational>>().compose(&b.lift()).unwrap();
        prop_assert_eq!(lifted, a.compose(&b).unwrap().lift());
    }

    #[test]
    fn ideal_is_two_sided(rel in 0usize..12, l in monomial(1), r in monomial(1), c in nonzero_qrat()) {
        let ideal = rtt().ideal();
        let rels = ideal.relations();
        let relation = &rels[rel % rels.len()];
        let shifted = NCPoly::term(c, l).mul(relation).mul(&NCPoly::term(QRat::one(), r));
        prop_assert!(ideal.contains(&shifted));
    }

    #[test]
    fn normal_form_ignores_ideal_elements(p in ncpoly(qrat(), 2), rel in 0usize..12, l in monomial(1), r in monomial(1)) {
        let ideal = rtt().ideal();
        let rels = ideal.relations();
        let relation = &rels[rel % rels.len()];
        let shifted = NCPoly::term(QRat::one(), l).mul(relation).mul(&NCPoly::term(QRat::one(), r));
        let nf = ideal.reduce(&p);
        prop_assert_eq!(ideal.reduce(&p.add(&shifted)), nf.clone());
        prop_assert_eq!(ideal.reduce(&nf), nf);
    }

    #[test]
    fn printed_witness_reparses_to_same_residual(p in ncpoly(qrat(), 3)) {
        let ideal = rtt().ideal();
        let nf = ideal.reduce(&p);
        let reparsed = parse_ncpoly(&nf.to_string()).unwrap();
        prop_assert_eq!(ideal.reduce(&reparsed), nf.clone());
        prop_assert_eq!(reparsed, nf);
    }

    #[test]
    fn matrix_file_round_trip(op in qop2()) {
        let text = write_matrix(&op).unwrap();
        prop_assert_eq!(read_matrix(&text).unwrap(), op);
    }
}
