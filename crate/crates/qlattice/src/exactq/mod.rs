//! Exact arithmetic in Q(q): Laurent polynomials, rational functions and
//! dense linear algebra over any exact field.

mod json;
mod laurent;
mod matrix;
mod ratfunc;
mod ring;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use thiserror::Error;

pub use json::{parse_rational, rational_to_string};
pub use laurent::LaurentPoly;
pub use matrix::{solve_linear, Matrix, Pivot, QMatrix, Solution, SolveMode};
pub use ratfunc::RationalFunction;
pub use ring::{ExponentHull, Field, Ring};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation at q = 0 is not allowed")]
    ZeroPoint,
    #[error("pole at q = {0}")]
    Pole(BigRational),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inverse,
    Negate,
}

/// Single entry point for the four field operations; `b` is ignored for unary ones.
pub fn field_arith(
    a: &RationalFunction,
    b: &RationalFunction,
    op: FieldOp,
) -> Result<RationalFunction, ExactError> {
    match op {
        FieldOp::Add => Ok(a + b),
        FieldOp::Mul => Ok(a * b),
        FieldOp::Inverse => a.inverse(),
        FieldOp::Negate => Ok(-a),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `count` distinct rationals in (0,1) ∪ (1,2), smallest denominators first.
pub fn sample_points(count: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(count);
    let mut d: i64 = 2;
    while out.len() < count {
        for n in 1..2 * d {
            if n != d && n.gcd(&d) == 1 {
                out.push(rational(n, d));
                if out.len() == count {
                    break;
                }
            }
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(pairs: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(pairs)
    }

    fn rf(pairs: &[(i32, i64)]) -> RationalFunction {
        RationalFunction::from(lp(pairs))
    }

    #[test]
    fn difference_of_squares() {
        let a = rf(&[(1, 1), (-1, -1)]);
        let b = rf(&[(1, 1), (-1, 1)]);
        assert_eq!(&a * &b, rf(&[(2, 1), (-2, -1)]));
    }

    #[test]
    fn inverse_is_canonical() {
        let inv = field_arith(&RationalFunction::r(), &RationalFunction::zero(), FieldOp::Inverse).unwrap();
        assert_eq!(inv.numer(), &lp(&[(1, 1)]));
        assert_eq!(inv.denom(), &lp(&[(2, 1), (0, -1)]));
    }

    #[test]
    fn swap_rate_expansion() {
        let r = RationalFunction::r();
        assert_eq!(&r * &r, rf(&[(2, 1), (0, -2), (-2, 1)]));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(RationalFunction::zero().inverse(), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn evaluation() {
        let one = rational(1, 1);
        assert_eq!(lp(&[(2, 1), (0, -2), (-2, 1)]).evaluate(&one).unwrap(), rational(0, 1));
        assert_eq!(lp(&[(5, 1), (-5, 1)]).evaluate(&rational(2, 1)).unwrap(), rational(32 * 32 + 1, 32));
        let s3 = lp(&[(6, 1), (2, 1), (0, 2), (-2, 1), (-6, 1)]);
        assert_eq!(s3.evaluate(&one).unwrap(), rational(6, 1));
    }

    #[test]
    fn pole_distinct_from_zero_point() {
        let inv = RationalFunction::r().inverse().unwrap();
        assert_eq!(inv.evaluate(&rational(1, 1)), Err(ExactError::Pole(rational(1, 1))));
        assert_eq!(inv.evaluate(&rational(0, 1)), Err(ExactError::ZeroPoint));
    }

    #[test]
    fn dual_example_inverse() {
        // (q - 1/q)^{-2} [[1, 1/q], [1/q, 1]]
        let r2 = (&RationalFunction::r() * &RationalFunction::r()).inverse().unwrap();
        let qi = RationalFunction::q_pow(-1);
        let m = Matrix::from_rows(vec![
            vec![r2.clone(), &r2 * &qi],
            vec![&r2 * &qi, r2.clone()],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        // (q - 1/q) [[q, -1], [-1, q]]
        let r = RationalFunction::r();
        let q = RationalFunction::q();
        let expect = Matrix::from_rows(vec![
            vec![&r * &q, -r.clone()],
            vec![-r.clone(), &r * &q],
        ])
        .unwrap();
        assert_eq!(inv, expect);
        assert_eq!(&m * &inv, Matrix::identity(2));
    }

    #[test]
    fn rank_and_kernel() {
        let id: QMatrix = Matrix::identity(3);
        assert_eq!(solve_linear(&id, SolveMode::Rank).unwrap(), Solution::Rank(3));
        let q = RationalFunction::q();
        let m = Matrix::from_rows(vec![
            vec![q.clone(), RationalFunction::one()],
            vec![&q * &q, q.clone()],
        ])
        .unwrap();
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert!((&m * &k).is_zero());
        assert_eq!(m.inverse(), Err(ExactError::Singular));
    }

    #[test]
    fn json_roundtrip() {
        let p = LaurentPoly::from_terms(vec![(-2, rational(3, 4)), (1, rational(-1, 1))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"-2":"3/4","1":"-1/1"}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let m = Matrix::from_rows(vec![vec![RationalFunction::r().inverse().unwrap()]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn sample_points_are_distinct() {
        let pts = sample_points(40);
        let mut s = pts.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 40);
        assert!(pts.iter().all(|p| *p > rational(0, 1) && *p < rational(2, 1) && *p != rational(1, 1)));
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i32..4, -3i64..4), 0..4).prop_map(|v| {
            LaurentPoly::from_terms(v.into_iter().map(|(e, c)| (e, rational(c, 1))))
        })
    }

    fn arb_rf() -> impl Strategy<Value = RationalFunction> {
        (arb_poly(), arb_poly()).prop_map(|(n, d)| {
            if d.is_zero() {
                RationalFunction::from(n)
            } else {
                RationalFunction::new(n, d).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse().unwrap(), RationalFunction::one());
            }
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn canonical_denominator(a in arb_rf()) {
            let d = a.denom();
            prop_assert_eq!(d.min_exp(), Some(0));
            prop_assert!(d.leading_coeff().unwrap() == &rational(1, 1));
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_rf(), b in arb_rf(), k in 0usize..12) {
            let q0 = &sample_points(12)[k];
            if let (Ok(x), Ok(y)) = (a.evaluate(q0), b.evaluate(q0)) {
                prop_assert_eq!((&a * &b).evaluate(q0).unwrap(), &x * &y);
                prop_assert_eq!((&a + &b).evaluate(q0).unwrap(), &x + &y);
            }
        }

        #[test]
        fn inverse_roundtrip(entries in prop::collection::vec(arb_poly(), 9)) {
            let m = Matrix::from_fn(3, 3, |i, j| RationalFunction::from(entries[3 * i + j].clone()));
            if let Ok(inv) = m.inverse() {
                prop_assert_eq!(&m * &inv, Matrix::identity(3));
            }
        }

        #[test]
        fn pivot_order_independent(entries in prop::collection::vec(arb_poly(), 12)) {
            let m = Matrix::from_fn(3, 4, |i, j| RationalFunction::from(entries[4 * i + j].clone()));
            prop_assert_eq!(m.rank_with(Pivot::Sparsest), m.rank_with(Pivot::First));
            let k1 = m.kernel_with(Pivot::Sparsest);
            let k2 = m.kernel_with(Pivot::First);
            prop_assert_eq!(k1.cols(), k2.cols());
            prop_assert!((&m * &k1).is_zero());
            prop_assert!((&m * &k2).is_zero());
        }
    }
}
