//! Published reference data for the two-site Hamiltonians, in the ordered
//! bases `(v_1⊗v_{2n}, ..., v_n⊗v_{n+1}, v_{2n}⊗v_1, ..., v_{n+1}⊗v_n)`.

use crate::exactq::LaurentPoly;

fn p(terms: &[(i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_int_terms(terms)
}

fn q(k: i32) -> LaurentPoly {
    LaurentPoly::q_pow(k)
}

fn neg(x: LaurentPoly) -> LaurentPoly {
    -x
}

/// The 2×2 drift block after the shift.
pub fn drift_block(n: usize) -> [[LaurentPoly; 2]; 2] {
    let k = 2 * n as i32;
    let off = p(&[(k - 1, 1), (1 - k, 1)]);
    [
        [p(&[(k - 2, -1), (-k, -1)]), off.clone()],
        [off, p(&[(k, -1), (2 - k, -1)])],
    ]
}

/// The 6×6 block for so_6.
pub fn so6_block() -> Vec<Vec<LaurentPoly>> {
    let a = p(&[(6, -1), (4, 1), (0, -2)]);
    let b = p(&[(6, -2), (2, 1), (0, -1)]);
    let s = p(&[(4, 1), (-4, 1), (0, -2)]);
    let t = p(&[(-3, 1), (-5, -1), (1, -2)]);
    let sq = p(&[(2, 1), (0, 1)]).pow(2);
    let d1 = neg(&(&sq * &p(&[(6, 1), (4, -1), (0, 1)])) * &q(-6));
    let d2 = p(&[(4, -2), (2, 1), (-2, -2), (-6, -1)]);
    let d3 = neg(&p(&[(6, 1), (0, 1)]).pow(2) * &q(-6));
    let d4 = neg(&(&sq * &p(&[(6, 1), (2, -1), (0, 1)])) * &q(-4));
    let d5 = neg(p(&[(6, 1), (2, 2), (-2, -1), (-4, 2)]));
    let r = |x: &LaurentPoly, k: i32| x * &q(k);
    vec![
        vec![d1, p(&[(3, -1), (-3, -2), (1, 1)]), r(&a, -2), s.clone(), r(&a, -1), r(&a, -2)],
        vec![p(&[(3, -1), (-3, -2), (1, 1)]), d2, r(&a, -1), t.clone(), s.clone(), r(&a, -1)],
        vec![r(&a, -2), r(&a, -1), d3.clone(), r(&b, -4), t.clone(), s.clone()],
        vec![s.clone(), t.clone(), r(&b, -4), d4, r(&b, -3), r(&b, -4)],
        vec![r(&a, -1), s.clone(), t.clone(), r(&b, -3), d5, t.clone()],
        vec![r(&a, -2), r(&a, -1), s, r(&b, -4), t, d3],
    ]
}

/// The 8×8 block for so_8, assembled as Uᵀ + D + U.
pub fn so8_block() -> Vec<Vec<LaurentPoly>> {
    let a = p(&[(8, -1), (6, 1), (0, -2)]);
    let b = p(&[(8, -2), (2, 1), (0, -1)]);
    let s = p(&[(6, 1), (-6, 1), (0, -2)]);
    let z = LaurentPoly::zero;
    let r = |x: &LaurentPoly, k: i32| x * &q(k);
    let u = [
        vec![z(), r(&a, -5), r(&a, -4), r(&a, -3), s.clone(), r(&a, -1), r(&a, -2), r(&a, -3)],
        vec![z(), z(), r(&a, -3), r(&a, -2), r(&b, -7), s.clone(), r(&a, -1), r(&a, -2)],
        vec![z(), z(), z(), r(&a, -1), r(&b, -6), r(&b, -7), s.clone(), r(&a, -1)],
        vec![z(), z(), z(), z(), r(&b, -5), r(&b, -6), r(&b, -7), s.clone()],
        vec![z(), z(), z(), z(), z(), r(&b, -3), r(&b, -4), r(&b, -5)],
        vec![z(), z(), z(), z(), z(), z(), r(&b, -5), r(&b, -6)],
        vec![z(), z(), z(), z(), z(), z(), z(), r(&b, -7)],
        vec![z(); 8],
    ];
    let diag = [
        p(&[(6, -1), (2, -1), (-6, -2), (-8, -1), (0, 1)]),
        p(&[(6, -1), (4, -1), (2, 1), (-4, -2), (-8, -1)]),
        p(&[(6, -2), (4, 1), (-2, -2), (-8, -1)]),
        p(&[(8, -1), (-8, -1), (0, -2)]),
        p(&[(8, -1), (6, -2), (0, 1), (-2, -1), (-6, -1)]),
        p(&[(8, -1), (4, -2), (-2, 1), (-4, -1), (-6, -1)]),
        p(&[(8, -1), (2, -2), (-4, 1), (-6, -2)]),
        p(&[(8, -1), (-8, -1), (0, -2)]),
    ];
    (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    let mut x = &u[i][j] + &u[j][i];
                    if i == j {
                        x = &x + &diag[i];
                    }
                    x
                })
                .collect()
        })
        .collect()
}

/// Printed 4×4 generators on the retained states; `None` where only the
/// row-sum condition is given.
pub type PrintedGenerator = Vec<Vec<Option<LaurentPoly>>>;

fn full(rows: Vec<Vec<LaurentPoly>>) -> PrintedGenerator {
    rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect()
}

fn starred(rows: Vec<Vec<LaurentPoly>>) -> PrintedGenerator {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| r.into_iter().enumerate().map(|(j, x)| (i != j).then_some(x)).collect())
        .collect()
}

fn so6_shared() -> (LaurentPoly, LaurentPoly, LaurentPoly, LaurentPoly) {
    let q4m1 = p(&[(4, 1), (0, -1)]).pow(2);
    let d_a = p(&[(4, -2), (2, 1), (-2, -2), (-6, -1)]);
    let d_b = neg(&p(&[(6, 1), (0, 1)]).pow(2) * &q(-6));
    let d_c = neg(p(&[(6, 1), (2, 2), (-2, -1), (-4, 2)]));
    (q4m1, d_a, d_b, d_c)
}

/// so_6, second kernel vector, retained (v1⊗v6, v2⊗v5, v6⊗v1, v5⊗v2).
pub fn so6_g2_generator() -> PrintedGenerator {
    let (q4m1, d_a, _, d_c) = so6_shared();
    let sq = p(&[(2, 1), (0, 1)]).pow(2);
    let d1 = neg(&(&sq * &p(&[(6, 1), (4, -1), (0, 1)])) * &q(-6));
    let d3 = neg(&(&sq * &p(&[(6, 1), (2, -1), (0, 1)])) * &q(-4));
    full(vec![
        vec![d1, p(&[(2, 1), (0, -1), (-4, 2)]), &q4m1 * &q(-6), p(&[(4, 1), (2, -1), (-2, 2)])],
        vec![p(&[(4, 1), (2, -1), (-2, 2)]), d_a, p(&[(0, 2), (-4, -1), (-6, 1)]), &q4m1 * &q(-4)],
        vec![&q4m1 * &q(-2), p(&[(2, 2), (-2, -1), (-4, 1)]), d3, p(&[(4, 2), (0, -1), (-2, 1)])],
        vec![p(&[(6, 1), (4, -1), (0, 2)]), p(&[(4, 1), (-4, 1), (0, -2)]), p(&[(2, 2), (-2, -1), (-4, 1)]), d_c],
    ])
}

/// so_6, first kernel vector, retained (v2⊗v5, v3⊗v4, v5⊗v2, v4⊗v3).
pub fn so6_g1_generator() -> PrintedGenerator {
    let (q4m1, d_a, d_b, d_c) = so6_shared();
    let tw = p(&[(4, 1), (2, -1), (-2, 2)]);
    let st = p(&[(6, 1), (4, -1), (0, 2)]);
    let x = p(&[(-4, -1), (-6, 1), (0, 2)]);
    let s = p(&[(4, 1), (-4, 1), (0, -2)]);
    let y = p(&[(2, 2), (-2, -1), (-4, 1)]);
    full(vec![
        vec![d_a, tw.clone(), &q4m1 * &q(-6), tw],
        vec![st.clone(), d_b.clone(), x.clone(), s.clone()],
        vec![&q4m1 * &q(-2), y.clone(), d_c, y],
        vec![st, s, x, d_b],
    ])
}

fn so8_shared() -> (LaurentPoly, LaurentPoly, LaurentPoly) {
    (
        p(&[(8, -1), (6, 1), (0, -2)]),
        p(&[(8, -2), (2, 1), (0, -1)]),
        p(&[(6, 1), (-6, 1), (0, -2)]),
    )
}

/// so_8, third kernel vector, retained (v1⊗v8, v2⊗v7, v8⊗v1, v7⊗v2).
pub fn so8_third_generator() -> PrintedGenerator {
    let (a, b, s) = so8_shared();
    let z = LaurentPoly::zero();
    let na = neg(a);
    let nb = neg(b);
    starred(vec![
        vec![z.clone(), &na * &q(-6), &s * &q(-2), p(&[(6, 1), (4, -1), (-2, 2)])],
        vec![&na * &q(-4), z.clone(), &nb * &q(-8), s.clone()],
        vec![&s * &q(2), p(&[(-6, 1), (-4, -1), (2, 2)]), z.clone(), &nb * &q(-2)],
        vec![p(&[(8, 1), (6, -1), (0, 2)]), s, &nb * &q(-4), z],
    ])
}

/// so_8, first kernel vector, retained (v2⊗v7, v3⊗v6, v7⊗v2, v6⊗v3).
pub fn so8_first_generator() -> PrintedGenerator {
    let (a, b, s) = so8_shared();
    let z = LaurentPoly::zero();
    let na = neg(a);
    let nb = neg(b);
    starred(vec![
        vec![z.clone(), &na * &q(-4), &s * &q(-2), &na * &q(-2)],
        vec![&na * &q(-2), z.clone(), &nb * &q(-8), s.clone()],
        vec![&s * &q(2), &nb * &q(-6), z.clone(), &nb * &q(-4)],
        vec![p(&[(8, 1), (6, -1), (0, 2)]), s, &nb * &q(-6), z],
    ])
}

/// so_8, second kernel vector, retained (v3⊗v6, v4⊗v5, v6⊗v3, v5⊗v4).
pub fn so8_second_generator() -> PrintedGenerator {
    let (_, b, s) = so8_shared();
    let z = LaurentPoly::zero();
    let nb = neg(b);
    let tw = p(&[(6, 1), (4, -1), (-2, 2)]);
    let st = p(&[(8, 1), (6, -1), (0, 2)]);
    let y = p(&[(-6, 1), (-4, -1), (2, 2)]);
    starred(vec![
        vec![z.clone(), tw.clone(), &s * &q(-2), tw],
        vec![st.clone(), z.clone(), &nb * &q(-8), s.clone()],
        vec![&s * &q(2), y.clone(), z.clone(), y],
        vec![st, s, &nb * &q(-8), z],
    ])
}
