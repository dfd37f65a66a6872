use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{LaurentPoly, RationalFunction};

/// Commutative ring with exact equality, as needed by [`super::Matrix`].
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(k: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    /// Size measure used for pivot selection.
    fn weight(&self) -> usize {
        1
    }
}

pub trait Field: Ring {
    fn recip(&self) -> Option<Self>;

    fn powi(&self, k: i32) -> Option<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = out.times(&base);
        }
        Some(out)
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
}

impl Field for BigRational {
    fn recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| num_traits::Inv::inv(self))
    }
}

impl Ring for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn from_int(k: i64) -> Self {
        LaurentPoly::from(k)
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn weight(&self) -> usize {
        self.len()
    }
}

impl Ring for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn from_int(k: i64) -> Self {
        RationalFunction::from_int(k)
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn weight(&self) -> usize {
        self.term_count()
    }
}

impl Field for RationalFunction {
    fn recip(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

/// Conservative bound on the exponent support of a Laurent polynomial.
///
/// Sums take the hull and products add endpoints, so running a computation in
/// this ring bounds the support of the exact result. `None` is a certain zero.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct ExponentHull(pub Option<(i32, i32)>);

impl ExponentHull {
    pub fn of(p: &LaurentPoly) -> Self {
        Self(p.min_exp().zip(p.max_exp()))
    }

    pub fn monomial(e: i32) -> Self {
        Self(Some((e, e)))
    }

    /// Width of the hull; a nonzero Laurent polynomial bounded by it has at most this many roots in Q\{0}.
    pub fn span(&self) -> u32 {
        self.0.map_or(0, |(a, b)| (b - a) as u32)
    }
}

impl Ring for ExponentHull {
    fn zero() -> Self {
        Self(None)
    }
    fn one() -> Self {
        Self::monomial(0)
    }
    fn from_int(k: i64) -> Self {
        if k == 0 {
            Self(None)
        } else {
            Self::monomial(0)
        }
    }
    fn is_zero(&self) -> bool {
        self.0.is_none()
    }
    fn plus(&self, o: &Self) -> Self {
        match (self.0, o.0) {
            (None, x) | (x, None) => Self(x),
            (Some((a, b)), Some((c, d))) => Self(Some((a.min(c), b.max(d)))),
        }
    }
    fn times(&self, o: &Self) -> Self {
        match (self.0, o.0) {
            (Some((a, b)), Some((c, d))) => Self(Some((a + c, b + d))),
            _ => Self(None),
        }
    }
    fn negated(&self) -> Self {
        *self
    }
}
