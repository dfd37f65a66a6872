use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::laurent::{forward_owned, poly_divrem, poly_gcd, rat};
use super::{ExactError, LaurentPoly};

/// Element of Q(q) kept in canonical form.
///
/// The denominator is an ordinary polynomial with nonzero constant term and
/// leading coefficient 1, coprime to the numerator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    pub fn zero() -> Self {
        Self::from_laurent(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_laurent(LaurentPoly::one())
    }

    pub fn q() -> Self {
        Self::from_laurent(LaurentPoly::q())
    }

    pub fn q_pow(k: i32) -> Self {
        Self::from_laurent(LaurentPoly::q_pow(k))
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_laurent(LaurentPoly::from(k))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_laurent(LaurentPoly::constant(c))
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    /// `q - q^{-1}`.
    pub fn r() -> Self {
        Self::from_laurent(LaurentPoly::from_int_terms(&[(1, 1), (-1, -1)]))
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Some(p) when the denominator is 1.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.den.is_one().then_some(&self.num)
    }

    /// Number of stored terms, used as the elimination pivot weight.
    pub fn term_count(&self) -> usize {
        self.num.len() + self.den.len()
    }

    fn canonical(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let dmin = den.min_exp().unwrap_or(0);
        let (_, dd) = den.to_dense();
        let (nshift, nd) = num.to_dense();
        let nshift = nshift - dmin;
        let g = if dd.len() > 1 && nd.len() > 1 {
            poly_gcd(&nd, &dd)
        } else {
            vec![rat(1)]
        };
        let (mut nd, mut dd) = if g.len() > 1 {
            (poly_divrem(&nd, &g).0, poly_divrem(&dd, &g).0)
        } else {
            (nd, dd)
        };
        let lc = dd.last().cloned().unwrap_or_else(BigRational::one);
        if !lc.is_one() {
            for c in nd.iter_mut() {
                *c /= &lc;
            }
            for c in dd.iter_mut() {
                *c /= &lc;
            }
        }
        Self {
            num: LaurentPoly::from_dense(nshift, &nd),
            den: LaurentPoly::from_dense(0, &dd),
        }
    }

    pub fn inverse(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, k: i32) -> Result<Self, ExactError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Substitute `q -> 1/q`.
    pub fn invert_q(&self) -> Self {
        Self::canonical(self.num.invert_q(), self.den.invert_q())
    }

    pub fn evaluate(&self, q0: &BigRational) -> Result<BigRational, ExactError> {
        if q0.is_zero() {
            return Err(ExactError::ZeroPoint);
        }
        let d = self.den.evaluate(q0)?;
        if d.is_zero() {
            return Err(ExactError::Pole(q0.clone()));
        }
        Ok(self.num.evaluate(q0)? / d)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalFunction::from_laurent(num);
            }
            return RationalFunction::canonical(num, self.den.clone());
        }
        RationalFunction::canonical(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_laurent(&self.num * &rhs.num);
        }
        RationalFunction::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; use [`RationalFunction::inverse`] to handle it.
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inverse().expect("division by zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

forward_owned!(RationalFunction, Add add, Sub sub, Mul mul, Div div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        Self::from_laurent(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(k: i64) -> Self {
        Self::from_int(k)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}
