use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{LaurentPoly, Matrix, RationalFunction};
use super::ring::Ring;

pub fn rational_to_string(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n = BigInt::from_str(n.trim()).map_err(|e| format!("{s}: {e}"))?;
    let d = BigInt::from_str(d.trim()).map_err(|e| format!("{s}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("{s}: zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .terms()
            .map(|(e, c)| (e.to_string(), rational_to_string(c)))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        let mut terms = Vec::with_capacity(map.len());
        for (e, c) in map {
            let e = e.parse::<i32>().map_err(D::Error::custom)?;
            terms.push((e, parse_rational(&c).map_err(D::Error::custom)?));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

#[derive(Serialize, Deserialize)]
struct Frac {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Frac {
            num: self.numer().clone(),
            den: self.denom().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = Frac::deserialize(d)?;
        RationalFunction::new(f.num, f.den).map_err(D::Error::custom)
    }
}

impl<T: Ring + Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = (0..self.rows()).map(|i| self.row(i)).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Ring + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}
