//! Central element of U_q(so_{2n}) assembled from dual elements, and its
//! realization on tensor powers of the fundamental representation.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::exactq::{ExactError, ExponentHull, Field, Matrix, QMatrix, RationalFunction, Ring};
use crate::pairing::{dual_element, DualElement, PairingError};
use crate::qgroup::{path_sign, CartanData, Fundamental, GenKind, Generator, QGroupError, Weight, Word};

#[derive(Debug, Error)]
pub enum CentralError {
    #[error(transparent)]
    QGroup(#[from] QGroupError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("weight {mu} is not above {lambda}")]
    NotAbove { mu: Weight, lambda: Weight },
    #[error("{0:?} is not in the root lattice")]
    NotInLattice(Vec<i32>),
    #[error("dual coefficient denominator does not divide the common denominator")]
    Denominator,
    #[error("path word {word} does not map v_{from} to ±v_{to}")]
    BadPath { word: Word, from: usize, to: usize },
}

/// Σ c_i H_i, realized as q^{Σ c_i H_i}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CartanExponent(pub Vec<i32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartanTarget {
    /// -2μ
    MinusTwice(Weight),
    /// -μ-λ
    MinusSum(Weight, Weight),
}

/// q^{(-2ρ, μ)} as an exponent: 2i - 2n for +L_i and 2n - 2i for -L_i.
pub fn rho_exponent(mu: Weight, n: usize) -> i32 {
    let v = 2 * (n as i32 - mu.index as i32);
    if mu.positive {
        -v
    } else {
        v
    }
}

/// q^{(μ-λ, μ)}: 2 when λ = -μ, else 1.
pub fn mu_lambda_exponent(mu: Weight, lambda: Weight, n: usize) -> Result<i32, CentralError> {
    if !mu.above(&lambda, n) {
        return Err(CentralError::NotAbove { mu, lambda });
    }
    Ok(if lambda == mu.negate() { 2 } else { 1 })
}

pub fn cartan_combination(target: CartanTarget, n: usize) -> Result<CartanExponent, CentralError> {
    let c = CartanData::new(n)?;
    let t: Vec<i32> = match target {
        CartanTarget::MinusTwice(mu) => mu.l_vector(n).iter().map(|x| -2 * x).collect(),
        CartanTarget::MinusSum(mu, la) => mu
            .l_vector(n)
            .iter()
            .zip(la.l_vector(n))
            .map(|(a, b)| -a - b)
            .collect(),
    };
    c.root_coordinates(&t)
        .map(CartanExponent)
        .ok_or(CentralError::NotInLattice(t))
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalTerm {
    pub weight: Weight,
    pub q_power: i32,
    pub cartan: CartanExponent,
}

/// prefactor · e_dual · q^{cartan} · f_dual, where `e_dual` is the
/// F-combination dual to `e_word` and `f_dual` the E-combination dual to `f_word`.
#[derive(Clone, Debug, Serialize)]
pub struct PairTerm {
    pub mu: Weight,
    pub lambda: Weight,
    pub e_word: Word,
    pub f_word: Word,
    pub sign: i64,
    pub q_power: i32,
    pub e_dual: DualElement,
    pub cartan: CartanExponent,
    pub f_dual: DualElement,
}

impl PairTerm {
    pub fn prefactor(&self) -> RationalFunction {
        &RationalFunction::from_int(self.sign) * &RationalFunction::q_pow(self.q_power)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralElementPlan {
    pub n: usize,
    pub diagonal: Vec<DiagonalTerm>,
    pub pairs: Vec<PairTerm>,
}

pub fn assemble_central(n: usize) -> Result<CentralElementPlan, CentralError> {
    let c = CartanData::new(n)?;
    let diagonal = c
        .weights()
        .into_iter()
        .map(|mu| {
            Ok(DiagonalTerm {
                weight: mu,
                q_power: rho_exponent(mu, n),
                cartan: cartan_combination(CartanTarget::MinusTwice(mu), n)?,
            })
        })
        .collect::<Result<Vec<_>, CentralError>>()?;
    let mut pairs = Vec::new();
    for (mu, lambda) in c.ordered_pairs() {
        let (e_word, f_word) = crate::qgroup::weight_path(mu, lambda, n)?;
        let (a, b) = (mu.basis_index(n), lambda.basis_index(n));
        let se = path_sign(&e_word, b, a, n)?;
        let sf = path_sign(&f_word, a, b, n)?;
        if se == 0 {
            return Err(CentralError::BadPath { word: e_word, from: b, to: a });
        }
        if sf == 0 {
            return Err(CentralError::BadPath { word: f_word, from: a, to: b });
        }
        pairs.push(PairTerm {
            mu,
            lambda,
            sign: se * sf,
            q_power: rho_exponent(mu, n) + mu_lambda_exponent(mu, lambda, n)?,
            e_dual: dual_element(&e_word, n)?,
            f_dual: dual_element(&f_word, n)?,
            cartan: cartan_combination(CartanTarget::MinusSum(mu, lambda), n)?,
            e_word,
            f_word,
        });
    }
    Ok(CentralElementPlan { n, diagonal, pairs })
}

/// Caches coproduct images of E_i, F_i on a fixed number of sites.
pub struct SiteAlgebra<'a, T: Ring> {
    rep: &'a Fundamental<T>,
    sites: usize,
    cache: HashMap<Generator, Matrix<T>>,
}

impl<'a, T: Ring> SiteAlgebra<'a, T> {
    pub fn new(rep: &'a Fundamental<T>, sites: usize) -> Self {
        Self {
            rep,
            sites,
            cache: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim().pow(self.sites as u32)
    }

    pub fn generator(&mut self, g: Generator) -> Result<&Matrix<T>, QGroupError> {
        if !self.cache.contains_key(&g) {
            let m = self.rep.coproduct(g, self.sites)?;
            self.cache.insert(g, m);
        }
        Ok(&self.cache[&g])
    }

    pub fn word(&mut self, kind: GenKind, indices: &[usize]) -> Result<Matrix<T>, QGroupError> {
        let mut m = Matrix::identity(self.dim());
        for &i in indices {
            let g = self.generator(Generator { kind, index: i })?.clone();
            m = &m * &g;
        }
        Ok(m)
    }

    pub fn combination<E>(
        &mut self,
        dual: &DualElement,
        coeff: &impl Fn(&RationalFunction) -> Result<T, E>,
    ) -> Result<Matrix<T>, E>
    where
        E: From<QGroupError>,
    {
        let mut acc = Matrix::zeros(self.dim(), self.dim());
        for (c, w) in &dual.terms {
            let wm = self.word(dual.kind(), &w.0)?;
            acc = &acc + &wm.scale(&coeff(c)?);
        }
        Ok(acc)
    }

    pub fn cartan_diag(&self, h: &CartanExponent) -> Result<Vec<T>, QGroupError> {
        Ok(self
            .rep
            .tensor_cartan_exponents(&h.0, self.sites)?
            .into_iter()
            .map(|e| self.rep.q_pow(e))
            .collect())
    }
}

/// Realizes the plan on `sites` tensor factors over any ring carrying `q`.
/// `coeff` maps each dual coefficient into the ring and `diag_scale`
/// multiplies the Cartan-only terms (one, except when coefficients are rescaled).
pub fn realize_with<T: Ring, E>(
    plan: &CentralElementPlan,
    rep: &Fundamental<T>,
    sites: usize,
    diag_scale: &T,
    coeff: impl Fn(&RationalFunction) -> Result<T, E>,
) -> Result<Matrix<T>, E>
where
    E: From<QGroupError>,
{
    let mut alg = SiteAlgebra::new(rep, sites);
    let d = alg.dim();
    let scalar = |r: &RationalFunction| coeff(r);
    let mut out = Matrix::zeros(d, d);
    for t in &plan.diagonal {
        let diag = alg.cartan_diag(&t.cartan)?;
        let s = rep.q_pow(t.q_power).times(diag_scale);
        let m = Matrix::diagonal(diag.into_iter().map(|x| x.times(&s)).collect());
        out = &out + &m;
    }
    for t in &plan.pairs {
        let fm = alg.combination(&t.e_dual, &scalar)?;
        let em = alg.combination(&t.f_dual, &scalar)?;
        let diag = alg.cartan_diag(&t.cartan)?;
        let pre = T::from_int(t.sign).times(&rep.q_pow(t.q_power));
        let mut left = fm;
        for i in 0..d {
            for j in 0..d {
                if !left[(i, j)].is_zero() {
                    left[(i, j)] = left[(i, j)].times(&diag[j]).times(&pre);
                }
            }
        }
        out = &out + &(&left * &em);
    }
    Ok(out)
}

/// Exact realization over Q(q).
pub fn realize(plan: &CentralElementPlan, sites: usize) -> Result<QMatrix, CentralError> {
    let rep = Fundamental::new(plan.n, RationalFunction::q())?;
    realize_with(plan, &rep, sites, &RationalFunction::one(), |c| Ok::<_, CentralError>(c.clone()))
}

/// Realization with q specialized to a nonzero rational.
pub fn realize_at(plan: &CentralElementPlan, sites: usize, q0: &BigRational) -> Result<Matrix<BigRational>, CentralError> {
    let rep = Fundamental::new(plan.n, q0.clone())?;
    realize_with(plan, &rep, sites, &<BigRational as One>::one(), |c| c.evaluate(q0).map_err(CentralError::from))
}

/// Monic lcm of all dual-coefficient denominators.
pub fn common_denominator(plan: &CentralElementPlan) -> RationalFunction {
    let mut l = RationalFunction::one();
    for t in &plan.pairs {
        for (c, _) in t.e_dual.terms.iter().chain(&t.f_dual.terms) {
            let d = RationalFunction::from(c.denom().clone());
            // lcm(l, d) = l * d / gcd, obtained from the canonical form of d / l.
            let ratio = &d / &l;
            l = &l * &RationalFunction::from(ratio.numer().clone());
        }
    }
    l
}

/// Exponent hull of `D² · realize(plan)` where `D` is [`common_denominator`].
pub fn realize_hull(plan: &CentralElementPlan, sites: usize) -> Result<Matrix<ExponentHull>, CentralError> {
    let den = common_denominator(plan);
    let dh = ExponentHull::of(den.as_laurent().ok_or(CentralError::Denominator)?);
    let rep = Fundamental::with_inverse(plan.n, ExponentHull::monomial(1), ExponentHull::monomial(-1))?;
    realize_with(plan, &rep, sites, &dh.times(&dh), |c| {
        let scaled = c * &den;
        let p = scaled.as_laurent().ok_or(CentralError::Denominator)?;
        Ok::<_, CentralError>(ExponentHull::of(p))
    })
}

/// Commutator witness: generator and first nonzero entry.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorFailure {
    pub generator: String,
    pub sites: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralityReport {
    pub n: usize,
    pub checked: Vec<String>,
    pub failures: Vec<CommutatorFailure>,
}

impl CentralityReport {
    pub fn is_central(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Commutators with every E_i, F_i, K_i image on the given site counts.
pub fn verify_central_in<T: Field>(
    c_by_sites: &[(usize, Matrix<T>)],
    rep: &Fundamental<T>,
) -> Result<CentralityReport, CentralError> {
    let mut checked = Vec::new();
    let mut failures = Vec::new();
    for (sites, c) in c_by_sites {
        for i in 1..=rep.n() {
            for g in [Generator::e(i), Generator::f(i), Generator::k(i)] {
                let m = rep.coproduct(g, *sites)?;
                let comm = c.commutator(&m)?;
                let name = format!("{:?}{}", g.kind, g.index);
                checked.push(format!("{name}@{sites}"));
                let witness = comm.nonzeros().next().map(|(r, c, _)| (r, c));
                if let Some((row, col)) = witness {
                    failures.push(CommutatorFailure {
                        generator: name,
                        sites: *sites,
                        row,
                        col,
                    });
                }
            }
        }
    }
    Ok(CentralityReport {
        n: rep.n(),
        checked,
        failures,
    })
}

/// Symbolic centrality check on one and two sites.
pub fn verify_central(plan: &CentralElementPlan) -> Result<CentralityReport, CentralError> {
    let rep = Fundamental::new(plan.n, RationalFunction::q())?;
    let c1 = realize(plan, 1)?;
    let c2 = realize(plan, 2)?;
    verify_central_in(&[(1, c1), (2, c2)], &rep)
}

/// If `m` is a scalar multiple of the identity, the scalar.
pub fn scalar_of<T: Ring>(m: &Matrix<T>) -> Option<T> {
    let s = m[(0, 0)].clone();
    (m.is_square() && *m == Matrix::identity(m.rows()).scale(&s)).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_exponents() {
        assert_eq!(rho_exponent(Weight::plus(1), 3), -4);
        assert_eq!(rho_exponent(Weight::minus(3), 3), 0);
        assert_eq!(rho_exponent(Weight::minus(1), 4), 6);
    }

    #[test]
    fn mu_lambda_exponents() {
        assert_eq!(mu_lambda_exponent(Weight::plus(1), Weight::minus(1), 3).unwrap(), 2);
        assert_eq!(mu_lambda_exponent(Weight::plus(1), Weight::plus(2), 3).unwrap(), 1);
        assert_eq!(mu_lambda_exponent(Weight::plus(3), Weight::minus(2), 3).unwrap(), 1);
        assert!(mu_lambda_exponent(Weight::plus(2), Weight::plus(1), 3).is_err());
    }

    #[test]
    fn cartan_combinations() {
        let h = cartan_combination(CartanTarget::MinusTwice(Weight::plus(2)), 3).unwrap();
        assert_eq!(h.0, vec![0, -1, -1]);
        for n in 3..=5 {
            let h = cartan_combination(CartanTarget::MinusTwice(Weight::plus(n)), n).unwrap();
            let mut want = vec![0; n];
            want[n - 2] = 1;
            want[n - 1] = -1;
            assert_eq!(h.0, want);
        }
        let h = cartan_combination(CartanTarget::MinusSum(Weight::plus(1), Weight::plus(3)), 3).unwrap();
        assert_eq!(h.0, vec![-1, 0, -1]);
    }

    #[test]
    fn plan_sizes() {
        for (n, pairs) in [(2, 5), (3, 14)] {
            let p = assemble_central(n).unwrap();
            assert_eq!(p.diagonal.len(), 2 * n);
            assert_eq!(p.pairs.len(), pairs);
        }
    }

    #[test]
    fn so4_central_and_scalar() {
        let p = assemble_central(2).unwrap();
        let rep = verify_central(&p).unwrap();
        assert!(rep.is_central(), "{:?}", rep.failures);
        assert!(scalar_of(&realize(&p, 1).unwrap()).is_some());
    }
}
