//! Pairing between the Borel halves, commuting-swap reduction, basis
//! extraction and dual elements.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::exactq::{rational, ExactError, Matrix, QMatrix, RationalFunction};
use crate::qgroup::{CartanData, GenKind, QGroupError, Word};

#[derive(Debug, Error)]
pub enum PairingError {
    #[error(transparent)]
    QGroup(#[from] QGroupError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("word {0} has no commuting-swap representative in its basis")]
    NotInBasis(IndexWord),
    #[error("dual elements are defined for E- or F-words, got {0}")]
    Kind(Word),
}

/// Sequence of generator indices (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexWord(pub Vec<usize>);

impl IndexWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn sorted(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for IndexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

impl From<&[usize]> for IndexWord {
    fn from(v: &[usize]) -> Self {
        Self(v.to_vec())
    }
}

/// ⟨F_x, E_y⟩ = (-(q - q^{-1})^{-1})^length · Σ_e q^e.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingValue {
    pub exponents: Vec<i32>,
    pub length: usize,
}

impl PairingValue {
    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn value(&self) -> RationalFunction {
        if self.is_zero() {
            return RationalFunction::zero();
        }
        let sum = self
            .exponents
            .iter()
            .fold(RationalFunction::zero(), |acc, &e| &acc + &RationalFunction::q_pow(e));
        let pre = (-RationalFunction::r()).pow(-(self.length as i32)).expect("q - 1/q is nonzero");
        &pre * &sum
    }

    pub fn evaluate(&self, q0: &BigRational) -> Result<BigRational, ExactError> {
        self.value().evaluate(q0)
    }
}

fn pair_exponents(x: &[usize], y: &[usize], c: &CartanData) -> Vec<i32> {
    if x.len() != y.len() || x.is_empty() {
        return Vec::new();
    }
    if x.len() == 1 {
        return if x[0] == y[0] { vec![0] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for i in 0..x.len() {
        if x[i] != y[0] {
            continue;
        }
        let pre: i32 = x[..i].iter().map(|&xj| c.cartan(xj, x[i])).sum();
        let mut rest = x.to_vec();
        rest.remove(i);
        out.extend(pair_exponents(&rest, &y[1..], c).into_iter().map(|e| e + pre));
    }
    out
}

/// Pairing of the F-word `x` against the E-word `y`.
pub fn pair(x: &IndexWord, y: &IndexWord, n: usize) -> Result<PairingValue, PairingError> {
    let c = CartanData::new(n)?;
    Ok(pair_with(x, y, &c))
}

fn pair_with(x: &IndexWord, y: &IndexWord, c: &CartanData) -> PairingValue {
    PairingValue {
        exponents: pair_exponents(&x.0, &y.0, c),
        length: x.len(),
    }
}

fn commuting_neighbors<'a>(w: &'a IndexWord, c: &'a CartanData) -> impl Iterator<Item = IndexWord> + 'a {
    (0..w.len().saturating_sub(1)).filter_map(move |t| {
        (w.0[t] != w.0[t + 1] && c.cartan(w.0[t], w.0[t + 1]) == 0).then(|| {
            let mut v = w.0.clone();
            v.swap(t, t + 1);
            IndexWord(v)
        })
    })
}

/// One representative (the first listed) per class of words related by
/// swapping adjacent commuting letters.
pub fn reduce(words: &[IndexWord], n: usize) -> Result<Vec<IndexWord>, PairingError> {
    let c = CartanData::new(n)?;
    Ok(reduce_with(words, &c))
}

fn reduce_with(words: &[IndexWord], c: &CartanData) -> Vec<IndexWord> {
    let mut seen: HashSet<IndexWord> = HashSet::new();
    let mut out = Vec::new();
    for w in words {
        if seen.contains(w) {
            continue;
        }
        out.push(w.clone());
        let mut queue = VecDeque::from([w.clone()]);
        seen.insert(w.clone());
        while let Some(cur) = queue.pop_front() {
            for nb in commuting_neighbors(&cur, c) {
                if seen.insert(nb.clone()) {
                    queue.push_back(nb);
                }
            }
        }
    }
    out
}

/// Distinct permutations of a multiset in lexicographic order.
pub fn permutations(multiset: &[usize]) -> Vec<IndexWord> {
    let mut v = multiset.to_vec();
    v.sort_unstable();
    let mut out = vec![IndexWord(v.clone())];
    loop {
        let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
            break;
        };
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("successor exists");
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(IndexWord(v.clone()));
    }
    out
}

/// Gram matrix G[a][b] = ⟨F_{basis a}, E_{basis b}⟩.
pub fn gram(basis: &[IndexWord], n: usize) -> Result<QMatrix, PairingError> {
    let c = CartanData::new(n)?;
    Ok(Matrix::from_fn(basis.len(), basis.len(), |a, b| {
        pair_with(&basis[a], &basis[b], &c).value()
    }))
}

/// Greedy nondegenerate basis among the reduced permutations of `multiset`.
pub fn build_basis(multiset: &[usize], n: usize) -> Result<Vec<IndexWord>, PairingError> {
    let c = CartanData::new(n)?;
    let words = reduce_with(&permutations(multiset), &c);
    // Nonsingularity at a rational point proves nonsingularity over Q(q);
    // only apparent singularity falls back to exact rank over Q(q).
    let probe = rational(3, 2);
    let mut kept: Vec<IndexWord> = Vec::new();
    let mut cache: HashMap<(usize, usize), RationalFunction> = HashMap::new();
    let mut kept_idx: Vec<usize> = Vec::new();
    let mut val = |a: usize, b: usize| -> RationalFunction {
        cache
            .entry((a, b))
            .or_insert_with(|| pair_with(&words[a], &words[b], &c).value())
            .clone()
    };
    for (k, w) in words.iter().enumerate() {
        let mut trial = kept_idx.clone();
        trial.push(k);
        let g = Matrix::from_fn(trial.len(), trial.len(), |a, b| val(trial[a], trial[b]));
        let full = match g.evaluate(&probe) {
            Ok(gn) if gn.rank() == trial.len() => true,
            _ => g.rank() == trial.len(),
        };
        if full {
            kept_idx.push(k);
            kept.push(w.clone());
        }
    }
    Ok(kept)
}

/// Which half a dual combination lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    E,
    F,
}

/// Linear combination of words of one kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualElement {
    pub side: Side,
    pub terms: Vec<(RationalFunction, IndexWord)>,
}

impl DualElement {
    pub fn kind(&self) -> GenKind {
        match self.side {
            Side::E => GenKind::E,
            Side::F => GenKind::F,
        }
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.side {
            Side::E => "E",
            Side::F => "F",
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, w)| format!("({c})*{letter}:{w}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Basis member equivalent to `w` under commuting swaps.
pub fn canonical_representative(
    w: &IndexWord,
    basis: &[IndexWord],
    n: usize,
) -> Result<Option<usize>, PairingError> {
    let c = CartanData::new(n)?;
    let mut seen = HashSet::from([w.clone()]);
    let mut queue = VecDeque::from([w.clone()]);
    while let Some(cur) = queue.pop_front() {
        if let Some(k) = basis.iter().position(|b| *b == cur) {
            return Ok(Some(k));
        }
        for nb in commuting_neighbors(&cur, &c) {
            if seen.insert(nb.clone()) {
                queue.push_back(nb);
            }
        }
    }
    Ok(None)
}

/// Dual of an E-word (an F-combination) or of an F-word (an E-combination),
/// computed from the inverse Gram matrix of the word's basis.
pub fn dual_element(word: &Word, n: usize) -> Result<DualElement, PairingError> {
    let kind = word.0.first().map(|g| g.kind);
    if word.is_empty() || word.0.iter().any(|g| Some(g.kind) != kind) {
        return Err(PairingError::Kind(word.clone()));
    }
    let side = match kind {
        Some(GenKind::E) => Side::F,
        Some(GenKind::F) => Side::E,
        _ => return Err(PairingError::Kind(word.clone())),
    };
    let iw = IndexWord(word.indices());
    let basis = build_basis(&iw.sorted(), n)?;
    let k = canonical_representative(&iw, &basis, n)?.ok_or_else(|| PairingError::NotInBasis(iw.clone()))?;
    let gi = gram(&basis, n)?.inverse()?;
    Ok(dual_from_inverse(&basis, &gi, k, side))
}

/// Dual of basis word `k`, read off the inverse Gram matrix.
fn dual_from_inverse(basis: &[IndexWord], gi: &QMatrix, k: usize, side: Side) -> DualElement {
    let terms = (0..basis.len())
        .filter_map(|j| {
            let c = match side {
                Side::F => gi[(k, j)].clone(),
                Side::E => gi[(j, k)].clone(),
            };
            (!c.is_zero()).then(|| (c, basis[j].clone()))
        })
        .collect();
    DualElement { side, terms }
}

/// ⟨dual, word⟩ with `word` of the opposite kind.
pub fn pair_dual(dual: &DualElement, word: &IndexWord, n: usize) -> Result<RationalFunction, PairingError> {
    let c = CartanData::new(n)?;
    Ok(dual.terms.iter().fold(RationalFunction::zero(), |acc, (coef, w)| {
        let v = match dual.side {
            Side::F => pair_with(w, word, &c),
            Side::E => pair_with(word, w, &c),
        };
        &acc + &(coef * &v.value())
    }))
}

/// Checks ⟨dual(b_k), b_j⟩ = δ_kj on both sides for the basis of `multiset`.
pub fn biorthogonal(multiset: &[usize], n: usize) -> Result<bool, PairingError> {
    let basis = build_basis(multiset, n)?;
    let gi = gram(&basis, n)?.inverse()?;
    for k in 0..basis.len() {
        for side in [Side::F, Side::E] {
            let dual = dual_from_inverse(&basis, &gi, k, side);
            for (j, bj) in basis.iter().enumerate() {
                let v = pair_dual(&dual, bj, n)?;
                let want = if j == k { RationalFunction::one() } else { RationalFunction::zero() };
                if v != want {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iw(v: &[usize]) -> IndexWord {
        IndexWord(v.to_vec())
    }

    #[test]
    fn base_pairings() {
        assert_eq!(pair(&iw(&[2]), &iw(&[2]), 4).unwrap().exponents, vec![0]);
        assert!(pair(&iw(&[1]), &iw(&[2]), 4).unwrap().is_zero());
        assert_eq!(pair(&iw(&[2, 3]), &iw(&[3, 2]), 4).unwrap().exponents, vec![-1]);
        assert!(pair(&iw(&[1, 2]), &iw(&[1]), 4).unwrap().is_zero());
        // ⟨F_1, E_1⟩ = -(q - 1/q)^{-1}
        let v = pair(&iw(&[1]), &iw(&[1]), 3).unwrap().value();
        assert_eq!(v, -RationalFunction::r().inverse().unwrap());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&[iw(&[3, 4]), iw(&[4, 3])], 4).unwrap().len(), 1);
        // 2 is the branch node of D_4, so 2 and 4 do not commute.
        assert_eq!(reduce(&[iw(&[2, 4]), iw(&[4, 2])], 4).unwrap().len(), 2);
        assert_eq!(reduce(&[iw(&[2, 3]), iw(&[3, 2])], 4).unwrap().len(), 2);
        assert_eq!(reduce(&[iw(&[1])], 3).unwrap(), vec![iw(&[1])]);
    }

    #[test]
    fn permutations_lexicographic() {
        let p = permutations(&[2, 1, 1]);
        assert_eq!(p, vec![iw(&[1, 1, 2]), iw(&[1, 2, 1]), iw(&[2, 1, 1])]);
    }

    #[test]
    fn bases() {
        assert_eq!(build_basis(&[2, 3], 4).unwrap(), vec![iw(&[2, 3]), iw(&[3, 2])]);
        assert_eq!(build_basis(&[1], 3).unwrap(), vec![iw(&[1])]);
        assert_eq!(build_basis(&[1, 2, 3, 1], 3).unwrap().len(), 5);
    }

    #[test]
    fn dual_of_e23() {
        let d = dual_element(&"E:2,3".parse().unwrap(), 4).unwrap();
        let r = RationalFunction::r();
        assert_eq!(d.side, Side::F);
        assert_eq!(
            d.terms,
            vec![(&r * &RationalFunction::q(), iw(&[2, 3])), (-r.clone(), iw(&[3, 2]))]
        );
    }

    #[test]
    fn dual_of_single_letter() {
        for n in 2..=4 {
            let d = dual_element(&"E:1".parse().unwrap(), n).unwrap();
            assert_eq!(d.terms, vec![(-RationalFunction::r(), iw(&[1]))]);
        }
    }

    #[test]
    fn dual_of_two_letter_words() {
        let coef = |d: &DualElement, w: &[usize]| d.terms.iter().find(|t| t.1 == iw(w)).unwrap().0.clone();
        let q = RationalFunction::q();
        // E_1E_2 (v_3 -> v_1) pairs with a multiple of q F_{12} - F_{21}.
        let d = dual_element(&"E:1,2".parse().unwrap(), 3).unwrap();
        assert_eq!(&coef(&d, &[2, 1]) * &q, -coef(&d, &[1, 2]));
        let d = dual_element(&"E:2,1".parse().unwrap(), 3).unwrap();
        assert_eq!(&coef(&d, &[1, 2]) * &q, -coef(&d, &[2, 1]));
    }

    #[test]
    fn biorthogonality_small() {
        assert!(biorthogonal(&[2, 3], 4).unwrap());
        assert!(biorthogonal(&[1, 1, 2, 3], 3).unwrap());
    }
}
