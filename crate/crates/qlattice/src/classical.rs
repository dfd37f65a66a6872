//! Classical so_{2n} Casimir on two tensor factors, the Markov generator
//! G_n built from it, the Type-m Parallel SSEP and its N-site expansion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{parse_rational, rational, rational_to_string, ExactError, Matrix, Ring};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("rank must be at least 2, got {0}")]
    Rank(u32),
    #[error("type m must be at least 1")]
    Type,
    #[error("need at least 2 sites, got {0}")]
    Sites(usize),
    #[error("matrix is not square on a product of two equal sites (dim {0})")]
    NotTwoSite(usize),
    #[error("row {0} is neither absorbing, maximal-choice nor pairwise")]
    Unclassifiable(usize),
    #[error("no rate-preserving bijection between the two generators")]
    NoBijection,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("bad matrix entry: {0}")]
    Parse(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T> = std::result::Result<T, ClassicalError>;

type Q = BigRational;
type QMat = Matrix<Q>;

fn unit(d: usize, i: usize, j: usize) -> QMat {
    let mut m = QMat::zeros(d, d);
    m[(i, j)] = Q::from_int(1);
    m
}

fn check_rank(n: u32) -> Result<usize> {
    if n < 2 {
        return Err(ClassicalError::Rank(n));
    }
    Ok(n as usize)
}

/// Cartan-Weyl basis element of so_{2n} in the vector representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Root {
    H(usize),
    X(usize, usize),
    Y(usize, usize),
    Z(usize, usize),
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Root::H(i) => write!(f, "H{i}"),
            Root::X(i, j) => write!(f, "X{i}{j}"),
            Root::Y(i, j) => write!(f, "Y{i}{j}"),
            Root::Z(i, j) => write!(f, "Z{i}{j}"),
        }
    }
}

impl Root {
    /// 2n×2n matrix, indices 1-based.
    pub fn matrix(self, n: usize) -> QMat {
        let d = 2 * n;
        let e = |i: usize, j: usize| unit(d, i - 1, j - 1);
        let diff = |a: QMat, b: QMat| a.try_sub(&b).expect("same shape");
        match self {
            Root::H(i) => diff(e(i, i), e(n + i, n + i)),
            Root::X(i, j) => diff(e(i, j), e(n + j, n + i)),
            Root::Y(i, j) => diff(e(i, n + j), e(j, n + i)),
            Root::Z(i, j) => diff(e(n + i, j), e(n + j, i)),
        }
    }

    /// Dual element as (coefficient, root), with the Killing normalization 1/(4n-4).
    pub fn dual(self, n: usize) -> (Q, Root) {
        let c = rational(1, 4 * n as i64 - 4);
        match self {
            Root::H(i) => (c, Root::H(i)),
            Root::X(i, j) => (c, Root::X(j, i)),
            Root::Y(i, j) => (-c, Root::Z(i, j)),
            Root::Z(i, j) => (-c, Root::Y(i, j)),
        }
    }
}

pub fn cartan_weyl_basis(n: u32) -> Result<Vec<Root>> {
    let n = check_rank(n)?;
    let mut out: Vec<Root> = (1..=n).map(Root::H).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            out.extend([Root::X(i, j), Root::X(j, i), Root::Y(i, j), Root::Z(i, j)]);
        }
    }
    Ok(out)
}

/// B(X, Y) = (2n-2) Tr(XY).
pub fn killing(n: u32, a: &QMat, b: &QMat) -> Result<Q> {
    let p = a.matmul(b)?;
    let tr = (0..p.rows()).fold(<Q as Ring>::zero(), |s, i| s + &p[(i, i)]);
    Ok(tr * Q::from_int(2 * n as i64 - 2))
}

/// A ⊗ I + I ⊗ A.
pub fn two_site(a: &QMat) -> QMat {
    let id = QMat::identity(a.rows());
    a.kron(&id).try_add(&id.kron(a)).expect("same shape")
}

/// ρ(Ω) on C^{2n} ⊗ C^{2n}.
pub fn casimir_rep(n: u32) -> Result<QMat> {
    let basis = cartan_weyl_basis(n)?;
    let nn = n as usize;
    let d = 4 * nn * nn;
    basis.iter().try_fold(QMat::zeros(d, d), |acc, &a| {
        let (c, dual) = a.dual(nn);
        let term = two_site(&a.matrix(nn)).matmul(&two_site(&dual.matrix(nn)))?;
        Ok(acc.try_add(&term.scale(&c))?)
    })
}

/// The closed block form of ρ(Ω): (2n-2)^{-1} times blocks D_i, ±X, ±Y, ±Z.
pub fn block_form(n: u32) -> Result<QMat> {
    let nn = check_rank(n)?;
    let d = 2 * nn;
    let id = QMat::identity(d);
    let mut out = QMat::zeros(d * d, d * d);
    let mut put = |bi: usize, bj: usize, m: &QMat| {
        for r in 0..d {
            for c in 0..d {
                out[(bi * d + r, bj * d + c)] = m[(r, c)].clone();
            }
        }
    };
    let two_n1 = Q::from_int(2 * nn as i64 - 1);
    for i in 1..=nn {
        let h = Root::H(i).matrix(nn);
        put(i - 1, i - 1, &id.scale(&two_n1).try_add(&h)?);
        put(nn + i - 1, nn + i - 1, &id.scale(&two_n1).try_sub(&h)?);
        for j in 1..=nn {
            if i == j {
                continue;
            }
            // block row i, column j carries X_{ij}; bottom-right carries -X_{ji}
            put(i - 1, j - 1, &Root::X(j, i).matrix(nn));
            put(nn + i - 1, nn + j - 1, &Root::X(i, j).matrix(nn).negated());
            let (lo, hi) = (i.min(j), i.max(j));
            let sign = if i < j { Q::from_int(-1) } else { Q::from_int(1) };
            put(i - 1, nn + j - 1, &Root::Z(lo, hi).matrix(nn).scale(&sign));
            put(nn + i - 1, j - 1, &Root::Y(lo, hi).matrix(nn).scale(&sign));
        }
    }
    Ok(out.scale(&rational(1, 2 * nn as i64 - 2)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum StateClass {
    Absorbing,
    MaximalChoice,
    Pairwise { partner: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Census {
    pub absorbing: usize,
    pub maximal_choice: usize,
    pub pairwise: usize,
}

pub fn census(classes: &[StateClass]) -> Census {
    classes.iter().fold(Census::default(), |mut c, s| {
        match s {
            StateClass::Absorbing => c.absorbing += 1,
            StateClass::MaximalChoice => c.maximal_choice += 1,
            StateClass::Pairwise { .. } => c.pairwise += 1,
        }
        c
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalGenerator {
    pub n: u32,
    pub matrix: QMat,
    pub classes: Vec<StateClass>,
    /// 0-based rows that were negated.
    pub negated_rows: Vec<usize>,
}

impl ClassicalGenerator {
    pub fn census(&self) -> Census {
        census(&self.classes)
    }
}

fn off_diagonal(m: &QMat, i: usize) -> impl Iterator<Item = (usize, &Q)> {
    m.row(i)
        .iter()
        .enumerate()
        .filter(move |(j, v)| *j != i && !v.is_zero())
}

/// G_n: subtract the row sums from the diagonal, then negate the rows whose
/// diagonal came out positive.
pub fn generator(n: u32) -> Result<ClassicalGenerator> {
    let rho = casimir_rep(n)?;
    let sums = rho.row_sums();
    let mut g = rho;
    let mut negated = Vec::new();
    for (i, s) in sums.iter().enumerate() {
        g[(i, i)] = &g[(i, i)] - s;
        if g[(i, i)].is_positive() {
            negated.push(i);
            for j in 0..g.cols() {
                g[(i, j)] = -&g[(i, j)];
            }
        }
    }
    let classes = classify(&g)?;
    Ok(ClassicalGenerator { n, matrix: g, classes, negated_rows: negated })
}

/// 0-based rows of the set S = {n+1, n+1+(2n+1), ...} ∪ {2n²+1, ...}.
pub fn expected_negated_rows(n: u32) -> Vec<usize> {
    let n = n as usize;
    let step = 2 * n + 1;
    let mut out: Vec<usize> = (0..n).map(|k| n + k * step).collect();
    out.extend((0..n).map(|k| 2 * n * n + k * step));
    out
}

/// Absorbing rows are zero, maximal-choice rows have the largest number of
/// off-diagonals, every other row must have a single partner that points back.
pub fn classify(m: &QMat) -> Result<Vec<StateClass>> {
    let choices: Vec<usize> = (0..m.rows()).map(|i| off_diagonal(m, i).count()).collect();
    let max = choices.iter().copied().max().unwrap_or(0);
    (0..m.rows())
        .map(|i| match choices[i] {
            0 => Ok(StateClass::Absorbing),
            c if c == max && max > 1 => Ok(StateClass::MaximalChoice),
            1 => {
                let (j, _) = off_diagonal(m, i).next().expect("one entry");
                let back = off_diagonal(m, j).map(|(k, _)| k).collect::<Vec<_>>();
                if back == [i] {
                    Ok(StateClass::Pairwise { partner: j })
                } else {
                    Err(ClassicalError::Unclassifiable(i))
                }
            }
            _ => Err(ClassicalError::Unclassifiable(i)),
        })
        .collect()
}

/// Each maximal-choice row reaches every other member but one, and that
/// missing member is unique to it. Returns the missing partner per row.
pub fn cycle_structure(m: &QMat, classes: &[StateClass]) -> Option<BTreeMap<usize, usize>> {
    let members: Vec<usize> = (0..classes.len())
        .filter(|&i| classes[i] == StateClass::MaximalChoice)
        .collect();
    let mut missing = BTreeMap::new();
    for &i in &members {
        let reach: Vec<usize> = off_diagonal(m, i).map(|(j, _)| j).collect();
        if reach.iter().any(|j| !members.contains(j)) {
            return None;
        }
        let gone: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&j| j != i && !reach.contains(&j))
            .collect();
        if gone.len() != 1 {
            return None;
        }
        missing.insert(i, gone[0]);
    }
    let mut seen: Vec<usize> = missing.values().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    (seen.len() == members.len()).then_some(missing)
}

/// Off-diagonal values present in the matrix.
pub fn off_diagonal_values(m: &QMat) -> Vec<Q> {
    let mut v: Vec<Q> = m
        .nonzeros()
        .filter(|(i, j, _)| i != j)
        .map(|(_, _, x)| x.clone())
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn is_markov_generator(m: &QMat) -> bool {
    m.row_sums().iter().all(Ring::is_zero)
        && m.nonzeros().all(|(i, j, v)| i == j || v.is_positive())
}

/// Σ_i I^{⊗(i-1)} ⊗ L ⊗ I^{⊗(N-1-i)} for a two-site L.
pub fn expand(l: &QMat, sites: usize) -> Result<QMat> {
    if sites < 2 {
        return Err(ClassicalError::Sites(sites));
    }
    let d = (l.rows() as f64).sqrt().round() as usize;
    if !l.is_square() || d * d != l.rows() {
        return Err(ClassicalError::NotTwoSite(l.rows()));
    }
    let eye = |k: usize| QMat::identity(d.pow(k as u32));
    (1..sites).try_fold(QMat::zeros(d.pow(sites as u32), d.pow(sites as u32)), |acc, i| {
        let term = eye(i - 1).kron(l).kron(&eye(sites - 1 - i));
        Ok(acc.try_add(&term)?)
    })
}

/// Census by choice count: zero rows and rows with the maximal number of
/// off-diagonals. Works for any generator, including expanded ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceCensus {
    pub states: usize,
    pub absorbing: usize,
    pub maximal_choice: usize,
    pub max_choices: usize,
}

pub fn choice_census(m: &QMat) -> ChoiceCensus {
    let choices: Vec<usize> = (0..m.rows()).map(|i| off_diagonal(m, i).count()).collect();
    let max = choices.iter().copied().max().unwrap_or(0);
    ChoiceCensus {
        states: m.rows(),
        absorbing: choices.iter().filter(|&&c| c == 0).count(),
        maximal_choice: choices.iter().filter(|&&c| c == max && max > 0).count(),
        max_choices: max,
    }
}

/// One site of a Parallel SSEP: top mass `top/m`, bottom occupation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParallelSite {
    pub top: u32,
    pub bottom: bool,
}

impl ParallelSite {
    pub fn code(self) -> usize {
        2 * self.top as usize + usize::from(self.bottom)
    }

    pub fn from_code(c: usize) -> Self {
        ParallelSite { top: (c / 2) as u32, bottom: c % 2 == 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParallelState {
    pub m: u32,
    pub sites: Vec<ParallelSite>,
}

impl ParallelState {
    pub fn index(&self) -> usize {
        let base = 2 * (self.m as usize + 1);
        self.sites.iter().fold(0, |acc, s| acc * base + s.code())
    }

    pub fn from_index(m: u32, sites: usize, mut idx: usize) -> Self {
        let base = 2 * (m as usize + 1);
        let mut v = vec![ParallelSite { top: 0, bottom: false }; sites];
        for s in v.iter_mut().rev() {
            *s = ParallelSite::from_code(idx % base);
            idx /= base;
        }
        ParallelState { m, sites: v }
    }
}

impl fmt::Display for ParallelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top: Vec<String> = self.sites.iter().map(|s| format!("{}/{}", s.top, self.m)).collect();
        let bot: Vec<&str> = self.sites.iter().map(|s| if s.bottom { "1" } else { "0" }).collect();
        write!(f, "top[{}] bottom[{}]", top.join(","), bot.join(","))
    }
}

/// Moves of one Type-m Basic Parallel SSEP (two sites).
///
/// Identical sites are frozen. Balanced pairs (top masses summing to 1, one
/// bottom particle) fuse or split into any other balanced pair except the
/// mirror image. Anything else exchanges the two sites.
pub fn basic_moves(m: u32, x: ParallelSite, y: ParallelSite) -> Vec<(ParallelSite, ParallelSite)> {
    if x == y {
        return Vec::new();
    }
    let balanced = |a: ParallelSite, b: ParallelSite| a.top + b.top == m && a.bottom != b.bottom;
    if !balanced(x, y) {
        return vec![(y, x)];
    }
    let mut out = Vec::new();
    for t in 0..=m {
        for bottom in [false, true] {
            let a = ParallelSite { top: t, bottom };
            let b = ParallelSite { top: m - t, bottom: !bottom };
            if (a, b) != (x, y) && (a, b) != (y, x) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Generator of the Type-m Parallel SSEP on `sites` sites; every move of
/// every adjacent subsystem fires at rate 1/(2m).
pub fn parallel_ssep(m: u32, sites: usize) -> Result<QMat> {
    if m < 1 {
        return Err(ClassicalError::Type);
    }
    if sites < 2 {
        return Err(ClassicalError::Sites(sites));
    }
    let base = 2 * (m as usize + 1);
    let dim = base.pow(sites as u32);
    let rate = rational(1, 2 * m as i64);
    let mut out = QMat::zeros(dim, dim);
    for i in 0..dim {
        let st = ParallelState::from_index(m, sites, i);
        for b in 0..sites - 1 {
            for (x, y) in basic_moves(m, st.sites[b], st.sites[b + 1]) {
                let mut next = st.clone();
                next.sites[b] = x;
                next.sites[b + 1] = y;
                let j = next.index();
                out[(i, j)] = &out[(i, j)] + &rate;
                out[(i, i)] = &out[(i, i)] - &rate;
            }
        }
    }
    Ok(out)
}

/// Refine vertex colours by (own colour, weighted in/out neighbour colours)
/// jointly on both graphs so colours are comparable.
fn refine(a: &QMat, b: &QMat) -> (Vec<usize>, Vec<usize>) {
    let n = a.rows();
    let mut ca = vec![0usize; n];
    let mut cb = vec![0usize; n];
    let mut classes = 0;
    loop {
        let sig = |m: &QMat, c: &[usize], i: usize| {
            let mut out: Vec<(String, usize)> = off_diagonal(m, i)
                .map(|(j, v)| (rational_to_string(v), c[j]))
                .collect();
            let mut inc: Vec<(String, usize)> = (0..m.rows())
                .filter(|&j| j != i && !m[(j, i)].is_zero())
                .map(|j| (rational_to_string(&m[(j, i)]), c[j]))
                .collect();
            out.sort();
            inc.sort();
            (c[i], rational_to_string(&m[(i, i)]), out, inc)
        };
        let sa: Vec<_> = (0..n).map(|i| sig(a, &ca, i)).collect();
        let sb: Vec<_> = (0..n).map(|i| sig(b, &cb, i)).collect();
        let mut ids = BTreeMap::new();
        for s in sa.iter().chain(&sb) {
            let k = ids.len();
            ids.entry(s.clone()).or_insert(k);
        }
        ca = sa.iter().map(|s| ids[s]).collect();
        cb = sb.iter().map(|s| ids[s]).collect();
        if ids.len() == classes {
            return (ca, cb);
        }
        classes = ids.len();
    }
}

/// A bijection π with a[i][j] = b[π(i)][π(j)] for all i, j, found by colour
/// refinement and backtracking.
pub fn match_classical(a: &QMat, b: &QMat) -> Result<Vec<usize>> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(ClassicalError::Dimension(a.rows(), b.rows()));
    }
    let n = a.rows();
    let (ca, cb) = refine(a, b);
    let mut hist: HashMap<usize, isize> = HashMap::new();
    for (&x, &y) in ca.iter().zip(&cb) {
        *hist.entry(x).or_default() += 1;
        *hist.entry(y).or_default() -= 1;
    }
    if hist.values().any(|&v| v != 0) {
        return Err(ClassicalError::NoBijection);
    }
    // visit vertices along edges so constraints bite early
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in 0..n {
                if !seen[w] && (!a[(v, w)].is_zero() || !a[(w, v)].is_zero()) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        order: &[usize],
        a: &QMat,
        b: &QMat,
        ca: &[usize],
        cb: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&v) = order.get(k) else { return true };
        for w in 0..b.rows() {
            if used[w] || ca[v] != cb[w] {
                continue;
            }
            let ok = order[..k]
                .iter()
                .all(|&u| a[(v, u)] == b[(w, map[u])] && a[(u, v)] == b[(map[u], w)]);
            if !ok {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if go(k + 1, order, a, b, ca, cb, map, used) {
                return true;
            }
            used[w] = false;
        }
        map[v] = usize::MAX;
        false
    }
    if go(0, &order, a, b, &ca, &cb, &mut map, &mut used) {
        Ok(map)
    } else {
        Err(ClassicalError::NoBijection)
    }
}

/// Golden matrices are stored as rows of rational strings.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalRows(pub Vec<Vec<String>>);

impl RationalRows {
    pub fn from_matrix(m: &QMat) -> Self {
        RationalRows(
            m.to_rows()
                .iter()
                .map(|r| r.iter().map(short_rational).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<QMat> {
        let rows = self
            .0
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s).map_err(ClassicalError::Parse)).collect())
            .collect::<Result<Vec<Vec<Q>>>>()?;
        Ok(QMat::from_rows(rows)?)
    }
}

/// "0", "-1", "1/2" rather than "0/1".
pub fn short_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        rational_to_string(c)
    }
}

/// Entries where `m` differs from the golden matrix.
pub fn golden_mismatches(m: &QMat, golden: &QMat) -> Vec<(usize, usize)> {
    if m.rows() != golden.rows() || m.cols() != golden.cols() {
        return vec![(m.rows(), m.cols())];
    }
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| m[(i, j)] != golden[(i, j)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn so4_golden() -> QMat {
        let rows: RationalRows =
            serde_json::from_str(include_str!("../testdata/so4.json")).unwrap();
        rows.to_matrix().unwrap()
    }

    #[test]
    fn killing_duals() {
        for n in 2..=4 {
            let nn = n as usize;
            for a in cartan_weyl_basis(n).unwrap() {
                let (c, d) = a.dual(nn);
                let b = killing(n, &a.matrix(nn), &d.matrix(nn).scale(&c)).unwrap();
                assert_eq!(b, Q::from_int(1), "{a}");
            }
        }
    }

    #[test]
    fn casimir_matches_block_form() {
        for n in 2..=4 {
            assert_eq!(casimir_rep(n).unwrap(), block_form(n).unwrap(), "n={n}");
        }
        // D_1 = 5I + H_1 at n=3, scaled by 1/4
        let rho = casimir_rep(3).unwrap();
        let d1 = rho.principal(&(0..6).collect::<Vec<_>>());
        let want = QMat::identity(6)
            .scale(&Q::from_int(5))
            .try_add(&Root::H(1).matrix(3))
            .unwrap()
            .scale(&rational(1, 4));
        assert_eq!(d1, want);
    }

    #[test]
    fn so4_generator_is_golden() {
        let g = generator(2).unwrap();
        assert!(golden_mismatches(&g.matrix, &so4_golden()).is_empty());
        let rows = |v: &[usize]| v.iter().map(|i| i - 1).collect::<Vec<_>>();
        let pick = |f: fn(&StateClass) -> bool| {
            (0..16).filter(|&i| f(&g.classes[i])).collect::<Vec<_>>()
        };
        assert_eq!(pick(|c| *c == StateClass::Absorbing), rows(&[1, 6, 11, 16]));
        assert_eq!(pick(|c| *c == StateClass::MaximalChoice), rows(&[3, 8, 9, 14]));
        for (a, b) in [(2, 5), (4, 13), (7, 10), (12, 15)] {
            assert_eq!(g.classes[a - 1], StateClass::Pairwise { partner: b - 1 });
        }
        // row 3 reaches two of {8, 9, 14}
        let reach: Vec<usize> = off_diagonal(&g.matrix, 2).map(|(j, _)| j + 1).collect();
        assert_eq!(reach, vec![8, 14]);
    }

    #[test]
    fn censuses_and_lemmas() {
        for n in 2..=5u32 {
            let g = generator(n).unwrap();
            let nn = n as usize;
            assert!(is_markov_generator(&g.matrix));
            assert_eq!(off_diagonal_values(&g.matrix), vec![rational(1, 2 * nn as i64 - 2)]);
            assert_eq!(
                g.census(),
                Census { absorbing: 2 * nn, maximal_choice: 2 * nn, pairwise: 4 * nn * nn - 4 * nn }
            );
            assert_eq!(g.negated_rows, expected_negated_rows(n));
            assert!(cycle_structure(&g.matrix, &g.classes).is_some());
            let max = choice_census(&g.matrix).max_choices;
            assert_eq!(max, 2 * nn - 2);
        }
    }

    #[test]
    fn basic_ssep_matches_generator() {
        for (m, n) in [(1u32, 2u32), (2, 3)] {
            let p = parallel_ssep(m, 2).unwrap();
            let k = 2 * (m as usize + 1);
            let cls = classify(&p).unwrap();
            assert_eq!(census(&cls), Census { absorbing: k, maximal_choice: k, pairwise: k * k - 2 * k });
            let g = generator(n).unwrap();
            let pi = match_classical(&g.matrix, &p).unwrap();
            for i in 0..k * k {
                let cls_p = match cls[pi[i]] {
                    StateClass::Pairwise { .. } => None,
                    c => Some(c),
                };
                let cls_g = match g.classes[i] {
                    StateClass::Pairwise { .. } => None,
                    c => Some(c),
                };
                assert_eq!(cls_g, cls_p);
            }
        }
    }

    #[test]
    fn falsification_control() {
        let g = generator(2).unwrap().matrix;
        let mut p = parallel_ssep(1, 2).unwrap();
        // double one pairwise rate
        let (i, j) = (1, 4);
        let half = p[(i, j)].clone();
        assert!(!half.is_zero());
        p[(i, j)] = &half + &half;
        p[(i, i)] = &p[(i, i)] - &half;
        assert_eq!(match_classical(&g, &p), Err(ClassicalError::NoBijection));
    }

    #[test]
    fn expansion() {
        let g = generator(2).unwrap().matrix;
        assert_eq!(expand(&g, 2).unwrap(), g);
        let l3 = expand(&g, 3).unwrap();
        assert!(is_markov_generator(&l3));
        let c = choice_census(&l3);
        assert_eq!((c.states, c.absorbing, c.maximal_choice), (64, 4, 4));
        let p3 = parallel_ssep(1, 3).unwrap();
        assert!(match_classical(&l3, &p3).is_ok());
        // L⊗I + I⊗L with the two-site L
        let id = QMat::identity(4);
        assert_eq!(l3, g.kron(&id).try_add(&id.kron(&g)).unwrap());
    }

    #[test]
    fn basic_ssep_m2_lemmas() {
        let p = parallel_ssep(2, 2).unwrap();
        let c = choice_census(&p);
        assert_eq!((c.states, c.absorbing, c.maximal_choice), (36, 6, 6));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ssep_rows_sum_to_zero(m in 1u32..=3, sites in 2usize..=3) {
            let p = parallel_ssep(m, sites).unwrap();
            prop_assert!(is_markov_generator(&p));
            let c = choice_census(&p);
            prop_assert_eq!(c.absorbing, 2 * (m as usize + 1));
            prop_assert_eq!(c.maximal_choice, 2 * (m as usize + 1));
        }

        #[test]
        fn index_roundtrip(m in 1u32..=3, sites in 2usize..=4, seed in 0usize..10_000) {
            let base = 2 * (m as usize + 1);
            let idx = seed % base.pow(sites as u32);
            prop_assert_eq!(ParallelState::from_index(m, sites, idx).index(), idx);
        }
    }
}
