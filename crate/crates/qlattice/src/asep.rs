//! The type D ASEP: two particle classes, at most one of each per site,
//! driven by drift, SWAP, STICK and TWIST clocks on a closed segment.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactq::{rational_to_string, sample_points, ExactError, ExponentHull, LaurentPoly, Matrix, Ring};

#[derive(Debug, Error)]
pub enum AsepError {
    #[error("rate parameter n must be at least 2, got {0}")]
    Rank(u32),
    #[error("need at least {min} sites, got {got}")]
    Sites { min: usize, got: usize },
    #[error("cannot parse configuration {0:?}")]
    Parse(String),
    #[error("q must be positive")]
    NonPositive,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Occupancy of one site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Empty = 0,
    First = 1,
    Second = 2,
    Both = 3,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::Empty, Site::First, Site::Second, Site::Both];

    pub fn from_code(c: usize) -> Self {
        Self::ALL[c & 3]
    }

    pub fn code(self) -> usize {
        self as usize
    }

    /// Whether a particle of class 1 or 2 sits here.
    pub fn has(self, class: u8) -> bool {
        self.code() & class as usize != 0
    }

    pub fn count(self) -> usize {
        [0, 1, 1, 2][self.code()]
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["∅", "1", "2", "12"][self.code()])
    }
}

impl FromStr for Site {
    type Err = AsepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "∅" | "0" | "e" | "-" | "" => Ok(Site::Empty),
            "1" => Ok(Site::First),
            "2" => Ok(Site::Second),
            "12" | "21" => Ok(Site::Both),
            other => Err(AsepError::Parse(other.to_string())),
        }
    }
}

/// A configuration on sites `1..=N`, written `[12;∅;1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(pub Vec<Site>);

impl Configuration {
    pub fn sites(&self) -> usize {
        self.0.len()
    }

    /// Base-4 index with site 1 most significant.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, s| acc * 4 + s.code())
    }

    pub fn from_index(mut idx: usize, sites: usize) -> Self {
        let mut v = vec![Site::Empty; sites];
        for s in v.iter_mut().rev() {
            *s = Site::from_code(idx % 4);
            idx /= 4;
        }
        Self(v)
    }

    pub fn all(sites: usize) -> impl Iterator<Item = Configuration> {
        (0..4usize.pow(sites as u32)).map(move |i| Self::from_index(i, sites))
    }

    /// A_c(η): 1-based positions holding a class-c particle.
    pub fn positions(&self, class: u8) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.has(class))
            .map(|(x, _)| x + 1)
            .collect()
    }

    /// Number of class-c particles strictly left of site x.
    pub fn count_left(&self, class: u8, x: usize) -> usize {
        self.0[..x - 1].iter().filter(|s| s.has(class)).count()
    }

    /// (|A_1|, |A_2|), conserved by the dynamics.
    pub fn charges(&self) -> (usize, usize) {
        (self.positions(1).len(), self.positions(2).len())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", parts.join(";"))
    }
}

impl FromStr for Configuration {
    type Err = AsepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let sep = if inner.contains(';') { ';' } else { ',' };
        inner
            .split(sep)
            .map(Site::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map(Configuration)
            .map_err(|_| AsepError::Parse(s.to_string()))
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Rate parameters (n, δ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RateTable {
    pub n: u32,
    pub delta: u32,
}

impl RateTable {
    pub fn new(n: u32, delta: u32) -> Result<Self, AsepError> {
        if n < 2 {
            return Err(AsepError::Rank(n));
        }
        Ok(Self { n, delta })
    }

    fn n(&self) -> i32 {
        self.n as i32
    }

    /// q^{2n-1} + q^{1-2n}
    pub fn speed(&self) -> LaurentPoly {
        let k = 2 * self.n() - 1;
        LaurentPoly::from_int_terms(&[(k, 1), (-k, 1)])
    }

    /// (q^{n-1} - q^{1-n})²
    pub fn swap(&self) -> LaurentPoly {
        let k = self.n() - 1;
        LaurentPoly::from_int_terms(&[(k, 1), (-k, -1)]).pow(2)
    }

    /// R_TWIST(q) = 2q² - q^{-2(n-2)} + q^{-2(n-1)}
    pub fn twist(&self) -> LaurentPoly {
        let n = self.n();
        LaurentPoly::from_int_terms(&[(2, 2), (-2 * (n - 2), -1), (-2 * (n - 1), 1)])
    }

    /// R_STICK(q) = q^{2n} - q^{2(n-1)} + 2
    pub fn stick(&self) -> LaurentPoly {
        let n = self.n();
        LaurentPoly::from_int_terms(&[(2 * n, 1), (2 * (n - 1), -1), (0, 2)])
    }

    fn qd(&self, sign: i32) -> LaurentPoly {
        LaurentPoly::q_pow(2 * sign * self.delta as i32)
    }

    /// Moves of a nearest-neighbour pair `(a, b)` = (site x, site x+1).
    pub fn local_moves(&self, a: Site, b: Site) -> Vec<((Site, Site), LaurentPoly)> {
        use Site::*;
        let q = LaurentPoly::q_pow;
        let sp = self.speed();
        match (a.count() + b.count(), a, b) {
            (1, _, Empty) => vec![((Empty, a), &q(-1) * &sp)],
            (1, Empty, _) => vec![((b, Empty), &q(1) * &sp)],
            (3, Both, c) => vec![((c, Both), &q(-1) * &sp)],
            (3, c, Both) => vec![((Both, c), &q(1) * &sp)],
            (2, Both, Empty) => {
                let tw = self.twist().invert_q();
                vec![
                    ((Empty, Both), &q(-2) * &self.swap()),
                    ((Second, First), &self.qd(-1) * &tw),
                    ((First, Second), tw),
                ]
            }
            (2, Empty, Both) => {
                let tw = self.twist();
                vec![
                    ((Both, Empty), &q(2) * &self.swap()),
                    ((Second, First), tw.clone()),
                    ((First, Second), &self.qd(1) * &tw),
                ]
            }
            (2, First, Second) => vec![
                ((Second, First), self.swap()),
                ((Empty, Both), &self.qd(1) * &self.stick().invert_q()),
                ((Both, Empty), self.stick()),
            ],
            (2, Second, First) => vec![
                ((First, Second), self.swap()),
                ((Empty, Both), self.stick().invert_q()),
                ((Both, Empty), &self.qd(-1) * &self.stick()),
            ],
            _ => Vec::new(),
        }
    }

    fn rule_table(&self) -> Vec<Vec<((Site, Site), LaurentPoly)>> {
        (0..16)
            .map(|k| self.local_moves(Site::from_code(k / 4), Site::from_code(k % 4)))
            .collect()
    }
}

impl fmt::Display for RateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.delta)
    }
}

fn moves_from<'a, T: Clone>(
    table: &'a [Vec<((Site, Site), T)>],
    eta: &'a Configuration,
) -> impl Iterator<Item = (Configuration, &'a T)> + 'a {
    (0..eta.sites().saturating_sub(1)).flat_map(move |x| {
        let k = eta.0[x].code() * 4 + eta.0[x + 1].code();
        table[k].iter().map(move |((a, b), r)| {
            let mut next = eta.clone();
            next.0[x] = *a;
            next.0[x + 1] = *b;
            (next, r)
        })
    })
}

/// All transitions out of `eta` with their rates, summed over bonds.
pub fn transitions(rates: &RateTable, eta: &Configuration) -> Vec<(Configuration, LaurentPoly)> {
    let table = rates.rule_table();
    moves_from(&table, eta).map(|(c, r)| (c, r.clone())).collect()
}

/// Generator on all 4^N configurations; rows index the current state.
pub fn build_generator(rates: &RateTable, sites: usize) -> Result<Matrix<LaurentPoly>, AsepError> {
    if sites < 2 {
        return Err(AsepError::Sites { min: 2, got: sites });
    }
    let table = rates.rule_table();
    let dim = 4usize.pow(sites as u32);
    let mut l = Matrix::zeros(dim, dim);
    for eta in Configuration::all(sites) {
        let i = eta.index();
        let mut out = LaurentPoly::zero();
        for (xi, r) in moves_from(&table, &eta) {
            let j = xi.index();
            l[(i, j)] = &l[(i, j)] + r;
            out = &out + r;
        }
        l[(i, i)] = -out;
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualityKind {
    /// A_2 preserved, A_1 a subset.
    ClassPreserving,
    /// Both classes subsets.
    SubsetBoth,
}

impl FromStr for DualityKind {
    type Err = AsepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "class-preserving" | "cp" => Ok(Self::ClassPreserving),
            "subset-both" | "sb" => Ok(Self::SubsetBoth),
            _ => Err(AsepError::Parse(s.to_string())),
        }
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Exponent of the monomial D(η, ξ), or `None` where the indicator vanishes.
pub fn duality_exponent(kind: DualityKind, eta: &Configuration, xi: &Configuration) -> Option<i32> {
    let (a1e, a2e) = (eta.positions(1), eta.positions(2));
    let (a1x, a2x) = (xi.positions(1), xi.positions(2));
    let second_ok = match kind {
        DualityKind::ClassPreserving => a2x == a2e,
        DualityKind::SubsetBoth => is_subset(&a2x, &a2e),
    };
    if !second_ok || !is_subset(&a1x, &a1e) {
        return None;
    }
    let mut e = 0i32;
    for &x in &a1x {
        e += 2 * x as i32 - 2 * eta.count_left(1, x) as i32;
    }
    for &x in &a2x {
        e += 2 * x as i32;
        if kind == DualityKind::SubsetBoth {
            e -= 2 * eta.count_left(2, x) as i32;
        }
    }
    Some(e)
}

/// Closed-form duality matrix D(η, ξ), rows η and columns ξ.
pub fn duality_matrix(kind: DualityKind, sites: usize) -> Matrix<LaurentPoly> {
    let dim = 4usize.pow(sites as u32);
    Matrix::from_fn(dim, dim, |i, j| {
        duality_exponent(kind, &Configuration::from_index(i, sites), &Configuration::from_index(j, sites))
            .map_or_else(LaurentPoly::zero, LaurentPoly::q_pow)
    })
}

/// Outcome of L·D = D·Lᵀ.
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub holds: bool,
    pub violations: Vec<(Configuration, Configuration)>,
    /// Evaluation points used, empty for a symbolic check.
    pub points: Vec<String>,
}

impl DualityReport {
    pub fn violates(&self, eta: &Configuration, xi: &Configuration) -> bool {
        self.violations.iter().any(|(a, b)| a == eta && b == xi)
    }
}

fn differing<T: Ring>(a: &Matrix<T>, b: &Matrix<T>, sites: usize) -> Vec<(Configuration, Configuration)> {
    let mut out = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)] != b[(i, j)] {
                out.push((Configuration::from_index(i, sites), Configuration::from_index(j, sites)));
            }
        }
    }
    out
}

/// Nonzero (column, value) pairs of each row.
fn sparse_rows<T: Ring>(m: &Matrix<T>) -> Vec<Vec<(usize, &T)>> {
    let mut rows = vec![Vec::new(); m.rows()];
    for (i, j, x) in m.nonzeros() {
        rows[i].push((j, x));
    }
    rows
}

/// a·b with both factors sparse, as `a.matmul(b)` but without the dense cube.
fn sparse_product<T: Ring>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, AsepError> {
    if a.cols() != b.rows() {
        return Err(ExactError::Dimension(format!("{}x{} · {}x{}", a.rows(), a.cols(), b.rows(), b.cols())).into());
    }
    let (ra, rb) = (sparse_rows(a), sparse_rows(b));
    let rows: Vec<Vec<T>> = ra
        .par_iter()
        .map(|row| {
            let mut acc = vec![T::zero(); b.cols()];
            for &(k, x) in row {
                for &(j, y) in &rb[k] {
                    acc[j] = acc[j].plus(&x.times(y));
                }
            }
            acc
        })
        .collect();
    Ok(Matrix::from_rows(rows)?)
}

/// Exact test of L·D = D·Lᵀ over any ring, reporting every violating (η, ξ).
pub fn check_duality<T: Ring>(l: &Matrix<T>, d: &Matrix<T>, sites: usize) -> Result<DualityReport, AsepError> {
    let ld = sparse_product(l, d)?;
    let dlt = sparse_product(d, &l.transpose())?;
    let violations = differing(&ld, &dlt, sites);
    Ok(DualityReport {
        holds: violations.is_empty(),
        violations,
        points: Vec::new(),
    })
}

/// Degree bound on the entries of L·D − D·Lᵀ, tracked in the hull ring.
pub fn duality_degree_bound(l: &Matrix<LaurentPoly>, d: &Matrix<LaurentPoly>) -> Result<u32, AsepError> {
    let lh = l.map(ExponentHull::of);
    let dh = d.map(ExponentHull::of);
    let a = sparse_product(&lh, &dh)?;
    let b = sparse_product(&dh, &lh.transpose())?;
    Ok(a.try_add(&b)?.nonzeros().map(|(_, _, h)| h.span()).max().unwrap_or(0))
}

/// L·D = D·Lᵀ at `max(min_points, bound + 1)` rational points; agreement at
/// more points than the degree bound proves the Laurent identity.
pub fn check_duality_at_points(
    l: &Matrix<LaurentPoly>,
    d: &Matrix<LaurentPoly>,
    sites: usize,
    min_points: usize,
) -> Result<DualityReport, AsepError> {
    let bound = duality_degree_bound(l, d)? as usize;
    let pts = sample_points(min_points.max(bound + 1));
    let mut violations = Vec::new();
    for p in &pts {
        let le = l.try_map(|x| x.evaluate(p))?;
        let de = d.try_map(|x| x.evaluate(p))?;
        let r = check_duality(&le, &de, sites)?;
        for v in r.violations {
            if !violations.contains(&v) {
                violations.push(v);
            }
        }
    }
    Ok(DualityReport {
        holds: violations.is_empty(),
        violations,
        points: pts.iter().map(rational_to_string).collect(),
    })
}

/// G²(η) = q^{-2ΣA_1 - 2ΣA_2}.
pub fn reversible_measure(eta: &Configuration) -> LaurentPoly {
    let s: usize = eta.positions(1).iter().chain(&eta.positions(2)).sum();
    LaurentPoly::q_pow(-2 * s as i32)
}

/// Pairs violating G²(η)L(η,η′) = G²(η′)L(η′,η).
pub fn detailed_balance_violations(l: &Matrix<LaurentPoly>, sites: usize) -> Vec<(Configuration, Configuration)> {
    let g: Vec<LaurentPoly> = Configuration::all(sites).map(|c| reversible_measure(&c)).collect();
    let mut out = Vec::new();
    for (i, j, lij) in l.nonzeros() {
        let pair = (i.min(j), i.max(j));
        if i != j && &g[i] * lij != &g[j] * &l[(j, i)] && !out.contains(&pair) {
            out.push(pair);
        }
    }
    out.into_iter()
        .map(|(i, j)| (Configuration::from_index(i, sites), Configuration::from_index(j, sites)))
        .collect()
}

/// Transitions that change (|A_1|, |A_2|).
pub fn charge_violations(l: &Matrix<LaurentPoly>, sites: usize) -> usize {
    l.nonzeros()
        .filter(|(i, j, _)| {
            Configuration::from_index(*i, sites).charges() != Configuration::from_index(*j, sites).charges()
        })
        .count()
}

/// With no second-class particles the process is the single-species ASEP
/// with right rate q^{-1}R_speed and left rate qR_speed.
pub fn single_species_reduction(rates: &RateTable, sites: usize) -> Result<bool, AsepError> {
    let l = build_generator(rates, sites)?;
    let right = &LaurentPoly::q_pow(-1) * &rates.speed();
    let left = &LaurentPoly::q_pow(1) * &rates.speed();
    for eta in Configuration::all(sites).filter(|c| c.0.iter().all(|s| matches!(s, Site::Empty | Site::First))) {
        let mut expect: HashMap<usize, LaurentPoly> = HashMap::new();
        for x in 0..sites - 1 {
            let (a, b) = (eta.0[x], eta.0[x + 1]);
            let (r, swapped) = match (a, b) {
                (Site::First, Site::Empty) => (&right, true),
                (Site::Empty, Site::First) => (&left, true),
                _ => (&right, false),
            };
            if swapped {
                let mut xi = eta.clone();
                xi.0.swap(x, x + 1);
                expect.insert(xi.index(), r.clone());
            }
        }
        let i = eta.index();
        for j in 0..l.cols() {
            if i == j {
                continue;
            }
            let want = expect.get(&j).cloned().unwrap_or_else(LaurentPoly::zero);
            if l[(i, j)] != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct RateIdentity {
    pub name: &'static str,
    pub lhs: LaurentPoly,
    pub rhs: LaurentPoly,
    pub holds: bool,
}

/// The three rate identities behind the worked duality examples.
pub fn rate_identities(rates: &RateTable) -> Vec<RateIdentity> {
    let q = LaurentPoly::q_pow;
    let sp = rates.speed();
    let cases = [
        (
            "q^-1 R_speed = R_SWAP + R_STICK(q^-1)",
            &q(-1) * &sp,
            &rates.swap() + &rates.stick().invert_q(),
        ),
        (
            "q R_speed = R_TWIST(q) + q^2 R_SWAP",
            &q(1) * &sp,
            &rates.twist() + &(&q(2) * &rates.swap()),
        ),
        (
            "q^2 R_TWIST(q^-1) = R_STICK(q)",
            &q(2) * &rates.twist().invert_q(),
            rates.stick(),
        ),
    ];
    cases
        .into_iter()
        .map(|(name, lhs, rhs)| RateIdentity {
            name,
            holds: lhs == rhs,
            lhs,
            rhs,
        })
        .collect()
}

/// Piecewise-constant path: the state entered at each jump time.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub start: Configuration,
    pub jumps: Vec<(f64, Configuration)>,
    pub end_time: f64,
}

impl Trajectory {
    /// Fraction of [0, end_time] spent in each configuration.
    pub fn occupation(&self) -> HashMap<Configuration, f64> {
        let mut occ: HashMap<Configuration, f64> = HashMap::new();
        let mut t = 0.0;
        let mut cur = &self.start;
        for (tj, c) in &self.jumps {
            *occ.entry(cur.clone()).or_default() += tj - t;
            t = *tj;
            cur = c;
        }
        *occ.entry(cur.clone()).or_default() += self.end_time - t;
        if self.end_time > 0.0 {
            for v in occ.values_mut() {
                *v /= self.end_time;
            }
        }
        occ
    }

    /// CSV lines: time, then one base-4 digit per site.
    pub fn to_csv(&self) -> String {
        let digits = |c: &Configuration| c.0.iter().map(|s| s.code().to_string()).collect::<Vec<_>>().join(",");
        let header: Vec<String> = (1..=self.start.sites()).map(|x| format!("s{x}")).collect();
        let mut out = format!("time,{}\n0,{}\n", header.join(","), digits(&self.start));
        for (t, c) in &self.jumps {
            out.push_str(&format!("{t},{}\n", digits(c)));
        }
        out
    }
}

/// When to stop a simulation: whichever bound is hit first.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    pub t_max: f64,
    pub max_jumps: usize,
}

/// Jump-chain sampler with exponential holding times, rates evaluated at `q0`.
pub fn simulate(
    rates: &RateTable,
    start: &Configuration,
    q0: &BigRational,
    stop: StopRule,
    seed: u64,
) -> Result<Trajectory, AsepError> {
    if *q0 <= BigRational::from_integer(0.into()) {
        return Err(AsepError::NonPositive);
    }
    let table: Vec<Vec<((Site, Site), f64)>> = rates
        .rule_table()
        .into_iter()
        .map(|moves| {
            moves
                .into_iter()
                .map(|(m, r)| Ok((m, r.evaluate(q0)?.to_f64().unwrap_or(f64::NAN))))
                .collect::<Result<Vec<_>, ExactError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut t = 0.0;
    let mut jumps = Vec::new();
    while jumps.len() < stop.max_jumps {
        let mut out: Vec<(Configuration, f64)> = moves_from(&table, &cur).map(|(c, r)| (c, *r)).collect();
        let total: f64 = out.iter().map(|(_, r)| r).sum();
        if total <= 0.0 {
            break;
        }
        let hold = -(1.0 - rng.gen::<f64>()).ln() / total;
        if t + hold > stop.t_max {
            break;
        }
        t += hold;
        let mut pick = rng.gen::<f64>() * total;
        let mut next = out.len() - 1;
        for (k, (_, r)) in out.iter().enumerate() {
            if pick < *r {
                next = k;
                break;
            }
            pick -= r;
        }
        cur = out.swap_remove(next).0;
        jumps.push((t, cur.clone()));
    }
    let end_time = if jumps.len() >= stop.max_jumps { t } else { stop.t_max.max(t) };
    Ok(Trajectory {
        start: start.clone(),
        jumps,
        end_time,
    })
}

/// Normalized G² on the charge sector of `start`, at `q0`.
pub fn sector_measure(start: &Configuration, q0: &BigRational) -> Result<HashMap<Configuration, f64>, AsepError> {
    let sector: Vec<(Configuration, BigRational)> = Configuration::all(start.sites())
        .filter(|c| c.charges() == start.charges())
        .map(|c| {
            let w = reversible_measure(&c).evaluate(q0)?;
            Ok((c, w))
        })
        .collect::<Result<_, ExactError>>()?;
    let z: BigRational = sector.iter().map(|(_, w)| w.clone()).fold(BigRational::from_integer(0.into()), |a, b| a + b);
    Ok(sector
        .into_iter()
        .map(|(c, w)| (c, (w / &z).to_f64().unwrap_or(f64::NAN)))
        .collect())
}

/// Total-variation distance between two distributions on configurations.
pub fn total_variation(a: &HashMap<Configuration, f64>, b: &HashMap<Configuration, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&Configuration> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Generator with every entry evaluated at `q0`.
pub fn generator_at(rates: &RateTable, sites: usize, q0: &BigRational) -> Result<Matrix<BigRational>, AsepError> {
    Ok(build_generator(rates, sites)?.try_map(|x| x.evaluate(q0))?)
}

/// Whether all off-diagonal entries are positive at `q0`.
pub fn nonnegative_at(l: &Matrix<LaurentPoly>, q0: &BigRational) -> Result<bool, AsepError> {
    let zero = BigRational::from_integer(0.into());
    for (i, j, x) in l.nonzeros() {
        if i != j && x.evaluate(q0)? < zero {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    fn lp(pairs: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(pairs)
    }

    #[test]
    fn config_roundtrip() {
        let eta = c("[12;∅;1]");
        assert_eq!(eta.index(), 3 * 16 + 1);
        assert_eq!(Configuration::from_index(eta.index(), 3), eta);
        assert_eq!(eta.to_string(), "[12;∅;1]");
        assert_eq!(eta.count_left(1, 3), 1);
    }

    #[test]
    fn rate_expansions() {
        let r2 = RateTable::new(2, 0).unwrap();
        assert_eq!(r2.swap(), lp(&[(2, 1), (0, -2), (-2, 1)]));
        let ids = rate_identities(&r2);
        assert_eq!(ids[0].lhs, lp(&[(2, 1), (-4, 1)]));
        let r3 = RateTable::new(3, 0).unwrap();
        assert_eq!(rate_identities(&r3)[1].lhs, lp(&[(6, 1), (-4, 1)]));
        for n in 2..=5 {
            assert!(rate_identities(&RateTable::new(n, 1).unwrap()).iter().all(|r| r.holds));
        }
    }

    #[test]
    fn example_entries() {
        let rates = RateTable::new(3, 1).unwrap();
        let l = build_generator(&rates, 2).unwrap();
        let at = |a: &str, b: &str| l[(c(a).index(), c(b).index())].clone();
        assert_eq!(at("[12;1]", "[1;12]"), &LaurentPoly::q_pow(-1) * &rates.speed());
        assert_eq!(at("[2;1]", "[12;∅]"), &LaurentPoly::q_pow(-2) * &rates.stick());
        assert_eq!(at("[∅;12]", "[2;1]"), rates.twist());
        let d = duality_matrix(DualityKind::ClassPreserving, 2);
        assert_eq!(d[(c("[12;1]").index(), c("[2;1]").index())], LaurentPoly::q_pow(4));
        let d2 = duality_matrix(DualityKind::SubsetBoth, 2);
        assert_eq!(d2[(c("[2;12]").index(), c("[2;1]").index())], LaurentPoly::q_pow(6));
        assert!(d2[(c("[12;2]").index(), c("[2;1]").index())].is_zero());
        assert!(d[(c("[1;12]").index(), c("[2;1]").index())].is_zero());
        assert!(d2.column(0).iter().all(|x| x.is_one()));
        for (i, x) in d.column(0).iter().enumerate() {
            assert_eq!(x.is_one(), Configuration::from_index(i, 2).positions(2).is_empty());
        }
    }

    #[test]
    fn duality_and_negative_control() {
        let sites = 2;
        let good = build_generator(&RateTable::new(3, 1).unwrap(), sites).unwrap();
        let d = duality_matrix(DualityKind::ClassPreserving, sites);
        assert!(check_duality(&good, &d, sites).unwrap().holds);
        let l0 = build_generator(&RateTable::new(3, 0).unwrap(), sites).unwrap();
        assert!(check_duality(&l0, &duality_matrix(DualityKind::SubsetBoth, sites), sites).unwrap().holds);
        let bad = build_generator(&RateTable::new(2, 1).unwrap(), sites).unwrap();
        let r = check_duality(&bad, &duality_matrix(DualityKind::SubsetBoth, sites), sites).unwrap();
        assert!(!r.holds);
        assert!(r.violates(&c("[12;2]"), &c("[2;1]")));
    }

    #[test]
    fn detailed_balance_and_charges() {
        for (n, d) in [(3, 0), (3, 1), (4, 0), (4, 1), (4, 2)] {
            let l = build_generator(&RateTable::new(n, d).unwrap(), 2).unwrap();
            assert!(detailed_balance_violations(&l, 2).is_empty());
            assert_eq!(charge_violations(&l, 2), 0);
        }
        assert!(single_species_reduction(&RateTable::new(3, 1).unwrap(), 3).unwrap());
    }

    #[test]
    fn seeded_runs_repeat() {
        let rates = RateTable::new(3, 1).unwrap();
        let stop = StopRule { t_max: 5.0, max_jumps: 200 };
        let q0 = crate::exactq::rational(1, 2);
        let a = simulate(&rates, &c("[12;12]"), &q0, stop, 7).unwrap();
        let b = simulate(&rates, &c("[12;12]"), &q0, stop, 7).unwrap();
        assert_eq!(a, b);
        // two pairs on two sites cannot move
        assert!(a.jumps.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rows_sum_to_zero(n in 2u32..6, d in 0u32..3, idx in 0usize..64) {
            let rates = RateTable::new(n, d).unwrap();
            let eta = Configuration::from_index(idx, 3);
            let total = transitions(&rates, &eta).into_iter().fold(LaurentPoly::zero(), |a, (_, r)| &a + &r);
            let l = build_generator(&rates, 3).unwrap();
            prop_assert_eq!(-l[(idx, idx)].clone(), total);
        }

        #[test]
        fn measure_symmetric_under_class_swap(idx in 0usize..256) {
            let eta = Configuration::from_index(idx, 4);
            let swapped = Configuration(eta.0.iter().map(|s| match s {
                Site::First => Site::Second,
                Site::Second => Site::First,
                o => *o,
            }).collect());
            prop_assert_eq!(reversible_measure(&eta), reversible_measure(&swapped));
        }
    }
}
