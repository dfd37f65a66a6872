//! Verification suites behind the command line, with JSON reports.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asep::{
    build_generator, check_duality, check_duality_at_points, charge_violations, detailed_balance_violations,
    duality_matrix, rate_identities, Configuration, DualityKind, RateTable,
};
use crate::central::{assemble_central, realize, realize_at, realize_hull, scalar_of, verify_central, verify_central_in};
use crate::classical::{
    choice_census, classify, census, expand, generator, golden_mismatches, is_markov_generator, match_classical,
    parallel_ssep, RationalRows,
};
use crate::exactq::{rational_to_string, sample_points, ExponentHull, LaurentPoly, RationalFunction, Ring};
use crate::hamiltonian::{
    cases, golden_check, golden_check_at_points, labeled_generator, labeled_ground_state, match_hamiltonian_generator,
    ratio_law_sweep, shift_and_decompose, symmetry_duality, symmetry_report, two_site_displays, two_site_hamiltonian,
};
use crate::pairing::{biorthogonal, dual_element};
use crate::qgroup::{Fundamental, Generator, Word};

/// The so_4 generator as printed, shipped with the crate.
pub const SO4_GOLDEN: &str = include_str!("../testdata/so4.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub millis: u128,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub mode: Mode,
    pub threads: usize,
    pub checks: Vec<Check>,
}

type Outcome = Result<(bool, Value), String>;

impl VerificationReport {
    pub fn new(suite: impl Into<String>, mode: Mode) -> Self {
        VerificationReport { suite: suite.into(), mode, threads: rayon::current_num_threads(), checks: Vec::new() }
    }

    /// Informational checks never fail the suite.
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    fn run(&mut self, name: impl Into<String>, informational: bool, f: impl FnOnce() -> Outcome) {
        let t = Instant::now();
        let (status, detail) = match f() {
            Ok((_, d)) if informational => (Status::Info, d),
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (if informational { Status::Info } else { Status::Fail }, json!({ "error": e })),
        };
        self.checks.push(Check { name: name.into(), status, millis: t.elapsed().as_millis(), detail });
    }

    pub fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        self.run(name, false, f);
    }

    pub fn info(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        self.run(name, true, f);
    }

    pub fn absorb(&mut self, other: VerificationReport) {
        let prefix = other.suite;
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        }));
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Accepts "1/2", "3" or a decimal such as "0.7".
pub fn parse_q(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let q = if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|e| format!("{s}: {e}"))?;
        BigRational::new(num, BigInt::from(10).pow(frac.len() as u32))
    } else {
        crate::exactq::parse_rational(s)?
    };
    if q <= BigRational::from_integer(0.into()) {
        return Err(format!("{s}: q must be positive"));
    }
    Ok(q)
}

fn printed_scalar(n: usize) -> Option<LaurentPoly> {
    match n {
        3 => Some(LaurentPoly::from_int_terms(&[(6, 1), (2, 1), (0, 2), (-2, 1), (-6, 1)])),
        4 => Some(LaurentPoly::from_int_terms(&[(8, 1), (4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1), (-8, 1)])),
        _ => None,
    }
}

/// Centrality on one and two sites and the scalar on one site. Quick mode
/// evaluates n ≥ 4 at more points than the tracked degree span.
pub fn central_suite(n: usize, mode: Mode) -> VerificationReport {
    let mut r = VerificationReport::new(format!("central-n{n}"), mode);
    let plan = match assemble_central(n) {
        Ok(p) => p,
        Err(e) => {
            r.check("assemble", || Err(err(e)));
            return r;
        }
    };
    r.check("scalar", || {
        let s = scalar_of(&realize(&plan, 1).map_err(err)?);
        Ok((s.is_some(), json!({ "scalar": s.map(|x| x.to_string()) })))
    });
    if let Some(p) = printed_scalar(n) {
        r.info("printed-scalar", || {
            let s = scalar_of(&realize(&plan, 1).map_err(err)?);
            let same = s.as_ref().and_then(|x| x.as_laurent()) == Some(&p);
            Ok((same, json!({ "printed": p.to_string(), "agrees": same })))
        });
    }
    if mode == Mode::Full || n <= 3 {
        r.check("centrality", || {
            let rep = verify_central(&plan).map_err(err)?;
            Ok((rep.is_central(), json!({ "checked": rep.checked.len(), "failures": rep.failures })))
        });
    } else {
        r.check("centrality-at-points", || {
            let gen_span = generator_span(n).map_err(err)?;
            let bound = (1..=2)
                .map(|s| realize_hull(&plan, s).map(|h| global_span(&h)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .max()
                .unwrap_or(0)
                + gen_span;
            let pts = sample_points(12.max(bound as usize + 1));
            let mut failures = Vec::new();
            for p in &pts {
                let rep = Fundamental::new(n, p.clone()).map_err(err)?;
                let cs = (1..=2)
                    .map(|s| realize_at(&plan, s, p).map(|m| (s, m)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                if !verify_central_in(&cs, &rep).map_err(err)?.is_central() {
                    failures.push(rational_to_string(p));
                }
            }
            Ok((
                failures.is_empty(),
                json!({ "degree_bound": bound, "points": pts.len(), "failures": failures }),
            ))
        });
    }
    r
}

/// Degree span of every E, F, K image on one and two sites.
fn generator_span(n: usize) -> Result<u32, crate::qgroup::QGroupError> {
    let rep = Fundamental::new(n, RationalFunction::q())?;
    let mut hull = ExponentHull(None);
    for sites in 1..=2 {
        for i in 1..=n {
            for g in [Generator::e(i), Generator::f(i), Generator::k(i)] {
                for (_, _, x) in rep.coproduct(g, sites)?.nonzeros() {
                    let p = x.as_laurent().cloned().unwrap_or_else(|| x.numer().clone());
                    hull = hull.plus(&ExponentHull::of(&p));
                }
            }
        }
    }
    Ok(hull.span())
}

fn global_span(h: &crate::exactq::Matrix<ExponentHull>) -> u32 {
    h.nonzeros().fold(ExponentHull(None), |a, (_, _, x)| a.plus(x)).span()
}

/// Dual of one word, plus biorthogonality on the word's multiset.
pub fn pairing_suite(n: usize, word: &Word) -> VerificationReport {
    let mut r = VerificationReport::new(format!("pairing-n{n}"), Mode::Full);
    r.check("dual", || {
        let d = dual_element(word, n).map_err(err)?;
        Ok((true, json!({ "word": word.to_string(), "dual": d.to_string() })))
    });
    r.check("biorthogonal", || {
        let mut ms = word.indices();
        ms.sort_unstable();
        Ok((biorthogonal(&ms, n).map_err(err)?, json!({ "multiset": ms })))
    });
    r
}

/// E₂E₃ at n = 4 has dual (q - q^{-1})(qF₂F₃ - F₃F₂).
pub fn pairing_golden() -> Result<bool, String> {
    let d = dual_element(&Word::of(crate::qgroup::GenKind::E, &[2, 3]), 4).map_err(err)?;
    let r = RationalFunction::from(LaurentPoly::from_int_terms(&[(1, 1), (-1, -1)]));
    let want = vec![
        (&r * &RationalFunction::q(), crate::pairing::IndexWord(vec![2, 3])),
        (-&r, crate::pairing::IndexWord(vec![3, 2])),
    ];
    let mut got = d.terms.clone();
    got.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(got == want)
}

/// Golden blocks, kernels, derived generators, rate-table matching and the
/// symmetry duality. n = 4 in quick mode runs only the evaluation-point check.
pub fn hamiltonian_suite(n: usize, mode: Mode) -> VerificationReport {
    let mut r = VerificationReport::new(format!("hamiltonian-n{n}"), mode);
    if n == 4 && mode == Mode::Quick {
        r.check("golden-at-points", || {
            let plan = assemble_central(4).map_err(err)?;
            let q = golden_check_at_points(&plan, 12).map_err(err)?;
            Ok((q.passes(), serde_json::to_value(&q).map_err(err)?))
        });
        return r;
    }
    let h = match two_site_hamiltonian(n) {
        Ok(h) => h,
        Err(e) => {
            r.check("hamiltonian", || Err(err(e)));
            return r;
        }
    };
    r.check("golden", || {
        let g = golden_check(n, &h, &|p: &LaurentPoly| Ok(RationalFunction::from(p.clone()))).map_err(err)?;
        Ok((g.passes(), serde_json::to_value(&g).map_err(err)?))
    });
    let Ok((_, dec, shifted)) = shift_and_decompose(&h) else {
        r.check("decompose", || Err("no shift constant".into()));
        return r;
    };
    r.info("blocks", || Ok((true, json!({ "blocks": dec.blocks }))));
    for case in cases().into_iter().filter(|c| c.n == n) {
        r.check(format!("{}-generator", case.name), || {
            let g = labeled_ground_state(&shifted, &dec, &case).map_err(err)?;
            let l = labeled_generator(&shifted, &g, &case).map_err(err)?;
            let m = match_hamiltonian_generator(&l, &case).map_err(err)?;
            let dsym = symmetry_duality(&case, &g).map_err(err)?;
            let s = symmetry_report(&case, &l, &dsym).map_err(err)?;
            let ok = m.matching_rates.len() == 1 && s.support_matches && s.self_dual && s.ratio_is_charge_function;
            Ok((
                ok,
                json!({
                    "printed_label": m.printed_label,
                    "rate_table": m.matching_rates,
                    "mismatches_at_printed_label": m.mismatches_at_printed.len(),
                    "symmetry": s,
                }),
            ))
        });
    }
    if n == 3 {
        r.check("displays", || {
            let d = two_site_displays().map_err(err)?;
            let so6: Vec<_> = d.iter().filter(|x| x.name.starts_with("so6")).collect();
            Ok((so6.iter().all(|x| x.holds), serde_json::to_value(&d).map_err(err)?))
        });
        for case in cases().into_iter().filter(|c| c.n == 3) {
            r.check(format!("{}-ratio-law-N3", case.name), || {
                let s = ratio_law_sweep(&case, 3).map_err(err)?;
                Ok((s.holds(), serde_json::to_value(&s).map_err(err)?))
            });
        }
    }
    if n == 4 && mode == Mode::Full {
        r.info("so8-third-ratio-law-N3", || {
            let case = cases().into_iter().find(|c| c.name == "so8-third").expect("case");
            let s = ratio_law_sweep(&case, 3).map_err(err)?;
            Ok((s.holds(), serde_json::to_value(&s).map_err(err)?))
        });
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsepCheck {
    Duality,
    Reversibility,
    Charges,
    Identities,
}

impl FromStr for AsepCheck {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "duality" => Ok(AsepCheck::Duality),
            "reversibility" | "balance" => Ok(AsepCheck::Reversibility),
            "charges" => Ok(AsepCheck::Charges),
            "identities" => Ok(AsepCheck::Identities),
            _ => Err(format!("unknown check {s}")),
        }
    }
}

/// Default duality for a parameter pair: subset-both at δ = 0, class-preserving otherwise.
pub fn default_kind(delta: u32) -> DualityKind {
    if delta == 0 {
        DualityKind::SubsetBoth
    } else {
        DualityKind::ClassPreserving
    }
}

/// Exact checks on the generator. Duality is symbolic up to 3 sites and at
/// evaluation points beyond; `q` adds a positivity check of the rates.
pub fn asep_suite(
    rates: RateTable,
    sites: usize,
    checks: &[AsepCheck],
    kind: Option<DualityKind>,
    q: Option<&BigRational>,
) -> VerificationReport {
    let mut r = VerificationReport::new(format!("asep-n{}-d{}-N{sites}", rates.n, rates.delta), Mode::Full);
    let l = match build_generator(&rates, sites) {
        Ok(l) => l,
        Err(e) => {
            r.check("generator", || Err(err(e)));
            return r;
        }
    };
    if let Some(q0) = q {
        r.check("rates-positive", || {
            let ok = crate::asep::nonnegative_at(&l, q0).map_err(err)?;
            Ok((ok, json!({ "q": rational_to_string(q0) })))
        });
    }
    for c in checks {
        match c {
            AsepCheck::Duality => {
                let kind = kind.unwrap_or(default_kind(rates.delta));
                r.check(format!("duality-{}", serde_json::to_value(kind).unwrap_or_default().as_str().unwrap_or("")), || {
                    let d = duality_matrix(kind, sites);
                    let rep = if sites <= 3 {
                        check_duality(&l, &d, sites)
                    } else {
                        check_duality_at_points(&l, &d, sites, 12)
                    }
                    .map_err(err)?;
                    let witnesses: Vec<_> = rep.violations.iter().take(5).collect();
                    Ok((rep.holds, json!({ "violations": rep.violations.len(), "witnesses": witnesses, "points": rep.points.len() })))
                });
            }
            AsepCheck::Reversibility => r.check("reversibility", || {
                let v = detailed_balance_violations(&l, sites);
                Ok((v.is_empty(), json!({ "violations": v })))
            }),
            AsepCheck::Charges => r.check("charges", || {
                let v = charge_violations(&l, sites);
                Ok((v == 0, json!({ "violations": v })))
            }),
            AsepCheck::Identities => r.check("rate-identities", || {
                let ids = rate_identities(&rates);
                Ok((ids.iter().all(|i| i.holds), serde_json::to_value(&ids).map_err(err)?))
            }),
        }
    }
    r
}

/// Which (n, δ, kind) satisfy the duality on `sites` sites. Never a gate.
pub fn asep_explore(sites: usize) -> VerificationReport {
    let mut r = VerificationReport::new(format!("asep-explore-N{sites}"), Mode::Full);
    for n in 2..=5 {
        for delta in 0..=3 {
            for kind in [DualityKind::ClassPreserving, DualityKind::SubsetBoth] {
                r.info(format!("n{n}-d{delta}-{kind:?}"), || {
                    let rates = RateTable::new(n, delta).map_err(err)?;
                    let l = build_generator(&rates, sites).map_err(err)?;
                    let rep = check_duality(&l, &duality_matrix(kind, sites), sites).map_err(err)?;
                    Ok((rep.holds, json!({ "holds": rep.holds, "violations": rep.violations.len() })))
                });
            }
        }
    }
    r
}

/// G_n against a golden file (if given), class census, and the Parallel SSEP bijection.
pub fn classical_suite(n: u32, golden: Option<&str>) -> VerificationReport {
    let mut r = VerificationReport::new(format!("classical-n{n}"), Mode::Full);
    let g = match generator(n) {
        Ok(g) => g,
        Err(e) => {
            r.check("generator", || Err(err(e)));
            return r;
        }
    };
    if let Some(text) = golden {
        r.check("golden", || {
            let rows: RationalRows = serde_json::from_str(text).map_err(err)?;
            let bad = golden_mismatches(&g.matrix, &rows.to_matrix().map_err(err)?);
            Ok((bad.is_empty(), json!({ "mismatches": bad })))
        });
    }
    r.check("classes", || {
        let c = g.census();
        let k = 2 * n as usize;
        let ok = is_markov_generator(&g.matrix)
            && c.absorbing == k
            && c.maximal_choice == k
            && c.pairwise == k * k - 2 * k
            && g.negated_rows == crate::classical::expected_negated_rows(n);
        Ok((ok, json!({ "census": c, "classes": g.classes })))
    });
    r.check("parallel-ssep-bijection", || {
        let p = parallel_ssep(n - 1, 2).map_err(err)?;
        let pi = match_classical(&g.matrix, &p).map_err(err)?;
        Ok((true, json!({ "bijection": pi })))
    });
    r
}

/// Kronecker-sum expansion of G_n to `sites` sites and its choice census.
pub fn expand_suite(n: u32, sites: usize) -> VerificationReport {
    let mut r = VerificationReport::new(format!("classical-expand-n{n}-N{sites}"), Mode::Full);
    r.check("expand", || {
        let g = generator(n).map_err(err)?;
        let l = expand(&g.matrix, sites).map_err(err)?;
        let c = choice_census(&l);
        let k = 2 * n as usize;
        let ok = is_markov_generator(&l) && c.absorbing == k && c.maximal_choice == k;
        Ok((ok, serde_json::to_value(&c).map_err(err)?))
    });
    r
}

/// Classes of an arbitrary generator, for `classical --classify` on the SSEP side.
pub fn ssep_classes(m: u32) -> Result<Value, String> {
    let p = parallel_ssep(m, 2).map_err(err)?;
    let cls = classify(&p).map_err(err)?;
    Ok(json!({ "census": census(&cls) }))
}

/// Every suite; quick mode keeps n = 4 at evaluation points.
pub fn all_suites(mode: Mode) -> VerificationReport {
    let mut r = VerificationReport::new("all", mode);
    for n in [2, 3, 4] {
        r.absorb(central_suite(n, mode));
    }
    r.check("pairing-golden", || Ok((pairing_golden()?, json!({ "word": "E:2,3", "n": 4 }))));
    r.absorb(hamiltonian_suite(3, mode));
    r.absorb(hamiltonian_suite(4, mode));
    let all = [AsepCheck::Duality, AsepCheck::Reversibility, AsepCheck::Charges, AsepCheck::Identities];
    for (n, delta) in [(2, 1), (3, 1), (2, 0), (3, 0)] {
        for sites in [2, 3] {
            if let Ok(rates) = RateTable::new(n, delta) {
                r.absorb(asep_suite(rates, sites, &all, None, None));
            }
        }
    }
    r.check("asep-negative-control", || {
        let rates = RateTable::new(2, 1).map_err(err)?;
        let l = build_generator(&rates, 2).map_err(err)?;
        let rep = check_duality(&l, &duality_matrix(DualityKind::SubsetBoth, 2), 2).map_err(err)?;
        let eta: Configuration = "[12;2]".parse().map_err(err)?;
        let xi: Configuration = "[2;1]".parse().map_err(err)?;
        Ok((!rep.holds && rep.violates(&eta, &xi), json!({ "violations": rep.violations.len() })))
    });
    r.absorb(classical_suite(2, Some(SO4_GOLDEN)));
    r.absorb(classical_suite(3, None));
    r.absorb(expand_suite(2, 3));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_q() {
        assert_eq!(parse_q("0.7").unwrap(), crate::exactq::rational(7, 10));
        assert_eq!(parse_q("1/2").unwrap(), crate::exactq::rational(1, 2));
        assert!(parse_q("-1").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(pairing_golden().unwrap());
        assert!(central_suite(2, Mode::Quick).passes());
        assert!(classical_suite(2, Some(SO4_GOLDEN)).passes());
        let rates = RateTable::new(3, 0).unwrap();
        assert!(asep_suite(rates, 2, &[AsepCheck::Duality], None, None).passes());
    }

    #[test]
    fn informational_never_fails() {
        let mut r = VerificationReport::new("t", Mode::Quick);
        r.info("x", || Ok((false, Value::Null)));
        r.info("y", || Err("boom".into()));
        assert!(r.passes());
        r.check("z", || Ok((false, Value::Null)));
        assert!(!r.passes());
    }
}
