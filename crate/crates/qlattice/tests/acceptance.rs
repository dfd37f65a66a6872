//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero on any FAIL.
//!
//! Runs as its own harness so the lines print in order with timings.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qlattice::asep::{
    build_generator, check_duality, check_duality_at_points, detailed_balance_violations, duality_matrix,
    rate_identities, sector_measure, simulate, total_variation, Configuration, DualityKind, RateTable, StopRule,
};
use qlattice::central::{assemble_central, realize, scalar_of, verify_central};
use qlattice::classical::{
    choice_census, expand, expected_negated_rows, generator, golden_mismatches, is_markov_generator,
    match_classical, parallel_ssep, RationalRows,
};
use qlattice::exactq::{rational, LaurentPoly, RationalFunction};
use qlattice::hamiltonian::{
    cases, golden_check, golden_check_at_points, labeled_generator, labeled_ground_state, match_hamiltonian_generator,
    ratio_law_sweep, shift_and_decompose, two_site_displays, two_site_hamiltonian,
};
use qlattice::pairing::biorthogonal;
use qlattice::suites::{pairing_golden, SO4_GOLDEN};

// Runtime budgets and statistical tolerance.
const CENTRALITY_BUDGET: Duration = Duration::from_secs(60);
const DUALITY_BUDGET: Duration = Duration::from_secs(120);
const SIMULATION_BUDGET: Duration = Duration::from_secs(60);
const MIN_POINTS: usize = 12;
const TV_TOLERANCE: f64 = 0.02;
const SIM_JUMPS: usize = 1_000_000;
const SIM_SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String), String>;

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn embed(p: &LaurentPoly) -> Result<RationalFunction, qlattice::exactq::ExactError> {
    Ok(RationalFunction::from(p.clone()))
}

fn centrality() -> Outcome {
    let t = Instant::now();
    let plan = assemble_central(3).map_err(e)?;
    let rep = verify_central(&plan).map_err(e)?;
    let took = t.elapsed();
    // 9 generators on 1 and 2 sites
    let ok = rep.is_central() && rep.checked.len() == 18 && took < CENTRALITY_BUDGET;
    Ok((ok, format!("{} commutators, {} failures, {:.1?}", rep.checked.len(), rep.failures.len(), took)))
}

fn scalars() -> Outcome {
    let printed = [
        (3, LaurentPoly::from_int_terms(&[(6, 1), (2, 1), (0, 2), (-2, 1), (-6, 1)])),
        (4, LaurentPoly::from_int_terms(&[(8, 1), (4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1), (-8, 1)])),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let plan = assemble_central(n).map_err(e)?;
        match scalar_of(&realize(&plan, 1).map_err(e)?) {
            Some(s) => {
                let agrees = printed.iter().find(|(m, _)| *m == n).map(|(_, p)| s.as_laurent() == Some(p));
                let note = agrees.map_or(String::new(), |a| format!(" (printed agrees: {a})"));
                parts.push(format!("n={n}: {s}{note}"));
            }
            None => {
                ok = false;
                parts.push(format!("n={n}: not scalar"));
            }
        }
    }
    Ok((ok, parts.join("; ")))
}

fn pairing() -> Outcome {
    let golden = pairing_golden()?;
    let mut ok = golden;
    let mut counts = Vec::new();
    for n in [3, 4] {
        let plan = assemble_central(n).map_err(e)?;
        let mut multisets = BTreeSet::new();
        for term in &plan.pairs {
            for w in [&term.e_word, &term.f_word] {
                let mut m = w.indices();
                m.sort_unstable();
                multisets.insert(m);
            }
        }
        for m in &multisets {
            ok &= biorthogonal(m, n).map_err(e)?;
        }
        counts.push(format!("n={n}: {} multisets", multisets.len()));
    }
    Ok((ok, format!("golden dual {golden}; {}", counts.join(", "))))
}

fn so6_golden() -> Outcome {
    let h = two_site_hamiltonian(3).map_err(e)?;
    let g = golden_check(3, &h, &embed).map_err(e)?;
    Ok((g.passes(), format!("kernel dim {}, census {:?}", g.kernel_dim, g.census)))
}

fn so8_golden() -> Outcome {
    let h = two_site_hamiltonian(4).map_err(e)?;
    let g = golden_check(4, &h, &embed).map_err(e)?;
    let plan = assemble_central(4).map_err(e)?;
    let quick = golden_check_at_points(&plan, MIN_POINTS).map_err(e)?;
    let ok = g.passes() && quick.passes() && quick.points.len() >= MIN_POINTS;
    Ok((
        ok,
        format!(
            "symbolic kernel dim {}; {} points over degree bound {}",
            g.kernel_dim,
            quick.points.len(),
            quick.degree_bound
        ),
    ))
}

fn identities() -> Outcome {
    let mut total = 0;
    let mut ok = true;
    for n in 2..=5 {
        for delta in 0..=3 {
            let Ok(rates) = RateTable::new(n, delta) else { continue };
            for id in rate_identities(&rates) {
                total += 1;
                ok &= id.holds;
            }
        }
    }
    Ok((ok && total > 0, format!("{total} identities")))
}

fn duality() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut runs = 0;
    for (n, delta, kind) in [
        (2, 1, DualityKind::ClassPreserving),
        (3, 1, DualityKind::ClassPreserving),
        (2, 0, DualityKind::SubsetBoth),
        (3, 0, DualityKind::SubsetBoth),
    ] {
        let rates = RateTable::new(n, delta).map_err(e)?;
        for sites in [2, 3] {
            let l = build_generator(&rates, sites).map_err(e)?;
            ok &= check_duality(&l, &duality_matrix(kind, sites), sites).map_err(e)?.holds;
            runs += 1;
        }
        let l = build_generator(&rates, 4).map_err(e)?;
        let rep = check_duality_at_points(&l, &duality_matrix(kind, 4), 4, MIN_POINTS).map_err(e)?;
        ok &= rep.holds && rep.points.len() >= MIN_POINTS;
        runs += 1;
    }
    let l = build_generator(&RateTable::new(2, 1).map_err(e)?, 2).map_err(e)?;
    let control = check_duality(&l, &duality_matrix(DualityKind::SubsetBoth, 2), 2).map_err(e)?;
    let eta: Configuration = "[12;2]".parse().map_err(e)?;
    let xi: Configuration = "[2;1]".parse().map_err(e)?;
    let witnessed = !control.holds && control.violates(&eta, &xi);
    let took = t.elapsed();
    Ok((
        ok && witnessed && took < DUALITY_BUDGET,
        format!("{runs} runs, control witnessed {witnessed}, {:.1?}", took),
    ))
}

fn reversibility() -> Outcome {
    let mut ok = true;
    for (n, delta) in [(3, 0), (3, 1), (4, 0), (4, 1), (4, 2)] {
        let rates = RateTable::new(n, delta).map_err(e)?;
        for sites in [2, 3] {
            let l = build_generator(&rates, sites).map_err(e)?;
            ok &= detailed_balance_violations(&l, sites).is_empty();
        }
    }
    Ok((ok, "5 pairs on 2 and 3 sites".into()))
}

fn cross_derivation() -> Outcome {
    let mut ok = true;
    let mut mapping = Vec::new();
    for n in [3, 4] {
        let h = two_site_hamiltonian(n).map_err(e)?;
        let (_, dec, shifted) = shift_and_decompose(&h).map_err(e)?;
        for case in cases().into_iter().filter(|c| c.n == n) {
            let g = labeled_ground_state(&shifted, &dec, &case).map_err(e)?;
            let l = labeled_generator(&shifted, &g, &case).map_err(e)?;
            let m = match_hamiltonian_generator(&l, &case).map_err(e)?;
            ok &= m.matching_rates.len() == 1;
            let found: Vec<String> = m.matching_rates.iter().map(|r| format!("({},{})", r.n, r.delta)).collect();
            mapping.push(format!("{} {:?} -> {}", case.name, m.printed_label, found.join("|")));
        }
    }
    Ok((ok && mapping.len() == 5, mapping.join(", ")))
}

fn multisite() -> Outcome {
    let displays = two_site_displays().map_err(e)?;
    let so6: Vec<_> = displays.iter().filter(|d| d.name.starts_with("so6")).collect();
    let mut ok = so6.len() == 3 && so6.iter().all(|d| d.holds);
    let mut parts = vec![format!("{} so6 displays", so6.len())];
    for case in cases().into_iter().filter(|c| c.n == 3) {
        let sweep = ratio_law_sweep(&case, 3).map_err(e)?;
        ok &= sweep.holds();
        parts.push(format!("{} N=3 ratio law {}", case.name, sweep.holds()));
    }
    Ok((ok, parts.join(", ")))
}

fn classical() -> Outcome {
    let g2 = generator(2).map_err(e)?;
    let rows: RationalRows = serde_json::from_str(SO4_GOLDEN).map_err(e)?;
    let golden = golden_mismatches(&g2.matrix, &rows.to_matrix().map_err(e)?).is_empty();
    let mut lemmas = true;
    for n in 2..=5 {
        let g = generator(n).map_err(e)?;
        let c = g.census();
        let k = 2 * n as usize;
        lemmas &= is_markov_generator(&g.matrix)
            && c.absorbing == k
            && c.maximal_choice == k
            && c.pairwise == k * k - 2 * k
            && g.negated_rows == expected_negated_rows(n);
    }
    let mut bijections = true;
    for m in [1, 2] {
        let g = generator(m + 1).map_err(e)?;
        bijections &= match_classical(&g.matrix, &parallel_ssep(m, 2).map_err(e)?).is_ok();
    }
    let l = expand(&g2.matrix, 3).map_err(e)?;
    let c = choice_census(&l);
    let expanded = is_markov_generator(&l) && c.absorbing == 4 && c.maximal_choice == 4;
    Ok((
        golden && lemmas && bijections && expanded,
        format!("golden {golden}, lemmas {lemmas}, bijections {bijections}, expansion {expanded}"),
    ))
}

fn simulation() -> Outcome {
    let t = Instant::now();
    let rates = RateTable::new(3, 1).map_err(e)?;
    let q0 = rational(1, 2);
    let start: Configuration = "[12;∅]".parse().map_err(e)?;
    let stop = StopRule { t_max: f64::INFINITY, max_jumps: SIM_JUMPS };
    let traj = simulate(&rates, &start, &q0, stop, SIM_SEED).map_err(e)?;
    let tv = total_variation(&traj.occupation(), &sector_measure(&start, &q0).map_err(e)?);
    let took = t.elapsed();
    let ok = traj.jumps.len() == SIM_JUMPS && tv < TV_TOLERANCE && took < SIMULATION_BUDGET;
    Ok((ok, format!("{} jumps, TV {tv:.5}, {:.1?}", traj.jumps.len(), took)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("centrality so6", centrality),
        ("scalar action", scalars),
        ("pairing", pairing),
        ("hamiltonian so6", so6_golden),
        ("hamiltonian so8", so8_golden),
        ("rate identities", identities),
        ("duality", duality),
        ("reversibility", reversibility),
        ("generator cross-derivation", cross_derivation),
        ("multisite ground states", multisite),
        ("classical", classical),
        ("simulation", simulation),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|err| (false, format!("error: {err}")));
        failed += usize::from(!ok);
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} [{:.1?}]", k + 1, t.elapsed());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
