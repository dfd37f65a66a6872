use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qlattice::asep::{
    sector_measure, simulate, total_variation, Configuration, DualityKind, RateTable, StopRule,
};
use qlattice::central::{assemble_central, realize};
use qlattice::classical::{generator, RationalRows};
use qlattice::exactq::{rational_to_string, LaurentPoly};
use qlattice::hamiltonian::{
    cases, labeled_generator, labeled_ground_state, pair_labels, paired_basis, shift_and_decompose,
    two_site_hamiltonian,
};
use qlattice::qgroup::Word;
use qlattice::suites::{self, AsepCheck, Mode, VerificationReport};

#[derive(Parser)]
#[command(name = "qlattice", version, about = "Exact checks for type D ASEP and so_2n Casimir processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ModeFlags {
    /// Evaluate n = 4 identities at degree-bounded rational points
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Fully symbolic
    #[arg(long)]
    full: bool,
}

impl ModeFlags {
    fn mode(self) -> Mode {
        if self.full {
            Mode::Full
        } else {
            Mode::Quick
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Central element: centrality and scalar action
    Central {
        #[arg(long)]
        n: usize,
        /// Accepted for symmetry with the other suites; centrality is always checked
        #[arg(long)]
        verify: bool,
        /// Write the one- and two-site realizations as JSON
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeFlags,
        /// Report path (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual elements under the pairing
    Pairing {
        #[command(subcommand)]
        command: PairingCommand,
    },
    /// Two-site Hamiltonian, ground states and derived generators
    Hamiltonian {
        #[arg(long)]
        n: usize,
        /// Include the block index sets in the emitted JSON
        #[arg(long)]
        blocks: bool,
        /// Include kernel vectors in the emitted JSON
        #[arg(long)]
        kernels: bool,
        /// Write blocks, kernels and derived generators to a file, or into the report with "json" (forces symbolic)
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type D ASEP checks and simulation
    Asep(AsepArgs),
    /// Classical Casimir generator and Parallel SSEP
    Classical(ClassicalArgs),
    /// Every suite
    All {
        #[command(flatten)]
        mode: ModeFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PairingCommand {
    Dual {
        #[arg(long)]
        n: usize,
        /// Word such as E:2,3
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct AsepArgs {
    #[command(subcommand)]
    command: Option<AsepCommand>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    delta: Option<u32>,
    #[arg(long, default_value_t = 2)]
    sites: usize,
    /// Comma list of duality, reversibility, charges, identities
    #[arg(long, value_delimiter = ',', default_value = "duality,reversibility,charges,identities")]
    check: Vec<String>,
    /// Duality kind (class-preserving | subset-both); defaults by δ
    #[arg(long)]
    kind: Option<String>,
    /// Also check rate positivity at this q
    #[arg(long)]
    q: Option<String>,
    /// Scan n = 2..5, δ = 0..3 and both kinds (informational)
    #[arg(long)]
    explore: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AsepCommand {
    /// Seeded continuous-time simulation
    Simulate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = f64::INFINITY)]
        tmax: f64,
        #[arg(long, default_value_t = 1_000_000)]
        jumps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start configuration like [12;∅;1]; default fills the left site with 12
        #[arg(long)]
        start: Option<String>,
        /// Trajectory CSV path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ClassicalArgs {
    #[command(subcommand)]
    command: Option<ClassicalCommand>,
    #[arg(long)]
    n: Option<u32>,
    /// Write G_n as rows of rational strings
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Include the per-state classes in the report
    #[arg(long)]
    classify: bool,
    /// Compare G_n with a golden matrix file
    #[arg(long)]
    golden: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ClassicalCommand {
    /// Kronecker-sum expansion to N sites
    Expand {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Usage-level failure: bad values that clap cannot catch.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Usage> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn finish(report: &VerificationReport, out: Option<&Path>) -> Result<ExitCode, Usage> {
    write_json(out, report)?;
    Ok(if report.passes() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn configure_threads() {
    if let Some(k) = std::env::var("QLATTICE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.command {
        Command::Central { n, verify: _, emit, mode, out } => {
            let report = suites::central_suite(n, mode.mode());
            if let Some(path) = emit {
                let plan = assemble_central(n)?;
                write_json(Some(&path), &json!({ "n": n, "sites1": realize(&plan, 1)?, "sites2": realize(&plan, 2)? }))?;
            }
            finish(&report, out.as_deref())
        }
        Command::Pairing { command: PairingCommand::Dual { n, word, out } } => {
            let w: Word = word.parse()?;
            finish(&suites::pairing_suite(n, &w), out.as_deref())
        }
        Command::Hamiltonian { n, blocks, kernels, emit, mode, out } => {
            if n != 3 && n != 4 {
                return Err(Usage(format!("hamiltonian supports n = 3 or 4, got {n}")));
            }
            let mut report = suites::hamiltonian_suite(n, mode.mode());
            match emit {
                // "json" or "-" embeds the export in the report on stdout
                Some(p) if p.as_os_str() == "json" || p.as_os_str() == "-" => {
                    let export = hamiltonian_export(n, blocks, kernels)?;
                    report.info("export", || Ok((true, export)));
                }
                Some(p) => write_json(Some(&p), &hamiltonian_export(n, blocks, kernels)?)?,
                None => {}
            }
            finish(&report, out.as_deref())
        }
        Command::Asep(a) => run_asep(a),
        Command::Classical(c) => run_classical(c),
        Command::All { mode, out } => finish(&suites::all_suites(mode.mode()), out.as_deref()),
    }
}

fn hamiltonian_export(n: usize, blocks: bool, kernels: bool) -> Result<serde_json::Value, Usage> {
    let h = two_site_hamiltonian(n)?;
    let (constant, dec, shifted) = shift_and_decompose(&h)?;
    let d = 2 * n;
    let label = |i: usize| {
        let (a, b) = pair_labels(i, d);
        format!("v{a}⊗v{b}")
    };
    let mut out = json!({ "n": n, "shift": constant.to_string() });
    if blocks {
        let b: Vec<Vec<String>> = dec.blocks.iter().map(|b| b.iter().map(|&i| label(i)).collect()).collect();
        out["blocks"] = json!(b);
    }
    let basis: Vec<String> = paired_basis(n).into_iter().map(label).collect();
    let mut generators = Vec::new();
    for case in cases().into_iter().filter(|c| c.n == n) {
        let g = labeled_ground_state(&shifted, &dec, &case)?;
        let l = labeled_generator(&shifted, &g, &case)?;
        let states: Vec<String> = Configuration::all(2).map(|c| c.to_string()).collect();
        let mut entry = json!({ "case": case.name, "states": states, "generator": l });
        if kernels {
            let v: Vec<(String, String)> =
                basis.iter().cloned().zip(case.kernel.iter().map(LaurentPoly::to_string)).collect();
            entry["kernel"] = json!(v);
        }
        generators.push(entry);
    }
    out["derived"] = json!(generators);
    Ok(out)
}

fn run_asep(a: AsepArgs) -> Result<ExitCode, Usage> {
    if let Some(AsepCommand::Simulate { n, delta, sites, q, tmax, jumps, seed, start, out }) = a.command {
        let rates = RateTable::new(n, delta)?;
        let q0 = suites::parse_q(&q)?;
        let start: Configuration = match start {
            Some(s) => s.parse()?,
            None => format!("[12{}]", ";∅".repeat(sites.saturating_sub(1))).parse()?,
        };
        if start.sites() != sites {
            return Err(Usage(format!("start has {} sites, expected {sites}", start.sites())));
        }
        let traj = simulate(&rates, &start, &q0, StopRule { t_max: tmax, max_jumps: jumps }, seed)?;
        if let Some(p) = &out {
            std::fs::write(p, traj.to_csv())?;
        }
        let tv = total_variation(&traj.occupation(), &sector_measure(&start, &q0)?);
        let summary = json!({
            "suite": "asep-simulate",
            "q": rational_to_string(&q0),
            "seed": seed,
            "jumps": traj.jumps.len(),
            "end_time": traj.end_time,
            "tv_to_reversible_measure": tv,
        });
        write_json(None, &summary)?;
        return Ok(ExitCode::SUCCESS);
    }
    if a.explore {
        return finish(&suites::asep_explore(a.sites), a.out.as_deref());
    }
    let (Some(n), Some(delta)) = (a.n, a.delta) else {
        return Err(Usage("asep needs --n and --delta".into()));
    };
    let rates = RateTable::new(n, delta)?;
    let checks = a.check.iter().map(|s| s.parse::<AsepCheck>()).collect::<Result<Vec<_>, _>>()?;
    let kind = a.kind.as_deref().map(str::parse::<DualityKind>).transpose()?;
    let q = a.q.as_deref().map(suites::parse_q).transpose()?;
    finish(&suites::asep_suite(rates, a.sites, &checks, kind, q.as_ref()), a.out.as_deref())
}

fn run_classical(c: ClassicalArgs) -> Result<ExitCode, Usage> {
    if let Some(ClassicalCommand::Expand { n, sites, out }) = c.command {
        return finish(&suites::expand_suite(n, sites), out.as_deref());
    }
    let n = c.n.ok_or_else(|| Usage("classical needs --n".into()))?;
    let golden = c.golden.as_deref().map(std::fs::read_to_string).transpose()?;
    let mut report = suites::classical_suite(n, golden.as_deref());
    if !c.classify {
        for check in &mut report.checks {
            if let Some(obj) = check.detail.as_object_mut() {
                obj.remove("classes");
            }
        }
    }
    if let Some(path) = c.emit {
        let g = generator(n)?;
        write_json(Some(&path), &RationalRows::from_matrix(&g.matrix))?;
    }
    finish(&report, c.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
