use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aeip_core::ci::{binary_implication_instance, disjointify, to_cardinality_implication, to_ci_only, CISystem};
use aeip_core::compiler::{compile_ttori, emit_corollary, flatten, slackify, CorollaryForm, CorollaryInput, SparseAffineSystem};
use aeip_core::gadget::ConstraintSystem;
use aeip_core::refute::{refute, Status};
use aeip_core::tiling::{find_periodic_tiling, PeriodicTiling, TileSet};
use aeip_core::witness::{build_witness, extend_with_slack, verify, verify_sparse, SYSTEM_TOLERANCE};
use aeip_core::{FactoredJoint, VarId};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aeip", version, about = "Tile sets to entropic constraint systems and back")]
struct Cli {
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a tile set into its constraint system.
    Compile {
        tileset: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Flatten a constraint system into `>=` rows.
    Flatten {
        system: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Add one slack variable per `>=` row.
    Slackify {
        sparse: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Search for a periodic tiling.
    TileSearch {
        tileset: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
        /// Print the tiling as text on stderr.
        #[arg(long)]
        render: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Build a witness distribution from a tiling.
    Witness {
        tileset: PathBuf,
        tiling: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Extend a witness with slack variables for a slackified system.
    SlackWitness {
        joint: PathBuf,
        sparse: PathBuf,
        #[arg(long, default_value_t = SYSTEM_TOLERANCE)]
        tol: f64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Check a constraint system (or flattened system) against a witness.
    Verify {
        joint: PathBuf,
        system: PathBuf,
        #[arg(long, default_value_t = SYSTEM_TOLERANCE)]
        tol: f64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Try to refute a flattened system with Shannon inequalities.
    Refute {
        sparse: PathBuf,
        /// Restrict to these variables, comma separated.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Rewrite a constraint system into conditional-independence relations.
    CiOnly {
        system: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Cardinality implication `card(Y) <= r` from a CI system.
    CardImplication {
        ci: PathBuf,
        #[arg(long)]
        r: u64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Pairwise-disjoint form of a CI implication.
    Disjointify {
        ci: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Disjoint binary implication; adds the cardinality step when missing.
    BinaryImplication {
        ci: PathBuf,
        #[arg(long)]
        r: u64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Emit a single-statement form with its audit trail.
    Emit {
        input: PathBuf,
        #[arg(long)]
        form: String,
        /// Human-readable text instead of JSON.
        #[arg(long)]
        text: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

/// A failed run: exit code and message.
struct Fail(u8, String);

impl From<aeip_core::Error> for Fail {
    fn from(e: aeip_core::Error) -> Self {
        Fail(1, e.to_string())
    }
}

type Run = Result<(), Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(1, format!("{}: {e}", path.display())))
}

fn write(out: Option<&Path>, text: &str) -> Run {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail(1, format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Fail(1, format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("aeip: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("aeip: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Run {
    match cmd {
        Cmd::Compile { tileset, o } => {
            let ts = TileSet::from_json(&read(&tileset)?)?;
            let cs = compile_ttori(&ts)?;
            eprintln!("{} rows, {} variables", cs.rows.len(), cs.var_count());
            write(o.as_deref(), &cs.to_json())
        }
        Cmd::Flatten { system, o } => {
            let cs = ConstraintSystem::from_json(&read(&system)?)?;
            write(o.as_deref(), &flatten(&cs).to_json())
        }
        Cmd::Slackify { sparse, o } => {
            let sas = SparseAffineSystem::from_json(&read(&sparse)?)?;
            write(o.as_deref(), &slackify(&sas).to_json())
        }
        Cmd::TileSearch { tileset, max_period, render, o } => {
            let ts = TileSet::from_json(&read(&tileset)?)?;
            match find_periodic_tiling(&ts, max_period) {
                Some(til) => {
                    eprintln!("found a {}x{} periodic tiling", til.a, til.b);
                    if render {
                        eprint!("{}", til.render());
                    }
                    write(o.as_deref(), &til.to_json())
                }
                None => Err(Fail(1, format!("no periodic tiling up to period {max_period}"))),
            }
        }
        Cmd::Witness { tileset, tiling, o } => {
            let ts = TileSet::from_json(&read(&tileset)?)?;
            let til = PeriodicTiling::from_json(&read(&tiling)?)?;
            let w = build_witness(&ts, &til)?;
            eprintln!("{} seeds, {} variables", w.joint.seeds().len(), w.joint.vars().len());
            write(o.as_deref(), &w.joint.to_json())
        }
        Cmd::SlackWitness { joint, sparse, tol, o } => {
            let j = FactoredJoint::from_json(&read(&joint)?)?;
            let sas = SparseAffineSystem::from_json(&read(&sparse)?)?;
            write(o.as_deref(), &extend_with_slack(&j, &sas, tol)?.to_json())
        }
        Cmd::Verify { joint, system, tol, o } => {
            let j = FactoredJoint::from_json(&read(&joint)?)?;
            let text = read(&system)?;
            let report = match ConstraintSystem::from_json(&text) {
                Ok(cs) => verify(&j, &cs, tol)?,
                Err(_) => verify_sparse(&j, &SparseAffineSystem::from_json(&text)?, tol)?,
            };
            write(o.as_deref(), &report.to_json())?;
            let s = &report.summary;
            eprintln!("{} rows, {} failures, max residual {:.3e}, max atoms {}", s.rows, s.failures, s.max_residual, s.max_atoms);
            if report.passed() {
                Ok(())
            } else {
                Err(Fail(1, format!("verification failed on {} rows", s.failures)))
            }
        }
        Cmd::Refute { sparse, vars, o } => {
            let sas = SparseAffineSystem::from_json(&read(&sparse)?)?;
            let restrict: Option<Vec<VarId>> = vars.map(|v| v.into_iter().map(VarId::new).collect());
            let outcome = refute(&sas, restrict.as_deref())?;
            eprintln!("{}", if outcome.status == Status::Refuted { "REFUTED" } else { "UNKNOWN" });
            write(o.as_deref(), &outcome.to_json())
        }
        Cmd::CiOnly { system, o } => {
            let cs = ConstraintSystem::from_json(&read(&system)?)?;
            let ci = to_ci_only(&cs)?;
            eprintln!("{} variables, {} relations", ci.n, ci.relations.len());
            write(o.as_deref(), &ci.to_json())
        }
        Cmd::CardImplication { ci, r, o } => {
            let ci = CISystem::from_json(&read(&ci)?)?;
            write(o.as_deref(), &to_cardinality_implication(&ci, r)?.to_json())
        }
        Cmd::Disjointify { ci, o } => {
            let ci = CISystem::from_json(&read(&ci)?)?;
            write(o.as_deref(), &disjointify(&ci)?.to_json())
        }
        Cmd::BinaryImplication { ci, r, o } => {
            let mut ci = CISystem::from_json(&read(&ci)?)?;
            if ci.extras.card_var.is_none() {
                ci = to_cardinality_implication(&ci, r)?;
            }
            write(o.as_deref(), &binary_implication_instance(&ci, r)?.to_json())
        }
        Cmd::Emit { input, form, text, o } => {
            let form: CorollaryForm = form.parse().map_err(|e: aeip_core::Error| Fail(2, e.to_string()))?;
            let raw = read(&input)?;
            let stmt = match CISystem::from_json(&raw) {
                Ok(ci) => emit_corollary(CorollaryInput::Ci(&ci), form)?,
                Err(_) => {
                    let sas = SparseAffineSystem::from_json(&raw)?;
                    emit_corollary(CorollaryInput::Sparse(&sas), form)?
                }
            };
            let body = if text { stmt.render_text() } else { stmt.to_json() };
            write(o.as_deref(), &body)
        }
    }
}
