//! `cylab`: batch front end. Every command prints one JSON document on stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cylab_core::arrangement::{Arrangement, ModuliPointP1, ModuliPointPn};
use cylab_core::higgs::{build_eigen_higgs, check_maximality, hodge_from_higgs, yukawa_length};
use cylab_core::hodge::{
    cover_degree, eigenspace_dims, galois_orbit, hodge_middle, riemann_hurwitz_genus,
    unit_group_order, w_unif_exists,
};
use cylab_core::kummer::{gale_dual, group_data, is_smooth_y};
use cylab_core::moduli::{gamma_inverse, gamma_moduli, normalization_trace};
use cylab_core::report::{cmd_report, selftest, ReportFlags};
use cylab_core::resolution::{
    init_cyclic_cover, run_resolution_observed, RunOptions, TieBreak, DEFAULT_STEP_LIMIT,
};
use cylab_core::{Error, Rational};

const STEP_LIMIT_ENV: &str = "CYLAB_STEP_LIMIT";

#[derive(Parser)]
#[command(
    name = "cylab",
    version,
    about = "Cyclic covers branched along hyperplane arrangements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline for one n.
    Report {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random points pushed through the moduli map.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Also run the n=5 resolution.
        #[arg(long)]
        resolve_n5: bool,
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        step_limit: Option<u64>,
    },
    /// Crepant resolution of the cyclic cover by codimension-two blow-ups.
    Resolve {
        #[arg(long, required_unless_present = "arrangement")]
        n: Option<usize>,
        #[arg(long, requires = "r")]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        r: Option<u32>,
        /// Arrangement JSON; must be in general position.
        #[arg(long, value_name = "FILE")]
        arrangement: Option<PathBuf>,
        /// Print one line per step on stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        step_limit: Option<u64>,
        /// Write the strata poset as DOT, one file per step.
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Tie::Lowest)]
        tie_break: Tie,
        #[arg(long)]
        no_oracle: bool,
    },
    /// The moduli map from points on the line to hyperplane arrangements.
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<Rational>,
    },
    /// Hodge row, eigenspaces and the uniformization criterion.
    Hodge {
        #[arg(long)]
        n: usize,
    },
    /// Eigen-decomposed Higgs ranks and the Yukawa length.
    Higgs {
        #[arg(long)]
        n: usize,
    },
    /// Gale dual and smoothness of the Kummer cover.
    Kummer {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<Rational>,
        /// Cover degree; defaults to (n+3)/2.
        #[arg(long)]
        r: Option<u32>,
    },
    /// Invariant suite at desk scale.
    Selftest {
        /// Skip the n=5 resolution.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a plain-text table instead of JSON.
        #[arg(long)]
        table: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Lowest,
    Highest,
}

/// What went wrong, and which exit code it maps to.
enum Failure {
    Core(Error),
    Io(String),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Pretty JSON to print on stdout, or `None` when the command printed its own output.
type CliResult = Result<Option<String>, Failure>;

fn pretty<T: Serialize>(v: &T) -> Option<String> {
    Some(serde_json::to_string_pretty(v).expect("serializable"))
}

fn step_limit(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(k) = flag {
        return Ok(k);
    }
    match std::env::var(STEP_LIMIT_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Core(Error::Parse(format!(
                "{STEP_LIMIT_ENV}={v} is not a step count"
            )))
        }),
        Err(_) => Ok(DEFAULT_STEP_LIMIT),
    }
}

fn check_len(name: &str, values: &[Rational], n: usize) -> Result<(), Failure> {
    if values.len() != n {
        return Err(
            Error::Parse(format!("--{name} needs {n} values, got {}", values.len())).into(),
        );
    }
    Ok(())
}

fn read_arrangement(path: &Path) -> Result<Arrangement, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(Arrangement::from_json(&text)?)
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Report {
            n,
            seed,
            samples,
            resolve_n5,
            no_oracle,
            step_limit: limit,
        } => {
            let flags = ReportFlags {
                samples,
                resolve_n5,
                step_limit: step_limit(limit)?,
                oracle: !no_oracle,
            };
            Ok(pretty(&cmd_report(n, seed, &flags)?))
        }
        Command::Resolve {
            n,
            m,
            r,
            arrangement,
            trace,
            step_limit: limit,
            dot,
            tie_break,
            no_oracle,
        } => {
            let n = match (&arrangement, n) {
                (Some(path), flag) => {
                    let a = read_arrangement(path)?;
                    if !a.is_general_position() {
                        return Err(Error::NotGeneralPosition.into());
                    }
                    if flag.is_some_and(|n| n != a.n()) {
                        return Err(Error::Parse(format!(
                            "--n disagrees with the arrangement (n = {})",
                            a.n()
                        ))
                        .into());
                    }
                    a.n()
                }
                (None, Some(n)) => n,
                (None, None) => unreachable!("clap requires --n or --arrangement"),
            };
            let (m, r) = match (m, r) {
                (Some(m), Some(r)) => (m, r),
                _ => (n + 3, cover_degree(n)? as u32),
            };
            let tie = match tie_break {
                Tie::Lowest => TieBreak::LowestIds,
                Tie::Highest => TieBreak::HighestIds,
            };
            let mut state = init_cyclic_cover(n, m, r)?.with_tie_break(tie);
            if let Some(dir) = &dot {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
            }
            let opts = RunOptions {
                step_limit: step_limit(limit)?,
                oracle: !no_oracle,
            };
            let mut io_error = None;
            let log = run_resolution_observed(&mut state, opts, |s| {
                if trace {
                    if let Some(rec) = s.history.last() {
                        eprintln!(
                            "step {:>5}  center {} ∩ {}  new {} (mult {})  max f {}",
                            rec.step,
                            s.divisor_label(rec.center.0),
                            s.divisor_label(rec.center.1),
                            s.divisor_label(rec.new_divisor),
                            rec.new_mult,
                            s.max_f()
                        );
                    }
                }
                if let Some(dir) = &dot {
                    let path = dir.join(format!("step_{:05}.dot", s.step));
                    if let Err(e) = std::fs::write(&path, s.to_dot()) {
                        io_error.get_or_insert(format!("{}: {e}", path.display()));
                    }
                }
            })?;
            if let Some(e) = io_error {
                return Err(Failure::Io(e));
            }
            Ok(pretty(&log))
        }
        Command::Gamma { n, t } => {
            check_len("t", &t, n)?;
            let t = ModuliPointP1::new(t)?;
            let trace = normalization_trace(&t)?;
            let closed = gamma_moduli(&t)?;
            if closed != trace.s {
                return Err(
                    Error::Invariant("closed form and normalization disagree".into()).into(),
                );
            }
            let back = gamma_inverse(&closed)?;
            if back != t {
                return Err(Error::Invariant("inverse does not recover t".into()).into());
            }
            Ok(pretty(&json!({
                "n": n,
                "t": t.coords(),
                "s": closed.coords(),
                "trace": trace,
                "inverse": back.coords(),
            })))
        }
        Command::Hodge { n } => {
            let r = cover_degree(n)?;
            let row = hodge_middle(n)?;
            Ok(pretty(&json!({
                "n": n,
                "r": r,
                "hodge_row": row.values,
                "total": row.total(),
                "eigen_table": eigenspace_dims(r)?,
                "curve_genus": riemann_hurwitz_genus(r, n + 3)?,
                "phi_r": unit_group_order(r),
                "orbit_of_1": galois_orbit(r, 1),
                "w_unif": w_unif_exists(n)?,
            })))
        }
        Command::Higgs { n } => {
            let h = build_eigen_higgs(n)?;
            let yl = yukawa_length(&h)?;
            Ok(pretty(&json!({
                "n": n,
                "dim_base": h.dim_base,
                "summands": h.summands,
                "yukawa_length": yl,
                "maximal": check_maximality(&h),
                "hodge_row": hodge_from_higgs(&h).values,
                "assumptions": h.assumptions,
            })))
        }
        Command::Kummer { n, s, r } => {
            check_len("s", &s, n)?;
            let r = match r {
                Some(r) => r,
                None => cover_degree(n)? as u32,
            };
            let s = ModuliPointPn::new(s)?;
            let a = Arrangement::from_moduli(&s)?;
            let k = gale_dual(&a, r)?;
            let groups = match group_data(r, (n + 3) as u32) {
                Ok(g) => Some(g),
                Err(Error::Overflow(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(pretty(&json!({
                "n": n,
                "r": r,
                "s": s.coords(),
                "b": k.b,
                "equations": k.equations,
                "smooth": is_smooth_y(&k),
                "general_position": a.is_general_position(),
                "groups": groups,
            })))
        }
        Command::Selftest { quick, seed, table } => {
            let report = selftest(seed, quick);
            let text = if table {
                report.table()
            } else {
                serde_json::to_string_pretty(&report).expect("serializable") + "\n"
            };
            emit(&text);
            if report.all_passed {
                Ok(None)
            } else {
                Err(Failure::Selftest)
            }
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(text)) => {
            emit(&text);
            emit("\n");
            ExitCode::SUCCESS
        }
        Err(Failure::Selftest) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({ "error": { "kind": "io", "message": msg } }));
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            let (kind, code) = if e.is_usage() {
                ("usage", 2)
            } else {
                ("invariant", 1)
            };
            eprintln!(
                "{}",
                json!({ "error": { "kind": kind, "message": e.to_string() } })
            );
            ExitCode::from(code)
        }
    }
}
