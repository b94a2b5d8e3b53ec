//! Command-line front end for the invariant toolkit.
//!
//! Every command reads a loop program file (see the loops module docs for
//! the format) and prints either plain text or JSON. Exit codes follow one
//! convention across commands: 0 for success / a positive verdict, 1 for a
//! negative verdict, 2 for any error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use loopinv_core::general::general_invariants;
use loopinv_core::generate::{
    compute_matrix_branch, truncated_class, truncated_ideal_branch, GenerateOptions,
};
use loopinv_core::invariant::check_pi_branch;
use loopinv_core::loops::{parse_loop, CandidateSpace, InitialState, LoopProgram};
use loopinv_core::parse::parse_poly;
use loopinv_core::poly::Polynomial;
use loopinv_core::rational::format_rational;
use loopinv_core::termination::{never_terminates_algebraic_branch, TerminationVerdict};
use loopinv_core::Rational;

#[derive(Parser)]
#[command(name = "loopinv", version, about = "Polynomial loop invariants over exact rationals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Loop program file
    file: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Fixpoint iteration cap (at least 1)
    #[arg(long, default_value_t = 64)]
    max_iter: usize,
}

#[derive(Args)]
struct DegreeArg {
    /// Candidate polynomials: all monomials of total degree up to this bound
    #[arg(long, default_value_t = 2)]
    degree: u32,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a polynomial is an invariant of the loop from its
    /// initial state; on a negative answer print a witness run
    Check {
        #[command(flatten)]
        common: Common,
        /// Candidate polynomial over the loop variables
        poly: String,
    },
    /// Basis of all invariants in the candidate space from the concrete
    /// initial state
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        degree: DegreeArg,
        /// Longest trajectory schedule used for constraint rows
        /// (default: the number of candidate generators)
        #[arg(long)]
        constraint_depth: Option<usize>,
        /// Hard cap on constraint rows for branching loops
        #[arg(long, default_value_t = 10_000)]
        word_cap: usize,
        /// Switch to modular constraint rows once a trajectory value
        /// outgrows this many bits
        #[arg(long, default_value_t = 8192)]
        bit_limit: u64,
        /// After generating, unroll random schedules of this depth and fail
        /// (exit 2) if any basis polynomial is nonzero along them
        #[arg(long)]
        oracle_depth: Option<usize>,
        /// Seed for the oracle schedules
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariants f(x) - f(a) that hold from every initial state
    General {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        degree: DegreeArg,
    },
    /// Matrix A(x) whose kernel at an initial state gives the coefficient
    /// vectors of all invariants in the candidate space
    Matrix {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        degree: DegreeArg,
    },
    /// Split the initial-value space into cells with a uniform invariant
    /// basis on each cell
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        degree: DegreeArg,
    },
    /// Decide whether the algebraic loop "run while all guard polynomials
    /// are zero" never terminates from its initial state
    Terminate {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(cli.cmd, &mut out) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    };
    // a consumer that stopped reading is not an error worth reporting
    let _ = std::io::stdout().write_all(out.as_bytes());
    code
}

fn run(cmd: Cmd, out: &mut String) -> Result<ExitCode, String> {
    match cmd {
        Cmd::Check { common, poly } => cmd_check(&common, &poly, out),
        Cmd::Generate {
            common,
            degree,
            constraint_depth,
            word_cap,
            bit_limit,
            oracle_depth,
            seed,
        } => {
            let opts = GenerateOptions {
                depth: constraint_depth,
                word_cap,
                exact_bit_limit: bit_limit,
            };
            cmd_generate(&common, degree.degree, &opts, oracle_depth, seed, out)
        }
        Cmd::General { common, degree } => cmd_general(&common, degree.degree, out),
        Cmd::Matrix { common, degree } => cmd_matrix(&common, degree.degree, out),
        Cmd::Classify { common, degree } => cmd_classify(&common, degree.degree, out),
        Cmd::Terminate { common } => cmd_terminate(&common, out),
    }
}

fn load(common: &Common) -> Result<LoopProgram, String> {
    if common.max_iter == 0 {
        return Err("--max-iter must be at least 1".into());
    }
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| format!("{}: {e}", common.file.display()))?;
    parse_loop(&text).map_err(|e| format!("{}: {e}", common.file.display()))
}

fn concrete_init(program: &LoopProgram) -> Result<Vec<Rational>, String> {
    match program.init() {
        InitialState::Concrete(vals) => Ok(vals.clone()),
        InitialState::Symbolic => Err(
            "this operation requires a concrete initial state, the loop declares \
             `init symbolic`; use the `matrix` or `classify` command instead"
                .into(),
        ),
    }
}

fn rationals(vals: &[Rational]) -> Vec<String> {
    vals.iter().map(format_rational).collect()
}

fn polys(ps: &[Polynomial]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn line(out: &mut String, args: std::fmt::Arguments<'_>) {
    let _ = writeln!(out, "{args}");
}

macro_rules! outln {
    ($out:expr) => { line($out, format_args!("")) };
    ($out:expr, $($arg:tt)*) => { line($out, format_args!($($arg)*)) };
}

fn cmd_check(common: &Common, poly: &str, out: &mut String) -> Result<ExitCode, String> {
    let program = load(common)?;
    let a = concrete_init(&program)?;
    let hs = program.inequation_polys().map_err(|e| e.to_string())?;
    let g = parse_poly(poly, program.vars()).map_err(|e| e.to_string())?;
    let report = check_pi_branch(&a, &g, &hs, program.branches(), common.max_iter)
        .map_err(|e| e.to_string())?;
    match common.format {
        Format::Json => {
            let witness = report.witness.as_ref().map(|w| {
                json!({
                    "schedule": w.schedule,
                    "point": rationals(&w.point),
                    "value": format_rational(&w.value),
                })
            });
            let doc = json!({
                "holds": report.holds,
                "iterations": report.iterations,
                "failing_index": report.failing_index,
                "failing_value": report.failing_value.as_ref().map(format_rational),
                "witness": witness,
            });
            outln!(out, "{doc}");
        }
        Format::Text => {
            if report.holds {
                outln!(out, "True");
            } else {
                outln!(out, "False");
                if let (Some(i), Some(v)) = (report.failing_index, &report.failing_value) {
                    outln!(
                        out,
                        "nonzero composition: index {i}, value {} at the initial state",
                        format_rational(v)
                    );
                }
                if let Some(w) = &report.witness {
                    outln!(
                        out,
                        "witness: schedule {:?} reaches ({}) where the candidate is {}",
                        w.schedule,
                        rationals(&w.point).join(", "),
                        format_rational(&w.value)
                    );
                }
            }
        }
    }
    Ok(if report.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_generate(
    common: &Common,
    degree: u32,
    opts: &GenerateOptions,
    oracle_depth: Option<usize>,
    seed: u64,
    out: &mut String,
) -> Result<ExitCode, String> {
    let program = load(common)?;
    let a = concrete_init(&program)?;
    let hs = program.inequation_polys().map_err(|e| e.to_string())?;
    let space = CandidateSpace::monomials(program.vars(), degree);
    let basis = truncated_ideal_branch(
        &a,
        space.generators(),
        &hs,
        program.branches(),
        common.max_iter,
        opts,
    )
    .map_err(|e| e.to_string())?;

    if let Some(depth) = oracle_depth {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let schedule: Vec<usize> =
                (0..depth).map(|_| rng.gen_range(0..program.branch_count())).collect();
            let run = program.unroll(&a, &schedule).map_err(|e| e.to_string())?;
            for point in &run {
                for f in basis.basis() {
                    let v = f.evaluate(point);
                    if !v.is_zero() {
                        return Err(format!(
                            "oracle violation: `{f}` is {} at ({}) along schedule {:?}",
                            format_rational(&v),
                            rationals(point).join(", "),
                            schedule
                        ));
                    }
                }
            }
        }
    }

    match common.format {
        Format::Json => {
            let doc = json!({
                "degree": degree,
                "dimension": basis.dimension(),
                "basis": polys(basis.basis()),
                "stage3_used": basis.stage3_used(),
                "iterations": basis.iterations(),
            });
            outln!(out, "{doc}");
        }
        Format::Text => {
            outln!(out, "degree: {degree}");
            outln!(out, "dimension: {}", basis.dimension());
            outln!(out, "stage3_used: {}", basis.stage3_used());
            outln!(out, "iterations: {}", basis.iterations());
            if !basis.basis().is_empty() {
                outln!(out, "basis:");
                for f in basis.basis() {
                    outln!(out, "  {f}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_general(common: &Common, degree: u32, out: &mut String) -> Result<ExitCode, String> {
    let program = load(common)?;
    // reject inequality guards up front; inequation guards are irrelevant
    // to invariants that hold from every initial state
    program.inequation_polys().map_err(|e| e.to_string())?;
    let space = CandidateSpace::monomials(program.vars(), degree);
    let inv = general_invariants(space.generators(), program.branches());
    let n = program.arity();
    let doubled = program.vars().with_init_symbols();
    let halves: Vec<String> = inv
        .basis()
        .iter()
        .map(|f| {
            let fx = f.lifted_to(&doubled);
            let fa = f.shifted_into(&doubled, n);
            format!("({fx}) - ({fa})")
        })
        .collect();
    debug_assert_eq!(
        inv.pinned(),
        halves.iter().map(|s| parse_poly(s, &doubled).unwrap()).collect::<Vec<_>>()
    );
    match common.format {
        Format::Json => {
            let doc = json!({
                "degree": degree,
                "dimension": inv.dimension(),
                "invariants": halves,
            });
            outln!(out, "{doc}");
        }
        Format::Text => {
            outln!(out, "degree: {degree}");
            outln!(out, "dimension: {}", inv.dimension());
            if !halves.is_empty() {
                outln!(out, "invariants:");
                for s in &halves {
                    outln!(out, "  {s}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_matrix(common: &Common, degree: u32, out: &mut String) -> Result<ExitCode, String> {
    let program = load(common)?;
    let hs = program.inequation_polys().map_err(|e| e.to_string())?;
    let space = CandidateSpace::monomials(program.vars(), degree);
    let am = compute_matrix_branch(space.generators(), &hs, program.branches(), common.max_iter)
        .map_err(|e| e.to_string())?;
    let rows: Vec<Vec<String>> = (0..am.matrix().rows)
        .map(|i| (0..am.matrix().cols).map(|j| am.matrix().get(i, j).to_string()).collect())
        .collect();
    match common.format {
        Format::Json => {
            let doc = json!({
                "degree": degree,
                "generators": polys(am.generators()),
                "iterations": am.iterations(),
                "rows": am.matrix().rows,
                "cols": am.matrix().cols,
                "matrix": rows,
            });
            outln!(out, "{doc}");
        }
        Format::Text => {
            outln!(out, "degree: {degree}");
            outln!(out, "generators: {}", polys(am.generators()).join(", "));
            outln!(out, "iterations: {}", am.iterations());
            outln!(out, "matrix ({} x {}):", am.matrix().rows, am.matrix().cols);
            for row in &rows {
                outln!(out, "  [{}]", row.join(", "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(common: &Common, degree: u32, out: &mut String) -> Result<ExitCode, String> {
    let program = load(common)?;
    let hs = program.inequation_polys().map_err(|e| e.to_string())?;
    let space = CandidateSpace::monomials(program.vars(), degree);
    let cls = truncated_class(space.generators(), &hs, program.branches(), common.max_iter)
        .map_err(|e| e.to_string())?;
    match common.format {
        Format::Json => {
            let cells: Vec<_> = (0..cls.cells().len())
                .map(|i| {
                    let cell = &cls.cells()[i];
                    json!({
                        "rank": cell.rank(),
                        "equations": polys(cell.equations()),
                        "inequation": cell.inequation().to_string(),
                        "templates": polys(&cls.templates(i)),
                    })
                })
                .collect();
            let doc = json!({
                "degree": degree,
                "generators": polys(cls.generators()),
                "cells": cells,
            });
            outln!(out, "{doc}");
        }
        Format::Text => {
            outln!(out, "degree: {degree}");
            outln!(out, "generators: {}", polys(cls.generators()).join(", "));
            outln!(out, "cells: {}", cls.cells().len());
            for (i, cell) in cls.cells().iter().enumerate() {
                outln!(out, "cell {i}:");
                outln!(out, "  rank: {}", cell.rank());
                let eqs = if cell.equations().is_empty() {
                    "none".to_string()
                } else {
                    polys(cell.equations()).join(", ")
                };
                outln!(out, "  equations: {eqs}");
                outln!(out, "  inequation: {}", cell.inequation());
                let ts = cls.templates(i);
                if ts.is_empty() {
                    outln!(out, "  templates: none");
                } else {
                    outln!(out, "  templates:");
                    for t in &ts {
                        outln!(out, "    {t}");
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_terminate(common: &Common, out: &mut String) -> Result<ExitCode, String> {
    let program = load(common)?;
    let a = concrete_init(&program)?;
    let gs = program.inequation_polys().map_err(|_| {
        "not supported: semi-algebraic termination requires quantifier elimination".to_string()
    })?;
    let verdict = never_terminates_algebraic_branch(&a, &gs, program.branches(), common.max_iter)
        .map_err(|e| e.to_string())?;
    match &verdict {
        TerminationVerdict::NeverTerminates => {
            match common.format {
                Format::Json => outln!(out, "{}", json!({ "verdict": "never_terminates" })),
                Format::Text => outln!(out, "never terminates"),
            }
            Ok(ExitCode::SUCCESS)
        }
        TerminationVerdict::Terminates { schedule, point, guard_index, value } => {
            match common.format {
                Format::Json => {
                    let doc = json!({
                        "verdict": "terminates",
                        "witness": {
                            "schedule": schedule,
                            "point": rationals(point),
                            "guard_index": guard_index,
                            "value": format_rational(value),
                        },
                    });
                    outln!(out, "{doc}");
                }
                Format::Text => {
                    outln!(
                        out,
                        "terminates: schedule {:?} reaches ({}) where equation {} evaluates to {}",
                        schedule,
                        rationals(point).join(", "),
                        guard_index,
                        format_rational(value)
                    );
                }
            }
            Ok(ExitCode::from(1))
        }
    }
}
