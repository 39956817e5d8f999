//! `mdl`: solve constraint files, lint them, and configure service graphs.
//!
//! Exit status: 0 solved, 1 unsatisfiable, 2 bad input, 3 internal failure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;

use mdl_core::chor::GraphError;
use mdl_core::sat::{write_dimacs, write_varmap};
use mdl_core::solver::{SolveError, SolveReport};
use mdl_core::text::{print_constraints, TextError};
use mdl_core::{
    models_equivalent, parse_chor, parse_constraints, solve, BoolConstraintSet, ConstraintSet, Guard, SolveOptions, Term,
    VariableInventory, Verdict,
};

const SAT: u8 = 0;
const UNSAT: u8 = 1;
const INPUT: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "mdl", version, about = "Solve MDL seniority constraints and configure service graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct SolveFlags {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Write the final adjunct CNF here (variable names go to PATH.vars).
    #[arg(long, value_name = "PATH")]
    dimacs: Option<PathBuf>,
    /// Re-check every constraint against the solution before reporting.
    #[arg(long)]
    verify: bool,
    /// Dump the approximations of every iteration to stderr.
    #[arg(long)]
    trace: bool,
    /// Solve on one thread.
    #[arg(long)]
    sequential: bool,
}

impl SolveFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            max_iters: self.max_iters,
            trace: self.trace,
            parallel: !self.sequential && SolveOptions::default().parallel,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a `.mdlc` constraint file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Parse a `.mdlc` file and report variable inventories without solving.
    Check { file: PathBuf },
    /// Configure the services of a `.chor` file.
    Chor {
        file: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Print the derived constraints instead of solving.
        #[arg(long)]
        emit_constraints: bool,
    },
}

/// Anything that ends the run early, with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<TextError> for Failure {
    fn from(e: TextError) -> Self {
        Failure { code: INPUT, message: e.to_string() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Sort { .. } | SolveError::NotGround(_) | SolveError::UnknownVariable(_) | SolveError::Term(_) => {
                INPUT
            }
            _ => INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Solve(e) => e.into(),
            e => Failure { code: INPUT, message: e.to_string() },
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: INPUT, message: format!("{}: {e}", path.display()) }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match &cli.command {
        Command::Solve { file, flags } => cmd_solve(file, flags, &mut out),
        Command::Check { file } => cmd_check(file, &mut out),
        Command::Chor { file, flags, emit_constraints } => cmd_chor(file, flags, *emit_constraints, &mut out),
    };
    print!("{out}");
    let _ = io::stdout().flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn display_name(path: &Path) -> String {
    path.display().to_string()
}

fn run_solver(cs: &ConstraintSet, flags: &SolveFlags) -> Result<SolveReport, Failure> {
    let report = solve(cs, &flags.options())?;
    if flags.trace {
        eprint!("{}", render_trace(&report));
    }
    if let Some(path) = &flags.dimacs {
        write_cnf(&report, path)?;
    }
    if flags.verify {
        if let Some(s) = report.verdict.solution() {
            s.audit(cs).map_err(|(i, detail)| {
                Failure::from(SolveError::VerificationFailure { constraint: i, detail })
            })?;
        }
    }
    Ok(report)
}

fn write_cnf(report: &SolveReport, path: &Path) -> Result<(), Failure> {
    let cnf = report.adjunct.to_cnf();
    let mut vars = path.as_os_str().to_owned();
    vars.push(".vars");
    let vars = PathBuf::from(vars);
    let f = File::create(path).map_err(|e| io_failure(path, e))?;
    write_dimacs(&cnf, BufWriter::new(f)).map_err(|e| io_failure(path, e))?;
    let f = File::create(&vars).map_err(|e| io_failure(&vars, e))?;
    write_varmap(&cnf, BufWriter::new(f)).map_err(|e| io_failure(&vars, e))
}

fn render_trace(report: &SolveReport) -> String {
    let inv = &report.inventory;
    let mut s = String::new();
    for step in &report.trace {
        let _ = writeln!(s, "iteration {} (adjunct: {} formulas)", step.iteration, step.adjunct_size);
        for cell in &step.cells {
            let cube: Vec<String> = cell.cube.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  cell [{}]", cube.join(", "));
            for (name, p) in inv.downvars.iter().zip(&cell.approx.down) {
                let _ = writeln!(s, "    ${name} = {p}");
            }
            for (name, p) in inv.upvars.iter().zip(&cell.approx.up) {
                let _ = writeln!(s, "    ^{name} = {p}");
            }
        }
    }
    s
}

#[derive(Serialize)]
struct SolveJson {
    verdict: &'static str,
    bvars: IndexMap<String, bool>,
    tvars_down: IndexMap<String, String>,
    tvars_up: IndexMap<String, String>,
    iterations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    unsat_constraints: Vec<usize>,
}

fn describe(cs: &ConstraintSet, i: usize) -> String {
    let c = &cs.constraints[i];
    format!("#{i} ({}): {} <= {}", c.origin, c.lhs, c.rhs)
}

fn cmd_solve(file: &Path, flags: &SolveFlags, out: &mut String) -> Result<u8, Failure> {
    let cs = parse_constraints(&read(file)?, Some(&display_name(file)))?;
    let report = run_solver(&cs, flags)?;
    let iterations = report.stats.iterations;
    let (code, json) = match &report.verdict {
        Verdict::Sat(s) => (
            SAT,
            SolveJson {
                verdict: "sat",
                bvars: s.bvals.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                tvars_down: s.down.iter().map(|(k, t)| (k.clone(), t.to_string())).collect(),
                tvars_up: s.up.iter().map(|(k, t)| (k.clone(), t.to_string())).collect(),
                iterations,
                unsat_constraints: Vec::new(),
            },
        ),
        Verdict::Unsat(info) => (
            UNSAT,
            SolveJson {
                verdict: "unsat",
                bvars: IndexMap::new(),
                tvars_down: IndexMap::new(),
                tvars_up: IndexMap::new(),
                iterations,
                unsat_constraints: info.culprits.clone(),
            },
        ),
    };
    match flags.format {
        Format::Json => {
            out.push_str(&serde_json::to_string_pretty(&json).expect("plain data"));
            out.push('\n');
        }
        Format::Text if code == SAT => {
            out.push_str("SAT\n");
            for (k, v) in &json.bvars {
                let _ = writeln!(out, "{k} = {v}");
            }
            for (k, v) in &json.tvars_down {
                let _ = writeln!(out, "${k} = {v}");
            }
            for (k, v) in &json.tvars_up {
                let _ = writeln!(out, "^{k} = {v}");
            }
        }
        Format::Text => {
            out.push_str("UNSAT\n");
            for &i in &json.unsat_constraints {
                let _ = writeln!(out, "  {}", describe(&cs, i));
            }
        }
    }
    Ok(code)
}

fn list(vars: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = vars.into_iter().collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

fn cmd_check(file: &Path, out: &mut String) -> Result<u8, Failure> {
    let cs = parse_constraints(&read(file)?, Some(&display_name(file)))?;
    cs.validate()?;
    // b-variable -> does some guard depend on it
    let mut relevant: IndexMap<String, bool> = IndexMap::new();
    for (i, c) in cs.iter().enumerate() {
        let mut inv = VariableInventory::default();
        inv.extend_from_term(&c.lhs);
        inv.extend_from_term(&c.rhs);
        for t in [&c.lhs, &c.rhs] {
            for_each_guard(t, &mut |g| {
                for v in g.variables() {
                    let used = depends_on(g, &v);
                    *relevant.entry(v).or_default() |= used;
                }
            });
        }
        let _ = writeln!(
            out,
            "#{i} {}: b: {}  down: {}  up: {}",
            c.origin,
            list(inv.bvars),
            list(inv.downvars.into_iter().map(|v| format!("${v}"))),
            list(inv.upvars.into_iter().map(|v| format!("^{v}")))
        );
    }
    let _ = writeln!(out, "{} constraints, ok", cs.len());
    for (b, used) in relevant {
        if !used {
            eprintln!("warning: b-variable `{b}` has no effect on any guard");
        }
    }
    Ok(SAT)
}

fn for_each_guard(t: &Term, f: &mut impl FnMut(&Guard)) {
    match t {
        Term::Tuple(items) => items.iter().for_each(|i| for_each_guard(i, f)),
        Term::Record(c) | Term::Choice(c) => {
            for e in &c.elements {
                f(&e.guard);
                for_each_guard(&e.term, f);
            }
        }
        Term::Switch(alts) => {
            for a in alts {
                f(&a.guard);
                for_each_guard(&a.term, f);
            }
        }
        _ => {}
    }
}

/// Whether fixing `v` to true and to false gives inequivalent guards.
fn depends_on(g: &Guard, v: &str) -> bool {
    let fix = |b: bool| {
        let mut s = BoolConstraintSet::new();
        s.insert(g.assign(&[(v.to_string(), b)].into_iter().collect()));
        s
    };
    !models_equivalent(&fix(true), &fix(false))
}

fn cmd_chor(file: &Path, flags: &SolveFlags, emit_constraints: bool, out: &mut String) -> Result<u8, Failure> {
    let g = parse_chor(&read(file)?, Some(&display_name(file)))?;
    if emit_constraints {
        out.push_str(&print_constraints(&g.derive_constraints()?));
        return Ok(SAT);
    }
    let cs = g.derive_constraints()?;
    // configure() solves again; run once here for trace, dimacs and verify
    if flags.trace || flags.dimacs.is_some() || flags.verify {
        run_solver(&cs, flags)?;
    }
    let report = g.configure(&flags.options())?;
    match flags.format {
        Format::Json => {
            out.push_str(&serde_json::to_string_pretty(&report).expect("plain data"));
            out.push('\n');
        }
        Format::Text => out.push_str(&report.render_text()),
    }
    Ok(if report.is_sat() { SAT } else { UNSAT })
}
