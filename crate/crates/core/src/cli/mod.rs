//! File formats and the command-line front end.
//!
//! Commands are plain functions from file text to an [`Outcome`] (exit
//! code plus captured output) so they can be tested without a process.
//!
//! | exit | meaning                                         |
//! |------|-------------------------------------------------|
//! | 0    | success                                         |
//! | 1    | a mandatory check failed / scheme not stratified |
//! | 2    | parse or usage error                            |
//! | 3    | fuel exhausted                                  |
//! | 4    | variable or oracle budget exceeded              |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::eqsys::{is_closed, Assignment, DslSystem, EquationSystem, Sym};
use crate::interproc::{check_stratified, instantiate_system, Scheme, Stratification};
use crate::lattice::Domain;
use crate::oracle::{is_monotone, is_post_solution, is_post_solution_lower_mono, OracleError};
use crate::solvers::{run, Limits, SolveError, SolverKind, SolverResult, Stats, Status, DEFAULT_FUEL};
use crate::syntax::{strip_comment, ParseError, Pos};

mod files;

pub use files::{parse_finite_file, parse_scheme_file, parse_scheme_file_with};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// A parsed input file.
#[derive(Debug, Clone)]
pub enum Input {
    Equations(DslSystem),
    Scheme(Scheme),
}

/// Parses an equation file or a scheme file, told apart by the first
/// directive.
pub fn parse_input(text: &str) -> Result<Input, ParseError> {
    let first = text.lines().map(|l| strip_comment(l).trim()).find(|l| !l.is_empty());
    match first.and_then(|l| l.split_whitespace().next()) {
        Some("scheme") => parse_scheme_file(text).map(Input::Scheme),
        _ => parse_finite_file(text).map(Input::Equations),
    }
}

/// Exit code and captured output of a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Outcome {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, msg: impl std::fmt::Display) -> Outcome {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    /// Evaluation fuel for the warrowing solver.
    pub fuel: Option<u64>,
    /// Initial variable: a variable name, or `point:context` for schemes.
    pub start: Option<String>,
    pub var_budget: Option<usize>,
    pub json: bool,
}

impl Options {
    fn limits(&self) -> Limits {
        self.var_budget
            .map_or_else(Limits::default, |var_budget| Limits { var_budget })
    }

    fn fuel(&self) -> u64 {
        self.fuel.unwrap_or(DEFAULT_FUEL)
    }
}

fn solve_error_outcome(e: &SolveError) -> Outcome {
    let code = match e {
        SolveError::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    };
    Outcome::error(code, e)
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Completed => EXIT_OK,
        Status::FuelExhausted => EXIT_FUEL,
    }
}

fn finite_start(sys: &DslSystem, opts: &Options) -> Result<Sym, Outcome> {
    match &opts.start {
        None => Ok(sys.equations[0].0.clone()),
        Some(name) => {
            let v = Sym::new(name);
            if sys.rhs_of(&v).is_some() {
                Ok(v)
            } else {
                Err(Outcome::error(EXIT_USAGE, format!("unknown start variable `{name}`")))
            }
        }
    }
}

fn scheme_with_start(s: &Scheme, opts: &Options) -> Result<Scheme, Outcome> {
    let Some(text) = &opts.start else { return Ok(s.clone()) };
    let pos = Pos { line: 1, col: 1 };
    let (p, ctx) = files::parse_start(text, s.names(), s.domain(), pos, ':')
        .map_err(|e| Outcome::error(EXIT_USAGE, format!("--start: {}", e.msg)))?;
    s.clone().with_start(p, ctx).map_err(|e| Outcome::error(EXIT_USAGE, e))
}

/// Variable names and rendered values, sorted by name.
fn rendered<S: EquationSystem>(sys: &S, a: &Assignment<S::Var>) -> BTreeMap<String, String> {
    a.iter()
        .map(|(v, d)| (sys.render_var(v), a.domain().render(d)))
        .collect()
}

fn stats_json(s: &Stats) -> serde_json::Value {
    json!({
        "vars": s.vars_encountered,
        "evals": s.rhs_evals,
        "widen_apps": s.widen_apps,
        "narrow_apps": s.narrow_apps,
    })
}

fn solve_report<S: EquationSystem>(sys: &S, kind: SolverKind, r: &SolverResult<S::Var>, json: bool) -> String {
    let values = rendered(sys, &r.assignment);
    if json {
        let mut j = json!({
            "solver": kind.name(),
            "status": r.status.to_string(),
            "assignment": values,
        });
        for (k, v) in stats_json(&r.stats).as_object().expect("object") {
            j[k] = v.clone();
        }
        return format!("{j}\n");
    }
    let mut out = format!("solver: {kind}\nstatus: {}\n", r.status);
    let width = values.keys().map(String::len).max().unwrap_or(0);
    for (v, d) in &values {
        let _ = writeln!(out, "{v:width$} = {d}");
    }
    if let Some(s0) = &r.secondary {
        out.push_str("widening phase result:\n");
        for (v, d) in rendered(sys, s0) {
            let _ = writeln!(out, "  {v:width$} = {d}");
        }
    }
    let s = &r.stats;
    let _ = writeln!(
        out,
        "vars: {}  evals: {}  widen: {}  narrow: {}",
        s.vars_encountered, s.rhs_evals, s.widen_apps, s.narrow_apps
    );
    out
}

/// Solves a file and reports the assignment and statistics.
pub fn cmd_solve(text: &str, kind: SolverKind, opts: &Options) -> Outcome {
    let input = match parse_input(text) {
        Ok(i) => i,
        Err(e) => return Outcome::error(EXIT_USAGE, e),
    };
    match input {
        Input::Equations(dsl) => {
            let start = match finite_start(&dsl, opts) {
                Ok(s) => s,
                Err(o) => return o,
            };
            let sys = dsl.to_system();
            match run(kind, &sys, &start, opts.fuel(), &opts.limits()) {
                Ok(r) => Outcome::ok(status_code(r.status), solve_report(&sys, kind, &r, opts.json)),
                Err(e) => solve_error_outcome(&e),
            }
        }
        Input::Scheme(s) => {
            let s = match scheme_with_start(&s, opts) {
                Ok(s) => s,
                Err(o) => return o,
            };
            let sys = instantiate_system(&s);
            match run(kind, &sys, &s.start_var(), opts.fuel(), &opts.limits()) {
                Ok(r) => {
                    let mut out = solve_report(&sys, kind, &r, opts.json);
                    if !opts.json {
                        let per: Vec<String> = sys
                            .contexts_per_point(r.assignment.vars())
                            .into_iter()
                            .map(|(p, n)| format!("{p}:{n}"))
                            .collect();
                        let _ = writeln!(out, "contexts per point: {}", per.join(" "));
                    }
                    Outcome::ok(status_code(r.status), out)
                }
                Err(e) => solve_error_outcome(&e),
            }
        }
    }
}

/// Precision and effort of two solver runs on the same file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub solver_a: SolverKind,
    pub solver_b: SolverKind,
    pub shared_vars: usize,
    pub equal: usize,
    /// Variables where `a`'s value is strictly below `b`'s.
    pub a_more_precise: usize,
    pub b_more_precise: usize,
    pub incomparable: usize,
    pub stats_a: Stats,
    pub stats_b: Stats,
}

impl CompareReport {
    /// Buckets the variables present in both assignments.
    pub fn from_results<V: crate::eqsys::Variable>(
        dom: &Domain,
        (solver_a, a): (SolverKind, &SolverResult<V>),
        (solver_b, b): (SolverKind, &SolverResult<V>),
    ) -> CompareReport {
        let mut r = CompareReport {
            solver_a,
            solver_b,
            shared_vars: 0,
            equal: 0,
            a_more_precise: 0,
            b_more_precise: 0,
            incomparable: 0,
            stats_a: a.stats,
            stats_b: b.stats,
        };
        for (v, da) in a.assignment.iter() {
            let Some(db) = b.assignment.get(v) else { continue };
            r.shared_vars += 1;
            match (dom.leq(da, db), dom.leq(db, da)) {
                (true, true) => r.equal += 1,
                (true, false) => r.a_more_precise += 1,
                (false, true) => r.b_more_precise += 1,
                (false, false) => r.incomparable += 1,
            }
        }
        r
    }

    pub fn is_consistent(&self) -> bool {
        self.equal + self.a_more_precise + self.b_more_precise + self.incomparable == self.shared_vars
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "solver_a": self.solver_a.name(),
            "solver_b": self.solver_b.name(),
            "shared_vars": self.shared_vars,
            "equal": self.equal,
            "a_more_precise": self.a_more_precise,
            "b_more_precise": self.b_more_precise,
            "incomparable": self.incomparable,
            "stats_a": stats_json(&self.stats_a),
            "stats_b": stats_json(&self.stats_b),
        })
    }
}

impl std::fmt::Display for CompareReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = (self.solver_a, self.solver_b);
        writeln!(f, "{a} vs {b}")?;
        writeln!(f, "shared variables: {}", self.shared_vars)?;
        writeln!(f, "equal: {}", self.equal)?;
        writeln!(f, "{a} more precise: {}", self.a_more_precise)?;
        writeln!(f, "{b} more precise: {}", self.b_more_precise)?;
        writeln!(f, "incomparable: {}", self.incomparable)?;
        for (k, s) in [(a, &self.stats_a), (b, &self.stats_b)] {
            writeln!(f, "{k}: vars {}, evals {}", s.vars_encountered, s.rhs_evals)?;
        }
        Ok(())
    }
}

fn compare_on<S: EquationSystem>(
    sys: &S,
    start: &S::Var,
    a: SolverKind,
    b: SolverKind,
    opts: &Options,
) -> Result<(CompareReport, bool), SolveError> {
    let ra = run(a, sys, start, opts.fuel(), &opts.limits())?;
    let rb = run(b, sys, start, opts.fuel(), &opts.limits())?;
    let exhausted = ra.status == Status::FuelExhausted || rb.status == Status::FuelExhausted;
    Ok((CompareReport::from_results(sys.domain(), (a, &ra), (b, &rb)), exhausted))
}

/// Runs two solvers (sequentially) and compares their results.
pub fn compare(text: &str, a: SolverKind, b: SolverKind, opts: &Options) -> Result<CompareReport, Outcome> {
    compare_inner(text, a, b, opts).map(|(r, _)| r)
}

fn compare_inner(text: &str, a: SolverKind, b: SolverKind, opts: &Options) -> Result<(CompareReport, bool), Outcome> {
    let input = parse_input(text).map_err(|e| Outcome::error(EXIT_USAGE, e))?;
    let res = match input {
        Input::Equations(dsl) => {
            let start = finite_start(&dsl, opts)?;
            compare_on(&dsl.to_system(), &start, a, b, opts)
        }
        Input::Scheme(s) => {
            let s = scheme_with_start(&s, opts)?;
            compare_on(&instantiate_system(&s), &s.start_var(), a, b, opts)
        }
    };
    res.map_err(|e| solve_error_outcome(&e))
}

pub fn cmd_compare(text: &str, a: SolverKind, b: SolverKind, opts: &Options) -> Outcome {
    match compare_inner(text, a, b, opts) {
        Ok((r, exhausted)) => {
            let out = if opts.json {
                format!("{}\n", r.to_json())
            } else {
                r.to_string()
            };
            Outcome::ok(if exhausted { EXIT_FUEL } else { EXIT_OK }, out)
        }
        Err(o) => o,
    }
}

/// Prints a level per point, or a call cycle that rules out levels.
pub fn cmd_check_stratified(text: &str) -> Outcome {
    let s = match parse_input(text) {
        Ok(Input::Scheme(s)) => s,
        Ok(Input::Equations(_)) => return Outcome::error(EXIT_USAGE, "expected a scheme file"),
        Err(e) => return Outcome::error(EXIT_USAGE, e),
    };
    match check_stratified(&s) {
        Stratification::Stratified(levels) => Outcome::ok(EXIT_OK, format!("{}\n", levels.display(&s))),
        Stratification::Cycle(c) => {
            let mut path: Vec<&str> = c.iter().map(|p| s.name(*p)).collect();
            path.push(s.name(c[0]));
            Outcome::ok(EXIT_FAILED, format!("not stratified: cycle {}\n", path.join(" -> ")))
        }
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    mandatory: bool,
}

/// Solves a finite-lattice equation file and checks the result against
/// the oracle.
///
/// Mandatory: closedness and the post-solution property for the lower
/// monotonization; for `tstp` also that the widening phase result is a
/// post-solution; for `tsrr` on monotone systems that the result is a
/// post-solution. Every other check is informational.
pub fn cmd_verify(text: &str, kind: SolverKind, opts: &Options) -> Outcome {
    let dsl = match parse_input(text) {
        Ok(Input::Equations(d)) => d,
        Ok(Input::Scheme(_)) => return Outcome::error(EXIT_USAGE, "verify needs an equation file"),
        Err(e) => return Outcome::error(EXIT_USAGE, e),
    };
    if !dsl.domain.is_finite() {
        return Outcome::error(
            EXIT_USAGE,
            format!("verify needs a finite lattice, not {}", dsl.domain.descriptor()),
        );
    }
    let start = match finite_start(&dsl, opts) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let sys = dsl.to_system();
    let r = match run(kind, &sys, &start, opts.fuel(), &opts.limits()) {
        Ok(r) => r,
        Err(e) => return solve_error_outcome(&e),
    };
    if r.status == Status::FuelExhausted {
        return Outcome::ok(EXIT_FUEL, format!("solver: {kind}\nstatus: {}\n", r.status));
    }
    let oracle_fail = |e: OracleError| match e {
        OracleError::Budget { .. } => Outcome::error(EXIT_BUDGET, e),
        _ => Outcome::error(EXIT_USAGE, e),
    };
    let monotone = if kind == SolverKind::Tsrr {
        match is_monotone(&sys) {
            Ok(m) => m,
            Err(e) => return oracle_fail(e),
        }
    } else {
        false
    };
    let a = &r.assignment;
    let mut checks = vec![
        Check {
            name: "closed",
            pass: is_closed(a, &sys),
            mandatory: true,
        },
        Check {
            name: "post-solution",
            pass: is_post_solution(a, &sys),
            mandatory: monotone,
        },
    ];
    match is_post_solution_lower_mono(a, &sys) {
        Ok(p) => checks.push(Check {
            name: "post-solution of lower monotonization",
            pass: p,
            mandatory: true,
        }),
        Err(e) => return oracle_fail(e),
    }
    if let Some(s0) = &r.secondary {
        checks.push(Check {
            name: "widening phase result closed",
            pass: is_closed(s0, &sys),
            mandatory: true,
        });
        checks.push(Check {
            name: "widening phase result post-solution",
            pass: is_post_solution(s0, &sys),
            mandatory: true,
        });
    }
    let mut out = format!("solver: {kind}\nstatus: {}\n", r.status);
    for c in &checks {
        let mark = if c.pass { "pass" } else { "FAIL" };
        let note = if c.mandatory { "" } else { " (informational)" };
        let _ = writeln!(out, "{mark}  {}{note}", c.name);
    }
    let ok = checks.iter().all(|c| c.pass || !c.mandatory);
    Outcome::ok(if ok { EXIT_OK } else { EXIT_FAILED }, out)
}

#[derive(Debug, Parser)]
#[command(
    name = "fixsolve",
    version,
    about = "Terminating widening/narrowing fixpoint solvers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Evaluation fuel for `warrow`.
    #[arg(long)]
    pub fuel: Option<u64>,
    /// Initial variable: NAME for equation files, POINT:CONTEXT for schemes.
    #[arg(long)]
    pub start: Option<String>,
    /// Maximum number of variables a local solver may encounter.
    #[arg(long)]
    pub var_budget: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

impl From<&Common> for Options {
    fn from(c: &Common) -> Options {
        Options {
            fuel: c.fuel,
            start: c.start.clone(),
            var_budget: c.var_budget,
            json: c.json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an equation or scheme file.
    Solve {
        file: PathBuf,
        /// tsrr, tstp, tsmp or warrow.
        #[arg(long, short, default_value = "tsmp")]
        solver: SolverKind,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the results of two solvers.
    Compare {
        file: PathBuf,
        solver_a: SolverKind,
        solver_b: SolverKind,
        #[command(flatten)]
        common: Common,
    },
    /// Check that a scheme admits levels.
    CheckStratified { file: PathBuf },
    /// Solve a finite-lattice equation file and check the result.
    Verify {
        file: PathBuf,
        #[arg(long, short, default_value = "tsmp")]
        solver: SolverKind,
        #[command(flatten)]
        common: Common,
    },
}

impl Cli {
    pub fn file(&self) -> &std::path::Path {
        match &self.command {
            Command::Solve { file, .. }
            | Command::Compare { file, .. }
            | Command::CheckStratified { file }
            | Command::Verify { file, .. } => file,
        }
    }

    /// Runs the command on already loaded file text.
    pub fn run_on(&self, text: &str) -> Outcome {
        match &self.command {
            Command::Solve { solver, common, .. } => cmd_solve(text, *solver, &common.into()),
            Command::Compare {
                solver_a,
                solver_b,
                common,
                ..
            } => cmd_compare(text, *solver_a, *solver_b, &common.into()),
            Command::CheckStratified { .. } => cmd_check_stratified(text),
            Command::Verify { solver, common, .. } => cmd_verify(text, *solver, &common.into()),
        }
    }

    pub fn run(&self) -> Outcome {
        match std::fs::read_to_string(self.file()) {
            Ok(text) => self.run_on(&text),
            Err(e) => Outcome::error(EXIT_USAGE, format!("{}: {e}", self.file().display())),
        }
    }
}
