//! Terminating widening/narrowing solvers.
//!
//! * [`tsrr`]: structured round-robin iteration over an explicit variable
//!   list.
//! * [`tstp`]: local two-phase solver; a widening phase computes `sigma0`,
//!   a narrowing phase started from it computes `sigma1`.
//! * [`tsmp`]: local mixed-phase solver; widening and narrowing intertwined
//!   on one assignment, steered by a Boolean phase flag.
//! * [`warrow_solve`]: the mixed-phase skeleton without flags, combining
//!   old and new values by warrowing. May diverge; bounded by fuel.
//!
//! The local solvers assign priorities `0, -1, -2, ...` in discovery order
//! and detect widening/narrowing points dynamically: a variable becomes a
//! point when it is read while evaluating a variable of no higher
//! priority.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eqsys::{Assignment, EquationSystem};

mod queue;
mod tsmp;
mod tsrr;
mod tstp;
mod warrow;

pub use queue::PrioQueue;
pub use tsmp::tsmp;
pub use tsrr::tsrr;
pub use tstp::tstp;
pub use warrow::warrow_solve;

pub const DEFAULT_VAR_BUDGET: usize = 1_000_000;
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub vars_encountered: usize,
    pub rhs_evals: u64,
    pub widen_apps: u64,
    pub narrow_apps: u64,
    pub fuel_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    FuelExhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Completed => "completed",
            Status::FuelExhausted => "fuel_exhausted",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult<V> {
    /// `sigma` for round-robin, mixed-phase and warrowing; `sigma1` for
    /// the two-phase solver.
    pub assignment: Assignment<V>,
    /// `sigma0` of the two-phase solver.
    pub secondary: Option<Assignment<V>>,
    pub stats: Stats,
    pub status: Status,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("unknown variable `{0}` queried by a right-hand side")]
    UnknownVariable(String),
    #[error("variable budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("fuel must be at least 1")]
    NoFuel,
    #[error("round-robin iteration needs an explicitly finite system")]
    NotFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of distinct variables a local solver may encounter.
    pub var_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            var_budget: DEFAULT_VAR_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Tsrr,
    Tstp,
    Tsmp,
    Warrow,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp, SolverKind::Warrow];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Tsrr => "tsrr",
            SolverKind::Tstp => "tstp",
            SolverKind::Tsmp => "tsmp",
            SolverKind::Warrow => "warrow",
        }
    }

    /// Whether the solver works on demand from a start variable.
    pub fn is_local(self) -> bool {
        self != SolverKind::Tsrr
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown solver `{s}` (expected tsrr, tstp, tsmp or warrow)"))
    }
}

/// Runs `f` with enough stack for one more level of solver recursion.
/// Nesting depth grows with the number of variables discovered, so deep
/// runs move to heap-allocated stack segments.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(128 * 1024, 8 * 1024 * 1024, f)
}

/// Why a run stopped early. Internal to the solvers.
#[derive(Debug)]
pub(crate) enum Halt<V> {
    Unknown(V),
    Budget,
    Fuel,
}

impl<V> Halt<V> {
    pub(crate) fn into_error<S>(self, sys: &S, limits: &Limits) -> SolveError
    where
        S: EquationSystem<Var = V>,
    {
        match self {
            Halt::Unknown(v) => SolveError::UnknownVariable(sys.render_var(&v)),
            Halt::Budget => SolveError::BudgetExceeded {
                limit: limits.var_budget,
            },
            Halt::Fuel => unreachable!("fuel exhaustion is a status, not an error"),
        }
    }
}

/// Solves `sys` with the chosen solver. Local solvers start at `start`;
/// round-robin iteration uses `sys.variables()` in order, highest priority
/// first.
pub fn run<S: EquationSystem>(
    kind: SolverKind,
    sys: &S,
    start: &S::Var,
    fuel: u64,
    limits: &Limits,
) -> Result<SolverResult<S::Var>, SolveError> {
    match kind {
        SolverKind::Tsrr => {
            let vars = sys.variables().ok_or(SolveError::NotFinite)?;
            tsrr(sys, &vars)
        }
        SolverKind::Tstp => tstp(sys, start.clone(), limits),
        SolverKind::Tsmp => tsmp(sys, start.clone(), limits),
        SolverKind::Warrow => warrow_solve(sys, start.clone(), fuel, limits),
    }
}
