use std::collections::{BTreeMap, BTreeSet};

use super::{Halt, Limits, PrioQueue, SolveError, SolverResult, Stats, Status};
use crate::eqsys::{Assignment, EquationSystem, Tree};
use crate::lattice::{Domain, Value};

/// Priority-driven local iteration that combines old and new values at
/// widening/narrowing points with the warrowing operator instead of
/// tracking phases.
///
/// Point detection happens after the right-hand side has been evaluated,
/// so a variable that reads itself is treated as a point on its very first
/// evaluation. Each evaluation of a right-hand side costs one unit of
/// `fuel`; when none is left the run stops with [`Status::FuelExhausted`]
/// and the partial state reached so far.
///
/// Only monotonic systems are guaranteed to terminate.
pub fn warrow_solve<S: EquationSystem>(
    sys: &S,
    start: S::Var,
    fuel: u64,
    limits: &Limits,
) -> Result<SolverResult<S::Var>, SolveError> {
    if fuel == 0 {
        return Err(SolveError::NoFuel);
    }
    let mut st = Warrowing {
        sys,
        dom: sys.domain().clone(),
        budget: limits.var_budget,
        fuel,
        sigma: BTreeMap::new(),
        infl: BTreeMap::new(),
        point: BTreeSet::new(),
        prio: BTreeMap::new(),
        queue: PrioQueue::default(),
        next_prio: 0,
        stats: Stats::default(),
    };
    let status = match st.solve(start) {
        Ok(()) => Status::Completed,
        Err(Halt::Fuel) => Status::FuelExhausted,
        Err(h) => return Err(h.into_error(sys, limits)),
    };
    Ok(SolverResult {
        assignment: Assignment::from_map(st.dom.clone(), st.sigma),
        secondary: None,
        stats: st.stats,
        status,
    })
}

struct Warrowing<'a, S: EquationSystem> {
    sys: &'a S,
    dom: Domain,
    budget: usize,
    fuel: u64,
    sigma: BTreeMap<S::Var, Value>,
    infl: BTreeMap<S::Var, BTreeSet<S::Var>>,
    point: BTreeSet<S::Var>,
    prio: BTreeMap<S::Var, i64>,
    queue: PrioQueue<S::Var>,
    next_prio: i64,
    stats: Stats,
}

impl<S: EquationSystem> Warrowing<'_, S> {
    fn solve(&mut self, y: S::Var) -> Result<(), Halt<S::Var>> {
        super::deep(|| self.solve_at_depth(y))
    }

    fn solve_at_depth(&mut self, y: S::Var) -> Result<(), Halt<S::Var>> {
        if self.sigma.contains_key(&y) {
            return Ok(());
        }
        if self.sigma.len() >= self.budget {
            return Err(Halt::Budget);
        }
        let p = self.next_prio;
        self.next_prio -= 1;
        self.prio.insert(y.clone(), p);
        self.sigma.insert(y.clone(), self.dom.bot());
        self.infl.insert(y.clone(), BTreeSet::new());
        self.stats.vars_encountered += 1;
        self.do_var(&y)?;
        self.iterate(p)
    }

    fn iterate(&mut self, n: i64) -> Result<(), Halt<S::Var>> {
        while let Some(y) = self.queue.extract_min_upto(n) {
            self.do_var(&y)?;
        }
        Ok(())
    }

    fn do_var(&mut self, y: &S::Var) -> Result<(), Halt<S::Var>> {
        if self.stats.fuel_used >= self.fuel {
            return Err(Halt::Fuel);
        }
        self.stats.fuel_used += 1;
        let mut t = self.sys.rhs(y).ok_or_else(|| Halt::Unknown(y.clone()))?;
        self.stats.rhs_evals += 1;
        let py = self.prio[y];
        let mut tmp = loop {
            match t {
                Tree::Answer(d) => break d,
                Tree::Query(z, k) => {
                    self.solve(z.clone())?;
                    if self.prio[&z] >= py {
                        self.point.insert(z.clone());
                    }
                    self.infl.get_mut(&z).expect("solved variable").insert(y.clone());
                    t = k(&self.sigma[&z]);
                }
            }
        };
        let old = &self.sigma[y];
        if self.point.remove(y) {
            if self.dom.leq(&tmp, old) {
                self.stats.narrow_apps += 1;
            } else {
                self.stats.widen_apps += 1;
            }
            tmp = self.dom.warrow(old, &tmp);
        }
        if self.dom.eq(old, &tmp) {
            return Ok(());
        }
        self.sigma.insert(y.clone(), tmp);
        let infl = std::mem::take(self.infl.get_mut(y).expect("solved variable"));
        for z in infl {
            self.queue.insert(self.prio[&z], z);
        }
        Ok(())
    }
}
