use std::collections::{BTreeMap, BTreeSet};

use super::{Halt, Limits, PrioQueue, SolveError, SolverResult, Stats, Status};
use crate::eqsys::{Assignment, EquationSystem, Tree};
use crate::lattice::{Domain, Value};

/// Mixed-phase local solver. Every variable is iterated first in widening
/// mode and then in narrowing mode; after an update during widening, the
/// lower-priority variables it influences are stabilized (with both
/// operators) before widening resumes.
///
/// Terminates whenever only finitely many variables are encountered. The
/// returned assignment is closed, and its top-extension is a post-solution
/// of the lower monotonization of the system.
pub fn tsmp<S: EquationSystem>(sys: &S, start: S::Var, limits: &Limits) -> Result<SolverResult<S::Var>, SolveError> {
    let mut st = Mixed::new(sys, limits.var_budget);
    match st.solve(start) {
        Ok(()) => {}
        Err(h) => return Err(h.into_error(sys, limits)),
    }
    debug_assert!(st.queue.is_empty());
    Ok(SolverResult {
        assignment: Assignment::from_map(st.dom.clone(), st.sigma),
        secondary: None,
        stats: st.stats,
        status: Status::Completed,
    })
}

struct Mixed<'a, S: EquationSystem> {
    sys: &'a S,
    dom: Domain,
    budget: usize,
    sigma: BTreeMap<S::Var, Value>,
    infl: BTreeMap<S::Var, BTreeSet<S::Var>>,
    point: BTreeSet<S::Var>,
    prio: BTreeMap<S::Var, i64>,
    queue: PrioQueue<S::Var>,
    next_prio: i64,
    stats: Stats,
}

impl<'a, S: EquationSystem> Mixed<'a, S> {
    fn new(sys: &'a S, budget: usize) -> Self {
        Mixed {
            sys,
            dom: sys.domain().clone(),
            budget,
            sigma: BTreeMap::new(),
            infl: BTreeMap::new(),
            point: BTreeSet::new(),
            prio: BTreeMap::new(),
            queue: PrioQueue::default(),
            next_prio: 0,
            stats: Stats::default(),
        }
    }

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
        let b = self.do_var(false, &y)?;
        self.iterate(b, p)
    }

    fn iterate(&mut self, mut b: bool, n: i64) -> Result<(), Halt<S::Var>> {
        while let Some(y) = self.queue.extract_min_upto(n) {
            let b1 = self.do_var(b, &y)?;
            let n1 = self.prio[&y];
            if b != b1 && n > n1 {
                self.iterate(b1, n1)?;
            } else {
                b = b1;
            }
        }
        Ok(())
    }

    fn eval_rhs(&mut self, y: &S::Var) -> Result<Value, Halt<S::Var>> {
        let mut t = self.sys.rhs(y).ok_or_else(|| Halt::Unknown(y.clone()))?;
        self.stats.rhs_evals += 1;
        let py = self.prio[y];
        loop {
            match t {
                Tree::Answer(d) => return Ok(d),
                Tree::Query(z, k) => {
                    self.solve(z.clone())?;
                    if self.prio[&z] >= py {
                        self.point.insert(z.clone());
                    }
                    self.infl.get_mut(&z).expect("solved variable").insert(y.clone());
                    t = k(&self.sigma[&z]);
                }
            }
        }
    }

    fn do_var(&mut self, b: bool, y: &S::Var) -> Result<bool, Halt<S::Var>> {
        let isp = self.point.remove(y);
        let mut tmp = self.eval_rhs(y)?;
        let old = &self.sigma[y];
        let mut b1 = b;
        if isp {
            if b {
                tmp = self.dom.narrow(old, &tmp);
                self.stats.narrow_apps += 1;
            } else if self.dom.leq(&tmp, old) {
                tmp = self.dom.narrow(old, &tmp);
                self.stats.narrow_apps += 1;
                b1 = true;
            } else {
                tmp = self.dom.widen(old, &tmp);
                self.stats.widen_apps += 1;
            }
        }
        if self.dom.eq(old, &tmp) {
            return Ok(true);
        }
        self.sigma.insert(y.clone(), tmp);
        let infl = std::mem::take(self.infl.get_mut(y).expect("solved variable"));
        for z in infl {
            self.queue.insert(self.prio[&z], z);
        }
        Ok(b1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsys::{is_closed, Sym};
    use crate::fixtures;
    use crate::lattice::Value;

    fn at(r: &SolverResult<Sym>, v: &str) -> Value {
        r.assignment.get(&Sym::new(v)).cloned().expect("variable in result")
    }

    #[test]
    fn max_min() {
        let r = tsmp(&fixtures::max_min_system(), Sym::new("y1"), &Limits::default()).unwrap();
        assert_eq!(
            [at(&r, "y1"), at(&r, "y2"), at(&r, "y3")],
            [Value::nat(2), Value::nat(2), Value::nat(3)]
        );
        assert_eq!(r.status, Status::Completed);
    }

    #[test]
    fn oscillation_terminates() {
        let sys = fixtures::oscillating_dsl(Domain::natinf()).to_system();
        let r = tsmp(&sys, Sym::new("y1"), &Limits::default()).unwrap();
        assert_eq!(at(&r, "y1"), Value::nat(1));
        assert!(r.stats.rhs_evals <= 5);
    }

    #[test]
    fn constant_needs_one_evaluation() {
        let sys = crate::eqsys::FiniteSystem::new(Domain::natinf()).with(Sym::new("y"), Tree::answer(Value::nat(5)));
        let r = tsmp(&sys, Sym::new("y"), &Limits::default()).unwrap();
        assert_eq!(at(&r, "y"), Value::nat(5));
        assert_eq!(r.stats.rhs_evals, 1);
    }

    #[test]
    fn local_and_closed() {
        let text = "lattice natinf\nvar a = get b\nvar b = lit 3\nvar c = get a\n";
        let sys = crate::cli::parse_finite_file(text).unwrap().to_system();
        let r = tsmp(&sys, Sym::new("a"), &Limits::default()).unwrap();
        assert_eq!(r.assignment.len(), 2);
        assert!(is_closed(&r.assignment, &sys));
    }

    #[test]
    fn unknown_and_budget() {
        let sys = crate::eqsys::FiniteSystem::new(Domain::natinf())
            .with(Sym::new("a"), Tree::query(Sym::new("zz"), |d| Tree::answer(d.clone())));
        assert_eq!(
            tsmp(&sys, Sym::new("a"), &Limits::default()).unwrap_err(),
            SolveError::UnknownVariable("zz".into())
        );
        let r = tsmp(&fixtures::max_min_system(), Sym::new("y1"), &Limits { var_budget: 2 });
        assert_eq!(r.unwrap_err(), SolveError::BudgetExceeded { limit: 2 });
    }
}
