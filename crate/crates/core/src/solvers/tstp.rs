use std::collections::{BTreeMap, BTreeSet};

use super::{Halt, Limits, PrioQueue, SolveError, SolverResult, Stats, Status};
use crate::eqsys::{Assignment, EquationSystem, Tree};
use crate::lattice::{Domain, Value};

/// Two-phase local solver.
///
/// Phase 0 computes `sigma0` by widening only. A variable enters phase 1
/// once its phase-0 iteration is complete; `sigma1` starts from the
/// `sigma0` value and is improved by narrowing. Queue, priorities,
/// influence sets and points are shared between the phases.
///
/// On return, `secondary` holds `sigma0` (a closed partial post-solution)
/// and `assignment` holds `sigma1` (closed; its top-extension is a
/// post-solution of the lower monotonization).
pub fn tstp<S: EquationSystem>(sys: &S, start: S::Var, limits: &Limits) -> Result<SolverResult<S::Var>, SolveError> {
    let mut st = TwoPhase::new(sys, limits.var_budget);
    if let Err(h) = st.solve1(start, 0) {
        return Err(h.into_error(sys, limits));
    }
    debug_assert!(st.queue.is_empty());
    Ok(SolverResult {
        assignment: Assignment::from_map(st.dom.clone(), st.sigma1),
        secondary: Some(Assignment::from_map(st.dom.clone(), st.sigma0)),
        stats: st.stats,
        status: Status::Completed,
    })
}

struct TwoPhase<'a, S: EquationSystem> {
    sys: &'a S,
    dom: Domain,
    budget: usize,
    sigma0: BTreeMap<S::Var, Value>,
    sigma1: BTreeMap<S::Var, Value>,
    infl: BTreeMap<S::Var, BTreeSet<S::Var>>,
    point: BTreeSet<S::Var>,
    prio: BTreeMap<S::Var, i64>,
    queue: PrioQueue<S::Var>,
    next_prio: i64,
    stats: Stats,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Widen,
    Narrow,
}

impl<'a, S: EquationSystem> TwoPhase<'a, S> {
    fn new(sys: &'a S, budget: usize) -> Self {
        TwoPhase {
            sys,
            dom: sys.domain().clone(),
            budget,
            sigma0: BTreeMap::new(),
            sigma1: BTreeMap::new(),
            infl: BTreeMap::new(),
            point: BTreeSet::new(),
            prio: BTreeMap::new(),
            queue: PrioQueue::default(),
            next_prio: 0,
            stats: Stats::default(),
        }
    }

    fn enqueue_influenced(&mut self, y: &S::Var) {
        let infl = std::mem::take(self.infl.get_mut(y).expect("solved variable"));
        for z in infl {
            self.queue.insert(self.prio[&z], z);
        }
    }

    fn solve0(&mut self, y: S::Var) -> Result<(), Halt<S::Var>> {
        super::deep(|| self.solve0_at_depth(y))
    }

    fn solve0_at_depth(&mut self, y: S::Var) -> Result<(), Halt<S::Var>> {
        if self.sigma0.contains_key(&y) {
            return Ok(());
        }
        if self.sigma0.len() >= self.budget {
            return Err(Halt::Budget);
        }
        let p = self.next_prio;
        self.next_prio -= 1;
        self.prio.insert(y.clone(), p);
        self.sigma0.insert(y.clone(), self.dom.bot());
        self.infl.insert(y.clone(), BTreeSet::new());
        self.stats.vars_encountered += 1;
        self.do_var0(&y)?;
        self.iterate0(p)
    }

    fn iterate0(&mut self, n: i64) -> Result<(), Halt<S::Var>> {
        while let Some(y) = self.queue.extract_min_upto(n) {
            self.do_var0(&y)?;
        }
        Ok(())
    }

    fn solve1(&mut self, y: S::Var, n: i64) -> Result<(), Halt<S::Var>> {
        super::deep(|| self.solve1_at_depth(y, n))
    }

    fn solve1_at_depth(&mut self, y: S::Var, n: i64) -> Result<(), Halt<S::Var>> {
        if self.sigma1.contains_key(&y) {
            return Ok(());
        }
        self.solve0(y.clone())?;
        let init = self.sigma0[&y].clone();
        self.sigma1.insert(y.clone(), init);
        debug_assert!(self.sigma1.keys().all(|v| self.sigma0.contains_key(v)));
        self.queue.insert(self.prio[&y], y.clone());
        self.enqueue_influenced(&y);
        self.iterate1(n)
    }

    fn iterate1(&mut self, n: i64) -> Result<(), Halt<S::Var>> {
        while let Some(y) = self.queue.extract_min_upto(n) {
            let below = self.prio[&y] - 1;
            self.solve1(y.clone(), below)?;
            self.do_var1(&y)?;
        }
        Ok(())
    }

    fn eval_rhs(&mut self, y: &S::Var, phase: Phase) -> Result<Value, Halt<S::Var>> {
        let mut t = self.sys.rhs(y).ok_or_else(|| Halt::Unknown(y.clone()))?;
        self.stats.rhs_evals += 1;
        let py = self.prio[y];
        loop {
            match t {
                Tree::Answer(d) => return Ok(d),
                Tree::Query(z, k) => {
                    match phase {
                        Phase::Widen => self.solve0(z.clone())?,
                        Phase::Narrow => self.solve1(z.clone(), py - 1)?,
                    }
                    if self.prio[&z] >= py {
                        self.point.insert(z.clone());
                    }
                    self.infl.get_mut(&z).expect("solved variable").insert(y.clone());
                    let d = match phase {
                        Phase::Widen => &self.sigma0[&z],
                        Phase::Narrow => &self.sigma1[&z],
                    };
                    t = k(d);
                }
            }
        }
    }

    fn do_var0(&mut self, y: &S::Var) -> Result<(), Halt<S::Var>> {
        let isp = self.point.remove(y);
        let mut tmp = self.eval_rhs(y, Phase::Widen)?;
        let old = &self.sigma0[y];
        if isp {
            tmp = self.dom.widen(old, &tmp);
            self.stats.widen_apps += 1;
        }
        if self.dom.eq(old, &tmp) {
            return Ok(());
        }
        self.sigma0.insert(y.clone(), tmp);
        self.enqueue_influenced(y);
        Ok(())
    }

    fn do_var1(&mut self, y: &S::Var) -> Result<(), Halt<S::Var>> {
        let isp = self.point.remove(y);
        let mut tmp = self.eval_rhs(y, Phase::Narrow)?;
        let old = &self.sigma1[y];
        if isp {
            tmp = self.dom.narrow(old, &tmp);
            self.stats.narrow_apps += 1;
        }
        if self.dom.eq(old, &tmp) {
            return Ok(());
        }
        self.sigma1.insert(y.clone(), tmp);
        self.enqueue_influenced(y);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsys::{is_closed, Sym};
    use crate::fixtures;

    #[test]
    fn max_min_phases() {
        let sys = fixtures::max_min_system();
        let r = tstp(&sys, Sym::new("y1"), &Limits::default()).unwrap();
        let s0 = r.secondary.as_ref().unwrap();
        for v in ["y1", "y2", "y3"] {
            assert_eq!(s0.get(&Sym::new(v)), Some(&Value::inf()));
        }
        let s1 = &r.assignment;
        assert_eq!(s1.get(&Sym::new("y1")), Some(&Value::inf()));
        assert_eq!(s1.get(&Sym::new("y2")), Some(&Value::nat(2)));
        assert_eq!(s1.get(&Sym::new("y3")), Some(&Value::nat(3)));
        assert!(is_closed(s0, &sys) && is_closed(s1, &sys));
    }

    #[test]
    fn narrowing_result_below_widening_result() {
        let sys = crate::cli::parse_finite_file(fixtures::BOUNDED_LOOP)
            .unwrap()
            .to_system();
        let r = tstp(&sys, Sym::new("head"), &Limits::default()).unwrap();
        let s0 = r.secondary.unwrap();
        for (v, d) in r.assignment.iter() {
            assert!(sys.domain().leq(d, &s0.values()[v]));
        }
        assert_eq!(r.assignment.get(&Sym::new("head")), Some(&Value::interval(0, 100)));
    }
}
