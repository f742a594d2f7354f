use std::collections::BTreeMap;

use super::{SolveError, SolverResult, Stats, Status};
use crate::eqsys::{try_eval_tree, Assignment, EquationSystem, Tree, Variable};
use crate::lattice::{Domain, Value};

/// Structured round-robin iteration over a finite list of variables.
///
/// `vars` is ordered by decreasing priority: `vars[0]` has the highest
/// priority and is iterated last in each round. A flag records whether the
/// variable under consideration has already reached a sound value; once it
/// has, only narrowing is applied to it.
pub fn tsrr<S: EquationSystem>(sys: &S, vars: &[S::Var]) -> Result<SolverResult<S::Var>, SolveError> {
    let mut rhs = Vec::with_capacity(vars.len());
    for v in vars.iter().rev() {
        rhs.push(
            sys.rhs(v)
                .ok_or_else(|| SolveError::UnknownVariable(sys.render_var(v)))?,
        );
    }
    let dom = sys.domain().clone();
    let mut st = RoundRobin {
        // index i-1 holds the variable of priority i
        vars: vars.iter().rev().cloned().collect(),
        rhs,
        sigma: vars.iter().map(|v| (v.clone(), dom.bot())).collect(),
        dom,
        stats: Stats {
            vars_encountered: vars.len(),
            ..Stats::default()
        },
    };
    st.solve(false, vars.len())
        .map_err(|v| SolveError::UnknownVariable(sys.render_var(&v)))?;
    Ok(SolverResult {
        assignment: Assignment::from_map(st.dom.clone(), st.sigma),
        secondary: None,
        stats: st.stats,
        status: Status::Completed,
    })
}

struct RoundRobin<V> {
    vars: Vec<V>,
    rhs: Vec<Tree<V>>,
    sigma: BTreeMap<V, Value>,
    dom: Domain,
    stats: Stats,
}

impl<V: Variable> RoundRobin<V> {
    fn solve(&mut self, mut b: bool, i: usize) -> Result<(), V> {
        if i == 0 {
            return Ok(());
        }
        loop {
            self.solve(b, i - 1)?;
            let y = &self.vars[i - 1];
            self.stats.rhs_evals += 1;
            let sigma = &self.sigma;
            let tmp = try_eval_tree(&self.rhs[i - 1], |z| sigma.get(z).cloned().ok_or_else(|| z.clone()))?;
            let old = &self.sigma[y];
            let mut b1 = b;
            let tmp = if b {
                self.stats.narrow_apps += 1;
                self.dom.narrow(old, &tmp)
            } else if self.dom.leq(&tmp, old) {
                b1 = true;
                self.stats.narrow_apps += 1;
                self.dom.narrow(old, &tmp)
            } else {
                self.stats.widen_apps += 1;
                self.dom.widen(old, &tmp)
            };
            if self.dom.eq(old, &tmp) {
                return Ok(());
            }
            self.sigma.insert(y.clone(), tmp);
            // tail call solve(b', i)
            b = b1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsys::Sym;
    use crate::fixtures;

    #[test]
    fn oscillation_terminates() {
        let sys = fixtures::oscillating_dsl(Domain::natinf()).to_system();
        let r = tsrr(&sys, &[Sym::new("y1")]).unwrap();
        assert_eq!(r.assignment.get(&Sym::new("y1")), Some(&Value::nat(0)));
    }

    #[test]
    fn reaches_every_listed_variable() {
        let sys = crate::cli::parse_finite_file(fixtures::REACH).unwrap().to_system();
        let r = tsrr(&sys, sys.order()).unwrap();
        assert_eq!(r.assignment.len(), 3);
        assert_eq!(r.assignment.get(&Sym::new("b")), Some(&Value::Set(0b111)));
    }

    #[test]
    fn unknown_variable() {
        let sys = crate::eqsys::FiniteSystem::new(Domain::natinf())
            .with(Sym::new("a"), Tree::query(Sym::new("b"), |d| Tree::answer(d.clone())));
        assert_eq!(
            tsrr(&sys, &[Sym::new("a")]).unwrap_err(),
            SolveError::UnknownVariable("b".into())
        );
    }
}
