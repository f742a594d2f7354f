//! Brute-force ground truth for finite instances: least solutions, lower
//! monotonization, post-solution and closedness checks, soundness against
//! a concrete system, and random systems.
//!
//! Everything here enumerates. Calls refuse instances whose enumeration
//! would exceed [`ENUM_BUDGET`] rather than run for a long time.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::eqsys::{eval_tree, tree_dep, Assignment, EquationSystem, Tree, Variable};
use crate::lattice::{Domain, Value};

mod galois;
mod random;

pub use galois::{
    check_sigma_closed, check_sound, ConcreteSystem, DescriptionRelation, GaloisConnection, SetExpr, StateVar,
};
pub use random::{gen_random_system, is_monotone};

/// Maximum number of assignments (or tree leaves) a single oracle call may
/// enumerate.
pub const ENUM_BUDGET: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the oracle: {needed} evaluations needed, budget is {limit}; shrink the instance")]
    Budget { needed: u128, limit: u128 },
    #[error("the oracle needs a finite lattice and an explicit variable list")]
    NotFinite,
    #[error("no fixpoint after {rounds} rounds; the system is probably not monotone")]
    NoConvergence { rounds: u64 },
    #[error("the system is not monotone")]
    NotMonotone,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
}

fn variables_of<S: EquationSystem>(sys: &S) -> Result<Vec<S::Var>, OracleError> {
    sys.variables().ok_or(OracleError::NotFinite)
}

fn rhs_of<S: EquationSystem>(sys: &S, v: &S::Var) -> Result<Tree<S::Var>, OracleError> {
    sys.rhs(v)
        .ok_or_else(|| OracleError::UnknownVariable(sys.render_var(v)))
}

/// Least solution by Jacobi iteration from bottom.
///
/// For a monotone system the iterates form an ascending chain, so at most
/// `|vars| * height + 1` rounds are needed; exceeding that is reported as
/// [`OracleError::NoConvergence`].
pub fn kleene_least_solution<S: EquationSystem>(sys: &S) -> Result<Assignment<S::Var>, OracleError> {
    let dom = sys.domain();
    let height = dom.height().ok_or(OracleError::NotFinite)?;
    let vars = variables_of(sys)?;
    let trees: Vec<Tree<S::Var>> = vars.iter().map(|v| rhs_of(sys, v)).collect::<Result<_, _>>()?;
    let mut sigma: BTreeMap<S::Var, Value> = vars.iter().map(|v| (v.clone(), dom.bot())).collect();
    let bound = vars.len() as u64 * u64::from(height) + 1;
    for _ in 0..=bound {
        let next: BTreeMap<S::Var, Value> = vars
            .iter()
            .zip(&trees)
            .map(|(v, t)| {
                (
                    v.clone(),
                    eval_tree(t, |z| sigma.get(z).cloned().unwrap_or_else(|| dom.top())),
                )
            })
            .collect();
        if next == sigma {
            return Ok(Assignment::from_map(dom.clone(), sigma));
        }
        sigma = next;
    }
    Err(OracleError::NoConvergence { rounds: bound + 1 })
}

/// All elements `d` with `lo ⊑ d`.
fn up_set(dom: &Domain, lo: &Value) -> Result<Vec<Value>, OracleError> {
    let all = dom.enumerate().ok_or(OracleError::NotFinite)?;
    Ok(all.into_iter().filter(|d| dom.leq(lo, d)).collect())
}

/// The lower monotonization of `t` at `a`: the meet of `t` evaluated under
/// every assignment `σ' ⊒ a` over `vars`. Variables outside `vars` read as
/// `a`.
///
/// Only assignments that differ on a queried path lead to different
/// results, so the search walks the tree and branches on every query over
/// the values above `a`, re-using the value of a variable that was already
/// queried on the same path. The number of leaves visited is bounded by
/// [`ENUM_BUDGET`].
pub fn lower_mono_value<V, F>(t: &Tree<V>, a: F, vars: &[V], dom: &Domain) -> Result<Value, OracleError>
where
    V: Variable,
    F: Fn(&V) -> Value,
{
    let vars: BTreeSet<&V> = vars.iter().collect();
    let mut search = LowerSearch {
        a: &a,
        vars: &vars,
        dom,
        ups: BTreeMap::new(),
        leaves: 0,
    };
    search.go(t, &mut BTreeMap::new())
}

struct LowerSearch<'a, V, F> {
    a: &'a F,
    vars: &'a BTreeSet<&'a V>,
    dom: &'a Domain,
    ups: BTreeMap<V, Vec<Value>>,
    leaves: u128,
}

impl<V: Variable, F: Fn(&V) -> Value> LowerSearch<'_, V, F> {
    fn go(&mut self, t: &Tree<V>, bound: &mut BTreeMap<V, Value>) -> Result<Value, OracleError> {
        match t {
            Tree::Answer(d) => {
                self.leaves += 1;
                if self.leaves > ENUM_BUDGET {
                    return Err(OracleError::Budget {
                        needed: self.leaves,
                        limit: ENUM_BUDGET,
                    });
                }
                Ok(d.clone())
            }
            Tree::Query(z, k) => {
                if let Some(d) = bound.get(z) {
                    let next = k(d);
                    return self.go(&next, bound);
                }
                if !self.vars.contains(z) {
                    let next = k(&(self.a)(z));
                    return self.go(&next, bound);
                }
                if !self.ups.contains_key(z) {
                    let ups = up_set(self.dom, &(self.a)(z))?;
                    self.ups.insert(z.clone(), ups);
                }
                let choices = self.ups[z].clone();
                let mut acc = self.dom.top();
                for d in choices {
                    bound.insert(z.clone(), d.clone());
                    let r = self.go(&k(&d), bound);
                    bound.remove(z);
                    acc = self.dom.meet(&acc, &r?);
                }
                Ok(acc)
            }
        }
    }
}

/// [`lower_mono_value`] by literal enumeration of every assignment above
/// `a` over `vars`; refuses when `|D|^|vars|` exceeds [`ENUM_BUDGET`].
pub fn lower_mono_value_exhaustive<V, F>(t: &Tree<V>, a: F, vars: &[V], dom: &Domain) -> Result<Value, OracleError>
where
    V: Variable,
    F: Fn(&V) -> Value,
{
    let size = dom.size().ok_or(OracleError::NotFinite)?;
    let needed = size.checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if needed > ENUM_BUDGET {
        return Err(OracleError::Budget {
            needed,
            limit: ENUM_BUDGET,
        });
    }
    let ups: Vec<Vec<Value>> = vars.iter().map(|v| up_set(dom, &a(v))).collect::<Result<_, _>>()?;
    let mut acc = dom.top();
    for_each_choice(&ups, |choice| {
        let sigma: BTreeMap<&V, &Value> = vars.iter().zip(choice).collect();
        let r = eval_tree(t, |z| sigma.get(z).map(|d| (*d).clone()).unwrap_or_else(|| a(z)));
        acc = dom.meet(&acc, &r);
    });
    Ok(acc)
}

/// Calls `f` with every element of the cartesian product of `sets`.
pub(crate) fn for_each_choice<F: FnMut(&[Value])>(sets: &[Vec<Value>], mut f: F) {
    if sets.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; sets.len()];
    let mut cur: Vec<Value> = sets.iter().map(|s| s[0].clone()).collect();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == sets.len() {
                return;
            }
            idx[i] += 1;
            if idx[i] < sets[i].len() {
                cur[i] = sets[i][idx[i]].clone();
                break;
            }
            idx[i] = 0;
            cur[i] = sets[i][0].clone();
            i += 1;
        }
    }
}

/// Whether every variable of `a` satisfies its equation as an inequality,
/// reading variables outside `a` as top.
pub fn is_post_solution<S: EquationSystem>(a: &Assignment<S::Var>, sys: &S) -> bool {
    let dom = sys.domain();
    let look = a.extend_top();
    a.iter().all(|(y, d)| match sys.rhs(y) {
        Some(t) => dom.leq(&eval_tree(&t, &look), d),
        None => false,
    })
}

/// Whether the top-extension of `a` is a post-solution of the lower
/// monotonization of `sys`. Variables outside `a` hold top and satisfy
/// their equations trivially.
pub fn is_post_solution_lower_mono<S: EquationSystem>(a: &Assignment<S::Var>, sys: &S) -> Result<bool, OracleError> {
    let dom = sys.domain();
    if !dom.is_finite() {
        return Err(OracleError::NotFinite);
    }
    let vars = variables_of(sys)?;
    for y in a.vars() {
        let t = rhs_of(sys, y)?;
        let low = lower_mono_value(&t, a.extend_top(), &vars, dom)?;
        if !dom.leq(&low, &a.top_at(y)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dependencies of `y` under the top-extension of `a`.
pub fn deps_under<S: EquationSystem>(sys: &S, y: &S::Var, a: &Assignment<S::Var>) -> Option<BTreeSet<S::Var>> {
    sys.rhs(y).map(|t| tree_dep(&t, a.extend_top()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsys::{FiniteSystem, Sym};
    use crate::fixtures;

    fn sym(s: &str) -> Sym {
        Sym::new(s)
    }

    #[test]
    fn least_solution_of_constant() {
        let dom = Domain::powerset(&["a", "b"]);
        let sys = FiniteSystem::new(dom.clone()).with(sym("y"), Tree::answer(Value::Set(0)));
        let sol = kleene_least_solution(&sys).unwrap();
        assert_eq!(sol.get(&sym("y")), Some(&Value::Set(0)));
    }

    #[test]
    fn least_solution_mutual() {
        let text = "lattice powerset a b\nvar y1 = join (get y2) (lit {a})\nvar y2 = get y1\n";
        let sys = crate::cli::parse_finite_file(text).unwrap().to_system();
        let sol = kleene_least_solution(&sys).unwrap();
        assert_eq!(sol.get(&sym("y1")), Some(&Value::Set(1)));
        assert_eq!(sol.get(&sym("y2")), Some(&Value::Set(1)));
    }

    #[test]
    fn oscillation_is_reported() {
        let sys = fixtures::oscillating_dsl(Domain::chain(4)).to_system();
        assert!(matches!(
            kleene_least_solution(&sys),
            Err(OracleError::NoConvergence { .. })
        ));
    }

    #[test]
    fn lower_mono_of_oscillation_is_bottom() {
        let dom = Domain::chain(4);
        let sys = fixtures::oscillating_dsl(dom.clone()).to_system();
        let t = sys.rhs(&sym("y1")).unwrap();
        let vars = [sym("y1")];
        for (a, want) in [(0, 0), (1, 0), (3, 0)] {
            let low = lower_mono_value(&t, |_| Value::Chain(a), &vars, &dom).unwrap();
            assert_eq!(low, Value::Chain(want));
            assert_eq!(
                lower_mono_value_exhaustive(&t, |_| Value::Chain(a), &vars, &dom).unwrap(),
                low
            );
        }
    }

    #[test]
    fn lower_mono_of_monotone_and_constant() {
        let dom = Domain::chain(4);
        let t = crate::eqsys::compile_rhs_dsl(
            &crate::eqsys::Rhs::join(crate::eqsys::Rhs::get("y"), crate::eqsys::Rhs::Lit(Value::Chain(1))),
            &dom,
        );
        let vars = [sym("y")];
        assert_eq!(
            lower_mono_value(&t, |_| Value::Chain(2), &vars, &dom).unwrap(),
            Value::Chain(2)
        );
        let c: Tree<Sym> = Tree::answer(Value::Chain(3));
        assert_eq!(
            lower_mono_value(&c, |_| Value::Chain(0), &vars, &dom).unwrap(),
            Value::Chain(3)
        );
    }

    #[test]
    fn post_solutions_of_max_min() {
        let sys = fixtures::max_min_system();
        let dom = Domain::natinf();
        let mk = |a: u64, b: u64, c: u64| {
            Assignment::from_map(
                dom.clone(),
                [
                    (sym("y1"), Value::nat(a)),
                    (sym("y2"), Value::nat(b)),
                    (sym("y3"), Value::nat(c)),
                ]
                .into(),
            )
        };
        assert!(is_post_solution(&mk(2, 2, 3), &sys));
        assert!(!is_post_solution(&mk(0, 0, 0), &sys));
        assert!(is_post_solution(&Assignment::new(dom), &sys));
    }

    #[test]
    fn lower_mono_post_solutions() {
        let dom = Domain::chain(4);
        let sys = fixtures::oscillating_dsl(dom.clone()).to_system();
        let one = Assignment::from_map(dom.clone(), [(sym("y1"), Value::Chain(1))].into());
        assert!(is_post_solution_lower_mono(&one, &sys).unwrap());
        assert!(is_post_solution_lower_mono(&Assignment::new(dom.clone()), &sys).unwrap());
        // not a post-solution of the original system
        let zero = Assignment::from_map(dom, [(sym("y1"), Value::Chain(0))].into());
        assert!(!is_post_solution(&zero, &sys));
        assert!(is_post_solution_lower_mono(&zero, &sys).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let atoms: Vec<String> = (0..20).map(|i| format!("a{i}")).collect();
        let dom = Domain::powerset(&atoms);
        let vars = [sym("y1"), sym("y2")];
        let t: Tree<Sym> = Tree::answer(dom.bot());
        assert!(matches!(
            lower_mono_value_exhaustive(&t, |_| dom.bot(), &vars, &dom),
            Err(OracleError::Budget { .. })
        ));
    }
}
