use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{is_monotone, kleene_least_solution, OracleError};
use crate::eqsys::{tree_dep, Assignment, EquationSystem, FiniteSystem, Tree, Variable};
use crate::lattice::{Bound, Domain, Interval, LatticeDescriptor, Value};

/// A finite concrete system over the powerset of a state set. All
/// right-hand sides are monotone.
#[derive(Clone, Debug)]
pub struct ConcreteSystem<V: Variable> {
    states: Vec<String>,
    sys: FiniteSystem<V>,
}

impl<V: Variable> ConcreteSystem<V> {
    /// Wraps a finite system over a powerset lattice after checking
    /// exhaustively that it is monotone.
    pub fn from_system(sys: FiniteSystem<V>) -> Result<ConcreteSystem<V>, OracleError> {
        let LatticeDescriptor::Powerset(states) = sys.domain().descriptor().clone() else {
            return Err(OracleError::NotFinite);
        };
        if !is_monotone(&sys)? {
            return Err(OracleError::NotMonotone);
        }
        Ok(ConcreteSystem { states, sys })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn system(&self) -> &FiniteSystem<V> {
        &self.sys
    }
}

impl<V: Variable> EquationSystem for ConcreteSystem<V> {
    type Var = V;

    fn domain(&self) -> &Domain {
        self.sys.domain()
    }

    fn rhs(&self, v: &V) -> Option<Tree<V>> {
        self.sys.rhs(v)
    }

    fn variables(&self) -> Option<Vec<V>> {
        Some(self.sys.order().to_vec())
    }
}

/// The variable `<point, state>` of a concrete scheme.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVar {
    pub point: Arc<str>,
    pub state: Arc<str>,
}

impl StateVar {
    pub fn new(point: &str, state: &str) -> StateVar {
        StateVar {
            point: Arc::from(point),
            state: Arc::from(state),
        }
    }
}

impl fmt::Display for StateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.point, self.state)
    }
}

/// Set-valued expressions of a concrete scheme, instantiated once per
/// state `q`. Sets are bit masks over the state list.
#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    /// `{q}`
    Ctx,
    Lit(u64),
    Union(Box<SetExpr>, Box<SetExpr>),
    /// Union of `<point, q'>` over all `q'` in the argument.
    Cells(usize, Box<SetExpr>),
    /// Union of `table[q']` over all `q'` in the argument.
    Image(Vec<u64>, Box<SetExpr>),
}

impl SetExpr {
    pub fn union(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn cells(point: usize, arg: SetExpr) -> SetExpr {
        SetExpr::Cells(point, Box::new(arg))
    }

    pub fn image(table: Vec<u64>, arg: SetExpr) -> SetExpr {
        SetExpr::Image(table, Box::new(arg))
    }
}

type SetKont = Arc<dyn Fn(u64) -> Tree<StateVar> + Send + Sync>;

#[derive(Clone)]
struct SchemeShape {
    points: Arc<[String]>,
    states: Arc<[String]>,
}

fn set_cps(e: &SetExpr, q: usize, shape: &SchemeShape, k: SetKont) -> Tree<StateVar> {
    match e {
        SetExpr::Ctx => k(1 << q),
        SetExpr::Lit(m) => k(*m),
        SetExpr::Union(a, b) => {
            let (b, shape2) = ((**b).clone(), shape.clone());
            set_cps(
                a,
                q,
                shape,
                Arc::new(move |ma| {
                    let k = Arc::clone(&k);
                    set_cps(&b, q, &shape2, Arc::new(move |mb| k(ma | mb)))
                }),
            )
        }
        SetExpr::Image(table, arg) => {
            let table = table.clone();
            set_cps(
                arg,
                q,
                shape,
                Arc::new(move |m| {
                    k((0..table.len())
                        .filter(|i| m & (1 << i) != 0)
                        .fold(0, |acc, i| acc | table[i]))
                }),
            )
        }
        SetExpr::Cells(p, arg) => {
            let (p, shape2) = (*p, shape.clone());
            set_cps(
                arg,
                q,
                shape,
                Arc::new(move |m| {
                    let members: Vec<usize> = (0..shape2.states.len()).filter(|i| m & (1 << i) != 0).collect();
                    read_all(p, members, 0, 0, &shape2, Arc::clone(&k))
                }),
            )
        }
    }
}

fn read_all(p: usize, members: Vec<usize>, i: usize, acc: u64, shape: &SchemeShape, k: SetKont) -> Tree<StateVar> {
    if i == members.len() {
        return k(acc);
    }
    let var = StateVar::new(&shape.points[p], &shape.states[members[i]]);
    let shape2 = shape.clone();
    Tree::query(var, move |d| {
        let Value::Set(m) = d else {
            panic!("concrete value {d:?} is not a set")
        };
        read_all(p, members.clone(), i + 1, acc | m, &shape2, Arc::clone(&k))
    })
}

impl ConcreteSystem<StateVar> {
    /// Instantiates `<u, q> = e_u` for every point `u` and state `q`.
    /// Variables are ordered point by point.
    pub fn from_scheme(states: &[&str], points: &[(&str, SetExpr)]) -> ConcreteSystem<StateVar> {
        let dom = Domain::powerset(states);
        let shape = SchemeShape {
            points: points.iter().map(|(n, _)| n.to_string()).collect(),
            states: states.iter().map(|s| s.to_string()).collect(),
        };
        let mut sys = FiniteSystem::new(dom);
        for (name, e) in points {
            for (q, s) in states.iter().enumerate() {
                sys.define(
                    StateVar::new(name, s),
                    set_cps(e, q, &shape, Arc::new(|m| Tree::Answer(Value::Set(m)))),
                );
            }
        }
        ConcreteSystem {
            states: shape.states.to_vec(),
            sys,
        }
    }
}

type ValueMap = Arc<dyn Fn(&Value) -> Value + Send + Sync>;

/// An abstraction `alpha` and concretization `gamma` between a finite
/// powerset domain and an abstract domain.
#[derive(Clone)]
pub struct GaloisConnection {
    name: &'static str,
    concrete: Domain,
    abstract_dom: Domain,
    alpha: ValueMap,
    gamma: ValueMap,
}

impl fmt::Debug for GaloisConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaloisConnection({})", self.name)
    }
}

impl GaloisConnection {
    pub fn identity(dom: &Domain) -> GaloisConnection {
        GaloisConnection {
            name: "identity",
            concrete: dom.clone(),
            abstract_dom: dom.clone(),
            alpha: Arc::new(Value::clone),
            gamma: Arc::new(Value::clone),
        }
    }

    /// Sets of integers (powerset atoms named by integers) abstracted by
    /// their interval hull.
    pub fn interval_hull(concrete: &Domain) -> Result<GaloisConnection, String> {
        let LatticeDescriptor::Powerset(atoms) = concrete.descriptor() else {
            return Err("the concrete domain must be a powerset".into());
        };
        let nums: Vec<i64> = atoms
            .iter()
            .map(|a| a.parse().map_err(|_| format!("atom `{a}` is not an integer")))
            .collect::<Result<_, _>>()?;
        let n1 = Arc::new(nums);
        let n2 = Arc::clone(&n1);
        let alpha = move |c: &Value| {
            let Value::Set(m) = c else { panic!("not a set: {c:?}") };
            let members = n1
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, x)| *x);
            let (lo, hi) = members.fold((None, None), |(lo, hi): (Option<i64>, Option<i64>), x| {
                (Some(lo.map_or(x, |l| l.min(x))), Some(hi.map_or(x, |h| h.max(x))))
            });
            match (lo, hi) {
                (Some(l), Some(h)) => Value::interval(l, h),
                _ => Value::bot_interval(),
            }
        };
        let gamma = move |d: &Value| {
            let Value::Interval(iv) = d else {
                panic!("not an interval: {d:?}")
            };
            let mut m = 0u64;
            if let Interval::Range(lo, hi) = iv {
                for (i, x) in n2.iter().enumerate() {
                    let b = Bound::Fin(*x);
                    if *lo <= b && b <= *hi {
                        m |= 1 << i;
                    }
                }
            }
            Value::Set(m)
        };
        Ok(GaloisConnection {
            name: "interval hull",
            concrete: concrete.clone(),
            abstract_dom: Domain::interval(),
            alpha: Arc::new(alpha),
            gamma: Arc::new(gamma),
        })
    }

    pub fn concrete(&self) -> &Domain {
        &self.concrete
    }

    pub fn abstract_domain(&self) -> &Domain {
        &self.abstract_dom
    }

    pub fn alpha(&self, c: &Value) -> Value {
        (self.alpha)(c)
    }

    pub fn gamma(&self, d: &Value) -> Value {
        (self.gamma)(d)
    }

    /// Abstract elements worth checking: all of them for finite abstract
    /// domains; for intervals, every interval whose finite bounds lie one
    /// step around the atoms, plus the infinite bounds and bottom.
    fn abstract_samples(&self) -> Vec<Value> {
        if let Some(all) = self.abstract_dom.enumerate() {
            return all;
        }
        let LatticeDescriptor::Powerset(atoms) = self.concrete.descriptor() else {
            return vec![];
        };
        let nums: BTreeSet<i64> = atoms.iter().filter_map(|a| a.parse::<i64>().ok()).collect();
        let mut bounds: BTreeSet<Bound> = [Bound::NegInf, Bound::PosInf].into();
        for x in nums {
            for y in [x - 1, x, x + 1] {
                bounds.insert(Bound::Fin(y));
            }
        }
        let mut out = vec![Value::bot_interval()];
        for lo in &bounds {
            for hi in &bounds {
                if lo <= hi && *lo != Bound::PosInf && *hi != Bound::NegInf {
                    out.push(Value::range(*lo, *hi));
                }
            }
        }
        out
    }

    /// `alpha(c) ⊑ d` iff `c ⊆ gamma(d)`, for every concrete `c` and every
    /// sampled abstract `d`.
    pub fn check_adjunction(&self) -> bool {
        let Some(cs) = self.concrete.enumerate() else {
            return false;
        };
        let ds = self.abstract_samples();
        cs.iter().all(|c| {
            let a = self.alpha(c);
            ds.iter()
                .all(|d| self.abstract_dom.leq(&a, d) == self.concrete.leq(c, &self.gamma(d)))
        })
    }
}

/// Which concrete variable is described by which abstract variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionRelation<X, Y> {
    pairs: Vec<(X, Y)>,
}

impl<X: Variable, Y: Variable> DescriptionRelation<X, Y> {
    pub fn new(pairs: Vec<(X, Y)>) -> Self {
        DescriptionRelation { pairs }
    }

    pub fn pairs(&self) -> &[(X, Y)] {
        &self.pairs
    }

    /// Concrete variables related to any of `ys`.
    pub fn preimage<'a, I: IntoIterator<Item = &'a Y>>(&self, ys: I) -> BTreeSet<X> {
        let ys: BTreeSet<&Y> = ys.into_iter().collect();
        self.pairs
            .iter()
            .filter(|(_, y)| ys.contains(y))
            .map(|(x, _)| x.clone())
            .collect()
    }
}

impl<X: Variable> DescriptionRelation<X, X> {
    pub fn identity<I: IntoIterator<Item = X>>(vars: I) -> Self {
        DescriptionRelation {
            pairs: vars.into_iter().map(|x| (x.clone(), x)).collect(),
        }
    }
}

/// Whether the least solution of `conc` is described by `abs` (read as
/// top outside its domain) along `r`.
pub fn check_sound<X: Variable, Y: Variable>(
    conc: &ConcreteSystem<X>,
    abs: &Assignment<Y>,
    g: &GaloisConnection,
    r: &DescriptionRelation<X, Y>,
) -> Result<bool, OracleError> {
    let sigma = kleene_least_solution(conc)?;
    let cdom = conc.domain();
    Ok(r.pairs().iter().all(|(x, y)| match sigma.get(x) {
        Some(c) => cdom.leq(c, &g.gamma(&abs.top_at(y))),
        None => false,
    }))
}

/// Whether every member of `subset` only depends on members of `subset`
/// under `sol`.
pub fn check_sigma_closed<X: Variable>(conc: &ConcreteSystem<X>, sol: &Assignment<X>, subset: &BTreeSet<X>) -> bool {
    subset.iter().all(|x| match conc.rhs(x) {
        Some(t) => tree_dep(&t, sol.extend_top()).is_subset(subset),
        None => false,
    })
}
