//! Pure right-hand sides as computation trees, partial assignments and the
//! closedness check used by local solvers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::lattice::{Domain, Value};

pub mod dsl;

pub use dsl::{compile_rhs_dsl, Cmp, DslSystem, Rhs};

/// Anything usable as an unknown of an equation system.
pub trait Variable: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {}

impl<T> Variable for T where T: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// Interned variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Sym {
        Sym(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Sym {
        Sym::new(s)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Cont<V> = Arc<dyn Fn(&Value) -> Tree<V> + Send + Sync>;

/// A right-hand side: either a final answer, or a variable lookup whose
/// result selects the rest of the computation.
pub enum Tree<V> {
    Answer(Value),
    Query(V, Cont<V>),
}

impl<V> Clone for Tree<V>
where
    V: Clone,
{
    fn clone(&self) -> Self {
        match self {
            Tree::Answer(d) => Tree::Answer(d.clone()),
            Tree::Query(v, k) => Tree::Query(v.clone(), Arc::clone(k)),
        }
    }
}

impl<V: fmt::Debug> fmt::Debug for Tree<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Answer(d) => write!(f, "Answer({d:?})"),
            Tree::Query(v, _) => write!(f, "Query({v:?}, ..)"),
        }
    }
}

impl<V> Tree<V> {
    pub fn answer(d: Value) -> Tree<V> {
        Tree::Answer(d)
    }

    pub fn query<F>(v: V, k: F) -> Tree<V>
    where
        F: Fn(&Value) -> Tree<V> + Send + Sync + 'static,
    {
        Tree::Query(v, Arc::new(k))
    }
}

/// Runs a tree against a total lookup.
pub fn eval_tree<V, F>(t: &Tree<V>, mut lookup: F) -> Value
where
    V: Clone,
    F: FnMut(&V) -> Value,
{
    let mut cur = t.clone();
    loop {
        match cur {
            Tree::Answer(d) => return d,
            Tree::Query(v, k) => {
                let d = lookup(&v);
                cur = k(&d);
            }
        }
    }
}

/// Fallible variant of [`eval_tree`]; stops at the first lookup error.
pub fn try_eval_tree<V, E, F>(t: &Tree<V>, mut lookup: F) -> Result<Value, E>
where
    V: Clone,
    F: FnMut(&V) -> Result<Value, E>,
{
    let mut cur = t.clone();
    loop {
        match cur {
            Tree::Answer(d) => return Ok(d),
            Tree::Query(v, k) => {
                let d = lookup(&v)?;
                cur = k(&d);
            }
        }
    }
}

/// The variables a tree reads under `lookup`: empty for an answer, the
/// queried variable plus the dependencies of the selected subtree otherwise.
pub fn tree_dep<V, F>(t: &Tree<V>, lookup: F) -> BTreeSet<V>
where
    V: Ord + Clone,
    F: Fn(&V) -> Value,
{
    fn go<V: Ord + Clone>(t: &Tree<V>, lookup: &dyn Fn(&V) -> Value, acc: &mut BTreeSet<V>) {
        match t {
            Tree::Answer(_) => {}
            Tree::Query(y, k) => {
                acc.insert(y.clone());
                go(&k(&lookup(y)), lookup, acc);
            }
        }
    }
    let mut acc = BTreeSet::new();
    go(t, &lookup, &mut acc);
    acc
}

/// A finite partial map from variables to values of one lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<V> {
    domain: Domain,
    values: BTreeMap<V, Value>,
}

impl<V: Ord + Clone> Assignment<V> {
    pub fn new(domain: Domain) -> Assignment<V> {
        Assignment {
            domain,
            values: BTreeMap::new(),
        }
    }

    pub fn from_map(domain: Domain, values: BTreeMap<V, Value>) -> Assignment<V> {
        debug_assert!(values.values().all(|v| domain.contains(v)));
        Assignment { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn get(&self, v: &V) -> Option<&Value> {
        self.values.get(v)
    }

    pub fn insert(&mut self, v: V, d: Value) {
        debug_assert!(self.domain.contains(&d));
        self.values.insert(v, d);
    }

    pub fn contains(&self, v: &V) -> bool {
        self.values.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The variables on which the assignment is defined.
    pub fn vars(&self) -> impl Iterator<Item = &V> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&V, &Value)> {
        self.values.iter()
    }

    pub fn values(&self) -> &BTreeMap<V, Value> {
        &self.values
    }

    /// Value at `v`, or top outside the domain.
    pub fn top_at(&self, v: &V) -> Value {
        self.values.get(v).cloned().unwrap_or_else(|| self.domain.top())
    }

    /// The total lookup that defaults to top outside the domain.
    pub fn extend_top(&self) -> impl Fn(&V) -> Value + '_ {
        move |v| self.top_at(v)
    }
}

/// An abstract equation system `y = f_y`. Systems may be infinite; the
/// right-hand side of a variable is produced on demand.
pub trait EquationSystem {
    type Var: Variable;

    fn domain(&self) -> &Domain;

    /// Right-hand side of `v`, or `None` if `v` is not a variable of the
    /// system. Repeated calls yield behaviorally identical trees.
    fn rhs(&self, v: &Self::Var) -> Option<Tree<Self::Var>>;

    /// Every variable, for explicitly finite systems.
    fn variables(&self) -> Option<Vec<Self::Var>> {
        None
    }

    fn render_var(&self, v: &Self::Var) -> String {
        v.to_string()
    }
}

/// True iff every variable of `a` only depends on variables of `a` when the
/// rest of the system is read as top.
pub fn is_closed<S: EquationSystem>(a: &Assignment<S::Var>, sys: &S) -> bool {
    a.vars().all(|y| match sys.rhs(y) {
        Some(t) => tree_dep(&t, a.extend_top()).iter().all(|z| a.contains(z)),
        None => false,
    })
}

/// An explicitly finite system with stored trees.
#[derive(Clone)]
pub struct FiniteSystem<V = Sym> {
    domain: Domain,
    order: Vec<V>,
    rhs: BTreeMap<V, Tree<V>>,
}

impl<V: Variable> FiniteSystem<V> {
    pub fn new(domain: Domain) -> FiniteSystem<V> {
        FiniteSystem {
            domain,
            order: Vec::new(),
            rhs: BTreeMap::new(),
        }
    }

    /// Adds or replaces the equation of `v`. Declaration order is kept.
    pub fn define(&mut self, v: V, t: Tree<V>) -> &mut Self {
        if self.rhs.insert(v.clone(), t).is_none() {
            self.order.push(v);
        }
        self
    }

    pub fn with(mut self, v: V, t: Tree<V>) -> Self {
        self.define(v, t);
        self
    }

    /// Variables in declaration order.
    pub fn order(&self) -> &[V] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

impl<V: Variable> fmt::Debug for FiniteSystem<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSystem")
            .field("domain", self.domain.descriptor())
            .field("vars", &self.order)
            .finish()
    }
}

impl<V: Variable> EquationSystem for FiniteSystem<V> {
    type Var = V;

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn rhs(&self, v: &V) -> Option<Tree<V>> {
        self.rhs.get(v).cloned()
    }

    fn variables(&self) -> Option<Vec<V>> {
        Some(self.order.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lookup(pairs: &[(&str, Value)]) -> impl Fn(&Sym) -> Value {
        let m: BTreeMap<Sym, Value> = pairs.iter().map(|(k, v)| (Sym::new(k), v.clone())).collect();
        move |v| m[v].clone()
    }

    #[test]
    fn eval_guarded_increment_tree() {
        let t = fixtures::guarded_increment_tree();
        assert_eq!(
            eval_tree(&t, lookup(&[("y1", Value::nat(7)), ("y2", Value::nat(4))])),
            Value::nat(5)
        );
        assert_eq!(eval_tree(&t, lookup(&[("y1", Value::nat(3))])), Value::nat(3));
        let leaf: Tree<Sym> = Tree::answer(Value::nat(42));
        assert_eq!(eval_tree(&leaf, |_| unreachable!()), Value::nat(42));
    }

    #[test]
    fn dependencies_of_guarded_increment_tree() {
        let t = fixtures::guarded_increment_tree();
        let mut partial = Assignment::new(Domain::natinf());
        partial.insert(Sym::new("y1"), Value::nat(3));
        let deps = tree_dep(&t, partial.extend_top());
        assert_eq!(deps.into_iter().collect::<Vec<_>>(), vec![Sym::new("y1")]);
        let deps = tree_dep(&t, lookup(&[("y1", Value::nat(9)), ("y2", Value::nat(0))]));
        assert_eq!(deps.len(), 2);
        let leaf: Tree<Sym> = Tree::answer(Value::nat(1));
        assert!(tree_dep(&leaf, |_| unreachable!()).is_empty());
    }

    #[test]
    fn extend_top_defaults() {
        let empty: Assignment<Sym> = Assignment::new(Domain::natinf());
        assert_eq!(empty.extend_top()(&Sym::new("y")), Value::inf());
        let mut a = Assignment::new(Domain::natinf());
        a.insert(Sym::new("y1"), Value::nat(3));
        assert_eq!(a.extend_top()(&Sym::new("y1")), Value::nat(3));
        assert_eq!(a.extend_top()(&Sym::new("y2")), Value::inf());
    }

    #[test]
    fn closedness() {
        let sys = fixtures::max_min_system();
        let empty = Assignment::new(Domain::natinf());
        assert!(is_closed(&empty, &sys));
        let mut all = Assignment::new(Domain::natinf());
        for v in ["y1", "y2", "y3"] {
            all.insert(Sym::new(v), Value::nat(0));
        }
        assert!(is_closed(&all, &sys));
        let mut only_y2 = Assignment::new(Domain::natinf());
        only_y2.insert(Sym::new("y2"), Value::nat(0));
        assert!(!is_closed(&only_y2, &sys));
    }
}
