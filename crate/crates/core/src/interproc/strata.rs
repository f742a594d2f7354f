use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{Expr, PointId, Scheme};

/// A level for every point of a scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levels(pub BTreeMap<PointId, usize>);

impl Levels {
    pub fn get(&self, p: PointId) -> usize {
        self.0[&p]
    }

    /// Checks the stratification conditions directly against `scheme`:
    /// a cell on the same level must pass `ctx` unchanged, every other
    /// cell must target a strictly lower level.
    pub fn verify(&self, scheme: &Scheme) -> bool {
        scheme.points().all(|u| {
            let Some(&lu) = self.0.get(&u) else { return false };
            scheme.rhs(u).cells().into_iter().all(|(v, arg)| match self.0.get(&v) {
                Some(&lv) if lv == lu => *arg == Expr::Ctx,
                Some(&lv) => lv < lu,
                None => false,
            })
        })
    }

    pub fn display<'a>(&'a self, scheme: &'a Scheme) -> impl fmt::Display + 'a {
        LevelsDisplay { levels: self, scheme }
    }
}

struct LevelsDisplay<'a> {
    levels: &'a Levels,
    scheme: &'a Scheme,
}

impl fmt::Display for LevelsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .levels
            .0
            .iter()
            .map(|(p, l)| format!("{}:{l}", self.scheme.name(*p)))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stratification {
    Stratified(Levels),
    /// Points along a call cycle containing a strict edge; the cycle
    /// returns to its first element.
    Cycle(Vec<PointId>),
}

/// Call graph with an edge `u -> v` per `cell v e` in the right-hand side
/// of `u`; an edge is strict unless `e` is `ctx`.
fn call_graph(scheme: &Scheme) -> DiGraph<PointId, bool> {
    let mut g = DiGraph::new();
    let nodes: Vec<NodeIndex> = scheme.points().map(|p| g.add_node(p)).collect();
    for u in scheme.points() {
        for (v, arg) in scheme.rhs(u).cells() {
            g.add_edge(nodes[u.0], nodes[v.0], *arg != Expr::Ctx);
        }
    }
    g
}

pub fn check_stratified(scheme: &Scheme) -> Stratification {
    let g = call_graph(scheme);
    // tarjan_scc yields components in reverse topological order: callees first
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; g.node_count()];
    for (i, c) in sccs.iter().enumerate() {
        for n in c {
            comp[n.index()] = i;
        }
    }
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).expect("edge");
        if g[e] && comp[a.index()] == comp[b.index()] {
            return Stratification::Cycle(cycle_through(&g, &comp, a, b));
        }
    }
    let mut level = vec![0usize; sccs.len()];
    for (i, c) in sccs.iter().enumerate() {
        let mut l = 0;
        for n in c {
            for e in g.edges(*n) {
                use petgraph::visit::EdgeRef;
                let j = comp[e.target().index()];
                if j != i {
                    l = l.max(level[j] + usize::from(*e.weight()));
                }
            }
        }
        level[i] = l;
    }
    let map = g.node_indices().map(|n| (g[n], level[comp[n.index()]])).collect();
    Stratification::Stratified(Levels(map))
}

/// A path `a -> b -> ... -> a` inside one component.
fn cycle_through(g: &DiGraph<PointId, bool>, comp: &[usize], a: NodeIndex, b: NodeIndex) -> Vec<PointId> {
    let mut path = vec![g[a]];
    if a == b {
        return path;
    }
    // breadth-first search from b back to a within the component
    let c = comp[a.index()];
    let mut prev: BTreeMap<NodeIndex, NodeIndex> = BTreeMap::new();
    let mut frontier = std::collections::VecDeque::from([b]);
    prev.insert(b, b);
    while let Some(n) = frontier.pop_front() {
        if n == a {
            break;
        }
        for m in g.neighbors(n) {
            if comp[m.index()] == c && !prev.contains_key(&m) {
                prev.insert(m, n);
                frontier.push_back(m);
            }
        }
    }
    let mut back = Vec::new();
    let mut n = prev[&a];
    while n != b {
        back.push(g[n]);
        n = prev[&n];
    }
    path.push(g[b]);
    path.extend(back.into_iter().rev());
    path
}
