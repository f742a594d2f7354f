//! Right-hand sides as computation trees, and what they read.

use fixsolve::eqsys::{eval_tree, tree_dep, Assignment, Sym};
use fixsolve::fixtures;
use fixsolve::lattice::{Domain, Value};

fn main() {
    // reads y1; above 5 it answers y2 + 1, otherwise y1
    let t = fixtures::guarded_increment_tree();

    let mut partial = Assignment::new(Domain::natinf());
    partial.insert(Sym::new("y1"), Value::nat(3));
    // variables missing from a partial assignment read as top
    let deps = tree_dep(&t, partial.extend_top());
    println!(
        "with y1 = 3: value {}, reads {deps:?}",
        eval_tree(&t, partial.extend_top())
    );

    partial.insert(Sym::new("y1"), Value::nat(9));
    partial.insert(Sym::new("y2"), Value::nat(0));
    let deps = tree_dep(&t, partial.extend_top());
    println!(
        "with y1 = 9, y2 = 0: value {}, reads {deps:?}",
        eval_tree(&t, partial.extend_top())
    );
}
