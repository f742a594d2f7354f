//! The two-phase local solver: a widening phase, then a narrowing phase.

use fixsolve::eqsys::Sym;
use fixsolve::fixtures;
use fixsolve::solvers::{tstp, Limits};

fn main() {
    let sys = fixtures::max_min_system();
    let r = tstp(&sys, Sym::new("y1"), &Limits::default()).unwrap();
    let widened = r.secondary.as_ref().unwrap();
    for (v, d) in r.assignment.iter() {
        println!("{v}: after widening {}, after narrowing {d}", widened.get(v).unwrap());
    }
    println!("evals {}", r.stats.rhs_evals);
}
