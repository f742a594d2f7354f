//! The mixed-phase local solver on a small system and on a right-hand side
//! that flips between bottom and one.

use fixsolve::cli::parse_finite_file;
use fixsolve::eqsys::Sym;
use fixsolve::fixtures;
use fixsolve::solvers::{tsmp, Limits};

fn main() {
    let sys = fixtures::max_min_system();
    let r = tsmp(&sys, Sym::new("y1"), &Limits::default()).unwrap();
    for (v, d) in r.assignment.iter() {
        println!("{v} = {d}");
    }
    println!("vars {}, evals {}", r.stats.vars_encountered, r.stats.rhs_evals);

    let osc = parse_finite_file(fixtures::OSCILLATING).unwrap();
    println!("{osc}");
    let r = tsmp(&osc.to_system(), Sym::new("y1"), &Limits::default()).unwrap();
    println!(
        "y1 = {} after {} evals",
        r.assignment.get(&Sym::new("y1")).unwrap(),
        r.stats.rhs_evals
    );
}
