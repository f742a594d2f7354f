//! Plain warrowing without phase flags can run forever on a non-monotone
//! right-hand side. Fuel bounds the run.

use fixsolve::cli::parse_finite_file;
use fixsolve::eqsys::Sym;
use fixsolve::fixtures;
use fixsolve::solvers::{warrow_solve, Limits};

fn main() {
    let osc = parse_finite_file(fixtures::OSCILLATING).unwrap().to_system();
    for fuel in [10, 1000] {
        let r = warrow_solve(&osc, Sym::new("y1"), fuel, &Limits::default()).unwrap();
        println!("fuel {fuel}: {} after {} evals", r.status, r.stats.rhs_evals);
    }

    let r = warrow_solve(&fixtures::max_min_system(), Sym::new("y1"), 1000, &Limits::default()).unwrap();
    for (v, d) in r.assignment.iter() {
        println!("{v} = {d}");
    }
}
