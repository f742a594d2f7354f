//! Seeded random systems, solved and checked.

use fixsolve::eqsys::{is_closed, Sym};
use fixsolve::lattice::Domain;
use fixsolve::oracle::{gen_random_system, is_monotone, is_post_solution_lower_mono};
use fixsolve::solvers::{run, Limits, SolverKind};

fn main() {
    let dom = Domain::chain(4);
    let mut non_monotone = 0;
    for seed in 0..50 {
        let dsl = gen_random_system(seed, 3, &dom, 3, false);
        let sys = dsl.to_system();
        if !is_monotone(&sys).unwrap() {
            non_monotone += 1;
        }
        let r = run(SolverKind::Tsmp, &sys, &Sym::new("y1"), 0, &Limits::default()).unwrap();
        assert!(is_closed(&r.assignment, &sys));
        assert!(is_post_solution_lower_mono(&r.assignment, &sys).unwrap());
        if seed == 0 {
            println!("{dsl}");
            for (v, d) in r.assignment.iter() {
                println!("{v} = {d}");
            }
        }
    }
    println!("50 systems solved and checked, {non_monotone} of them non-monotone");
}
