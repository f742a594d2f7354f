//! Checks solver results against the reference oracle.

use fixsolve::cli::parse_finite_file;
use fixsolve::eqsys::{is_closed, EquationSystem, Sym};
use fixsolve::fixtures;
use fixsolve::oracle::{
    is_monotone, is_post_solution, is_post_solution_lower_mono, kleene_least_solution, lower_mono_value,
};
use fixsolve::solvers::{run, Limits, SolverKind};

fn main() {
    let osc = parse_finite_file(fixtures::OSCILLATING_CHAIN4).unwrap().to_system();
    let y1 = Sym::new("y1");
    let t = osc.rhs(&y1).unwrap();
    for d in osc.domain().enumerate().unwrap() {
        let low = lower_mono_value(&t, |_| d.clone(), std::slice::from_ref(&y1), osc.domain()).unwrap();
        println!(
            "y1 = {d}: rhs {}, lower monotonization {low}",
            fixsolve::eqsys::eval_tree(&t, |_| d.clone())
        );
    }
    println!("monotone: {}", is_monotone(&osc).unwrap());

    for kind in [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp] {
        let r = run(kind, &osc, &y1, 0, &Limits::default()).unwrap();
        println!(
            "{kind}: y1 = {}, closed {}, post-solution {}, post-solution of lower monotonization {}",
            r.assignment.get(&y1).unwrap(),
            is_closed(&r.assignment, &osc),
            is_post_solution(&r.assignment, &osc),
            is_post_solution_lower_mono(&r.assignment, &osc).unwrap(),
        );
    }

    let toy = parse_finite_file(fixtures::MONOTONE_TOY).unwrap().to_system();
    let least = kleene_least_solution(&toy).unwrap();
    let r = run(SolverKind::Tsrr, &toy, &Sym::new("x"), 0, &Limits::default()).unwrap();
    println!("round-robin matches the least solution: {}", r.assignment == least);
}
