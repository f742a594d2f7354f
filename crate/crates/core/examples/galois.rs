//! Soundness of abstract results with respect to a concrete system.

use fixsolve::eqsys::EquationSystem;
use fixsolve::fixtures;
use fixsolve::lattice::{Domain, Value};
use fixsolve::oracle::{
    check_sigma_closed, check_sound, kleene_least_solution, DescriptionRelation, GaloisConnection, StateVar,
};
use fixsolve::solvers::{tsmp, Limits};

fn main() {
    // a loop at u calling v twice; v iterates g with g(q0) = {q1}, g(q1) = {}
    let conc = fixtures::loop_call_concrete();
    let least = kleene_least_solution(&conc).unwrap();
    for (v, d) in least.iter() {
        println!("{v} = {}", conc.domain().render(d));
    }

    let abs = tsmp(conc.system(), StateVar::new("u", "q0"), &Limits::default()).unwrap();
    let r = DescriptionRelation::identity(conc.variables().unwrap());
    let reached = r.preimage(abs.assignment.vars());
    println!("variables reached from <u,q0>: {}", reached.len());
    println!(
        "closed under the least solution: {}",
        check_sigma_closed(&conc, &least, &reached)
    );
    let g = GaloisConnection::identity(conc.domain());
    println!("sound: {}", check_sound(&conc, &abs.assignment, &g, &r).unwrap());

    let small = Domain::powerset(&["0", "1", "2", "5"]);
    let hull = GaloisConnection::interval_hull(&small).unwrap();
    let s = small.parse_value("{1,5}").unwrap();
    println!("alpha {} = {}", small.render(&s), hull.alpha(&s));
    println!("gamma [0,2] = {}", small.render(&hull.gamma(&Value::interval(0, 2))));
    println!("adjunction holds: {}", hull.check_adjunction());
}
