mod common;

use common::arb_rhs;
use fixsolve::eqsys::{is_closed, DslSystem, EquationSystem, FiniteSystem, Rhs, Sym};
use fixsolve::lattice::{Domain, Value};
use fixsolve::oracle::{gen_random_system, is_post_solution, kleene_least_solution};
use fixsolve::solvers::{run, tsrr, tstp, Limits, SolverKind, Status};
use proptest::prelude::*;

fn system(dom: &Domain, rhs: Vec<Rhs>) -> FiniteSystem<Sym> {
    DslSystem {
        domain: dom.clone(),
        equations: rhs
            .into_iter()
            .enumerate()
            .map(|(i, e)| (Sym::new(&format!("y{}", i + 1)), e))
            .collect(),
    }
    .to_system()
}

fn arb_infinite_system() -> impl Strategy<Value = (Domain, Vec<Rhs>)> {
    prop_oneof![Just(Domain::natinf()), Just(Domain::interval())].prop_flat_map(|d| {
        (1usize..=4).prop_flat_map(move |n| (Just(d.clone()), proptest::collection::vec(arb_rhs(d.clone(), n, 3), n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Termination on infinite lattices, monotone or not.
    #[test]
    fn solvers_terminate_on_infinite_lattices((dom, rhs) in arb_infinite_system()) {
        let sys = system(&dom, rhs);
        let start = Sym::new("y1");
        for kind in [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp] {
            let r = run(kind, &sys, &start, 0, &Limits::default()).unwrap();
            prop_assert_eq!(r.status, Status::Completed);
            prop_assert!(is_closed(&r.assignment, &sys));
        }
        let r = tstp(&sys, start, &Limits::default()).unwrap();
        let s0 = r.secondary.unwrap();
        prop_assert!(is_post_solution(&s0, &sys));
        for (v, d) in r.assignment.iter() {
            prop_assert!(dom.leq(d, &s0.values()[v]));
        }
    }
}

/// With join as widening and meet as narrowing, every solver computes the
/// least solution of a monotone system on the variables it visits.
#[test]
fn monotone_systems_reach_least_solution() {
    for seed in 0..200u64 {
        let dom = if seed % 2 == 0 {
            Domain::chain(5)
        } else {
            Domain::powerset(&["a", "b", "c"])
        };
        let nvars = 1 + (seed % 4) as usize;
        let sys = gen_random_system(seed, nvars, &dom, 3, true).to_system();
        let least = kleene_least_solution(&sys).unwrap();
        for kind in [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp, SolverKind::Warrow] {
            let r = run(kind, &sys, &Sym::new("y1"), 10_000, &Limits::default()).unwrap();
            assert_eq!(r.status, Status::Completed);
            for (v, d) in r.assignment.iter() {
                assert_eq!(Some(d), least.get(v), "seed {seed}, {kind}, {v}");
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for seed in 0..50u64 {
        let sys = gen_random_system(seed, 4, &Domain::chain(4), 3, false).to_system();
        for kind in [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp] {
            let a = run(kind, &sys, &Sym::new("y1"), 0, &Limits::default()).unwrap();
            let b = run(kind, &sys, &Sym::new("y1"), 0, &Limits::default()).unwrap();
            assert_eq!(a.stats, b.stats);
            assert_eq!(a.assignment.values(), b.assignment.values());
        }
    }
}

#[test]
fn round_robin_priority_follows_declaration_order() {
    // y1 has the highest priority and is evaluated last in every round
    let text = "lattice natinf\nvar y1 = get y2\nvar y2 = meet (inc (get y2)) (lit 4)\n";
    let sys = fixsolve::cli::parse_finite_file(text).unwrap().to_system();
    let r = tsrr(&sys, sys.order()).unwrap();
    assert_eq!(r.assignment.get(&Sym::new("y1")), Some(&Value::nat(4)));
    assert_eq!(r.assignment.get(&Sym::new("y2")), Some(&Value::nat(4)));
    assert!(sys.variables().is_some());
}

#[test]
fn self_loop_point_uses_widening_then_narrowing() {
    let text = "lattice interval\nvar i = join (lit [0,0]) (inc (meet (get i) (lit [-inf,9])))\n";
    let sys = fixsolve::cli::parse_finite_file(text).unwrap().to_system();
    for kind in [SolverKind::Tsrr, SolverKind::Tstp, SolverKind::Tsmp, SolverKind::Warrow] {
        let r = run(kind, &sys, &Sym::new("i"), 100, &Limits::default()).unwrap();
        assert_eq!(
            r.assignment.get(&Sym::new("i")),
            Some(&Value::interval(0, 10)),
            "{kind}"
        );
        assert!(r.stats.widen_apps >= 1 && r.stats.narrow_apps >= 1, "{kind}");
    }
}
