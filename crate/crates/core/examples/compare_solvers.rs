//! Runs every pair of solvers on each bundled equation file.

use fixsolve::cli::{compare, Options};
use fixsolve::fixtures;
use fixsolve::solvers::SolverKind;

fn main() {
    let opts = Options {
        fuel: Some(10_000),
        ..Options::default()
    };
    for (name, text) in fixtures::EQUATION_FILES {
        println!("== {name}");
        let r = compare(text, SolverKind::Tsmp, SolverKind::Tstp, &opts).unwrap();
        print!("{r}");
        let r = compare(text, SolverKind::Tsrr, SolverKind::Warrow, &opts).unwrap();
        println!("{}", r.to_json());
    }
}
