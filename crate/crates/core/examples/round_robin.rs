//! Round-robin iteration over an explicit variable list.

use fixsolve::cli::parse_finite_file;
use fixsolve::eqsys::Sym;
use fixsolve::fixtures;
use fixsolve::solvers::tsrr;

fn main() {
    let sys = parse_finite_file(fixtures::BOUNDED_LOOP).unwrap();
    println!("{sys}");
    // the first variable has the highest priority
    let order: Vec<Sym> = sys.vars();
    let r = tsrr(&sys.to_system(), &order).unwrap();
    for (v, d) in r.assignment.iter() {
        println!("{v} = {d}");
    }
    println!(
        "evals {}, widen {}, narrow {}",
        r.stats.rhs_evals, r.stats.widen_apps, r.stats.narrow_apps
    );
}
