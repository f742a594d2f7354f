//! Interprocedural schemes: stratification and partial tabulation.

use fixsolve::cli::parse_scheme_file;
use fixsolve::fixtures;
use fixsolve::interproc::{check_stratified, instantiate_system, Stratification};
use fixsolve::solvers::{tsmp, tstp, Limits};

fn main() {
    for (name, text) in fixtures::SCHEME_FILES {
        let scheme = parse_scheme_file(text).unwrap();
        print!("== {name}\n{scheme}");
        match check_stratified(&scheme) {
            Stratification::Stratified(levels) => println!("levels: {}", levels.display(&scheme)),
            Stratification::Cycle(c) => {
                let names: Vec<&str> = c.iter().chain(&c[..1]).map(|&p| scheme.name(p)).collect();
                println!("not stratified: {}", names.join(" -> "));
                continue;
            }
        }
        let sys = instantiate_system(&scheme);
        let r = tsmp(&sys, scheme.start_var(), &Limits::default()).unwrap();
        for (v, d) in r.assignment.iter() {
            println!("{} = {}", scheme.render_var(v), scheme.domain().render(d));
        }
        println!("contexts per point: {:?}", sys.contexts_per_point(r.assignment.vars()));
        let r = tstp(&sys, scheme.start_var(), &Limits::default()).unwrap();
        println!(
            "two-phase contexts per point: {:?}",
            sys.contexts_per_point(r.assignment.vars())
        );
    }
}
