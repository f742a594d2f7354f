//! The four lattices and their acceleration operators.

use fixsolve::lattice::{Domain, Value};

fn main() {
    let iv = Domain::interval();
    let a = Value::interval(0, 1);
    let b = Value::interval(0, 2);
    println!("interval: {a} widen {b} = {}", iv.widen(&a, &b));
    let wide = iv.widen(&a, &b);
    println!("interval: {wide} narrow {b} = {}", iv.narrow(&wide, &b));
    println!("interval: {a} warrow {b} = {}", iv.warrow(&a, &b));
    println!("interval: {wide} warrow {b} = {}", iv.warrow(&wide, &b));

    let nat = Domain::natinf();
    let mut x = nat.bot();
    for step in 0..3 {
        let next = nat.inc(&x).unwrap();
        x = nat.widen(&x, &next);
        println!("natinf: widening step {step}: {x}");
    }

    let chain = Domain::chain(4);
    println!("chain 4: {:?} elements, height {:?}", chain.size(), chain.height());
    println!("chain 4: join 1 2 = {}", chain.join(&Value::Chain(1), &Value::Chain(2)));

    let sets = Domain::powerset(&["a", "b", "c"]);
    let ab = sets.parse_value("{a,b}").unwrap();
    let bc = sets.parse_value("{b,c}").unwrap();
    println!(
        "powerset: {} join {} = {}",
        sets.render(&ab),
        sets.render(&bc),
        sets.render(&sets.join(&ab, &bc))
    );
    println!(
        "powerset: {} meet {} = {}",
        sets.render(&ab),
        sets.render(&bc),
        sets.render(&sets.meet(&ab, &bc))
    );
}
