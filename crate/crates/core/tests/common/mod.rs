#![allow(dead_code)]

use fixsolve::eqsys::{Cmp, Rhs};
use fixsolve::lattice::{Bound, Domain, Value};
use proptest::prelude::*;

pub fn arb_bound() -> impl Strategy<Value = Bound> {
    prop_oneof![
        1 => Just(Bound::NegInf),
        1 => Just(Bound::PosInf),
        6 => (-20i64..20).prop_map(Bound::Fin),
    ]
}

pub fn arb_value(dom: &Domain) -> BoxedStrategy<Value> {
    use fixsolve::lattice::LatticeDescriptor as L;
    match dom.descriptor() {
        L::Chain(n) => (0..*n).prop_map(Value::Chain).boxed(),
        L::Powerset(atoms) => {
            let full = if atoms.len() == 64 {
                u64::MAX
            } else {
                (1u64 << atoms.len()) - 1
            };
            any::<u64>().prop_map(move |m| Value::Set(m & full)).boxed()
        }
        L::NatInf => prop_oneof![1 => Just(Value::inf()), 6 => (0u64..30).prop_map(Value::nat)].boxed(),
        L::Interval => prop_oneof![
            1 => Just(Value::bot_interval()),
            8 => (arb_bound(), arb_bound()).prop_map(|(a, b)| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                match (lo, hi) {
                    (Bound::PosInf, _) => Value::range(Bound::Fin(0), Bound::PosInf),
                    (_, Bound::NegInf) => Value::range(Bound::NegInf, Bound::Fin(0)),
                    _ => Value::range(lo, hi),
                }
            }),
        ]
        .boxed(),
    }
}

pub fn arb_domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (1u32..7).prop_map(Domain::chain),
        (1usize..5).prop_map(|k| Domain::powerset(&["a", "b", "c", "d", "e"][..k])),
        Just(Domain::natinf()),
        Just(Domain::interval()),
    ]
}

/// A domain with three of its values.
pub fn arb_triple() -> impl Strategy<Value = (Domain, Value, Value, Value)> {
    arb_domain().prop_flat_map(|d| {
        let v = arb_value(&d);
        (Just(d), v.clone(), v.clone(), v)
    })
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("y{i}")).collect()
}

/// Random expressions over `dom` reading variables `y1..y{nvars}`.
pub fn arb_rhs(dom: Domain, nvars: usize, depth: u32) -> BoxedStrategy<Rhs> {
    let arith = dom.has_arithmetic();
    let leaf = prop_oneof![
        (1..=nvars).prop_map(|i| Rhs::get(&format!("y{i}"))),
        arb_value(&dom).prop_map(Rhs::Lit),
    ];
    leaf.prop_recursive(depth, 32, 4, move |inner| {
        let mut choices = vec![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Rhs::join(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Rhs::meet(a, b))
                .boxed(),
            (
                any::<bool>(),
                inner.clone(),
                inner.clone(),
                inner.clone(),
                inner.clone(),
            )
                .prop_map(|(eq, l, r, t, e)| Rhs::ite(if eq { Cmp::Eq } else { Cmp::Leq }, l, r, t, e))
                .boxed(),
        ];
        if arith {
            choices.push(inner.prop_map(Rhs::inc).boxed());
        }
        proptest::strategy::Union::new(choices)
    })
    .boxed()
}
