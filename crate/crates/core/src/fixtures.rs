//! Small systems used throughout the tests and examples. The files under
//! `data/` are embedded here so that every consumer reads the same text.

use crate::cli::{parse_finite_file, parse_scheme_file};
use crate::eqsys::{Cmp, DslSystem, FiniteSystem, Rhs, Sym, Tree};
use crate::interproc::{Builtin, Expr, PointId, Scheme};
use crate::lattice::{Domain, LatticeDescriptor, NatInf, Value};
use crate::oracle::{ConcreteSystem, SetExpr, StateVar};

pub const OSCILLATING: &str = include_str!("../data/oscillating.eq");
pub const OSCILLATING_CHAIN4: &str = include_str!("../data/oscillating_chain4.eq");
pub const MAX_MIN: &str = include_str!("../data/max_min.eq");
pub const MONOTONE_TOY: &str = include_str!("../data/monotone_toy.eq");
pub const REACH: &str = include_str!("../data/reach.eq");
pub const BOUNDED_LOOP: &str = include_str!("../data/bounded_loop.eq");
pub const TWO_CALL: &str = include_str!("../data/two_call.scheme");
pub const TWO_CALL_INTERVAL: &str = include_str!("../data/two_call_interval.scheme");
pub const RECURSIVE: &str = include_str!("../data/recursive.scheme");
pub const SELF_LOOP: &str = include_str!("../data/self_loop.scheme");
pub const IDENTITY: &str = include_str!("../data/identity.scheme");

/// Every equation file, by name.
pub const EQUATION_FILES: &[(&str, &str)] = &[
    ("oscillating.eq", OSCILLATING),
    ("oscillating_chain4.eq", OSCILLATING_CHAIN4),
    ("max_min.eq", MAX_MIN),
    ("monotone_toy.eq", MONOTONE_TOY),
    ("reach.eq", REACH),
    ("bounded_loop.eq", BOUNDED_LOOP),
];

/// Every scheme file, by name.
pub const SCHEME_FILES: &[(&str, &str)] = &[
    ("two_call.scheme", TWO_CALL),
    ("two_call_interval.scheme", TWO_CALL_INTERVAL),
    ("recursive.scheme", RECURSIVE),
    ("self_loop.scheme", SELF_LOOP),
    ("identity.scheme", IDENTITY),
];

/// `y1 = if y1 = ⊥ then 1 else ⊥`, where `1` is the least non-bottom
/// element for chains and `inf`-lattices and the full set for powersets.
pub fn oscillating_dsl(dom: Domain) -> DslSystem {
    let one = match dom.descriptor() {
        LatticeDescriptor::Chain(n) if *n >= 2 => Value::Chain(1),
        LatticeDescriptor::NatInf => Value::nat(1),
        LatticeDescriptor::Interval => Value::interval(1, 1),
        _ => dom.top(),
    };
    let bot = dom.bot();
    let rhs = Rhs::ite(
        Cmp::Eq,
        Rhs::get("y1"),
        Rhs::Lit(bot.clone()),
        Rhs::Lit(one),
        Rhs::Lit(bot),
    );
    DslSystem {
        domain: dom,
        equations: vec![(Sym::new("y1"), rhs)],
    }
}

pub fn max_min_dsl() -> DslSystem {
    parse_finite_file(MAX_MIN).expect("embedded file")
}

pub fn max_min_system() -> FiniteSystem<Sym> {
    max_min_dsl().to_system()
}

/// Over the naturals with `inf`: read `y1`; if it exceeds 5 answer
/// `1 + y2`, otherwise read `y1` again and answer it.
pub fn guarded_increment_tree() -> Tree<Sym> {
    let dom = Domain::natinf();
    Tree::query(Sym::new("y1"), move |d1| {
        let big = match d1 {
            Value::Nat(NatInf::Fin(n)) => *n > 5,
            Value::Nat(NatInf::Inf) => true,
            _ => panic!("not a natural: {d1:?}"),
        };
        if big {
            let dom = dom.clone();
            Tree::query(Sym::new("y2"), move |d2| Tree::answer(dom.inc(d2).expect("arithmetic")))
        } else {
            Tree::query(Sym::new("y1"), |d| Tree::answer(d.clone()))
        }
    })
}

/// The two-point scheme
///
/// ```text
/// <u,a> = <v, <v, <u,a>>> ⊔ a
/// <v,a> = g <v,a> ⊔ a
/// ```
///
/// with `g` the successor, clamped at 10 on the naturals and to `[0,10]`
/// on intervals. Starts at `<u, ⊥>` (`<u, [0,0]>` for intervals).
pub fn two_call_scheme(dom: Domain) -> Scheme {
    let (u, v) = (PointId(0), PointId(1));
    let g = |e: Expr| Expr::apply(Builtin::inc(), vec![e]);
    let clamp = match dom.descriptor() {
        LatticeDescriptor::NatInf => Some(Builtin::meet_const(Value::nat(10), "10")),
        LatticeDescriptor::Interval => Some(Builtin::meet_const(Value::interval(0, 10), "[0,10]")),
        LatticeDescriptor::Chain(_) => None,
        LatticeDescriptor::Powerset(_) => panic!("the successor is not defined on powersets"),
    };
    let body_v = match clamp {
        Some(c) => Expr::apply(c, vec![g(Expr::cell(v, Expr::Ctx))]),
        None => g(Expr::cell(v, Expr::Ctx)),
    };
    let start = match dom.descriptor() {
        LatticeDescriptor::Interval => Value::interval(0, 0),
        _ => dom.bot(),
    };
    Scheme::new(
        dom,
        vec!["u".into(), "v".into()],
        vec![
            Expr::join(Expr::cell(v, Expr::cell(v, Expr::cell(u, Expr::Ctx))), Expr::Ctx),
            Expr::join(body_v, Expr::Ctx),
        ],
        (u, start),
    )
    .expect("well-formed scheme")
}

/// `<u,a> = <u, a + 1>`.
pub fn recursive_scheme() -> Scheme {
    parse_scheme_file(RECURSIVE).expect("embedded file")
}

/// The concrete system of a loop at `u` calling `v` twice, where `v`
/// iterates `g` with `g(q0) = {q1}` and `g(q1) = {}`, over states
/// `q0, q1`.
pub fn loop_call_concrete() -> ConcreteSystem<StateVar> {
    let g = vec![0b10, 0b00];
    ConcreteSystem::from_scheme(
        &["q0", "q1"],
        &[
            (
                "u",
                SetExpr::union(
                    SetExpr::cells(1, SetExpr::cells(1, SetExpr::cells(0, SetExpr::Ctx))),
                    SetExpr::Ctx,
                ),
            ),
            (
                "v",
                SetExpr::union(SetExpr::image(g, SetExpr::cells(1, SetExpr::Ctx)), SetExpr::Ctx),
            ),
        ],
    )
}

/// The powerset version of [`loop_call_concrete`] as an abstract scheme
/// over the same lattice, with `g` as a builtin.
pub fn loop_call_scheme() -> Scheme {
    let dom = Domain::powerset(&["q0", "q1"]);
    let g = Builtin::new("g", 1, |_, a| {
        let Value::Set(m) = a[0] else { panic!("not a set") };
        Value::Set(if m & 1 != 0 { 0b10 } else { 0 })
    });
    let (u, v) = (PointId(0), PointId(1));
    Scheme::new(
        dom,
        vec!["u".into(), "v".into()],
        vec![
            Expr::join(Expr::cell(v, Expr::cell(v, Expr::cell(u, Expr::Ctx))), Expr::Ctx),
            Expr::join(Expr::apply(g, vec![Expr::cell(v, Expr::Ctx)]), Expr::Ctx),
        ],
        (u, Value::Set(0b01)),
    )
    .expect("well-formed scheme")
}
