//! Interprocedural equation schemes.
//!
//! A scheme gives one schematic equation `<u, ctx> = e_u` per program
//! point `u`; it stands for the family of equations for all variables
//! `<u, a>` with `a` an abstract calling context. Expressions are
//!
//! ```text
//! e ::= lit d | ctx | apply g e... | cell u e | join e e | meet e e
//! ```
//!
//! where `cell u e` reads the variable `<u, v>` for the value `v` of `e`
//! (indirect addressing). [`instantiate_system`] turns a scheme into a
//! lazily materialized [`EquationSystem`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eqsys::{EquationSystem, Tree};
use crate::lattice::{Domain, Value};
use crate::syntax::{read_form, ParseError, Pos, Sexp};

mod builtins;
mod strata;

pub use builtins::{Builtin, BuiltinRegistry};
pub use strata::{check_stratified, Levels, Stratification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

/// The variable `<point, ctx>` of an instantiated scheme.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtxVar {
    pub point: PointId,
    pub ctx: Value,
}

impl CtxVar {
    pub fn new(point: PointId, ctx: Value) -> CtxVar {
        CtxVar { point, ctx }
    }
}

impl fmt::Display for CtxVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<#{},{}>", self.point.0, self.ctx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Value),
    Ctx,
    Apply(Builtin, Arc<[Expr]>),
    Cell(PointId, Arc<Expr>),
}

impl Expr {
    pub fn apply(g: Builtin, args: Vec<Expr>) -> Expr {
        Expr::Apply(g, args.into())
    }

    pub fn cell(p: PointId, arg: Expr) -> Expr {
        Expr::Cell(p, Arc::new(arg))
    }

    pub fn join(a: Expr, b: Expr) -> Expr {
        Expr::apply(Builtin::join(), vec![a, b])
    }

    /// Every `cell` node, at any depth, in evaluation order.
    pub fn cells(&self) -> Vec<(PointId, &Expr)> {
        let mut out = Vec::new();
        self.collect_cells(&mut out);
        out
    }

    fn collect_cells<'a>(&'a self, out: &mut Vec<(PointId, &'a Expr)>) {
        match self {
            Expr::Const(_) | Expr::Ctx => {}
            Expr::Apply(_, args) => args.iter().for_each(|a| a.collect_cells(out)),
            Expr::Cell(p, arg) => {
                arg.collect_cells(out);
                out.push((*p, arg));
            }
        }
    }

    fn builtins(&self) -> Vec<&Builtin> {
        match self {
            Expr::Const(_) | Expr::Ctx => vec![],
            Expr::Apply(g, args) => {
                let mut v = vec![g];
                v.extend(args.iter().flat_map(|a| a.builtins()));
                v
            }
            Expr::Cell(_, arg) => arg.builtins(),
        }
    }

    pub fn display<'a>(&'a self, scheme: &'a Scheme) -> ExprDisplay<'a> {
        ExprDisplay {
            expr: self,
            names: &scheme.names,
            dom: &scheme.domain,
            nested: false,
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
    dom: &'a Domain,
    nested: bool,
}

impl<'a> fmt::Display for ExprDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e: &'a Expr| ExprDisplay {
            expr: e,
            names: self.names,
            dom: self.dom,
            nested: true,
        };
        match self.expr {
            Expr::Ctx => return f.write_str("ctx"),
            Expr::Const(d) => {
                let body = format!("lit {}", self.dom.render(d));
                return if self.nested {
                    write!(f, "({body})")
                } else {
                    f.write_str(&body)
                };
            }
            _ => {}
        }
        if self.nested {
            f.write_str("(")?;
        }
        match self.expr {
            Expr::Apply(g, args) if (g.name() == "join" || g.name() == "meet") && args.len() == 2 => {
                write!(f, "{} {} {}", g.name(), sub(&args[0]), sub(&args[1]))?
            }
            Expr::Apply(g, args) => {
                if g.name().contains(' ') {
                    write!(f, "apply ({})", g.name())?;
                } else {
                    write!(f, "apply {}", g.name())?;
                }
                for a in args.iter() {
                    write!(f, " {}", sub(a))?;
                }
            }
            Expr::Cell(p, arg) => write!(f, "cell {} {}", self.names[p.0], sub(arg))?,
            Expr::Ctx | Expr::Const(_) => unreachable!(),
        }
        if self.nested {
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("scheme has no points")]
    NoPoints,
    #[error("point `{point}` references unknown point #{index}")]
    UnknownPoint { point: String, index: usize },
    #[error("builtin `{name}` expects {want} argument(s), got {got}")]
    Arity { name: String, want: usize, got: usize },
    #[error("builtin `{name}` is not defined on lattice {lattice}")]
    Unsupported { name: String, lattice: String },
    #[error("start context {0} is not an element of the lattice")]
    BadStart(String),
    #[error("number of right-hand sides does not match number of points")]
    Shape,
}

/// A finite set of program points with their schematic right-hand sides
/// and the initial variable `<start.0, start.1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    domain: Domain,
    names: Vec<String>,
    rhs: Vec<Expr>,
    start: (PointId, Value),
}

impl Scheme {
    pub fn new(
        domain: Domain,
        names: Vec<String>,
        rhs: Vec<Expr>,
        start: (PointId, Value),
    ) -> Result<Scheme, SchemeError> {
        if names.is_empty() {
            return Err(SchemeError::NoPoints);
        }
        if names.len() != rhs.len() {
            return Err(SchemeError::Shape);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(SchemeError::DuplicatePoint(n.clone()));
            }
        }
        for (name, e) in names.iter().zip(&rhs) {
            for (p, _) in e.cells() {
                if p.0 >= names.len() {
                    return Err(SchemeError::UnknownPoint {
                        point: name.clone(),
                        index: p.0,
                    });
                }
            }
            for g in e.builtins() {
                if !g.supports(&domain) {
                    return Err(SchemeError::Unsupported {
                        name: g.name().to_string(),
                        lattice: domain.descriptor().to_string(),
                    });
                }
            }
            check_arity(e)?;
        }
        if start.0 .0 >= names.len() {
            return Err(SchemeError::UnknownPoint {
                point: "start".into(),
                index: start.0 .0,
            });
        }
        if !domain.contains(&start.1) {
            return Err(SchemeError::BadStart(domain.render(&start.1)));
        }
        Ok(Scheme {
            domain,
            names,
            rhs,
            start,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.names.len()).map(PointId)
    }

    pub fn point(&self, name: &str) -> Option<PointId> {
        self.names.iter().position(|n| n == name).map(PointId)
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.names[p.0]
    }

    pub fn rhs(&self, p: PointId) -> &Expr {
        &self.rhs[p.0]
    }

    pub fn start(&self) -> &(PointId, Value) {
        &self.start
    }

    pub fn start_var(&self) -> CtxVar {
        CtxVar::new(self.start.0, self.start.1.clone())
    }

    pub fn with_start(mut self, p: PointId, ctx: Value) -> Result<Scheme, SchemeError> {
        if p.0 >= self.names.len() {
            return Err(SchemeError::UnknownPoint {
                point: "start".into(),
                index: p.0,
            });
        }
        if !self.domain.contains(&ctx) {
            return Err(SchemeError::BadStart(self.domain.render(&ctx)));
        }
        self.start = (p, ctx);
        Ok(self)
    }

    pub fn render_var(&self, v: &CtxVar) -> String {
        format!("<{},{}>", self.names[v.point.0], self.domain.render(&v.ctx))
    }

    /// Parses an expression body. Point names resolve against this
    /// scheme's point list.
    pub fn parse_expr(
        text: &str,
        names: &[String],
        registry: &BuiltinRegistry,
        dom: &Domain,
        start: Pos,
    ) -> Result<Expr, ParseError> {
        let (items, pos) = read_form(text, start)?;
        let cx = ExprParser { names, registry, dom };
        cx.form(&items, pos)
    }
}

fn check_arity(e: &Expr) -> Result<(), SchemeError> {
    match e {
        Expr::Const(_) | Expr::Ctx => Ok(()),
        Expr::Apply(g, args) => {
            if g.arity() != args.len() {
                return Err(SchemeError::Arity {
                    name: g.name().to_string(),
                    want: g.arity(),
                    got: args.len(),
                });
            }
            args.iter().try_for_each(check_arity)
        }
        Expr::Cell(_, arg) => check_arity(arg),
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme {}", self.domain.descriptor())?;
        writeln!(
            f,
            "start {} {}",
            self.names[self.start.0 .0],
            self.domain.render(&self.start.1)
        )?;
        for (n, e) in self.names.iter().zip(&self.rhs) {
            writeln!(f, "point {n} = {}", e.display(self))?;
        }
        Ok(())
    }
}

struct ExprParser<'a> {
    names: &'a [String],
    registry: &'a BuiltinRegistry,
    dom: &'a Domain,
}

impl ExprParser<'_> {
    fn expr(&self, s: &Sexp) -> Result<Expr, ParseError> {
        match s {
            Sexp::List(items, p) => self.form(items, *p),
            Sexp::Atom(a, _) if a == "ctx" => Ok(Expr::Ctx),
            Sexp::Atom(a, p) => Err(ParseError::new(*p, format!("expected an expression, found `{a}`"))),
        }
    }

    fn point(&self, s: &Sexp) -> Result<PointId, ParseError> {
        let name = s
            .atom()
            .ok_or_else(|| ParseError::new(s.pos(), "expected a point name"))?;
        self.names
            .iter()
            .position(|n| n == name)
            .map(PointId)
            .ok_or_else(|| ParseError::new(s.pos(), format!("unknown point `{name}`")))
    }

    fn builtin(&self, s: &Sexp) -> Result<Builtin, ParseError> {
        match s {
            Sexp::Atom(name, p) => self
                .registry
                .get(name)
                .cloned()
                .ok_or_else(|| ParseError::new(*p, format!("unknown builtin `{name}`"))),
            Sexp::List(items, p) => match items.as_slice() {
                [Sexp::Atom(name, _), Sexp::Atom(param, _)] => self
                    .registry
                    .parameterized(name, param, self.dom)
                    .map_err(|m| ParseError::new(*p, m)),
                _ => Err(ParseError::new(*p, "expected `(builtin parameter)`")),
            },
        }
    }

    fn form(&self, items: &[Sexp], pos: Pos) -> Result<Expr, ParseError> {
        let head = items
            .first()
            .and_then(Sexp::atom)
            .ok_or_else(|| ParseError::new(pos, "expected an operator"))?;
        let args = &items[1..];
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::new(
                    pos,
                    format!("`{head}` expects {n} argument(s), got {}", args.len()),
                ))
            }
        };
        let supported = |g: Builtin| {
            if g.supports(self.dom) {
                Ok(g)
            } else {
                Err(ParseError::new(
                    pos,
                    format!("`{}` is not defined on lattice {}", g.name(), self.dom.descriptor()),
                ))
            }
        };
        match head {
            "ctx" => {
                want(0)?;
                Ok(Expr::Ctx)
            }
            "lit" => {
                want(1)?;
                let text = args[0]
                    .atom()
                    .ok_or_else(|| ParseError::new(args[0].pos(), "`lit` expects a value"))?;
                self.dom
                    .parse_value(text)
                    .map(Expr::Const)
                    .map_err(|e| ParseError::new(args[0].pos(), e.to_string()))
            }
            "cell" => {
                want(2)?;
                Ok(Expr::cell(self.point(&args[0])?, self.expr(&args[1])?))
            }
            "join" | "meet" => {
                want(2)?;
                let g = self.registry.get(head).cloned().unwrap_or_else(|| {
                    if head == "join" {
                        Builtin::join()
                    } else {
                        Builtin::meet()
                    }
                });
                Ok(Expr::apply(g, vec![self.expr(&args[0])?, self.expr(&args[1])?]))
            }
            "apply" => {
                if args.is_empty() {
                    return Err(ParseError::new(pos, "`apply` expects a builtin"));
                }
                let g = supported(self.builtin(&args[0])?)?;
                let actual: Vec<Expr> = args[1..].iter().map(|a| self.expr(a)).collect::<Result<_, _>>()?;
                if actual.len() != g.arity() {
                    return Err(ParseError::new(
                        pos,
                        format!(
                            "builtin `{}` expects {} argument(s), got {}",
                            g.name(),
                            g.arity(),
                            actual.len()
                        ),
                    ));
                }
                Ok(Expr::apply(g, actual))
            }
            other => Err(ParseError::new(pos, format!("unknown operator `{other}`"))),
        }
    }
}

/// Evaluates `e` in calling context `ctx`, reading variables through
/// `lookup`. Nested cells are read innermost first.
pub fn sem_expr(dom: &Domain, e: &Expr, ctx: &Value, lookup: &mut dyn FnMut(&CtxVar) -> Value) -> Value {
    match e {
        Expr::Const(d) => d.clone(),
        Expr::Ctx => ctx.clone(),
        Expr::Apply(g, args) => {
            let vals: Vec<Value> = args.iter().map(|a| sem_expr(dom, a, ctx, lookup)).collect();
            g.apply(dom, &vals)
        }
        Expr::Cell(p, arg) => {
            let c = sem_expr(dom, arg, ctx, lookup);
            lookup(&CtxVar::new(*p, c))
        }
    }
}

type Kont = Arc<dyn Fn(Value) -> Tree<CtxVar> + Send + Sync>;
type ListKont = Arc<dyn Fn(Vec<Value>) -> Tree<CtxVar> + Send + Sync>;

fn cps(e: &Expr, ctx: &Value, dom: &Domain, k: Kont) -> Tree<CtxVar> {
    match e {
        Expr::Const(d) => k(d.clone()),
        Expr::Ctx => k(ctx.clone()),
        Expr::Apply(g, args) => {
            let (g, dom2) = (g.clone(), dom.clone());
            cps_list(
                Arc::clone(args),
                0,
                Vec::new(),
                ctx,
                dom,
                Arc::new(move |vals| k(g.apply(&dom2, &vals))),
            )
        }
        Expr::Cell(p, arg) => {
            let p = *p;
            cps(
                arg,
                ctx,
                dom,
                Arc::new(move |c| {
                    let k = Arc::clone(&k);
                    Tree::query(CtxVar::new(p, c), move |v| k(v.clone()))
                }),
            )
        }
    }
}

fn cps_list(args: Arc<[Expr]>, i: usize, acc: Vec<Value>, ctx: &Value, dom: &Domain, k: ListKont) -> Tree<CtxVar> {
    if i == args.len() {
        return k(acc);
    }
    let (args2, ctx2, dom2) = (Arc::clone(&args), ctx.clone(), dom.clone());
    cps(
        &args[i],
        ctx,
        dom,
        Arc::new(move |v| {
            let mut acc = acc.clone();
            acc.push(v);
            cps_list(Arc::clone(&args2), i + 1, acc, &ctx2, &dom2, Arc::clone(&k))
        }),
    )
}

/// The tree realizing `e` in context `ctx`.
pub fn compile_expr(e: &Expr, ctx: &Value, dom: &Domain) -> Tree<CtxVar> {
    cps(e, ctx, dom, Arc::new(Tree::Answer))
}

/// The (possibly infinite) equation system denoted by a scheme. Right-hand
/// sides are built on demand.
#[derive(Debug, Clone)]
pub struct SchemeSystem {
    scheme: Arc<Scheme>,
    listed: Option<Arc<[CtxVar]>>,
}

pub fn instantiate_system(s: &Scheme) -> SchemeSystem {
    SchemeSystem {
        scheme: Arc::new(s.clone()),
        listed: None,
    }
}

/// Like [`instantiate_system`], but over a finite lattice the system also
/// lists every variable `<u, a>`, which lets the oracle and round-robin
/// iteration handle it. `None` for infinite lattices.
pub fn instantiate_enumerated(s: &Scheme) -> Option<SchemeSystem> {
    let ctxs = s.domain.enumerate()?;
    let vars: Vec<CtxVar> = s
        .points()
        .flat_map(|p| ctxs.iter().map(move |c| CtxVar::new(p, c.clone())))
        .collect();
    Some(SchemeSystem {
        scheme: Arc::new(s.clone()),
        listed: Some(vars.into()),
    })
}

impl SchemeSystem {
    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// Contexts per point among the given variables.
    pub fn contexts_per_point<'a, I>(&self, vars: I) -> BTreeMap<String, usize>
    where
        I: IntoIterator<Item = &'a CtxVar>,
    {
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        for v in vars {
            *out.entry(self.scheme.name(v.point).to_string()).or_default() += 1;
        }
        out
    }
}

impl EquationSystem for SchemeSystem {
    type Var = CtxVar;

    fn domain(&self) -> &Domain {
        &self.scheme.domain
    }

    fn rhs(&self, v: &CtxVar) -> Option<Tree<CtxVar>> {
        if v.point.0 >= self.scheme.names.len() || !self.scheme.domain.contains(&v.ctx) {
            return None;
        }
        Some(compile_expr(&self.scheme.rhs[v.point.0], &v.ctx, &self.scheme.domain))
    }

    fn variables(&self) -> Option<Vec<CtxVar>> {
        self.listed.as_ref().map(|l| l.to_vec())
    }

    fn render_var(&self, v: &CtxVar) -> String {
        self.scheme.render_var(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsys::{eval_tree, tree_dep};
    use crate::fixtures;

    #[test]
    fn context_and_constant() {
        let dom = Domain::natinf();
        let mut never = |_: &CtxVar| -> Value { unreachable!() };
        assert_eq!(sem_expr(&dom, &Expr::Ctx, &Value::nat(4), &mut never), Value::nat(4));
        assert_eq!(
            sem_expr(&dom, &Expr::Const(Value::nat(9)), &Value::nat(4), &mut never),
            Value::nat(9)
        );
    }

    #[test]
    fn clamped_successor_body() {
        let s = fixtures::two_call_scheme(Domain::natinf());
        let v = s.point("v").unwrap();
        let got = sem_expr(s.domain(), s.rhs(v), &Value::nat(0), &mut |_| Value::nat(0));
        assert_eq!(got, Value::nat(1));
    }

    #[test]
    fn instantiation_queries() {
        let s = fixtures::two_call_scheme(Domain::natinf());
        let sys = instantiate_system(&s);
        let (u, v) = (s.point("u").unwrap(), s.point("v").unwrap());
        let t = sys.rhs(&CtxVar::new(v, Value::nat(0))).unwrap();
        match &t {
            Tree::Query(x, _) => assert_eq!(*x, CtxVar::new(v, Value::nat(0))),
            Tree::Answer(_) => panic!("expected a query"),
        }
        let t = sys.rhs(&CtxVar::new(u, Value::nat(3))).unwrap();
        match &t {
            Tree::Query(x, _) => assert_eq!(*x, CtxVar::new(u, Value::nat(3))),
            Tree::Answer(_) => panic!("expected a query"),
        }
        // <u,3> reads <u,3>, then <v, sigma<u,3>>, then <v, sigma<v,..>>
        let deps = tree_dep(
            &t,
            |x: &CtxVar| if x.point == u { Value::nat(5) } else { Value::nat(7) },
        );
        let expect: Vec<CtxVar> = vec![
            CtxVar::new(u, Value::nat(3)),
            CtxVar::new(v, Value::nat(5)),
            CtxVar::new(v, Value::nat(7)),
        ];
        assert_eq!(deps.into_iter().collect::<Vec<_>>(), {
            let mut e = expect;
            e.sort();
            e
        });
    }

    #[test]
    fn constant_point() {
        let dom = Domain::natinf();
        let s = Scheme::new(
            dom.clone(),
            vec!["u".into()],
            vec![Expr::Const(Value::nat(5))],
            (PointId(0), Value::nat(0)),
        )
        .unwrap();
        let sys = instantiate_system(&s);
        for ctx in [Value::nat(0), Value::nat(8), Value::inf()] {
            let t = sys.rhs(&CtxVar::new(PointId(0), ctx)).unwrap();
            assert!(matches!(t, Tree::Answer(ref d) if *d == Value::nat(5)));
        }
    }

    #[test]
    fn tree_agrees_with_semantics() {
        let s = fixtures::two_call_scheme(Domain::interval());
        let sys = instantiate_system(&s);
        let look = |x: &CtxVar| match &x.ctx {
            Value::Interval(_) => Domain::interval().join(&x.ctx, &Value::interval(x.point.0 as i64, 2)),
            _ => unreachable!(),
        };
        for p in s.points() {
            for ctx in [
                Value::interval(0, 0),
                Value::interval(-3, 1),
                Domain::interval().top(),
                Value::bot_interval(),
            ] {
                let t = sys.rhs(&CtxVar::new(p, ctx.clone())).unwrap();
                let direct = sem_expr(s.domain(), s.rhs(p), &ctx, &mut |x| look(x));
                assert_eq!(eval_tree(&t, look), direct);
            }
        }
    }

    #[test]
    fn rejects_bad_schemes() {
        let dom = Domain::powerset(&["a"]);
        let e = Expr::apply(Builtin::inc(), vec![Expr::Ctx]);
        assert!(matches!(
            Scheme::new(dom.clone(), vec!["u".into()], vec![e], (PointId(0), Value::Set(0))),
            Err(SchemeError::Unsupported { .. })
        ));
        let e = Expr::cell(PointId(3), Expr::Ctx);
        assert!(matches!(
            Scheme::new(dom.clone(), vec!["u".into()], vec![e], (PointId(0), Value::Set(0))),
            Err(SchemeError::UnknownPoint { .. })
        ));
        assert!(matches!(
            Scheme::new(dom, vec!["u".into()], vec![Expr::Ctx], (PointId(0), Value::Set(4))),
            Err(SchemeError::BadStart(_))
        ));
    }
}
