//! A small expression language for right-hand sides of finite systems.
//!
//! ```text
//! e ::= get y | lit d | join e e | meet e e | inc e | ite (cmp e e) e e
//! cmp ::= eq | leq
//! ```
//!
//! Each `get` becomes one query of the compiled tree; operands are
//! evaluated left to right.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{FiniteSystem, Sym, Tree};
use crate::lattice::{Domain, Value};
use crate::syntax::{read_form, ParseError, Pos, Sexp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Leq,
}

impl Cmp {
    fn holds(self, dom: &Domain, a: &Value, b: &Value) -> bool {
        match self {
            Cmp::Eq => dom.eq(a, b),
            Cmp::Leq => dom.leq(a, b),
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Cmp::Eq => "eq",
            Cmp::Leq => "leq",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Get(Sym),
    Lit(Value),
    Join(Arc<Rhs>, Arc<Rhs>),
    Meet(Arc<Rhs>, Arc<Rhs>),
    /// Successor; only on lattices with arithmetic.
    Inc(Arc<Rhs>),
    Ite {
        cmp: Cmp,
        lhs: Arc<Rhs>,
        rhs: Arc<Rhs>,
        then: Arc<Rhs>,
        els: Arc<Rhs>,
    },
}

impl Rhs {
    pub fn get(v: &str) -> Rhs {
        Rhs::Get(Sym::new(v))
    }

    pub fn join(a: Rhs, b: Rhs) -> Rhs {
        Rhs::Join(Arc::new(a), Arc::new(b))
    }

    pub fn meet(a: Rhs, b: Rhs) -> Rhs {
        Rhs::Meet(Arc::new(a), Arc::new(b))
    }

    pub fn inc(a: Rhs) -> Rhs {
        Rhs::Inc(Arc::new(a))
    }

    pub fn ite(cmp: Cmp, lhs: Rhs, rhs: Rhs, then: Rhs, els: Rhs) -> Rhs {
        Rhs::Ite {
            cmp,
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
            then: Arc::new(then),
            els: Arc::new(els),
        }
    }

    /// Direct recursive evaluation, independent of the tree compilation.
    pub fn eval_direct(&self, dom: &Domain, lookup: &dyn Fn(&Sym) -> Value) -> Value {
        match self {
            Rhs::Get(v) => lookup(v),
            Rhs::Lit(d) => d.clone(),
            Rhs::Join(a, b) => dom.join(&a.eval_direct(dom, lookup), &b.eval_direct(dom, lookup)),
            Rhs::Meet(a, b) => dom.meet(&a.eval_direct(dom, lookup), &b.eval_direct(dom, lookup)),
            Rhs::Inc(a) => dom
                .inc(&a.eval_direct(dom, lookup))
                .expect("inc on a lattice without arithmetic"),
            Rhs::Ite {
                cmp,
                lhs,
                rhs,
                then,
                els,
            } => {
                let l = lhs.eval_direct(dom, lookup);
                let r = rhs.eval_direct(dom, lookup);
                if cmp.holds(dom, &l, &r) {
                    then.eval_direct(dom, lookup)
                } else {
                    els.eval_direct(dom, lookup)
                }
            }
        }
    }

    /// Every variable mentioned anywhere in the expression.
    pub fn mentioned_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Rhs::Get(v) => {
                out.insert(v.clone());
            }
            Rhs::Lit(_) => {}
            Rhs::Join(a, b) | Rhs::Meet(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Rhs::Inc(a) => a.collect_vars(out),
            Rhs::Ite {
                lhs, rhs, then, els, ..
            } => {
                for e in [lhs, rhs, then, els] {
                    e.collect_vars(out);
                }
            }
        }
    }

    /// Built from `get`, `lit`, `join` and `meet` only.
    pub fn is_syntactically_monotone(&self) -> bool {
        match self {
            Rhs::Get(_) | Rhs::Lit(_) => true,
            Rhs::Join(a, b) | Rhs::Meet(a, b) => a.is_syntactically_monotone() && b.is_syntactically_monotone(),
            Rhs::Inc(a) => a.is_syntactically_monotone(),
            Rhs::Ite { .. } => false,
        }
    }

    pub fn display<'a>(&'a self, dom: &'a Domain) -> RhsDisplay<'a> {
        RhsDisplay {
            rhs: self,
            dom,
            nested: false,
        }
    }

    /// Parses a body that starts at `start` in the source file.
    pub fn parse(text: &str, dom: &Domain, start: Pos) -> Result<Rhs, ParseError> {
        let (items, pos) = read_form(text, start)?;
        from_form(&items, pos, dom)
    }
}

pub struct RhsDisplay<'a> {
    rhs: &'a Rhs,
    dom: &'a Domain,
    nested: bool,
}

impl<'a> fmt::Display for RhsDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |r: &'a Rhs| RhsDisplay {
            rhs: r,
            dom: self.dom,
            nested: true,
        };
        if self.nested {
            f.write_str("(")?;
        }
        match self.rhs {
            Rhs::Get(v) => write!(f, "get {v}")?,
            Rhs::Lit(d) => write!(f, "lit {}", self.dom.render(d))?,
            Rhs::Join(a, b) => write!(f, "join {} {}", sub(a), sub(b))?,
            Rhs::Meet(a, b) => write!(f, "meet {} {}", sub(a), sub(b))?,
            Rhs::Inc(a) => write!(f, "inc {}", sub(a))?,
            Rhs::Ite {
                cmp,
                lhs,
                rhs,
                then,
                els,
            } => write!(
                f,
                "ite ({} {} {}) {} {}",
                cmp.keyword(),
                sub(lhs),
                sub(rhs),
                sub(then),
                sub(els)
            )?,
        }
        if self.nested {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn arity_error(pos: Pos, head: &str, want: usize, got: usize) -> ParseError {
    ParseError::new(pos, format!("`{head}` expects {want} argument(s), got {got}"))
}

fn sub_expr(s: &Sexp, dom: &Domain) -> Result<Rhs, ParseError> {
    match s {
        Sexp::List(items, p) => from_form(items, *p, dom),
        Sexp::Atom(a, p) => Err(ParseError::new(
            *p,
            format!("expected a parenthesized expression, found `{a}`"),
        )),
    }
}

fn from_form(items: &[Sexp], pos: Pos, dom: &Domain) -> Result<Rhs, ParseError> {
    let head = items
        .first()
        .and_then(Sexp::atom)
        .ok_or_else(|| ParseError::new(pos, "expected an operator"))?;
    let args = &items[1..];
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(arity_error(pos, head, n, args.len()))
        }
    };
    match head {
        "get" => {
            want(1)?;
            let name = args[0]
                .atom()
                .ok_or_else(|| ParseError::new(args[0].pos(), "`get` expects a variable name"))?;
            Ok(Rhs::get(name))
        }
        "lit" => {
            want(1)?;
            let text = args[0]
                .atom()
                .ok_or_else(|| ParseError::new(args[0].pos(), "`lit` expects a value"))?;
            let v = dom
                .parse_value(text)
                .map_err(|e| ParseError::new(args[0].pos(), e.to_string()))?;
            Ok(Rhs::Lit(v))
        }
        "join" | "meet" => {
            want(2)?;
            let (a, b) = (sub_expr(&args[0], dom)?, sub_expr(&args[1], dom)?);
            Ok(if head == "join" {
                Rhs::join(a, b)
            } else {
                Rhs::meet(a, b)
            })
        }
        "inc" => {
            want(1)?;
            if !dom.has_arithmetic() {
                return Err(ParseError::new(
                    pos,
                    format!("`inc` is not defined on lattice {}", dom.descriptor()),
                ));
            }
            Ok(Rhs::inc(sub_expr(&args[0], dom)?))
        }
        "ite" => {
            want(3)?;
            let (cmp, lhs, rhs) = match &args[0] {
                Sexp::List(c, p) => {
                    let cmp = match c.first().and_then(Sexp::atom) {
                        Some("eq") => Cmp::Eq,
                        Some("leq") => Cmp::Leq,
                        _ => return Err(ParseError::new(*p, "`ite` condition must be `eq` or `leq`")),
                    };
                    if c.len() != 3 {
                        return Err(arity_error(*p, cmp.keyword(), 2, c.len() - 1));
                    }
                    (cmp, sub_expr(&c[1], dom)?, sub_expr(&c[2], dom)?)
                }
                other => return Err(ParseError::new(other.pos(), "`ite` condition must be parenthesized")),
            };
            Ok(Rhs::ite(
                cmp,
                lhs,
                rhs,
                sub_expr(&args[1], dom)?,
                sub_expr(&args[2], dom)?,
            ))
        }
        "eq" | "leq" => Err(ParseError::new(
            pos,
            format!("`{head}` may only appear as an `ite` condition"),
        )),
        other => Err(ParseError::new(pos, format!("unknown operator `{other}`"))),
    }
}

type Kont = Arc<dyn Fn(Value) -> Tree<Sym> + Send + Sync>;

fn cps(e: &Arc<Rhs>, dom: &Domain, k: Kont) -> Tree<Sym> {
    match &**e {
        Rhs::Get(v) => Tree::query(v.clone(), move |d| k(d.clone())),
        Rhs::Lit(d) => k(d.clone()),
        Rhs::Join(a, b) | Rhs::Meet(a, b) => {
            let is_join = matches!(&**e, Rhs::Join(..));
            let (b, dom2) = (Arc::clone(b), dom.clone());
            cps(
                a,
                dom,
                Arc::new(move |da| {
                    let (k, dom3) = (Arc::clone(&k), dom2.clone());
                    cps(
                        &b,
                        &dom2,
                        Arc::new(move |db| {
                            k(if is_join {
                                dom3.join(&da, &db)
                            } else {
                                dom3.meet(&da, &db)
                            })
                        }),
                    )
                }),
            )
        }
        Rhs::Inc(a) => {
            let dom2 = dom.clone();
            cps(
                a,
                dom,
                Arc::new(move |d| k(dom2.inc(&d).expect("inc on a lattice without arithmetic"))),
            )
        }
        Rhs::Ite {
            cmp,
            lhs,
            rhs,
            then,
            els,
        } => {
            let (cmp, rhs, then, els, dom2) = (*cmp, Arc::clone(rhs), Arc::clone(then), Arc::clone(els), dom.clone());
            cps(
                lhs,
                dom,
                Arc::new(move |l| {
                    let (then, els, k, dom3) = (Arc::clone(&then), Arc::clone(&els), Arc::clone(&k), dom2.clone());
                    cps(
                        &rhs,
                        &dom2,
                        Arc::new(move |r| {
                            let branch = if cmp.holds(&dom3, &l, &r) { &then } else { &els };
                            cps(branch, &dom3, Arc::clone(&k))
                        }),
                    )
                }),
            )
        }
    }
}

/// Compiles an expression into a computation tree over `dom`.
pub fn compile_rhs_dsl(expr: &Rhs, dom: &Domain) -> Tree<Sym> {
    cps(&Arc::new(expr.clone()), dom, Arc::new(Tree::Answer))
}

/// A finite system written in the expression language, in declaration
/// order. This is the in-memory form of an equation file.
#[derive(Debug, Clone, PartialEq)]
pub struct DslSystem {
    pub domain: Domain,
    pub equations: Vec<(Sym, Rhs)>,
}

impl DslSystem {
    pub fn vars(&self) -> Vec<Sym> {
        self.equations.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn rhs_of(&self, v: &Sym) -> Option<&Rhs> {
        self.equations.iter().find(|(w, _)| w == v).map(|(_, e)| e)
    }

    pub fn to_system(&self) -> FiniteSystem<Sym> {
        let mut sys = FiniteSystem::new(self.domain.clone());
        for (v, e) in &self.equations {
            sys.define(v.clone(), compile_rhs_dsl(e, &self.domain));
        }
        sys
    }

    pub fn is_syntactically_monotone(&self) -> bool {
        self.equations.iter().all(|(_, e)| e.is_syntactically_monotone())
    }
}

impl fmt::Display for DslSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lattice {}", self.domain.descriptor())?;
        for (v, e) in &self.equations {
            writeln!(f, "var {v} = {}", e.display(&self.domain))?;
        }
        Ok(())
    }
}
