use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::lattice::{Domain, Value};

type Evaluator = Arc<dyn Fn(&Domain, &[Value]) -> Value + Send + Sync>;

/// A k-ary abstract function usable in scheme expressions.
#[derive(Clone)]
pub struct Builtin {
    name: Arc<str>,
    arity: usize,
    needs_arithmetic: bool,
    eval: Evaluator,
}

impl Builtin {
    pub fn new<F>(name: &str, arity: usize, f: F) -> Builtin
    where
        F: Fn(&Domain, &[Value]) -> Value + Send + Sync + 'static,
    {
        Builtin {
            name: Arc::from(name),
            arity,
            needs_arithmetic: false,
            eval: Arc::new(f),
        }
    }

    fn arithmetic<F>(name: &str, arity: usize, f: F) -> Builtin
    where
        F: Fn(&Domain, &[Value]) -> Value + Send + Sync + 'static,
    {
        Builtin {
            needs_arithmetic: true,
            ..Builtin::new(name, arity, f)
        }
    }

    /// Name as written in scheme files; parameterized builtins include
    /// their parameter, e.g. `meet_const 10`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn supports(&self, dom: &Domain) -> bool {
        !self.needs_arithmetic || dom.has_arithmetic()
    }

    pub fn apply(&self, dom: &Domain, args: &[Value]) -> Value {
        assert_eq!(
            args.len(),
            self.arity,
            "builtin `{}` applied to {} arguments",
            self.name,
            args.len()
        );
        (self.eval)(dom, args)
    }

    pub fn inc() -> Builtin {
        Builtin::arithmetic("inc", 1, |d, a| d.inc(&a[0]).expect("arithmetic lattice"))
    }

    pub fn dec() -> Builtin {
        Builtin::arithmetic("dec", 1, |d, a| d.add(&a[0], -1).expect("arithmetic lattice"))
    }

    pub fn id() -> Builtin {
        Builtin::new("id", 1, |_, a| a[0].clone())
    }

    pub fn join() -> Builtin {
        Builtin::new("join", 2, |d, a| d.join(&a[0], &a[1]))
    }

    pub fn meet() -> Builtin {
        Builtin::new("meet", 2, |d, a| d.meet(&a[0], &a[1]))
    }

    pub fn add_const(k: i64) -> Builtin {
        Builtin::arithmetic(&format!("add_const {k}"), 1, move |d, a| {
            d.add(&a[0], k).expect("arithmetic lattice")
        })
    }

    /// `meet_const c`; `c` rendered with `text` for printing.
    pub fn meet_const(c: Value, text: &str) -> Builtin {
        Builtin::new(&format!("meet_const {text}"), 1, move |d, a| d.meet(&a[0], &c))
    }

    pub fn join_const(c: Value, text: &str) -> Builtin {
        Builtin::new(&format!("join_const {text}"), 1, move |d, a| d.join(&a[0], &c))
    }
}

impl PartialEq for Builtin {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

impl fmt::Debug for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Builtin({}/{})", self.name, self.arity)
    }
}

/// Named builtins available to a scheme. Parameterized builtins
/// (`add_const`, `meet_const`, `join_const`) are instantiated on demand.
#[derive(Clone, Debug)]
pub struct BuiltinRegistry {
    fixed: BTreeMap<String, Builtin>,
}

impl Default for BuiltinRegistry {
    fn default() -> Self {
        BuiltinRegistry::standard()
    }
}

impl BuiltinRegistry {
    pub fn empty() -> BuiltinRegistry {
        BuiltinRegistry { fixed: BTreeMap::new() }
    }

    /// `inc`, `dec`, `id`, `join`, `meet`.
    pub fn standard() -> BuiltinRegistry {
        let mut r = BuiltinRegistry::empty();
        for b in [
            Builtin::inc(),
            Builtin::dec(),
            Builtin::id(),
            Builtin::join(),
            Builtin::meet(),
        ] {
            r.register(b);
        }
        r
    }

    pub fn register(&mut self, b: Builtin) {
        self.fixed.insert(b.name().to_string(), b);
    }

    pub fn get(&self, name: &str) -> Option<&Builtin> {
        self.fixed.get(name)
    }

    /// Instantiates a parameterized builtin, parsing its parameter against
    /// `dom`.
    pub fn parameterized(&self, name: &str, param: &str, dom: &Domain) -> Result<Builtin, String> {
        match name {
            "add_const" => param
                .parse::<i64>()
                .map(Builtin::add_const)
                .map_err(|_| format!("`add_const` expects an integer, got `{param}`")),
            "meet_const" | "join_const" => {
                let c = dom.parse_value(param).map_err(|e| e.to_string())?;
                let text = dom.render(&c);
                Ok(if name == "meet_const" {
                    Builtin::meet_const(c, &text)
                } else {
                    Builtin::join_const(c, &text)
                })
            }
            other => Err(format!("unknown parameterized builtin `{other}`")),
        }
    }
}
