use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{for_each_choice, OracleError, ENUM_BUDGET};
use crate::eqsys::{eval_tree, Cmp, DslSystem, EquationSystem, Rhs, Sym, Tree};
use crate::lattice::{Domain, Value};

/// A random finite system over `dom` with variables `y1..y{nvars}`, built
/// from `get`, `lit`, `join`, `meet` and, unless `monotone_only`, `ite`.
/// Deterministic in `seed`.
///
/// # Panics
/// If `dom` is not finite or `nvars` is zero.
pub fn gen_random_system(seed: u64, nvars: usize, dom: &Domain, depth: u32, monotone_only: bool) -> DslSystem {
    assert!(nvars > 0, "a random system needs at least one variable");
    let elems = dom.enumerate().expect("random systems need an enumerable lattice");
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        nvars,
        elems,
        monotone_only,
    };
    let equations = (1..=nvars)
        .map(|i| (Sym::new(&format!("y{i}")), g.expr(depth)))
        .collect();
    DslSystem {
        domain: dom.clone(),
        equations,
    }
}

struct Gen {
    rng: ChaCha8Rng,
    nvars: usize,
    elems: Vec<Value>,
    monotone_only: bool,
}

impl Gen {
    fn leaf(&mut self) -> Rhs {
        if self.rng.gen_bool(0.7) {
            Rhs::get(&format!("y{}", self.rng.gen_range(1..=self.nvars)))
        } else {
            Rhs::Lit(self.elems[self.rng.gen_range(0..self.elems.len())].clone())
        }
    }

    fn expr(&mut self, depth: u32) -> Rhs {
        if depth == 0 {
            return self.leaf();
        }
        let choices = if self.monotone_only { 4 } else { 6 };
        match self.rng.gen_range(0..choices) {
            0 => self.leaf(),
            1 => Rhs::join(self.expr(depth - 1), self.expr(depth - 1)),
            2 => Rhs::meet(self.expr(depth - 1), self.expr(depth - 1)),
            3 => Rhs::join(self.leaf(), self.expr(depth - 1)),
            _ => {
                let cmp = if self.rng.gen_bool(0.5) { Cmp::Eq } else { Cmp::Leq };
                let lhs = self.expr(depth - 1);
                let rhs = self.expr(depth - 1);
                Rhs::ite(cmp, lhs, rhs, self.expr(depth - 1), self.expr(depth - 1))
            }
        }
    }
}

/// Exhaustive monotonicity check of every right-hand side.
///
/// Any `σ ⊑ σ'` is reached from `σ` by raising one coordinate at a time,
/// so it suffices to compare `σ` with every single-coordinate raise of it.
pub fn is_monotone<S: EquationSystem>(sys: &S) -> Result<bool, OracleError> {
    let dom = sys.domain();
    let elems = dom.enumerate().ok_or(OracleError::NotFinite)?;
    let vars = sys.variables().ok_or(OracleError::NotFinite)?;
    let needed = (elems.len() as u128)
        .checked_pow(vars.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > ENUM_BUDGET {
        return Err(OracleError::Budget {
            needed,
            limit: ENUM_BUDGET,
        });
    }
    let trees: Vec<Tree<S::Var>> = vars
        .iter()
        .map(|v| {
            sys.rhs(v)
                .ok_or_else(|| OracleError::UnknownVariable(sys.render_var(v)))
        })
        .collect::<Result<_, _>>()?;
    let space = vec![elems.clone(); vars.len()];
    let mut monotone = true;
    for_each_choice(&space, |sigma| {
        if !monotone {
            return;
        }
        let at = |s: &[Value], z: &S::Var| {
            let i = vars.iter().position(|v| v == z).expect("variable of the system");
            s[i].clone()
        };
        let base: Vec<Value> = trees.iter().map(|t| eval_tree(t, |z| at(sigma, z))).collect();
        let mut raised = sigma.to_vec();
        for i in 0..vars.len() {
            for d in elems.iter().filter(|d| *d != &sigma[i] && dom.leq(&sigma[i], d)) {
                raised[i] = d.clone();
                if trees
                    .iter()
                    .zip(&base)
                    .any(|(t, b)| !dom.leq(b, &eval_tree(t, |z| at(&raised, z))))
                {
                    monotone = false;
                    return;
                }
            }
            raised[i] = sigma[i].clone();
        }
    });
    Ok(monotone)
}
