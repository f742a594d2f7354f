//! Complete lattices with widening and narrowing.
//!
//! A [`Domain`] is built from a [`LatticeDescriptor`] and owns every lattice
//! operation. Values are plain data ([`Value`]); mixing values of different
//! domains in one operation is a programming error and panics.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("chain lattice needs at least one element")]
    EmptyChain,
    #[error("powerset lattice needs at least one atom")]
    NoAtoms,
    #[error("duplicate powerset atom `{0}`")]
    DuplicateAtom(String),
    #[error("powerset lattice supports at most 64 atoms, got {0}")]
    TooManyAtoms(usize),
    #[error("malformed value `{text}` for lattice {lattice}")]
    BadValue { text: String, lattice: String },
    #[error("malformed interval: lower bound exceeds upper bound in `{0}`")]
    EmptyInterval(String),
}

/// Which lattice to build.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticeDescriptor {
    /// `0 < 1 < ... < n-1`.
    Chain(u32),
    /// Subsets of the given atoms, ordered by inclusion.
    Powerset(Vec<String>),
    /// Naturals extended with a top element `inf`.
    NatInf,
    /// Integer intervals with infinite bounds, plus an empty interval.
    Interval,
}

impl fmt::Display for LatticeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeDescriptor::Chain(n) => write!(f, "chain {n}"),
            LatticeDescriptor::Powerset(atoms) => write!(f, "powerset {}", atoms.join(" ")),
            LatticeDescriptor::NatInf => f.write_str("natinf"),
            LatticeDescriptor::Interval => f.write_str("interval"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NatInf {
    Fin(u64),
    Inf,
}

/// Interval bound. The derived order is the numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Fin(i64),
    PosInf,
}

impl Bound {
    fn shift(self, k: i64) -> Bound {
        match self {
            Bound::Fin(x) => Bound::Fin(x.saturating_add(k)),
            other => other,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Fin(x) => write!(f, "{x}"),
            Bound::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interval {
    Bot,
    /// Always `lo <= hi`, `lo != PosInf`, `hi != NegInf`.
    Range(Bound, Bound),
}

/// An abstract value. Equality and ordering are structural; every value has
/// a unique representation, so structural equality coincides with lattice
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Chain(u32),
    /// Bit `i` set iff atom `i` is a member.
    Set(u64),
    Nat(NatInf),
    Interval(Interval),
}

impl Value {
    pub fn nat(n: u64) -> Value {
        Value::Nat(NatInf::Fin(n))
    }

    pub fn inf() -> Value {
        Value::Nat(NatInf::Inf)
    }

    /// Finite interval `[lo, hi]`; returns the empty interval when `lo > hi`.
    pub fn interval(lo: i64, hi: i64) -> Value {
        Value::range(Bound::Fin(lo), Bound::Fin(hi))
    }

    /// Interval from arbitrary bounds, normalized to `Bot` when empty.
    pub fn range(lo: Bound, hi: Bound) -> Value {
        Value::Interval(make_range(lo, hi))
    }

    pub fn bot_interval() -> Value {
        Value::Interval(Interval::Bot)
    }
}

fn make_range(lo: Bound, hi: Bound) -> Interval {
    if lo > hi || lo == Bound::PosInf || hi == Bound::NegInf {
        Interval::Bot
    } else {
        Interval::Range(lo, hi)
    }
}

/// Prints powerset values as atom indices; use [`Domain::render`] for names.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Chain(i) => write!(f, "{i}"),
            Value::Set(mask) => {
                f.write_str("{")?;
                let mut first = true;
                for i in 0..64 {
                    if mask & (1 << i) != 0 {
                        if !first {
                            f.write_str(",")?;
                        }
                        first = false;
                        write!(f, "#{i}")?;
                    }
                }
                f.write_str("}")
            }
            Value::Nat(NatInf::Fin(n)) => write!(f, "{n}"),
            Value::Nat(NatInf::Inf) => f.write_str("inf"),
            Value::Interval(Interval::Bot) => f.write_str("bot"),
            Value::Interval(Interval::Range(l, u)) => write!(f, "[{l},{u}]"),
        }
    }
}

/// The operations of one lattice. Cheap to clone and shareable across
/// threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    desc: Arc<LatticeDescriptor>,
}

/// Builds the operations for a descriptor, rejecting malformed descriptors.
pub fn make_domain(desc: LatticeDescriptor) -> Result<Domain, LatticeError> {
    Domain::new(desc)
}

#[track_caller]
fn mixed(a: &Value, b: &Value) -> ! {
    panic!("lattice operation on values of different domains: {a:?} and {b:?}")
}

impl Domain {
    pub fn new(desc: LatticeDescriptor) -> Result<Domain, LatticeError> {
        match &desc {
            LatticeDescriptor::Chain(0) => return Err(LatticeError::EmptyChain),
            LatticeDescriptor::Powerset(atoms) => {
                if atoms.is_empty() {
                    return Err(LatticeError::NoAtoms);
                }
                if atoms.len() > 64 {
                    return Err(LatticeError::TooManyAtoms(atoms.len()));
                }
                for (i, a) in atoms.iter().enumerate() {
                    if atoms[..i].contains(a) {
                        return Err(LatticeError::DuplicateAtom(a.clone()));
                    }
                }
            }
            _ => {}
        }
        Ok(Domain { desc: Arc::new(desc) })
    }

    pub fn chain(n: u32) -> Domain {
        Domain::new(LatticeDescriptor::Chain(n)).expect("chain of length zero")
    }

    pub fn powerset<S: AsRef<str>>(atoms: &[S]) -> Domain {
        Domain::new(LatticeDescriptor::Powerset(
            atoms.iter().map(|a| a.as_ref().to_string()).collect(),
        ))
        .expect("malformed powerset atoms")
    }

    pub fn natinf() -> Domain {
        Domain {
            desc: Arc::new(LatticeDescriptor::NatInf),
        }
    }

    pub fn interval() -> Domain {
        Domain {
            desc: Arc::new(LatticeDescriptor::Interval),
        }
    }

    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.desc
    }

    fn full_mask(&self) -> u64 {
        match &*self.desc {
            LatticeDescriptor::Powerset(atoms) if atoms.len() == 64 => u64::MAX,
            LatticeDescriptor::Powerset(atoms) => (1u64 << atoms.len()) - 1,
            _ => 0,
        }
    }

    pub fn bot(&self) -> Value {
        match &*self.desc {
            LatticeDescriptor::Chain(_) => Value::Chain(0),
            LatticeDescriptor::Powerset(_) => Value::Set(0),
            LatticeDescriptor::NatInf => Value::nat(0),
            LatticeDescriptor::Interval => Value::Interval(Interval::Bot),
        }
    }

    pub fn top(&self) -> Value {
        match &*self.desc {
            LatticeDescriptor::Chain(n) => Value::Chain(n - 1),
            LatticeDescriptor::Powerset(_) => Value::Set(self.full_mask()),
            LatticeDescriptor::NatInf => Value::inf(),
            LatticeDescriptor::Interval => Value::Interval(Interval::Range(Bound::NegInf, Bound::PosInf)),
        }
    }

    /// Whether `v` is a well-formed element of this lattice.
    pub fn contains(&self, v: &Value) -> bool {
        match (&*self.desc, v) {
            (LatticeDescriptor::Chain(n), Value::Chain(i)) => i < n,
            (LatticeDescriptor::Powerset(_), Value::Set(m)) => m & !self.full_mask() == 0,
            (LatticeDescriptor::NatInf, Value::Nat(_)) => true,
            (LatticeDescriptor::Interval, Value::Interval(Interval::Bot)) => true,
            (LatticeDescriptor::Interval, Value::Interval(Interval::Range(l, u))) => {
                l <= u && *l != Bound::PosInf && *u != Bound::NegInf
            }
            _ => false,
        }
    }

    #[track_caller]
    pub fn leq(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Chain(x), Value::Chain(y)) => x <= y,
            (Value::Set(x), Value::Set(y)) => x & !y == 0,
            (Value::Nat(x), Value::Nat(y)) => x <= y,
            (Value::Interval(x), Value::Interval(y)) => match (x, y) {
                (Interval::Bot, _) => true,
                (_, Interval::Bot) => false,
                (Interval::Range(l1, u1), Interval::Range(l2, u2)) => l2 <= l1 && u1 <= u2,
            },
            _ => mixed(a, b),
        }
    }

    #[track_caller]
    pub fn eq(&self, a: &Value, b: &Value) -> bool {
        if std::mem::discriminant(a) != std::mem::discriminant(b) {
            mixed(a, b)
        }
        a == b
    }

    #[track_caller]
    pub fn join(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Chain(x), Value::Chain(y)) => Value::Chain(*x.max(y)),
            (Value::Set(x), Value::Set(y)) => Value::Set(x | y),
            (Value::Nat(x), Value::Nat(y)) => Value::Nat(*x.max(y)),
            (Value::Interval(x), Value::Interval(y)) => Value::Interval(match (x, y) {
                (Interval::Bot, other) | (other, Interval::Bot) => *other,
                (Interval::Range(l1, u1), Interval::Range(l2, u2)) => Interval::Range(*l1.min(l2), *u1.max(u2)),
            }),
            _ => mixed(a, b),
        }
    }

    #[track_caller]
    pub fn meet(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Chain(x), Value::Chain(y)) => Value::Chain(*x.min(y)),
            (Value::Set(x), Value::Set(y)) => Value::Set(x & y),
            (Value::Nat(x), Value::Nat(y)) => Value::Nat(*x.min(y)),
            (Value::Interval(x), Value::Interval(y)) => Value::Interval(match (x, y) {
                (Interval::Bot, _) | (_, Interval::Bot) => Interval::Bot,
                (Interval::Range(l1, u1), Interval::Range(l2, u2)) => make_range(*l1.max(l2), *u1.min(u2)),
            }),
            _ => mixed(a, b),
        }
    }

    /// Widening. Finite lattices widen by join; `natinf` jumps to `inf` on
    /// any increase; intervals push each unstable bound to infinity.
    #[track_caller]
    pub fn widen(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Chain(_), Value::Chain(_)) | (Value::Set(_), Value::Set(_)) => self.join(a, b),
            (Value::Nat(x), Value::Nat(y)) => {
                if x < y {
                    Value::inf()
                } else {
                    a.clone()
                }
            }
            (Value::Interval(x), Value::Interval(y)) => Value::Interval(match (x, y) {
                (Interval::Bot, other) | (other, Interval::Bot) => *other,
                (Interval::Range(l1, u1), Interval::Range(l2, u2)) => Interval::Range(
                    if l2 < l1 { Bound::NegInf } else { *l1 },
                    if u2 > u1 { Bound::PosInf } else { *u1 },
                ),
            }),
            _ => mixed(a, b),
        }
    }

    /// Narrowing. Finite lattices narrow by meet; `natinf` only improves
    /// `inf`; intervals only refine infinite bounds.
    #[track_caller]
    pub fn narrow(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Chain(_), Value::Chain(_)) | (Value::Set(_), Value::Set(_)) => self.meet(a, b),
            (Value::Nat(x), Value::Nat(_)) => {
                if *x == NatInf::Inf {
                    b.clone()
                } else {
                    a.clone()
                }
            }
            (Value::Interval(x), Value::Interval(y)) => Value::Interval(match (x, y) {
                (Interval::Bot, _) | (_, Interval::Bot) => Interval::Bot,
                (Interval::Range(l1, u1), Interval::Range(l2, u2)) => make_range(
                    if *l1 == Bound::NegInf { *l2 } else { *l1 },
                    if *u1 == Bound::PosInf { *u2 } else { *u1 },
                ),
            }),
            _ => mixed(a, b),
        }
    }

    /// Narrow when the new value is below the old one, widen otherwise.
    #[track_caller]
    pub fn warrow(&self, a: &Value, b: &Value) -> Value {
        if self.leq(b, a) {
            self.narrow(a, b)
        } else {
            self.widen(a, b)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            &*self.desc,
            LatticeDescriptor::Chain(_) | LatticeDescriptor::Powerset(_)
        )
    }

    /// Number of elements of a finite lattice.
    pub fn size(&self) -> Option<u128> {
        match &*self.desc {
            LatticeDescriptor::Chain(n) => Some(u128::from(*n)),
            LatticeDescriptor::Powerset(atoms) => Some(1u128 << atoms.len()),
            _ => None,
        }
    }

    /// Length of the longest strictly ascending chain, for finite lattices.
    pub fn height(&self) -> Option<u32> {
        match &*self.desc {
            LatticeDescriptor::Chain(n) => Some(n - 1),
            LatticeDescriptor::Powerset(atoms) => Some(atoms.len() as u32),
            _ => None,
        }
    }

    /// Every element, for finite lattices with at most 2^20 elements.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match &*self.desc {
            LatticeDescriptor::Chain(n) => Some((0..*n).map(Value::Chain).collect()),
            LatticeDescriptor::Powerset(atoms) if atoms.len() <= 20 => {
                Some((0..(1u64 << atoms.len())).map(Value::Set).collect())
            }
            _ => None,
        }
    }

    /// Successor: saturating on chains, `inf` stays `inf`, intervals shift
    /// by one. `None` for powersets.
    pub fn inc(&self, v: &Value) -> Option<Value> {
        self.add(v, 1)
    }

    /// Shift by `k`, saturating at the ends of a chain and at zero on
    /// `natinf`. `None` for powersets.
    pub fn add(&self, v: &Value, k: i64) -> Option<Value> {
        match (&*self.desc, v) {
            (LatticeDescriptor::Chain(n), Value::Chain(i)) => {
                let r = (i64::from(*i) + k).clamp(0, i64::from(*n) - 1);
                Some(Value::Chain(r as u32))
            }
            (LatticeDescriptor::NatInf, Value::Nat(NatInf::Inf)) => Some(Value::inf()),
            (LatticeDescriptor::NatInf, Value::Nat(NatInf::Fin(x))) => {
                let r = if k >= 0 {
                    x.saturating_add(k as u64)
                } else {
                    x.saturating_sub(k.unsigned_abs())
                };
                Some(Value::nat(r))
            }
            (LatticeDescriptor::Interval, Value::Interval(Interval::Bot)) => Some(v.clone()),
            (LatticeDescriptor::Interval, Value::Interval(Interval::Range(l, u))) => {
                Some(Value::Interval(Interval::Range(l.shift(k), u.shift(k))))
            }
            (LatticeDescriptor::Powerset(_), Value::Set(_)) => None,
            _ => panic!("value {v:?} does not belong to lattice {}", self.desc),
        }
    }

    /// Whether [`Domain::add`] is defined on this lattice.
    pub fn has_arithmetic(&self) -> bool {
        !matches!(&*self.desc, LatticeDescriptor::Powerset(_))
    }

    pub fn parse_value(&self, text: &str) -> Result<Value, LatticeError> {
        let bad = || LatticeError::BadValue {
            text: text.to_string(),
            lattice: self.desc.to_string(),
        };
        let t = text.trim();
        match &*self.desc {
            LatticeDescriptor::Chain(n) => {
                let i: u32 = t.parse().map_err(|_| bad())?;
                if i < *n {
                    Ok(Value::Chain(i))
                } else {
                    Err(bad())
                }
            }
            LatticeDescriptor::NatInf => {
                if t == "inf" {
                    Ok(Value::inf())
                } else {
                    t.parse().map(Value::nat).map_err(|_| bad())
                }
            }
            LatticeDescriptor::Powerset(atoms) => {
                let inner = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')).ok_or_else(bad)?;
                let mut mask = 0u64;
                for name in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let idx = atoms.iter().position(|a| a == name).ok_or_else(bad)?;
                    mask |= 1 << idx;
                }
                Ok(Value::Set(mask))
            }
            LatticeDescriptor::Interval => {
                if t == "bot" {
                    return Ok(Value::bot_interval());
                }
                let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
                let (l, u) = inner.split_once(',').ok_or_else(bad)?;
                let bound = |s: &str| -> Result<Bound, LatticeError> {
                    match s.trim() {
                        "-inf" => Ok(Bound::NegInf),
                        "inf" | "+inf" => Ok(Bound::PosInf),
                        n => n.parse().map(Bound::Fin).map_err(|_| bad()),
                    }
                };
                let (l, u) = (bound(l)?, bound(u)?);
                if l > u || l == Bound::PosInf || u == Bound::NegInf {
                    return Err(LatticeError::EmptyInterval(t.to_string()));
                }
                Ok(Value::Interval(Interval::Range(l, u)))
            }
        }
    }

    /// Textual form accepted by [`Domain::parse_value`].
    pub fn render(&self, v: &Value) -> String {
        match (&*self.desc, v) {
            (LatticeDescriptor::Powerset(atoms), Value::Set(mask)) => {
                let names: Vec<&str> = atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| a.as_str())
                    .collect();
                format!("{{{}}}", names.join(","))
            }
            _ => v.to_string(),
        }
    }
}
