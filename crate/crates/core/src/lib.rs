//! Terminating fixpoint solvers for abstract interpretation that combine
//! widening and narrowing, also for systems that are not monotone.
//!
//! * [`lattice`]: finite chains, powersets, naturals with infinity and
//!   integer intervals, with widening and narrowing.
//! * [`eqsys`]: right-hand sides as computation trees, partial
//!   assignments, closedness, and a small expression language.
//! * [`solvers`]: round-robin, two-phase, mixed-phase and warrowing
//!   solvers.
//! * [`interproc`]: context-parameterized equation schemes and their
//!   stratification.
//! * [`oracle`]: brute-force checks on finite instances.
//! * [`cli`]: file formats and commands.
//!
//! ```
//! use fixsolve::cli::parse_finite_file;
//! use fixsolve::eqsys::Sym;
//! use fixsolve::lattice::Value;
//! use fixsolve::solvers::{tsmp, Limits};
//!
//! let text = "lattice natinf\nvar x = join (lit 1) (inc (meet (get x) (lit 9)))\n";
//! let sys = parse_finite_file(text).unwrap().to_system();
//! let r = tsmp(&sys, Sym::new("x"), &Limits::default()).unwrap();
//! assert_eq!(r.assignment.get(&Sym::new("x")), Some(&Value::nat(10)));
//! ```

pub mod cli;
pub mod eqsys;
pub mod fixtures;
pub mod interproc;
pub mod lattice;
pub mod oracle;
pub mod solvers;
pub mod syntax;
