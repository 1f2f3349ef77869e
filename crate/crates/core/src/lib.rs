//! Mean-payoff games through the universal graph `U` over `ℕ≥1 × ℕ`.
//!
//! * [`arena`]: finite weighted game graphs and their JSON format.
//! * [`universal`]: vertices and edge predicate of `U`.
//! * [`payoff`]: exact mean-payoff values and cycle means.
//! * [`morphism`]: potentials and morphisms from one-player graphs into `U`.
//! * [`solver`]: progress-measure lifting, certificates, game values and plays.
//! * [`oracle`]: brute-force positional-strategy enumeration for small arenas.
//! * [`cli`]: the `meanpayoff` command-line front end.

pub mod arena;
pub mod cli;
pub mod morphism;
pub mod oracle;
pub mod payoff;
pub mod selftest;
pub mod solver;
pub mod universal;

pub use arena::{Arena, ArenaError, Owner, WeightedGraph};
pub use payoff::{Rational, UltimatelyPeriodicWord, Variant};
pub use solver::{check_certificate, solve, SolveResult};
pub use universal::{u_edge, UVertex};
