//! Solver library for line planning with resource constraints.
//!
//! The problem: assign each of `M` buses to one candidate line and allocate
//! integer portions of origin-destination demands to the buses, maximizing
//! total reward subject to bus capacities, demand limits, and `K` global
//! resource budgets of one unit each.
//!
//! The library computes the column-generation LP relaxation of the problem
//! and rounds it with four seeded randomized algorithms:
//!
//! * [`rounding::round_nc`] — per-bus column sampling plus greedy truncation,
//!   expected reward at least `(1 - 1/e) * Γ`.
//! * [`rounding::round_lc`] — thinned sampling with a discard step for
//!   instances with small line costs, expected reward `(1 - 1/e - η) * Γ`.
//! * [`composite::algorithm_c`] — best of a low-cost LP branch and an
//!   enumerated high-cost assignment branch, ratio `1/2 - 1/(2e) - η`.
//! * [`composite::algorithm_c_tol`] — enumeration with rescaled costs, ratio
//!   `1 - 1/e - η` using at most `1 + τ` units of each resource.
//!
//! Exact brute-force oracles ([`oracle`]) and instance generators plus a
//! Monte Carlo harness ([`genbench`]) support validation at desk scale.

pub mod composite;
pub mod genbench;
pub mod instance;
pub mod lpcore;
pub mod oracle;
pub mod relaxation;
pub mod rounding;

pub mod rational;

pub use rational::Rat;
