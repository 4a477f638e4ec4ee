//! Hat-guessing strategies for the puzzle with `n` prisoners and `k` extra
//! hats, all of distinct colors.
//!
//! A deterministic strategy is the same thing as an independent set in the
//! arrangement graph `A_{n+k,n}` (ordered n-tuples of distinct colors, edges
//! between tuples differing in one position): the prisoners assume the true
//! assignment lies in the set, and win exactly when it does. The crate
//! provides:
//!
//! - [`perm`]: permutation parity, cycle-notation parsing, group closure, and
//!   orbit expansion of seed sets;
//! - [`space`]: the assignment space, adjacency, independence checking, and
//!   the set file format;
//! - [`strategy`]: every named strategy as a membership predicate, with
//!   residue optimizers and the prime-factorization existence criterion;
//! - [`designs`]: ordered designs, Steiner systems, and Latin squares, with
//!   validators and converters to and from assignment sets;
//! - [`search`]: exact branch-and-bound independence-number search and
//!   LP-format model export;
//! - [`simulate`]: sequential game play, exhaustive and Monte Carlo
//!   evaluation, and bound calculators;
//! - [`datasets`]: embedded known sets and design matrices;
//! - [`cli`]: the `hatlab` command-line interface.

pub mod cli;
pub mod datasets;
pub mod designs;
pub mod perm;
pub mod rational;
pub mod search;
pub mod simulate;
pub mod space;
pub mod strategy;

pub use perm::{group_closure, orbit_expand, Parity, PermGroup, Permutation};
pub use rational::Rational;
pub use space::{AssignmentSet, HatAssignment, Independence, SpaceParams};
pub use strategy::{teirlinck_criterion, StrategySpec};
