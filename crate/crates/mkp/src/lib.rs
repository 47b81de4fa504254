//! Solvers for the multistage knapsack problem: a sequence of knapsacks
//! over a time horizon where objects also earn a transition bonus
//! whenever their in/out decision is unchanged between consecutive
//! steps.
//!
//! The crate provides:
//! * [`model`] — instance data, schedules, feasibility and exact
//!   objective evaluation;
//! * [`simplex`] — the LP relaxation and an exact rational
//!   bounded-variable simplex returning basic optima;
//! * [`exact`] — brute-force enumeration and a pseudo-polynomial DP;
//! * [`approx`] — LP rounding and two approximation schemes;
//! * [`reductions`] — instance generators, including the hardness
//!   constructions from independent set and two-constraint knapsack;
//! * [`io`] — the instance/schedule/result file formats;
//! * [`cli`] — the `mkp` command-line front end.

pub mod approx;
pub mod cli;
pub mod error;
pub mod exact;
pub mod io;
pub mod model;
pub mod reductions;
pub mod simplex;

pub use error::{Error, Result};
pub use model::{evaluate, is_feasible, object_reward, Instance, ObjectiveBreakdown, Schedule};
