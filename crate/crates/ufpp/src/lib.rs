//! Solver toolkit for the unsplittable flow problem on a path (UFPP).
//!
//! An instance is a path with integer edge capacities plus a set of tasks,
//! each occupying a subpath with an integer demand and profit. A solution
//! selects tasks so that on every edge the summed demand of selected tasks
//! stays within the capacity; the goal is maximum total profit.
//!
//! The crate provides exact oracles for small instances, an exact maximum
//! independent-task-set solver built on a corner decomposition of the
//! capacity profile, LP- and DP-based approximation algorithms for slack
//! ("small") tasks, a grouping framework that stitches per-group solutions
//! into a feasible whole, end-to-end approximation pipelines, and a
//! reduction from maximum independent set on subcubic graphs that yields
//! hard benchmark instances with certified optima.

pub mod coloring;
pub mod exact;
pub mod flow;
pub mod framework;
pub mod gen;
pub mod hardness;
pub mod its;
pub mod lp;
pub mod medium;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod tiny;

pub use model::{Instance, Solution, Task, TaskMeta};

/// Errors shared across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown task id {0}")]
    UnknownTask(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("state budget exhausted: {states} states, budget {budget}")]
    Budget { states: usize, budget: usize },
    #[error("internal invariant broke: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
