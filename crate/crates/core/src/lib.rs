//! Cohesion networks and the logic of cohesive group agency.
//!
//! Formulas may speak about what groups bring about (`E{1,2} p`), what they
//! try to bring about (`A{1,2} p`) and successful assistance between groups
//! (`H{1}>{2,3} p`). Given a class of cohesion networks, [`expand`] rewrites
//! such formulas into the individual-agent fragment, where [`sat`] decides
//! satisfiability against neighborhood models and returns checked witness
//! models.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod class;
pub mod formula;
pub mod model;
pub mod network;
pub mod parse;
pub mod reduction;
pub mod render;
pub mod solver;

pub use class::{EnumOptions, Filter, Members, NetworkClass, NetworkError};
pub use formula::{Agent, Formula, Group, NameError};
pub use model::{random_model, FrameViolation, ModelError, NeighborhoodModel, WorldSet};
pub use network::{CohesionNetwork, Edge, Violation};
pub use parse::{parse, parse_group, ParseError, ParseErrorKind};
pub use reduction::{expand, expand_minimal, is_biat, ExpandError, ExpansionBudget};
pub use render::{render, render_tree};
pub use solver::{sat, Interrupt, Logic, NoInterrupt, SatResult, SolveError, SolverStats, Verdict};
