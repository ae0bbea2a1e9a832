//! File formats, time limits, worked examples and the command line for
//! [`cohesion_core`].

pub mod class_file;
pub mod cli;
pub mod deadline;
pub mod demo;
pub mod model_file;
