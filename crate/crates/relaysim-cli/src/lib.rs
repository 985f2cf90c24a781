//! Library surface of the experiment CLI, exposed so integration tests can
//! drive config loading and experiment runs in-process.

pub mod config;
pub mod experiments;
