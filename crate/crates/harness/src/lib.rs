//! Experiment harness around `gls-core`: seeded campaigns, run records,
//! comparison tables, landscape sampling and the `ebgls` command line.

pub mod campaign;
pub mod cli;
pub mod records;
pub mod registry;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod seeds;
pub mod trace;
