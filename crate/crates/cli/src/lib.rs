//! Experiment runner for the `mimo-dof` library: scenario files, sweeps and
//! CSV output.

pub mod app;
pub mod commands;
pub mod output;
pub mod scenario;
