//! Benchmark harness around `rbvq-core`: dataset files and builtin
//! generators, run configuration, the experiment runner, hyperparameter
//! grid search, and CSV/SVG output.

pub mod config;
pub mod datasets;
pub mod io;
pub mod plot;
pub mod runner;
pub mod tune;
