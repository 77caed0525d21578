pub mod cli;
pub mod dynamics;
pub mod error;
pub mod executor;
pub mod integrator;
pub mod optimizer;
pub mod schedule;
