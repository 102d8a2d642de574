//! Experiments: access-pattern hiding, integrity fuzzing and cost simulation.

pub mod aph;
pub mod cost;
pub mod fuzz;
pub mod stats;
