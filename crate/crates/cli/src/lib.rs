//! Experiment harness: JSON configs in, CSV tables and a run manifest out.

pub mod commands;
pub mod config;
pub mod output;
