//! Isolated-intersection traffic simulation with a Mamdani fuzzy green
//! extension controller, emergency-vehicle preemption and classical
//! baselines.

pub mod cli;
pub mod config;
pub mod controllers;
pub mod fis;
pub mod fis_format;
pub mod metrics;
pub mod scenario;
pub mod sim;
