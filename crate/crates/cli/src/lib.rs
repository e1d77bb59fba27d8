//! Command-line front end: model files, command dispatch, scenario
//! running and report emission for the exact finite-model laboratory.

pub mod commands;
pub mod model;
pub mod report;
pub mod scenarios;
