//! Command-line tools and the HTTP session service for the gold sand engine.

pub mod commands;
pub mod service;
