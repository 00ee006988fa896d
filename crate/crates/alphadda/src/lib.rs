//! Command line tools and game service around [`alphadda_core`].
//!
//! - [`config`]: TOML run configuration with paper and desk presets.
//! - [`checkpoint`]: versioned network weight files.
//! - [`records`]: JSON-lines game records.
//! - [`reports`]: CSV report rows.
//! - [`commands`]: train, match, elo, sweep and gridsearch.
//! - [`service`]: HTTP sessions for human-versus-agent play.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod records;
pub mod reports;
pub mod service;

pub use alphadda_core as core;
