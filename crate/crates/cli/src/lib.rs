//! Command line, file formats and the verification suite for `sqg-core`.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod report;
pub mod series;
pub mod verify;
