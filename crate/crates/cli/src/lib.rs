//! Library half of the `symnav` binary: experiment config parsing and
//! resolution, the five commands (train / eval / sweep / render /
//! gen-track), trajectory CSV IO, and SVG emission. The binary in main.rs
//! is a thin clap wrapper over [`commands`] so everything here is testable
//! in-process.

pub mod commands;
pub mod config;
pub mod svg;
pub mod trajectory;
