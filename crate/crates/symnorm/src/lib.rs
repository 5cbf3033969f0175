//! File formats, corpus manifests and command-line tooling around
//! [`symnorm_core`].

#![warn(missing_docs)]

pub mod commands;
pub mod config;
pub mod dataset;
mod error;
pub mod formats;
pub mod io;
pub mod manifest;
pub mod registry;

pub use error::{Error, Result, EXIT_GEOMETRY, EXIT_INPUT, EXIT_INTERNAL, EXIT_OK};
