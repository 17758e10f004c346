//! File formats and the command-line front end for `mvmt-core`.
//!
//! [`format`] reads and writes the line-oriented algebra, model and graph
//! files; [`cli`] binds every core operation to a subcommand of `mvmt`.

pub mod cli;
pub mod format;
