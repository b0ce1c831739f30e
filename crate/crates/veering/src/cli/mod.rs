//! File formats and the command-line front end.
//!
//! The text and JSON formats in [`format`] are always available. The `veering` binary
//! and [`run_command`] need the `cli` feature.
//!
//! # Output schemas
//!
//! With `--out FILE.csv` the first line is `# config: <json>`, followed by a header
//! row and one row per record:
//!
//! | command     | columns                                          |
//! |-------------|--------------------------------------------------|
//! | `flow`      | `event_index,roof,flipped_labels,symbol_key`     |
//! | `code`      | `symbol_index,duration,moves`                    |
//! | `kerckhoff` | `M,r,fraction,n`                                 |
//! | `enumerate` | `stratum,nodes,arcs,scc_count`                   |
//!
//! `flipped_labels` is a `;`-separated list of label names and `symbol_key` is the
//! canonical key of the triangulation after the flips. With `--out FILE.json` the file
//! is `{"config": ..., "result": ...}`; for `tails` the result has `h_hat`, `r2`, `n`.
//! Other commands accept only `.json`.

#[cfg(feature = "cli")]
mod app;
pub mod format;

#[cfg(feature = "cli")]
pub use app::{run_command, run_command_with, AppError};
