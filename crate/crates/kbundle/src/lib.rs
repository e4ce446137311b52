//! File formats and the command-line front end over `kbundle-core`.

pub mod cli;
pub mod formats;
