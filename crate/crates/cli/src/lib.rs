//! File formats, exit-code policy, and pipeline orchestration behind the
//! `lenscoords` command-line tool. The computational work lives in
//! `lenscoords-core`; this crate adds everything that touches the operating
//! system: argument handling, JSON/CSV artifacts, threads, and timing.

pub mod error;
pub mod formats;
pub mod par;
pub mod pipeline;
