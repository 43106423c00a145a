//! Topology-aware dimensionality reduction through lens spaces.
//!
//! The pipeline implemented by this crate takes a finite metric (or
//! dissimilarity) dataset, computes persistent cohomology of a landmark Rips
//! filtration over a prime field `Z/q`, turns a long-lived degree-1 class into
//! an explicit map from the data into the lens space `L_q^n = S^(2n-1) / Z_q`
//! (`n` = number of landmarks), and then reduces the dimension of the image
//! cloud with a principal-component analysis adapted to the quotient metric.
//! An Isomap baseline and persistence-based diagnostics make the preserved
//! topology measurable.
//!
//! The crate is `no_std` (with `alloc`); file formats, parallelism and the
//! command-line interface live in the companion `lenscoords-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod isomap;
pub mod landmarks;
pub mod lens_map;
pub mod lens_space;
pub mod linalg;
pub mod lpca;
pub mod persistence;
pub mod rips;
pub mod spaces;
pub mod viz;

pub use error::Error;
pub use lens_space::{lens_distance, LensPoint};
pub use linalg::C64;
