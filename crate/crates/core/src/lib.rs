//! Krasnoselski-Mann iteration of nonexpansive maps in geodesic (W-hyperbolic)
//! spaces, together with explicit rate-of-asymptotic-regularity certificates.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: the model spaces, moduli of uniform convexity, a small
//! operator catalogue, the iteration engine with its descent diagnostics, and
//! integer-valued iteration-count bounds. File formats and the command line
//! live in the `kmrate` crate.
//!
//! Bound parameters passed as `f64` are read as the decimal they print as
//! (`0.3` means `3/10`), and every ceiling in a bound is taken exactly.

#![no_std]

extern crate alloc;

mod bigexp;
pub mod convexity;
pub mod error;
mod exact;
pub mod geodesic;
pub mod iteration;
pub mod operators;
pub mod rates;
pub mod report;
pub mod sampler;
pub mod spaces;

pub use error::{Error, Result};
pub use geodesic::{GeodesicSpace, SpaceDescriptor};
pub use report::{AxiomReport, Check};
pub use sampler::{Sample, Sampler};
