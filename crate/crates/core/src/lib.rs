//! Classical-shadow estimation and unsupervised phase classification for
//! small spin chains and ladders.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, parallel sweeps
//! and the command line live in the `shadowphase` companion crate.

#![no_std]

extern crate alloc;

pub mod eigensolver;
pub mod error;
pub mod features;
pub mod hamiltonians;
pub mod ml;
pub mod shadows;
pub mod spin_ops;

pub use error::{Error, Result};
