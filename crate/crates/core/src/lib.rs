//! Join ordering through fast subset convolution.
//!
//! The crate provides subset-lattice primitives ([`lattice`]), zeta/Möbius
//! transforms and subset convolutions ([`convolution`]), query instances and
//! cost functions ([`costmodel`]), the optimizers ([`optimize`]) and a
//! benchmark harness ([`bench`]).

pub mod bench;
pub mod convolution;
pub mod costmodel;
pub mod error;
pub mod lattice;
pub mod optimize;

pub use error::{Error, Result};
