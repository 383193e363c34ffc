//! Shifts of finite type, their Parry measures, normality testing and
//! finite-state compression.
//!
//! Words are slices of symbol indices ([`alphabet::Sym`]) into an
//! [`alphabet::Alphabet`]. All logarithms are base 2.

pub mod alphabet;
pub mod compressor;
pub mod error;
pub mod measure;
pub mod normality;
pub mod occurrences;
pub mod sampling;
pub mod shift;
pub mod spectral;
pub mod transducer;

pub use error::{Error, Result};
