//! Numerical core for shape-based face recognition.
//!
//! Two feature pipelines share every stage except feature extraction:
//!
//! 1. gray image → [`sfs::estimate_depth`] → [`wavelet::packet_features`]
//! 2. gray image → [`sfs::estimate_depth`] → [`radon::radon_features`]
//!
//! followed by regularized LDA ([`subspace`]) and k-NN decisions
//! ([`classify`]). The crate is `no_std` and only needs `alloc`; file IO,
//! database handling and the CLI live in the `facerec` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod dft;
mod error;
pub mod feature;
pub mod linalg;
pub mod plane;
pub mod radon;
pub mod sfs;
pub mod subspace;
pub mod wavelet;

pub use error::{Error, Result};
pub use feature::{Extractor, FeatureVector};
pub use plane::{DepthMap, GrayImage, Plane};
