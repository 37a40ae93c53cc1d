//! Combinatorial decomposition of Herman maps.
//!
//! A branched cover of the sphere with rotation annuli is encoded as a
//! finite curve system ([`model::CoverModel`]): curve classes, the pieces cut
//! out by the periodic core curves and their pullbacks, a pullback table and
//! the induced map on pieces. On top of that encoding the crate provides
//!
//! * exact and floating spectral analysis of nonnegative rational matrices
//!   ([`spectral`]),
//! * multicurve transition matrices, stability, generation of the canonical
//!   stable multicurve and a brute-force stable-multicurve oracle
//!   ([`multicurve`]),
//! * piece dynamics, boundary classification and renormalization
//!   ([`decompose`]),
//! * the reduction identity for leading eigenvalues and the combination
//!   check ([`reduction`]),
//! * contraction weights, the affine weight function and the Grötzsch
//!   threshold certificate ([`weights`]).

pub mod cli;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod multicurve;
pub mod rational;
pub mod reduction;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use model::CoverModel;
pub use multicurve::Multicurve;
pub use rational::Q;
pub use spectral::NonnegMatrix;
