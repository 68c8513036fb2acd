//! Cyclicity analysis of multivariate signals and of Ornstein–Uhlenbeck
//! processes.
//!
//! The crate builds lead matrices (matrices of pairwise oriented areas) in
//! four ways: from a solved Lyapunov equation, from explicit spectral formulas
//! for circulant networks, from limiting expansions in a perturbation
//! parameter, and empirically from simulated paths. It then analyses their
//! skew-symmetric spectra to recover cyclic orderings of the components.
//!
//! All index-valued inputs and outputs are one-based.

pub mod circulant;
pub mod coom;
pub mod cyclic_lead;
pub mod error;
pub mod index;
pub mod lead;
pub mod linalg;
pub mod ou;
pub mod quadrature;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use lead::{LeadKind, LeadMatrix};

/// Version of this crate, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
