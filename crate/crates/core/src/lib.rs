//! Homometric structures and the tools to check that they share their
//! autocorrelation.
//!
//! * [`pointset`]: finite lattice point sets and difference multisets.
//! * [`covariogram`]: polyomino windows, their covariograms and Fourier
//!   transforms.
//! * [`octagonal`]: model sets of the cut-and-project scheme over the
//!   eighth cyclotomic integers, with diffraction and correlation checks.
//! * [`sequences`]: Rudin-Shapiro, Bernoulli and Bernoullised combs on `Z`.
//! * [`estimators`]: autocorrelation, periodogram and block-entropy
//!   estimates from finite windows.
//! * [`tensor`]: product combs on `Z^d` and rank-`k` Bernoullisation.
//! * [`checks`]: the numbered end-to-end checks run by the acceptance
//!   target and the CLI.

pub mod checks;
pub mod covariogram;
pub mod error;
pub mod estimators;
pub mod octagonal;
pub mod pointset;
pub mod rng;
pub mod sequences;
pub mod tensor;

pub use error::{Error, Result};
