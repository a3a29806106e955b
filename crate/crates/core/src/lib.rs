//! Spectra, local translation groups and tiling complements for finite
//! sets of integers.
//!
//! A finite set `A ⊂ Z` is *spectral* when some set of frequencies `Γ`
//! makes the exponentials `x ↦ e^{2πiγx}` an orthogonal basis of `l²(A)`.
//! This crate verifies and searches for spectra exactly (all rational
//! checks reduce to vanishing sums of roots of unity), builds the
//! associated local translation matrix `B` and one-parameter group
//! `U_Γ(t)`, derives tiling complements from the powers of `B`, and
//! simulates the continuum group on `A + [0, 1]`.

pub mod classification;
pub mod continuum;
pub mod error;
pub mod io;
pub mod local;
pub mod numeric;
pub mod spectra;
pub mod tiling;

pub use error::{Error, Result};
