//! Homogeneous Littlewood–Paley analysis on the torus.
//!
//! The homogeneous quotient modulo polynomials is realized by dropping the
//! mean mode; all blocks, low-pass sums and Besov norms ignore it.

mod besov;
pub mod checks;
mod cutoff;
mod decomposition;
mod paraproduct;

pub use besov::{
    besov_norm, besov_norm_of, block_history, block_norms, spacetime_norm, spacetime_norm_of,
    time_norm, weighted_lq, BesovIndex,
};
pub use cutoff::CutoffFamily;
pub use decomposition::{block, decompose, decompose_spectral, LpDecomposition};
pub use paraproduct::{paraproduct, Paraproduct};
