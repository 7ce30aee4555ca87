//! Grids, complex fields, the unitary discrete transform, and the weighted
//! norms used by every estimate in the crate.

pub mod fft;
mod grid;
pub mod io;
pub mod norms;
mod spectral;

pub use grid::Grid;
pub use norms::{norm_l4_linf, norm_x, norm_y_sample};
pub use spectral::{Repr, SpectralField};
