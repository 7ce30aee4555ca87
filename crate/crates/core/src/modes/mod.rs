//! Per-frequency apparatus: the coupled ±ξ system, its rescaled real form,
//! the diagonalized ring variables and asymptotic-state extraction.

mod asymptotic;
mod bounds;
mod pair;
mod ring;
mod zero;

pub use asymptotic::{
    asymptotic_mode, close_tail, horizon_for, pair_from_asymptotic, ring_from_asymptotic,
    AsymptoticMode,
};
pub use bounds::{check_controls_bounds, ControlsReport, MODE_CEILING_SLACK};
pub use pair::{
    coupling, evolve_pair, evolve_pair_dense, pair_rhs, sample_pair, ModeHistory, ModePair,
    HISTORY_HEADER,
};
pub use ring::{
    alpha, mu, phase_phi, phi_tail, phi_tail_remainder, rescaled_rhs, ring_from_yz, ring_rhs,
    yz_from_ring, RescaledModes, RingState, PHI_TOL,
};
pub(crate) use ring::{ring_rhs_with, yz_from_ring_with};
pub use zero::{zero_mode_law, zero_mode_law_u};
