//! Cached rustfft plans plus the scaling that turns the raw DFT into samples
//! of the unitary continuous transform.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

pub fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, forward))
            .or_insert_with(|| {
                if forward {
                    planner.plan_fft_forward(n)
                } else {
                    planner.plan_fft_inverse(n)
                }
            })
            .clone()
    })
}

/// f̂(ξ_k) = dx/√(2π) Σ_j f(x_j) e^{−i x_j ξ_k}, in place.
pub fn forward(grid: &Grid, buf: &mut [Complex64]) {
    plan(grid.n, true).process(buf);
    let scale = grid.dx() / (2.0 * PI).sqrt();
    for (j, z) in buf.iter_mut().enumerate() {
        // e^{iLξ_k} = (−1)^k, and k ≡ j (mod n) with n even.
        *z *= if j % 2 == 0 { scale } else { -scale };
    }
}

/// Inverse of [`forward`], in place.
pub fn inverse(grid: &Grid, buf: &mut [Complex64]) {
    let scale = (2.0 * PI).sqrt() / (grid.dx() * grid.n as f64);
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= if j % 2 == 0 { scale } else { -scale };
    }
    plan(grid.n, false).process(buf);
}

/// Plain (unscaled) transforms for solver inner loops that fold the scaling
/// into their own multipliers.
pub struct RawFft {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl RawFft {
    pub fn new(n: usize) -> Self {
        let fwd = plan(n, true);
        let inv = plan(n, false);
        let len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        RawFft {
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalized inverse; callers divide by n.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }
}
