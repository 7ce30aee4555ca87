use num_complex::Complex64 as C;
use serde::Serialize;

use super::pair::{evolve_pair, ModePair};
use super::ring::{
    alpha, mu, phase_phi, ring_from_yz_with, yz_from_ring_with, RescaledModes, RingState, PHI_TOL,
};
use crate::error::{Error, Result};
use crate::params::Params;

/// Rescaled horizon beyond which the ring tail is taken in closed form.
pub const MIN_RESCALED_HORIZON: f64 = 1.0e3;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticMode {
    pub xi: f64,
    pub y_ring_plus: C,
    pub z_ring_plus: C,
    /// û₊(ξ)
    pub u_plus_hat: C,
    /// û₊(−ξ), from conj(Y̊⁺_ξ) = Z̊⁺_{−ξ}
    pub u_plus_hat_mirror: C,
    /// physical time at which the tail was closed
    pub horizon: f64,
    /// size of the neglected second-order tail term
    pub tail_bound: f64,
}

/// Physical horizon used for frequency ξ given the caller's `t_limit`.
pub fn horizon_for(xi: f64, t_limit: f64, a: f64) -> f64 {
    let need = MIN_RESCALED_HORIZON.max(100.0 * a * a);
    t_limit.max(need / (xi * xi))
}

/// Limits (Y̊⁺, Z̊⁺) of the ring variables and the asymptotic state û₊.
///
/// The pair is carried to the horizon T; with G = √α the products G·Y̊, G·Z̊
/// obey a purely off-diagonal oscillatory system, whose tail beyond T is
/// integrated by parts once. The dropped remainder is O(a²/(ξ²T)²).
pub fn asymptotic_mode(
    p: &ModePair,
    params: &Params,
    t_limit: f64,
    tol: f64,
) -> Result<AsymptoticMode> {
    let a = params.a;
    if p.xi == 0.0 {
        return Err(Error::domain(
            "asymptotic mode undefined at xi = 0; use the zero-mode law",
        ));
    }
    if !(t_limit > 4.0 * a * a) {
        return Err(Error::domain(format!(
            "T_limit {t_limit} must exceed 4a^2 = {}",
            4.0 * a * a
        )));
    }
    let horizon = horizon_for(p.xi, t_limit.max(p.t), a);
    let q = evolve_pair(p, horizon, params, tol)?;
    Ok(close_tail(&q, params))
}

/// Tail closure at the pair's own time (assumed beyond the ring threshold).
pub fn close_tail(q: &ModePair, params: &Params) -> AsymptoticMode {
    let (a, sign) = (params.a, params.sign);
    let m = RescaledModes::from_pair(q, params);
    let tt = m.t_rescaled;
    let al = alpha(tt, a, sign).expect("horizon beyond 4a^2");
    let phi = phase_phi(tt, a, sign, PHI_TOL).expect("horizon beyond 4a^2");
    let r = ring_from_yz_with(m.y, m.z, al, phi);
    let g = al.sqrt();
    let mu = mu(tt, a, sign);
    let e2 = C::from_polar(1.0, 2.0 * phi);
    let i = C::new(0.0, 1.0);
    let c = g * mu / (2.0 * al);
    let z_plus = g * r.z_ring + i * c * r.y_ring * e2;
    let y_plus = g * r.y_ring - i * c * r.z_ring * e2.conj();
    let gauge = C::from_polar(2.0, params.s() * a * a * (q.xi * q.xi).ln());
    let tail_bound = (mu.abs() / tt) * (r.y_ring.norm() + r.z_ring.norm());
    AsymptoticMode {
        xi: q.xi,
        y_ring_plus: y_plus,
        z_ring_plus: z_plus,
        u_plus_hat: gauge * z_plus,
        u_plus_hat_mirror: gauge * y_plus.conj(),
        horizon: q.t,
        tail_bound,
    }
}

/// Ring values at rescaled time t̃ = ξ²t whose tail closure gives the
/// asymptotic state (û₊(ξ), û₊(−ξ)); returns them with α(t̃).
pub fn ring_from_asymptotic(
    xi: f64,
    u_plus: C,
    u_plus_mirror: C,
    t: f64,
    params: &Params,
) -> Result<(RingState, f64)> {
    let (a, sign) = (params.a, params.sign);
    let gauge = C::from_polar(0.5, -params.s() * a * a * (xi * xi).ln());
    let z_plus = gauge * u_plus;
    let y_plus = (gauge * u_plus_mirror).conj();
    let tt = xi * xi * t;
    let al = alpha(tt, a, sign)?;
    let phi = phase_phi(tt, a, sign, PHI_TOL)?;
    let g = al.sqrt();
    let mu = mu(tt, a, sign);
    let e2 = C::from_polar(1.0, 2.0 * phi);
    let i = C::new(0.0, 1.0);
    let c = mu / (2.0 * al);
    // invert the first-order tail: Ĝ-scaled ring values at t
    let zr = (z_plus - i * c * y_plus * e2) / g;
    let yr = (y_plus + i * c * z_plus * e2.conj()) / g;
    Ok((
        RingState {
            y_ring: yr,
            z_ring: zr,
            phi,
        },
        al,
    ))
}

/// Inverse of [`close_tail`]: the pair at physical time `t` (with ξ²t large)
/// whose asymptotic state is (û₊(ξ), û₊(−ξ)), to second order in 1/(ξ²t).
pub fn pair_from_asymptotic(
    xi: f64,
    u_plus: C,
    u_plus_mirror: C,
    t: f64,
    params: &Params,
) -> ModePair {
    let (r, al) = ring_from_asymptotic(xi, u_plus, u_plus_mirror, t, params)
        .expect("t beyond ring threshold");
    let (y, z) = yz_from_ring_with(&r, al);
    RescaledModes {
        y,
        z,
        t_rescaled: xi * xi * t,
    }
    .to_pair(xi, params)
}
