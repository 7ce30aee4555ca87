//! Rescaled real/imaginary-part variables and the diagonalized "ring"
//! coordinates valid beyond t̃ = 4a².

use num_complex::Complex64 as C;
use serde::Serialize;

use super::pair::ModePair;
use crate::error::{Error, Result};
use crate::params::{Params, Sign};
use crate::quad;

/// Fourier modes of Re w and Im w at rescaled time t̃ = ξ² t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaledModes {
    pub y: C,
    pub z: C,
    pub t_rescaled: f64,
}

impl RescaledModes {
    /// From the u-pair at physical time p.t, through the gauge w = u e^{±ia² ln t}.
    pub fn from_pair(p: &ModePair, params: &Params) -> Self {
        let g = C::from_polar(1.0, params.s() * params.a2() * p.t.ln());
        let wp = p.u_plus * g;
        let wm = p.u_minus * g;
        RescaledModes {
            y: (wp + wm.conj()) * 0.5,
            z: (wp - wm.conj()) / C::new(0.0, 2.0),
            t_rescaled: p.xi * p.xi * p.t,
        }
    }

    pub fn to_pair(&self, xi: f64, params: &Params) -> ModePair {
        let t = self.t_rescaled / (xi * xi);
        let g = C::from_polar(1.0, -params.s() * params.a2() * t.ln());
        let i = C::new(0.0, 1.0);
        let wp = self.y + i * self.z;
        let wm = (self.y - i * self.z).conj();
        ModePair::new(xi, wp * g, wm * g, t)
    }
}

pub fn rescaled_rhs(m: &RescaledModes, a: f64, sign: Sign) -> Result<(C, C)> {
    if !(m.t_rescaled > 0.0) {
        return Err(Error::domain(format!(
            "rescaled time must be positive, got {}",
            m.t_rescaled
        )));
    }
    Ok((m.z, (-1.0 + sign.s() * 2.0 * a * a / m.t_rescaled) * m.y))
}

fn check_ring_domain(t: f64, a: f64) -> Result<()> {
    if !(t > 0.0 && t >= 4.0 * a * a) {
        return Err(Error::domain(format!(
            "ring variables need t >= 4a^2 = {}, got {t}",
            4.0 * a * a
        )));
    }
    Ok(())
}

/// α(t) = √(1 ∓ 2a²/t).
pub fn alpha(t: f64, a: f64, sign: Sign) -> Result<f64> {
    check_ring_domain(t, a)?;
    Ok((1.0 - sign.s() * 2.0 * a * a / t).sqrt())
}

/// ∫_t^S (α − 1 ± a²/s) ds, written in u = 1/s where the integrand becomes
/// the smooth −2a⁴/(1 + √(1 ∓ 2a²u))². `upper = None` means S = ∞.
pub fn phi_tail(t: f64, a: f64, sign: Sign, upper: Option<f64>, quad_tol: f64) -> Result<f64> {
    check_ring_domain(t, a)?;
    let a2 = a * a;
    if a2 == 0.0 {
        return Ok(0.0);
    }
    let s = sign.s();
    let lo = match upper {
        Some(big) if big > t => 1.0 / big,
        Some(_) => return Ok(0.0),
        None => 0.0,
    };
    let g = |u: f64| {
        let r = (1.0 - s * 2.0 * a2 * u).sqrt();
        C::new(-2.0 * a2 * a2 / ((1.0 + r) * (1.0 + r)), 0.0)
    };
    let res = quad::integrate(g, lo, 1.0 / t, quad_tol, 1e-15, None)?;
    Ok(res.value.re)
}

/// Asymptotic remainder of [`phi_tail`] beyond a truncation S, from
/// α − 1 ± a²/s = −a⁴/(2s²) ∓ a⁶/(2s³) + O(s⁻⁴).
pub fn phi_tail_remainder(big_s: f64, a: f64, sign: Sign) -> f64 {
    let a2 = a * a;
    -a2 * a2 / (2.0 * big_s) - sign.s() * a2 * a2 * a2 / (4.0 * big_s * big_s)
}

/// Φ(t) = t ∓ a² ln t − ∫_t^∞ (α − 1 ± a²/s) ds, so that Φ' = α.
pub fn phase_phi(t: f64, a: f64, sign: Sign, quad_tol: f64) -> Result<f64> {
    let tail = phi_tail(t, a, sign, None, quad_tol)?;
    Ok(t - sign.s() * a * a * t.ln() - tail)
}

/// μ = α'/(2α) = ±a²/(2t²α²).
#[inline]
pub fn mu(t: f64, a: f64, sign: Sign) -> f64 {
    let al2 = 1.0 - sign.s() * 2.0 * a * a / t;
    sign.s() * a * a / (2.0 * t * t * al2)
}

/// (Y̊, Z̊) with the phase Φ used to build them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingState {
    pub y_ring: C,
    pub z_ring: C,
    pub phi: f64,
}

pub const PHI_TOL: f64 = 1e-13;

pub fn ring_from_yz(y: C, z: C, t: f64, a: f64, sign: Sign) -> Result<RingState> {
    let al = alpha(t, a, sign)?;
    let phi = phase_phi(t, a, sign, PHI_TOL)?;
    Ok(ring_from_yz_with(y, z, al, phi))
}

pub(crate) fn ring_from_yz_with(y: C, z: C, al: f64, phi: f64) -> RingState {
    let i = C::new(0.0, 1.0);
    let yt = y * 0.5 - i * z / (2.0 * al);
    let zt = y * 0.5 + i * z / (2.0 * al);
    RingState {
        y_ring: C::from_polar(1.0, -phi) * yt,
        z_ring: C::from_polar(1.0, phi) * zt,
        phi,
    }
}

pub fn yz_from_ring(r: &RingState, t: f64, a: f64, sign: Sign) -> Result<(C, C)> {
    let al = alpha(t, a, sign)?;
    Ok(yz_from_ring_with(r, al))
}

pub(crate) fn yz_from_ring_with(r: &RingState, al: f64) -> (C, C) {
    let e = C::from_polar(1.0, r.phi);
    let yt = e * r.y_ring;
    let zt = e.conj() * r.z_ring;
    (yt + zt, C::new(0.0, al) * (yt - zt))
}

/// M(t)·(Y̊, Z̊).
pub fn ring_rhs(r: &RingState, t: f64, a: f64, sign: Sign) -> Result<(C, C)> {
    check_ring_domain(t, a)?;
    let phi = phase_phi(t, a, sign, PHI_TOL)?;
    Ok(ring_rhs_with(r.y_ring, r.z_ring, mu(t, a, sign), phi))
}

#[inline]
pub(crate) fn ring_rhs_with(y: C, z: C, mu: f64, phi: f64) -> (C, C) {
    let e2 = C::from_polar(1.0, 2.0 * phi);
    (mu * (-y + e2.conj() * z), mu * (e2 * y - z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::pair::{evolve_pair, pair_rhs};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const F: Sign = Sign::Focusing;

    fn phi_closed(t: f64, a: f64) -> f64 {
        // Focusing antiderivative of √(1 − 2a²/t), fixed by Φ − (t − a² ln t) → 0.
        let a2 = a * a;
        (t * (t - 2.0 * a2)).sqrt() - 2.0 * a2 * (t.sqrt() + (t - 2.0 * a2).sqrt()).ln()
            + a2
            + 2.0 * a2 * 2f64.ln()
    }

    #[test]
    fn rescaled_examples() {
        let m = RescaledModes {
            y: C::new(1.0, 0.0),
            z: C::new(0.0, 0.0),
            t_rescaled: 3.0,
        };
        assert_eq!(
            rescaled_rhs(&m, 0.0, F).unwrap(),
            (C::new(0.0, 0.0), C::new(-1.0, 0.0))
        );
        let m = RescaledModes {
            y: C::new(1.0, 0.0),
            z: C::new(1.0, 0.0),
            t_rescaled: 2.0,
        };
        assert_eq!(
            rescaled_rhs(&m, 1.0, F).unwrap(),
            (C::new(1.0, 0.0), C::new(0.0, 0.0))
        );
        assert!(rescaled_rhs(
            &RescaledModes {
                t_rescaled: 0.0,
                ..m
            },
            1.0,
            F
        )
        .is_err());
    }

    #[test]
    fn rescaled_system_matches_pair_equation() {
        // d/dt̃ of (Y, Z) computed from the pair RHS equals the rescaled RHS.
        let params = Params::focusing(0.8, 100.0);
        let p = ModePair::new(0.7, C::new(0.3, -0.2), C::new(0.1, 0.9), 5.0);
        let (dp, dm) = pair_rhs(&p, &params).unwrap();
        let h = 1e-6;
        let fwd = ModePair {
            u_plus: p.u_plus + dp * h,
            u_minus: p.u_minus + dm * h,
            t: p.t + h,
            ..p
        };
        let bwd = ModePair {
            u_plus: p.u_plus - dp * h,
            u_minus: p.u_minus - dm * h,
            t: p.t - h,
            ..p
        };
        let (mf, mb) = (
            RescaledModes::from_pair(&fwd, &params),
            RescaledModes::from_pair(&bwd, &params),
        );
        let dt_resc = mf.t_rescaled - mb.t_rescaled;
        let dy = (mf.y - mb.y) / dt_resc;
        let dz = (mf.z - mb.z) / dt_resc;
        let m = RescaledModes::from_pair(&p, &params);
        let (ey, ez) = rescaled_rhs(&m, params.a, F).unwrap();
        assert!((dy - ey).norm() < 1e-6 && (dz - ez).norm() < 1e-6);
        let back = m.to_pair(p.xi, &params);
        assert!((back.u_plus - p.u_plus).norm() < 1e-14 && (back.t - p.t).abs() < 1e-13);
    }

    #[test]
    fn alpha_values() {
        assert!((alpha(4.0, 1.0, F).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((alpha(10.0, 1.0, F).unwrap() - 0.8f64.sqrt()).abs() < 1e-15);
        assert!(alpha(3.9, 1.0, F).is_err());
        let mut prev = 0.0;
        for k in 0..50 {
            let v = alpha(4.0 * 1.3f64.powi(k), 1.0, F).unwrap();
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }

    #[test]
    fn phase_against_closed_form() {
        for &(a, t) in &[(1.0, 10.0), (0.5, 1.0), (2.0, 16.0), (1.0, 1e5)] {
            let got = phase_phi(t, a, F, 1e-14).unwrap();
            assert!(
                (got - phi_closed(t, a)).abs() < 1e-9 * t.max(1.0),
                "a={a} t={t}"
            );
        }
        // Φ' = α by centered differences
        let (a, t, h) = (0.7, 5.0, 1e-4);
        let d = (phase_phi(t + h, a, F, 1e-14).unwrap() - phase_phi(t - h, a, F, 1e-14).unwrap())
            / (2.0 * h);
        assert!((d - alpha(t, a, F).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn tail_truncations_agree() {
        let near =
            phi_tail(10.0, 1.0, F, Some(1e3), 1e-14).unwrap() + phi_tail_remainder(1e3, 1.0, F);
        let far =
            phi_tail(10.0, 1.0, F, Some(1e6), 1e-14).unwrap() + phi_tail_remainder(1e6, 1.0, F);
        assert!((near - far).abs() < 1e-8, "{near} vs {far}");
        let full = phi_tail(10.0, 1.0, F, None, 1e-14).unwrap();
        assert!((far - full).abs() < 1e-8);
    }

    #[test]
    fn ring_round_trip_and_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &sign in &[Sign::Focusing, Sign::Defocusing] {
            for _ in 0..20 {
                let y = C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let z = C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let t = 4.0 + 100.0 * rng.gen::<f64>();
                let r = ring_from_yz(y, z, t, 1.0, sign).unwrap();
                let (y2, z2) = yz_from_ring(&r, t, 1.0, sign).unwrap();
                assert!((y2 - y).norm() < 1e-12 && (z2 - z).norm() < 1e-12);
                let al = alpha(t, 1.0, sign).unwrap();
                let lhs = r.y_ring.norm_sqr() + r.z_ring.norm_sqr();
                let rhs = y.norm_sqr() / 2.0 + z.norm_sqr() / (2.0 * al * al);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
        let r = ring_from_yz(C::new(0.0, 0.0), C::new(0.0, 0.0), 5.0, 1.0, F).unwrap();
        assert_eq!((r.y_ring, r.z_ring), (C::new(0.0, 0.0), C::new(0.0, 0.0)));
        let y = C::new(0.6, 0.2);
        let r = ring_from_yz(y, C::new(0.0, 0.0), 9.0, 1.0, F).unwrap();
        assert!((r.y_ring - C::from_polar(1.0, -r.phi) * y / 2.0).norm() < 1e-15);
        assert!((r.z_ring - C::from_polar(1.0, r.phi) * y / 2.0).norm() < 1e-15);
    }

    #[test]
    fn ring_rhs_examples() {
        let zero = RingState {
            y_ring: C::new(0.0, 0.0),
            z_ring: C::new(0.0, 0.0),
            phi: 0.0,
        };
        assert_eq!(
            ring_rhs(&zero, 10.0, 1.0, F).unwrap(),
            (C::new(0.0, 0.0), C::new(0.0, 0.0))
        );
        let r = RingState {
            y_ring: C::new(1.0, 0.0),
            z_ring: C::new(0.0, 0.0),
            phi: 0.0,
        };
        let (dy, _) = ring_rhs(&r, 10.0, 1.0, F).unwrap();
        assert!((dy.re + 0.00625).abs() < 1e-15 && dy.im.abs() < 1e-15);
        assert!(mu(10.0, 1.0, F) <= 1.0 / 100.0);
        assert!(ring_rhs(&r, 3.0, 1.0, F).is_err());
    }

    #[test]
    fn ring_dynamics_match_rescaled_flow() {
        // Transport (Y, Z) with the pair ODE, compare finite-difference ring
        // derivative with M(t)·ring, and check the energy drift bound.
        let params = Params::focusing(0.5, 100.0);
        let xi = 1.0;
        let p = ModePair::new(xi, C::new(0.4, 0.1), C::new(-0.2, 0.3), 6.0);
        let ring_at = |q: &ModePair| {
            let m = RescaledModes::from_pair(q, &params);
            ring_from_yz(m.y, m.z, m.t_rescaled, params.a, F).unwrap()
        };
        let h = 1e-4;
        let qa = evolve_pair(&p, p.t - h, &params, 1e-13).unwrap();
        let qb = evolve_pair(&p, p.t + h, &params, 1e-13).unwrap();
        let (ra, rb, r) = (ring_at(&qa), ring_at(&qb), ring_at(&p));
        let dy = (rb.y_ring - ra.y_ring) / (2.0 * h);
        let dz = (rb.z_ring - ra.z_ring) / (2.0 * h);
        let (ey, ez) = ring_rhs(&r, p.t, params.a, F).unwrap();
        assert!((dy - ey).norm() < 1e-7, "{}", (dy - ey).norm());
        assert!((dz - ez).norm() < 1e-7);
        let e = |r: &RingState| r.y_ring.norm_sqr() + r.z_ring.norm_sqr();
        let de = (e(&rb) - e(&ra)) / (2.0 * h);
        assert!(de <= 2.0 * params.a2() / (p.t * p.t) * e(&r) + 1e-9);
    }
}
