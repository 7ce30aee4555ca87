//! Filament function ↔ curvature/torsion, the pseudo-conformal map and the
//! assembly of ψ from a perturbation u.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Grid, Repr, SpectralField};
use crate::nlsolve::v_from_u;
use crate::params::Params;
pub use crate::quad::cumulative_from_origin;

/// Curvature and torsion sampled on an arclength grid. Torsion is NaN where
/// it could not be recovered (|ψ| below threshold).
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureTorsion {
    pub grid: Grid,
    pub c: Vec<f64>,
    pub tau: Vec<f64>,
}

impl CurvatureTorsion {
    pub fn new(grid: Grid, c: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if c.len() != grid.n || tau.len() != grid.n {
            return Err(Error::config(
                "curvature/torsion length must match the grid",
            ));
        }
        if let Some(x) = c.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::domain(format!(
                "curvature must be nonnegative, got {x}"
            )));
        }
        Ok(CurvatureTorsion { grid, c, tau })
    }

    pub fn from_fn(grid: Grid, c: impl Fn(f64) -> f64, tau: impl Fn(f64) -> f64) -> Result<Self> {
        let xs = grid.xs();
        Self::new(
            grid,
            xs.iter().map(|&x| c(x)).collect(),
            xs.iter().map(|&x| tau(x)).collect(),
        )
    }

    pub fn tau_defined(&self, j: usize) -> bool {
        self.tau[j].is_finite()
    }
}

/// ψ = c·exp(i∫₀^x τ); undefined torsion counts as 0.
pub fn hasimoto(ct: &CurvatureTorsion) -> SpectralField {
    let g = ct.grid;
    let tau: Vec<f64> = ct
        .tau
        .iter()
        .map(|t| if t.is_finite() { *t } else { 0.0 })
        .collect();
    let phase = cumulative_from_origin(&tau, g.dx(), g.origin());
    let vals =
        ct.c.iter()
            .zip(&phase)
            .map(|(&c, &p)| C::from_polar(c, p))
            .collect();
    SpectralField::new(g, vals, Repr::Physical).expect("grid length")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionMethod {
    /// Im(ψ_x/ψ) with the spectral derivative; for periodic ψ.
    Spectral,
    /// derivative of the locally unwrapped phase, fourth-order differences;
    /// for chirped or non-periodic ψ.
    PhaseDifference,
}

/// c = |ψ|, τ = Im(ψ_x/ψ) where |ψ| > threshold.
pub fn inverse_hasimoto(
    psi: &SpectralField,
    threshold: f64,
    method: TorsionMethod,
) -> CurvatureTorsion {
    let p = psi.physical();
    let g = *p.grid();
    let v = p.values();
    let c: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let tau = match method {
        TorsionMethod::Spectral => {
            let d = p.derivative().physical();
            v.iter()
                .zip(d.values())
                .map(|(z, dz)| {
                    if z.norm() > threshold {
                        (dz / z).im
                    } else {
                        f64::NAN
                    }
                })
                .collect()
        }
        TorsionMethod::PhaseDifference => phase_derivative(v, g.dx(), threshold),
    };
    CurvatureTorsion { grid: g, c, tau }
}

fn phase_derivative(v: &[C], dx: f64, threshold: f64) -> Vec<f64> {
    let n = v.len();
    let ok: Vec<bool> = v.iter().map(|z| z.norm() > threshold).collect();
    // phase relative to node j from local increments arg(ψ_{k+1}/ψ_k)
    let rel = |j: usize, k: usize| -> Option<f64> {
        let (lo, hi) = if k >= j { (j, k) } else { (k, j) };
        if (lo..=hi).any(|m| !ok[m]) {
            return None;
        }
        let s: f64 = (lo..hi).map(|m| (v[m + 1] * v[m].conj()).arg()).sum();
        Some(if k >= j { s } else { -s })
    };
    (0..n)
        .map(|j| {
            if !ok[j] {
                return f64::NAN;
            }
            let d = if j >= 2 && j + 2 < n {
                match (rel(j, j - 2), rel(j, j - 1), rel(j, j + 1), rel(j, j + 2)) {
                    (Some(a), Some(b), Some(c), Some(d)) => {
                        Some((a - 8.0 * b + 8.0 * c - d) / (12.0 * dx))
                    }
                    _ => None,
                }
            } else if j + 4 < n {
                // one-sided, fourth order
                match (rel(j, j + 1), rel(j, j + 2), rel(j, j + 3), rel(j, j + 4)) {
                    (Some(a), Some(b), Some(c), Some(d)) => {
                        Some((48.0 * a - 36.0 * b + 16.0 * c - 3.0 * d) / (12.0 * dx))
                    }
                    _ => None,
                }
            } else if j >= 4 {
                match (rel(j, j - 1), rel(j, j - 2), rel(j, j - 3), rel(j, j - 4)) {
                    (Some(a), Some(b), Some(c), Some(d)) => {
                        Some(-(48.0 * a - 36.0 * b + 16.0 * c - 3.0 * d) / (12.0 * dx))
                    }
                    _ => None,
                }
            } else {
                None
            };
            d.unwrap_or(f64::NAN)
        })
        .collect()
}

/// ψ(t,x) = e^{ix²/4t}/√t · conj(v)(1/t, x/t), sampled on `target`.
///
/// When `target.half_length = t·source.half_length` and the sizes agree the
/// nodes map onto each other and no interpolation happens; otherwise the
/// source is evaluated by trigonometric interpolation.
pub fn pseudo_conformal(v: &SpectralField, t: f64, target: &Grid) -> Result<SpectralField> {
    if !(t > 0.0) {
        return Err(Error::domain("pseudo-conformal map needs t > 0"));
    }
    let src = *v.grid();
    let reach = target.half_length / t;
    if reach > src.half_length * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "resampled points reach |x/t| = {reach:.4e} beyond the source box {:.4e}",
            src.half_length
        )));
    }
    let xs = target.xs();
    let sampled: Vec<C> = if target.n == src.n && (reach / src.half_length - 1.0).abs() < 1e-14 {
        v.physical().into_values()
    } else {
        let ys: Vec<f64> = xs.iter().map(|x| x / t).collect();
        v.interpolate_at(&ys)
    };
    let k = 1.0 / t.sqrt();
    let vals = xs
        .iter()
        .zip(sampled)
        .map(|(&x, z)| C::from_polar(k, x * x / (4.0 * t)) * z.conj())
        .collect();
    SpectralField::new(*target, vals, Repr::Physical)
}

/// The map is an involution: applying it at 1/t undoes the map at t.
pub fn pseudo_conformal_inverse(
    psi: &SpectralField,
    t: f64,
    target: &Grid,
) -> Result<SpectralField> {
    pseudo_conformal(psi, 1.0 / t, target)
}

/// ψ_a(t,x) = a·e^{ix²/4t}/√t.
pub fn selfsimilar_psi(g: &Grid, a: f64, t: f64) -> SpectralField {
    SpectralField::from_fn_physical(*g, |x| C::from_polar(a / t.sqrt(), x * x / (4.0 * t)))
}

#[derive(Debug, Clone)]
pub struct AssembledPsi {
    pub psi: SpectralField,
    pub t: f64,
    /// min and max of √t·|ψ|/a
    pub amplitude_range: (f64, f64),
    /// a/(2√t) ≤ |ψ| ≤ 3a/(2√t) everywhere
    pub window_ok: bool,
}

/// ψ(t) = a e^{ix²/4t}/√t + e^{±ia² ln t}·T u(t) with u sampled at time 1/t.
pub fn assemble_psi(
    u: &SpectralField,
    t: f64,
    params: &Params,
    target: &Grid,
) -> Result<AssembledPsi> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!(
            "assemble_psi needs t in (0, 1], got {t}"
        )));
    }
    let v = v_from_u(u, 1.0 / t, params);
    let psi = pseudo_conformal(&v, t, target)?;
    let a = params.a;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in psi.values() {
        let r = if a > 0.0 {
            z.norm() * t.sqrt() / a
        } else {
            0.0
        };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(AssembledPsi {
        psi,
        t,
        amplitude_range: (lo, hi),
        window_ok: lo >= 0.5 && hi <= 1.5,
    })
}
