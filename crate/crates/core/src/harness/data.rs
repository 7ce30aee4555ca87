//! Named initial-data families.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::Config;
use crate::error::{Error, Result};
use crate::field::{Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gaussian,
    Band,
    LowfreqCap,
    RandomPhase,
    /// amplitude·(1 − ξ²)² on ξ² ≤ 1
    Bump,
    /// only the ξ = 0 coefficient, set so that ∫u dx = amplitude
    ZeroMode,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Ok(match s {
            "gaussian" => Family::Gaussian,
            "band" => Family::Band,
            "lowfreq-cap" => Family::LowfreqCap,
            "random-phase" => Family::RandomPhase,
            "bump" => Family::Bump,
            "zero-mode" => Family::ZeroMode,
            other => return Err(Error::config(format!("unknown data family `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DataSpec {
    pub family: Family,
    pub amplitude: f64,
    /// physical width (gaussian) or spectral width (random-phase)
    pub sigma: f64,
    /// band limits in ξ²
    pub band: (f64, f64),
    /// linear phase slope for band data
    pub phase: f64,
    /// cap exponent γ: |ξ|^{2γ}|û| is constant on ξ² ≤ 1
    pub cap_exponent: f64,
    pub seed: u64,
}

impl DataSpec {
    pub fn from_config(c: &Config, seed: u64) -> Result<DataSpec> {
        Ok(DataSpec {
            family: c.str_or("data.family", "gaussian").parse()?,
            amplitude: c.f64_or("data.amplitude", 0.01)?,
            sigma: c.f64_or("data.sigma", 1.0)?,
            band: c.window_or("data.band", (0.25, 1.0))?,
            phase: c.f64_or("data.phase", 0.0)?,
            cap_exponent: c.f64_or("data.cap_exponent", 0.0)?,
            seed,
        })
    }
}

/// Deterministic construction of the named family on `g`.
pub fn initial_data(spec: &DataSpec, g: &Grid) -> Result<SpectralField> {
    let amp = spec.amplitude;
    Ok(match spec.family {
        Family::Gaussian => crate::nlsolve::gaussian(*g, amp, spec.sigma),
        Family::Band => {
            let (lo, hi) = spec.band;
            if !(0.0 <= lo && lo < hi) {
                return Err(Error::config("band limits need 0 <= lo < hi"));
            }
            crate::waveops::band_state(g, amp, lo, hi, spec.phase)
        }
        Family::LowfreqCap => {
            let gam = spec.cap_exponent;
            if !(0.0..0.25).contains(&gam) {
                return Err(Error::config("cap exponent must lie in [0, 1/4)"));
            }
            SpectralField::from_fn_fourier(*g, |xi| {
                let x2 = xi * xi;
                let m = if xi == 0.0 {
                    if gam == 0.0 {
                        amp
                    } else {
                        0.0
                    }
                } else if x2 <= 1.0 {
                    amp * xi.abs().powf(-2.0 * gam)
                } else if x2 < 4.0 {
                    // smooth taper to zero at |ξ| = 2
                    amp * xi.abs().powf(-2.0 * gam) * (0.5 * PI * (xi.abs() - 1.0)).cos().powi(2)
                } else {
                    0.0
                };
                C::new(m, 0.0)
            })
        }
        Family::RandomPhase => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let phases: Vec<f64> = (0..g.n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let s = spec.sigma;
            SpectralField::from_fn_fourier(*g, |xi| {
                C::new(amp * (-0.5 * xi * xi * s * s).exp(), 0.0)
            })
            .map_indexed(|j, z| z * C::from_polar(1.0, phases[j]))
        }
        Family::Bump => SpectralField::from_fn_fourier(*g, |xi| {
            let x2 = xi * xi;
            C::new(
                if x2 <= 1.0 {
                    amp * (1.0 - x2).powi(2)
                } else {
                    0.0
                },
                0.0,
            )
        }),
        Family::ZeroMode => {
            let mut f = SpectralField::zeros(*g, crate::field::Repr::Fourier);
            f.values_mut()[0] = C::new(amp / (2.0 * PI).sqrt(), 0.0);
            f
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family) -> DataSpec {
        DataSpec {
            family,
            amplitude: 0.3,
            sigma: 1.0,
            band: (0.25, 1.0),
            phase: 0.5,
            cap_exponent: 0.1,
            seed: 7,
        }
    }

    #[test]
    fn gaussian_zero_amplitude() {
        let g = Grid::new(8.0, 64).unwrap();
        let f = initial_data(
            &DataSpec {
                amplitude: 0.0,
                ..spec(Family::Gaussian)
            },
            &g,
        )
        .unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn band_support() {
        let g = Grid::new(20.0, 128).unwrap();
        let f = initial_data(&spec(Family::Band), &g).unwrap().fourier();
        let mut inside = 0.0f64;
        for (j, z) in f.values().iter().enumerate() {
            let x2 = g.xi(j).powi(2);
            if (0.25..=1.0).contains(&x2) {
                inside = inside.max(z.norm());
            } else {
                assert_eq!(z.norm(), 0.0, "xi^2 = {x2}");
            }
        }
        assert!(inside > 0.1);
    }

    #[test]
    fn lowfreq_cap_is_flat_after_weighting() {
        let g = Grid::new(40.0, 256).unwrap();
        let s = spec(Family::LowfreqCap);
        let f = initial_data(&s, &g).unwrap().fourier();
        for (j, z) in f.values().iter().enumerate() {
            let xi = g.xi(j);
            if xi != 0.0 && xi * xi <= 1.0 {
                let w = xi.abs().powf(2.0 * s.cap_exponent) * z.norm();
                assert!((w - s.amplitude).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_phase_is_seeded() {
        let g = Grid::new(8.0, 64).unwrap();
        let a = initial_data(&spec(Family::RandomPhase), &g).unwrap();
        let b = initial_data(&spec(Family::RandomPhase), &g).unwrap();
        let c = initial_data(
            &DataSpec {
                seed: 8,
                ..spec(Family::RandomPhase)
            },
            &g,
        )
        .unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn zero_mode_integral() {
        let g = Grid::new(8.0, 64).unwrap();
        let f = initial_data(&spec(Family::ZeroMode), &g)
            .unwrap()
            .physical();
        let integral: C = f.values().iter().sum::<C>() * g.dx();
        assert!((integral - C::new(0.3, 0.0)).norm() < 1e-13);
    }
}
