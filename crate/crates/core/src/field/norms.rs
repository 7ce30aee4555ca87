use super::grid::Grid;
use super::spectral::SpectralField;
use crate::error::{Error, Result};

/// max over ξ² ≤ 1 of |ξ|^{2γ}|f̂(ξ)|, with 0⁰ = 1 at the zero mode.
pub fn lowfreq_sup(f: &SpectralField, gamma: f64) -> Result<f64> {
    let g: &Grid = f.grid();
    let low = g.lowfreq_indices();
    if low.len() < 2 {
        return Err(Error::config(format!(
            "no nonzero grid frequency with xi^2 <= 1 (half_length {} too small)",
            g.half_length
        )));
    }
    let h = f.fourier();
    Ok(low
        .into_iter()
        .map(|j| g.xi(j).abs().powf(2.0 * gamma) * h.values()[j].norm())
        .fold(0.0, f64::max))
}

/// t0^{−1/4}‖f‖ + t0^{γ−1/2} sup_{ξ²≤1} |ξ|^{2γ}|f̂(ξ)|.
pub fn norm_x(f: &SpectralField, t0: f64, gamma: f64) -> Result<f64> {
    if !(t0 >= 1.0) {
        return Err(Error::domain(format!("norm_X needs t0 >= 1, got {t0}")));
    }
    Ok(t0.powf(-0.25) * f.l2_norm() + t0.powf(gamma - 0.5) * lowfreq_sup(f, gamma)?)
}

/// Sampled Y-norm: sup over snapshots of the weighted X-type expression.
pub fn norm_y_sample(
    snapshots: &[(f64, SpectralField)],
    t0: f64,
    gamma: f64,
    a: f64,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (t, g) in snapshots {
        if *t < t0 {
            return Err(Error::domain(format!(
                "snapshot time {t} precedes t0 = {t0}"
            )));
        }
        let v = t0.powf(-0.25) * g.l2_norm()
            + (t0 / t).powf(a * a) * t0.powf(gamma - 0.5) * lowfreq_sup(g, gamma)?;
        best = best.max(v);
    }
    Ok(best)
}

/// (∫ ‖g(t)‖_∞⁴ dt)^{1/4} by the trapezoid rule on the given times.
pub fn norm_l4_linf(snapshots: &[SpectralField], times: &[f64]) -> Result<f64> {
    let sup: Vec<f64> = snapshots.iter().map(|g| g.physical().max_abs()).collect();
    l4_of_sup_series(&sup, times)
}

/// Same quadrature when the L∞ values are already known.
pub fn l4_of_sup_series(sup: &[f64], times: &[f64]) -> Result<f64> {
    if sup.len() != times.len() || times.len() < 2 {
        return Err(Error::config(
            "L4Linf needs at least two snapshots with matching times",
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("snapshot times must be strictly increasing"));
    }
    let mut acc = 0.0;
    for k in 1..times.len() {
        acc += 0.5 * (sup[k - 1].powi(4) + sup[k].powi(4)) * (times[k] - times[k - 1]);
    }
    Ok(acc.powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Repr;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(8.0 * PI, 128).unwrap()
    }

    #[test]
    fn zero_field() {
        let f = SpectralField::zeros(grid(), Repr::Physical);
        assert_eq!(norm_x(&f, 1.0, 0.1).unwrap(), 0.0);
        assert_eq!(
            norm_y_sample(&[(1.0, f.clone())], 1.0, 0.1, 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn flat_lowfreq_spectrum() {
        let g = grid();
        let f = SpectralField::from_fn_fourier(g, |xi| {
            if xi * xi <= 1.0 + 1e-12 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        // Oracle: count of unit modes times dξ gives ‖f‖².
        let count = g.lowfreq_indices().len() as f64;
        let l2 = (count * g.dxi()).sqrt();
        assert!((norm_x(&f, 1.0, 0.0).unwrap() - (l2 + 1.0)).abs() < 1e-12);
        let twice = f.scale(Complex64::new(2.0, 0.0));
        assert!((norm_x(&twice, 1.0, 0.0).unwrap() - 2.0 * (l2 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn y_norm_single_snapshot_equals_x_norm() {
        let g = grid();
        let f = SpectralField::from_fn_physical(g, |x| {
            Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp())
        });
        let x = norm_x(&f, 2.0, 0.1).unwrap();
        let y = norm_y_sample(&[(2.0, f.clone())], 2.0, 0.1, 0.7).unwrap();
        assert_eq!(x, y);
        let y3 = norm_y_sample(
            &[(2.0, f.clone()), (5.0, f.clone()), (50.0, f)],
            2.0,
            0.1,
            0.7,
        )
        .unwrap();
        assert_eq!(y3, x);
    }

    #[test]
    fn too_small_box_is_rejected() {
        let g = Grid::new(1.0, 16).unwrap();
        let f = SpectralField::zeros(g, Repr::Physical);
        assert!(norm_x(&f, 1.0, 0.0).is_err());
    }

    #[test]
    fn l4linf_closed_forms() {
        let g = grid();
        let times: Vec<f64> = (0..=400).map(|k| 1.0 + k as f64 * 0.25).collect();
        let c = 0.7;
        let snaps: Vec<SpectralField> = times
            .iter()
            .map(|_| SpectralField::from_fn_physical(g, |_| Complex64::new(c, 0.0)))
            .collect();
        let t_end = *times.last().unwrap();
        let v = norm_l4_linf(&snaps, &times).unwrap();
        assert!((v - c * (t_end - 1.0).powf(0.25)).abs() < 1e-12);

        // g = t^{−1/2}: ∫₁^T t^{−2} dt = 1 − 1/T.
        let fine: Vec<f64> = (0..=10_000).map(|k| 1.0 + k as f64 * 0.01).collect();
        let sup: Vec<f64> = fine.iter().map(|t| t.powf(-0.5)).collect();
        let v = l4_of_sup_series(&sup, &fine).unwrap();
        let want = (1.0 - 1.0 / 101.0f64).powf(0.25);
        assert!((v - want).abs() < 1e-5, "{v} vs {want}");
        assert!(l4_of_sup_series(&sup[..1], &times[..1]).is_err());
    }
}
