//! Power-law fits on log–log axes.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// Decay exponent: value ∝ t^{−exponent}.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Half-width of the 95% normal-approximation interval on the exponent.
    pub ci95: f64,
    pub samples: usize,
}

/// Least squares of ln(value) against ln(t) over samples with t in `window`.
pub fn rate_fit(samples: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 * (1.0 - 1e-12) && t <= window.1 * (1.0 + 1e-12))
        .collect();
    if pts.len() < 8 {
        return Err(Error::config(format!(
            "rate fit needs >= 8 samples, got {}",
            pts.len()
        )));
    }
    if let Some(&(t, v)) = pts.iter().find(|&&(t, v)| !(t > 0.0 && v > 0.0)) {
        return Err(Error::domain(format!(
            "rate fit needs positive data, got ({t}, {v})"
        )));
    }
    let (tmin, tmax) = pts
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    if tmax / tmin < 100.0 * (1.0 - 1e-9) {
        return Err(Error::config(format!(
            "rate fit window spans {:.2} decades, need >= 2",
            (tmax / tmin).log10()
        )));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        exponent: -slope,
        intercept,
        r_squared,
        ci95: 1.96 * se,
        samples: pts.len(),
    })
}

/// Geometric ladder t0·r^k up to and including `t_end` (clamped).
pub fn geometric_ladder(t0: f64, t_end: f64, ratio: f64) -> Vec<f64> {
    let mut out = vec![t0];
    let mut k = 1;
    loop {
        let t = t0 * ratio.powi(k);
        if t >= t_end * (1.0 - 1e-12) {
            if *out.last().unwrap() < t_end {
                out.push(t_end);
            }
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = lo * (hi / lo).powf(k as f64 / (n - 1) as f64);
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let f = rate_fit(&series(|t| 3.0 / t, 1.0, 1e4, 30), (1.0, 1e4)).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        let c = rate_fit(&series(|_| 2.0, 1.0, 1e4, 30), (1.0, 1e4)).unwrap();
        assert!(c.exponent.abs() < 1e-12);
    }

    #[test]
    fn log_polluted_slope() {
        // Oracle: the exact least-squares slope of ln(1 + ln t) − ¼ ln t,
        // computed in closed form on the same sample points.
        let data = series(|t| t.powf(-0.25) * (1.0 + t.ln()), 10.0, 1e4, 40);
        let f = rate_fit(&data, (10.0, 1e4)).unwrap();
        let xs: Vec<f64> = data.iter().map(|p| p.0.ln()).collect();
        let g: Vec<f64> = xs.iter().map(|x| (1.0 + x).ln()).collect();
        let mx = xs.iter().sum::<f64>() / 40.0;
        let mg = g.iter().sum::<f64>() / 40.0;
        let slope_g = xs
            .iter()
            .zip(&g)
            .map(|(x, y)| (x - mx) * (y - mg))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((f.exponent - (0.25 - slope_g)).abs() < 1e-12);
        // log-uniform sampling weights the steep early decades: ≈ 0.093
        assert!((0.05..=0.25).contains(&f.exponent), "{}", f.exponent);
        // uniform-in-t sampling sits in the [0.10, 0.25] band
        let lin: Vec<(f64, f64)> = (0..400)
            .map(|k| {
                let t = 10.0 + k as f64 * (1e4 - 10.0) / 399.0;
                (t, t.powf(-0.25) * (1.0 + t.ln()))
            })
            .collect();
        let fl = rate_fit(&lin, (10.0, 1e4)).unwrap();
        assert!((0.10..=0.25).contains(&fl.exponent), "{}", fl.exponent);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rate_fit(&series(|t| 1.0 / t, 1.0, 1e4, 5), (1.0, 1e4)).is_err());
        assert!(rate_fit(&series(|t| 1.0 / t, 1.0, 10.0, 20), (1.0, 10.0)).is_err());
        assert!(rate_fit(&series(|t| 1.0 - t, 1.0, 1e3, 20), (1.0, 1e3)).is_err());
    }

    #[test]
    fn ladder_endpoints() {
        let l = geometric_ladder(1.0, 100.0, 2f64.powf(0.125));
        assert_eq!(l[0], 1.0);
        assert_eq!(*l.last().unwrap(), 100.0);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }
}
