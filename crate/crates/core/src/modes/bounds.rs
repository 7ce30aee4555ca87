use serde::Serialize;

use super::pair::ModeHistory;
use crate::params::Params;

#[derive(Debug, Clone, Serialize)]
pub struct ControlsReport {
    /// max |û(t,ξ)| / ((t/t0)^{a²}(|û(t0,ξ)|+|û(t0,−ξ)|)) over all samples
    pub ceiling_max_ratio: f64,
    pub mode_ceiling_violations: usize,
    /// fitted constant of the refined bound with envelope 1 + (ξ²t0)^{−δ}
    pub controls_constant: f64,
    /// running fitted constant at the end of each decade of t/t0
    pub controls_by_decade: Vec<(f64, f64)>,
    /// relative change of the fitted constant over the last decade
    pub controls_last_decade_change: f64,
}

pub const MODE_CEILING_SLACK: f64 = 1e-9;

pub fn check_controls_bounds(
    history: &[ModeHistory],
    params: &Params,
    delta: f64,
) -> ControlsReport {
    let a2 = params.a2();
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    let mut by_decade: Vec<(f64, f64)> = Vec::new();
    let mut c22: f64 = 0.0;
    // gather (t/t0, ratio22) then reduce per decade
    let mut samples22: Vec<(f64, f64)> = Vec::new();
    for h in history {
        let Some(&(t0, u0p, u0m)) = h.samples.first() else {
            continue;
        };
        let base = u0p.norm() + u0m.norm();
        if base == 0.0 {
            continue;
        }
        for &(t, up, um) in &h.samples {
            for u in [up, um] {
                let r = u.norm() / ((t / t0).powf(a2) * base);
                worst = worst.max(r);
                if r > 1.0 + MODE_CEILING_SLACK {
                    violations += 1;
                }
            }
            if h.xi != 0.0 {
                let env = 1.0 + (h.xi * h.xi * t0).powf(-delta);
                let r = up.norm().max(um.norm()) / (env * base);
                samples22.push((t / t0, r));
                c22 = c22.max(r);
            }
        }
    }
    if !samples22.is_empty() {
        let top = samples22.iter().map(|s| s.0).fold(1.0, f64::max);
        let decades = top.log10().ceil().max(1.0) as i32;
        for d in 1..=decades {
            let edge = 10f64.powi(d);
            let c = samples22
                .iter()
                .filter(|s| s.0 <= edge * (1.0 + 1e-12))
                .map(|s| s.1)
                .fold(0.0, f64::max);
            by_decade.push((edge, c));
        }
    }
    let change = match by_decade.len() {
        0 | 1 => 0.0,
        n => {
            (by_decade[n - 1].1 - by_decade[n - 2].1).abs()
                / by_decade[n - 2].1.max(f64::MIN_POSITIVE)
        }
    };
    ControlsReport {
        ceiling_max_ratio: worst,
        mode_ceiling_violations: violations,
        controls_constant: c22,
        controls_by_decade: by_decade,
        controls_last_decade_change: change,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::geometric_ladder;
    use crate::modes::{sample_pair, ModePair};
    use num_complex::Complex64 as C;

    #[test]
    fn free_flow_ratio_pattern() {
        let params = Params {
            a: 0.0,
            ..Params::focusing(0.5, 1e3)
        };
        let times = geometric_ladder(1.0, 1e3, 2.0);
        let h = sample_pair(
            &ModePair::new(1.0, C::new(1.0, 0.0), C::new(0.0, 0.0), 1.0),
            &times,
            &params,
            1e-11,
        )
        .unwrap();
        let r = check_controls_bounds(&[h.clone()], &params, 0.1);
        assert!((r.ceiling_max_ratio - 1.0).abs() < 1e-8);
        for &(_, up, _) in &h.samples {
            assert!((up.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn refined_constant_is_stable_at_high_frequency() {
        let params = Params::focusing(0.5, 1e4);
        let times = geometric_ladder(1.0, 1e4, 2f64.powf(0.5));
        let hs: Vec<ModeHistory> = [1.0, 1.5, 2.0]
            .iter()
            .map(|&xi| {
                sample_pair(
                    &ModePair::new(xi, C::new(1.0, 0.0), C::new(0.3, 0.2), 1.0),
                    &times,
                    &params,
                    1e-10,
                )
                .unwrap()
            })
            .collect();
        let r = check_controls_bounds(&hs, &params, 0.1);
        assert_eq!(r.mode_ceiling_violations, 0);
        assert!(
            r.controls_last_decade_change < 0.1,
            "{:?}",
            r.controls_by_decade
        );
    }
}
