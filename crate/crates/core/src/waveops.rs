//! Wave operators: data at t = 1 from a prescribed asymptotic state, for the
//! linear equation (per mode) and the nonlinear one (fixed point on a time
//! grid), plus two-sided backward mode estimates.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{norms, Grid, Repr, SpectralField};
use crate::modes::{
    alpha, evolve_pair, mu, phase_phi, ring_from_asymptotic, ring_rhs_with, yz_from_ring_with,
    zero_mode_law_u, ModeHistory, RescaledModes, RingState, PHI_TOL,
};
use crate::nlsolve::{f_of_u, propagate_split};
use crate::params::Params;
use crate::quad::cumulative_from_origin;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearWaveOpOptions {
    pub t_infinity: f64,
    /// node spacing of the Picard grid in t̃
    pub h: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LinearWaveOpOptions {
    fn default() -> Self {
        LinearWaveOpOptions {
            t_infinity: 1e4,
            h: 0.1,
            max_iter: 60,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardTrace {
    pub xi: f64,
    pub iterations: usize,
    /// successive sup-differences of the iterates
    pub diffs: Vec<f64>,
    pub worst_ratio: f64,
}

/// Ring values at t̃ = `low` by Picard iteration of
/// R(t̃) = R(t̃∞) − ∫_{t̃}^{t̃∞} M(s) R(s) ds on a uniform grid.
pub fn ring_picard(
    seed: RingState,
    low: f64,
    top: f64,
    params: &Params,
    opts: &LinearWaveOpOptions,
    xi: f64,
) -> Result<(RingState, PicardTrace)> {
    let (a, sign) = (params.a, params.sign);
    let n = (((top - low) / opts.h).ceil() as usize).max(4);
    let h = (top - low) / n as f64;
    let s: Vec<f64> = (0..=n).map(|j| low + j as f64 * h).collect();
    let al: Vec<f64> = s
        .iter()
        .map(|&x| alpha(x, a, sign))
        .collect::<Result<_>>()?;
    let mus: Vec<f64> = s.iter().map(|&x| mu(x, a, sign)).collect();
    // Φ(s) = Φ(top) − ∫_s^{top} α
    let phi_top = phase_phi(top, a, sign, PHI_TOL)?;
    let phis: Vec<f64> = cumulative_from_origin(&al, h, n)
        .iter()
        .map(|c| phi_top + c)
        .collect();
    let mut cur = vec![(seed.y_ring, seed.z_ring); n + 1];
    let mut diffs = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let scale = seed.y_ring.norm() + seed.z_ring.norm();
    let mut fy = vec![[0.0; 2]; n + 1];
    let mut fz = vec![[0.0; 2]; n + 1];
    for it in 0..opts.max_iter {
        for j in 0..=n {
            let (dy, dz) = ring_rhs_with(cur[j].0, cur[j].1, mus[j], phis[j]);
            fy[j] = [dy.re, dy.im];
            fz[j] = [dz.re, dz.im];
        }
        let col = |f: &[[f64; 2]], k: usize| -> Vec<f64> {
            let v: Vec<f64> = f.iter().map(|p| p[k]).collect();
            cumulative_from_origin(&v, h, n)
        };
        let (yr, yi, zr, zi) = (col(&fy, 0), col(&fy, 1), col(&fz, 0), col(&fz, 1));
        let mut diff: f64 = 0.0;
        for j in 0..=n {
            let next = (
                seed.y_ring + C::new(yr[j], yi[j]),
                seed.z_ring + C::new(zr[j], zi[j]),
            );
            diff = diff.max((next.0 - cur[j].0).norm() + (next.1 - cur[j].1).norm());
            cur[j] = next;
        }
        if let Some(&prev) = diffs.last() {
            if prev > 0.0 {
                let r: f64 = diff / prev;
                worst_ratio = worst_ratio.max(r);
                if r >= 1.0 && diff > 1e-13 * scale {
                    return Err(Error::NotConverged(format!(
                        "ring Picard iteration is not contracting at xi = {xi} (ratio {r:.3})"
                    )));
                }
            }
        }
        diffs.push(diff);
        if diff <= opts.tol * scale.max(f64::MIN_POSITIVE) || diff == 0.0 {
            let (y, z) = cur[0];
            return Ok((
                RingState {
                    y_ring: y,
                    z_ring: z,
                    phi: phis[0],
                },
                PicardTrace {
                    xi,
                    iterations: it + 1,
                    diffs,
                    worst_ratio,
                },
            ));
        }
    }
    Err(Error::NotConverged(format!(
        "ring Picard iteration hit {} iterations at xi = {xi}",
        opts.max_iter
    )))
}

#[derive(Debug, Clone)]
pub struct LinearWaveOp {
    /// u(1) in Fourier representation
    pub u1: SpectralField,
    pub traces: Vec<PicardTrace>,
}

/// u(1) whose linear evolution scatters to `u_plus` (convention
/// û(t) ≈ e^{−itξ²}û₊); the zero entry of `u_plus` is read as û(T∞, 0).
pub fn linear_wave_operator(
    u_plus: &SpectralField,
    params: &Params,
    opts: &LinearWaveOpOptions,
) -> Result<LinearWaveOp> {
    let h = u_plus.fourier();
    let g = *h.grid();
    let (a, sign) = (params.a, params.sign);
    let t_inf = opts.t_infinity;
    let mut out = vec![ZERO; g.n];
    let mut traces = Vec::new();
    out[0] = zero_mode_law_u(h.values()[0], t_inf, 1.0, a, sign);
    for j in 1..=g.n / 2 {
        let m = g.mirror(j);
        let (up, um) = (h.values()[j], h.values()[m]);
        if up == ZERO && um == ZERO {
            continue;
        }
        let xi = g.xi(j);
        let xi2 = xi * xi;
        let low = (4.0 * params.a2()).max(xi2);
        let top = (xi2 * t_inf).max(low);
        let (seed, _) = ring_from_asymptotic(xi, up, um, top / xi2, params)?;
        let (ring, trace) = if top > low {
            ring_picard(seed, low, top, params, opts, xi)?
        } else {
            (
                seed,
                PicardTrace {
                    xi,
                    iterations: 0,
                    diffs: vec![],
                    worst_ratio: 0.0,
                },
            )
        };
        traces.push(trace);
        let (y, z) = yz_from_ring_with(&ring, alpha(low, a, sign)?);
        let mut p = RescaledModes {
            y,
            z,
            t_rescaled: low,
        }
        .to_pair(xi, params);
        if p.t > 1.0 {
            p = evolve_pair(&p, 1.0, params, opts.tol * 1e-2)?;
        }
        out[j] = p.u_plus;
        if m != j {
            out[m] = p.u_minus;
        }
    }
    Ok(LinearWaveOp {
        u1: SpectralField::new(g, out, Repr::Fourier)?,
        traces,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BackwardReport {
    /// max fitted constant with t1ξ², t2ξ² ≥ 1
    pub high_constant: f64,
    /// same constant from the first and second halves of the t2 range
    pub high_halves: (f64, f64),
    /// max fitted constant when either t1ξ² or t2ξ² is below 1
    pub low_constant: f64,
    pub low_halves: (f64, f64),
    /// spread (max/min) of |û(t1,ξ)| / (|û(t2,ξ)|+|û(t2,−ξ)|) over pairs
    pub modulus_ratio_spread: f64,
}

/// Two-sided bound ratio
/// |û(t1,ξ)| / [(1 + (t1ξ²)^{−δ1})(1 + (t2ξ²)^{−δ2})(|û(t2,ξ)|+|û(t2,−ξ)|)]
/// over all sample pairs t1 ≤ t2 of each history.
pub fn check_backward_estimates(
    histories: &[ModeHistory],
    delta1: f64,
    delta2: f64,
) -> BackwardReport {
    let mut high: Vec<(f64, f64)> = Vec::new();
    let mut low: Vec<(f64, f64)> = Vec::new();
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for h in histories {
        if h.xi == 0.0 {
            continue;
        }
        let xi2 = h.xi * h.xi;
        for (i, s1) in h.samples.iter().enumerate() {
            for s2 in &h.samples[i..] {
                let den = s2.1.norm() + s2.2.norm();
                if den == 0.0 {
                    continue;
                }
                let (k1, k2) = (s1.0 * xi2, s2.0 * xi2);
                let raw = s1.1.norm() / den;
                rmin = rmin.min(raw);
                rmax = rmax.max(raw);
                let r = raw / ((1.0 + k1.powf(-delta1)) * (1.0 + k2.powf(-delta2)));
                if k1 >= 1.0 && k2 >= 1.0 {
                    high.push((s2.0, r));
                } else {
                    low.push((s2.0, r));
                }
            }
        }
    }
    let halves = |v: &[(f64, f64)]| -> (f64, f64, f64) {
        if v.is_empty() {
            return (0.0, 0.0, 0.0);
        }
        let mut ts: Vec<f64> = v.iter().map(|p| p.0).collect();
        ts.sort_by(f64::total_cmp);
        let mid = ts[ts.len() / 2];
        let first = v
            .iter()
            .filter(|p| p.0 <= mid)
            .map(|p| p.1)
            .fold(0.0, f64::max);
        let second = v
            .iter()
            .filter(|p| p.0 > mid)
            .map(|p| p.1)
            .fold(0.0, f64::max);
        (first.max(second), first, second)
    };
    let (hc, h1, h2) = halves(&high);
    let (lc, l1, l2) = halves(&low);
    BackwardReport {
        high_constant: hc,
        high_halves: (h1, h2),
        low_constant: lc,
        low_halves: (l1, l2),
        modulus_ratio_spread: if rmin > 0.0 {
            rmax / rmin
        } else {
            f64::INFINITY
        },
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NonlinearWaveOpOptions {
    pub t_infinity: f64,
    /// spacing of the time nodes
    pub dt: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// absolute bound on norm_X(f₊); `None` means a/10
    pub guard: Option<f64>,
    /// forcing switch: false drops F entirely
    pub nonlinear: bool,
}

impl Default for NonlinearWaveOpOptions {
    fn default() -> Self {
        NonlinearWaveOpOptions {
            t_infinity: 100.0,
            dt: 0.05,
            max_iter: 30,
            tol: 1e-10,
            guard: None,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearWaveOp {
    pub times: Vec<f64>,
    /// u on the time nodes (Fourier representation)
    pub u: Vec<SpectralField>,
    pub diffs: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Lemma-3.2-type envelope for the neglected ∫_{T∞}^∞, reported only
    pub tail_bound: f64,
}

impl NonlinearWaveOp {
    pub fn u1(&self) -> &SpectralField {
        &self.u[0]
    }
}

/// Fixed point of Bu(t) = S(t,1)f₊ − ∫_t^{T∞} S(t,τ) iF(u(τ))/τ dτ on a
/// uniform time grid, with S by split-step and the integral by the backward
/// trapezoid recursion J_k = S(t_k,t_{k+1})[J_{k+1} + Δ/2·G_{k+1}] + Δ/2·G_k.
pub fn nonlinear_wave_operator(
    f_plus: &SpectralField,
    params: &Params,
    opts: &NonlinearWaveOpOptions,
) -> Result<NonlinearWaveOp> {
    let nx = norms::norm_x(f_plus, 1.0, params.gamma)?;
    let bound = opts.guard.unwrap_or(params.a / 10.0);
    if nx > bound {
        return Err(Error::Guard(format!(
            "norm_X(f+) = {nx:.4e} exceeds the smallness guard {bound:.4e}"
        )));
    }
    let t_inf = opts.t_infinity;
    let nodes = ((t_inf - 1.0) / opts.dt).ceil().max(1.0) as usize;
    let d = (t_inf - 1.0) / nodes as f64;
    let times: Vec<f64> = (0..=nodes).map(|k| 1.0 + k as f64 * d).collect();
    // linear part S(t_k, 1)f₊
    let mut lin = Vec::with_capacity(times.len());
    lin.push(f_plus.fourier());
    for k in 1..times.len() {
        let next = propagate_split(&lin[k - 1], times[k - 1], times[k], 1, params);
        lin.push(next);
    }
    let tail_bound = nx * t_inf.powf(-(0.25 - params.gamma - params.delta).max(0.0));
    if !opts.nonlinear {
        return Ok(NonlinearWaveOp {
            times,
            u: lin,
            diffs: vec![],
            ratios: vec![],
            tail_bound,
        });
    }
    let i = C::new(0.0, 1.0);
    let one = C::new(1.0, 0.0);
    let mut u = lin.clone();
    let mut diffs: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let scale = f_plus.l2_norm().max(f64::MIN_POSITIVE);
    for _ in 0..opts.max_iter {
        let forcing = |k: usize, u: &[SpectralField]| -> Result<SpectralField> {
            Ok(f_of_u(&u[k], times[k], params)?
                .scale(i / times[k])
                .fourier())
        };
        let mut next = vec![SpectralField::zeros(*f_plus.grid(), Repr::Fourier); times.len()];
        let last = times.len() - 1;
        let mut j = SpectralField::zeros(*f_plus.grid(), Repr::Fourier);
        next[last] = lin[last].clone();
        let mut g_next = forcing(last, &u)?;
        for k in (0..last).rev() {
            let carried = j.lincomb(one, &g_next, C::new(d / 2.0, 0.0))?;
            let g_k = forcing(k, &u)?;
            j = propagate_split(&carried, times[k + 1], times[k], 1, params).lincomb(
                one,
                &g_k,
                C::new(d / 2.0, 0.0),
            )?;
            next[k] = lin[k].sub(&j)?;
            g_next = g_k;
        }
        let diff = next
            .iter()
            .zip(&u)
            .map(|(a, b)| a.sub(b).map(|x| x.l2_norm()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if let Some(&prev) = diffs.last() {
            if prev > 0.0 {
                let r = diff / prev;
                ratios.push(r);
                if r >= 1.0 && diff > 1e-13 * scale {
                    return Err(Error::NotConverged(format!(
                        "nonlinear Picard differences stopped decreasing (ratio {r:.3}); data too large"
                    )));
                }
            }
        }
        diffs.push(diff);
        u = next;
        if diff <= opts.tol * scale {
            return Ok(NonlinearWaveOp {
                times,
                u,
                diffs,
                ratios,
                tail_bound,
            });
        }
    }
    Err(Error::NotConverged(format!(
        "nonlinear Picard iteration hit {} iterations",
        opts.max_iter
    )))
}

/// Relative L² distance on nonzero modes.
pub fn relative_error(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let mut d = a.fourier().sub(&b.fourier())?;
    d.values_mut()[0] = ZERO;
    let mut r = b.fourier();
    r.values_mut()[0] = ZERO;
    let den = r.l2_norm();
    Ok(if den > 0.0 {
        d.l2_norm() / den
    } else {
        d.l2_norm()
    })
}

/// Band data on `g`: smooth bump in |ξ| supported in lo ≤ ξ² ≤ hi.
pub fn band_state(g: &Grid, amp: f64, lo: f64, hi: f64, phase: f64) -> SpectralField {
    let (a, b) = (lo.sqrt(), hi.sqrt());
    SpectralField::from_fn_fourier(*g, |xi| {
        let k = xi.abs();
        if k < a || k > b {
            return ZERO;
        }
        let s = (k - a) / (b - a);
        C::from_polar(amp * (std::f64::consts::PI * s).sin().powi(2), phase * xi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::geometric_ladder;
    use crate::linprop::{scattering_state, LinearRun};
    use crate::modes::{sample_pair, ModePair};
    use crate::nlsolve::{evolve_nonlinear, NlOptions};

    #[test]
    fn free_wave_operator_is_backward_free_flow() {
        let params = Params {
            a: 0.0,
            ..Params::focusing(0.5, 1e4)
        };
        let g = Grid::new(16.0, 64).unwrap();
        let up = band_state(&g, 0.3, 0.25, 1.0, 0.7);
        let opts = LinearWaveOpOptions {
            t_infinity: 50.0,
            ..Default::default()
        };
        let w = linear_wave_operator(&up, &params, &opts).unwrap();
        let want = crate::linprop::free_evolution(&up, 1.0);
        assert!(relative_error(&w.u1, &want).unwrap() < 1e-8);
    }

    #[test]
    fn linear_round_trip() {
        let params = Params::focusing(0.5, 1e4);
        let g = Grid::new(12.0, 64).unwrap();
        let up = band_state(&g, 0.5, 0.25, 1.0, 1.3);
        let opts = LinearWaveOpOptions::default();
        let w = linear_wave_operator(&up, &params, &opts).unwrap();
        let worst = w.traces.iter().map(|t| t.worst_ratio).fold(0.0, f64::max);
        assert!(worst < 0.5, "Picard ratio {worst}");
        let run = LinearRun::evolve(&params, &w.u1, &[1.0, 1e4], 1e-11, &[]).unwrap();
        let back = scattering_state(&run, 1e4).unwrap();
        let err = relative_error(&back.u_plus, &up).unwrap();
        assert!(err < 1e-3, "round-trip error {err:.3e}");
    }

    #[test]
    fn backward_estimates_are_stable() {
        let params = Params::focusing(0.5, 1e4);
        let times = geometric_ladder(1.0, 1e3, 2f64.powf(0.5));
        let hist: Vec<ModeHistory> = [0.05, 0.3, 1.0, 2.0]
            .iter()
            .map(|&xi| {
                sample_pair(
                    &ModePair::new(xi, C::new(1.0, 0.2), C::new(-0.3, 0.5), 1.0),
                    &times,
                    &params,
                    1e-10,
                )
                .unwrap()
            })
            .collect();
        let r = check_backward_estimates(&hist, params.delta, params.delta);
        assert!(r.high_constant.is_finite() && r.high_constant > 0.0);
        assert!(r.low_constant.is_finite() && r.low_constant > 0.0);
        // constants from either half of the time range agree within a factor 3
        for (x, y) in [r.high_halves, r.low_halves] {
            assert!(x.max(y) <= 3.0 * x.min(y), "{x} vs {y}");
        }
    }

    #[test]
    fn nonlinear_guard_and_linear_switch() {
        let params = Params::focusing(1.0, 1e3);
        let g = Grid::new(64.0, 256).unwrap();
        let big = crate::nlsolve::gaussian(g, 0.5, 1.0);
        let opts = NonlinearWaveOpOptions {
            t_infinity: 5.0,
            ..Default::default()
        };
        assert!(matches!(
            nonlinear_wave_operator(&big, &params, &opts),
            Err(Error::Guard(_))
        ));
        let small = crate::nlsolve::gaussian(g, 0.01, 1.0);
        let direct = crate::linprop::propagate(&small, 1.0, 5.0, &params, 1e-11).unwrap();
        // with F switched off the operator is S(t,1)f₊; split error is second order in dt
        let err = |dt: f64| {
            let o = NonlinearWaveOpOptions {
                nonlinear: false,
                dt,
                ..opts
            };
            let w = nonlinear_wave_operator(&small, &params, &o).unwrap();
            relative_error(w.u.last().unwrap(), &direct).unwrap()
        };
        let (e1, e2) = (err(0.05), err(0.025));
        assert!(
            e1 < 1e-3 && (3.5..4.5).contains(&(e1 / e2)),
            "{e1:.3e} {e2:.3e}"
        );
        let zero = SpectralField::zeros(g, Repr::Fourier);
        let z = nonlinear_wave_operator(&zero, &params, &opts).unwrap();
        assert!(z.u.iter().all(|u| u.max_abs() == 0.0));
    }

    #[test]
    fn zero_state_and_free_backward_estimates() {
        let params = Params::focusing(0.5, 1e4);
        let g = Grid::new(12.0, 64).unwrap();
        let w = linear_wave_operator(
            &SpectralField::zeros(g, Repr::Fourier),
            &params,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(w.u1.max_abs(), 0.0);
        let free = Params { a: 0.0, ..params };
        let times = geometric_ladder(1.0, 1e3, 2.0);
        let h = sample_pair(
            &ModePair::new(0.4, C::new(1.0, 0.2), C::new(-0.3, 0.5), 1.0),
            &times,
            &free,
            1e-11,
        )
        .unwrap();
        let r = check_backward_estimates(&[h], 0.1, 0.1);
        assert!((r.modulus_ratio_spread - 1.0).abs() < 1e-8);
    }

    #[test]
    fn nonlinear_round_trip() {
        let params = Params::focusing(1.0, 1e3);
        let g = Grid::new(64.0, 512).unwrap();
        let fp = crate::nlsolve::gaussian(g, 0.02, 1.0);
        let opts = NonlinearWaveOpOptions {
            t_infinity: 10.0,
            dt: 0.01,
            ..Default::default()
        };
        let w = nonlinear_wave_operator(&fp, &params, &opts).unwrap();
        assert!(w.ratios.iter().all(|&r| r < 1.0));
        let nl = NlOptions {
            dt0: 1e-3,
            dt_max: 1e-3,
            guard: Some(1.0),
            dealias: false,
            ..Default::default()
        };
        let run = evolve_nonlinear(&params, w.u1(), nl, 10.0, &[]).unwrap();
        let back = propagate_split(&run.u(), 10.0, 1.0, 900, &params);
        let err = relative_error(&back, &fp).unwrap();
        assert!(err < 5e-3, "round-trip error {err:.3e}");
        // the nonlinear correction is visible: u(1) differs from f₊
        assert!(relative_error(w.u1(), &fp).unwrap() > 10.0 * err);
    }
}
