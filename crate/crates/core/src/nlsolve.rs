//! Split-step solver for i v_t + v_xx ± (1/t)(|v|²−a²)v = 0 with v = a + w and
//! u = w·e^{∓ia² ln t}; conservation laws, nonlinear scattering and zero-mode
//! growth diagnostics.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{fft::RawFft, norms, Grid, Repr, SpectralField};
use crate::fit::{rate_fit, RateFit};
use crate::linprop::{check_u_plus_lowfreq, LowFreqReport};
use crate::params::Params;

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Which right-hand side the pointwise substep integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    /// Full Gross–Pitaevskii nonlinearity.
    Full,
    /// F forced to 0: only the linearization 2a·Re w around v = a.
    Linear,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NlOptions {
    /// dt(t) = min(dt_max, dt0·t)
    pub dt0: f64,
    pub dt_max: f64,
    /// absolute bound on norm_X(u(t0)); `None` means a/10
    pub guard: Option<f64>,
    /// largest spectral mass fraction the 2/3 filter may remove in one step
    pub alias_tol: f64,
    pub dealias: bool,
    pub diag_every: usize,
    pub model: Model,
}

impl Default for NlOptions {
    fn default() -> Self {
        NlOptions {
            dt0: 1e-3,
            dt_max: 1e-3,
            guard: None,
            alias_tol: 1e-6,
            dealias: true,
            diag_every: 10,
            model: Model::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiagRow {
    pub t: f64,
    pub q: f64,
    pub e: f64,
    /// ∫(|v|²−a²)²
    pub pot: f64,
    /// φ = ∫u
    pub phi: C,
    pub int_w: C,
    pub l2: f64,
    pub linf: f64,
    /// ‖x·u‖ over the box
    pub xu: f64,
}

pub const DIAG_HEADER: [&str; 7] = ["t", "Q", "E", "re_phi", "im_phi", "l2", "linf"];

#[derive(Debug, Clone)]
pub struct NonlinearRun {
    pub params: Params,
    pub opts: NlOptions,
    pub grid: Grid,
    pub t: f64,
    /// v in physical space
    pub v: Vec<C>,
    /// (t, û(t)) in Fourier representation
    pub snapshots: Vec<(f64, SpectralField)>,
    pub diagnostics: Vec<DiagRow>,
    pub steps: usize,
    linf0: f64,
}

fn gauge(t: f64, params: &Params) -> C {
    C::from_polar(1.0, params.s() * params.a2() * t.ln())
}

fn smallness_bound(params: &Params, opts: &NlOptions) -> f64 {
    opts.guard.unwrap_or(params.a / 10.0)
}

/// Exact flow of the pointwise part over [t, t+dt].
fn pointwise_substep(v: &mut [C], a: f64, s: f64, model: Model, lr: f64) {
    match model {
        Model::Full => {
            for z in v.iter_mut() {
                *z *= C::from_polar(1.0, s * (z.norm_sqr() - a * a) * lr);
            }
        }
        Model::Linear => {
            // w_t = ±i(a²/t)(w + w̄): Re w frozen, Im w grows linearly in ln t
            for z in v.iter_mut() {
                let re = z.re - a;
                z.im += 2.0 * s * a * a * re * lr;
            }
        }
    }
}

/// Zero every raw FFT index with |k| > n/3; returns the removed mass.
fn dealias_raw(buf: &mut [C]) -> f64 {
    let n = buf.len();
    let cut = n / 3;
    let mut removed = 0.0;
    for (j, z) in buf.iter_mut().enumerate() {
        let k = if j <= n / 2 { j } else { n - j };
        if k > cut {
            removed += z.norm_sqr();
            *z = ZERO;
        }
    }
    removed
}

struct Stepper {
    fft: RawFft,
    xi2: Vec<f64>,
    buf: Vec<C>,
}

impl Stepper {
    fn new(g: &Grid) -> Self {
        Stepper {
            fft: RawFft::new(g.n),
            xi2: (0..g.n).map(|j| g.xi(j) * g.xi(j)).collect(),
            buf: vec![ZERO; g.n],
        }
    }

    fn free(&mut self, v: &mut [C], dt: f64) {
        let n = v.len() as f64;
        self.fft.forward(v);
        for (z, &x2) in v.iter_mut().zip(&self.xi2) {
            *z *= C::from_polar(1.0 / n, -x2 * dt);
        }
        self.fft.inverse(v);
    }

    /// One Strang step; returns the mass fraction removed by the filter.
    fn strang(&mut self, v: &mut [C], t: f64, dt: f64, params: &Params, opts: &NlOptions) -> f64 {
        let n = v.len();
        self.free(v, 0.5 * dt);
        pointwise_substep(v, params.a, params.s(), opts.model, ((t + dt) / t).ln());
        self.fft.forward(v);
        let mut frac = 0.0;
        if opts.dealias {
            let removed = dealias_raw(v);
            if removed > 0.0 {
                let zero = v[0] - C::new(params.a * n as f64, 0.0);
                let total: f64 =
                    zero.norm_sqr() + v[1..].iter().map(|z| z.norm_sqr()).sum::<f64>() + removed;
                frac = removed / total;
            }
        }
        let nf = n as f64;
        for (z, &x2) in v.iter_mut().zip(&self.xi2) {
            *z *= C::from_polar(1.0 / nf, -x2 * 0.5 * dt);
        }
        self.fft.inverse(v);
        frac
    }

    fn energy_parts(&mut self, v: &[C], g: &Grid, a: f64) -> (f64, f64, f64) {
        let dx = g.dx();
        let (mut q, mut pot) = (0.0, 0.0);
        for z in v {
            let d = z.norm_sqr() - a * a;
            q += d;
            pot += d * d;
        }
        self.buf.copy_from_slice(v);
        self.fft.forward(&mut self.buf);
        let nyq = g.nyquist();
        let kin: f64 = self
            .buf
            .iter()
            .zip(&self.xi2)
            .enumerate()
            .filter(|(j, _)| *j != nyq)
            .map(|(_, (z, &x2))| x2 * z.norm_sqr())
            .sum::<f64>()
            * dx
            / g.n as f64;
        (q * dx, kin, pot * dx)
    }
}

/// ±(|w|²w + a(w² + 2|w|²))·e^{∓ia² ln t} with w = u·e^{±ia² ln t}, de-aliased.
pub fn f_of_u(u: &SpectralField, t: f64, params: &Params) -> Result<SpectralField> {
    if !(t > 0.0) {
        return Err(Error::domain("F(u) needs t > 0"));
    }
    let (a, s) = (params.a, params.s());
    let gw = gauge(t, params);
    let p = u.physical();
    let vals = p
        .values()
        .iter()
        .map(|&uu| {
            let w = uu * gw;
            let m = w.norm_sqr();
            s * (m * w + a * (w * w + 2.0 * m)) * gw.conj()
        })
        .collect();
    let f = SpectralField::new(*u.grid(), vals, Repr::Physical)?;
    Ok(dealias(&f).in_repr(u.repr()))
}

/// 2/3-rule filter.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    let cut = g.n as i64 / 3;
    f.fourier()
        .map_indexed(|j, z| if g.k(j).abs() > cut { ZERO } else { z })
}

/// One Strang step on a v field.
pub fn step_strang(v: &SpectralField, t: f64, dt: f64, params: &Params) -> Result<SpectralField> {
    step_strang_with(v, t, dt, params, &NlOptions::default())
}

pub fn step_strang_with(
    v: &SpectralField,
    t: f64,
    dt: f64,
    params: &Params,
    opts: &NlOptions,
) -> Result<SpectralField> {
    if !(t > 0.0 && dt > 0.0) {
        return Err(Error::domain("step needs t > 0 and dt > 0"));
    }
    let g = *v.grid();
    let mut st = Stepper::new(&g);
    let mut buf = v.physical().into_values();
    let frac = st.strang(&mut buf, t, dt, params, opts);
    if frac > opts.alias_tol {
        return Err(Error::Aliasing { fraction: frac });
    }
    Ok(SpectralField::new(g, buf, Repr::Physical)?.in_repr(v.repr()))
}

/// Q = ∫(|v|²−a²).
pub fn conservation_q(v: &SpectralField, a: f64) -> f64 {
    let p = v.physical();
    p.values().iter().map(|z| z.norm_sqr() - a * a).sum::<f64>() * p.grid().dx()
}

/// E = ½∫|v_x|² ∓ (1/4t)∫(|v|²−a²)².
pub fn energy_e(v: &SpectralField, t: f64, params: &Params) -> f64 {
    let p = v.physical();
    let mut st = Stepper::new(p.grid());
    let (_, kin, pot) = st.energy_parts(p.values(), p.grid(), params.a);
    0.5 * kin - params.s() * pot / (4.0 * t)
}

/// v = a + u·e^{±ia² ln t}.
pub fn v_from_u(u: &SpectralField, t: f64, params: &Params) -> SpectralField {
    let gw = gauge(t, params);
    let p = u.physical();
    p.map_indexed(|_, z| C::new(params.a, 0.0) + z * gw)
        .in_repr(u.repr())
}

/// u = (v − a)·e^{∓ia² ln t}.
pub fn u_from_v(v: &SpectralField, t: f64, params: &Params) -> SpectralField {
    let gw = gauge(t, params).conj();
    let p = v.physical();
    p.map_indexed(|_, z| (z - C::new(params.a, 0.0)) * gw)
        .in_repr(v.repr())
}

impl NonlinearRun {
    /// Start at t0 = params.t0 from u(t0); refuses data beyond the smallness guard.
    pub fn new(params: &Params, u0: &SpectralField, opts: NlOptions) -> Result<NonlinearRun> {
        params.validate()?;
        if !(opts.dt0 > 0.0 && opts.dt_max > 0.0 && opts.diag_every > 0) {
            return Err(Error::config("dt0, dt_max and diag_every must be positive"));
        }
        let t0 = params.t0;
        let nx = norms::norm_x(u0, t0.max(1.0), params.gamma)?;
        let bound = smallness_bound(params, &opts);
        if nx > bound {
            return Err(Error::Guard(format!(
                "norm_X(u(t0)) = {nx:.4e} exceeds the smallness guard {bound:.4e}"
            )));
        }
        let grid = *u0.grid();
        let v = v_from_u(u0, t0, params).physical().into_values();
        let linf0 = u0.physical().max_abs();
        let mut run = NonlinearRun {
            params: *params,
            opts,
            grid,
            t: t0,
            v,
            snapshots: vec![(t0, u0.fourier())],
            diagnostics: Vec::new(),
            steps: 0,
            linf0,
        };
        let mut st = Stepper::new(&grid);
        run.record_diag(&mut st);
        Ok(run)
    }

    pub fn u(&self) -> SpectralField {
        let v = SpectralField::new(self.grid, self.v.clone(), Repr::Physical).expect("grid size");
        u_from_v(&v, self.t, &self.params)
    }

    pub fn v_field(&self) -> SpectralField {
        SpectralField::new(self.grid, self.v.clone(), Repr::Physical).expect("grid size")
    }

    pub fn dt_at(&self, t: f64) -> f64 {
        self.opts.dt_max.min(self.opts.dt0 * t)
    }

    fn record_diag(&mut self, st: &mut Stepper) {
        let g = self.grid;
        let a = self.params.a;
        let (q, kin, pot) = st.energy_parts(&self.v, &g, a);
        let t = self.t;
        let gw = gauge(t, &self.params).conj();
        let dx = g.dx();
        let (mut int_w, mut l2, mut linf, mut xu) = (ZERO, 0.0, 0.0f64, 0.0);
        for (j, z) in self.v.iter().enumerate() {
            let w = z - C::new(a, 0.0);
            int_w += w;
            let m = w.norm_sqr();
            l2 += m;
            linf = linf.max(m);
            let x = g.x(j);
            xu += x * x * m;
        }
        int_w *= dx;
        self.diagnostics.push(DiagRow {
            t,
            q,
            e: 0.5 * kin - self.params.s() * pot / (4.0 * t),
            pot,
            phi: int_w * gw,
            int_w,
            l2: (l2 * dx).sqrt(),
            linf: linf.sqrt(),
            xu: (xu * dx).sqrt(),
        });
    }

    /// Advance to `t_end`, stopping exactly on each of `snapshot_times`.
    pub fn evolve(&mut self, t_end: f64, snapshot_times: &[f64]) -> Result<()> {
        if t_end < self.t {
            return Err(Error::config("nonlinear runs only go forward in time"));
        }
        let mut stops: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&s| s > self.t && s <= t_end)
            .collect();
        stops.sort_by(f64::total_cmp);
        stops.dedup();
        if stops.last().map_or(true, |&s| s < t_end) {
            stops.push(t_end);
        }
        let snap_set: Vec<f64> = snapshot_times.to_vec();
        let mut st = Stepper::new(&self.grid);
        let params = self.params;
        let opts = self.opts;
        for &stop in &stops {
            while self.t < stop {
                let mut dt = self.dt_at(self.t);
                let rem = stop - self.t;
                if dt >= rem * (1.0 - 1e-9) {
                    dt = rem;
                } else if dt > 0.5 * rem {
                    dt = 0.5 * rem;
                }
                let frac = st.strang(&mut self.v, self.t, dt, &params, &opts);
                if frac > opts.alias_tol {
                    return Err(Error::Aliasing { fraction: frac });
                }
                self.t = if dt == rem { stop } else { self.t + dt };
                self.steps += 1;
                if self.steps % opts.diag_every == 0 {
                    self.record_diag(&mut st);
                    let linf = self.diagnostics.last().unwrap().linf;
                    if !linf.is_finite() || (self.linf0 > 0.0 && linf > 1e3 * self.linf0) {
                        return Err(Error::Instability(format!(
                            "L-infinity {linf:.3e} at t = {:.4} exceeds 1e3x the initial value",
                            self.t
                        )));
                    }
                }
            }
            if self.diagnostics.last().map_or(true, |d| d.t != self.t) {
                self.record_diag(&mut st);
            }
            if snap_set.contains(&stop) {
                self.snapshots.push((self.t, self.u().fourier()));
            }
        }
        Ok(())
    }

    pub fn write_diagnostics<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::field::io::fmt;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(DIAG_HEADER)?;
        for d in &self.diagnostics {
            w.write_record([
                fmt(d.t),
                fmt(d.q),
                fmt(d.e),
                fmt(d.phi.re),
                fmt(d.phi.im),
                fmt(d.l2),
                fmt(d.linf),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Largest per-unit-time drift of Q relative to its initial value.
    pub fn q_drift_rate(&self) -> f64 {
        let q0 = self.diagnostics[0].q;
        let t0 = self.diagnostics[0].t;
        self.diagnostics
            .iter()
            .skip(1)
            .map(|d| (d.q - q0).abs() / (d.t - t0))
            .fold(0.0, f64::max)
    }

    /// max |dE/dt ∓ (1/4t²)∫(|v|²−a²)²| by centered differences over
    /// consecutive equally spaced diagnostic rows.
    pub fn energy_identity_residual(&self) -> f64 {
        let s = self.params.s();
        let d = &self.diagnostics;
        let mut worst: f64 = 0.0;
        for k in 1..d.len().saturating_sub(1) {
            let (h1, h2) = (d[k].t - d[k - 1].t, d[k + 1].t - d[k].t);
            if (h1 - h2).abs() > 1e-9 * h1 {
                continue;
            }
            let de = (d[k + 1].e - d[k - 1].e) / (h1 + h2);
            let rhs = s * d[k].pot / (4.0 * d[k].t * d[k].t);
            worst = worst.max((de - rhs).abs());
        }
        worst
    }
}

/// Build and run in one go.
pub fn evolve_nonlinear(
    params: &Params,
    u0: &SpectralField,
    opts: NlOptions,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<NonlinearRun> {
    let mut run = NonlinearRun::new(params, u0, opts)?;
    run.evolve(t_end, snapshot_times)?;
    Ok(run)
}

/// Linear S(t1, t0) by Strang splitting with `steps` equal steps; either
/// direction. Cheaper than the per-mode propagator on large grids.
pub fn propagate_split(
    u: &SpectralField,
    t0: f64,
    t1: f64,
    steps: usize,
    params: &Params,
) -> SpectralField {
    let g = *u.grid();
    let opts = NlOptions {
        model: Model::Linear,
        dealias: false,
        ..NlOptions::default()
    };
    let mut st = Stepper::new(&g);
    let mut v = v_from_u(u, t0, params).physical().into_values();
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    for k in 0..steps {
        st.strang(&mut v, t0 + k as f64 * h, h, params, &opts);
    }
    let v = SpectralField::new(g, v, Repr::Physical).expect("grid size");
    u_from_v(&v, t1, params).in_repr(u.repr())
}

/// Integrates the u-form equation u_t = iu_xx ± i(a²/t)e^{∓2ia² ln t}ū + iF(u)/t
/// by integrating-factor RK4 with fixed dt; an independent check on the gauge.
pub fn evolve_u_form(
    u0: &SpectralField,
    t0: f64,
    t1: f64,
    dt: f64,
    params: &Params,
    model: Model,
) -> Result<SpectralField> {
    let g = *u0.grid();
    let steps = ((t1 - t0) / dt).round().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let (a2, s) = (params.a2(), params.s());
    let rhs = |t: f64, uh: &SpectralField| -> Result<SpectralField> {
        let u = uh.physical();
        let c = I * s * a2 / t * C::from_polar(1.0, -2.0 * s * a2 * t.ln());
        let lin = u.map_indexed(|_, z| c * z.conj());
        let out = match model {
            Model::Full => lin.lincomb(C::new(1.0, 0.0), &f_of_u(&u, t, params)?, I / t)?,
            Model::Linear => lin,
        };
        Ok(dealias(&out))
    };
    let prop = |f: &SpectralField, tau: f64| {
        f.map_indexed(|j, z| z * C::from_polar(1.0, -g.xi(j) * g.xi(j) * tau))
    };
    let one = C::new(1.0, 0.0);
    let mut u = u0.fourier();
    let mut t = t0;
    for _ in 0..steps {
        let k1 = rhs(t, &u)?;
        let u2 = prop(&u.lincomb(one, &k1, C::new(h / 2.0, 0.0))?, h / 2.0);
        let k2 = rhs(t + h / 2.0, &u2)?;
        let u3 = prop(&u, h / 2.0).lincomb(one, &k2, C::new(h / 2.0, 0.0))?;
        let k3 = rhs(t + h / 2.0, &u3)?;
        let u4 = prop(
            &prop(&u, h / 2.0).lincomb(one, &k3, C::new(h, 0.0))?,
            h / 2.0,
        );
        let k4 = rhs(t + h, &u4)?;
        let pk1 = prop(&k1, h);
        let pk23 = prop(&k2.lincomb(one, &k3, one)?, h / 2.0);
        let acc = pk1
            .lincomb(one, &pk23, C::new(2.0, 0.0))?
            .lincomb(one, &k4, one)?;
        u = prop(&u, h).lincomb(one, &acc, C::new(h / 6.0, 0.0))?;
        t += h;
    }
    Ok(u.in_repr(u0.repr()))
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearScattering {
    /// f̂₊ on nonzero modes (pullback convention e^{i(t−1)ξ²}û(t)).
    #[serde(skip)]
    pub f_plus: SpectralField,
    /// ‖P_k − P_{k−1}‖ along the ladder
    pub increments: Vec<(f64, f64)>,
    /// ‖u(t) − e^{−i(t−1)ξ²}f₊‖ at each snapshot (zero mode excluded)
    pub residuals: Vec<(f64, f64)>,
    pub rungs_averaged: usize,
}

fn pullback(u: &SpectralField, t: f64) -> SpectralField {
    let g = *u.grid();
    u.fourier().map_indexed(|j, z| {
        if j == 0 {
            ZERO
        } else {
            z * C::from_polar(1.0, (t - 1.0) * g.xi(j) * g.xi(j))
        }
    })
}

/// e^{i(t−1)∂²}f₊ restricted to nonzero modes.
pub fn free_from_one(f_plus: &SpectralField, t: f64) -> SpectralField {
    let g = *f_plus.grid();
    f_plus.fourier().map_indexed(|j, z| {
        if j == 0 {
            ZERO
        } else {
            z * C::from_polar(1.0, -(t - 1.0) * g.xi(j) * g.xi(j))
        }
    })
}

/// Least-squares slope of ln y against ln t (0 when degenerate or y vanishes).
fn log_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 || pts.iter().any(|p| p.1 <= 0.0) {
        return 0.0;
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

fn increments_of(snaps: &[&(f64, SpectralField)], pulls: &[SpectralField]) -> Vec<(f64, f64)> {
    (1..pulls.len())
        .map(|k| {
            (
                snaps[k].0,
                pulls[k].sub(&pulls[k - 1]).expect("grid").l2_norm(),
            )
        })
        .collect()
}

/// ‖P_k − P_{k−1}‖ for the ladder pullbacks P_k = e^{i(t_k−1)ξ²}û(t_k), zero mode excluded.
pub fn pullback_increments(run: &NonlinearRun) -> Vec<(f64, f64)> {
    let snaps: Vec<&(f64, SpectralField)> = run.snapshots.iter().collect();
    let pulls: Vec<SpectralField> = snaps.iter().map(|(t, u)| pullback(u, *t)).collect();
    increments_of(&snaps, &pulls)
}

/// f₊ as the average of the last four ladder pullbacks (snapshots up to T_limit).
pub fn nonlinear_scattering_state(run: &NonlinearRun, t_limit: f64) -> Result<NonlinearScattering> {
    let snaps: Vec<&(f64, SpectralField)> = run
        .snapshots
        .iter()
        .filter(|(t, _)| *t <= t_limit * (1.0 + 1e-12))
        .collect();
    if snaps.len() < 6 {
        return Err(Error::config(
            "nonlinear scattering needs at least 6 snapshots up to T_limit",
        ));
    }
    let pulls: Vec<SpectralField> = snaps.iter().map(|(t, u)| pullback(u, *t)).collect();
    let rungs = 4;
    let mut f = SpectralField::zeros(*run.snapshots[0].1.grid(), Repr::Fourier);
    for p in &pulls[pulls.len() - rungs..] {
        f = f.lincomb(C::new(1.0, 0.0), p, C::new(1.0 / rungs as f64, 0.0))?;
    }
    let increments = increments_of(&snaps, &pulls);
    let tail =
        &increments[increments.len() - (increments.len() / 4).max(4).min(increments.len())..];
    let slope = log_slope(tail);
    if slope > 0.0 {
        return Err(Error::NotConverged(format!(
            "pullback increments are growing over the last ladder quarter (log-log slope {slope:.3})"
        )));
    }
    let residuals = snaps
        .iter()
        .map(|(t, u)| {
            let mut d = u.fourier().sub(&free_from_one(&f, *t)).expect("grid");
            d.values_mut()[0] = ZERO;
            (*t, d.l2_norm())
        })
        .collect();
    Ok(NonlinearScattering {
        f_plus: f,
        increments,
        residuals,
        rungs_averaged: rungs,
    })
}

impl NonlinearScattering {
    pub fn residual_rate(&self, window: (f64, f64)) -> Result<RateFit> {
        rate_fit(&self.residuals, window)
    }
}

/// Same ratio as the linear check: max_{ξ²≤1, ξ≠0} |ξ|^{2(γ+δ)}|f̂₊| / norm_X(u(1)).
pub fn check_f_plus_lowfreq(
    f_plus: &SpectralField,
    u1: &SpectralField,
    params: &Params,
) -> Result<LowFreqReport> {
    check_u_plus_lowfreq(f_plus, u1, params)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroModeReport {
    /// slope of Im ∫w against ln t
    pub slope: f64,
    pub intercept: f64,
    /// ±a·Q(t0), the leading-order prediction
    pub predicted: f64,
    pub q_initial: f64,
    /// Q(t0) > 0: the sufficient condition for growth of Im ∫w
    pub growth_regime: bool,
    /// power-law exponent of ‖x u(t)‖ (negative = growth)
    pub xu_exponent: Option<f64>,
}

/// Least-squares fit of Im ∫w(t) against ln t over the diagnostics.
pub fn zero_mode_growth(run: &NonlinearRun) -> Result<ZeroModeReport> {
    let d = &run.diagnostics;
    if d.len() < 3 {
        return Err(Error::config(
            "zero-mode fit needs at least 3 diagnostic rows",
        ));
    }
    let n = d.len() as f64;
    let xs: Vec<f64> = d.iter().map(|r| r.t.ln()).collect();
    let ys: Vec<f64> = d.iter().map(|r| r.int_w.im).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let q0 = d[0].q;
    let xu: Vec<(f64, f64)> = d
        .iter()
        .map(|r| (r.t, r.xu))
        .filter(|p| p.1 > 0.0)
        .collect();
    let span = (xu.first().map(|p| p.0), xu.last().map(|p| p.0));
    let xu_exponent = match span {
        (Some(lo), Some(hi)) => rate_fit(&xu, (lo, hi)).ok().map(|f| f.exponent),
        _ => None,
    };
    Ok(ZeroModeReport {
        slope,
        intercept: my - slope * mx,
        predicted: run.params.s() * run.params.a * q0,
        q_initial: q0,
        growth_regime: q0 > 0.0,
        xu_exponent,
    })
}

/// |F(u)|_{L¹} and the comparison quantity ‖u‖²_{L²} + ‖u‖³_{L³}.
pub fn f_l1_bound_parts(u: &SpectralField, t: f64, params: &Params) -> Result<(f64, f64)> {
    let p = u.physical();
    let dx = p.grid().dx();
    let (a, s) = (params.a, params.s());
    let gw = gauge(t, params);
    let (mut l1, mut l2, mut l3) = (0.0, 0.0, 0.0);
    for &uu in p.values() {
        let w = uu * gw;
        let m = w.norm_sqr();
        l1 += (s * (m * w + a * (w * w + 2.0 * m))).norm();
        l2 += m;
        l3 += m.sqrt().powi(3);
    }
    Ok((l1 * dx, (l2 + l3) * dx))
}

/// A 2π-normalized Gaussian bump u(x) = amp·e^{−x²/(2σ²)}.
pub fn gaussian(g: Grid, amp: f64, sigma: f64) -> SpectralField {
    SpectralField::from_fn_physical(g, |x| {
        C::new(amp * (-x * x / (2.0 * sigma * sigma)).exp(), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Sign;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth_random(g: Grid, seed: u64, amp: f64, kmax: f64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise: Vec<C> = (0..g.n)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let f = SpectralField::zeros(g, Repr::Fourier).map_indexed(|j, _| {
            let xi = g.xi(j);
            if xi.abs() <= kmax {
                noise[j] * (-xi * xi).exp()
            } else {
                ZERO
            }
        });
        f.scale(C::new(amp / f.l2_norm(), 0.0))
    }

    #[test]
    fn f_of_u_real_data_at_t1() {
        let g = Grid::new(10.0, 64).unwrap();
        let eps = 0.01;
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let params = Params::new(0.7, 0.0, 0.1, sign, 1.0, 10.0).unwrap();
            let u = SpectralField::from_fn_physical(g, |_| C::new(eps, 0.0));
            let f = f_of_u(&u, 1.0, &params).unwrap().physical();
            let want = sign.s() * (eps.powi(3) + 3.0 * 0.7 * eps * eps);
            for z in f.values() {
                assert!((z - C::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let z = SpectralField::zeros(g, Repr::Physical);
        assert_eq!(
            f_of_u(&z, 3.0, &Params::focusing(1.0, 10.0))
                .unwrap()
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn f_l1_bounded_by_l2_plus_l3() {
        let g = Grid::new(20.0, 128).unwrap();
        let params = Params::focusing(0.8, 10.0);
        let c = 1.0 + 3.0 * params.a;
        for seed in 0..20 {
            let u = smooth_random(g, seed, 0.5 + seed as f64 * 0.1, 3.0);
            let (l1, rhs) = f_l1_bound_parts(&u, 2.5, &params).unwrap();
            assert!(l1 <= c * rhs, "{l1} > {c}*{rhs}");
        }
    }

    #[test]
    fn constant_state_is_fixed_point() {
        let g = Grid::new(10.0, 64).unwrap();
        let params = Params::focusing(0.9, 10.0);
        let v = SpectralField::from_fn_physical(g, |_| C::new(0.9, 0.0));
        let out = step_strang(&v, 1.0, 0.01, &params).unwrap();
        assert!(out.sub(&v).unwrap().max_abs() < 1e-14);
        assert!(conservation_q(&v, 0.9).abs() < 1e-13);
        assert!(energy_e(&v, 2.0, &params).abs() < 1e-13);
        let p0 = Params { a: 0.0, ..params };
        let z = SpectralField::zeros(g, Repr::Physical);
        assert_eq!(step_strang(&z, 1.0, 0.1, &p0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn q_and_e_of_zero_field() {
        let g = Grid::new(10.0, 64).unwrap();
        let a = 0.6;
        let z = SpectralField::zeros(g, Repr::Physical);
        assert!((conservation_q(&z, a) + 20.0 * a * a).abs() < 1e-12);
        let t = 3.0;
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let params = Params::new(a, 0.0, 0.1, sign, 1.0, 10.0).unwrap();
            let want = -sign.s() / (4.0 * t) * 20.0 * a.powi(4);
            assert!((energy_e(&z, t, &params) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn strang_is_second_order() {
        let g = Grid::new(20.0, 128).unwrap();
        let params = Params::focusing(0.5, 10.0);
        let u = smooth_random(g, 7, 0.3, 2.0);
        let v = v_from_u(&u, 1.0, &params);
        let refd = {
            let mut x = v.clone();
            for k in 0..64 {
                x = step_strang(&x, 1.0 + k as f64 / 64.0 * 0.2, 0.2 / 64.0, &params).unwrap();
            }
            x
        };
        let run = |m: usize| {
            let mut x = v.clone();
            for k in 0..m {
                x = step_strang(&x, 1.0 + k as f64 * 0.2 / m as f64, 0.2 / m as f64, &params)
                    .unwrap();
            }
            x.sub(&refd).unwrap().l2_norm()
        };
        let (e1, e2) = (run(4), run(8));
        let ratio = e1 / e2;
        assert!((3.5..4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_data_stays_zero_and_guard_refuses() {
        let g = Grid::new(10.0, 64).unwrap();
        let params = Params::focusing(0.5, 10.0);
        let z = SpectralField::zeros(g, Repr::Physical);
        let run = evolve_nonlinear(&params, &z, NlOptions::default(), 1.5, &[1.25, 1.5]).unwrap();
        assert!(run.u().max_abs() < 1e-15);
        assert_eq!(run.snapshots.len(), 3);
        let big = gaussian(g, 1.0, 1.0);
        assert!(matches!(
            NonlinearRun::new(&params, &big, NlOptions::default()),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn gauge_consistency_with_u_form() {
        let g = Grid::new(20.0, 128).unwrap();
        let params = Params::focusing(0.5, 10.0);
        let u0 = gaussian(g, 0.02, 1.0);
        let opts = NlOptions {
            dt0: 1e-3,
            dt_max: 1e-3,
            ..NlOptions::default()
        };
        let run = evolve_nonlinear(&params, &u0, opts, 2.0, &[]).unwrap();
        let direct = evolve_u_form(&u0, 1.0, 2.0, 1e-3, &params, Model::Full).unwrap();
        let e = run.u().sub(&direct).unwrap().l2_norm() / u0.l2_norm();
        assert!(e < 1e-5, "{e}");
    }

    #[test]
    fn linear_model_matches_linprop() {
        let g = Grid::new(20.0, 128).unwrap();
        let params = Params::focusing(0.5, 10.0);
        let u0 = gaussian(g, 0.02, 1.0);
        let opts = NlOptions {
            model: Model::Linear,
            ..NlOptions::default()
        };
        let run = evolve_nonlinear(&params, &u0, opts, 2.0, &[]).unwrap();
        let lin = crate::linprop::propagate(&u0, 1.0, 2.0, &params, 1e-11).unwrap();
        let e = run.u().sub(&lin).unwrap().l2_norm() / u0.l2_norm();
        assert!(e < 1e-5, "{e}");
    }

    #[test]
    fn linear_zero_mode_slope() {
        // ∫w(1) = 1 real, F off: Im ∫w = 2a² ln t exactly
        let g = Grid::new(40.0, 256).unwrap();
        let params = Params::focusing(1.0, 10.0);
        let sig = 2.0;
        let amp = 1.0 / (sig * (2.0 * std::f64::consts::PI).sqrt());
        let u0 = gaussian(g, amp, sig);
        let opts = NlOptions {
            model: Model::Linear,
            guard: Some(10.0),
            dt0: 1e-2,
            dt_max: 1e-2,
            ..NlOptions::default()
        };
        let run = evolve_nonlinear(&params, &u0, opts, 5.0, &[]).unwrap();
        let z = zero_mode_growth(&run).unwrap();
        assert!((z.slope - 2.0).abs() < 1e-8, "{}", z.slope);
    }
}
