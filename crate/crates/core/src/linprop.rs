//! The linear propagator S(t, t0) on whole fields, Duhamel integrals and
//! linear scattering states.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{norms, Grid, Repr, SpectralField};
use crate::fit::{rate_fit, RateFit};
use crate::modes::{
    asymptotic_mode, coupling, evolve_pair, evolve_pair_dense, zero_mode_law_u, ModeHistory,
    ModePair,
};
use crate::ode::Dense;
use crate::params::Params;
use crate::quad;

pub use crate::fit::rate_fit as fit_rate;

const ZERO: C = C::new(0.0, 0.0);

/// A linear evolution sampled at a list of times.
#[derive(Debug, Clone)]
pub struct LinearRun {
    pub params: Params,
    pub tol: f64,
    pub times: Vec<f64>,
    /// Fourier-represented snapshots; `snapshots[0]` is the initial field.
    pub snapshots: Vec<SpectralField>,
    pub probes: Vec<ModeHistory>,
}

/// The ±ξ pairs of a grid: (index, mirror index), zero mode first.
fn pairs(g: &Grid) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..=g.n / 2).map(move |j| (j, g.mirror(j)))
}

/// Default probe ladder ξ ∈ {2^{−k}} snapped to the grid, plus ξ = 0.
pub fn probe_ladder(g: &Grid) -> Vec<usize> {
    let mut out = vec![0];
    let mut xi = 1.0;
    while xi >= g.dxi() * 0.999 {
        let j = (xi / g.dxi()).round() as usize;
        if j < g.n / 2 && !out.contains(&j) {
            out.push(j);
        }
        xi /= 2.0;
    }
    out
}

impl LinearRun {
    /// Evolve `f` through `times` (times[0] is the initial time).
    pub fn evolve(
        params: &Params,
        f: &SpectralField,
        times: &[f64],
        tol: f64,
        probes: &[usize],
    ) -> Result<LinearRun> {
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
            return Err(Error::config(
                "run times must be positive and strictly increasing",
            ));
        }
        let h = f.fourier();
        let g = *h.grid();
        let (a, sign) = (params.a, params.sign);
        let mut snaps: Vec<Vec<C>> = vec![vec![ZERO; g.n]; times.len()];
        snaps[0].copy_from_slice(h.values());
        let t0 = times[0];
        for (j, m) in pairs(&g) {
            let (up, um) = (h.values()[j], h.values()[m]);
            if j == 0 {
                for (k, &t) in times.iter().enumerate().skip(1) {
                    snaps[k][0] = zero_mode_law_u(up, t0, t, a, sign);
                }
                continue;
            }
            let mut p = ModePair::new(g.xi(j), up, um, t0);
            for (k, &t) in times.iter().enumerate().skip(1) {
                p = evolve_pair(&p, t, params, tol)?;
                snaps[k][j] = p.u_plus;
                snaps[k][m] = if j == m { p.u_plus } else { p.u_minus };
            }
        }
        let probes = probes
            .iter()
            .map(|&j| ModeHistory {
                xi: g.xi(j),
                samples: times
                    .iter()
                    .zip(&snaps)
                    .map(|(&t, s)| (t, s[j], s[g.mirror(j)]))
                    .collect(),
            })
            .collect();
        let snapshots = snaps
            .into_iter()
            .map(|v| SpectralField::new(g, v, Repr::Fourier))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearRun {
            params: *params,
            tol,
            times: times.to_vec(),
            snapshots,
            probes,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.snapshots[0].grid()
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> (f64, &SpectralField) {
        (*self.times.last().unwrap(), self.snapshots.last().unwrap())
    }

    /// Sampled Y-norm of the run.
    pub fn norm_y(&self) -> Result<f64> {
        let snaps: Vec<(f64, SpectralField)> = self
            .times
            .iter()
            .copied()
            .zip(self.snapshots.iter().cloned())
            .collect();
        norms::norm_y_sample(&snaps, self.t0(), self.params.gamma, self.params.a)
    }
}

/// S(t1, t0) f.
pub fn propagate(
    f: &SpectralField,
    t0: f64,
    t1: f64,
    params: &Params,
    tol: f64,
) -> Result<SpectralField> {
    let h = f.fourier();
    let g = *h.grid();
    let mut out = vec![ZERO; g.n];
    for (j, m) in pairs(&g) {
        let (up, um) = (h.values()[j], h.values()[m]);
        if j == 0 {
            out[0] = zero_mode_law_u(up, t0, t1, params.a, params.sign);
            continue;
        }
        let p = evolve_pair(&ModePair::new(g.xi(j), up, um, t0), t1, params, tol)?;
        out[j] = p.u_plus;
        out[m] = if j == m { p.u_plus } else { p.u_minus };
    }
    Ok(SpectralField::new(g, out, Repr::Fourier)?.in_repr(f.repr()))
}

/// Dense history of one pair on [p.t, t_end].
pub fn pair_history(p: &ModePair, t_end: f64, params: &Params, tol: f64) -> Result<Dense<2>> {
    let mut d = Dense::new();
    evolve_pair_dense(p, t_end, params, tol, &mut d)?;
    Ok(d)
}

/// A_{t1,t2}(ξ) = a² ∫_{t1}^{t2} e^{−i(t2−τ)ξ²} conj(û(τ,−ξ)) τ^{−1∓2ia²} dτ.
pub fn duhamel_a(
    t1: f64,
    t2: f64,
    xi: f64,
    history: &Dense<2>,
    params: &Params,
    quad_tol: f64,
) -> Result<C> {
    if xi == 0.0 {
        return Err(Error::domain("Duhamel term is only used at xi != 0"));
    }
    if t1 == t2 {
        return Ok(ZERO);
    }
    if !(t1 < t2) {
        return Err(Error::domain("duhamel_a needs t1 <= t2"));
    }
    let (a2, s, xi2) = (params.a2(), params.s(), xi * xi);
    let scale = {
        let y1 = history.eval(t1)?;
        y1[0].norm() + y1[1].norm()
    };
    if scale == 0.0 || a2 == 0.0 {
        return Ok(ZERO);
    }
    let mut fail = None;
    let r = quad::integrate(
        |tau| match history.eval(tau) {
            Ok(y) => C::from_polar(1.0, -(t2 - tau) * xi2) * y[1].conj() * coupling(tau, a2, s),
            Err(e) => {
                fail.get_or_insert(e);
                ZERO
            }
        },
        t1,
        t2,
        quad_tol * scale * a2,
        quad_tol,
        Some(PI / (4.0 * xi2)),
    )?;
    if let Some(e) = fail {
        return Err(e);
    }
    Ok(r.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringState {
    /// û₊ on nonzero modes; the zero entry is left at 0.
    #[serde(skip)]
    pub u_plus: SpectralField,
    /// û(T, 0) from the closed-form law (grows like ln T when flagged).
    pub zero_mode_at_t_limit: C,
    pub zero_mode_log_growth: bool,
    pub t_limit: f64,
    /// fitted envelope constant and worst mode ratio against it
    pub envelope_constant: f64,
    pub envelope_worst: f64,
}

/// û₊ from the ring asymptotics, cross-checked against e^{iTξ²}û(T,ξ).
pub fn scattering_state(run: &LinearRun, t_limit: f64) -> Result<ScatteringState> {
    let params = run.params;
    let (t_last, last) = run.last();
    if t_limit < t_last {
        return Err(Error::config("T_limit precedes the end of the run"));
    }
    let g = *run.grid();
    let init = &run.snapshots[0];
    let t0 = run.t0();
    let mut out = vec![ZERO; g.n];
    let mut ks: Vec<f64> = Vec::new();
    let mut base_max: f64 = 0.0;
    let mut records: Vec<(f64, f64)> = Vec::new();
    for (j, m) in pairs(&g) {
        if j == 0 {
            continue;
        }
        let p = ModePair::new(g.xi(j), last.values()[j], last.values()[m], t_last);
        let base = init.values()[j].norm() + init.values()[m].norm();
        if p.is_zero() {
            continue;
        }
        let at_t = evolve_pair(&p, t_limit, &params, run.tol)?;
        let am = asymptotic_mode(&at_t, &params, t_limit, run.tol).map_err(|e| e.at_xi(p.xi))?;
        out[j] = am.u_plus_hat;
        if j != m {
            out[m] = am.u_plus_hat_mirror;
        }
        let xi2 = p.xi * p.xi;
        let env = 1.0 + (xi2 * t0).powf(-params.delta);
        let rot = C::from_polar(1.0, t_limit * xi2);
        for (direct, asym) in [
            (rot * at_t.u_plus, am.u_plus_hat),
            (rot * at_t.u_minus, am.u_plus_hat_mirror),
        ] {
            records.push(((direct - asym).norm() * xi2 * t_limit / env, base));
        }
        base_max = base_max.max(base);
    }
    for &(k, base) in &records {
        if base > 1e-10 * base_max {
            ks.push(k / base);
        }
    }
    ks.sort_by(f64::total_cmp);
    let c_fit = if ks.is_empty() { 0.0 } else { ks[ks.len() / 2] };
    let worst = ks.last().copied().unwrap_or(0.0);
    let floor = c_fit.max(params.a2()).max(1e-3);
    if worst > 10.0 * floor {
        return Err(Error::Inconsistency(format!(
            "asymptotic and direct scattering states disagree: ratio {worst:.3e} vs envelope {floor:.3e}"
        )));
    }
    let w0 = init.values()[0] * C::from_polar(1.0, params.s() * params.a2() * t0.ln());
    let log_growth = params.a > 0.0 && (2.0 * PI).sqrt() * w0.re.abs() > 1e-12;
    Ok(ScatteringState {
        u_plus: SpectralField::new(g, out, Repr::Fourier)?,
        zero_mode_at_t_limit: zero_mode_law_u(init.values()[0], t0, t_limit, params.a, params.sign),
        zero_mode_log_growth: log_growth,
        t_limit,
        envelope_constant: c_fit,
        envelope_worst: worst,
    })
}

/// e^{it∂²}u₊ in Fourier representation.
pub fn free_evolution(u_plus: &SpectralField, t: f64) -> SpectralField {
    let g = *u_plus.grid();
    u_plus
        .fourier()
        .map_indexed(|j, z| z * C::from_polar(1.0, -t * g.xi(j) * g.xi(j)))
}

/// ‖u(t) − e^{it∂²}u₊‖ on nonzero modes for every snapshot.
pub fn residual_series(run: &LinearRun, u_plus: &SpectralField) -> Vec<(f64, f64)> {
    run.times
        .iter()
        .zip(&run.snapshots)
        .map(|(&t, s)| {
            let mut d = s.sub(&free_evolution(u_plus, t)).expect("same grid");
            d.values_mut()[0] = ZERO;
            (t, d.l2_norm())
        })
        .collect()
}

pub fn residual_rate(
    run: &LinearRun,
    u_plus: &SpectralField,
    window: (f64, f64),
) -> Result<RateFit> {
    rate_fit(&residual_series(run, u_plus), window)
}

#[derive(Debug, Clone, Serialize)]
pub struct LowFreqReport {
    pub max_ratio: f64,
    pub argmax_xi: f64,
    pub norm_x_initial: f64,
}

/// max over ξ² ≤ 1, ξ ≠ 0 of |ξ|^{2(γ+δ)}|û₊(ξ)| / ‖u(1)‖_X.
pub fn check_u_plus_lowfreq(
    u_plus: &SpectralField,
    u_t0: &SpectralField,
    params: &Params,
) -> Result<LowFreqReport> {
    let nx = norms::norm_x(u_t0, 1.0, params.gamma)?;
    let h = u_plus.fourier();
    let g = *h.grid();
    let mut best = (0.0, 0.0);
    for j in g.lowfreq_indices() {
        if j == 0 {
            continue;
        }
        let xi = g.xi(j);
        let v = xi.abs().powf(2.0 * (params.gamma + params.delta)) * h.values()[j].norm();
        if v > best.0 {
            best = (v, xi);
        }
    }
    Ok(LowFreqReport {
        max_ratio: if nx > 0.0 { best.0 / nx } else { 0.0 },
        argmax_xi: best.1,
        norm_x_initial: nx,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzReport {
    pub full: f64,
    pub remainder: f64,
    /// cumulative (T, full, remainder) at each snapshot
    pub cumulative: Vec<(f64, f64, f64)>,
}

/// L⁴L∞ of the run and of the run minus the free evolution of u₊.
pub fn strichartz_diagnostic(run: &LinearRun, u_plus: &SpectralField) -> Result<StrichartzReport> {
    let mut sup_full = Vec::with_capacity(run.times.len());
    let mut sup_rem = Vec::with_capacity(run.times.len());
    for (&t, s) in run.times.iter().zip(&run.snapshots) {
        let mut nz = s.clone();
        nz.values_mut()[0] = ZERO;
        sup_full.push(s.physical().max_abs());
        let d = nz.sub(&free_evolution(u_plus, t))?;
        sup_rem.push(d.physical().max_abs());
    }
    let mut cumulative = Vec::new();
    let (mut af, mut ar) = (0.0, 0.0);
    for k in 1..run.times.len() {
        let dt = run.times[k] - run.times[k - 1];
        af += 0.5 * (sup_full[k - 1].powi(4) + sup_full[k].powi(4)) * dt;
        ar += 0.5 * (sup_rem[k - 1].powi(4) + sup_rem[k].powi(4)) * dt;
        cumulative.push((run.times[k], af.powf(0.25), ar.powf(0.25)));
    }
    Ok(StrichartzReport {
        full: norms::l4_of_sup_series(&sup_full, &run.times)?,
        remainder: norms::l4_of_sup_series(&sup_rem, &run.times)?,
        cumulative,
    })
}
