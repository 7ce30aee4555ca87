//! Frenet frames, the self-similar curves G_a, tangent limits and curve
//! reconstruction from filament functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Grid, SpectralField};
use crate::fit::{rate_fit, RateFit};
use crate::params::Params;
use crate::transforms::{inverse_hasimoto, CurvatureTorsion, TorsionMethod};

pub type V3 = [f64; 3];

#[inline]
pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn axpy(y: V3, k: f64, x: V3) -> V3 {
    [y[0] + k * x[0], y[1] + k * x[1], y[2] + k * x[2]]
}

#[inline]
fn scale(k: f64, x: V3) -> V3 {
    [k * x[0], k * x[1], k * x[2]]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn normalize(a: V3) -> V3 {
    scale(1.0 / norm(a), a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameState {
    pub tangent: V3,
    pub normal: V3,
    pub binormal: V3,
    pub chi: V3,
    pub x: f64,
}

impl FrameState {
    /// T = e₁, N = e₂, B = e₃ at the given point.
    pub fn standard(chi: V3, x: f64) -> Self {
        FrameState {
            tangent: [1.0, 0.0, 0.0],
            normal: [0.0, 1.0, 0.0],
            binormal: [0.0, 0.0, 1.0],
            chi,
            x,
        }
    }

    /// Largest deviation from an orthonormal right-handed frame.
    pub fn orthonormality_error(&self) -> f64 {
        let (t, n, b) = (self.tangent, self.normal, self.binormal);
        let det = dot(cross(t, n), b);
        [
            (dot(t, t) - 1.0).abs(),
            (dot(n, n) - 1.0).abs(),
            (dot(b, b) - 1.0).abs(),
            dot(t, n).abs(),
            dot(t, b).abs(),
            dot(n, b).abs(),
            (det - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Gram–Schmidt on (T, N), then B = T × N.
    pub fn reorthonormalize(&mut self) {
        let t = normalize(self.tangent);
        let n = normalize(axpy(self.normal, -dot(self.normal, t), t));
        self.tangent = t;
        self.normal = n;
        self.binormal = cross(t, n);
    }

    /// Rotate the frame (not the position) by angle θ about the unit axis k.
    fn rotate(&mut self, k: V3, theta: f64) {
        let (s, c) = theta.sin_cos();
        let rot = |v: V3| {
            let kv = cross(k, v);
            let kd = dot(k, v);
            [
                v[0] * c + kv[0] * s + k[0] * kd * (1.0 - c),
                v[1] * c + kv[1] * s + k[1] * kd * (1.0 - c),
                v[2] * c + kv[2] * s + k[2] * kd * (1.0 - c),
            ]
        };
        self.tangent = rot(self.tangent);
        self.normal = rot(self.normal);
        self.binormal = rot(self.binormal);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub frames: Vec<FrameState>,
    pub a: f64,
    pub t: f64,
}

impl Curve {
    pub fn xs(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.x).collect()
    }

    pub fn positions(&self) -> Vec<V3> {
        self.frames.iter().map(|f| f.chi).collect()
    }

    /// Index of the node closest to arclength 0.
    pub fn origin(&self) -> usize {
        self.frames
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.x.abs().total_cmp(&b.1.x.abs()))
            .map(|p| p.0)
            .unwrap_or(0)
    }

    pub fn max_orthonormality_error(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| f.orthonormality_error())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::field::io::fmt;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "x", "chi1", "chi2", "chi3", "T1", "T2", "T3", "N1", "N2", "N3", "B1", "B2", "B3",
        ])?;
        for f in &self.frames {
            let mut rec = vec![fmt(f.x)];
            for v in [f.chi, f.tangent, f.normal, f.binormal] {
                rec.extend(v.iter().map(|&c| fmt(c)));
            }
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest frame rotation allowed in one RK4 substep.
pub const MAX_TURN: f64 = 0.01;
const DRIFT_REJECT: f64 = 1e-6;

fn frenet_rhs(f: &FrameState, c: f64, tau: f64) -> [V3; 4] {
    [
        scale(c, f.normal),
        axpy(scale(-c, f.tangent), tau, f.binormal),
        scale(-tau, f.normal),
        f.tangent,
    ]
}

fn rk4_step(
    f: &FrameState,
    h: f64,
    c: &dyn Fn(f64) -> f64,
    tau: &dyn Fn(f64) -> f64,
) -> FrameState {
    let shift = |base: &FrameState, k: &[V3; 4], s: f64| FrameState {
        tangent: axpy(base.tangent, s, k[0]),
        normal: axpy(base.normal, s, k[1]),
        binormal: axpy(base.binormal, s, k[2]),
        chi: axpy(base.chi, s, k[3]),
        x: base.x + s,
    };
    let x = f.x;
    let k1 = frenet_rhs(f, c(x), tau(x));
    let f2 = shift(f, &k1, h / 2.0);
    let k2 = frenet_rhs(&f2, c(x + h / 2.0), tau(x + h / 2.0));
    let f3 = shift(f, &k2, h / 2.0);
    let k3 = frenet_rhs(&f3, c(x + h / 2.0), tau(x + h / 2.0));
    let f4 = shift(f, &k3, h);
    let k4 = frenet_rhs(&f4, c(x + h), tau(x + h));
    let comb = |i: usize, base: V3| {
        let mut v = base;
        for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
            v = axpy(v, w * h / 6.0, k[i]);
        }
        v
    };
    FrameState {
        tangent: comb(0, f.tangent),
        normal: comb(1, f.normal),
        binormal: comb(2, f.binormal),
        chi: comb(3, f.chi),
        x: x + h,
    }
}

/// Integrate the Frenet system through the nodes `xs` (sorted), both ways
/// from the node where `init.x` sits. Each node interval is split so that
/// (c + |τ|)·h ≤ MAX_TURN.
pub fn frenet_integrate_fn(
    xs: &[f64],
    c: &dyn Fn(f64) -> f64,
    tau: &dyn Fn(f64) -> f64,
    init: FrameState,
    meta: (f64, f64),
) -> Result<Curve> {
    if init.orthonormality_error() > 1e-9 {
        return Err(Error::domain("initial frame is not orthonormal"));
    }
    let start = xs
        .iter()
        .position(|&x| (x - init.x).abs() <= 1e-12 * (1.0 + x.abs()))
        .ok_or_else(|| Error::config("initial frame must sit on a node"))?;
    let mut frames = vec![init; xs.len()];
    let advance = |f: &FrameState, x1: f64| -> Result<FrameState> {
        let span = x1 - f.x;
        let rate = (c(f.x).abs() + tau(f.x).abs()).max(c(x1).abs() + tau(x1).abs());
        let m = ((span.abs() * rate / MAX_TURN).ceil() as usize).max(1);
        let h = span / m as f64;
        let mut cur = *f;
        for k in 0..m {
            let mut next = rk4_step(&cur, h, c, tau);
            next.x = if k + 1 == m {
                x1
            } else {
                f.x + (k + 1) as f64 * h
            };
            let drift = next.orthonormality_error();
            if drift > DRIFT_REJECT || !drift.is_finite() {
                return Err(Error::Integration {
                    t: next.x,
                    xi: None,
                    h,
                    msg: format!("frame drift {drift:.2e} before re-orthonormalization"),
                });
            }
            next.reorthonormalize();
            cur = next;
        }
        Ok(cur)
    };
    for j in start..xs.len() - 1 {
        frames[j + 1] = advance(&frames[j], xs[j + 1])?;
    }
    for j in (1..=start).rev() {
        frames[j - 1] = advance(&frames[j], xs[j - 1])?;
    }
    Ok(Curve {
        frames,
        a: meta.0,
        t: meta.1,
    })
}

/// Cubic (four-point) local interpolant of uniformly sampled data.
fn cubic_interp<'a>(xs: &'a [f64], f: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
    let n = xs.len();
    let x0 = xs[0];
    let dx = if n > 1 { xs[1] - xs[0] } else { 1.0 };
    move |x: f64| {
        if n < 4 {
            let j = (((x - x0) / dx).floor() as isize).clamp(0, n as isize - 2) as usize;
            let s = (x - xs[j]) / dx;
            return f[j] * (1.0 - s) + f[j + 1] * s;
        }
        let j = (((x - x0) / dx).floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = (x - xs[j]) / dx;
        let (a, b, c, d) = (f[j - 1], f[j], f[j + 1], f[j + 2]);
        // Lagrange on nodes −1, 0, 1, 2
        -s * (s - 1.0) * (s - 2.0) / 6.0 * a + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * b
            - (s + 1.0) * s * (s - 2.0) / 2.0 * c
            + (s + 1.0) * s * (s - 1.0) / 6.0 * d
    }
}

/// Frenet integration of sampled curvature/torsion (undefined τ counts as 0).
pub fn frenet_integrate(ct: &CurvatureTorsion, init: FrameState) -> Result<Curve> {
    let xs = ct.grid.xs();
    let tau: Vec<f64> = ct
        .tau
        .iter()
        .map(|t| if t.is_finite() { *t } else { 0.0 })
        .collect();
    let ci = cubic_interp(&xs, &ct.c);
    let ti = cubic_interp(&xs, &tau);
    frenet_integrate_fn(&xs, &ci, &ti, init, (f64::NAN, f64::NAN))
}

/// G_a: c ≡ a, τ = x/2 on [−X_max, X_max] with node spacing h. The frame at
/// 0 is the standard one and G_a(0) = 2a·B(0), so that √t·G_a(x/√t) solves
/// χ_t = c·b.
pub fn selfsimilar_profile(a: f64, x_max: f64, h: f64) -> Result<Curve> {
    if !(a >= 0.0 && x_max > 0.0 && h > 0.0) {
        return Err(Error::config(
            "selfsimilar_profile needs a >= 0, X_max > 0, h > 0",
        ));
    }
    let m = (x_max / h).round() as usize;
    let xs: Vec<f64> = (0..=2 * m).map(|k| (k as f64 - m as f64) * h).collect();
    let init = FrameState::standard([0.0, 0.0, 2.0 * a], 0.0);
    frenet_integrate_fn(&xs, &|_| a, &|x| x / 2.0, init, (a, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentLimits {
    pub a_plus: V3,
    pub a_minus: V3,
    /// angle between A₊ and −A₋
    pub theta: f64,
    pub sin_half: f64,
    /// e^{−a²/2}, the law as printed
    pub sin_half_printed: f64,
    /// e^{−πa²/2}
    pub sin_half_classical: f64,
    /// max |T − A| over the early and late parts of the last decade, each side
    pub envelope_plus: (f64, f64),
    pub envelope_minus: (f64, f64),
}

/// Cesàro-averaged tangent limits over the last decade of each end.
pub fn tangent_limits(curve: &Curve) -> Result<TangentLimits> {
    let xs = curve.xs();
    let (x_lo, x_hi) = (xs[0], xs[xs.len() - 1]);
    if !(x_lo < 0.0 && x_hi > 0.0) {
        return Err(Error::config(
            "tangent limits need a curve on both sides of 0",
        ));
    }
    let at = |x: f64| -> V3 {
        let j = xs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .unwrap()
            .0;
        curve.frames[j].chi
    };
    let a_plus = normalize(sub(at(x_hi), at(x_hi / 10.0)));
    let a_minus = normalize(sub(at(x_lo / 10.0), at(x_lo)));
    let neg = scale(-1.0, a_minus);
    let theta = dot(a_plus, neg).clamp(-1.0, 1.0).acos();
    let side = |lim: V3, sign: f64, big: f64| -> (f64, f64) {
        let pick = |lo: f64, hi: f64| {
            curve
                .frames
                .iter()
                .filter(|f| f.x * sign >= lo && f.x * sign <= hi)
                .map(|f| norm(sub(f.tangent, lim)))
                .fold(0.0, f64::max)
        };
        (pick(big / 10.0, big / 3.0), pick(big / 3.0, big))
    };
    let envelope_plus = side(a_plus, 1.0, x_hi);
    let envelope_minus = side(a_minus, -1.0, -x_lo);
    for (name, (early, late)) in [("+", envelope_plus), ("-", envelope_minus)] {
        if late > 1e-12 && late >= early {
            return Err(Error::NotConverged(format!(
                "tangent oscillation envelope on the {name} side is not decreasing ({early:.3e} -> {late:.3e})"
            )));
        }
    }
    let a = curve.a;
    Ok(TangentLimits {
        a_plus,
        a_minus,
        theta,
        sin_half: (theta / 2.0).sin(),
        sin_half_printed: (-a * a / 2.0).exp(),
        sin_half_classical: (-std::f64::consts::PI * a * a / 2.0).exp(),
        envelope_plus,
        envelope_minus,
    })
}

/// Curvature recomputed from positions by second differences: |χ''|.
pub fn curvature_from_positions(c: &Curve) -> Vec<(f64, f64)> {
    let p = c.positions();
    let xs = c.xs();
    (1..p.len() - 1)
        .map(|j| {
            let h = xs[j + 1] - xs[j];
            let d2 = scale(
                1.0 / (h * h),
                axpy(sub(p[j + 1], p[j]), -1.0, sub(p[j], p[j - 1])),
            );
            (xs[j], norm(d2))
        })
        .collect()
}

/// Frame angular velocity in t for the binormal flow:
/// ω = γT − βN + αB with α = −cτ, β = c_x, γ = (c_xx − cτ²)/c.
fn time_rotation(f: &FrameState, c: f64, cx: f64, cxx: f64, tau: f64) -> V3 {
    let (al, be, ga) = (-c * tau, cx, (cxx - c * tau * tau) / c);
    axpy(axpy(scale(ga, f.tangent), -be, f.normal), al, f.binormal)
}

/// c, c_x, c_xx and τ at the origin node by centered differences.
fn local_jet(ct: &CurvatureTorsion) -> (f64, f64, f64, f64) {
    let j = ct.grid.origin();
    let h = ct.grid.dx();
    let c = &ct.c;
    let cx = (-c[j + 2] + 8.0 * c[j + 1] - 8.0 * c[j - 1] + c[j - 2]) / (12.0 * h);
    let cxx =
        (-c[j + 2] + 16.0 * c[j + 1] - 30.0 * c[j] + 16.0 * c[j - 1] - c[j - 2]) / (12.0 * h * h);
    let tau = if ct.tau[j].is_finite() {
        ct.tau[j]
    } else {
        0.0
    };
    (c[j], cx, cxx, tau)
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    /// (t, curve) from t = 1 downward
    pub curves: Vec<(f64, Curve)>,
    /// χ₀ at each node
    pub chi0: Vec<V3>,
    /// (t, c, τ) per snapshot
    #[serde(skip)]
    pub ct: Vec<(f64, CurvatureTorsion)>,
}

/// Curves χ(t,·) from filament-function snapshots on a common arclength
/// grid (times strictly decreasing from 1), with the x = 0 frame carried in
/// t by the binormal-flow transport and χ(t,0) by χ_t = c·b.
pub fn binormal_reconstruct(
    psi: &[(f64, SpectralField)],
    frame_at_t1: FrameState,
    threshold: f64,
) -> Result<Reconstruction> {
    if psi.is_empty() {
        return Err(Error::config("reconstruction needs at least one snapshot"));
    }
    if psi.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::config("snapshot times must be strictly decreasing"));
    }
    let grid = *psi[0].1.grid();
    let mut cts = Vec::with_capacity(psi.len());
    for (t, p) in psi {
        if p.grid() != &grid {
            return Err(Error::config("all snapshots must share one arclength grid"));
        }
        let ct = inverse_hasimoto(p, threshold, TorsionMethod::PhaseDifference);
        if let Some(j) = ct.c.iter().position(|&c| !(c > threshold)) {
            return Err(Error::domain(format!(
                "curvature {:.3e} at x = {:.4} and t = {t} is not positive; the Frenet frame is undefined",
                ct.c[j],
                grid.x(j)
            )));
        }
        cts.push((*t, ct));
    }
    let mut frame = frame_at_t1;
    frame.x = grid.x(grid.origin());
    let mut curves: Vec<(f64, Curve)> = Vec::with_capacity(psi.len());
    for k in 0..cts.len() {
        if k > 0 {
            let (t0, ref c0) = cts[k - 1];
            let (t1, ref c1) = cts[k];
            let j0 = local_jet(c0);
            let j1 = local_jet(c1);
            // rotation: trapezoid of the angular velocity, predictor–corrector
            let b_old = frame.binormal;
            let w0 = time_rotation(&frame, j0.0, j0.1, j0.2, j0.3);
            let mut pred = frame;
            let rot = |f: &mut FrameState, w: V3| {
                let th = norm(w);
                if th > 0.0 {
                    f.rotate(scale(1.0 / th, w), th);
                    f.reorthonormalize();
                }
            };
            rot(&mut pred, scale(t1 - t0, w0));
            let w1 = time_rotation(&pred, j1.0, j1.1, j1.2, j1.3);
            rot(
                &mut frame,
                scale(
                    0.5 * (t1 - t0),
                    [w0[0] + w1[0], w0[1] + w1[1], w0[2] + w1[2]],
                ),
            );
            // position: trapezoid in s = √t of 2s·c·b
            let (s0, s1) = (t0.sqrt(), t1.sqrt());
            let inc = axpy(scale(s0 * j0.0, b_old), s1 * j1.0, frame.binormal);
            frame.chi = axpy(frame.chi, s1 - s0, inc);
        }
        let (t, ref ct) = cts[k];
        let mut curve = frenet_integrate(ct, frame)?;
        curve.t = t;
        curves.push((t, curve));
    }
    let chi0 = chi_zero(&curves, &cts);
    Ok(Reconstruction {
        curves,
        chi0,
        ct: cts,
    })
}

/// χ₀(x) = χ(1,x) − ∫₀¹ c b dτ. The part ∫_{t_min}^1 telescopes to
/// χ(1,x) − χ(t_min,x), so the reconstructed curve at t_min stands in for a
/// time quadrature whose integrand oscillates like e^{ix²/4τ} away from
/// x = 0; only the endpoint piece 2·t_min·c·b (c ∝ τ^{−1/2}) is added.
fn chi_zero(curves: &[(f64, Curve)], cts: &[(f64, CurvatureTorsion)]) -> Vec<V3> {
    let (tl, last) = curves.last().map(|(t, c)| (*t, c)).unwrap();
    let cl = &cts.last().unwrap().1;
    last.frames
        .iter()
        .enumerate()
        .map(|(j, f)| sub(f.chi, scale(2.0 * tl * cl.c[j], f.binormal)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CtauReport {
    /// (t, sup_x |c − a/√t|)
    pub c_dev: Vec<(f64, f64)>,
    /// (t, sup_{|x|≤X} |τ − x/2t|)
    pub tau_dev: Vec<(f64, f64)>,
    /// exponent e in dev ∝ t^{−e}, fitted on the two smallest-t decades
    pub c_exponent: Option<f64>,
    pub tau_exponent: Option<f64>,
    pub identically_zero: bool,
}

fn growth_fit(series: &[(f64, f64)]) -> Option<RateFit> {
    let lo = series.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = series.iter().map(|p| p.0).fold(0.0, f64::max);
    rate_fit(series, (lo, hi)).ok()
}

/// Fit on the shortest small-t window spanning two decades (the t ↓ 0 regime).
fn small_t_fit(series: &[(f64, f64)]) -> Option<RateFit> {
    let mut ts: Vec<f64> = series.iter().map(|p| p.0).collect();
    ts.sort_by(f64::total_cmp);
    let lo = *ts.first()?;
    let hi = ts
        .iter()
        .copied()
        .find(|&t| t >= 100.0 * lo * (1.0 - 1e-9))?;
    rate_fit(series, (lo, hi)).ok()
}

/// Deviation of curvature and torsion from the self-similar values a/√t, x/2t.
pub fn ctau_deviation(
    ct: &[(f64, CurvatureTorsion)],
    params: &Params,
    x_window: f64,
) -> CtauReport {
    let a = params.a;
    let mut c_dev = Vec::new();
    let mut tau_dev = Vec::new();
    for (t, c) in ct {
        let xs = c.grid.xs();
        let dc =
            c.c.iter()
                .map(|v| (v - a / t.sqrt()).abs())
                .fold(0.0, f64::max);
        let dt = xs
            .iter()
            .zip(&c.tau)
            .filter(|(x, tau)| x.abs() <= x_window && tau.is_finite())
            .map(|(x, tau)| (tau - x / (2.0 * t)).abs())
            .fold(0.0, f64::max);
        c_dev.push((*t, dc));
        tau_dev.push((*t, dt));
    }
    let zero = c_dev.iter().chain(&tau_dev).all(|p| p.1 == 0.0);
    CtauReport {
        c_exponent: small_t_fit(&c_dev).map(|f| f.exponent),
        tau_exponent: small_t_fit(&tau_dev).map(|f| f.exponent),
        c_dev,
        tau_dev,
        identically_zero: zero,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiTraceReport {
    /// (t, sup_x |χ(t,x) − χ₀(x)|)
    pub distance: Vec<(f64, f64)>,
    /// p in distance ∝ t^p
    pub exponent: Option<f64>,
}

pub fn chi_trace_convergence(curves: &[(f64, Curve)], chi0: &[V3]) -> ChiTraceReport {
    let distance: Vec<(f64, f64)> = curves
        .iter()
        .map(|(t, c)| {
            let d = c
                .frames
                .iter()
                .zip(chi0)
                .map(|(f, z)| norm(sub(f.chi, *z)))
                .fold(0.0, f64::max);
            (*t, d)
        })
        .collect();
    ChiTraceReport {
        exponent: growth_fit(&distance).map(|f| -f.exponent),
        distance,
    }
}

/// Largest node distance between two curves sampled on the same nodes.
pub fn node_distance(a: &[V3], b: &[V3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| norm(sub(*p, *q)))
        .fold(0.0, f64::max)
}

/// Arclength grid helper: nodes x_j of `g` restricted to |x| ≤ x_max.
pub fn window_nodes(g: &Grid, x_max: f64) -> Vec<f64> {
    g.xs().into_iter().filter(|x| x.abs() <= x_max).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::selfsimilar_psi;
    use std::f64::consts::PI;

    fn uniform(x_lo: f64, x_hi: f64, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|k| x_lo + (x_hi - x_lo) * k as f64 / n as f64)
            .collect()
    }

    #[test]
    fn straight_line() {
        let xs = uniform(-5.0, 5.0, 100);
        let c = frenet_integrate_fn(
            &xs,
            &|_| 0.0,
            &|_| 0.0,
            FrameState::standard([1.0, 2.0, 3.0], 0.0),
            (0.0, 1.0),
        )
        .unwrap();
        for f in &c.frames {
            assert!(norm(sub(f.chi, [1.0 + f.x, 2.0, 3.0])) < 1e-13);
        }
        let tl = tangent_limits(&c).unwrap();
        // A₊ and −A₋ point opposite ways: θ = π, no corner
        assert!((tl.sin_half - 1.0).abs() < 1e-12);
        assert!(norm(sub(tl.a_plus, tl.a_minus)) < 1e-12);
    }

    #[test]
    fn circle_closes() {
        let r = 2.0;
        let period = 2.0 * PI * r;
        let xs = uniform(0.0, period, 400);
        let c = frenet_integrate_fn(
            &xs,
            &|_| 1.0 / r,
            &|_| 0.0,
            FrameState::standard([0.0; 3], 0.0),
            (0.0, 1.0),
        )
        .unwrap();
        let last = c.frames.last().unwrap();
        assert!(norm(last.chi) < 1e-8, "{}", norm(last.chi));
        assert!(c.max_orthonormality_error() < 1e-12);
    }

    #[test]
    fn helix_closed_form() {
        let (k, w) = (0.8f64, 0.6f64);
        let s2 = k * k + w * w;
        let (rad, pitch) = (k / s2, w / s2);
        let om = s2.sqrt();
        let xs = uniform(0.0, 20.0, 200);
        // closed-form helix χ(x) = (R cos ωx, R sin ωx, P ωx) with Frenet frame at 0
        let helix = |x: f64| [rad * (om * x).cos(), rad * (om * x).sin(), pitch * om * x];
        let t0 = [0.0, rad * om, pitch * om];
        let n0 = [-1.0, 0.0, 0.0];
        let init = FrameState {
            tangent: t0,
            normal: n0,
            binormal: cross(t0, n0),
            chi: helix(0.0),
            x: 0.0,
        };
        let c = frenet_integrate_fn(&xs, &|_| k, &|_| w, init, (0.0, 1.0)).unwrap();
        for f in &c.frames {
            assert!(norm(sub(f.chi, helix(f.x))) < 1e-9);
        }
    }

    #[test]
    fn selfsimilar_profile_geometry() {
        let a = 0.7;
        let h = 1e-3;
        let g = selfsimilar_profile(a, 3.0, h).unwrap();
        let kappa = curvature_from_positions(&g);
        assert!(kappa.iter().all(|(_, k)| (k - a).abs() < 1e-6));
        // osculating circle at 0: centre χ + N/κ; radius from three nearby nodes
        let o = g.origin();
        let (p0, p1, p2) = (g.frames[o - 1].chi, g.frames[o].chi, g.frames[o + 1].chi);
        let (ab, bc, ca) = (norm(sub(p1, p0)), norm(sub(p2, p1)), norm(sub(p0, p2)));
        let area2 = norm(cross(sub(p1, p0), sub(p2, p0)));
        let radius = ab * bc * ca / (2.0 * area2);
        assert!((radius - 1.0 / a).abs() < 1e-6);
        // reflection: T(−x) = R T(x), χ(−x) = −R χ(x), R = diag(1, −1, −1)
        for j in 0..g.frames.len() {
            let (f, m) = (&g.frames[j], &g.frames[g.frames.len() - 1 - j]);
            let rt = [f.tangent[0], -f.tangent[1], -f.tangent[2]];
            assert!(norm(sub(m.tangent, rt)) < 1e-10);
            let rc = [-f.chi[0], f.chi[1], f.chi[2]];
            assert!(norm(sub(m.chi, rc)) < 1e-10);
        }
    }

    #[test]
    fn tangent_limit_half_angle() {
        let c = selfsimilar_profile(0.5, 200.0, 0.05).unwrap();
        let tl = tangent_limits(&c).unwrap();
        assert!(
            (tl.sin_half - tl.sin_half_classical).abs() < 1e-4,
            "{:?}",
            tl
        );
        assert!((tl.sin_half_printed - (-0.125f64).exp()).abs() < 1e-15);
        // symmetry of the limits
        assert!((tl.a_minus[0] - tl.a_plus[0]).abs() < 1e-9);
        assert!((tl.a_minus[1] + tl.a_plus[1]).abs() < 1e-9);
    }

    fn ladder_psi(g: &Grid, a: f64, t_min: f64) -> Vec<(f64, SpectralField)> {
        crate::fit::geometric_ladder(t_min, 1.0, 2f64.powf(0.25))
            .into_iter()
            .rev()
            .map(|t| (t, selfsimilar_psi(g, a, t)))
            .collect()
    }

    #[test]
    fn reconstruction_of_selfsimilar_family() {
        let a = 0.5;
        let g = Grid::new(2.0, 1024).unwrap();
        let snaps = ladder_psi(&g, a, 0.01);
        let rec =
            binormal_reconstruct(&snaps, FrameState::standard([0.0, 0.0, 2.0 * a], 0.0), 1e-8)
                .unwrap();
        let mut worst: f64 = 0.0;
        for (t, curve) in rec.curves.iter().step_by(3) {
            let h = g.dx() / t.sqrt();
            let prof = selfsimilar_profile(a, g.half_length / t.sqrt(), h).unwrap();
            let want: Vec<V3> = prof.frames[..g.n]
                .iter()
                .map(|f| scale(t.sqrt(), f.chi))
                .collect();
            worst = worst.max(node_distance(&curve.positions(), &want));
        }
        assert!(worst < 1e-4, "{worst}");
        let dev = ctau_deviation(&rec.ct, &Params::focusing(a, 100.0), 1.0);
        assert!(dev.c_dev.iter().all(|p| p.1 < 1e-12));
        assert!(
            dev.tau_dev.iter().all(|p| p.1 < 1e-6),
            "{:?}",
            dev.tau_dev.iter().map(|p| p.1).fold(0.0, f64::max)
        );
        let tr = chi_trace_convergence(&rec.curves, &rec.chi0);
        let p = tr.exponent.unwrap();
        assert!((p - 0.5).abs() < 0.05, "{p} {:?}", tr.distance);
    }

    #[test]
    fn single_snapshot_is_frenet() {
        let g = Grid::new(2.0, 256).unwrap();
        let psi = selfsimilar_psi(&g, 0.5, 1.0);
        let init = FrameState::standard([0.0, 0.0, 1.0], 0.0);
        let rec = binormal_reconstruct(&[(1.0, psi.clone())], init, 1e-8).unwrap();
        let ct = inverse_hasimoto(&psi, 1e-8, TorsionMethod::PhaseDifference);
        let direct = frenet_integrate(&ct, init).unwrap();
        assert_eq!(
            node_distance(&rec.curves[0].1.positions(), &direct.positions()),
            0.0
        );
    }

    #[test]
    fn chi0_integral_of_inverse_sqrt() {
        // ∫₀¹ a/√τ dτ = 2a: with a fixed binormal the χ₀ correction is exact
        // on any ladder thanks to the √t endpoint piece.
        let a = 0.5;
        let g = Grid::new(1.0, 64).unwrap();
        for ratio in [2.0f64, 2f64.sqrt()] {
            let snaps: Vec<(f64, SpectralField)> = crate::fit::geometric_ladder(1e-4, 1.0, ratio)
                .into_iter()
                .rev()
                .map(|t| {
                    (
                        t,
                        SpectralField::from_fn_physical(g, |_| {
                            num_complex::Complex64::new(a / t.sqrt(), 0.0)
                        }),
                    )
                })
                .collect();
            let rec =
                binormal_reconstruct(&snaps, FrameState::standard([0.0; 3], 0.0), 1e-8).unwrap();
            let o = g.origin();
            // c_x = τ = 0 so b is frozen; χ(1,0) − χ₀(0) = 2a·B
            let d = sub(rec.curves[0].1.frames[o].chi, rec.chi0[o]);
            assert!(norm(sub(d, [0.0, 0.0, 2.0 * a])) < 1e-12, "{d:?}");
        }
    }
}
