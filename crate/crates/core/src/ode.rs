//! Dormand–Prince 5(4) with Hairer's continuous extension, on fixed-size
//! complex state vectors.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Opts {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Opts {
    fn default() -> Self {
        Dopri5Opts {
            rtol: 1e-10,
            atol: 1e-14,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

impl Dopri5Opts {
    pub fn tol(rtol: f64, atol: f64) -> Self {
        Dopri5Opts {
            rtol,
            atol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub h_last: f64,
}

#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t: f64,
    h: f64,
    r: [[C; N]; 5],
}

/// Piecewise quartic interpolant of an accepted trajectory.
#[derive(Debug, Clone, Default)]
pub struct Dense<const N: usize> {
    segs: Vec<Segment<N>>,
}

impl<const N: usize> Dense<N> {
    pub fn new() -> Self {
        Dense { segs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.segs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        let first = self.segs.first()?;
        let last = self.segs.last()?;
        let (a, b) = (first.t, last.t + last.h);
        Some((a.min(b), a.max(b)))
    }

    pub fn eval(&self, t: f64) -> Result<[C; N]> {
        let (lo, hi) = self
            .span()
            .ok_or_else(|| Error::domain("empty dense history"))?;
        let slack = 1e-12 * hi.abs().max(1.0);
        if t < lo - slack || t > hi + slack {
            return Err(Error::domain(format!(
                "t={t} outside dense history [{lo}, {hi}]"
            )));
        }
        let forward = self.segs[0].h > 0.0;
        // segments are ordered along the direction of integration
        let idx = self
            .segs
            .partition_point(|s| {
                if forward {
                    s.t + s.h < t
                } else {
                    s.t + s.h > t
                }
            })
            .min(self.segs.len() - 1);
        let s = &self.segs[idx];
        let th = (t - s.t) / s.h;
        let th1 = 1.0 - th;
        let mut y = [C::new(0.0, 0.0); N];
        for i in 0..N {
            y[i] = s.r[0][i]
                + th * (s.r[1][i] + th1 * (s.r[2][i] + th * (s.r[3][i] + th1 * s.r[4][i])));
        }
        Ok(y)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn comb<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for &(c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += ch * k[i];
        }
    }
    out
}

fn err_norm<const N: usize>(d: &[C; N], y0: &[C; N], y1: &[C; N], o: &Dopri5Opts) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].norm().max(y1[i].norm());
        acc += d[i].norm_sqr() / (sc * sc);
    }
    (acc / N as f64).sqrt()
}

/// Integrate y' = f(t, y) from `t0` to `t1` (either direction).
pub fn dopri5<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [C; N],
    t1: f64,
    opts: &Dopri5Opts,
    mut dense: Option<&mut Dense<N>>,
) -> Result<([C; N], Stats)>
where
    F: FnMut(f64, &[C; N]) -> [C; N],
{
    let mut stats = Stats::default();
    if t1 == t0 {
        return Ok((y0, stats));
    }
    if !(opts.atol > 0.0 || opts.rtol > 0.0) {
        return Err(Error::config("dopri5 needs a positive tolerance"));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    let mut h = match opts.h0 {
        Some(h) => h.abs(),
        None => {
            let zero = [C::new(0.0, 0.0); N];
            let d0 = err_norm(&y, &zero, &zero, opts);
            let d1 = err_norm(&k1, &zero, &zero, opts);
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6 * span.max(1e-3)
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(span)
    .min(opts.h_max);

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration {
                t,
                xi: None,
                h,
                msg: format!("step budget {} exhausted", opts.max_steps),
            });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &comb(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * hs,
            &comb(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * hs,
            &comb(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &comb(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = comb(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y1);
        let mut d = [C::new(0.0, 0.0); N];
        for i in 0..N {
            d[i] =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = err_norm(&d, &y, &y1, opts);
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                xi: None,
                h,
                msg: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            if let Some(ds) = dense.as_deref_mut() {
                let mut r = [[C::new(0.0, 0.0); N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    r[0][i] = y[i];
                    r[1][i] = ydiff;
                    r[2][i] = bspl;
                    r[3][i] = ydiff - hs * k7[i] - bspl;
                    r[4][i] = hs
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                ds.segs.push(Segment { t, h: hs, r });
            }
            stats.accepted += 1;
            stats.h_last = h;
            t = t_new;
            y = y1;
            k1 = k7;
            if last {
                return Ok((y, stats));
            }
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            h = (h * fac).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                xi: None,
                h,
                msg: "step size underflow".into(),
            });
        }
    }
}
