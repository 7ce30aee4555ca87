use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{dopri5, Dense, Dopri5Opts};
use crate::params::Params;

/// (û(t, ξ), û(t, −ξ)) at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModePair {
    pub xi: f64,
    pub u_plus: C,
    pub u_minus: C,
    pub t: f64,
}

impl ModePair {
    pub fn new(xi: f64, u_plus: C, u_minus: C, t: f64) -> Self {
        ModePair {
            xi,
            u_plus,
            u_minus,
            t,
        }
    }

    /// The same pair viewed from −ξ.
    pub fn mirrored(&self) -> Self {
        ModePair {
            xi: -self.xi,
            u_plus: self.u_minus,
            u_minus: self.u_plus,
            t: self.t,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u_plus == C::new(0.0, 0.0) && self.u_minus == C::new(0.0, 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.u_plus.norm() + self.u_minus.norm()
    }
}

/// a² t^{−1∓2ia²}, evaluated as a² t^{−1} e^{∓2ia² ln t}.
#[inline]
pub fn coupling(t: f64, a2: f64, s: f64) -> C {
    C::from_polar(a2 / t, -s * 2.0 * a2 * t.ln())
}

#[inline]
fn rhs(t: f64, y: &[C; 2], xi2: f64, a2: f64, s: f64) -> [C; 2] {
    let k = C::new(0.0, s) * coupling(t, a2, s);
    let rot = C::new(0.0, -xi2);
    [rot * y[0] + k * y[1].conj(), rot * y[1] + k * y[0].conj()]
}

pub fn pair_rhs(p: &ModePair, params: &Params) -> Result<(C, C)> {
    if !(p.t > 0.0) {
        return Err(Error::domain(format!("pair_rhs needs t > 0, got {}", p.t)));
    }
    let d = rhs(
        p.t,
        &[p.u_plus, p.u_minus],
        p.xi * p.xi,
        params.a2(),
        params.s(),
    );
    Ok((d[0], d[1]))
}

fn opts_for(p: &ModePair, tol: f64) -> Dopri5Opts {
    let scale = p.magnitude().max(f64::MIN_POSITIVE);
    Dopri5Opts::tol(tol, 1e-3 * tol * scale)
}

fn evolve_impl(
    p: &ModePair,
    t1: f64,
    params: &Params,
    tol: f64,
    dense: Option<&mut Dense<2>>,
) -> Result<ModePair> {
    if !(p.t > 0.0 && t1 > 0.0) {
        return Err(Error::domain(format!(
            "mode evolution needs positive times, got {} -> {}",
            p.t, t1
        )));
    }
    if p.is_zero() || t1 == p.t {
        return Ok(ModePair { t: t1, ..*p });
    }
    let (xi2, a2, s) = (p.xi * p.xi, params.a2(), params.s());
    let (y, _) = dopri5(
        |t, y: &[C; 2]| rhs(t, y, xi2, a2, s),
        p.t,
        [p.u_plus, p.u_minus],
        t1,
        &opts_for(p, tol),
        dense,
    )
    .map_err(|e| e.at_xi(p.xi))?;
    Ok(ModePair {
        xi: p.xi,
        u_plus: y[0],
        u_minus: y[1],
        t: t1,
    })
}

/// Adaptive integration of the ±ξ system to `t1` (either direction).
pub fn evolve_pair(p: &ModePair, t1: f64, params: &Params, tol: f64) -> Result<ModePair> {
    evolve_impl(p, t1, params, tol, None)
}

/// As [`evolve_pair`], also recording a continuous interpolant.
pub fn evolve_pair_dense(
    p: &ModePair,
    t1: f64,
    params: &Params,
    tol: f64,
    dense: &mut Dense<2>,
) -> Result<ModePair> {
    evolve_impl(p, t1, params, tol, Some(dense))
}

/// Samples of one ±ξ pair on a time list.
#[derive(Debug, Clone, Serialize)]
pub struct ModeHistory {
    pub xi: f64,
    /// (t, û(t, ξ), û(t, −ξ))
    pub samples: Vec<(f64, C, C)>,
}

impl ModeHistory {
    pub fn t0(&self) -> f64 {
        self.samples[0].0
    }

    pub fn write_csv<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        use crate::field::io::fmt;
        for &(t, up, um) in &self.samples {
            w.write_record(&[
                fmt(t),
                fmt(self.xi),
                fmt(up.re),
                fmt(up.im),
                fmt(um.re),
                fmt(um.im),
            ])?;
        }
        Ok(())
    }
}

pub const HISTORY_HEADER: [&str; 6] = ["t", "xi", "re_plus", "im_plus", "re_minus", "im_minus"];

/// Evolve sequentially through `times` (the first entry must equal `p.t`).
pub fn sample_pair(p: &ModePair, times: &[f64], params: &Params, tol: f64) -> Result<ModeHistory> {
    let mut cur = *p;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        cur = evolve_pair(&cur, t, params, tol)?;
        samples.push((t, cur.u_plus, cur.u_minus));
    }
    Ok(ModeHistory { xi: p.xi, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Sign;

    fn rk4_oracle(p: &ModePair, t1: f64, params: &Params, dt: f64) -> (C, C) {
        let (xi2, a2, s) = (p.xi * p.xi, params.a2(), params.s());
        let f = |t: f64, y: [C; 2]| rhs(t, &y, xi2, a2, s);
        let n = ((t1 - p.t) / dt).round() as usize;
        let h = (t1 - p.t) / n as f64;
        let mut y = [p.u_plus, p.u_minus];
        let mut t = p.t;
        for _ in 0..n {
            let k1 = f(t, y);
            let k2 = f(
                t + h / 2.0,
                [y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)],
            );
            let k3 = f(
                t + h / 2.0,
                [y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)],
            );
            let k4 = f(t + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
            for i in 0..2 {
                y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            }
            t += h;
        }
        (y[0], y[1])
    }

    #[test]
    fn rhs_examples() {
        let free = Params {
            a: 0.0,
            ..Params::focusing(0.5, 10.0)
        };
        let p = ModePair::new(2.0, C::new(1.0, 2.0), C::new(0.5, 0.0), 3.0);
        let (d, _) = pair_rhs(&p, &free).unwrap();
        assert!((d - C::new(0.0, -4.0) * p.u_plus).norm() < 1e-15);

        let z = ModePair::new(1.0, C::new(0.0, 0.0), C::new(0.0, 0.0), 2.0);
        assert_eq!(
            pair_rhs(&z, &Params::focusing(1.0, 10.0)).unwrap(),
            (C::new(0.0, 0.0), C::new(0.0, 0.0))
        );

        // ξ = 0, t = 1, real c: derivative i a² c
        let params = Params::focusing(0.7, 10.0);
        let c = 1.3;
        let q = ModePair::new(0.0, C::new(c, 0.0), C::new(c, 0.0), 1.0);
        let (d, _) = pair_rhs(&q, &params).unwrap();
        assert!((d - C::new(0.0, 0.49 * c)).norm() < 1e-15);
        assert!(pair_rhs(&ModePair { t: 0.0, ..q }, &params).is_err());
    }

    #[test]
    fn free_flow_is_rotation() {
        let free = Params {
            a: 0.0,
            ..Params::focusing(0.5, 200.0)
        };
        let p = ModePair::new(0.8, C::new(0.3, -0.4), C::new(1.0, 0.2), 1.0);
        let q = evolve_pair(&p, 50.0, &free, 1e-11).unwrap();
        let ph = C::from_polar(1.0, -49.0 * 0.64);
        assert!((q.u_plus - ph * p.u_plus).norm() < 1e-8);
        assert!((q.u_minus - ph * p.u_minus).norm() < 1e-8);
    }

    #[test]
    fn matches_rk4_oracle_and_mode_ceiling() {
        let params = Params::focusing(0.5, 100.0);
        let p = ModePair::new(1.0, C::new(1.0, 0.0), C::new(0.0, 0.0), 1.0);
        let q = evolve_pair(&p, 100.0, &params, 1e-10).unwrap();
        let (op, om) = rk4_oracle(&p, 100.0, &params, 1e-3);
        assert!((q.u_plus - op).norm() < 1e-6, "{}", (q.u_plus - op).norm());
        assert!((q.u_minus - om).norm() < 1e-6);
        assert!(q.u_plus.norm() <= 100f64.powf(0.25) * 1.0 + 1e-9);
    }

    #[test]
    fn backward_recovers_initial() {
        let params = Params::new(0.6, 0.0, 0.1, Sign::Defocusing, 1.0, 50.0).unwrap();
        let p = ModePair::new(0.5, C::new(0.2, 0.1), C::new(-0.3, 0.7), 1.0);
        let q = evolve_pair(&p, 40.0, &params, 1e-12).unwrap();
        let r = evolve_pair(&q, 1.0, &params, 1e-12).unwrap();
        assert!((r.u_plus - p.u_plus).norm() < 1e-8);
        assert!((r.u_minus - p.u_minus).norm() < 1e-8);
    }

    #[test]
    fn zero_stays_zero() {
        let p = ModePair::new(0.5, C::new(0.0, 0.0), C::new(0.0, 0.0), 1.0);
        let q = evolve_pair(&p, 10.0, &Params::focusing(1.0, 10.0), 1e-10).unwrap();
        assert!(q.is_zero());
        assert_eq!(q.t, 10.0);
    }
}
