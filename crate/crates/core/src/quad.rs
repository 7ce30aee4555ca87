//! Adaptive Gauss–Kronrod (7/15) and composite Gauss–Legendre rules for
//! complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One GK15 panel: (Kronrod value, |Kronrod − Gauss|).
pub fn gk15<F: FnMut(f64) -> C>(f: &mut F, a: f64, b: f64) -> (C, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * hl, ((k - g) * hl).norm())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C,
    pub abs_err: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    val: C,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive bisection. `max_panel` pre-splits [a, b] so that no
/// initial panel is longer than it (useful for oscillatory integrands).
pub fn integrate<F: FnMut(f64) -> C>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panel: Option<f64>,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: C::new(0.0, 0.0),
            abs_err: 0.0,
            panels: 0,
        });
    }
    let n0 = match max_panel {
        Some(h) if h > 0.0 => ((b - a).abs() / h).ceil().max(1.0) as usize,
        _ => 1,
    };
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let (mut total, mut err) = (C::new(0.0, 0.0), 0.0);
    for i in 0..n0 {
        let pa = a + (b - a) * i as f64 / n0 as f64;
        let pb = a + (b - a) * (i + 1) as f64 / n0 as f64;
        let (v, e) = gk15(&mut f, pa, pb);
        total += v;
        err += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            val: v,
            err: e,
        });
    }
    let limit = n0 + 20_000;
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= limit {
            return Err(Error::NotConverged(format!(
                "quadrature on [{a}, {b}] stalled at error {err:.3e}"
            )));
        }
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if (p.b - p.a).abs() < 1e-13 * m.abs().max(1.0) {
            return Err(Error::NotConverged(format!(
                "quadrature panel underflow near {m}"
            )));
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Panel {
            a: p.a,
            b: m,
            val: v1,
            err: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            val: v2,
            err: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running total
    let value = heap.iter().fold(C::new(0.0, 0.0), |s, p| s + p.val);
    let abs_err = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult {
        value,
        abs_err,
        panels: heap.len(),
    })
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` nodes.
pub fn composite_gl<F: FnMut(f64) -> C>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> C {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = C::new(0.0, 0.0);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (x, w) in xs.iter().zip(&ws) {
            acc += f(c + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

/// Cumulative ∫_{x_origin}^{x_j} f on a uniform grid, fourth order.
pub fn cumulative_from_origin(f: &[f64], dx: f64, origin: usize) -> Vec<f64> {
    let n = f.len();
    // ∫ over [x_j, x_{j+1}] with a cubic through four neighbouring samples
    let cell = |j: usize| -> f64 {
        if n < 4 {
            return 0.5 * dx * (f[j] + f[j + 1]);
        }
        if j == 0 {
            dx / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if j + 2 >= n {
            dx / 24.0 * (9.0 * f[j + 1] + 19.0 * f[j] - 5.0 * f[j - 1] + f[j - 2])
        } else {
            dx / 24.0 * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2])
        }
    };
    let mut out = vec![0.0; n];
    for j in origin..n.saturating_sub(1) {
        out[j + 1] = out[j] + cell(j);
    }
    for j in (1..=origin).rev() {
        out[j - 1] = out[j] - cell(j - 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let mut f = |x: f64| C::new(x.powi(20), 0.0);
        let (v, _) = gk15(&mut f, -1.0, 1.0);
        assert!((v.re - 2.0 / 21.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral() {
        // ∫₀^{50} e^{i x²} dx against a fine composite GL oracle.
        let r = integrate(
            |x| C::from_polar(1.0, x * x),
            0.0,
            50.0,
            1e-12,
            1e-12,
            Some(0.5),
        )
        .unwrap();
        let oracle = composite_gl(|x| C::from_polar(1.0, x * x), 0.0, 50.0, 20_000, 8);
        assert!((r.value - oracle).norm() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| C::new(x.powf(-0.5), 0.0), 0.0, 1.0, 1e-7, 1e-12, None).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-7);
    }

    #[test]
    fn reversed_limits() {
        let r = integrate(|x| C::new(x.cos(), 0.0), 2.0, 0.0, 1e-13, 1e-13, None).unwrap();
        assert!((r.value.re + 2f64.sin()).abs() < 1e-13);
    }
}
