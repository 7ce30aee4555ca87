use num_complex::Complex64 as C;

use crate::params::Sign;

/// ∫w(t) = ∫w(t0) ± 2i a² Re(∫w(t0)) ln(t/t0); also valid for t < t0
/// since Re ∫w is conserved by the linear flow.
pub fn zero_mode_law(w0: C, t0: f64, t: f64, a: f64, sign: Sign) -> C {
    w0 + C::new(0.0, sign.s() * 2.0 * a * a * w0.re * (t / t0).ln())
}

/// The same law for the u-variable, converting through w = u e^{±ia² ln t}.
pub fn zero_mode_law_u(u0: C, t0: f64, t: f64, a: f64, sign: Sign) -> C {
    let s = sign.s();
    let w0 = u0 * C::from_polar(1.0, s * a * a * t0.ln());
    zero_mode_law(w0, t0, t, a, sign) * C::from_polar(1.0, -s * a * a * t.ln())
}
