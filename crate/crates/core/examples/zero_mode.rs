//! The zero mode grows like ln t: ∫w(t) = ∫w(1) ± 2i a² ∫w(1)·ln t.
//!
//! Integrates the ξ = 0 pair ODE and compares with the closed-form law.

use filament_scatter::modes::{evolve_pair, zero_mode_law_u, ModePair};
use filament_scatter::Params;
use num_complex::Complex64 as C;

fn main() -> filament_scatter::Result<()> {
    let params = Params::focusing(1.0, 1e3);
    let u0 = C::new(1.0, 0.0);
    let mut p = ModePair::new(0.0, u0, u0, 1.0);
    println!("{:>8} {:>24} {:>24} {:>10}", "t", "ODE", "law", "error");
    for t in [2.0, 10.0, 100.0, 1000.0] {
        p = evolve_pair(&p, t, &params, 1e-12)?;
        let law = zero_mode_law_u(u0, 1.0, t, params.a, params.sign);
        println!(
            "{t:>8} {:>24.12} {:>24.12} {:>10.2e}",
            p.u_plus,
            law,
            (p.u_plus - law).norm()
        );
    }
    Ok(())
}
