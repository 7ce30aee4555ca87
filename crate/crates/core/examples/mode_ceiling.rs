//! Mode-wise growth ceiling |û(t,ξ)| ≤ t^{a²}(|û(1,ξ)| + |û(1,−ξ)|).

use filament_scatter::fit::geometric_ladder;
use filament_scatter::modes::{sample_pair, ModePair};
use filament_scatter::Params;
use num_complex::Complex64 as C;

fn main() -> filament_scatter::Result<()> {
    let times = geometric_ladder(1.0, 1e4, 2.0);
    for a in [0.25, 0.5, 1.0] {
        let params = Params::focusing(a, 1e4);
        let mut worst: f64 = 0.0;
        for k in -6..=2 {
            let xi = 2f64.powi(k);
            let p = ModePair::new(xi, C::new(0.6, -0.2), C::new(0.1, 0.5), 1.0);
            let h = sample_pair(&p, &times, &params, 1e-10)?;
            let start = p.u_plus.norm() + p.u_minus.norm();
            for &(t, up, _) in &h.samples[1..] {
                worst = worst.max(up.norm() / (t.powf(a * a) * start));
            }
        }
        println!("a = {a:<5} max over t > 1 of |û(t)| / ceiling = {worst:.4}");
    }
    Ok(())
}
