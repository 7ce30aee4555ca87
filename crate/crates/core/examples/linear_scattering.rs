//! Linear scattering: band data approaches a free wave at rate 1/t.

use filament_scatter::fit::geometric_ladder;
use filament_scatter::linprop::{probe_ladder, residual_rate, scattering_state, LinearRun};
use filament_scatter::waveops::band_state;
use filament_scatter::{Grid, Params};

fn main() -> filament_scatter::Result<()> {
    let params = Params::focusing(0.5, 1e4);
    let g = Grid::new(40.0, 128)?;
    let u1 = band_state(&g, 0.5, 0.25, 1.0, 1.3);
    let times = geometric_ladder(1.0, 1e4, 10f64.powf(1.0 / 6.0));
    let run = LinearRun::evolve(&params, &u1, &times, 1e-10, &probe_ladder(&g))?;
    let state = scattering_state(&run, 1e4)?;
    let fit = residual_rate(&run, &state.u_plus, (100.0, 1e4))?;
    println!(
        "‖u₊‖ = {:.6}, ‖u(1)‖ = {:.6}",
        state.u_plus.l2_norm(),
        u1.l2_norm()
    );
    println!(
        "residual ∝ t^-{:.3} (±{:.3}, R² = {:.4})",
        fit.exponent, fit.ci95, fit.r_squared
    );
    Ok(())
}
