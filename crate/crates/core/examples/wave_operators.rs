//! Wave operators: build u(1) from an asymptotic state, then scatter it back.

use filament_scatter::fit::geometric_ladder;
use filament_scatter::linprop::{scattering_state, LinearRun};
use filament_scatter::nlsolve::gaussian;
use filament_scatter::waveops::{
    band_state, linear_wave_operator, nonlinear_wave_operator, relative_error, LinearWaveOpOptions,
    NonlinearWaveOpOptions,
};
use filament_scatter::{Grid, Params};

fn main() -> filament_scatter::Result<()> {
    let params = Params::focusing(0.5, 1e4);
    let g = Grid::new(12.0, 64)?;
    let up = band_state(&g, 0.5, 0.25, 1.0, 1.3);
    let op = linear_wave_operator(&up, &params, &LinearWaveOpOptions::default())?;
    let worst = op.traces.iter().map(|t| t.worst_ratio).fold(0.0, f64::max);
    let run = LinearRun::evolve(
        &params,
        &op.u1,
        &geometric_ladder(1.0, 1e4, 10.0),
        1e-10,
        &[],
    )?;
    let back = scattering_state(&run, 1e4)?;
    println!(
        "linear: Picard ratio {worst:.3}, round trip {:.2e}",
        relative_error(&back.u_plus, &up)?
    );

    let g = Grid::new(256.0, 1024)?;
    let f_plus = gaussian(g, 0.02, 1.0);
    let opts = NonlinearWaveOpOptions {
        t_infinity: 50.0,
        ..Default::default()
    };
    let nl = nonlinear_wave_operator(&f_plus, &params, &opts)?;
    for (k, (d, r)) in nl.diffs.iter().zip(&nl.ratios).enumerate() {
        println!("nonlinear sweep {k:>2}: diff {d:.3e} ratio {r:.3}");
    }
    println!(
        "‖u(1)‖ = {:.6}, tail bound {:.2e}",
        nl.u1().l2_norm(),
        nl.tail_bound
    );
    Ok(())
}
