//! Small-data nonlinear scattering: the free pullback e^{i(t−1)ξ²}û(t) settles.

use filament_scatter::fit::{geometric_ladder, rate_fit};
use filament_scatter::nlsolve::{
    evolve_nonlinear, gaussian, nonlinear_scattering_state, NlOptions,
};
use filament_scatter::{Grid, Params};

fn main() -> filament_scatter::Result<()> {
    let t_end = 200.0;
    let params = Params::focusing(0.5, t_end);
    let g = Grid::new(512.0, 2048)?;
    let u1 = gaussian(g, 0.02, 1.0);
    let taus = geometric_ladder(1.0, t_end, 2f64.sqrt());
    let opts = NlOptions {
        dt0: 5e-3,
        dt_max: 0.1,
        ..Default::default()
    };
    let run = evolve_nonlinear(&params, &u1, opts, t_end, &taus)?;
    let sc = nonlinear_scattering_state(&run, t_end)?;
    for (t, d) in &sc.increments {
        println!("t = {t:>8.2}  pullback increment {d:.3e}");
    }
    let fit = rate_fit(&sc.residuals, (1.0, t_end))?;
    println!(
        "‖f₊‖ = {:.6}; residual exponent {:.3}",
        sc.f_plus.l2_norm(),
        fit.exponent
    );
    Ok(())
}
