//! Conserved Q and the energy identity along a split-step run.

use filament_scatter::nlsolve::{evolve_nonlinear, gaussian, NlOptions};
use filament_scatter::{Grid, Params};

fn main() -> filament_scatter::Result<()> {
    let params = Params::focusing(1.0, 3.0);
    let g = Grid::new(40.0, 512)?;
    let u0 = gaussian(g, 0.03, 1.0);
    let opts = NlOptions {
        diag_every: 100,
        ..Default::default()
    };
    let run = evolve_nonlinear(&params, &u0, opts, 3.0, &[2.0, 3.0])?;
    println!("{:>6} {:>22} {:>22}", "t", "Q", "E");
    for d in &run.diagnostics {
        println!("{:>6.2} {:>22.15e} {:>22.15e}", d.t, d.q, d.e);
    }
    let (first, last) = (
        run.diagnostics.first().unwrap(),
        run.diagnostics.last().unwrap(),
    );
    println!(
        "Q drift per unit time: {:.2e}",
        (last.q - first.q).abs() / (last.t - first.t)
    );
    Ok(())
}
