//! Corner angle of the self-similar profile G_a.
//!
//! Prints the measured sin(θ/2) next to e^{−a²/2} and e^{−πa²/2}.

use filament_scatter::geometry::{selfsimilar_profile, tangent_limits};

fn main() -> filament_scatter::Result<()> {
    println!(
        "{:>5} {:>10} {:>12} {:>12}",
        "a", "sin(θ/2)", "e^{-a²/2}", "e^{-πa²/2}"
    );
    for a in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let lim = tangent_limits(&selfsimilar_profile(a, 500.0, 0.05)?)?;
        println!(
            "{a:>5} {:>10.6} {:>12.6} {:>12.6}",
            lim.sin_half, lim.sin_half_printed, lim.sin_half_classical
        );
    }
    Ok(())
}
