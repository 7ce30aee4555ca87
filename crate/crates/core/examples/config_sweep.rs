//! Drive the experiment harness from INI text: a sweep over the amplitude.
//! The linear equation is ℝ-linear, so the fitted exponent should not move.

use filament_scatter::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
experiment = sweep

[params]
a = 0.5
t_max = 1e4

[grid]
half_length = 40
n = 128

[data]
family = band
band = 0.25, 1
phase = 1.3

[check]
window = 100, 10000
min_exponent = 0.9

[ladder]
per_decade = 12

[sweep]
experiment = linear-scatter
key = data.amplitude
values = 0.1, 0.5, 1
";

fn main() -> filament_scatter::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG, None, Some(7))?;
    let report = run_experiment(&cfg, None)?;
    for c in &report.checks {
        println!(
            "{} {} = {:?}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.value
        );
    }
    println!("config hash {}", report.config_hash);
    Ok(())
}
