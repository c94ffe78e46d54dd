//! Husimi phase-space density of sawtooth states, drawn as text.
//!
//! cargo run --release --example husimi

use recoupling::analysis::husimi_grid;
use recoupling::sawtooth::{exact_step, initial_state, SawtoothParams};

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() -> recoupling::Result<()> {
    let params = SawtoothParams::new(7, -0.5)?;
    let mut psi = initial_state(&params);
    let mut done = 0;
    for t in [0, 5, 20] {
        for _ in done..t {
            psi = exact_step(&psi, &params)?;
        }
        done = t;
        let g = husimi_grid(&psi, 64, 24)?;
        let max = g.values.iter().cloned().fold(0.0, f64::max);
        println!(
            "t = {t}, mass {:.4} (theta across, P from pi down to -pi)",
            g.mass()
        );
        for ip in (0..g.n_p).rev() {
            let row: String = (0..g.n_theta)
                .map(|it| {
                    SHADES[((g.value(it, ip) / max) * (SHADES.len() - 1) as f64).round() as usize]
                        as char
                })
                .collect();
            println!("|{row}|");
        }
        println!();
    }
    Ok(())
}
