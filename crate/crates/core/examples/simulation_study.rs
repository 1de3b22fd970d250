//! Full ellipse simulation study at the reference settings.
//!
//! ```text
//! cargo run --release --example simulation_study -- [seed] [out_dir]
//! ```
//!
//! Prints the comparison table and, when `out_dir` is given, writes the
//! table and figure data files there.

use std::path::PathBuf;
use std::time::Instant;

use coastal_kriging::simharness::{run_study, write_outputs, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let out = args.next().map(PathBuf::from);

    let cfg = SimConfig {
        seed,
        ..SimConfig::default()
    };
    let start = Instant::now();
    let result = run_study(&cfg)?;
    println!("seed {seed}, {:.1} s\n", start.elapsed().as_secs_f64());
    print!("{}", result.report.to_text());
    for m in &result.models {
        if let Some(acc) = m.draws.acceptance {
            println!("{} acceptance (sigma2, tau2, phi): {:.2} {:.2} {:.2}", m.spec.name, acc[0], acc[1], acc[2]);
        }
    }
    if let Some(dir) = out {
        write_outputs(&result, &dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
