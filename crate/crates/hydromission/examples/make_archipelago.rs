//! Regenerates the bundled archipelago chart.
//!
//! ```text
//! cargo run -p hydromission --example make_archipelago -- [out.pgm] [seed]
//! ```

use std::path::PathBuf;

use hydromission::map::write_pgm;
use hydromission_core::env::synthetic_archipelago;
use hydromission_core::rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/archipelago.pgm"));
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(11);
    let map = synthetic_archipelago(500, 500, 9, &mut rng::seeded(seed));
    write_pgm(&out, &map.image)?;
    println!("{} ({:.1}% coast)", out.display(), 100.0 * map.coast_fraction());
    Ok(())
}
