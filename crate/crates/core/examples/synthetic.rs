//! Generate one of the built-in synthetic datasets and write it as CSV.
//!
//! ```text
//! cargo run -p ndswarm --example synthetic -- politicians 12 7 > politicians.csv
//! ```

use ndswarm::dataset::{generate_synthetic, write_csv, Archetype, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let archetype: Archetype = args.next().as_deref().unwrap_or("politicians").parse()?;
    let n_points = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let ds = generate_synthetic(&SyntheticSpec { archetype, n_points, seed })?;
    eprintln!("{} dimensions: {}", ds.dims(), ds.names().join(", "));
    write_csv(&ds, std::io::stdout().lock(), "label")?;
    Ok(())
}
