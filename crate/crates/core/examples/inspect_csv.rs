//! Load a CSV table and print per-dimension statistics.
//!
//! ```text
//! cargo run -p ndswarm --example inspect_csv [path.csv] [label_column]
//! ```

use std::path::PathBuf;

use ndswarm::dataset::{load_csv, summarize};
use ndswarm::LoadOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/winequality-red.csv"));
    let mut options = LoadOptions::default();
    if let Some(label) = args.next() {
        options = options.with_label_column(label);
    }

    let ds = load_csv(&path, &options)?;
    println!("{}: {} dimensions, {} points", path.display(), ds.dims(), ds.len());
    println!("{:<24} {:>10} {:>10} {:>10} {:>10} {:>8}", "dimension", "min", "max", "mean", "std", "distinct");
    for s in summarize(&ds) {
        println!(
            "{:<24} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>8}",
            s.name, s.min, s.max, s.mean, s.std_dev, s.distinct
        );
    }
    Ok(())
}
