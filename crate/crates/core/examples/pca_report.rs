//! Principal components of the red-wine table, as printed by the
//! `pca-report` subcommand: loadings per component plus explained variance.

use std::path::PathBuf;

use ndswarm::assignment::AssignmentSpec;
use ndswarm::dataset::load_csv;
use ndswarm::projection::{pca_report, PcaReportOptions, PcaScaling, PcaScope};
use ndswarm::{DimensionAssignment, LoadOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let ds = load_csv(data.join("winequality-red.csv"), &LoadOptions::default())?;

    // Every dimension except quality is anonymous, so the report covers the
    // eleven physico-chemical measurements.
    let mut spec = AssignmentSpec::new();
    for name in ds.names() {
        spec = if name == "quality" { spec.skipped(name) } else { spec.anonymous(name) };
    }
    let asgn = DimensionAssignment::from_spec(&spec, ds.names())?;

    for scaling in [PcaScaling::Standardized, PcaScaling::Centered] {
        let report = pca_report(&ds, &asgn, PcaReportOptions { scope: PcaScope::Anonymous, scaling })?;
        println!("{scaling:?} scaling");
        print!("{:<22}", "");
        for k in 0..3 {
            print!(" {:>8}", format!("PC{}", k + 1));
        }
        println!();
        for (col, name) in report.names.iter().enumerate() {
            print!("{name:<22}");
            for row in report.loadings.iter().take(3) {
                print!(" {:>8.3}", row[col]);
            }
            println!();
        }
        let shown: Vec<String> = report.explained_variance.iter().take(3).map(|v| format!("{:.1}%", v * 100.0)).collect();
        println!("explained variance: {}\n", shown.join(", "));
    }
    Ok(())
}
