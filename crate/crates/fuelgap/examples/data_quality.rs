//! Data-quality pass on the bundled fixture: ingest the long-format records,
//! report outlier counts at 2 and 3 standard deviations, and emit Q-Q and
//! descriptive summaries for the trimmed sample.

use fuelgap::data::{descriptive_stats, load_and_pair, qq_data, trim_outliers};
use std::path::Path;

fn main() -> fuelgap::Result<()> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/garage_records.csv");
    let (pairs, rejections) = load_and_pair(&fixture)?;
    println!(
        "ingested {} garages, {} rejected rows",
        pairs.len(),
        rejections.len()
    );

    let (trimmed, report) = trim_outliers(pairs, 3.0)?;
    println!(
        "outside 2 sd: ({}, {}); outside 3 sd: ({}, {}); removed {} garages ({} -> {})",
        report.outside_2sd.0,
        report.outside_2sd.1,
        report.outside_3sd.0,
        report.outside_3sd.1,
        report.removed_garages,
        report.n_before,
        report.n_after
    );

    let stats = descriptive_stats(&trimmed)?;
    println!(
        "\ntrimmed gaps: vehicle 1 mean {:.3} sd {:.3}, vehicle 2 mean {:.3} sd {:.3}",
        stats.vehicle1.gap.mean, stats.vehicle1.gap.sd, stats.vehicle2.gap.mean, stats.vehicle2.gap.sd
    );

    let gaps: Vec<f64> = trimmed.iter().map(|p| p.gap1).collect();
    let qq = qq_data(&gaps)?;
    println!("\nvehicle 1 Q-Q percentile markers (normal axis vs sample axis):");
    for (pct, normal, sample) in &qq.percentiles {
        println!("  {pct:>4.0}%: {normal:>7.4} vs {sample:>7.4}");
    }
    Ok(())
}
