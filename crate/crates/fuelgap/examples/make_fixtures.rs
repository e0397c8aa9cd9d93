//! Regenerates the bundled CSV fixtures under `tests/fixtures/`.
//!
//! Both files are fully deterministic:
//!   - `garage_records.csv`: 7244 garages in long format whose gap columns
//!     carry a calibrated outlier structure (263/222 outside 2 sd, 71/57
//!     outside 3 sd, 118 garages removed by the 3-sd rule).
//!   - `observed_pairs.csv`: 7126 garage pairs whose 4x4 gap-category
//!     cross-tabulation matches the reference table cell for cell.
//!
//! Run with: `cargo run --release --example make_fixtures`

use fuelgap::fixtures::{observed_crosstab_pairs, outlier_records, pairs_from_gaps};
use std::fmt::Write as _;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir).expect("create fixtures dir");

    let records = outlier_records();
    let mut body = String::with_capacity(records.len() * 64);
    body.push_str("garage_id,driver_id,reported_mpg,epa_mpg,model_year,fuel_type,transmission,state\n");
    for r in &records {
        writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            r.garage_id,
            r.driver_id,
            r.reported_mpg,
            r.epa_mpg,
            r.model_year,
            r.fuel_type.label(),
            r.transmission.label(),
            r.state.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    std::fs::write(dir.join("garage_records.csv"), body).expect("write garage_records.csv");
    println!("wrote garage_records.csv ({} records)", records.len());

    let pairs = pairs_from_gaps(&observed_crosstab_pairs());
    let mut body = String::with_capacity(pairs.len() * 96);
    body.push_str("garage_id,driver_id1,driver_id2,model_year1,model_year2,fuel_type1,fuel_type2,transmission1,transmission2,reported_mpg1,epa_mpg1,reported_mpg2,epa_mpg2,state1,state2,gap1,gap2\n");
    for p in &pairs {
        writeln!(
            body,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},,,{},{}",
            p.garage_id,
            p.vehicle1.driver_id,
            p.vehicle2.driver_id,
            p.vehicle1.model_year,
            p.vehicle2.model_year,
            p.vehicle1.fuel_type.label(),
            p.vehicle2.fuel_type.label(),
            p.vehicle1.transmission.label(),
            p.vehicle2.transmission.label(),
            p.vehicle1.reported_mpg,
            p.vehicle1.epa_mpg,
            p.vehicle2.reported_mpg,
            p.vehicle2.epa_mpg,
            p.gap1,
            p.gap2
        )
        .unwrap();
    }
    std::fs::write(dir.join("observed_pairs.csv"), body).expect("write observed_pairs.csv");
    println!("wrote observed_pairs.csv ({} pairs)", pairs.len());
}
