//! Deterministic fixture builders for tests, examples, and the bundled CSV
//! files under `tests/fixtures/`. Regenerate the files with
//! `cargo run --example make_fixtures`.

use crate::copula::{CopulaFamily, FamilyKind, UnitPair};
use crate::data::{FuelType, GaragePair, Transmission, VehicleRecord};
use crate::error::Result;
use crate::simulate::{derive_seed, sample_pairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Observed-data cross-tabulation counts the golden test reproduces exactly:
/// rows are vehicle-1 gap categories, columns vehicle-2 categories.
pub const OBSERVED_CROSSTAB_COUNTS: [[u64; 4]; 4] = [
    [881, 483, 451, 271],
    [403, 410, 450, 313],
    [262, 361, 617, 539],
    [203, 207, 425, 850],
];

/// Gap value ranges per category, kept strictly inside the category bounds so
/// rounding can never move a fixture point across a boundary.
const CATEGORY_RANGES: [(f64, f64); 4] = [(1.12, 1.45), (1.01, 1.09), (0.91, 0.99), (0.55, 0.88)];

fn category_value(rng: &mut ChaCha8Rng, category: usize) -> f64 {
    let (lo, hi) = CATEGORY_RANGES[category];
    rng.gen_range(lo..hi)
}

/// 7126 gap pairs whose 4x4 cross-tabulation matches
/// [`OBSERVED_CROSSTAB_COUNTS`] cell for cell.
pub fn observed_crosstab_pairs() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_7ab5);
    let mut out = Vec::new();
    for (i, row) in OBSERVED_CROSSTAB_COUNTS.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            for _ in 0..count {
                out.push((category_value(&mut rng, i), category_value(&mut rng, j)));
            }
        }
    }
    // deterministic interleave so the file does not look block-sorted
    let mut order: Vec<usize> = (0..out.len()).collect();
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    order.into_iter().map(|k| out[k]).collect()
}

/// Wrap gap pairs into minimal garage records so they flow through the same
/// pairs-file schema the pipeline emits.
pub fn pairs_from_gaps(gaps: &[(f64, f64)]) -> Vec<GaragePair> {
    gaps.iter()
        .enumerate()
        .map(|(i, &(gap1, gap2))| {
            let garage_id = format!("g{:06}", i + 1);
            let epa1 = 24.0;
            let epa2 = 26.0;
            GaragePair {
                garage_id: garage_id.clone(),
                vehicle1: VehicleRecord {
                    garage_id: garage_id.clone(),
                    driver_id: format!("d{:06}a", i + 1),
                    reported_mpg: gap1 * epa1,
                    epa_mpg: epa1,
                    model_year: 1995 + (i % 10) as i32,
                    fuel_type: FuelType::Gasoline,
                    transmission: Transmission::Automatic,
                    state: None,
                },
                vehicle2: VehicleRecord {
                    garage_id,
                    driver_id: format!("d{:06}b", i + 1),
                    reported_mpg: gap2 * epa2,
                    epa_mpg: epa2,
                    model_year: 2005 + (i % 8) as i32,
                    fuel_type: FuelType::Gasoline,
                    transmission: Transmission::Automatic,
                    state: None,
                },
                gap1,
                gap2,
            }
        })
        .collect()
}

/// Counts the outlier fixture is calibrated to: per vehicle, observations
/// outside 2 and 3 standard deviations of the untrimmed gap columns, with 10
/// garages extreme in both columns (71 + 57 - 10 = 118 garages removed,
/// 7244 -> 7126).
pub struct OutlierCalibration {
    pub n_garages: usize,
    pub outside_2sd: (usize, usize),
    pub outside_3sd: (usize, usize),
    pub both_3sd: usize,
}

pub const OUTLIER_CALIBRATION: OutlierCalibration = OutlierCalibration {
    n_garages: 7244,
    outside_2sd: (263, 222),
    outside_3sd: (71, 57),
    both_3sd: 10,
};

const GAP_MEAN: (f64, f64) = (1.02, 1.00);
const GAP_SD: (f64, f64) = (0.17, 0.16);

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-15..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Correlated core z-scores truncated inside 1.9 sd (rejection sampling).
fn core_pair(rng: &mut ChaCha8Rng, rho: f64) -> (f64, f64) {
    let s = (1.0 - rho * rho).sqrt();
    loop {
        let z1 = standard_normal(rng);
        let z2 = rho * z1 + s * standard_normal(rng);
        if z1.abs() < 1.9 && z2.abs() < 1.9 {
            return (z1, z2);
        }
    }
}

fn band_value(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    sign * rng.gen_range(lo..hi)
}

/// Column z-scores engineered so that, after exact re-standardization, the
/// counts outside the 2- and 3-sd bands equal the calibration numbers.
fn calibrated_z_columns(cal: &OutlierCalibration, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = cal.n_garages;
    let band2 = (
        cal.outside_2sd.0 - cal.outside_3sd.0,
        cal.outside_2sd.1 - cal.outside_3sd.1,
    );
    let only1_3sd = cal.outside_3sd.0 - cal.both_3sd;
    let only2_3sd = cal.outside_3sd.1 - cal.both_3sd;
    let mut z1 = Vec::with_capacity(n);
    let mut z2 = Vec::with_capacity(n);
    // garages extreme in both columns
    for _ in 0..cal.both_3sd {
        z1.push(band_value(rng, 3.15, 3.85));
        z2.push(band_value(rng, 3.15, 3.85));
    }
    // extreme in exactly one column, the other drawn from the core
    for _ in 0..only1_3sd {
        z1.push(band_value(rng, 3.15, 3.85));
        z2.push(core_pair(rng, 0.42).1);
    }
    for _ in 0..only2_3sd {
        z1.push(core_pair(rng, 0.42).0);
        z2.push(band_value(rng, 3.15, 3.85));
    }
    // the 2-to-3 sd band, one column at a time
    for _ in 0..band2.0 {
        z1.push(band_value(rng, 2.12, 2.82));
        z2.push(core_pair(rng, 0.42).1);
    }
    for _ in 0..band2.1 {
        z1.push(core_pair(rng, 0.42).0);
        z2.push(band_value(rng, 2.12, 2.82));
    }
    let used = z1.len();
    for _ in used..n {
        let (a, b) = core_pair(rng, 0.42);
        z1.push(a);
        z2.push(b);
    }
    // exact standardization: counts depend on z-scores relative to the sample
    // mean/sd, so pin those to 0/1 per column
    for z in [&mut z1, &mut z2] {
        let m = z.iter().sum::<f64>() / n as f64;
        let sd = (z.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        for v in z.iter_mut() {
            *v = (*v - m) / sd;
        }
    }
    (z1, z2)
}

/// Long-format records for 7244 garages whose gap columns reproduce the
/// calibrated outlier counts under mean +- k*sd trimming.
pub fn outlier_records() -> Vec<VehicleRecord> {
    let cal = &OUTLIER_CALIBRATION;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7244_cafe);
    let (z1, z2) = calibrated_z_columns(cal, &mut rng);
    let mut order: Vec<usize> = (0..cal.n_garages).collect();
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    let mut records = Vec::with_capacity(2 * cal.n_garages);
    let states = ["TN", "CA", "TX", "NY", "WA", "FL", "OH", "MI"];
    for (g, &idx) in order.iter().enumerate() {
        let gap1 = GAP_MEAN.0 + GAP_SD.0 * z1[idx];
        let gap2 = GAP_MEAN.1 + GAP_SD.1 * z2[idx];
        let ya = rng.gen_range(1984..=2014);
        let yb = rng.gen_range(1984..=2014);
        let epa1 = (24.3f64.ln() + 0.22 * standard_normal(&mut rng)).exp();
        let epa2 = (26.4f64.ln() + 0.22 * standard_normal(&mut rng)).exp();
        let garage_id = format!("g{:06}", g + 1);
        let state = states[rng.gen_range(0..states.len())];
        records.push(VehicleRecord {
            garage_id: garage_id.clone(),
            driver_id: format!("d{:06}a", g + 1),
            reported_mpg: gap1 * epa1,
            epa_mpg: epa1,
            model_year: ya.min(yb),
            fuel_type: FuelType::Gasoline,
            transmission: Transmission::Automatic,
            state: Some(state.to_string()),
        });
        records.push(VehicleRecord {
            garage_id,
            driver_id: format!("d{:06}b", g + 1),
            reported_mpg: gap2 * epa2,
            epa_mpg: epa2,
            model_year: ya.max(yb),
            fuel_type: FuelType::Gasoline,
            transmission: Transmission::Automatic,
            state: Some(state.to_string()),
        });
    }
    records
}

/// A pseudo-sample simulated from a named family, shared by several tests.
pub fn simulated_unit_pairs(
    kind: FamilyKind,
    theta: f64,
    delta: Option<f64>,
    nu: Option<f64>,
    n: usize,
    seed: u64,
) -> Result<Vec<UnitPair>> {
    let family = CopulaFamily::unrotated(kind);
    let params = crate::copula::CopulaParams {
        theta,
        delta,
        nu,
    };
    sample_pairs(family, &params, n, derive_seed(seed, 0xf1c5))
}
