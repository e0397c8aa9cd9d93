//! Ingestion of long-format vehicle records, garage pairing, outlier
//! trimming, and descriptive statistics.

use crate::error::{Error, Result};
use crate::estimate::{kendall_tau_pairs, pseudo_observations};
use crate::num::special::norm_quantile;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Model-year bins used throughout the descriptive and prediction reports.
pub const MODEL_YEAR_BINS: [(i32, i32); 6] = [
    (1984, 1988),
    (1989, 1993),
    (1994, 1998),
    (1999, 2003),
    (2004, 2008),
    (2009, 2014),
];

/// Index of the bin holding `year`; years outside the range clamp to the
/// nearest end bin.
pub fn model_year_bin(year: i32) -> usize {
    for (i, (lo, hi)) in MODEL_YEAR_BINS.iter().enumerate() {
        if year >= *lo && year <= *hi {
            return i;
        }
    }
    if year < MODEL_YEAR_BINS[0].0 {
        0
    } else {
        MODEL_YEAR_BINS.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FuelType {
    Diesel,
    Gasoline,
    Hybrid,
    Other,
}

impl FuelType {
    pub fn parse(s: &str) -> FuelType {
        match s.trim().to_ascii_lowercase().as_str() {
            "diesel" => FuelType::Diesel,
            "gasoline" | "gas" => FuelType::Gasoline,
            "hybrid" => FuelType::Hybrid,
            _ => FuelType::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FuelType::Diesel => "Diesel",
            FuelType::Gasoline => "Gasoline",
            FuelType::Hybrid => "Hybrid",
            FuelType::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transmission {
    Manual,
    Cvt,
    Automatic,
    Other,
}

impl Transmission {
    pub fn parse(s: &str) -> Transmission {
        match s.trim().to_ascii_lowercase().as_str() {
            "manual" => Transmission::Manual,
            "cvt" => Transmission::Cvt,
            "automatic" | "auto" => Transmission::Automatic,
            _ => Transmission::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Transmission::Manual => "Manual",
            Transmission::Cvt => "CVT",
            Transmission::Automatic => "Automatic",
            Transmission::Other => "Other",
        }
    }
}

/// One long-format row: a single vehicle in a garage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub garage_id: String,
    pub driver_id: String,
    pub reported_mpg: f64,
    pub epa_mpg: f64,
    pub model_year: i32,
    pub fuel_type: FuelType,
    pub transmission: Transmission,
    pub state: Option<String>,
}

/// A garage with exactly two vehicles; vehicle 1 is the older one (model-year
/// ties broken by driver id). The gap is reported over EPA rating.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaragePair {
    pub garage_id: String,
    pub vehicle1: VehicleRecord,
    pub vehicle2: VehicleRecord,
    pub gap1: f64,
    pub gap2: f64,
}

/// A rejected input row and the reason it was dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

fn order_vehicles(a: (VehicleRecord, usize), b: (VehicleRecord, usize)) -> (VehicleRecord, VehicleRecord) {
    let older_first = match a.0.model_year.cmp(&b.0.model_year) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.0.driver_id <= b.0.driver_id,
    };
    if older_first {
        (a.0, b.0)
    } else {
        (b.0, a.0)
    }
}

/// Group records into garages: keep exactly the garages with two rows and two
/// distinct driver ids, reject everything else with a reason. `lines` carries
/// the 1-based input line of each record for the rejection log.
pub fn pair_records(records: Vec<(VehicleRecord, usize)>) -> (Vec<GaragePair>, Vec<Rejection>) {
    let mut rejections = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut by_garage: BTreeMap<String, Vec<(VehicleRecord, usize)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (rec, line) in records {
        let dup_key = format!(
            "{}|{}|{}|{}|{}|{:?}|{:?}|{:?}",
            rec.garage_id,
            rec.driver_id,
            rec.reported_mpg.to_bits(),
            rec.epa_mpg.to_bits(),
            rec.model_year,
            rec.fuel_type,
            rec.transmission,
            rec.state
        );
        if !seen.insert(dup_key) {
            rejections.push(Rejection {
                line,
                reason: "duplicate-row".into(),
            });
            continue;
        }
        if rec.reported_mpg <= 0.0 || rec.epa_mpg <= 0.0 {
            rejections.push(Rejection {
                line,
                reason: "nonpositive-mpg".into(),
            });
            continue;
        }
        if !by_garage.contains_key(&rec.garage_id) {
            order.push(rec.garage_id.clone());
        }
        by_garage.entry(rec.garage_id.clone()).or_default().push((rec, line));
    }
    let mut pairs = Vec::new();
    for garage_id in order {
        let rows = by_garage.remove(&garage_id).unwrap();
        if rows.len() != 2 {
            for (_, line) in rows {
                rejections.push(Rejection {
                    line,
                    reason: "garage-size!=2".into(),
                });
            }
            continue;
        }
        let mut it = rows.into_iter();
        let a = it.next().unwrap();
        let b = it.next().unwrap();
        if a.0.driver_id == b.0.driver_id {
            for line in [a.1, b.1] {
                rejections.push(Rejection {
                    line,
                    reason: "duplicate-driver".into(),
                });
            }
            continue;
        }
        let (vehicle1, vehicle2) = order_vehicles(a, b);
        let gap1 = vehicle1.reported_mpg / vehicle1.epa_mpg;
        let gap2 = vehicle2.reported_mpg / vehicle2.epa_mpg;
        pairs.push(GaragePair {
            garage_id,
            vehicle1,
            vehicle2,
            gap1,
            gap2,
        });
    }
    rejections.sort_by_key(|r| r.line);
    (pairs, rejections)
}

/// Read a long-format CSV and pair it into garages.
///
/// Required header columns: `garage_id, driver_id, reported_mpg, epa_mpg,
/// model_year, fuel_type, transmission`; `state` is optional and extra
/// columns are ignored.
pub fn load_and_pair(path: &Path) -> Result<(Vec<GaragePair>, Vec<Rejection>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                line: 1,
                detail: format!("missing required column '{name}'"),
            })
    };
    let c_garage = col("garage_id")?;
    let c_driver = col("driver_id")?;
    let c_reported = col("reported_mpg")?;
    let c_epa = col("epa_mpg")?;
    let c_year = col("model_year")?;
    let c_fuel = col("fuel_type")?;
    let c_trans = col("transmission")?;
    let c_state = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("state"));

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.map_err(|e| Error::Parse {
            line,
            detail: e.to_string(),
        })?;
        let field = |idx: usize| -> Result<&str> {
            row.get(idx).ok_or_else(|| Error::Parse {
                line,
                detail: format!("missing field {idx}"),
            })
        };
        let num = |idx: usize| -> Result<f64> {
            field(idx)?.parse::<f64>().map_err(|e| Error::Parse {
                line,
                detail: format!("'{}': {e}", field(idx).unwrap_or("")),
            })
        };
        let year = field(c_year)?.parse::<i32>().map_err(|e| Error::Parse {
            line,
            detail: format!("model_year: {e}"),
        })?;
        records.push((
            VehicleRecord {
                garage_id: field(c_garage)?.to_string(),
                driver_id: field(c_driver)?.to_string(),
                reported_mpg: num(c_reported)?,
                epa_mpg: num(c_epa)?,
                model_year: year,
                fuel_type: FuelType::parse(field(c_fuel)?),
                transmission: Transmission::parse(field(c_trans)?),
                state: c_state
                    .and_then(|idx| row.get(idx))
                    .filter(|s| !s.is_empty())
                    .map(str::to_string),
            },
            line,
        ));
    }
    Ok(pair_records(records))
}

/// Outlier-trimming summary: counts outside the 2- and 3-standard-deviation
/// intervals of the untrimmed sample and the thresholds actually applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrimReport {
    pub n_before: usize,
    pub n_after: usize,
    pub outside_2sd: (usize, usize),
    pub outside_3sd: (usize, usize),
    pub removed_garages: usize,
    pub k: f64,
    pub mean: (f64, f64),
    pub sd: (f64, f64),
    pub bounds1: (f64, f64),
    pub bounds2: (f64, f64),
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Remove garages whose gap lies outside mean +- k*sd for either vehicle.
/// Thresholds come from the untrimmed sample in a single pass; counts outside
/// 2 and 3 standard deviations are reported regardless of `k`.
pub fn trim_outliers(pairs: Vec<GaragePair>, k: f64) -> Result<(Vec<GaragePair>, TrimReport)> {
    if k <= 0.0 {
        return Err(Error::Usage(format!("trim threshold k must be positive, got {k}")));
    }
    if pairs.len() < 2 {
        return Err(Error::InsufficientData("trimming needs at least 2 garages".into()));
    }
    let g1: Vec<f64> = pairs.iter().map(|p| p.gap1).collect();
    let g2: Vec<f64> = pairs.iter().map(|p| p.gap2).collect();
    let (m1, s1) = mean_sd(&g1);
    let (m2, s2) = mean_sd(&g2);
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::Degenerate("zero standard deviation in gaps".into()));
    }
    let outside = |x: f64, m: f64, s: f64, kk: f64| (x - m).abs() > kk * s;
    let count = |kk: f64| -> (usize, usize) {
        (
            g1.iter().filter(|&&x| outside(x, m1, s1, kk)).count(),
            g2.iter().filter(|&&x| outside(x, m2, s2, kk)).count(),
        )
    };
    let outside_2sd = count(2.0);
    let outside_3sd = count(3.0);
    let n_before = pairs.len();
    let kept: Vec<GaragePair> = pairs
        .into_iter()
        .filter(|p| !outside(p.gap1, m1, s1, k) && !outside(p.gap2, m2, s2, k))
        .collect();
    let n_after = kept.len();
    let report = TrimReport {
        n_before,
        n_after,
        outside_2sd,
        outside_3sd,
        removed_garages: n_before - n_after,
        k,
        mean: (m1, m2),
        sd: (s1, s2),
        bounds1: (m1 - k * s1, m1 + k * s1),
        bounds2: (m2 - k * s2, m2 + k * s2),
    };
    Ok((kept, report))
}

/// Per-vehicle numeric summaries plus categorical shares.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

fn column_stats(xs: &[f64]) -> ColumnStats {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    ColumnStats {
        mean,
        sd: var.sqrt(),
        min: xs.iter().cloned().fold(f64::INFINITY, f64::min),
        max: xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleStats {
    pub reported_mpg: ColumnStats,
    pub epa_mpg: ColumnStats,
    pub gap: ColumnStats,
    /// Shares over {Diesel, Gasoline, Hybrid, Other}.
    pub fuel_shares: Vec<(String, f64)>,
    /// Shares over {Manual, CVT, Automatic, Other}.
    pub transmission_shares: Vec<(String, f64)>,
    /// Shares over the six model-year bins.
    pub model_year_shares: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub vehicle1: VehicleStats,
    pub vehicle2: VehicleStats,
}

fn vehicle_stats<'a, I: Iterator<Item = &'a VehicleRecord> + Clone>(
    vehicles: I,
    gaps: &[f64],
) -> VehicleStats {
    let n = gaps.len() as f64;
    let reported: Vec<f64> = vehicles.clone().map(|v| v.reported_mpg).collect();
    let epa: Vec<f64> = vehicles.clone().map(|v| v.epa_mpg).collect();
    let share = |count: usize| count as f64 / n;
    let fuel_shares = [
        FuelType::Diesel,
        FuelType::Gasoline,
        FuelType::Hybrid,
        FuelType::Other,
    ]
    .iter()
    .map(|&f| {
        (
            f.label().to_string(),
            share(vehicles.clone().filter(|v| v.fuel_type == f).count()),
        )
    })
    .collect();
    let transmission_shares = [
        Transmission::Manual,
        Transmission::Cvt,
        Transmission::Automatic,
        Transmission::Other,
    ]
    .iter()
    .map(|&t| {
        (
            t.label().to_string(),
            share(vehicles.clone().filter(|v| v.transmission == t).count()),
        )
    })
    .collect();
    let model_year_shares = MODEL_YEAR_BINS
        .iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            (
                format!("{lo}-{hi}"),
                share(
                    vehicles
                        .clone()
                        .filter(|v| model_year_bin(v.model_year) == i)
                        .count(),
                ),
            )
        })
        .collect();
    VehicleStats {
        reported_mpg: column_stats(&reported),
        epa_mpg: column_stats(&epa),
        gap: column_stats(gaps),
        fuel_shares,
        transmission_shares,
        model_year_shares,
    }
}

pub fn descriptive_stats(pairs: &[GaragePair]) -> Result<DescriptiveStats> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no garages".into()));
    }
    let g1: Vec<f64> = pairs.iter().map(|p| p.gap1).collect();
    let g2: Vec<f64> = pairs.iter().map(|p| p.gap2).collect();
    Ok(DescriptiveStats {
        n: pairs.len(),
        vehicle1: vehicle_stats(pairs.iter().map(|p| &p.vehicle1), &g1),
        vehicle2: vehicle_stats(pairs.iter().map(|p| &p.vehicle2), &g2),
    })
}

/// Normal Q-Q data: the i-th point pairs mean + sd * Phi^{-1}((i-0.5)/n)
/// against the i-th order statistic, plus percentile markers on both axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QqData {
    /// (normal quantile scaled by sample mean/sd, sample order statistic)
    pub points: Vec<(f64, f64)>,
    /// (percent, normal-axis value, sample-axis value) at {5,10,25,50,75,90,95}
    pub percentiles: Vec<(f64, f64, f64)>,
    pub mean: f64,
    pub sd: f64,
}

pub fn qq_data(gaps: &[f64]) -> Result<QqData> {
    let n = gaps.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "Q-Q data needs n >= 10, got {n}"
        )));
    }
    let mut sorted = gaps.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mean, sd) = mean_sd(&sorted);
    let points = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = (i as f64 + 0.5) / n as f64;
            (mean + sd * norm_quantile(p), x)
        })
        .collect();
    let percentiles = [5.0, 10.0, 25.0, 50.0, 75.0, 90.0, 95.0]
        .iter()
        .map(|&pct| {
            let p = pct / 100.0;
            let pos = p * (n as f64 - 1.0);
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            let sample = sorted[lo] + frac * (sorted[(lo + 1).min(n - 1)] - sorted[lo]);
            (pct, mean + sd * norm_quantile(p), sample)
        })
        .collect();
    Ok(QqData {
        points,
        percentiles,
        mean,
        sd,
    })
}

/// Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("correlation needs n >= 2".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Degenerate("zero variance in correlation".into()));
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependenceSummary {
    pub pearson: f64,
    /// Pearson correlation of the rank-transformed (pseudo-observation) data.
    pub pearson_pseudo: f64,
    pub kendall: f64,
    pub n: usize,
}

/// Pearson on raw gaps, Pearson on pseudo-observations, and Kendall's tau.
pub fn dependence_summary(pairs: &[GaragePair]) -> Result<DependenceSummary> {
    let g1: Vec<f64> = pairs.iter().map(|p| p.gap1).collect();
    let g2: Vec<f64> = pairs.iter().map(|p| p.gap2).collect();
    let raw = pearson(&g1, &g2)?;
    let pseudo = pseudo_observations(&g1, &g2)?;
    let u: Vec<f64> = pseudo.pairs().iter().map(|p| p.u()).collect();
    let v: Vec<f64> = pseudo.pairs().iter().map(|p| p.v()).collect();
    Ok(DependenceSummary {
        pearson: raw,
        pearson_pseudo: pearson(&u, &v)?,
        kendall: kendall_tau_pairs(&g1, &g2),
        n: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(garage: &str, driver: &str, reported: f64, epa: f64, year: i32) -> VehicleRecord {
        VehicleRecord {
            garage_id: garage.to_string(),
            driver_id: driver.to_string(),
            reported_mpg: reported,
            epa_mpg: epa,
            model_year: year,
            fuel_type: FuelType::Gasoline,
            transmission: Transmission::Automatic,
            state: None,
        }
    }

    #[test]
    fn pairing_happy_path() {
        let records = vec![
            (record("g1", "a", 25.0, 24.0, 1999), 2),
            (record("g1", "b", 28.0, 26.0, 2004), 3),
            (record("g2", "c", 22.0, 25.0, 2001), 4),
            (record("g2", "d", 30.0, 28.0, 1995), 5),
        ];
        let (pairs, rejections) = pair_records(records);
        assert_eq!(pairs.len(), 2);
        assert!(rejections.is_empty());
        // ordering: vehicle 1 is older
        assert_eq!(pairs[1].vehicle1.model_year, 1995);
        assert_eq!(pairs[1].vehicle2.model_year, 2001);
        // gap arithmetic round trip
        for p in &pairs {
            assert!((p.gap1 * p.vehicle1.epa_mpg - p.vehicle1.reported_mpg).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_rejections() {
        let records = vec![
            (record("g1", "a", 25.0, 24.0, 1999), 2),
            (record("g1", "b", 28.0, 26.0, 2004), 3),
            (record("g1", "c", 21.0, 20.0, 2008), 4),
            (record("g2", "x", 25.0, 24.0, 1999), 5),
            (record("g3", "y", 25.0, 24.0, 1999), 6),
            (record("g3", "y", 26.0, 25.0, 2001), 7),
            (record("g4", "z", 25.0, 24.0, 1999), 8),
            (record("g4", "z", 25.0, 24.0, 1999), 9),
        ];
        let (pairs, rejections) = pair_records(records);
        assert!(pairs.is_empty());
        let reason_of = |line: usize| {
            rejections
                .iter()
                .find(|r| r.line == line)
                .map(|r| r.reason.clone())
                .unwrap_or_default()
        };
        assert_eq!(reason_of(2), "garage-size!=2");
        assert_eq!(reason_of(5), "garage-size!=2");
        assert_eq!(reason_of(6), "duplicate-driver");
        assert_eq!(reason_of(9), "duplicate-row");
        // g4 loses its duplicate row, leaving a single-row garage
        assert_eq!(reason_of(8), "garage-size!=2");
    }

    #[test]
    fn equal_model_years_tie_break() {
        let records = vec![
            (record("g1", "zz", 25.0, 24.0, 2000), 2),
            (record("g1", "aa", 28.0, 26.0, 2000), 3),
        ];
        let (pairs, _) = pair_records(records);
        assert_eq!(pairs[0].vehicle1.driver_id, "aa");
    }

    #[test]
    fn trim_all_identical_is_degenerate() {
        let pairs: Vec<GaragePair> = (0..20)
            .map(|i| {
                let v1 = record(&format!("g{i}"), "a", 24.0, 24.0, 1999);
                let v2 = record(&format!("g{i}"), "b", 26.0, 26.0, 2004);
                GaragePair {
                    garage_id: format!("g{i}"),
                    gap1: 1.0,
                    gap2: 1.0,
                    vehicle1: v1,
                    vehicle2: v2,
                }
            })
            .collect();
        assert!(matches!(
            trim_outliers(pairs, 3.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn trim_single_outlier() {
        let mut pairs: Vec<GaragePair> = (0..100)
            .map(|i| {
                let gap1 = 1.0 + 0.01 * ((i % 11) as f64 - 5.0);
                let gap2 = 1.0 + 0.008 * ((i % 13) as f64 - 6.0);
                GaragePair {
                    garage_id: format!("g{i}"),
                    vehicle1: record(&format!("g{i}"), "a", gap1 * 24.0, 24.0, 1999),
                    vehicle2: record(&format!("g{i}"), "b", gap2 * 26.0, 26.0, 2004),
                    gap1,
                    gap2,
                }
            })
            .collect();
        pairs[50].gap1 = 3.0; // far outside any reasonable band
        let (kept, report) = trim_outliers(pairs, 3.0).unwrap();
        assert_eq!(report.n_before, 100);
        assert_eq!(kept.len(), 99);
        assert_eq!(report.removed_garages, 1);
        assert_eq!(report.outside_3sd.0, 1);
    }

    #[test]
    fn trim_is_idempotent_at_recorded_thresholds() {
        let pairs: Vec<GaragePair> = (0..500)
            .map(|i| {
                let z = ((i * 193) % 401) as f64 / 401.0 - 0.5;
                let w = ((i * 389) % 353) as f64 / 353.0 - 0.5;
                let gap1 = 1.0 + 0.4 * z + if i == 7 { 1.5 } else { 0.0 };
                let gap2 = 1.0 + 0.35 * w + if i == 13 { -0.9 } else { 0.0 };
                GaragePair {
                    garage_id: format!("g{i}"),
                    vehicle1: record(&format!("g{i}"), "a", gap1 * 24.0, 24.0, 1999),
                    vehicle2: record(&format!("g{i}"), "b", gap2 * 26.0, 26.0, 2004),
                    gap1,
                    gap2,
                }
            })
            .collect();
        let (kept, report) = trim_outliers(pairs, 3.0).unwrap();
        assert!(report.removed_garages > 0);
        // applying the recorded bounds to the trimmed sample removes nothing
        let survivors = kept
            .iter()
            .filter(|p| {
                p.gap1 >= report.bounds1.0
                    && p.gap1 <= report.bounds1.1
                    && p.gap2 >= report.bounds2.0
                    && p.gap2 <= report.bounds2.1
            })
            .count();
        assert_eq!(survivors, kept.len());
    }

    #[test]
    fn qq_normal_sample_tracks_reference_line() {
        use crate::copula::{CopulaFamily, CopulaParams, FamilyKind};
        use crate::simulate::{apply_margins, sample_pairs, MarginModel};
        let fam = CopulaFamily::unrotated(FamilyKind::Gaussian);
        let unit = sample_pairs(fam, &CopulaParams::one(1e-9), 10_000, 61).unwrap();
        let m = MarginModel::new(1.0, 0.17, 1.0, 0.17).unwrap();
        let gaps: Vec<f64> = apply_margins(&unit, &m).iter().map(|g| g.0).collect();
        let qq = qq_data(&gaps).unwrap();
        let n = qq.points.len();
        // central 90% hugs the identity line for exactly normal data
        for (i, (nq, sq)) in qq.points.iter().enumerate() {
            let p = (i as f64 + 0.5) / n as f64;
            if (0.05..=0.95).contains(&p) {
                assert!((sq - nq).abs() < 0.02, "p={p:.3}: {sq} vs {nq}");
            }
        }
        // contaminate 1% of the sample upward: the 99.5th-percentile point
        // breaks away from the reference line
        let mut heavy = gaps.clone();
        for v in heavy.iter_mut().take(n / 100) {
            *v += 1.2;
        }
        let qq2 = qq_data(&heavy).unwrap();
        let (nq99, sq99) = qq2.points[(0.995 * n as f64) as usize];
        assert!(sq99 - nq99 > 0.2, "tail point {sq99} vs line {nq99}");
    }

    #[test]
    fn dependence_summary_on_simulated_t_data() {
        use crate::copula::{CopulaFamily, CopulaParams, FamilyKind};
        use crate::simulate::{apply_margins, sample_pairs, MarginModel};
        let fam = CopulaFamily::unrotated(FamilyKind::StudentT);
        let unit = sample_pairs(fam, &CopulaParams::elliptical(0.427, 5.325), 7126, 63).unwrap();
        let m = MarginModel::new(1.017, 0.17, 0.9986, 0.16).unwrap();
        let gaps = apply_margins(&unit, &m);
        let pairs: Vec<GaragePair> = gaps
            .iter()
            .enumerate()
            .map(|(i, &(gap1, gap2))| GaragePair {
                garage_id: format!("g{i}"),
                vehicle1: record(&format!("g{i}"), "a", gap1 * 24.0, 24.0, 1999),
                vehicle2: record(&format!("g{i}"), "b", gap2 * 26.0, 26.0, 2004),
                gap1,
                gap2,
            })
            .collect();
        let d = dependence_summary(&pairs).unwrap();
        assert!((d.pearson - 0.40).abs() < 0.03, "pearson {}", d.pearson);
        assert!((d.kendall - 0.28).abs() < 0.02, "kendall {}", d.kendall);
        // the rank-scale correlation lands close to, but not exactly on, the
        // raw-scale value
        assert!((d.pearson_pseudo - d.pearson).abs() < 0.05);
    }

    #[test]
    fn qq_data_shapes() {
        let gaps: Vec<f64> = (0..100).map(|i| 0.5 + 0.01 * i as f64).collect();
        let qq = qq_data(&gaps).unwrap();
        assert_eq!(qq.points.len(), 100);
        assert_eq!(qq.percentiles.len(), 7);
        // order statistics are sorted regardless of input permutation
        let mut shuffled = gaps.clone();
        shuffled.reverse();
        let qq2 = qq_data(&shuffled).unwrap();
        for (a, b) in qq.points.iter().zip(&qq2.points) {
            assert_eq!(a, b);
        }
        assert!(qq_data(&gaps[..5]).is_err());
    }

    #[test]
    fn dependence_summary_invariance() {
        let pairs: Vec<GaragePair> = (0..200)
            .map(|i| {
                let gap1 = 1.0 + 0.1 * ((i * 17 % 31) as f64 / 31.0 - 0.5);
                let gap2 = 1.0 + 0.1 * ((i * 13 % 37) as f64 / 37.0 - 0.5) + 0.3 * gap1;
                GaragePair {
                    garage_id: format!("g{i}"),
                    vehicle1: record(&format!("g{i}"), "a", gap1 * 24.0, 24.0, 1999),
                    vehicle2: record(&format!("g{i}"), "b", gap2 * 26.0, 26.0, 2004),
                    gap1,
                    gap2,
                }
            })
            .collect();
        let base = dependence_summary(&pairs).unwrap();
        // scaling one column leaves both statistics unchanged
        let scaled: Vec<GaragePair> = pairs
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.gap1 *= 10.0;
                q
            })
            .collect();
        let s = dependence_summary(&scaled).unwrap();
        assert!((s.pearson - base.pearson).abs() < 1e-12);
        assert_eq!(s.kendall, base.kendall);
        // comonotone case
        let mono: Vec<GaragePair> = (0..50)
            .map(|i| {
                let g = 0.8 + 0.01 * i as f64;
                GaragePair {
                    garage_id: format!("g{i}"),
                    vehicle1: record(&format!("g{i}"), "a", g * 24.0, 24.0, 1999),
                    vehicle2: record(&format!("g{i}"), "b", g * 26.0, 26.0, 2004),
                    gap1: g,
                    gap2: g,
                }
            })
            .collect();
        let m = dependence_summary(&mono).unwrap();
        assert!((m.pearson - 1.0).abs() < 1e-12);
        assert_eq!(m.kendall, 1.0);
    }

    #[test]
    fn descriptive_shares_sum_to_one() {
        let pairs: Vec<GaragePair> = (0..60)
            .map(|i| GaragePair {
                garage_id: format!("g{i}"),
                vehicle1: record(&format!("g{i}"), "a", 25.0 + i as f64, 24.0, 1985 + (i % 29)),
                vehicle2: record(&format!("g{i}"), "b", 26.0 + i as f64, 26.0, 1990 + (i % 24)),
                gap1: 1.0 + 0.001 * i as f64,
                gap2: 1.0 - 0.001 * i as f64,
            })
            .collect();
        let d = descriptive_stats(&pairs).unwrap();
        for stats in [&d.vehicle1, &d.vehicle2] {
            let fuel: f64 = stats.fuel_shares.iter().map(|(_, s)| s).sum();
            let trans: f64 = stats.transmission_shares.iter().map(|(_, s)| s).sum();
            let years: f64 = stats.model_year_shares.iter().map(|(_, s)| s).sum();
            assert!((fuel - 1.0).abs() < 1e-9);
            assert!((trans - 1.0).abs() < 1e-9);
            assert!((years - 1.0).abs() < 1e-9);
            assert!(stats.gap.min <= stats.gap.mean && stats.gap.mean <= stats.gap.max);
        }
    }
}
