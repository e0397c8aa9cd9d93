//! Pipeline command-line interface.
//!
//! Subcommands mirror the analysis stages: `generate`, `ingest`, `trim`,
//! `describe`, `fit`, `select`, `gof`, `simulate`, `crosstab`, and `report`
//! (the whole chain). Every stochastic stage derives its randomness from the
//! root `--seed` through a per-stage stream, so `report` writes byte-identical
//! artifacts to the standalone stages run in sequence.
//!
//! Tables go to CSV (six significant digits; crosstab percentages at two
//! decimals), nested reports to JSON at full precision. All errors print to
//! stderr with a `code=` prefix; exit status is 2 for usage errors and 1 for
//! data or convergence errors.

use crate::copula::{CopulaFamily, CopulaParams, FamilyKind};
use crate::data::{
    dependence_summary, descriptive_stats, load_and_pair, qq_data, trim_outliers, GaragePair,
    Rejection, TrimReport,
};
use crate::error::{Error, Result};
use crate::estimate::{fit_mle, pseudo_observations, FitResult, PseudoSample};
use crate::select::{
    default_v_grid, fit_all_and_rank, lambda_boundaries, lambda_empirical, lambda_theoretical,
    SelectionReport,
};
use crate::simulate::{
    apply_margins, crosstab, derive_seed, generate_synthetic_dataset, prediction_report,
    sample_pairs, CrossTab, MarginModel, ObservedGaps, Pairing, SyntheticConfig,
    GAP_CATEGORY_LABELS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

// per-stage seed stream tags
const TAG_GENERATE: u64 = 0x01;
const TAG_GOF: u64 = 0x03;
const TAG_SIMULATE: u64 = 0x04;
const TAG_CROSSTAB: u64 = 0x05;

#[derive(Parser, Debug)]
#[command(
    name = "fuelgap",
    version,
    about = "Copula modeling of within-garage fuel economy gaps",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Directory artifacts are written into.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Root seed; stochastic stages derive independent streams from it.
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Table output format (nested reports are always JSON).
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of garages (two records each).
    #[arg(long, default_value_t = 7126)]
    n: usize,
    /// Copula family for the dependence between the two gaps.
    #[arg(long, default_value = "student-t")]
    family: String,
    #[arg(long, default_value_t = 0.427)]
    theta: f64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 1.02)]
    mean1: f64,
    #[arg(long, default_value_t = 0.17)]
    sd1: f64,
    #[arg(long, default_value_t = 1.00)]
    mean2: f64,
    #[arg(long, default_value_t = 0.16)]
    sd2: f64,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input file (long-format records for ingest/report, pairs otherwise).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct TrimArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Outlier threshold in standard deviations.
    #[arg(long, default_value_t = 3.0)]
    trim_k: f64,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Copula family slug, e.g. `student-t`, `survival-clayton`, `bb1`.
    #[arg(long)]
    family: String,
}

#[derive(Args, Debug)]
struct GofArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Family slug or `best` (BIC winner across the catalog).
    #[arg(long, default_value = "best")]
    family: String,
    /// Simulation size for families without a closed-form lambda.
    #[arg(long, default_value_t = 1000)]
    lambda_n: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Family slug or `best`.
    #[arg(long, default_value = "best")]
    family: String,
    /// Number of simulated pairs (defaults to the observed count).
    #[arg(long)]
    n: Option<usize>,
    /// Observed-vs-simulated matching for MAD/RMSE.
    #[arg(long, default_value = "sorted")]
    pairing: String,
}

#[derive(Args, Debug)]
struct CrosstabArgs {
    #[command(flatten)]
    io: InputArgs,
    /// `observed` cross-tabulates the input pairs; `simulated` fits the chosen
    /// family, simulates the same number of garages, and tabulates that.
    #[arg(long, default_value = "observed")]
    source: String,
    #[arg(long, default_value = "best")]
    family: String,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value_t = 3.0)]
    trim_k: f64,
    #[arg(long, default_value = "sorted")]
    pairing: String,
    #[arg(long, default_value_t = 1000)]
    lambda_n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a synthetic long-format dataset with known copula dependence.
    Generate(GenerateArgs),
    /// Pair long-format records into two-vehicle garages.
    Ingest(InputArgs),
    /// Remove outlier garages by the mean +- k*sd rule.
    Trim(TrimArgs),
    /// Descriptive statistics, Q-Q data, and dependence summary.
    Describe(InputArgs),
    /// Fit one copula family by maximum likelihood.
    Fit(FitArgs),
    /// Fit all 21 families and rank by information criteria.
    Select(InputArgs),
    /// Lambda-function goodness-of-fit curves.
    Gof(GofArgs),
    /// Simulate gap pairs from a fitted copula and compare distributions.
    Simulate(SimulateArgs),
    /// Four-category cross-tabulation of gap pairs.
    Crosstab(CrosstabArgs),
    /// Run the whole chain: ingest, trim, describe, select, gof, simulate,
    /// crosstab (observed and simulated).
    Report(ReportArgs),
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success status
            if e.use_stderr() {
                eprintln!("code=usage {e}");
                return 2;
            }
            let _ = e.print();
            return 0;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("code={} {e}", e.code());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Ingest(args) => {
            let (pairs, rejections) = load_and_pair(&args.input)?;
            write_ingest_outputs(&args.common, &pairs, &rejections)
        }
        Command::Trim(args) => {
            let pairs = read_pairs(&args.io.input)?;
            let (kept, report) = trim_outliers(pairs, args.trim_k)?;
            write_trim_outputs(&args.io.common, &kept, &report)
        }
        Command::Describe(args) => {
            let pairs = read_pairs(&args.input)?;
            write_describe_outputs(&args.common, &pairs)
        }
        Command::Fit(args) => {
            let pairs = read_pairs(&args.io.input)?;
            let family = CopulaFamily::parse_slug(&args.family)?;
            let sample = sample_from_pairs(&pairs)?;
            let fit = fit_mle(family, &sample)?;
            write_fit_outputs(&args.io.common, &fit)
        }
        Command::Select(args) => {
            let pairs = read_pairs(&args.input)?;
            let sample = sample_from_pairs(&pairs)?;
            let report = fit_all_and_rank(&sample)?;
            write_select_outputs(&args.common, &report)
        }
        Command::Gof(args) => {
            let pairs = read_pairs(&args.io.input)?;
            cmd_gof(&args, &pairs)
        }
        Command::Simulate(args) => {
            let pairs = read_pairs(&args.io.input)?;
            cmd_simulate(&args, &pairs)
        }
        Command::Crosstab(args) => {
            let pairs = read_pairs(&args.io.input)?;
            cmd_crosstab(&args, &pairs)
        }
        Command::Report(args) => cmd_report(&args),
    }
}

// ---------- formatting helpers ----------

/// Render with six significant digits, plain notation.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude >= 6 {
        let scale = 10f64.powi(magnitude - 5);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let decimals = (5 - magnitude).clamp(0, 12) as usize;
    let rendered = format!("{x:.decimals$}");
    // strip trailing zeros but keep at least one digit after a bare point
    if rendered.contains('.') {
        rendered
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        rendered
    }
}

fn fmt_pct(x: f64) -> String {
    format!("{x:.2}")
}

fn out_path(common: &CommonArgs, name: &str) -> PathBuf {
    common.output_dir.join(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    write_file(path, &body)
}

/// A simple table: header plus rows, written as CSV or a JSON array of
/// objects depending on `--format`.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push<S: Into<String>>(&mut self, row: Vec<S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, common: &CommonArgs, stem: &str, comment: Option<String>) -> Result<()> {
        match common.format {
            TableFormat::Csv => {
                let mut body = String::new();
                if let Some(c) = comment {
                    body.push_str(&format!("# {c}\n"));
                }
                body.push_str(&self.header.join(","));
                body.push('\n');
                for row in &self.rows {
                    body.push_str(&row.join(","));
                    body.push('\n');
                }
                write_file(&out_path(common, &format!("{stem}.csv")), &body)
            }
            TableFormat::Json => {
                let objects: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                            .collect::<serde_json::Map<_, _>>()
                            .into()
                    })
                    .collect();
                write_json(&out_path(common, &format!("{stem}.json")), &objects)
            }
        }
    }
}

// ---------- pairs file I/O ----------

const PAIRS_HEADER: &str = "garage_id,driver_id1,driver_id2,model_year1,model_year2,fuel_type1,fuel_type2,transmission1,transmission2,reported_mpg1,epa_mpg1,reported_mpg2,epa_mpg2,state1,state2,gap1,gap2";

fn write_pairs(path: &Path, pairs: &[GaragePair]) -> Result<()> {
    let mut body = String::with_capacity(pairs.len() * 96);
    body.push_str(PAIRS_HEADER);
    body.push('\n');
    for p in pairs {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
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
            p.vehicle1.state.as_deref().unwrap_or(""),
            p.vehicle2.state.as_deref().unwrap_or(""),
            p.gap1,
            p.gap2,
        ));
    }
    write_file(path, &body)
}

/// Read a pairs file written by `ingest`/`trim`.
pub fn read_pairs(path: &Path) -> Result<Vec<GaragePair>> {
    use crate::data::{FuelType, Transmission, VehicleRecord};
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                line: 1,
                detail: format!("pairs file missing column '{name}'"),
            })
    };
    let idx: Vec<usize> = PAIRS_HEADER
        .split(',')
        .map(col)
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            detail: e.to_string(),
        })?;
        let s = |k: usize| row.get(idx[k]).unwrap_or("").to_string();
        let f = |k: usize| -> Result<f64> {
            row.get(idx[k])
                .unwrap_or("")
                .parse()
                .map_err(|e| Error::Parse {
                    line,
                    detail: format!("{}: {e}", PAIRS_HEADER.split(',').nth(k).unwrap()),
                })
        };
        let year = |k: usize| -> Result<i32> {
            row.get(idx[k])
                .unwrap_or("")
                .parse()
                .map_err(|e| Error::Parse {
                    line,
                    detail: format!("model_year: {e}"),
                })
        };
        let opt = |k: usize| {
            let v = s(k);
            (!v.is_empty()).then_some(v)
        };
        let vehicle1 = VehicleRecord {
            garage_id: s(0),
            driver_id: s(1),
            reported_mpg: f(9)?,
            epa_mpg: f(10)?,
            model_year: year(3)?,
            fuel_type: FuelType::parse(&s(5)),
            transmission: Transmission::parse(&s(7)),
            state: opt(13),
        };
        let vehicle2 = VehicleRecord {
            garage_id: s(0),
            driver_id: s(2),
            reported_mpg: f(11)?,
            epa_mpg: f(12)?,
            model_year: year(4)?,
            fuel_type: FuelType::parse(&s(6)),
            transmission: Transmission::parse(&s(8)),
            state: opt(14),
        };
        out.push(GaragePair {
            garage_id: s(0),
            gap1: f(15)?,
            gap2: f(16)?,
            vehicle1,
            vehicle2,
        });
    }
    Ok(out)
}

fn sample_from_pairs(pairs: &[GaragePair]) -> Result<PseudoSample> {
    let g1: Vec<f64> = pairs.iter().map(|p| p.gap1).collect();
    let g2: Vec<f64> = pairs.iter().map(|p| p.gap2).collect();
    pseudo_observations(&g1, &g2)
}

fn margins_from_pairs(pairs: &[GaragePair]) -> Result<MarginModel> {
    let g1: Vec<f64> = pairs.iter().map(|p| p.gap1).collect();
    let g2: Vec<f64> = pairs.iter().map(|p| p.gap2).collect();
    MarginModel::estimate(&g1, &g2)
}

// ---------- subcommand bodies ----------

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let family = CopulaFamily::parse_slug(&args.family)?;
    let mut params = CopulaParams {
        theta: args.theta,
        delta: args.delta,
        nu: args.nu,
    };
    if family.kind() == FamilyKind::StudentT && params.nu.is_none() {
        params.nu = Some(5.325);
    }
    let margins = MarginModel::new(args.mean1, args.sd1, args.mean2, args.sd2)?;
    let config = SyntheticConfig::new(family, params, margins);
    let seed = derive_seed(args.common.seed, TAG_GENERATE);
    let records = generate_synthetic_dataset(args.n, seed, &config)?;
    let mut body = String::with_capacity(records.len() * 64);
    body.push_str(&format!("# seed={} family={}\n", args.common.seed, family.slug()));
    body.push_str("garage_id,driver_id,reported_mpg,epa_mpg,model_year,fuel_type,transmission,state\n");
    for r in &records {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.garage_id,
            r.driver_id,
            r.reported_mpg,
            r.epa_mpg,
            r.model_year,
            r.fuel_type.label(),
            r.transmission.label(),
            r.state.as_deref().unwrap_or("")
        ));
    }
    write_file(&out_path(&args.common, "records.csv"), &body)?;
    #[derive(Serialize)]
    struct Meta<'a> {
        seed: u64,
        n_garages: usize,
        family: String,
        params: &'a CopulaParams,
        margins: &'a MarginModel,
    }
    write_json(
        &out_path(&args.common, "generate_meta.json"),
        &Meta {
            seed: args.common.seed,
            n_garages: args.n,
            family: family.slug(),
            params: &params,
            margins: &margins,
        },
    )
}

fn write_ingest_outputs(
    common: &CommonArgs,
    pairs: &[GaragePair],
    rejections: &[Rejection],
) -> Result<()> {
    write_pairs(&out_path(common, "pairs.csv"), pairs)?;
    let mut t = Table::new(vec!["line", "reason"]);
    for r in rejections {
        t.push(vec![r.line.to_string(), r.reason.clone()]);
    }
    t.write(common, "rejections", None)?;
    Ok(())
}

fn write_trim_outputs(
    common: &CommonArgs,
    kept: &[GaragePair],
    report: &TrimReport,
) -> Result<()> {
    write_pairs(&out_path(common, "trimmed_pairs.csv"), kept)?;
    write_json(&out_path(common, "trim_report.json"), report)?;
    let mut t = Table::new(vec!["metric", "vehicle1", "vehicle2"]);
    t.push(vec![
        "outside_2sd".to_string(),
        report.outside_2sd.0.to_string(),
        report.outside_2sd.1.to_string(),
    ]);
    t.push(vec![
        "outside_3sd".to_string(),
        report.outside_3sd.0.to_string(),
        report.outside_3sd.1.to_string(),
    ]);
    t.push(vec![
        "mean".to_string(),
        fmt_sig(report.mean.0),
        fmt_sig(report.mean.1),
    ]);
    t.push(vec![
        "sd".to_string(),
        fmt_sig(report.sd.0),
        fmt_sig(report.sd.1),
    ]);
    t.push(vec![
        "n_before/after".to_string(),
        report.n_before.to_string(),
        report.n_after.to_string(),
    ]);
    t.write(common, "trim_report", None)
}

fn write_describe_outputs(common: &CommonArgs, pairs: &[GaragePair]) -> Result<()> {
    let stats = descriptive_stats(pairs)?;
    write_json(&out_path(common, "descriptive.json"), &stats)?;
    let mut t = Table::new(vec!["block", "item", "vehicle1", "vehicle2"]);
    type Pick = fn(&crate::data::VehicleStats) -> &crate::data::ColumnStats;
    let num_rows: [(&str, Pick); 3] = [
        ("reported_mpg", |v| &v.reported_mpg),
        ("epa_mpg", |v| &v.epa_mpg),
        ("gap", |v| &v.gap),
    ];
    for (name, pick) in num_rows {
        let a = pick(&stats.vehicle1);
        let b = pick(&stats.vehicle2);
        for (item, va, vb) in [
            ("mean", a.mean, b.mean),
            ("sd", a.sd, b.sd),
            ("min", a.min, b.min),
            ("max", a.max, b.max),
        ] {
            t.push(vec![
                name.to_string(),
                item.to_string(),
                fmt_sig(va),
                fmt_sig(vb),
            ]);
        }
    }
    for (block, shares1, shares2) in [
        ("fuel_type", &stats.vehicle1.fuel_shares, &stats.vehicle2.fuel_shares),
        (
            "transmission",
            &stats.vehicle1.transmission_shares,
            &stats.vehicle2.transmission_shares,
        ),
        (
            "model_year",
            &stats.vehicle1.model_year_shares,
            &stats.vehicle2.model_year_shares,
        ),
    ] {
        for ((label, s1), (_, s2)) in shares1.iter().zip(shares2) {
            t.push(vec![
                block.to_string(),
                label.clone(),
                fmt_sig(*s1),
                fmt_sig(*s2),
            ]);
        }
    }
    t.write(common, "descriptive", None)?;

    for (name, gaps) in [
        ("qq_vehicle1", pairs.iter().map(|p| p.gap1).collect::<Vec<_>>()),
        ("qq_vehicle2", pairs.iter().map(|p| p.gap2).collect::<Vec<_>>()),
    ] {
        let qq = qq_data(&gaps)?;
        let mut t = Table::new(vec!["normal_quantile", "sample_quantile"]);
        for (nq, sq) in &qq.points {
            t.push(vec![fmt_sig(*nq), fmt_sig(*sq)]);
        }
        t.write(common, name, None)?;
        let mut m = Table::new(vec!["percent", "normal_axis", "sample_axis"]);
        for (p, na, sa) in &qq.percentiles {
            m.push(vec![fmt_sig(*p), fmt_sig(*na), fmt_sig(*sa)]);
        }
        m.write(common, &format!("{name}_percentiles"), None)?;
    }
    let dep = dependence_summary(pairs)?;
    write_json(&out_path(common, "dependence.json"), &dep)
}

fn fit_table_row(fit: &FitResult) -> Vec<String> {
    let (d_lo, d_hi) = if fit.ci.len() > 1 {
        (fmt_sig(fit.ci[1].0), fmt_sig(fit.ci[1].1))
    } else {
        (String::new(), String::new())
    };
    let second = fit
        .params
        .delta
        .or(fit.params.nu)
        .map(fmt_sig)
        .unwrap_or_default();
    vec![
        fit.family.slug(),
        fit.family.to_string(),
        fmt_sig(fit.params.theta),
        fmt_sig(fit.ci[0].0),
        fmt_sig(fit.ci[0].1),
        second,
        d_lo,
        d_hi,
        fmt_sig(fit.tau),
        fmt_sig(fit.tails.lower),
        fmt_sig(fit.tails.upper),
        fmt_sig(fit.loglik),
        fmt_sig(fit.aic),
        fmt_sig(fit.bic),
        fit.converged.to_string(),
    ]
}

const FIT_HEADER: [&str; 15] = [
    "family",
    "label",
    "theta",
    "theta_lo",
    "theta_hi",
    "second",
    "second_lo",
    "second_hi",
    "tau",
    "tail_lower",
    "tail_upper",
    "loglik",
    "aic",
    "bic",
    "converged",
];

fn write_fit_outputs(common: &CommonArgs, fit: &FitResult) -> Result<()> {
    let stem = format!("fit_{}", fit.family.slug());
    write_json(&out_path(common, &format!("{stem}.json")), fit)?;
    let mut t = Table::new(FIT_HEADER.to_vec());
    t.push(fit_table_row(fit));
    t.write(common, &stem, None)
}

fn write_select_outputs(common: &CommonArgs, report: &SelectionReport) -> Result<()> {
    write_json(&out_path(common, "selection.json"), report)?;
    let mut t = Table::new(
        FIT_HEADER
            .iter()
            .map(|s| s.to_string())
            .chain(["rank_aic".to_string(), "rank_bic".to_string()])
            .collect::<Vec<_>>(),
    );
    for fit in &report.fits {
        let mut row = fit_table_row(fit);
        let rank_of = |ranking: &[CopulaFamily]| {
            ranking
                .iter()
                .position(|f| *f == fit.family)
                .map(|i| (i + 1).to_string())
                .unwrap_or_default()
        };
        row.push(rank_of(&report.ranking_aic));
        row.push(rank_of(&report.ranking_bic));
        t.push(row);
    }
    t.write(common, "selection", None)?;
    let mut p = Table::new(vec![
        "family_a",
        "family_b",
        "vuong_statistic",
        "vuong_p",
        "clarke_statistic",
        "clarke_p",
    ]);
    for test in &report.pairwise_tests {
        p.push(vec![
            test.family_a.slug(),
            test.family_b.slug(),
            fmt_sig(test.vuong_statistic),
            fmt_sig(test.vuong_p),
            test.clarke_statistic.to_string(),
            fmt_sig(test.clarke_p),
        ]);
    }
    p.write(common, "pairwise_tests", None)
}

fn resolve_family(
    slug: &str,
    sample: &PseudoSample,
) -> Result<(CopulaFamily, CopulaParams, Option<SelectionReport>)> {
    if slug.eq_ignore_ascii_case("best") {
        let report = fit_all_and_rank(sample)?;
        let best = report.best();
        Ok((best.family, best.params, Some(report)))
    } else {
        let family = CopulaFamily::parse_slug(slug)?;
        let fit = fit_mle(family, sample)?;
        Ok((family, fit.params, None))
    }
}

fn cmd_gof(args: &GofArgs, pairs: &[GaragePair]) -> Result<()> {
    let sample = sample_from_pairs(pairs)?;
    let (family, params, _) = resolve_family(&args.family, &sample)?;
    let seed = derive_seed(args.io.common.seed, TAG_GOF);
    let grid = default_v_grid();
    let empirical = lambda_empirical(&sample, &grid);
    let theoretical = lambda_theoretical(family, &params, &grid, args.lambda_n, seed)?;
    let (indep, como) = lambda_boundaries(&grid);
    let mut t = Table::new(vec![
        "v",
        "lambda_empirical",
        "lambda_theoretical",
        "independence",
        "comonotonicity",
    ]);
    for (i, &v) in grid.iter().enumerate() {
        t.push(vec![
            fmt_sig(v),
            fmt_sig(empirical.lambda[i]),
            fmt_sig(theoretical.lambda[i]),
            fmt_sig(indep.lambda[i]),
            fmt_sig(como.lambda[i]),
        ]);
    }
    t.write(
        &args.io.common,
        "lambda",
        Some(format!(
            "seed={} family={} lambda_n={}",
            args.io.common.seed,
            family.slug(),
            args.lambda_n
        )),
    )?;
    #[derive(Serialize)]
    struct Meta {
        seed: u64,
        family: String,
        params: CopulaParams,
        lambda_n: usize,
        max_abs_deviation: f64,
    }
    write_json(
        &out_path(&args.io.common, "gof_meta.json"),
        &Meta {
            seed: args.io.common.seed,
            family: family.slug(),
            params,
            lambda_n: args.lambda_n,
            max_abs_deviation: empirical.max_abs_difference(&theoretical),
        },
    )
}

fn cmd_simulate(args: &SimulateArgs, pairs: &[GaragePair]) -> Result<()> {
    let pairing: Pairing = args.pairing.parse()?;
    let sample = sample_from_pairs(pairs)?;
    let (family, params, _) = resolve_family(&args.family, &sample)?;
    let n = args.n.unwrap_or(pairs.len());
    let seed = derive_seed(args.io.common.seed, TAG_SIMULATE);
    let unit = sample_pairs(family, &params, n, seed)?;
    let margins = margins_from_pairs(pairs)?;
    let gaps = apply_margins(&unit, &margins);
    let mut t = Table::new(vec!["u", "v", "gap1", "gap2"]);
    for (p, g) in unit.iter().zip(&gaps) {
        t.push(vec![
            fmt_sig(p.u()),
            fmt_sig(p.v()),
            fmt_sig(g.0),
            fmt_sig(g.1),
        ]);
    }
    t.write(
        &args.io.common,
        "simulated_pairs",
        Some(format!(
            "seed={} family={} n={n}",
            args.io.common.seed,
            family.slug()
        )),
    )?;
    if n == pairs.len() {
        let observed: Vec<ObservedGaps> = pairs
            .iter()
            .map(|p| ObservedGaps {
                gap1: p.gap1,
                gap2: p.gap2,
                year1: p.vehicle1.model_year,
                year2: p.vehicle2.model_year,
            })
            .collect();
        let report = prediction_report(&observed, &gaps, pairing)?;
        write_json(&out_path(&args.io.common, "prediction_report.json"), &report)?;
        let mut t = Table::new(vec![
            "stratum", "vehicle", "series", "mean", "median", "q1", "q3", "min", "max", "mad",
            "rmse",
        ]);
        for s in &report.strata {
            for (vehicle, cmp) in [("1", &s.vehicle1), ("2", &s.vehicle2)] {
                if let Some(c) = cmp {
                    for (series, stats) in [("observed", &c.observed), ("simulated", &c.simulated)]
                    {
                        t.push(vec![
                            s.label.clone(),
                            vehicle.to_string(),
                            series.to_string(),
                            fmt_sig(stats.mean),
                            fmt_sig(stats.median),
                            fmt_sig(stats.q1),
                            fmt_sig(stats.q3),
                            fmt_sig(stats.min),
                            fmt_sig(stats.max),
                            fmt_sig(c.mad),
                            fmt_sig(c.rmse),
                        ]);
                    }
                }
            }
        }
        t.write(
            &args.io.common,
            "prediction_report",
            Some(format!("seed={} pairing={:?}", args.io.common.seed, pairing)),
        )?;
    }
    Ok(())
}

fn crosstab_grid(ct: &CrossTab) -> String {
    let mut body = String::new();
    body.push_str("vehicle1\\vehicle2,");
    body.push_str(&GAP_CATEGORY_LABELS.join(","));
    body.push_str(",Total\n");
    let grand = ct.grand_total as f64;
    for (i, label) in GAP_CATEGORY_LABELS.iter().enumerate() {
        body.push_str(label);
        for j in 0..4 {
            body.push_str(&format!(
                ",{}/{}/{}",
                ct.counts[i][j],
                fmt_pct(ct.row_pct[i][j]),
                fmt_pct(ct.col_pct[i][j])
            ));
        }
        body.push_str(&format!(
            ",{}/100.00/{}\n",
            ct.row_totals[i],
            fmt_pct(100.0 * ct.row_totals[i] as f64 / grand)
        ));
    }
    body.push_str("Total");
    for j in 0..4 {
        body.push_str(&format!(
            ",{}/{}/100.00",
            ct.col_totals[j],
            fmt_pct(100.0 * ct.col_totals[j] as f64 / grand)
        ));
    }
    body.push_str(&format!(",{}/100.00/100.00\n", ct.grand_total));
    body
}

fn write_crosstab_outputs(common: &CommonArgs, name: &str, ct: &CrossTab) -> Result<()> {
    write_file(&out_path(common, &format!("{name}.csv")), &crosstab_grid(ct))?;
    write_json(&out_path(common, &format!("{name}.json")), ct)
}

fn cmd_crosstab(args: &CrosstabArgs, pairs: &[GaragePair]) -> Result<()> {
    match args.source.as_str() {
        "observed" => {
            let gaps: Vec<(f64, f64)> = pairs.iter().map(|p| (p.gap1, p.gap2)).collect();
            write_crosstab_outputs(&args.io.common, "crosstab_observed", &crosstab(&gaps))
        }
        "simulated" => {
            let sample = sample_from_pairs(pairs)?;
            let (family, params, _) = resolve_family(&args.family, &sample)?;
            let seed = derive_seed(args.io.common.seed, TAG_CROSSTAB);
            let unit = sample_pairs(family, &params, pairs.len(), seed)?;
            let margins = margins_from_pairs(pairs)?;
            let gaps = apply_margins(&unit, &margins);
            write_crosstab_outputs(&args.io.common, "crosstab_simulated", &crosstab(&gaps))
        }
        other => Err(Error::Usage(format!(
            "unknown crosstab source '{other}' (observed|simulated)"
        ))),
    }
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let common = &args.io.common;
    // ingest
    let (pairs, rejections) = load_and_pair(&args.io.input)?;
    write_ingest_outputs(common, &pairs, &rejections)?;
    // trim
    let (trimmed, trim_report) = trim_outliers(pairs, args.trim_k)?;
    write_trim_outputs(common, &trimmed, &trim_report)?;
    // describe
    write_describe_outputs(common, &trimmed)?;
    // select
    let sample = sample_from_pairs(&trimmed)?;
    let selection = fit_all_and_rank(&sample)?;
    write_select_outputs(common, &selection)?;
    let best = selection.best().clone();
    write_fit_outputs(common, &best)?;
    // gof for the winner
    let gof = GofArgs {
        io: InputArgs {
            common: common.clone(),
            input: args.io.input.clone(),
        },
        family: best.family.slug(),
        lambda_n: args.lambda_n,
    };
    cmd_gof(&gof, &trimmed)?;
    // simulate and compare
    let sim = SimulateArgs {
        io: InputArgs {
            common: common.clone(),
            input: args.io.input.clone(),
        },
        family: best.family.slug(),
        n: None,
        pairing: args.pairing.clone(),
    };
    cmd_simulate(&sim, &trimmed)?;
    // crosstabs
    let observed_gaps: Vec<(f64, f64)> = trimmed.iter().map(|p| (p.gap1, p.gap2)).collect();
    write_crosstab_outputs(common, "crosstab_observed", &crosstab(&observed_gaps))?;
    let ct = CrosstabArgs {
        io: InputArgs {
            common: common.clone(),
            input: args.io.input.clone(),
        },
        source: "simulated".into(),
        family: best.family.slug(),
    };
    cmd_crosstab(&ct, &trimmed)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(42.233948), "42.2339");
        assert_eq!(fmt_sig(-1537.3812), "-1537.38");
        assert_eq!(fmt_sig(0.00012345678), "0.000123457");
        assert_eq!(fmt_sig(123456789.0), "123457000");
        assert_eq!(fmt_sig(1.0), "1");
    }

    #[test]
    fn family_slug_resolution() {
        assert!(CopulaFamily::parse_slug("survival-bb1").is_ok());
        assert!(CopulaFamily::parse_slug("rotated-tawn1").is_ok());
        assert!(CopulaFamily::parse_slug("no-such-family").is_err());
    }
}
