//! Rank transform to pseudo-observations and exact maximum likelihood.

use crate::copula::elliptical::t_copula_pdf_at_quantiles;
use crate::copula::tau::{default_second_parameter, STUDENT_T_START_NU};
use crate::copula::{
    validate_params, CopulaFamily, CopulaParams, FamilyKind, TailDependence, UnitPair,
};
use crate::error::{Error, Result};
use crate::num::optim::{maximize, Bound};
use crate::num::special::t_quantile;
use crate::num::sum::pairwise_sum;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

/// Tie handling for the rank transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    AverageRanks,
}

/// Paired observations mapped to the open unit square by u = rank/(n+1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PseudoSample {
    pairs: Vec<UnitPair>,
    n: usize,
    tie_policy: TiePolicy,
    source_digest: String,
}

impl PseudoSample {
    pub fn pairs(&self) -> &[UnitPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn source_digest(&self) -> &str {
        &self.source_digest
    }

    /// Build directly from unit-square pairs (simulation output, tests).
    pub fn from_unit_pairs(pairs: Vec<UnitPair>, digest: &str) -> Self {
        let n = pairs.len();
        Self {
            pairs,
            n,
            tie_policy: TiePolicy::AverageRanks,
            source_digest: digest.to_string(),
        }
    }
}

/// Average ranks (1-based, halves on ties).
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn fnv_digest(x: &[f64], y: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in x.iter().chain(y) {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Coordinate-wise ranks divided by n+1, ties resolved by average ranks.
/// Invariant to strictly monotone transforms of either input.
pub fn pseudo_observations(x: &[f64], y: &[f64]) -> Result<PseudoSample> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "need at least 10 pairs, got {n}"
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite value in input".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::Degenerate("constant column has no ranks".into()));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let scale = 1.0 / (n as f64 + 1.0);
    let pairs = rx
        .iter()
        .zip(&ry)
        .map(|(&a, &b)| UnitPair::new(a * scale, b * scale))
        .collect();
    Ok(PseudoSample {
        pairs,
        n,
        tie_policy: TiePolicy::AverageRanks,
        source_digest: fnv_digest(x, y),
    })
}

/// Kendall's tau with the fixed n(n-1)/2 denominator: concordant minus
/// discordant over all pairs, ties counting zero. O(n^2) reference form.
pub fn kendall_tau_reference(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut net: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (x[i] - x[j]) * (y[i] - y[j]);
            if s > 0.0 {
                net += 1;
            } else if s < 0.0 {
                net -= 1;
            }
        }
    }
    net as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}

/// Merge-count Kendall's tau; identical to the reference on every input, at
/// O(n log n). Discordant pairs are inversions of y after sorting by (x, y);
/// ties contribute zero through the correction terms.
pub fn kendall_tau_pairs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    debug_assert_eq!(n, y.len());
    if n < 2 {
        return 0.0;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap()
            .then(y[a].partial_cmp(&y[b]).unwrap())
    });
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();

    // tie counts: pairs tied in x, in y, and in both
    fn tie_pairs(keys: impl Iterator<Item = (u64, u64)>) -> i64 {
        let mut counts = std::collections::HashMap::new();
        for k in keys {
            *counts.entry(k).or_insert(0i64) += 1;
        }
        counts.values().map(|&c| c * (c - 1) / 2).sum()
    }
    let key = |v: f64| v.to_bits();
    let tx = tie_pairs(x.iter().map(|&a| (key(a), 0)));
    let ty = tie_pairs(y.iter().map(|&a| (key(a), 0)));
    let txy = tie_pairs(x.iter().zip(y).map(|(&a, &b)| (key(a), key(b))));

    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buf) as i64;
    let total = n as i64 * (n as i64 - 1) / 2;
    let tied_any = tx + ty - txy;
    let net = total - tied_any - 2 * discordant;
    net as f64 / total as f64
}

fn merge_count(xs: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = xs.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = xs.split_at_mut(mid);
    let mut inv = merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inv += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        } else {
            buf[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + left.len() - i].copy_from_slice(&left[i..]);
    buf[k + left.len() - i..n].copy_from_slice(&right[j..]);
    xs.copy_from_slice(&buf[..n]);
    inv
}

/// Sample Kendall's tau of a pseudo-sample.
pub fn sample_kendall_tau(sample: &PseudoSample) -> f64 {
    let x: Vec<f64> = sample.pairs.iter().map(|p| p.u()).collect();
    let y: Vec<f64> = sample.pairs.iter().map(|p| p.v()).collect();
    kendall_tau_pairs(&x, &y)
}

/// Per-point log density, or None when the density overflows or vanishes.
fn log_density_terms(
    family: CopulaFamily,
    params: &CopulaParams,
    sample: &PseudoSample,
    cache: Option<&TQuantileCache>,
) -> Option<Vec<f64>> {
    let mut terms = Vec::with_capacity(sample.n);
    if family.kind() == FamilyKind::StudentT {
        let rho = params.theta;
        let nu = params.nu?;
        let quantiles = match cache {
            Some(c) => c.at(nu, sample),
            None => TQuantileCache::default().at(nu, sample),
        };
        for &(x, y) in quantiles.iter() {
            let d = t_copula_pdf_at_quantiles(x, y, rho, nu);
            if !d.is_finite() || d <= 0.0 {
                return None;
            }
            terms.push(d.ln());
        }
        return Some(terms);
    }
    for &p in sample.pairs() {
        let d = family.pdf(params, p).ok()?;
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        terms.push(d.ln());
    }
    Some(terms)
}

type QuantilePairs = std::rc::Rc<Vec<(f64, f64)>>;

/// Student-t quantile transforms are the expensive part of the t objective;
/// they only depend on nu, so the last transform is memoized.
#[derive(Default)]
struct TQuantileCache {
    inner: RefCell<Option<(u64, QuantilePairs)>>,
}

impl TQuantileCache {
    fn at(&self, nu: f64, sample: &PseudoSample) -> QuantilePairs {
        let bits = nu.to_bits();
        if let Some((k, v)) = self.inner.borrow().as_ref() {
            if *k == bits {
                return v.clone();
            }
        }
        let qs: Vec<(f64, f64)> = sample
            .pairs()
            .iter()
            .map(|p| (t_quantile(p.u(), nu), t_quantile(p.v(), nu)))
            .collect();
        let rc = std::rc::Rc::new(qs);
        *self.inner.borrow_mut() = Some((bits, rc.clone()));
        rc
    }
}

/// Sum of log copula densities over the sample (pairwise summation). Returns
/// negative infinity when the density overflows anywhere, which the optimizer
/// treats as a rejection of that parameter point.
pub fn log_likelihood(
    family: CopulaFamily,
    params: &CopulaParams,
    sample: &PseudoSample,
) -> Result<f64> {
    if !validate_params(family, params) {
        return Err(Error::InvalidParams {
            family: family.to_string(),
            detail: format!("{params:?}"),
        });
    }
    Ok(match log_density_terms(family, params, sample, None) {
        Some(terms) => pairwise_sum(&terms),
        None => f64::NEG_INFINITY,
    })
}

/// A fitted copula with confidence intervals and information criteria.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub family: CopulaFamily,
    pub params: CopulaParams,
    /// 95% confidence interval per fitted parameter (theta first).
    pub ci: Vec<(f64, f64)>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub tau: f64,
    pub tails: TailDependence,
    pub n: usize,
    pub converged: bool,
}

fn family_bounds(family: CopulaFamily) -> Vec<Bound> {
    match family.kind() {
        FamilyKind::Gaussian => vec![Bound::Correlation],
        FamilyKind::StudentT => vec![Bound::Correlation, Bound::Interval(2.000001, 30.0)],
        FamilyKind::Clayton => vec![Bound::Interval(1e-8, 28.0)],
        FamilyKind::Gumbel => vec![Bound::Interval(1.0, 20.0)],
        FamilyKind::Frank => vec![Bound::Interval(-40.0, 40.0)],
        FamilyKind::Joe => vec![Bound::Interval(1.0, 30.0)],
        FamilyKind::Bb1 => vec![Bound::Interval(1e-8, 12.0), Bound::Interval(1.0, 12.0)],
        FamilyKind::Bb6 => vec![Bound::Interval(1.0, 12.0), Bound::Interval(1.0, 12.0)],
        FamilyKind::Bb7 => vec![Bound::Interval(1.0, 12.0), Bound::Interval(1e-8, 12.0)],
        FamilyKind::Bb8 => vec![Bound::Interval(1.0, 25.0), Bound::Interval(1e-6, 1.0 - 1e-6)],
        FamilyKind::Tawn1 | FamilyKind::Tawn2 => {
            vec![Bound::Interval(1.0, 25.0), Bound::Interval(0.0, 1.0)]
        }
    }
}

fn params_to_vec(family: CopulaFamily, params: &CopulaParams) -> Vec<f64> {
    match family.kind() {
        FamilyKind::StudentT => vec![params.theta, params.nu.unwrap_or(STUDENT_T_START_NU)],
        k if k.parameter_count() == 2 => vec![params.theta, params.delta.unwrap_or(1.0)],
        _ => vec![params.theta],
    }
}

fn vec_to_params(family: CopulaFamily, v: &[f64]) -> CopulaParams {
    match family.kind() {
        FamilyKind::StudentT => CopulaParams::elliptical(v[0], v[1]),
        k if k.parameter_count() == 2 => CopulaParams::two(v[0], v[1]),
        _ => CopulaParams::one(v[0]),
    }
}

fn starting_point(family: CopulaFamily, sample: &PseudoSample) -> Vec<f64> {
    let tau = sample_kendall_tau(sample);
    if let Ok(p) = family.params_from_tau(tau) {
        return params_to_vec(family, &p);
    }
    // tau not attainable at the default second parameter: neutral interior start
    let kind = family.kind();
    match kind {
        FamilyKind::Gaussian => vec![0.0],
        FamilyKind::StudentT => vec![0.0, STUDENT_T_START_NU],
        FamilyKind::Clayton => vec![0.5],
        FamilyKind::Gumbel | FamilyKind::Joe => vec![1.2],
        FamilyKind::Frank => vec![1.0],
        _ => vec![1.2, default_second_parameter(kind).unwrap_or(1.0)],
    }
}

/// Central-difference Hessian of the log-likelihood at the optimum, taken in
/// the original parameter space with steps kept inside the admissible box.
fn hessian(
    family: CopulaFamily,
    at: &[f64],
    bounds: &[Bound],
    sample: &PseudoSample,
    cache: &TQuantileCache,
) -> Vec<Vec<f64>> {
    let k = at.len();
    let eval = |v: &[f64]| -> f64 {
        let p = vec_to_params(family, v);
        if !validate_params(family, &p) {
            return f64::NAN;
        }
        match log_density_terms(family, &p, sample, Some(cache)) {
            Some(terms) => pairwise_sum(&terms),
            None => f64::NAN,
        }
    };
    let mut steps = vec![0.0; k];
    for i in 0..k {
        let mut h = 1e-4 * (1.0 + at[i].abs());
        let room = (at[i] - bounds[i].lo()).min(bounds[i].hi() - at[i]);
        if room.is_finite() && room > 0.0 {
            h = h.min(0.45 * room);
        }
        steps[i] = h.max(1e-10);
    }
    let f0 = eval(at);
    let mut hess = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut a = at.to_vec();
            let val = if i == j {
                a[i] = at[i] + steps[i];
                let fp = eval(&a);
                a[i] = at[i] - steps[i];
                let fm = eval(&a);
                (fp - 2.0 * f0 + fm) / (steps[i] * steps[i])
            } else {
                a[i] = at[i] + steps[i];
                a[j] = at[j] + steps[j];
                let fpp = eval(&a);
                a[j] = at[j] - steps[j];
                let fpm = eval(&a);
                a[i] = at[i] - steps[i];
                let fmm = eval(&a);
                a[j] = at[j] + steps[j];
                let fmp = eval(&a);
                (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j])
            };
            hess[i][j] = val;
            hess[j][i] = val;
        }
    }
    hess
}

/// Diagonal of the inverse of the negative Hessian (the asymptotic variances).
fn variances_from_hessian(h: &[Vec<f64>]) -> Vec<f64> {
    let k = h.len();
    match k {
        1 => vec![-1.0 / h[0][0]],
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            // inverse of -H: swap diagonal of H, divide by det(H)
            vec![-h[1][1] / det, -h[0][0] / det]
        }
        _ => unreachable!("at most two copula parameters"),
    }
}

/// Exact maximum likelihood over the family's parameter box.
///
/// Starting values invert the sample Kendall's tau; confidence intervals come
/// from the negative-Hessian approximation of the Fisher information.
/// Non-convergence is reported in-band through `converged`.
pub fn fit_mle(family: CopulaFamily, sample: &PseudoSample) -> Result<FitResult> {
    if sample.len() < 30 {
        return Err(Error::InsufficientData(format!(
            "maximum likelihood needs n >= 30, got {}",
            sample.len()
        )));
    }
    let bounds = family_bounds(family);
    let start = starting_point(family, sample);
    let cache = TQuantileCache::default();
    let objective = |v: &[f64]| -> f64 {
        let p = vec_to_params(family, v);
        if !validate_params(family, &p) {
            return f64::NEG_INFINITY;
        }
        match log_density_terms(family, &p, sample, Some(&cache)) {
            Some(terms) => pairwise_sum(&terms),
            None => f64::NEG_INFINITY,
        }
    };
    let outcome = maximize(objective, &start, &bounds);
    let params = vec_to_params(family, &outcome.x);
    let k = family.parameter_count();

    let hess = hessian(family, &outcome.x, &bounds, sample, &cache);
    let vars = variances_from_hessian(&hess);
    let ci: Vec<(f64, f64)> = outcome
        .x
        .iter()
        .zip(&vars)
        .map(|(&est, &var)| {
            if var.is_finite() && var > 0.0 {
                let half = 1.96 * var.sqrt();
                (est - half, est + half)
            } else {
                (est, est)
            }
        })
        .collect();

    let loglik = outcome.value;
    let n = sample.len() as f64;
    let tau = family.kendall_tau(&params)?;
    let tails = family.tail_dependence(&params)?;
    Ok(FitResult {
        family,
        params,
        ci,
        loglik,
        aic: -2.0 * loglik + 2.0 * k as f64,
        bic: -2.0 * loglik + k as f64 * n.ln(),
        tau,
        tails,
        n: sample.len(),
        converged: outcome.converged && loglik.is_finite(),
    })
}
