//! Model selection across the 21-family catalog: information-criteria
//! rankings, Vuong and Clarke non-nested tests, and lambda-function
//! goodness-of-fit curves.

use crate::copula::archimedean::Generator;
use crate::copula::{CopulaFamily, CopulaParams, Rotation, UnitPair};
use crate::error::{Error, Result};
use crate::estimate::{fit_mle, FitResult, PseudoSample};
use crate::num::special::norm_cdf;
use crate::simulate::sample_pairs;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

/// Outcome of one pairwise non-nested comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub family_a: CopulaFamily,
    pub family_b: CopulaFamily,
    pub vuong_statistic: f64,
    pub vuong_p: f64,
    /// Number of observations favoring model a after the Schwarz correction.
    pub clarke_statistic: u64,
    pub clarke_p: f64,
}

/// All 21 fits with AIC/BIC rankings and pairwise tests among the leaders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub fits: Vec<FitResult>,
    pub ranking_aic: Vec<CopulaFamily>,
    pub ranking_bic: Vec<CopulaFamily>,
    pub pairwise_tests: Vec<PairwiseTest>,
}

impl SelectionReport {
    pub fn fit_for(&self, family: CopulaFamily) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.family == family)
    }

    /// Best fit under BIC, the criterion valid for non-nested comparison.
    pub fn best(&self) -> &FitResult {
        self.fit_for(self.ranking_bic[0]).expect("ranked family is fitted")
    }
}

fn ranked_by<F: Fn(&FitResult) -> f64>(fits: &[FitResult], criterion: F) -> Vec<CopulaFamily> {
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| {
        criterion(&fits[a])
            .partial_cmp(&criterion(&fits[b]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.into_iter().map(|i| fits[i].family).collect()
}

/// Fit every family in the catalog and rank by AIC and BIC. Non-converged
/// fits stay in the report flagged with their best-found criteria; the top
/// three AIC models are compared pairwise by Vuong and Clarke tests.
pub fn fit_all_and_rank(sample: &PseudoSample) -> Result<SelectionReport> {
    if sample.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "selection needs n >= 100, got {}",
            sample.len()
        )));
    }
    let fits: Vec<FitResult> = CopulaFamily::catalog()
        .into_iter()
        .map(|family| fit_mle(family, sample))
        .collect::<Result<_>>()?;
    let ranking_aic = ranked_by(&fits, |f| f.aic);
    let ranking_bic = ranked_by(&fits, |f| f.bic);
    let mut pairwise_tests = Vec::new();
    let top: Vec<CopulaFamily> = ranking_aic.iter().take(3).copied().collect();
    for i in 0..top.len() {
        for j in (i + 1)..top.len() {
            let a = fits.iter().find(|f| f.family == top[i]).unwrap();
            let b = fits.iter().find(|f| f.family == top[j]).unwrap();
            if let (Ok((vs, vp)), Ok((cs, cp))) =
                (vuong_test(a, b, sample), clarke_test(a, b, sample))
            {
                pairwise_tests.push(PairwiseTest {
                    family_a: top[i],
                    family_b: top[j],
                    vuong_statistic: vs,
                    vuong_p: vp,
                    clarke_statistic: cs,
                    clarke_p: cp,
                });
            }
        }
    }
    Ok(SelectionReport {
        fits,
        ranking_aic,
        ranking_bic,
        pairwise_tests,
    })
}

fn pointwise_log_ratios(
    a: &FitResult,
    b: &FitResult,
    sample: &PseudoSample,
) -> Result<Vec<f64>> {
    let mut m = Vec::with_capacity(sample.len());
    for &p in sample.pairs() {
        let da = a.family.pdf(&a.params, p)?;
        let db = b.family.pdf(&b.params, p)?;
        if da.is_nan() || db.is_nan() || da <= 0.0 || db <= 0.0 {
            return Err(Error::Degenerate("zero density in log ratio".into()));
        }
        m.push(da.ln() - db.ln());
    }
    Ok(m)
}

/// Vuong likelihood-ratio test with the Schwarz degree-of-freedom correction.
/// Positive statistic favors model a; two-sided normal p-value.
pub fn vuong_test(a: &FitResult, b: &FitResult, sample: &PseudoSample) -> Result<(f64, f64)> {
    let m = pointwise_log_ratios(a, b, sample)?;
    let n = m.len() as f64;
    let mean = m.iter().sum::<f64>() / n;
    let var = m.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd < 1e-12 {
        return Err(Error::Degenerate(
            "identical pointwise likelihoods; Vuong statistic undefined".into(),
        ));
    }
    let ka = a.family.parameter_count() as f64;
    let kb = b.family.parameter_count() as f64;
    let correction = (ka - kb) / 2.0 * n.ln();
    let statistic = (m.iter().sum::<f64>() - correction) / (n.sqrt() * sd);
    let p = 2.0 * norm_cdf(-statistic.abs());
    Ok((statistic, p))
}

/// Clarke sign test with the Schwarz correction: under the null the corrected
/// per-observation ratios are positive half the time, Binomial(n, 1/2).
pub fn clarke_test(a: &FitResult, b: &FitResult, sample: &PseudoSample) -> Result<(u64, f64)> {
    let m = pointwise_log_ratios(a, b, sample)?;
    if m.iter().all(|&x| x.abs() < 1e-14) {
        return Err(Error::Degenerate(
            "identical pointwise likelihoods; Clarke statistic degenerate".into(),
        ));
    }
    let n = m.len();
    let ka = a.family.parameter_count() as f64;
    let kb = b.family.parameter_count() as f64;
    let shift = (ka - kb) / n as f64 * (n as f64).ln() / 2.0;
    let favor_a = m.iter().filter(|&&x| x - shift > 0.0).count() as u64;
    let binom = Binomial::new(0.5, n as u64).expect("valid binomial");
    // exact two-sided p via the binomial CDF
    let lower = binom.cdf(favor_a);
    let upper = 1.0 - if favor_a == 0 { 0.0 } else { binom.cdf(favor_a - 1) };
    let p = (2.0 * lower.min(upper)).min(1.0);
    Ok((favor_a, p))
}

// ---------- lambda-function goodness of fit ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaKind {
    Empirical,
    Theoretical,
    IndependenceBoundary,
    ComonotonicityBoundary,
}

/// lambda(v) = v - K(v) where K is the Kendall distribution of C(U, V);
/// non-positive everywhere, zero under comonotonicity, v ln v under
/// independence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaCurve {
    pub v_grid: Vec<f64>,
    pub lambda: Vec<f64>,
    pub kind: LambdaKind,
}

impl LambdaCurve {
    fn new(v_grid: Vec<f64>, lambda: Vec<f64>, kind: LambdaKind) -> Self {
        // K(v) >= v holds for every copula; clip the estimation noise
        let lambda = lambda.into_iter().map(|l| l.min(0.0)).collect();
        Self {
            v_grid,
            lambda,
            kind,
        }
    }

    pub fn max_abs_difference(&self, other: &LambdaCurve) -> f64 {
        self.lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Default evaluation grid: 99 points at 0.01 .. 0.99.
pub fn default_v_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Boundary curves for plots: independence (v ln v) and comonotonicity (0).
pub fn lambda_boundaries(v_grid: &[f64]) -> (LambdaCurve, LambdaCurve) {
    let indep = LambdaCurve::new(
        v_grid.to_vec(),
        v_grid.iter().map(|&v| v * v.ln()).collect(),
        LambdaKind::IndependenceBoundary,
    );
    let como = LambdaCurve::new(
        v_grid.to_vec(),
        vec![0.0; v_grid.len()],
        LambdaKind::ComonotonicityBoundary,
    );
    (indep, como)
}

/// Fenwick tree for strict dominance counting.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// count of inserted ranks < i
    fn count_below(&self, i: usize) -> u32 {
        let mut acc = 0;
        let mut i = i;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }
}

/// Empirical copula values C_n(u_i, v_i) = #{j != i : u_j < u_i, v_j < v_i} /
/// (n - 1), computed in O(n log n) with a sweep over u and a Fenwick tree on
/// the rank of v. Ties in u are grouped so the strict inequality holds.
fn empirical_copula_values(pairs: &[UnitPair]) -> Vec<f64> {
    let n = pairs.len();
    let mut v_sorted: Vec<f64> = pairs.iter().map(|p| p.v()).collect();
    v_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v_sorted.dedup();
    let v_rank = |v: f64| v_sorted.partition_point(|&x| x < v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pairs[a].u().partial_cmp(&pairs[b].u()).unwrap());
    let mut out = vec![0.0; n];
    let mut tree = Fenwick::new(v_sorted.len());
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pairs[order[j + 1]].u() == pairs[order[i]].u() {
            j += 1;
        }
        // query the whole equal-u group before inserting any of it
        for &idx in &order[i..=j] {
            out[idx] = tree.count_below(v_rank(pairs[idx].v())) as f64 / (n as f64 - 1.0);
        }
        for &idx in &order[i..=j] {
            tree.add(v_rank(pairs[idx].v()));
        }
        i = j + 1;
    }
    out
}

/// Empirical lambda-function of the sample on the given grid.
pub fn lambda_empirical(sample: &PseudoSample, v_grid: &[f64]) -> LambdaCurve {
    let mut cvals = empirical_copula_values(sample.pairs());
    cvals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let lambda = v_grid
        .iter()
        .map(|&v| {
            let k = cvals.partition_point(|&c| c <= v) as f64 / n;
            v - k
        })
        .collect();
    LambdaCurve::new(v_grid.to_vec(), lambda, LambdaKind::Empirical)
}

/// Theoretical lambda-function. Unrotated Archimedean families have the
/// closed form phi(v)/phi'(v); elliptical, Tawn, and rotated families have no
/// closed form and use the empirical lambda of `n_sim` simulated pairs.
pub fn lambda_theoretical(
    family: CopulaFamily,
    params: &CopulaParams,
    v_grid: &[f64],
    n_sim: usize,
    seed: u64,
) -> Result<LambdaCurve> {
    if !crate::copula::validate_params(family, params) {
        return Err(Error::InvalidParams {
            family: family.to_string(),
            detail: format!("{params:?}"),
        });
    }
    if family.rotation() == Rotation::None {
        if let Some(generator) = Generator::for_kind(family.kind(), params) {
            let lambda = v_grid.iter().map(|&v| generator.ratio(v)).collect();
            return Ok(LambdaCurve::new(
                v_grid.to_vec(),
                lambda,
                LambdaKind::Theoretical,
            ));
        }
    }
    let pairs = sample_pairs(family, params, n_sim, seed)?;
    let sim = PseudoSample::from_unit_pairs(pairs, "lambda-sim");
    let mut curve = lambda_empirical(&sim, v_grid);
    curve.kind = LambdaKind::Theoretical;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::FamilyKind;

    fn simulated_sample(
        kind: FamilyKind,
        params: CopulaParams,
        n: usize,
        seed: u64,
    ) -> PseudoSample {
        let fam = CopulaFamily::unrotated(kind);
        let pairs = sample_pairs(fam, &params, n, seed).unwrap();
        PseudoSample::from_unit_pairs(pairs, "sim")
    }

    #[test]
    fn lambda_empirical_comonotone() {
        let pairs: Vec<UnitPair> = (1..=500)
            .map(|i| UnitPair::new(i as f64 / 501.0, i as f64 / 501.0))
            .collect();
        let s = PseudoSample::from_unit_pairs(pairs, "mono");
        let grid = default_v_grid();
        let curve = lambda_empirical(&s, &grid);
        for (&v, &l) in curve.v_grid.iter().zip(&curve.lambda) {
            assert!(l.abs() < 0.01, "lambda({v}) = {l}");
            assert!(l <= 1e-12);
        }
    }

    #[test]
    fn lambda_empirical_independence() {
        let s = simulated_sample(FamilyKind::Gaussian, CopulaParams::one(1e-9), 100_000, 3);
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let curve = lambda_empirical(&s, &grid);
        for (&v, &l) in curve.v_grid.iter().zip(&curve.lambda) {
            assert!((l - v * v.ln()).abs() < 0.02, "lambda({v}) = {l}");
        }
    }

    #[test]
    fn lambda_empirical_clayton_closed_form() {
        let s = simulated_sample(FamilyKind::Clayton, CopulaParams::one(2.0), 100_000, 17);
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let curve = lambda_empirical(&s, &grid);
        for (&v, &l) in curve.v_grid.iter().zip(&curve.lambda) {
            let want = (v.powi(3) - v) / 2.0;
            assert!((l - want).abs() < 0.02, "lambda({v}) = {l}, want {want}");
        }
    }

    #[test]
    fn lambda_theoretical_closed_forms() {
        let clayton = CopulaFamily::unrotated(FamilyKind::Clayton);
        let grid = vec![0.5];
        let curve =
            lambda_theoretical(clayton, &CopulaParams::one(1.0), &grid, 1000, 1).unwrap();
        assert!((curve.lambda[0] - (-0.25)).abs() < 1e-12);
        // any family: lambda -> 0 as v -> 1
        for family in CopulaFamily::catalog() {
            let params = family.params_from_tau(0.3).unwrap();
            let c =
                lambda_theoretical(family, &params, &[0.999], 2000, 5).unwrap();
            assert!(c.lambda[0].abs() < 0.02, "{family}: {}", c.lambda[0]);
        }
    }

    #[test]
    fn lambda_simulated_matches_fresh_empirical() {
        let fam = CopulaFamily::unrotated(FamilyKind::StudentT);
        let params = CopulaParams::elliptical(0.427, 5.325);
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let theo = lambda_theoretical(fam, &params, &grid, 100_000, 11).unwrap();
        let fresh = simulated_sample(
            FamilyKind::StudentT,
            CopulaParams::elliptical(0.427, 5.325),
            100_000,
            23,
        );
        let emp = lambda_empirical(&fresh, &grid);
        assert!(theo.max_abs_difference(&emp) < 0.01);
    }

    #[test]
    fn empirical_copula_handles_ties() {
        // duplicated u coordinates must not count within the tie group
        let pairs = vec![
            UnitPair::new(0.25, 0.2),
            UnitPair::new(0.25, 0.6),
            UnitPair::new(0.5, 0.4),
            UnitPair::new(0.75, 0.8),
        ];
        let c = empirical_copula_values(&pairs);
        // brute force check
        for (i, p) in pairs.iter().enumerate() {
            let direct = pairs
                .iter()
                .enumerate()
                .filter(|(j, q)| *j != i && q.u() < p.u() && q.v() < p.v())
                .count() as f64
                / 3.0;
            assert_eq!(c[i], direct, "point {i}");
        }
    }

    #[test]
    fn vuong_clarke_on_well_separated_models() {
        let s = simulated_sample(
            FamilyKind::StudentT,
            CopulaParams::elliptical(0.427, 5.325),
            4000,
            31,
        );
        let t_fit = fit_mle(CopulaFamily::unrotated(FamilyKind::StudentT), &s).unwrap();
        let joe_fit = fit_mle(CopulaFamily::unrotated(FamilyKind::Joe), &s).unwrap();
        let (stat, p) = vuong_test(&t_fit, &joe_fit, &s).unwrap();
        assert!(stat > 1.96, "vuong statistic {stat}");
        assert!(p < 0.05);
        // antisymmetry
        let (back, _) = vuong_test(&joe_fit, &t_fit, &s).unwrap();
        assert!((stat + back).abs() < 1e-12);
        let (b_count, cp) = clarke_test(&t_fit, &joe_fit, &s).unwrap();
        assert!(b_count as f64 > 4000.0 / 2.0);
        assert!(cp < 0.05);
        // complement identity when no ratio is exactly zero
        let (b_back, _) = clarke_test(&joe_fit, &t_fit, &s).unwrap();
        assert_eq!(b_count + b_back, 4000);
    }

    #[test]
    fn tests_agree_with_large_criterion_gaps() {
        // whenever AIC separates two models by 10+ points, Vuong and Clarke
        // point the same way
        let mut agreements = 0;
        let mut trials = 0;
        for seed in 0..10u64 {
            let s = simulated_sample(
                FamilyKind::StudentT,
                CopulaParams::elliptical(0.427, 5.325),
                2000,
                400 + seed,
            );
            let a = fit_mle(CopulaFamily::unrotated(FamilyKind::StudentT), &s).unwrap();
            let b = fit_mle(CopulaFamily::unrotated(FamilyKind::Joe), &s).unwrap();
            if (a.aic - b.aic).abs() < 10.0 {
                continue;
            }
            trials += 1;
            let aic_favors_a = a.aic < b.aic;
            let (v, _) = vuong_test(&a, &b, &s).unwrap();
            let (c, _) = clarke_test(&a, &b, &s).unwrap();
            let clarke_favors_a = c as f64 > s.len() as f64 / 2.0;
            if (v > 0.0) == aic_favors_a && clarke_favors_a == aic_favors_a {
                agreements += 1;
            }
        }
        assert!(trials >= 9, "AIC gap below 10 in too many runs");
        assert!(
            agreements as f64 >= 0.95 * trials as f64,
            "{agreements}/{trials} agreements"
        );
    }

    #[test]
    fn independence_data_criteria_cluster_at_null() {
        let s = simulated_sample(FamilyKind::Gaussian, CopulaParams::one(1e-9), 2000, 77);
        let report = fit_all_and_rank(&s).unwrap();
        for fit in &report.fits {
            // log-likelihood stays within chance of the flat density
            assert!(
                fit.loglik > -2.0 && fit.loglik < 8.0,
                "{}: loglik {}",
                fit.family,
                fit.loglik
            );
            let k = fit.family.parameter_count() as f64;
            assert!((fit.aic - 2.0 * k).abs() < 16.0);
            // no model beats the zero-loglik independence reference by more
            // than noise on the BIC scale
            assert!(fit.bic > -4.0, "{}: bic {}", fit.family, fit.bic);
        }
    }

    #[test]
    fn identical_models_degenerate() {
        let s = simulated_sample(FamilyKind::Gaussian, CopulaParams::one(0.4), 500, 2);
        let fit = fit_mle(CopulaFamily::unrotated(FamilyKind::Gaussian), &s).unwrap();
        assert!(matches!(
            vuong_test(&fit, &fit, &s),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            clarke_test(&fit, &fit, &s),
            Err(Error::Degenerate(_))
        ));
    }
}
