//! Lambda-function goodness of fit: the empirical lambda of the data against
//! the theoretical lambda of a well-specified and a deliberately
//! mis-specified family. The mis-specified curve separates visibly.

use fuelgap::copula::{CopulaFamily, CopulaParams, FamilyKind};
use fuelgap::estimate::{fit_mle, PseudoSample};
use fuelgap::select::{lambda_boundaries, lambda_empirical, lambda_theoretical};
use fuelgap::simulate::sample_pairs;

fn main() -> fuelgap::Result<()> {
    let truth = CopulaFamily::unrotated(FamilyKind::StudentT);
    let pairs = sample_pairs(truth, &CopulaParams::elliptical(0.427, 5.325), 7126, 8)?;
    let sample = PseudoSample::from_unit_pairs(pairs, "example");

    let good = fit_mle(truth, &sample)?;
    let bad = fit_mle(CopulaFamily::unrotated(FamilyKind::Joe), &sample)?;

    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let empirical = lambda_empirical(&sample, &grid);
    let theo_good = lambda_theoretical(good.family, &good.params, &grid, 10_000, 1)?;
    let theo_bad = lambda_theoretical(bad.family, &bad.params, &grid, 10_000, 1)?;
    let (indep, _) = lambda_boundaries(&grid);

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "v", "empirical", "student-t", "joe", "independent"
    );
    for (i, &v) in grid.iter().enumerate() {
        println!(
            "{v:>5.2} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            empirical.lambda[i], theo_good.lambda[i], theo_bad.lambda[i], indep.lambda[i]
        );
    }
    println!(
        "\nmax |empirical - theoretical|: {} {:.4} vs {} {:.4}",
        good.family,
        empirical.max_abs_difference(&theo_good),
        bad.family,
        empirical.max_abs_difference(&theo_bad)
    );
    Ok(())
}
