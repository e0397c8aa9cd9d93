//! Univariate special functions: standard normal and Student-t distributions.
//!
//! The normal CDF is a Cody-style rational approximation (absolute error below
//! 1e-15) because the bivariate normal algorithm in [`crate::num::bvn`] needs
//! more accuracy than a generic erfc. Quantiles and the t distribution wrap
//! statrs.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Standard normal CDF, Cody's rational approximation (|error| < 1e-15).
pub fn norm_cdf(z: f64) -> f64 {
    let zabs = z.abs();
    let p = if zabs > 37.0 {
        0.0
    } else {
        let expntl = (-0.5 * zabs * zabs).exp();
        if zabs < 7.071_067_811_865_475 {
            expntl
                * ((((((3.526_249_659_989_109e-2 * zabs + 0.700_383_064_443_688_1) * zabs
                    + 6.373_962_203_531_65)
                    * zabs
                    + 33.912_866_078_383)
                    * zabs
                    + 112.079_291_497_870_9)
                    * zabs
                    + 221.213_596_169_931_1)
                    * zabs
                    + 220.206_867_912_376_1)
                / (((((((8.838_834_764_831_844e-2 * zabs + 1.755_667_163_182_642) * zabs
                    + 16.064_177_579_209_54)
                    * zabs
                    + 86.780_732_202_946_08)
                    * zabs
                    + 296.564_248_779_673_7)
                    * zabs
                    + 637.333_633_378_831_1)
                    * zabs
                    + 793.826_512_519_948_4)
                    * zabs
                    + 440.413_735_824_752_2)
        } else {
            expntl / SQRT_2PI
                / (zabs + 1.0 / (zabs + 2.0 / (zabs + 3.0 / (zabs + 4.0 / (zabs + 0.65)))))
        }
    };
    if z > 0.0 {
        1.0 - p
    } else {
        p
    }
}

/// Standard normal quantile.
pub fn norm_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Student-t CDF with real degrees of freedom, via the regularized incomplete beta.
pub fn t_cdf(x: f64, nu: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let ib = 0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + x * x));
    if x > 0.0 {
        1.0 - ib
    } else {
        ib
    }
}

/// Student-t density.
pub fn t_pdf(x: f64, nu: f64) -> f64 {
    let lc =
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
    (lc - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()).exp()
}

/// Student-t quantile.
pub fn t_quantile(p: f64, nu: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    StudentsT::new(0.0, 1.0, nu).unwrap().inverse_cdf(p)
}
