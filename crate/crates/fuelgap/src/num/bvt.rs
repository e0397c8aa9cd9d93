//! Bivariate Student-t CDF with real degrees of freedom.
//!
//! Uses the scale-mixture representation: if (Z1, Z2) is bivariate normal with
//! correlation rho and S = W/nu with W ~ chi-square(nu), then T_i = Z_i / sqrt(S)
//! and
//!
//!   P(T1 <= x, T2 <= y) = E_R[ Phi2(x R, y R; rho) ],   R = sqrt(S).
//!
//! The expectation is a 1-D integral over the density of R, evaluated with a
//! fixed tanh-sinh rule. The fixed rule keeps the result smooth in (x, y, rho,
//! nu), which matters for finite-difference consistency checks downstream.
//! Absolute error is ~1e-12 for nu in (2, 30].

use super::bvn::bvn_cdf;
use statrs::function::gamma::ln_gamma;

const STEP: f64 = 0.05;

/// P(T1 <= x, T2 <= y) for the bivariate t with correlation `rho`, `nu` d.o.f.
pub fn bvt_cdf(x: f64, y: f64, rho: f64, nu: f64) -> f64 {
    debug_assert!(nu > 0.0);
    // ln of the density of R = sqrt(chi2_nu / nu):
    //   g(r) = 2 (nu/2)^{nu/2} / Gamma(nu/2) * r^{nu-1} exp(-nu r^2 / 2)
    let ln_norm = std::f64::consts::LN_2 + 0.5 * nu * (0.5 * nu).ln() - ln_gamma(0.5 * nu);
    // Upper limit: beyond r_hi the weight is < 1e-18 of the total.
    let r_hi = ((nu + 16.0 * (2.0 * nu).sqrt() + 90.0) / nu).sqrt();
    let mid = 0.5 * r_hi;
    let half = 0.5 * r_hi;

    let mut acc = 0.0;
    let mut k: i64 = 0;
    loop {
        // symmetric pair of tanh-sinh nodes at u = +-k*STEP
        let u = k as f64 * STEP;
        let sh = std::f64::consts::FRAC_PI_2 * u.sinh();
        if sh > 17.0 {
            break;
        }
        let ch = sh.cosh();
        let w = std::f64::consts::FRAC_PI_2 * u.cosh() / (ch * ch);
        let t = sh.tanh();
        for sign in [1.0, -1.0] {
            if k == 0 && sign < 0.0 {
                continue;
            }
            let r = mid + half * sign * t;
            if r <= 0.0 || r >= r_hi {
                continue;
            }
            let ln_g = ln_norm + (nu - 1.0) * r.ln() - 0.5 * nu * r * r;
            let g = ln_g.exp();
            if g == 0.0 {
                continue;
            }
            acc += w * g * bvn_cdf(x * r, y * r, rho);
        }
        k += 1;
    }
    (acc * half * STEP).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::special::{t_cdf, t_quantile};

    #[test]
    fn reference_values() {
        // High-precision mixture quadrature (mpmath, 20 digits), arguments are
        // t-quantiles of the stated (u, v) probabilities.
        let cases: [(f64, f64, f64, f64, f64); 4] = [
            (0.3, 0.7, 0.427, 5.325, 0.25501629172402),
            (0.5, 0.5, 0.427, 5.325, 0.32021478529873),
            (0.1, 0.2, 0.5, 3.0, 0.057439650746624),
            (0.9, 0.6, -0.3, 10.0, 0.52255836045659),
        ];
        for &(u, v, rho, nu, want) in &cases {
            let x = t_quantile(u, nu);
            let y = t_quantile(v, nu);
            let got = bvt_cdf(x, y, rho, nu);
            assert!(
                (got - want).abs() < 1e-11,
                "bvt(u={u},v={v},rho={rho},nu={nu}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn arcsine_law_at_origin() {
        // P(T1 <= 0, T2 <= 0) = 1/4 + asin(rho)/(2 pi) for any elliptical pair
        use std::f64::consts::PI;
        for &nu in &[2.5, 5.325, 20.0] {
            for &rho in &[-0.6, 0.0, 0.427, 0.9] {
                let got = bvt_cdf(0.0, 0.0, rho, nu);
                let want = 0.25 + rho.asin() / (2.0 * PI);
                assert!(
                    (got - want).abs() < 1e-11,
                    "nu={nu} rho={rho}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn uncorrelated_is_not_independent() {
        // the shared chi-square mixing variable couples the tails even at rho=0
        let got = bvt_cdf(-2.0, -2.0, 0.0, 3.0);
        let independent = t_cdf(-2.0, 3.0) * t_cdf(-2.0, 3.0);
        assert!(got > independent + 1e-3);
    }

    #[test]
    fn marginal_limit() {
        // y -> +inf reduces to the univariate t CDF of x
        let got = bvt_cdf(0.8, 60.0, 0.6, 5.325);
        let want = t_cdf(0.8, 5.325);
        assert!((got - want).abs() < 5e-9);
    }

    #[test]
    fn symmetry_in_arguments() {
        let a = bvt_cdf(0.37, -0.9, 0.55, 4.2);
        let b = bvt_cdf(-0.9, 0.37, 0.55, 4.2);
        assert!((a - b).abs() < 1e-13);
    }
}
