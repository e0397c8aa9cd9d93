//! Gaussian and Student-t copulas.

use crate::num::bvn::bvn_cdf;
use crate::num::bvt::bvt_cdf;
use crate::num::special::{norm_cdf, norm_quantile, t_cdf, t_quantile};
use statrs::function::gamma::ln_gamma;

// ---------- Gaussian ----------

pub(crate) fn gaussian_cdf(u: f64, v: f64, rho: f64) -> f64 {
    bvn_cdf(norm_quantile(u), norm_quantile(v), rho)
}

pub(crate) fn gaussian_pdf(u: f64, v: f64, rho: f64) -> f64 {
    let x = norm_quantile(u);
    let y = norm_quantile(v);
    gaussian_pdf_at_quantiles(x, y, rho)
}

pub(crate) fn gaussian_pdf_at_quantiles(x: f64, y: f64, rho: f64) -> f64 {
    let r2 = 1.0 - rho * rho;
    (-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)).exp() / r2.sqrt()
}

pub(crate) fn gaussian_h(u: f64, v: f64, rho: f64) -> f64 {
    let x = norm_quantile(u);
    let y = norm_quantile(v);
    norm_cdf((y - rho * x) / (1.0 - rho * rho).sqrt())
}

pub(crate) fn gaussian_h_inverse(u: f64, q: f64, rho: f64) -> f64 {
    let x = norm_quantile(u);
    let z = norm_quantile(q);
    norm_cdf(rho * x + (1.0 - rho * rho).sqrt() * z)
}

// ---------- Student-t ----------

pub(crate) fn t_copula_cdf(u: f64, v: f64, rho: f64, nu: f64) -> f64 {
    bvt_cdf(t_quantile(u, nu), t_quantile(v, nu), rho, nu)
}

pub(crate) fn t_copula_pdf(u: f64, v: f64, rho: f64, nu: f64) -> f64 {
    let x = t_quantile(u, nu);
    let y = t_quantile(v, nu);
    t_copula_pdf_at_quantiles(x, y, rho, nu)
}

/// Density expressed in t-quantile coordinates; the estimation hot loop caches
/// the quantile transform and calls this directly.
pub(crate) fn t_copula_pdf_at_quantiles(x: f64, y: f64, rho: f64, nu: f64) -> f64 {
    let r2 = 1.0 - rho * rho;
    let ln_const =
        ln_gamma(0.5 * (nu + 2.0)) + ln_gamma(0.5 * nu) - 2.0 * ln_gamma(0.5 * (nu + 1.0));
    let quad = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2);
    let ln_core = -0.5 * (nu + 2.0) * quad.ln_1p();
    let ln_marg = -0.5 * (nu + 1.0) * ((x * x / nu).ln_1p() + (y * y / nu).ln_1p());
    (ln_const - 0.5 * r2.ln() + ln_core - ln_marg).exp()
}

pub(crate) fn t_copula_h(u: f64, v: f64, rho: f64, nu: f64) -> f64 {
    let x = t_quantile(u, nu);
    let y = t_quantile(v, nu);
    let scale = ((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
    t_cdf((y - rho * x) / scale, nu + 1.0)
}

pub(crate) fn t_copula_h_inverse(u: f64, q: f64, rho: f64, nu: f64) -> f64 {
    let x = t_quantile(u, nu);
    let scale = ((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
    let y = rho * x + scale * t_quantile(q, nu + 1.0);
    t_cdf(y, nu)
}
