//! Archimedean copula families through their generator functions.
//!
//! Everything is derived from phi, its first two derivatives, and its inverse:
//!
//!   C(u,v)   = phi^{-1}(phi(u) + phi(v))
//!   h(v|u)   = phi'(u) / phi'(C)
//!   c(u,v)   = -phi''(C) phi'(u) phi'(v) / phi'(C)^3
//!   lambda(t) = phi(t) / phi'(t)   (the Kendall-distribution quotient)
//!
//! `lambda` is implemented in a cancellation-safe closed form per family since
//! phi and phi' both vanish at t = 1 for several generators.

use crate::copula::FamilyKind;
use crate::copula::params::CopulaParams;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Generator {
    Clayton { theta: f64 },
    Gumbel { theta: f64 },
    Frank { theta: f64 },
    Joe { theta: f64 },
    Bb1 { theta: f64, delta: f64 },
    Bb6 { theta: f64, delta: f64 },
    Bb7 { theta: f64, delta: f64 },
    /// eps_k = (1-delta)^theta; kept rather than K = 1 - eps_k because the
    /// stable evaluation paths all need the small quantity.
    Bb8 { theta: f64, delta: f64, eps_k: f64 },
    /// Limit generator -ln t; used for Frank at theta ~ 0.
    Independence,
}

/// (1 - x)^theta computed without collapsing to 0/1 prematurely.
#[inline]
fn pow_one_minus(x: f64, theta: f64) -> f64 {
    (theta * f64::ln_1p(-x)).exp()
}

impl Generator {
    /// Build the generator for an (unrotated) Archimedean kind; `None` for
    /// elliptical and extreme-value kinds.
    pub(crate) fn for_kind(kind: FamilyKind, params: &CopulaParams) -> Option<Self> {
        let theta = params.theta;
        let delta = params.delta;
        Some(match kind {
            FamilyKind::Clayton => Generator::Clayton { theta },
            FamilyKind::Gumbel if theta == 1.0 => Generator::Independence,
            FamilyKind::Gumbel => Generator::Gumbel { theta },
            FamilyKind::Frank if theta.abs() < 1e-8 => Generator::Independence,
            FamilyKind::Frank => Generator::Frank { theta },
            FamilyKind::Joe => Generator::Joe { theta },
            FamilyKind::Bb1 => Generator::Bb1 {
                theta,
                delta: delta?,
            },
            FamilyKind::Bb6 => Generator::Bb6 {
                theta,
                delta: delta?,
            },
            FamilyKind::Bb7 => Generator::Bb7 {
                theta,
                delta: delta?,
            },
            FamilyKind::Bb8 => {
                let d = delta?;
                Generator::Bb8 {
                    theta,
                    delta: d,
                    eps_k: pow_one_minus(d, theta),
                }
            }
            _ => return None,
        })
    }

    pub(crate) fn phi(&self, t: f64) -> f64 {
        match *self {
            Generator::Clayton { theta } => f64::exp_m1(-theta * t.ln()) / theta,
            Generator::Gumbel { theta } => (-t.ln()).powf(theta),
            Generator::Frank { theta } => {
                let g = f64::exp_m1(-theta * t);
                let gd = f64::exp_m1(-theta);
                -(g / gd).ln()
            }
            Generator::Joe { theta } => -f64::ln_1p(-(1.0 - t).powf(theta)),
            Generator::Bb1 { theta, delta } => f64::exp_m1(-theta * t.ln()).powf(delta),
            Generator::Bb6 { theta, delta } => {
                (-f64::ln_1p(-(1.0 - t).powf(theta))).powf(delta)
            }
            Generator::Bb7 { theta, delta } => {
                // y^{-delta} - 1 with y = 1 - (1-t)^theta, kept accurate when
                // (1-t)^theta is far below machine epsilon
                let a = pow_one_minus(t, theta);
                f64::exp_m1(-delta * f64::ln_1p(-a))
            }
            Generator::Bb8 {
                theta,
                delta,
                eps_k,
            } => {
                // ln K - ln z = ln1p(-eps_k) - ln1p(-a), a = (1-delta t)^theta
                let a = pow_one_minus(delta * t, theta);
                f64::ln_1p(-eps_k) - f64::ln_1p(-a)
            }
            Generator::Independence => -t.ln(),
        }
    }

    pub(crate) fn phi_prime(&self, t: f64) -> f64 {
        match *self {
            Generator::Clayton { theta } => -t.powf(-theta - 1.0),
            Generator::Gumbel { theta } => -theta * (-t.ln()).powf(theta - 1.0) / t,
            Generator::Frank { theta } => {
                let g = f64::exp_m1(-theta * t);
                theta * (g + 1.0) / g
            }
            Generator::Joe { theta } => {
                let w = 1.0 - (1.0 - t).powf(theta);
                -theta * (1.0 - t).powf(theta - 1.0) / w
            }
            Generator::Bb1 { theta, delta } => {
                let x = f64::exp_m1(-theta * t.ln());
                -delta * theta * x.powf(delta - 1.0) * t.powf(-theta - 1.0)
            }
            Generator::Bb6 { theta, delta } => {
                let j = Generator::Joe { theta };
                delta * j.phi(t).powf(delta - 1.0) * j.phi_prime(t)
            }
            Generator::Bb7 { theta, delta } => {
                let a = pow_one_minus(t, theta);
                let ln_y = f64::ln_1p(-a);
                -delta * theta * (-(delta + 1.0) * ln_y).exp() * a / (1.0 - t)
            }
            Generator::Bb8 { theta, delta, .. } => {
                let a = pow_one_minus(delta * t, theta);
                -theta * delta * (a / (1.0 - delta * t)) / (1.0 - a)
            }
            Generator::Independence => -1.0 / t,
        }
    }

    pub(crate) fn phi_double(&self, t: f64) -> f64 {
        match *self {
            Generator::Clayton { theta } => (theta + 1.0) * t.powf(-theta - 2.0),
            Generator::Gumbel { theta } => {
                let l = -t.ln();
                theta * ((theta - 1.0) * l.powf(theta - 2.0) + l.powf(theta - 1.0)) / (t * t)
            }
            Generator::Frank { theta } => {
                let g = f64::exp_m1(-theta * t);
                theta * theta * (g + 1.0) / (g * g)
            }
            Generator::Joe { theta } => {
                let e = 1.0 - t;
                let w = 1.0 - e.powf(theta);
                (theta * (theta - 1.0) * e.powf(theta - 2.0) * w
                    + theta * theta * e.powf(2.0 * theta - 2.0))
                    / (w * w)
            }
            Generator::Bb1 { theta, delta } => {
                let x = f64::exp_m1(-theta * t.ln());
                let xp = -theta * t.powf(-theta - 1.0);
                let xpp = theta * (theta + 1.0) * t.powf(-theta - 2.0);
                delta * (delta - 1.0) * x.powf(delta - 2.0) * xp * xp
                    + delta * x.powf(delta - 1.0) * xpp
            }
            Generator::Bb6 { theta, delta } => {
                let j = Generator::Joe { theta };
                let jv = j.phi(t);
                let jp = j.phi_prime(t);
                delta * (delta - 1.0) * jv.powf(delta - 2.0) * jp * jp
                    + delta * jv.powf(delta - 1.0) * j.phi_double(t)
            }
            Generator::Bb7 { theta, delta } => {
                let e = 1.0 - t;
                let a = pow_one_minus(t, theta);
                let ln_y = f64::ln_1p(-a);
                let yp = theta * a / e;
                let ypp = -theta * (theta - 1.0) * a / (e * e);
                delta * (delta + 1.0) * (-(delta + 2.0) * ln_y).exp() * yp * yp
                    - delta * (-(delta + 1.0) * ln_y).exp() * ypp
            }
            Generator::Bb8 { theta, delta, .. } => {
                let s = 1.0 - delta * t;
                let a = pow_one_minus(delta * t, theta);
                let z = 1.0 - a;
                let zp = theta * delta * a / s;
                let zpp = -theta * (theta - 1.0) * delta * delta * a / (s * s);
                (zp * zp - zpp * z) / (z * z)
            }
            Generator::Independence => 1.0 / (t * t),
        }
    }

    pub(crate) fn phi_inverse(&self, s: f64) -> f64 {
        match *self {
            Generator::Clayton { theta } => (-f64::ln_1p(theta * s) / theta).exp(),
            Generator::Gumbel { theta } => (-s.powf(1.0 / theta)).exp(),
            Generator::Frank { theta } => {
                let gd = f64::exp_m1(-theta);
                -f64::ln_1p(gd * (-s).exp()) / theta
            }
            Generator::Joe { theta } => 1.0 - (-f64::exp_m1(-s)).powf(1.0 / theta),
            Generator::Bb1 { theta, delta } => {
                (-f64::ln_1p(s.powf(1.0 / delta)) / theta).exp()
            }
            Generator::Bb6 { theta, delta } => {
                1.0 - (-f64::exp_m1(-s.powf(1.0 / delta))).powf(1.0 / theta)
            }
            Generator::Bb7 { theta, delta } => {
                // 1 - (1+s)^{-1/delta} evaluated as -expm1 to survive tiny s
                let w = -f64::exp_m1(-f64::ln_1p(s) / delta);
                1.0 - w.powf(1.0 / theta)
            }
            Generator::Bb8 {
                theta,
                delta,
                eps_k,
            } => {
                // 1 - K e^{-s} = -expm1(-s) + eps_k e^{-s}
                let w = -f64::exp_m1(-s) + eps_k * (-s).exp();
                (1.0 - w.powf(1.0 / theta)) / delta
            }
            Generator::Independence => (-s).exp(),
        }
    }

    /// phi(t)/phi'(t) in closed form with the endpoint cancellations removed.
    /// This is the lambda-function of the family and the integrand of the
    /// Kendall's-tau identity tau = 1 + 4 * int_0^1 phi/phi' dt.
    pub(crate) fn ratio(&self, t: f64) -> f64 {
        match *self {
            Generator::Clayton { theta } => (t.powf(theta + 1.0) - t) / theta,
            Generator::Gumbel { theta } => t * t.ln() / theta,
            Generator::Frank { theta } => {
                let g = f64::exp_m1(-theta * t);
                let gd = f64::exp_m1(-theta);
                -(g / gd).ln() * g / (theta * (g + 1.0))
            }
            Generator::Joe { theta } => joe_ratio(theta, 1.0, t),
            Generator::Bb1 { theta, delta } => (t.powf(theta + 1.0) - t) / (delta * theta),
            Generator::Bb6 { theta, delta } => joe_ratio(theta, delta, t),
            Generator::Bb7 { theta, delta } => {
                let e = 1.0 - t;
                let a = e.powf(theta);
                if a < 1e-280 {
                    return -e / theta;
                }
                let y = 1.0 - a;
                let one_minus_yd = -f64::exp_m1(delta * f64::ln_1p(-a));
                -y * one_minus_yd * e / (delta * theta * a)
            }
            Generator::Bb8 {
                theta,
                delta,
                eps_k,
            } => {
                let a = pow_one_minus(delta * t, theta);
                let ln_ratio = f64::ln_1p(-a) - f64::ln_1p(-eps_k);
                ln_ratio * (1.0 - a) * (1.0 - delta * t) / (theta * delta * a)
            }
            Generator::Independence => t * t.ln(),
        }
    }

    pub(crate) fn cdf(&self, u: f64, v: f64) -> f64 {
        self.phi_inverse(self.phi(u) + self.phi(v)).clamp(0.0, 1.0)
    }

    pub(crate) fn pdf(&self, u: f64, v: f64) -> f64 {
        let c = self.cdf(u, v).clamp(f64::MIN_POSITIVE, 1.0);
        let dc = self.phi_prime(c);
        -self.phi_double(c) * self.phi_prime(u) * self.phi_prime(v) / (dc * dc * dc)
    }

    pub(crate) fn h(&self, u: f64, v: f64) -> f64 {
        let c = self.cdf(u, v).clamp(f64::MIN_POSITIVE, 1.0);
        (self.phi_prime(u) / self.phi_prime(c)).clamp(0.0, 1.0)
    }
}

/// Shared Joe/BB6 ratio: phi/phi' = ln(w) * w * (1-t)^{1-theta} / (delta*theta)
/// with w = 1 - (1-t)^theta; the asymptote -(1-t)/(delta*theta) covers the
/// region where (1-t)^theta underflows.
fn joe_ratio(theta: f64, delta: f64, t: f64) -> f64 {
    let e = 1.0 - t;
    let a = e.powf(theta);
    if a < 1e-280 {
        return -e / (delta * theta);
    }
    let w = -f64::exp_m1(theta * f64::ln_1p(-t));
    f64::ln_1p(-a) * w * e.powf(1.0 - theta) / (delta * theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generators() -> Vec<(&'static str, Generator)> {
        vec![
            ("clayton", Generator::Clayton { theta: 0.566 }),
            ("gumbel", Generator::Gumbel { theta: 1.352 }),
            ("frank", Generator::Frank { theta: 2.791 }),
            ("frank-neg", Generator::Frank { theta: -3.2 }),
            ("joe", Generator::Joe { theta: 1.436 }),
            (
                "bb1",
                Generator::Bb1 {
                    theta: 0.254,
                    delta: 1.225,
                },
            ),
            (
                "bb6",
                Generator::Bb6 {
                    theta: 1.27,
                    delta: 1.351,
                },
            ),
            (
                "bb7",
                Generator::Bb7 {
                    theta: 1.271,
                    delta: 0.418,
                },
            ),
            (
                "bb8",
                Generator::Bb8 {
                    theta: 6.0,
                    delta: 0.403,
                    eps_k: pow_one_minus(0.403, 6.0),
                },
            ),
            (
                "bb8-extreme",
                Generator::Bb8 {
                    theta: 22.0,
                    delta: 0.99,
                    eps_k: pow_one_minus(0.99, 22.0),
                },
            ),
            (
                "bb7-extreme",
                Generator::Bb7 {
                    theta: 11.0,
                    delta: 3.0,
                },
            ),
        ]
    }

    #[test]
    fn generator_properties() {
        // phi(1) = 0, phi decreasing and convex on a grid
        for (name, g) in generators() {
            assert!(g.phi(1.0 - 1e-12).abs() < 1e-9, "{name}: phi(1) != 0");
            for i in 1..40 {
                let t = i as f64 / 40.0;
                assert!(g.phi(t) >= 0.0, "{name}: phi({t}) < 0");
                assert!(g.phi_prime(t) < 0.0, "{name}: phi'({t}) >= 0");
                assert!(g.phi_double(t) > 0.0, "{name}: phi''({t}) <= 0");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for (name, g) in generators() {
            for i in 1..20 {
                let t = 0.04 + 0.92 * i as f64 / 20.0;
                let fd1 = (g.phi(t + h) - g.phi(t - h)) / (2.0 * h);
                let an1 = g.phi_prime(t);
                assert!(
                    (fd1 - an1).abs() <= 1e-5 * (1.0 + an1.abs()),
                    "{name}: phi' at {t}: fd {fd1} vs {an1}"
                );
                let fd2 = (g.phi_prime(t + h) - g.phi_prime(t - h)) / (2.0 * h);
                let an2 = g.phi_double(t);
                assert!(
                    (fd2 - an2).abs() <= 1e-4 * (1.0 + an2.abs()),
                    "{name}: phi'' at {t}: fd {fd2} vs {an2}"
                );
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for (name, g) in generators() {
            for i in 1..30 {
                let t = i as f64 / 30.0 - 1.0 / 60.0;
                let back = g.phi_inverse(g.phi(t));
                assert!((back - t).abs() < 1e-9, "{name}: t={t} back={back}");
            }
        }
    }

    #[test]
    fn ratio_agrees_with_direct_quotient() {
        for (name, g) in generators() {
            for i in 1..20 {
                let t = 0.05 + 0.9 * i as f64 / 20.0;
                let direct = g.phi(t) / g.phi_prime(t);
                let stable = g.ratio(t);
                assert!(
                    (direct - stable).abs() < 1e-10 * (1.0 + direct.abs()),
                    "{name}: t={t} direct={direct} stable={stable}"
                );
            }
            // endpoints stay finite
            assert!(g.ratio(1e-12).is_finite(), "{name} at 0");
            assert!(g.ratio(1.0 - 1e-12).is_finite(), "{name} at 1");
        }
    }

    #[test]
    fn clayton_cdf_reference() {
        let g = Generator::Clayton { theta: 0.566 };
        // (u^-t + v^-t - 1)^(-1/t) at (0.5, 0.5), high-precision evaluation
        assert!((g.cdf(0.5, 0.5) - 0.30431473939386094).abs() < 1e-14);
        let g6 = Generator::Clayton { theta: 6.0 };
        assert!((g6.cdf(0.1, 0.1) - 0.089_089_879_238_192_09).abs() < 1e-14);
    }

    #[test]
    fn frank_pdf_reference() {
        let g = Generator::Frank { theta: 2.791 };
        assert!((g.pdf(0.5, 0.5) - 1.157_250_631_107_886).abs() < 1e-12);
    }

    #[test]
    fn clayton_h_reference() {
        let g = Generator::Clayton { theta: 0.566 };
        assert!((g.h(0.5, 0.5) - 0.45951190981914711).abs() < 1e-13);
    }

    #[test]
    fn independence_limit() {
        let g = Generator::Independence;
        assert!((g.cdf(0.3, 0.7) - 0.21).abs() < 1e-12);
        assert!((g.pdf(0.4, 0.9) - 1.0).abs() < 1e-9);
        assert!((g.h(0.25, 0.6) - 0.6).abs() < 1e-10);
    }
}
