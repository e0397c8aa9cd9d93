//! Kendall's tau: closed forms, quadrature identities, and inversion.
//!
//! Families without a clean closed form use the Archimedean identity
//! tau = 1 + 4 * int_0^1 phi(t)/phi'(t) dt with the cancellation-safe
//! generator quotient, or the extreme-value identity
//! tau = int_0^1 t(1-t) A''(t)/A(t) dt for the Tawn families.

use super::archimedean::Generator;
use super::params::CopulaParams;
use super::tawn::Pickands;
use super::{CopulaFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::num::quad::integrate;
use crate::num::root::brent;

const QUAD_CLAMP: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-9;

/// First Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt; even part of the
/// Frank tau expression. Valid for negative arguments as well.
pub fn debye1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0 - x / 4.0;
    }
    let integrand = |t: f64| {
        if t.abs() < 1e-8 {
            1.0 - t / 2.0
        } else {
            t / f64::exp_m1(t)
        }
    };
    // For x < 0 the integral runs right-to-left; quadrature handles the sign.
    let val = integrate(integrand, 0.0, x, 1e-10 * x.abs().max(1.0))
        .expect("Debye integrand is smooth");
    val / x
}

fn arch_tau_by_quadrature(generator: Generator) -> Result<f64> {
    let val = integrate(
        |t| generator.ratio(t),
        QUAD_CLAMP,
        1.0 - QUAD_CLAMP,
        QUAD_TOL,
    )?;
    Ok(1.0 + 4.0 * val)
}

fn ev_tau_by_quadrature(a: Pickands) -> Result<f64> {
    let val = integrate(
        |t| {
            let (av, _, app) = a.eval(t);
            t * (1.0 - t) * app / av
        },
        QUAD_CLAMP,
        1.0 - QUAD_CLAMP,
        QUAD_TOL,
    )?;
    Ok(val)
}

/// Kendall's tau implied by `params`; rotation preserves tau.
pub(crate) fn kendall_tau(family: CopulaFamily, params: &CopulaParams) -> Result<f64> {
    let theta = params.theta;
    let delta = params.delta.unwrap_or(f64::NAN);
    Ok(match family.kind() {
        FamilyKind::Gaussian | FamilyKind::StudentT => {
            2.0 / std::f64::consts::PI * theta.asin()
        }
        FamilyKind::Clayton => theta / (theta + 2.0),
        FamilyKind::Gumbel => (theta - 1.0) / theta,
        FamilyKind::Frank => {
            if theta.abs() < 1e-8 {
                0.0
            } else {
                1.0 - 4.0 / theta * (1.0 - debye1(theta))
            }
        }
        FamilyKind::Bb1 => 1.0 - 2.0 / (delta * (theta + 2.0)),
        FamilyKind::Joe | FamilyKind::Bb6 | FamilyKind::Bb7 | FamilyKind::Bb8 => {
            let generator = Generator::for_kind(family.kind(), params)
                .expect("Archimedean kind has a generator");
            arch_tau_by_quadrature(generator)?
        }
        FamilyKind::Tawn1 => ev_tau_by_quadrature(Pickands::tawn1(theta, delta))?,
        FamilyKind::Tawn2 => ev_tau_by_quadrature(Pickands::tawn2(theta, delta))?,
    })
}

/// Second-parameter defaults used when inverting tau for two-parameter
/// families (and as maximum-likelihood starting points).
pub(crate) fn default_second_parameter(kind: FamilyKind) -> Option<f64> {
    match kind {
        FamilyKind::Bb1 => Some(1.2),
        FamilyKind::Bb6 => Some(1.3),
        FamilyKind::Bb7 => Some(0.4),
        FamilyKind::Bb8 => Some(0.5),
        FamilyKind::Tawn1 | FamilyKind::Tawn2 => Some(0.5),
        _ => None,
    }
}

/// Student-t starting value for the degrees of freedom.
pub(crate) const STUDENT_T_START_NU: f64 = 8.0;

fn out_of_range(family: CopulaFamily, tau: f64) -> Error {
    Error::TauOutOfRange {
        family: family.to_string(),
        tau,
    }
}

/// Invert tau to parameters, fixing the second parameter of two-parameter
/// families at its default. Inverse of [`kendall_tau`] to 1e-6 on theta.
pub(crate) fn params_from_tau(family: CopulaFamily, tau: f64) -> Result<CopulaParams> {
    if !(-1.0..1.0).contains(&tau) || tau.abs() >= 0.999 {
        return Err(out_of_range(family, tau));
    }
    let kind = family.kind();
    let solve = |lo: f64, hi: f64, make: &dyn Fn(f64) -> CopulaParams| -> Result<CopulaParams> {
        let f = |theta: f64| {
            kendall_tau(family, &make(theta))
                .map(|t| t - tau)
                .unwrap_or(f64::NAN)
        };
        if f(lo).signum() == f(hi).signum() {
            return Err(out_of_range(family, tau));
        }
        let theta = brent(f, lo, hi, 1e-9, 200)?;
        Ok(make(theta))
    };
    match kind {
        FamilyKind::Gaussian => Ok(CopulaParams::one(
            (std::f64::consts::PI * tau / 2.0).sin(),
        )),
        FamilyKind::StudentT => Ok(CopulaParams::elliptical(
            (std::f64::consts::PI * tau / 2.0).sin(),
            STUDENT_T_START_NU,
        )),
        FamilyKind::Clayton => {
            if tau <= 0.0 {
                return Err(out_of_range(family, tau));
            }
            Ok(CopulaParams::one(2.0 * tau / (1.0 - tau)))
        }
        FamilyKind::Gumbel => {
            if tau < 0.0 {
                return Err(out_of_range(family, tau));
            }
            Ok(CopulaParams::one(1.0 / (1.0 - tau)))
        }
        FamilyKind::Frank => {
            if tau == 0.0 {
                return Ok(CopulaParams::one(0.0));
            }
            solve(-80.0, 80.0, &CopulaParams::one)
        }
        FamilyKind::Joe => {
            if tau <= 0.0 {
                return Err(out_of_range(family, tau));
            }
            solve(1.0 + 1e-9, 150.0, &CopulaParams::one)
        }
        FamilyKind::Bb1 => {
            let delta = default_second_parameter(kind).unwrap();
            let theta = 2.0 / (delta * (1.0 - tau)) - 2.0;
            if theta <= 0.0 {
                return Err(out_of_range(family, tau));
            }
            Ok(CopulaParams::two(theta, delta))
        }
        FamilyKind::Bb6 | FamilyKind::Bb7 | FamilyKind::Bb8 => {
            let delta = default_second_parameter(kind).unwrap();
            solve(1.0 + 1e-9, 60.0, &|theta| CopulaParams::two(theta, delta))
        }
        FamilyKind::Tawn1 | FamilyKind::Tawn2 => {
            let delta = default_second_parameter(kind).unwrap();
            if tau < 0.0 {
                return Err(out_of_range(family, tau));
            }
            if tau == 0.0 {
                return Ok(CopulaParams::two(1.0, delta));
            }
            solve(1.0 + 1e-9, 60.0, &|theta| CopulaParams::two(theta, delta))
        }
    }
}
