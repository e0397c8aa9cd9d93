//! The 21 copula families: 12 base families plus the 180-degree rotated
//! (survival) variants of the asymmetric ones.
//!
//! All evaluations go through [`CopulaFamily`]: CDF, density, conditional
//! h-function and its inverse, Kendall's tau, and tail dependence. Rotation is
//! applied uniformly on top of the base-family code paths:
//!
//!   C180(u,v) = u + v - 1 + C(1-u, 1-v)
//!   c180(u,v) = c(1-u, 1-v)
//!   h180(v|u) = 1 - h(1-v | 1-u)
//!
//! with tau unchanged and the tail coefficients swapped.

pub mod archimedean;
pub mod elliptical;
pub mod params;
pub mod tau;
pub mod tawn;

use crate::error::{Error, Result};
use crate::num::root::brent;
use crate::num::special::t_cdf;
use archimedean::Generator;
use serde::{Deserialize, Serialize};
use tawn::Pickands;

pub use params::{CopulaParams, TailDependence, UnitPair, UNIT_EPS};

/// Base family, before any rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    Gaussian,
    StudentT,
    Clayton,
    Gumbel,
    Frank,
    Joe,
    Bb1,
    Bb6,
    Bb7,
    Bb8,
    Tawn1,
    Tawn2,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 12] = [
        FamilyKind::Gaussian,
        FamilyKind::StudentT,
        FamilyKind::Clayton,
        FamilyKind::Gumbel,
        FamilyKind::Frank,
        FamilyKind::Joe,
        FamilyKind::Bb1,
        FamilyKind::Bb6,
        FamilyKind::Bb7,
        FamilyKind::Bb8,
        FamilyKind::Tawn1,
        FamilyKind::Tawn2,
    ];

    /// Radially symmetric or comprehensive families gain nothing from a 180
    /// degree rotation; only the asymmetric ones are rotated.
    pub fn rotatable(self) -> bool {
        !matches!(
            self,
            FamilyKind::Gaussian | FamilyKind::StudentT | FamilyKind::Frank
        )
    }

    pub fn parameter_count(self) -> usize {
        match self {
            FamilyKind::Gaussian
            | FamilyKind::Clayton
            | FamilyKind::Gumbel
            | FamilyKind::Frank
            | FamilyKind::Joe => 1,
            _ => 2,
        }
    }

    fn base_name(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "Gaussian",
            FamilyKind::StudentT => "Student-t",
            FamilyKind::Clayton => "Clayton",
            FamilyKind::Gumbel => "Gumbel",
            FamilyKind::Frank => "Frank",
            FamilyKind::Joe => "Joe",
            FamilyKind::Bb1 => "BB1",
            FamilyKind::Bb6 => "BB6",
            FamilyKind::Bb7 => "BB7",
            FamilyKind::Bb8 => "BB8",
            FamilyKind::Tawn1 => "Tawn type 1",
            FamilyKind::Tawn2 => "Tawn type 2",
        }
    }

    fn slug(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::StudentT => "student-t",
            FamilyKind::Clayton => "clayton",
            FamilyKind::Gumbel => "gumbel",
            FamilyKind::Frank => "frank",
            FamilyKind::Joe => "joe",
            FamilyKind::Bb1 => "bb1",
            FamilyKind::Bb6 => "bb6",
            FamilyKind::Bb7 => "bb7",
            FamilyKind::Bb8 => "bb8",
            FamilyKind::Tawn1 => "tawn1",
            FamilyKind::Tawn2 => "tawn2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    None,
    Deg180,
}

/// A concrete copula family: base kind plus rotation tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CopulaFamily {
    kind: FamilyKind,
    rotation: Rotation,
}

impl CopulaFamily {
    pub fn new(kind: FamilyKind, rotation: Rotation) -> Result<Self> {
        if rotation == Rotation::Deg180 && !kind.rotatable() {
            return Err(Error::InvalidParams {
                family: kind.base_name().to_string(),
                detail: "180-degree rotation not defined for this family".into(),
            });
        }
        Ok(Self { kind, rotation })
    }

    pub fn unrotated(kind: FamilyKind) -> Self {
        Self {
            kind,
            rotation: Rotation::None,
        }
    }

    pub fn survival(kind: FamilyKind) -> Result<Self> {
        Self::new(kind, Rotation::Deg180)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn is_rotated(&self) -> bool {
        self.rotation == Rotation::Deg180
    }

    pub fn parameter_count(&self) -> usize {
        self.kind.parameter_count()
    }

    /// The full catalog of 21 families in fit-report order.
    pub fn catalog() -> Vec<CopulaFamily> {
        let mut out = Vec::with_capacity(21);
        for kind in FamilyKind::ALL {
            out.push(CopulaFamily::unrotated(kind));
        }
        for kind in FamilyKind::ALL {
            if kind.rotatable() {
                out.push(CopulaFamily::survival(kind).unwrap());
            }
        }
        out
    }

    /// Stable identifier used in CLI flags and file output.
    pub fn slug(&self) -> String {
        match self.rotation {
            Rotation::None => self.kind.slug().to_string(),
            Rotation::Deg180 => match self.kind {
                FamilyKind::Tawn1 | FamilyKind::Tawn2 => {
                    format!("rotated-{}", self.kind.slug())
                }
                _ => format!("survival-{}", self.kind.slug()),
            },
        }
    }

    pub fn parse_slug(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let (rotated, base) = if let Some(rest) = norm.strip_prefix("survival-") {
            (true, rest.to_string())
        } else if let Some(rest) = norm.strip_prefix("rotated-") {
            (true, rest.to_string())
        } else {
            (false, norm)
        };
        let kind = FamilyKind::ALL
            .into_iter()
            .find(|k| k.slug() == base || (base == "t" && *k == FamilyKind::StudentT))
            .ok_or_else(|| Error::Usage(format!("unknown copula family '{s}'")))?;
        if rotated {
            CopulaFamily::survival(kind)
        } else {
            Ok(CopulaFamily::unrotated(kind))
        }
    }
}

impl std::fmt::Display for CopulaFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.rotation {
            Rotation::None => write!(f, "{}", self.kind.base_name()),
            Rotation::Deg180 => match self.kind {
                FamilyKind::Tawn1 => write!(f, "Rotated Tawn type 1 (180 degrees)"),
                FamilyKind::Tawn2 => write!(f, "Rotated Tawn type 2 (180 degrees)"),
                _ => write!(f, "Survival {}", self.kind.base_name()),
            },
        }
    }
}

/// True iff every supplied parameter lies within its admissible range and no
/// extraneous parameter is present.
pub fn validate_params(family: CopulaFamily, params: &CopulaParams) -> bool {
    let th = params.theta;
    let de = params.delta;
    let nu = params.nu;
    if !th.is_finite() {
        return false;
    }
    if family.kind() != FamilyKind::StudentT && nu.is_some() {
        return false;
    }
    match family.kind() {
        FamilyKind::Gaussian => de.is_none() && th > -1.0 && th < 1.0,
        FamilyKind::StudentT => {
            de.is_none() && th > -1.0 && th < 1.0 && nu.map(|v| v > 2.0).unwrap_or(false)
        }
        FamilyKind::Clayton => de.is_none() && th > 0.0,
        FamilyKind::Gumbel => de.is_none() && th >= 1.0,
        FamilyKind::Frank => de.is_none() && th != 0.0,
        FamilyKind::Joe => de.is_none() && th > 1.0,
        FamilyKind::Bb1 => th > 0.0 && de.map(|d| d >= 1.0).unwrap_or(false),
        FamilyKind::Bb6 => th >= 1.0 && de.map(|d| d >= 1.0).unwrap_or(false),
        FamilyKind::Bb7 => th >= 1.0 && de.map(|d| d > 0.0).unwrap_or(false),
        FamilyKind::Bb8 => th >= 1.0 && de.map(|d| d > 0.0 && d < 1.0).unwrap_or(false),
        FamilyKind::Tawn1 | FamilyKind::Tawn2 => {
            th >= 1.0 && de.map(|d| (0.0..=1.0).contains(&d)).unwrap_or(false)
        }
    }
}

fn checked(family: CopulaFamily, params: &CopulaParams) -> Result<()> {
    if validate_params(family, params) {
        Ok(())
    } else {
        Err(Error::InvalidParams {
            family: family.to_string(),
            detail: format!("{params:?}"),
        })
    }
}

enum Engine {
    Arch(Generator),
    Gaussian { rho: f64 },
    StudentT { rho: f64, nu: f64 },
    Ev(Pickands),
}

impl Engine {
    fn build(kind: FamilyKind, params: &CopulaParams) -> Engine {
        match kind {
            FamilyKind::Gaussian => Engine::Gaussian { rho: params.theta },
            FamilyKind::StudentT => Engine::StudentT {
                rho: params.theta,
                nu: params.nu.unwrap_or(f64::NAN),
            },
            FamilyKind::Tawn1 => Engine::Ev(Pickands::tawn1(
                params.theta,
                params.delta.unwrap_or(f64::NAN),
            )),
            FamilyKind::Tawn2 => Engine::Ev(Pickands::tawn2(
                params.theta,
                params.delta.unwrap_or(f64::NAN),
            )),
            _ => Engine::Arch(
                Generator::for_kind(kind, params).expect("non-elliptical, non-EV kind"),
            ),
        }
    }

    fn cdf(&self, u: f64, v: f64) -> f64 {
        match self {
            Engine::Arch(g) => g.cdf(u, v),
            Engine::Gaussian { rho } => elliptical::gaussian_cdf(u, v, *rho),
            Engine::StudentT { rho, nu } => elliptical::t_copula_cdf(u, v, *rho, *nu),
            Engine::Ev(a) => tawn::tawn_cdf(u, v, a),
        }
    }

    fn pdf(&self, u: f64, v: f64) -> f64 {
        match self {
            Engine::Arch(g) => g.pdf(u, v),
            Engine::Gaussian { rho } => elliptical::gaussian_pdf(u, v, *rho),
            Engine::StudentT { rho, nu } => elliptical::t_copula_pdf(u, v, *rho, *nu),
            Engine::Ev(a) => tawn::tawn_pdf(u, v, a),
        }
    }

    fn h(&self, u: f64, v: f64) -> f64 {
        match self {
            Engine::Arch(g) => g.h(u, v),
            Engine::Gaussian { rho } => elliptical::gaussian_h(u, v, *rho),
            Engine::StudentT { rho, nu } => elliptical::t_copula_h(u, v, *rho, *nu),
            Engine::Ev(a) => tawn::tawn_h(u, v, a),
        }
    }
}

impl CopulaFamily {
    /// C(u, v).
    pub fn cdf(&self, params: &CopulaParams, p: UnitPair) -> Result<f64> {
        checked(*self, params)?;
        let engine = Engine::build(self.kind, params);
        let c = match self.rotation {
            Rotation::None => engine.cdf(p.u(), p.v()),
            Rotation::Deg180 => {
                let r = p.reflected();
                p.u() + p.v() - 1.0 + engine.cdf(r.u(), r.v())
            }
        };
        Ok(c.clamp(0.0, 1.0))
    }

    /// Copula density c(u, v). Overflow in intermediate exponentials is
    /// reported as an error, never silently clipped.
    pub fn pdf(&self, params: &CopulaParams, p: UnitPair) -> Result<f64> {
        checked(*self, params)?;
        let engine = Engine::build(self.kind, params);
        let d = match self.rotation {
            Rotation::None => engine.pdf(p.u(), p.v()),
            Rotation::Deg180 => {
                let r = p.reflected();
                engine.pdf(r.u(), r.v())
            }
        };
        if !d.is_finite() {
            return Err(Error::Overflow(format!(
                "{self} density at ({}, {})",
                p.u(),
                p.v()
            )));
        }
        Ok(d)
    }

    /// Conditional CDF h(v | u) = dC/du.
    pub fn h(&self, params: &CopulaParams, p: UnitPair) -> Result<f64> {
        checked(*self, params)?;
        let engine = Engine::build(self.kind, params);
        let h = match self.rotation {
            Rotation::None => engine.h(p.u(), p.v()),
            Rotation::Deg180 => {
                let r = p.reflected();
                1.0 - engine.h(r.u(), r.v())
            }
        };
        Ok(h.clamp(0.0, 1.0))
    }

    /// Inverse of the h-function in its second argument: the v with
    /// h(v | u) = q, accurate to |h(v|u) - q| < 1e-9.
    pub fn h_inverse(&self, params: &CopulaParams, u: f64, q: f64) -> Result<f64> {
        checked(*self, params)?;
        let u = u.clamp(UNIT_EPS, 1.0 - UNIT_EPS);
        let q = q.clamp(UNIT_EPS, 1.0 - UNIT_EPS);
        // closed forms for the elliptical families
        if self.kind == FamilyKind::Gaussian {
            return Ok(elliptical::gaussian_h_inverse(u, q, params.theta));
        }
        if self.kind == FamilyKind::StudentT {
            return Ok(elliptical::t_copula_h_inverse(
                u,
                q,
                params.theta,
                params.nu.unwrap_or(f64::NAN),
            ));
        }
        let engine = Engine::build(self.kind, params);
        let (uu, target) = match self.rotation {
            Rotation::None => (u, q),
            Rotation::Deg180 => (1.0 - u, 1.0 - q),
        };
        let f = |v: f64| engine.h(uu, v) - target;
        let lo = UNIT_EPS;
        let hi = 1.0 - UNIT_EPS;
        let v = if f(lo) >= 0.0 {
            lo
        } else if f(hi) <= 0.0 {
            hi
        } else {
            brent(f, lo, hi, 1e-13, 200)?
        };
        let v = match self.rotation {
            Rotation::None => v,
            Rotation::Deg180 => 1.0 - v,
        };
        let check = self.h(params, UnitPair::new(u, v))?;
        if (check - q).abs() > 1e-9 {
            return Err(Error::NoConvergence(format!(
                "{self} h_inverse(u={u}, q={q}): residual {:.3e}",
                (check - q).abs()
            )));
        }
        Ok(v)
    }

    /// Kendall's tau implied by the parameters (rotation-invariant).
    pub fn kendall_tau(&self, params: &CopulaParams) -> Result<f64> {
        checked(*self, params)?;
        tau::kendall_tau(*self, params)
    }

    /// Parameters whose implied tau equals the argument, the second parameter
    /// of two-parameter families held at its documented default.
    pub fn params_from_tau(&self, tau: f64) -> Result<CopulaParams> {
        tau::params_from_tau(*self, tau)
    }

    /// Lower and upper tail-dependence coefficients; rotation swaps them.
    pub fn tail_dependence(&self, params: &CopulaParams) -> Result<TailDependence> {
        checked(*self, params)?;
        let th = params.theta;
        let de = params.delta.unwrap_or(f64::NAN);
        let base = match self.kind {
            FamilyKind::Gaussian | FamilyKind::Frank => TailDependence {
                lower: 0.0,
                upper: 0.0,
            },
            FamilyKind::StudentT => {
                let nu = params.nu.unwrap_or(f64::NAN);
                let lam = 2.0 * t_cdf(
                    -((nu + 1.0) * (1.0 - th) / (1.0 + th)).sqrt(),
                    nu + 1.0,
                );
                TailDependence {
                    lower: lam,
                    upper: lam,
                }
            }
            FamilyKind::Clayton => TailDependence {
                lower: (-std::f64::consts::LN_2 / th).exp(),
                upper: 0.0,
            },
            FamilyKind::Gumbel | FamilyKind::Joe => TailDependence {
                lower: 0.0,
                upper: 2.0 - 2f64.powf(1.0 / th),
            },
            FamilyKind::Bb1 => TailDependence {
                lower: 2f64.powf(-1.0 / (th * de)),
                upper: 2.0 - 2f64.powf(1.0 / de),
            },
            FamilyKind::Bb6 => TailDependence {
                lower: 0.0,
                upper: 2.0 - 2f64.powf(1.0 / (th * de)),
            },
            FamilyKind::Bb7 => TailDependence {
                lower: 2f64.powf(-1.0 / de),
                upper: 2.0 - 2f64.powf(1.0 / th),
            },
            FamilyKind::Bb8 => TailDependence {
                lower: 0.0,
                upper: 0.0,
            },
            FamilyKind::Tawn1 | FamilyKind::Tawn2 => {
                let a = match self.kind {
                    FamilyKind::Tawn1 => Pickands::tawn1(th, de),
                    _ => Pickands::tawn2(th, de),
                };
                let (half, _, _) = a.eval(0.5);
                TailDependence {
                    lower: 0.0,
                    upper: 2.0 - 2.0 * half,
                }
            }
        };
        Ok(match self.rotation {
            Rotation::None => base,
            Rotation::Deg180 => base.swapped(),
        })
    }
}
