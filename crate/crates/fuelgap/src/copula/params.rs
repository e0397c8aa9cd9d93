//! Parameter and point types shared by every copula family.

use serde::{Deserialize, Serialize};

/// Clamp bound for unit-square inputs; log/quantile singularities live at the
/// exact boundary, so every evaluation point is pulled inside by this margin.
pub const UNIT_EPS: f64 = 1e-10;

/// A point on the open unit square. Construction clamps both coordinates to
/// `[UNIT_EPS, 1 - UNIT_EPS]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPair {
    u: f64,
    v: f64,
}

impl UnitPair {
    pub fn new(u: f64, v: f64) -> Self {
        Self {
            u: u.clamp(UNIT_EPS, 1.0 - UNIT_EPS),
            v: v.clamp(UNIT_EPS, 1.0 - UNIT_EPS),
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// The 180-degree reflection (1-u, 1-v).
    pub fn reflected(&self) -> Self {
        Self {
            u: 1.0 - self.u,
            v: 1.0 - self.v,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
        }
    }
}

/// Parameter vector for any family: `theta` always present (the correlation
/// for elliptical families), `delta` for the two-parameter Archimedean and
/// Tawn families, `nu` for Student-t degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopulaParams {
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
}

impl CopulaParams {
    pub fn one(theta: f64) -> Self {
        Self {
            theta,
            delta: None,
            nu: None,
        }
    }

    pub fn two(theta: f64, delta: f64) -> Self {
        Self {
            theta,
            delta: Some(delta),
            nu: None,
        }
    }

    pub fn elliptical(rho: f64, nu: f64) -> Self {
        Self {
            theta: rho,
            delta: None,
            nu: Some(nu),
        }
    }
}

/// Lower and upper tail-dependence coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDependence {
    pub lower: f64,
    pub upper: f64,
}

impl TailDependence {
    pub fn swapped(self) -> Self {
        Self {
            lower: self.upper,
            upper: self.lower,
        }
    }
}
