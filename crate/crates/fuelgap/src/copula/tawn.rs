//! Tawn extreme-value copulas (types 1 and 2).
//!
//! C(u,v) = exp(ln(uv) * A(t)) with t = ln(v)/ln(uv) and Pickands function
//!
//!   type 1:  A(t) = (1-d)(1-t) + ((d(1-t))^th + t^th)^(1/th)
//!   type 2:  A(t) = (1-d) t    + ((1-t)^th + (d t)^th)^(1/th)
//!
//! Type 1 skews the density toward the left margin, type 2 toward the right;
//! the remaining asymmetry parameter of the three-parameter family is fixed at
//! one. A'' is analytic, which both the density and the Kendall's-tau
//! quadrature use.

/// Pickands dependence function with first and second derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Pickands {
    pub theta: f64,
    pub delta: f64,
    pub right_skew: bool,
}

impl Pickands {
    pub(crate) fn tawn1(theta: f64, delta: f64) -> Self {
        Self {
            theta,
            delta,
            right_skew: false,
        }
    }

    pub(crate) fn tawn2(theta: f64, delta: f64) -> Self {
        Self {
            theta,
            delta,
            right_skew: true,
        }
    }

    /// A(t), A'(t), A''(t).
    pub(crate) fn eval(&self, t: f64) -> (f64, f64, f64) {
        let th = self.theta;
        let d = self.delta;
        let dth = d.powf(th);
        let s = 1.0 - t;
        let (g, gp, gpp, lin, lin_slope) = if self.right_skew {
            (
                s.powf(th) + dth * t.powf(th),
                -th * s.powf(th - 1.0) + th * dth * t.powf(th - 1.0),
                th * (th - 1.0) * (s.powf(th - 2.0) + dth * t.powf(th - 2.0)),
                (1.0 - d) * t,
                1.0 - d,
            )
        } else {
            (
                dth * s.powf(th) + t.powf(th),
                -th * dth * s.powf(th - 1.0) + th * t.powf(th - 1.0),
                th * (th - 1.0) * (dth * s.powf(th - 2.0) + t.powf(th - 2.0)),
                (1.0 - d) * s,
                -(1.0 - d),
            )
        };
        if g <= 0.0 {
            // delta = 0 degenerates to independence
            return (1.0, 0.0, 0.0);
        }
        let inv_th = 1.0 / th;
        let b = g.powf(inv_th);
        let bp = inv_th * g.powf(inv_th - 1.0) * gp;
        let bpp = inv_th * (inv_th - 1.0) * g.powf(inv_th - 2.0) * gp * gp
            + inv_th * g.powf(inv_th - 1.0) * gpp;
        (lin + b, lin_slope + bp, bpp)
    }
}

pub(crate) fn tawn_cdf(u: f64, v: f64, a: &Pickands) -> f64 {
    let s = u.ln() + v.ln();
    let t = v.ln() / s;
    let (av, _, _) = a.eval(t);
    (s * av).exp().clamp(0.0, 1.0)
}

/// h(v|u) = dC/du = C * (A - t A') / u.
pub(crate) fn tawn_h(u: f64, v: f64, a: &Pickands) -> f64 {
    let s = u.ln() + v.ln();
    let t = v.ln() / s;
    let (av, ap, _) = a.eval(t);
    let c = (s * av).exp();
    (c * (av - t * ap) / u).clamp(0.0, 1.0)
}

/// c(u,v) = C/(uv) * [ (A - t A')(A + (1-t) A') - t(1-t) A'' / s ].
pub(crate) fn tawn_pdf(u: f64, v: f64, a: &Pickands) -> f64 {
    let s = u.ln() + v.ln();
    let t = v.ln() / s;
    let (av, ap, app) = a.eval(t);
    let c = (s * av).exp();
    let bracket = (av - t * ap) * (av + (1.0 - t) * ap) - t * (1.0 - t) * app / s;
    (c / (u * v)) * bracket
}
