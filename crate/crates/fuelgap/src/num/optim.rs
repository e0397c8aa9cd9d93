//! Box-constrained maximization via a smooth reparameterization onto R^k.
//!
//! Each bounded coordinate is mapped to the real line (atanh for correlations,
//! scaled logit for intervals), then a quasi-Newton (BFGS) iteration with
//! finite-difference gradients runs unconstrained. A derivative-free
//! Nelder-Mead pass takes over if BFGS stalls.

/// How one coordinate is constrained.
#[derive(Debug, Clone, Copy)]
pub enum Bound {
    /// Correlation-type parameter on (-1, 1), mapped by atanh.
    Correlation,
    /// Open interval (lo, hi), mapped by a scaled logit.
    Interval(f64, f64),
}

impl Bound {
    pub fn to_unconstrained(self, v: f64) -> f64 {
        match self {
            Bound::Correlation => v.clamp(-1.0 + 1e-12, 1.0 - 1e-12).atanh(),
            Bound::Interval(lo, hi) => {
                let p = ((v - lo) / (hi - lo)).clamp(1e-12, 1.0 - 1e-12);
                (p / (1.0 - p)).ln()
            }
        }
    }

    pub fn to_constrained(self, z: f64) -> f64 {
        match self {
            Bound::Correlation => z.tanh(),
            Bound::Interval(lo, hi) => {
                let p = 1.0 / (1.0 + (-z).exp());
                lo + (hi - lo) * p
            }
        }
    }

    /// Pull a value strictly inside the box (used for starting points).
    pub fn clamp_interior(self, v: f64) -> f64 {
        match self {
            Bound::Correlation => v.clamp(-0.999_999, 0.999_999),
            Bound::Interval(lo, hi) => {
                let pad = 1e-9 * (hi - lo);
                v.clamp(lo + pad, hi - pad)
            }
        }
    }

    pub fn lo(self) -> f64 {
        match self {
            Bound::Correlation => -1.0,
            Bound::Interval(lo, _) => lo,
        }
    }

    pub fn hi(self) -> f64 {
        match self {
            Bound::Correlation => 1.0,
            Bound::Interval(_, hi) => hi,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Maximum {
    /// Arg max in the original (constrained) coordinates.
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

const MAX_ITER: usize = 500;
const OBJ_REL_TOL: f64 = 1e-10;
const GRAD_TOL: f64 = 1e-6;

fn map_out(z: &[f64], bounds: &[Bound]) -> Vec<f64> {
    z.iter().zip(bounds).map(|(&zi, b)| b.to_constrained(zi)).collect()
}

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, z: &mut [f64], fz: f64) -> Vec<f64> {
    let n = z.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let h = 1e-6 * (1.0 + z[i].abs());
        let zi = z[i];
        z[i] = zi + h;
        let fp = f(z);
        z[i] = zi - h;
        let fm = f(z);
        z[i] = zi;
        g[i] = if fp.is_finite() && fm.is_finite() {
            (fp - fm) / (2.0 * h)
        } else if fp.is_finite() {
            (fp - fz) / h
        } else if fm.is_finite() {
            (fz - fm) / h
        } else {
            0.0
        };
    }
    g
}

/// Maximize `f` over the box described by `bounds`, starting from `start`.
pub fn maximize<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], bounds: &[Bound]) -> Maximum {
    let n = start.len();
    debug_assert_eq!(n, bounds.len());
    let mut z: Vec<f64> = start
        .iter()
        .zip(bounds)
        .map(|(&v, b)| b.to_unconstrained(b.clamp_interior(v)))
        .collect();
    let obj = |zz: &[f64]| f(&map_out(zz, bounds));

    let mut fz = obj(&z);
    if !fz.is_finite() {
        // objective dead at the start; try the box midpoint then give up to NM
        let mid: Vec<f64> = bounds.iter().map(|_| 0.0).collect();
        let fmid = obj(&mid);
        if fmid.is_finite() {
            z = mid;
            fz = fmid;
        } else {
            return Maximum {
                x: map_out(&z, bounds),
                value: fz,
                converged: false,
                iterations: 0,
            };
        }
    }

    // BFGS on the negated objective (we track f directly and flip signs inline).
    let mut hinv = vec![vec![0.0; n]; n];
    for (i, row) in hinv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut g = fd_gradient(&obj, &mut z, fz);
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled = false;

    for iter in 0..MAX_ITER {
        iterations = iter + 1;
        let scale = 1.0 + fz.abs();
        let gnorm = g.iter().map(|gi| gi * gi).sum::<f64>().sqrt();
        if gnorm < GRAD_TOL * scale {
            converged = true;
            break;
        }
        // ascent direction d = Hinv * g
        let mut d = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                d[i] += hinv[i][j] * g[j];
            }
        }
        let dg: f64 = d.iter().zip(&g).map(|(di, gi)| di * gi).sum();
        if dg <= 0.0 {
            // not an ascent direction; reset to steepest ascent
            d.copy_from_slice(&g);
            for (i, row) in hinv.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        // backtracking line search (Armijo)
        let dg: f64 = d.iter().zip(&g).map(|(di, gi)| di * gi).sum();
        let mut step = 1.0;
        let mut z_new = z.clone();
        let mut f_new = f64::NEG_INFINITY;
        let mut ok = false;
        for _ in 0..40 {
            for i in 0..n {
                z_new[i] = z[i] + step * d[i];
            }
            f_new = obj(&z_new);
            if f_new.is_finite() && f_new >= fz + 1e-4 * step * dg {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if !ok {
            stalled = true;
            break;
        }
        let g_new = fd_gradient(&obj, &mut z_new, f_new);
        // BFGS inverse-Hessian update with s = z_new - z, y = -(g_new - g)
        // (minimizing -f means the standard update uses the negated gradients)
        let s: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let mut hy = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    hy[i] += hinv[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy)
                        - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let rel_change = (f_new - fz).abs() / (1.0 + fz.abs());
        let step_norm = s.iter().map(|si| si * si).sum::<f64>().sqrt();
        z = z_new;
        fz = f_new;
        g = g_new;
        if rel_change < OBJ_REL_TOL && step_norm < 1e-8 {
            converged = true;
            break;
        }
    }

    if converged {
        return Maximum {
            x: map_out(&z, bounds),
            value: fz,
            converged: true,
            iterations,
        };
    }

    // simplex fallback, started where BFGS left off
    let nm = nelder_mead(&obj, &z, fz);
    let better = if nm.1 > fz { nm } else { (z, fz) };
    Maximum {
        x: map_out(&better.0, bounds),
        value: better.1,
        converged: !stalled || nm_progressed(fz, better.1),
        iterations,
    }
}

fn nm_progressed(before: f64, after: f64) -> bool {
    (after - before).abs() < 1e-7 * (1.0 + before.abs())
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], f_start: f64) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f_start));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += 0.25 * (1.0 + p[i].abs());
        let fp = f(&p);
        simplex.push((p, fp));
    }
    for _ in 0..600 {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (best - worst).abs() < 1e-12 * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = f(&reflect);
        if fr > simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let fe = f(&expand);
            simplex[n] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            let fc = f(&contract);
            if fc > simplex[n].1 {
                simplex[n] = (contract, fc);
            } else {
                let best_pt = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (pi, bi) in entry.0.iter_mut().zip(&best_pt) {
                        *pi = bi + 0.5 * (*pi - bi);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}
