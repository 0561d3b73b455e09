//! Root-finding baseline: solve `kappa(Prox_{mu kappa}(b)) = tau` for `mu`
//! on `[0, kappa_dual(b)]` with Brent's bracketing method.
//!
//! Each evaluation of `rho(mu) = kappa(Prox_{mu kappa}(b))` costs one cone
//! projection of the sorted input. `rho` is continuous, nonincreasing,
//! equals `kappa(b) > tau` at zero and vanishes at the dual norm of `b`.

use crate::isotonic::ConeProjection;
use crate::norm::{signed_sort, Instance, Weights};
use crate::projector::prox_sorted;
use crate::{dot, dot_minus, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootfindParams {
    /// Stop once `|rho(mu) - tau| / (1 + tau) <= tol`.
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for RootfindParams {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_evals: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootfindReport {
    pub mu_star: f64,
    /// `Prox_{mu_star kappa}(b)`.
    pub x: Vec<f64>,
    /// Evaluations of `rho`, bracket endpoints included.
    pub evaluations: usize,
    pub bracket_width: f64,
    /// `|rho(mu_star) - tau| / (1 + tau)`.
    pub residual: f64,
}

/// Dual norm `sup { <x, y> : kappa_lambda(x) <= 1 }`, evaluated as
/// `max_k (|y|_(1) + ... + |y|_(k)) / (lambda_1 + ... + lambda_k)`.
pub fn dual_norm(y: &[f64], weights: &Weights) -> Result<f64> {
    if y.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: y.len(),
        });
    }
    let (_, sorted) = signed_sort(y);
    Ok(dual_norm_sorted(&sorted, weights))
}

fn dual_norm_sorted(sorted: &[f64], weights: &Weights) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut best = 0.0_f64;
    for (s, l) in sorted.iter().zip(weights.as_slice()) {
        num += s;
        den += l;
        best = best.max(num / den);
    }
    best
}

/// Projects `inst.b()` onto the ball by root finding in the prox parameter.
///
/// A point already inside the ball is returned with `mu_star = 0` and no
/// evaluations.
pub fn solve_root(inst: &Instance, params: &RootfindParams) -> Result<RootfindReport> {
    if !(params.tol > 0.0) || params.max_evals < 2 {
        return Err(Error::InvalidParams(
            "tol must be positive and max_evals at least 2".into(),
        ));
    }
    let (sort, w) = signed_sort(inst.b());
    let weights = inst.weights();
    let lam = weights.as_slice();
    let tau = inst.tau();
    if dot(&w, lam) <= tau {
        return Ok(RootfindReport {
            mu_star: 0.0,
            x: inst.b().to_vec(),
            evaluations: 0,
            bracket_width: 0.0,
            residual: 0.0,
        });
    }
    let hi = dual_norm_sorted(&w, weights);

    // Three projection slots shared by the bracket points a, b and c.
    let mut pool: [ConeProjection; 3] = Default::default();
    let mut evaluations = 0;
    let eval = |mu: f64, slot: &mut ConeProjection, count: &mut usize| {
        prox_sorted(&w, weights, mu, slot);
        *count += 1;
        dot_minus(slot.x(), lam, tau)
    };

    let (mut a, mut b) = (0.0, hi);
    let (mut ia, mut ib) = (0, 1);
    let mut fa = eval(a, &mut pool[ia], &mut evaluations);
    let mut fb = eval(b, &mut pool[ib], &mut evaluations);
    if !(fa > 0.0 && fb <= 0.0) {
        return Err(Error::BracketFailure {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let xtol = 4.0 * f64::EPSILON * hi;
    let (mut c, mut fc, mut ic) = (a, fa, ia);
    let mut d = b - a;
    let mut e = d;
    loop {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            ic = ia;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            (a, fa, ia) = (b, fb, ib);
            (b, fb, ib) = (c, fc, ic);
            (c, fc, ic) = (a, fa, ia);
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() / (1.0 + tau) <= params.tol {
            break;
        }
        if evaluations >= params.max_evals {
            return Err(Error::RootNotConverged { evaluations });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Secant when only two distinct points are known, inverse
            // quadratic interpolation otherwise.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        (a, fa, ia) = (b, fb, ib);
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        ib = (0..3).find(|&k| k != ia && k != ic).unwrap_or(0);
        fb = eval(b, &mut pool[ib], &mut evaluations);
    }

    let x = sort.apply_inverse(pool[ib].x())?;
    Ok(RootfindReport {
        mu_star: b,
        x,
        evaluations,
        bracket_width: (c - b).abs(),
        residual: fb.abs() / (1.0 + tau),
    })
}
