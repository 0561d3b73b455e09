//! Dual semismooth Newton method for
//!
//! ```text
//! min 1/2 |x - w|^2   s.t.   <lambda, x> = tau,  x in C.
//! ```
//!
//! The dual is the scalar problem `min_y phi(y)` with
//! `phi(y) = 1/2 |Pi_C(y lambda + w)|^2 - y tau - 1/2 |w|^2`, a convex C^1
//! function whose derivative `phi'(y) = <Pi_C(y lambda + w), lambda> - tau`
//! is piecewise affine. Newton steps use the curvature
//! `M = lambda^T H lambda` with `H` the cone Jacobian at the current point,
//! globalised by Armijo backtracking. Once an iterate lands on the affine
//! piece containing the root, the next full step hits it exactly.

use crate::isotonic::{project_cone_iter, ConeProjection};
use crate::norm::Weights;
use crate::{dot_minus, sum_sq, Error, Result};

/// Backtracking trials allowed per iteration before the solve is abandoned.
pub const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsnParams {
    /// Armijo slope, in (0, 1/2).
    pub mu: f64,
    /// Backtracking factor, in (0, 1).
    pub delta: f64,
    /// Stop once `|phi'(y)| / (1 + tau) <= eps`.
    pub eps: f64,
    pub max_iter: usize,
    pub y0: f64,
}

impl Default for SsnParams {
    fn default() -> Self {
        Self {
            mu: 1e-4,
            delta: 0.5,
            eps: 1e-12,
            max_iter: 100,
            y0: 0.0,
        }
    }
}

impl SsnParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !(self.mu > 0.0 && self.mu < 0.5) {
            return bad("mu must lie in (0, 1/2)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !self.y0.is_finite() {
            return bad("y0 must be finite");
        }
        Ok(())
    }
}

/// One Newton iteration, recorded at its starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub y: f64,
    pub phi: f64,
    pub grad: f64,
    /// `None` when the projection was zero and a gradient step was taken.
    pub curvature: Option<f64>,
    pub direction: f64,
    /// Accepted step length `delta^m`.
    pub step: f64,
    /// Full Newton step (curvature available and step length 1).
    pub unit_step: bool,
    /// Line-search trials, each one cone projection.
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct SsnReport {
    pub y_star: f64,
    /// `Pi_C(y_star lambda + w)`, the primal solution, with its blocks.
    pub projection: ConeProjection,
    pub iterations: usize,
    /// `|<x, lambda> - tau| / (1 + tau)` at `y_star`.
    pub residual_eta: f64,
    pub trace: Vec<StepRecord>,
    pub converged: bool,
    /// Total cone projections performed.
    pub projections: usize,
}

impl SsnReport {
    pub fn x_star(&self) -> &[f64] {
        self.projection.x()
    }

    pub fn projection(&self) -> &ConeProjection {
        &self.projection
    }

    /// Relative residuals at every iterate, the final one included.
    pub fn residuals(&self, tau: f64) -> Vec<f64> {
        self.trace
            .iter()
            .map(|s| s.grad.abs() / (1.0 + tau))
            .chain(std::iter::once(self.residual_eta))
            .collect()
    }
}

fn check(w: &[f64], weights: &Weights, tau: f64) -> Result<()> {
    if w.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: w.len(),
        });
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidRadius(tau));
    }
    Ok(())
}

fn project_shifted(y: f64, w: &[f64], weights: &Weights, out: &mut ConeProjection) {
    let lam = weights.as_slice();
    project_cone_iter(lam.iter().zip(w).map(|(l, wi)| y * l + wi), out);
}

/// `phi(y)`.
pub fn dual_value(y: f64, w: &[f64], weights: &Weights, tau: f64) -> Result<f64> {
    check(w, weights, tau)?;
    let mut p = ConeProjection::default();
    project_shifted(y, w, weights, &mut p);
    Ok(0.5 * p.sq_norm() - y * tau - 0.5 * sum_sq(w))
}

/// `phi'(y)` and the projection it was computed from.
pub fn dual_gradient(
    y: f64,
    w: &[f64],
    weights: &Weights,
    tau: f64,
) -> Result<(f64, ConeProjection)> {
    check(w, weights, tau)?;
    let mut p = ConeProjection::default();
    project_shifted(y, w, weights, &mut p);
    Ok((dot_minus(p.x(), weights.as_slice(), tau), p))
}

/// Search direction at a point with projection `p` and gradient `grad`.
fn direction(p: &ConeProjection, grad: f64, weights: &Weights) -> (f64, Option<f64>) {
    if p.is_zero() {
        return (-grad, None);
    }
    let m = curvature(p, weights.as_slice());
    (-grad / m, Some(m))
}

/// Whether the iterate reached by `last` is the exact root of its affine
/// piece, up to rounding.
///
/// A full Newton step lands exactly on the root when it was taken with the
/// curvature of the piece it lands in. Both curvatures come from the same
/// block-wise computation, so equal block structures give bitwise equal
/// values. The starting point counts as exact.
fn is_exact(last: Option<&StepRecord>, cur: &ConeProjection, lam: &[f64]) -> bool {
    match last {
        None => true,
        Some(s) => s.unit_step && s.curvature == Some(curvature(cur, lam)),
    }
}

/// `lambda^T H lambda` for the cone Jacobian `H` at `p`, read straight off
/// the blocks: a positive block `B` contributes `(sum_B lambda)^2 / |B|`.
fn curvature(p: &ConeProjection, lam: &[f64]) -> f64 {
    p.blocks()
        .iter()
        .take_while(|b| b.start < p.zero_start())
        .map(|b| {
            let s: f64 = lam[b.start..b.end].iter().sum();
            s * s / b.len() as f64
        })
        .sum()
}

/// `y + d` for the undamped direction `d` the solver would take at `y`.
pub fn newton_step(y: f64, w: &[f64], weights: &Weights, tau: f64) -> Result<f64> {
    let (grad, p) = dual_gradient(y, w, weights, tau)?;
    let (d, _) = direction(&p, grad, weights);
    Ok(y + d)
}

/// Runs the semismooth Newton iteration from `params.y0`.
///
/// `w` need not be sorted. Hitting `max_iter`, a line search that cannot
/// find a decrease within [`MAX_BACKTRACKS`] trials, or a step too small to
/// change `y` in floating point yields a report with `converged == false`
/// rather than an error.
pub fn solve(w: &[f64], weights: &Weights, tau: f64, params: &SsnParams) -> Result<SsnReport> {
    check(w, weights, tau)?;
    params.validate()?;
    let lam = weights.as_slice();
    let half_w2 = 0.5 * sum_sq(w);

    let mut y = params.y0;
    let mut cur = ConeProjection::default();
    let mut trial = ConeProjection::default();
    project_shifted(y, w, weights, &mut cur);
    let mut projections = 1;
    let mut trace = Vec::new();

    let mut grad = dot_minus(cur.x(), lam, tau);
    // Set while taking the one extra step granted to an iterate that meets
    // the tolerance without being an exact root. Failures during that step
    // fall back to the iterate, which has already converged.
    let mut finishing = false;
    let converged = loop {
        let within = grad.abs() / (1.0 + tau) <= params.eps;
        if within && (finishing || is_exact(trace.last(), &cur, lam)) {
            break true;
        }
        finishing = within;
        if trace.len() >= params.max_iter {
            break finishing;
        }
        let (dir, curvature) = direction(&cur, grad, weights);
        if y + dir == y {
            // The correction is below the spacing of doubles at y: the
            // residual has hit its floating-point floor.
            break finishing;
        }
        let slope = grad * dir;

        // The accepted trial's projection is the next iterate's projection.
        let mut step = 1.0;
        let mut trials = 0;
        let (accepted, trial_grad) = loop {
            trials += 1;
            let t = step * dir;
            if y + t == y {
                break (false, grad);
            }
            project_shifted(y + t, w, weights, &mut trial);
            projections += 1;
            let trial_grad = dot_minus(trial.x(), lam, tau);
            // Close to the root the true decrease of phi drops below the
            // rounding noise of its evaluation, while phi' is still computed
            // accurately. Halving |phi'| is accepted as progress there.
            if trial_grad.abs() <= 0.5 * grad.abs() {
                break (true, trial_grad);
            }
            // phi(y + t) - phi(y), without the cancelling |w|^2 terms.
            let half_diff: f64 = trial
                .x()
                .iter()
                .zip(cur.x())
                .map(|(a, b)| (a - b) * (a + b))
                .sum();
            let decrease = 0.5 * half_diff - t * tau;
            if decrease <= params.mu * step * slope {
                break (true, trial_grad);
            }
            if trials >= MAX_BACKTRACKS {
                break (false, trial_grad);
            }
            step *= params.delta;
        };
        trace.push(StepRecord {
            y,
            phi: 0.5 * cur.sq_norm() - y * tau - half_w2,
            grad,
            curvature,
            direction: dir,
            step,
            unit_step: curvature.is_some() && step == 1.0,
            trials,
        });
        if !accepted {
            break finishing;
        }
        y += step * dir;
        grad = trial_grad;
        std::mem::swap(&mut cur, &mut trial);
    };

    Ok(SsnReport {
        y_star: y,
        projection: cur,
        iterations: trace.len(),
        residual_eta: grad.abs() / (1.0 + tau),
        trace,
        converged,
        projections,
    })
}
