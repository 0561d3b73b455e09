//! Small-dimension ground truth for the OWL1 ball projector.
//!
//! Nothing in here shares code with `owlball`: the cone and ball projections
//! are found by enumerating every candidate active set and keeping the one
//! that passes the KKT conditions, the dual norm by enumerating extreme points
//! of the unit ball, and the Jacobians by explicit dense linear solves. All of
//! it is exponential or cubic in `n` and only meant for tests.
//!
//! Constraint indices are 0-based throughout: constraint `i < n - 1` is
//! `x[i] - x[i + 1] >= 0` and constraint `n - 1` is `x[n - 1] >= 0`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub mod closed_form;

/// Largest dimension accepted by [`oracle_cone`].
pub const CONE_CAP: usize = 12;
/// Largest dimension accepted by [`oracle_ball`] and [`oracle_dual_norm`].
pub const BALL_CAP: usize = 10;
/// Largest dimension accepted by the dense Jacobian references.
pub const DENSE_CAP: usize = 200;

/// KKT violation (relative to the data scale) a candidate must meet.
pub const KKT_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("dimension {n} exceeds the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no active set produced a KKT point (best violation {best:e})")]
    NoCandidate { best: f64 },
    #[error("weights and point have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("constraint matrix is singular for the requested active set")]
    Singular,
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// A verified optimal point together with its multipliers.
#[derive(Debug, Clone)]
pub struct KktCertificate {
    pub x: Vec<f64>,
    /// Multiplier of `<lambda, x> = tau`; `None` for the plain cone projection.
    pub equality_multiplier: Option<f64>,
    /// One multiplier per row of the difference operator, zero off the active set.
    pub inequality_multipliers: Vec<f64>,
    /// Stationarity, feasibility, dual feasibility and complementarity
    /// residuals, each divided by the data scale, maximised.
    pub max_violation: f64,
}

/// The difference operator `B` with `(Bx)_i = x_i - x_{i+1}` and `(Bx)_{n-1} = x_{n-1}`.
pub fn difference_operator(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if j == i + 1 {
            -1.0
        } else {
            0.0
        }
    })
}

fn rows_of(b: &DMatrix<f64>, gamma: &[usize]) -> DMatrix<f64> {
    let n = b.ncols();
    DMatrix::from_fn(gamma.len(), n, |r, c| b[(gamma[r], c)])
}

fn subset(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Solves `A A^T nu = rhs` via Cholesky, refusing singular systems.
fn gram_solve(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = a * a.transpose();
    let chol = gram.clone().cholesky()?;
    let nu = chol.solve(rhs);
    // Cholesky can succeed on numerically singular Gram matrices; reject
    // solutions that do not actually satisfy the system.
    let resid = (&gram * &nu - rhs).amax();
    let scale = 1.0 + rhs.amax() + gram.amax() * nu.amax();
    if !nu.iter().all(|v| v.is_finite()) || resid > 1e-8 * scale {
        return None;
    }
    Some(nu)
}

/// Checks the KKT system of `min 1/2 |x - d|^2  s.t. [<lambda,x> = tau], Bx >= 0`.
fn violation(
    x: &DVector<f64>,
    d: &DVector<f64>,
    b: &DMatrix<f64>,
    z: &DVector<f64>,
    eq: Option<(&DVector<f64>, f64, f64)>,
    scale: f64,
) -> f64 {
    let bx = b * x;
    let mut stat = x - d - b.transpose() * z;
    let mut worst = 0.0_f64;
    if let Some((lambda, tau, y)) = eq {
        stat -= lambda * y;
        worst = worst.max((lambda.dot(x) - tau).abs() / scale.max(tau.abs()));
    }
    worst = worst.max(stat.amax() / scale);
    for i in 0..bx.len() {
        worst = worst.max((-bx[i]).max(0.0) / scale);
        worst = worst.max((-z[i]).max(0.0) / scale);
        worst = worst.max((z[i] * bx[i]).abs() / (scale * scale));
    }
    worst
}

/// Projection onto `C = {x : x_1 >= ... >= x_n >= 0}` by active-set enumeration.
pub fn oracle_cone(d: &[f64]) -> Result<KktCertificate> {
    let n = d.len();
    if n > CONE_CAP {
        return Err(OracleError::TooLarge { n, cap: CONE_CAP });
    }
    let b = difference_operator(n);
    let dv = DVector::from_column_slice(d);
    let scale = inf_norm(d).max(f64::MIN_POSITIVE);
    let mut best: Option<KktCertificate> = None;
    for mask in 0..(1u32 << n) {
        let gamma = subset(mask, n);
        let mut z = DVector::zeros(n);
        let x = if gamma.is_empty() {
            dv.clone()
        } else {
            let bg = rows_of(&b, &gamma);
            let Some(zg) = gram_solve(&bg, &(-(&bg * &dv))) else {
                continue;
            };
            for (k, &i) in gamma.iter().enumerate() {
                z[i] = zg[k];
            }
            &dv + bg.transpose() * zg
        };
        let v = violation(&x, &dv, &b, &z, None, scale);
        if best.as_ref().is_none_or(|c| v < c.max_violation) {
            best = Some(KktCertificate {
                x: x.iter().copied().collect(),
                equality_multiplier: None,
                inequality_multipliers: z.iter().copied().collect(),
                max_violation: v,
            });
        }
    }
    finish(best)
}

fn finish(best: Option<KktCertificate>) -> Result<KktCertificate> {
    match best {
        Some(c) if c.max_violation <= KKT_TOL => Ok(c),
        Some(c) => Err(OracleError::NoCandidate {
            best: c.max_violation,
        }),
        None => Err(OracleError::NoCandidate {
            best: f64::INFINITY,
        }),
    }
}

/// Projection of `w` onto `{x : <lambda, x> = tau, x in C}` by enumeration.
pub fn oracle_sorted_ball(w: &[f64], lambda: &[f64], tau: f64) -> Result<KktCertificate> {
    let n = w.len();
    if n != lambda.len() {
        return Err(OracleError::DimensionMismatch(n, lambda.len()));
    }
    if n > BALL_CAP {
        return Err(OracleError::TooLarge { n, cap: BALL_CAP });
    }
    let b = difference_operator(n);
    let wv = DVector::from_column_slice(w);
    let lv = DVector::from_column_slice(lambda);
    let scale = inf_norm(w)
        .max(tau / lambda.iter().sum::<f64>())
        .max(f64::MIN_POSITIVE);
    let mut best: Option<KktCertificate> = None;
    for mask in 0..(1u32 << n) {
        let gamma = subset(mask, n);
        let a = DMatrix::from_fn(1 + gamma.len(), n, |r, c| {
            if r == 0 {
                lambda[c]
            } else {
                b[(gamma[r - 1], c)]
            }
        });
        let mut rhs = -(&a * &wv);
        rhs[0] += tau;
        let Some(nu) = gram_solve(&a, &rhs) else {
            continue;
        };
        let x = &wv + a.transpose() * &nu;
        let mut z = DVector::zeros(n);
        for (k, &i) in gamma.iter().enumerate() {
            z[i] = nu[k + 1];
        }
        let v = violation(&x, &wv, &b, &z, Some((&lv, tau, nu[0])), scale);
        if best.as_ref().is_none_or(|c| v < c.max_violation) {
            best = Some(KktCertificate {
                x: x.iter().copied().collect(),
                equality_multiplier: Some(nu[0]),
                inequality_multipliers: z.iter().copied().collect(),
                max_violation: v,
            });
        }
    }
    finish(best)
}

/// Euclidean projection of `b` onto `{x : kappa_lambda(x) <= tau}`.
///
/// Sorts `|b|` itself, solves the sorted problem by enumeration and maps the
/// result back. Inside the ball the certificate is trivial (`b` itself, zero
/// multipliers).
pub fn oracle_ball(b: &[f64], lambda: &[f64], tau: f64) -> Result<KktCertificate> {
    let n = b.len();
    if n != lambda.len() {
        return Err(OracleError::DimensionMismatch(n, lambda.len()));
    }
    if n > BALL_CAP {
        return Err(OracleError::TooLarge { n, cap: BALL_CAP });
    }
    if closed_form::owl_norm(b, lambda) <= tau {
        return Ok(KktCertificate {
            x: b.to_vec(),
            equality_multiplier: Some(0.0),
            inequality_multipliers: vec![0.0; n],
            max_violation: 0.0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[j].abs().total_cmp(&b[i].abs()));
    let w: Vec<f64> = order.iter().map(|&i| b[i].abs()).collect();
    let mut cert = oracle_sorted_ball(&w, lambda, tau)?;
    let mut x = vec![0.0; n];
    for (k, &i) in order.iter().enumerate() {
        x[i] = if b[i] < 0.0 { -cert.x[k] } else { cert.x[k] };
    }
    cert.x = x;
    Ok(cert)
}

/// `sup { <x, y> : kappa_lambda(x) <= 1 }` over the extreme points of the
/// unit ball.
///
/// Extreme points put the value `1 / (lambda_1 + ... + lambda_k)` on some
/// `k` coordinates (signs matching `y`) and zero elsewhere, so the supremum
/// is a maximum over all coordinate subsets.
pub fn oracle_dual_norm(y: &[f64], lambda: &[f64]) -> Result<f64> {
    let n = y.len();
    if n != lambda.len() {
        return Err(OracleError::DimensionMismatch(n, lambda.len()));
    }
    if n > BALL_CAP {
        return Err(OracleError::TooLarge { n, cap: BALL_CAP });
    }
    let prefix: Vec<f64> = lambda
        .iter()
        .scan(0.0, |acc, l| {
            *acc += l;
            Some(*acc)
        })
        .collect();
    let mut best = 0.0_f64;
    for mask in 1..(1u32 << n) {
        let idx = subset(mask, n);
        let total: f64 = idx.iter().map(|&i| y[i].abs()).sum();
        best = best.max(total / prefix[idx.len() - 1]);
    }
    Ok(best)
}

/// `I - B_G^T (B_G B_G^T)^{-1} B_G`, the identity when `gamma` is empty.
pub fn dense_cone_jacobian(gamma: &[usize], n: usize) -> Result<DMatrix<f64>> {
    if n > DENSE_CAP {
        return Err(OracleError::TooLarge { n, cap: DENSE_CAP });
    }
    let mut h = DMatrix::identity(n, n);
    if gamma.is_empty() {
        return Ok(h);
    }
    let bg = rows_of(&difference_operator(n), gamma);
    let gram = &bg * bg.transpose();
    let inv = gram.try_inverse().ok_or(OracleError::Singular)?;
    h -= bg.transpose() * inv * &bg;
    Ok(h)
}

/// `I - A^T (A A^T)^{-1} A` with `A = [alpha^T; B_G]`: the projector onto
/// `{v : <alpha, v> = 0, B_G v = 0}`.
pub fn dense_affine_jacobian(gamma: &[usize], alpha: &[f64]) -> Result<DMatrix<f64>> {
    let n = alpha.len();
    if n > DENSE_CAP {
        return Err(OracleError::TooLarge { n, cap: DENSE_CAP });
    }
    let b = difference_operator(n);
    let a = DMatrix::from_fn(1 + gamma.len(), n, |r, c| {
        if r == 0 {
            alpha[c]
        } else {
            b[(gamma[r - 1], c)]
        }
    });
    let gram = &a * a.transpose();
    let inv = gram.try_inverse().ok_or(OracleError::Singular)?;
    Ok(DMatrix::identity(n, n) - a.transpose() * inv * &a)
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}
