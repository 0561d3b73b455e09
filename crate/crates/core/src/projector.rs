//! The user-facing projector and the OWL1 proximal map.

use crate::isotonic::project_cone_iter;
use crate::isotonic::ConeProjection;
use crate::jacobian::{cone_jacobian, AffineJacobian, BallJacobian};
use crate::norm::{signed_sort, Instance, SignedSort, Weights};
use crate::ssn::{self, SsnParams, SsnReport};
use crate::{dot, Error, Result};

/// Relative slack under which a point on the sphere counts as inside.
pub const TRIVIAL_SLACK: f64 = 1e-15;

#[derive(Debug, Clone)]
pub enum Outcome {
    /// `b` was already in the ball and is returned unchanged.
    Inside,
    Solved(SsnReport),
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub x: Vec<f64>,
    pub outcome: Outcome,
    /// The signed sort of `b` used for the reduction.
    pub sort: SignedSort,
}

impl ProjectionResult {
    pub fn report(&self) -> Option<&SsnReport> {
        match &self.outcome {
            Outcome::Inside => None,
            Outcome::Solved(r) => Some(r),
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self.outcome, Outcome::Inside)
    }

    /// Generalized Jacobian of the projector at the input point.
    pub fn jacobian(&self, weights: &Weights) -> Result<BallJacobian> {
        let report = self.report().ok_or(Error::TrivialProjection)?;
        let cone = cone_jacobian(report.projection());
        let affine = AffineJacobian::new(cone, weights.as_slice())?;
        BallJacobian::new(self.sort.clone(), affine)
    }
}

/// Euclidean projection onto `{x : kappa_lambda(x) <= tau}`.
///
/// Sorts `|b|`, solves the sorted problem with the semismooth Newton method
/// and maps the solution back through the signed permutation. Solver
/// non-convergence surfaces as [`Error::NotConverged`].
pub fn project_ball(inst: &Instance, params: &SsnParams) -> Result<ProjectionResult> {
    let (sort, w) = signed_sort(inst.b());
    let weights = inst.weights();
    let tau = inst.tau();
    if dot(&w, weights.as_slice()) <= tau * (1.0 + TRIVIAL_SLACK) {
        return Ok(ProjectionResult {
            x: inst.b().to_vec(),
            outcome: Outcome::Inside,
            sort,
        });
    }
    let report = ssn::solve(&w, weights, tau, params)?;
    if !report.converged {
        return Err(Error::NotConverged {
            iterations: report.iterations,
            eta: report.residual_eta,
        });
    }
    let x = sort.apply_inverse(report.x_star())?;
    Ok(ProjectionResult {
        x,
        outcome: Outcome::Solved(report),
        sort,
    })
}

/// `Prox_{mu kappa_lambda}(v) = P^T Pi_C(|v| sorted - mu lambda)`.
pub fn prox_owl(v: &[f64], weights: &Weights, mu: f64) -> Result<Vec<f64>> {
    if v.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: v.len(),
        });
    }
    if !(mu >= 0.0) {
        return Err(Error::NegativeProxParameter(mu));
    }
    if mu == 0.0 {
        return Ok(v.to_vec());
    }
    let (sort, w) = signed_sort(v);
    let mut p = ConeProjection::default();
    prox_sorted(&w, weights, mu, &mut p);
    sort.apply_inverse(p.x())
}

/// The prox on already sorted, nonnegative input, in sorted coordinates.
pub(crate) fn prox_sorted(w: &[f64], weights: &Weights, mu: f64, out: &mut ConeProjection) {
    project_cone_iter(
        w.iter().zip(weights.as_slice()).map(|(wi, l)| wi - mu * l),
        out,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(b: &[f64], lam: &[f64], tau: f64) -> Instance {
        Instance::new(b.to_vec(), Weights::new(lam.to_vec()).unwrap(), tau).unwrap()
    }

    #[test]
    fn inside_point_is_returned_unchanged() {
        let r = project_ball(&inst(&[1.0, 0.0], &[1.0, 1.0], 2.0), &SsnParams::default()).unwrap();
        assert!(r.is_inside());
        assert_eq!(r.x, vec![1.0, 0.0]);
        assert!(matches!(
            r.jacobian(&Weights::ones(2).unwrap()),
            Err(Error::TrivialProjection)
        ));
    }

    #[test]
    fn signs_are_restored() {
        let r = project_ball(&inst(&[-3.0, 1.0], &[1.0, 1.0], 2.0), &SsnParams::default()).unwrap();
        assert_eq!(r.x, vec![-2.0, 0.0]);
    }

    #[test]
    fn linf_ball_clips() {
        let r = project_ball(&inst(&[3.0, 1.0], &[1.0, 0.0], 2.0), &SsnParams::default()).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-14 && (r.x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn prox_examples() {
        let ones = Weights::ones(2).unwrap();
        assert_eq!(prox_owl(&[3.0, -1.0], &ones, 0.0).unwrap(), vec![3.0, -1.0]);
        assert_eq!(prox_owl(&[3.0, 1.0], &ones, 1.0).unwrap(), vec![2.0, 0.0]);
        assert_eq!(prox_owl(&[-3.0, 0.5], &ones, 1.0).unwrap(), vec![-2.0, 0.0]);
        assert!(matches!(
            prox_owl(&[1.0, 1.0], &ones, -1.0),
            Err(Error::NegativeProxParameter(_))
        ));
        assert!(prox_owl(&[1.0], &ones, 1.0).is_err());
    }

    #[test]
    fn non_convergence_is_an_error() {
        let p = SsnParams {
            max_iter: 1,
            y0: -1e3,
            ..SsnParams::default()
        };
        let e = project_ball(&inst(&[3.0, 1.0, 0.5], &[2.0, 1.0, 0.5], 1.0), &p).unwrap_err();
        assert!(matches!(e, Error::NotConverged { iterations: 1, .. }));
    }
}
