//! Euclidean projection onto the ordered weighted l1 (OWL1) norm ball.
//!
//! For nonincreasing nonnegative weights `lambda` the OWL1 norm is
//! `kappa(x) = sum_i lambda_i |x|_(i)` where `|x|_(1) >= |x|_(2) >= ...` are the
//! sorted magnitudes. [`project_ball`] computes the projection onto
//! `{x : kappa(x) <= tau}` by sorting the input, solving a one-dimensional
//! dual problem with a semismooth Newton method ([`ssn`]) whose inner step is
//! a pool-adjacent-violators projection onto the monotone nonnegative cone
//! ([`isotonic`]), and undoing the sort. The solver terminates finitely in
//! exact arithmetic, typically after three or four Newton steps.
//!
//! [`jacobian`] exposes a generalized Jacobian of the projector as an O(n)
//! diagonal-plus-low-rank operator, [`rootfind`] provides the classical
//! bracketing baseline, and [`experiment`] drives the benchmark comparing
//! the two.

pub mod error;
pub mod experiment;
pub mod io;
pub mod isotonic;
pub mod jacobian;
pub mod norm;
pub mod projector;
pub mod rootfind;
pub mod ssn;

pub use error::{Error, Result};
pub use isotonic::{project_cone, Block, ConeProjection};
pub use jacobian::{
    ball_jacobian, cone_jacobian, AffineJacobian, BallJacobian, BlockKind, BlockPartition,
    ConeJacobian, Run,
};
pub use norm::{is_trivial, owl_norm, signed_sort, Instance, SignedSort, Weights};
pub use projector::{project_ball, prox_owl, Outcome, ProjectionResult};
pub use rootfind::{dual_norm, solve_root, RootfindParams, RootfindReport};
pub use ssn::{SsnParams, SsnReport, StepRecord};

/// Dot product with Neumaier-compensated summation.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    dot_minus(a, b, 0.0)
}

/// `<a, b> - c`, with `c` folded into the compensated sum.
///
/// The dual gradient is a difference of two numbers of size `tau`. Plain
/// summation over a million terms, or subtracting `tau` after rounding the
/// dot product, leaves an error far above the stopping tolerance.
pub(crate) fn dot_minus(a: &[f64], b: &[f64], c: f64) -> f64 {
    let mut sum = -c;
    let mut comp = 0.0_f64;
    for (x, y) in a.iter().zip(b) {
        let p = x * y;
        let t = sum + p;
        comp += if sum.abs() >= p.abs() {
            (sum - t) + p
        } else {
            (p - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Plain sum of squares, for norms where no cancellation can occur.
pub(crate) fn sum_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}
