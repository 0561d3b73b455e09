//! Generalized Jacobians of the cone projector and of the ball projector.
//!
//! For an active set `G` of the cone constraints `Bx >= 0` the matrix
//! `H = I - B_G^T (B_G B_G^T)^{-1} B_G` is the orthogonal projector onto the
//! null space of `B_G`. Because `B` is bidiagonal, `H` is block diagonal with
//! three kinds of blocks: identity on coordinates not tied to a neighbour,
//! the averaging matrix `ee^T / m` on a run of `m` tied coordinates, and zero
//! on the suffix pinned at zero. So `H = D + UU^T` with `D` a 0/1 diagonal
//! and `U` one column `e / sqrt(m)` per averaging run, and every product
//! below costs O(n).
//!
//! Adding the equality `<lambda, x> = tau` removes one more direction:
//! `V = H - a a^T / (a^T a)` with `a = H lambda`. The ball projector's
//! Jacobian is `S = P^T V P` for the signed sort `P` of the input.

use std::ops::Range;

use crate::isotonic::ConeProjection;
use crate::norm::{signed_sort, Instance, SignedSort, Weights};
use crate::ssn::SsnReport;
use crate::{dot, Error, Result};

/// Whether a run of constraint indices is in the active set (an identity
/// block of the 0/1 diagonal selecting `G`) or not (a zero block).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Active,
    Inactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub len: usize,
    pub kind: BlockKind,
}

/// Maximal runs of active/inactive constraint indices `0..n`; consecutive
/// runs always differ in kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    runs: Vec<Run>,
    n: usize,
}

impl BlockPartition {
    /// Partition for an explicit active set (strictly increasing indices below `n`).
    pub fn from_active_set(gamma: &[usize], n: usize) -> Result<Self> {
        if gamma.windows(2).any(|w| w[0] >= w[1]) || gamma.last().is_some_and(|&g| g >= n) {
            return Err(Error::InvalidParams(format!(
                "active set must be strictly increasing and below {n}"
            )));
        }
        let mut part = Self {
            runs: Vec::new(),
            n,
        };
        let mut next = 0;
        for &g in gamma {
            part.push(BlockKind::Inactive, g - next);
            part.push(BlockKind::Active, 1);
            next = g + 1;
        }
        part.push(BlockKind::Inactive, n - next);
        Ok(part)
    }

    /// Partition for the maximal active set of a cone projection, built from
    /// its blocks in O(number of blocks).
    pub fn from_projection(p: &ConeProjection) -> Self {
        let n = p.len();
        let mut part = Self {
            runs: Vec::new(),
            n,
        };
        for blk in p.blocks() {
            if blk.start >= p.zero_start() {
                part.push(BlockKind::Active, n - blk.start);
            } else {
                part.push(BlockKind::Active, blk.len() - 1);
                part.push(BlockKind::Inactive, 1);
            }
        }
        part
    }

    fn push(&mut self, kind: BlockKind, len: usize) {
        if len == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some(r) if r.kind == kind => r.len += len,
            _ => self.runs.push(Run { len, kind }),
        }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Indices of the active runs.
    pub fn active_runs(&self) -> impl Iterator<Item = usize> + '_ {
        self.runs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == BlockKind::Active)
            .map(|(j, _)| j)
    }

    /// The active set the partition encodes.
    pub fn active_set(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut at = 0;
        for r in &self.runs {
            if r.kind == BlockKind::Active {
                out.extend(at..at + r.len);
            }
            at += r.len;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Segment {
    Identity { start: usize, len: usize },
    Average { start: usize, len: usize },
    Zero { start: usize, len: usize },
}

/// `H = D + UU^T` for one active set, applied in O(n).
#[derive(Debug, Clone, PartialEq)]
pub struct ConeJacobian {
    partition: BlockPartition,
    segments: Vec<Segment>,
}

impl ConeJacobian {
    /// Lays out the diagonal blocks of `H` from the runs of the active set.
    ///
    /// An active run of `m` constraints that is not last ties `m + 1`
    /// coordinates together, borrowing the first coordinate of the inactive
    /// run after it. The last run, if active, contains the constraint
    /// `x[n-1] >= 0` and pins its `m` coordinates to zero. Inactive runs keep
    /// their remaining coordinates as identity.
    pub fn from_partition(partition: BlockPartition) -> Self {
        let runs = partition.runs();
        let last = runs.len().saturating_sub(1);
        let mut segments = Vec::with_capacity(runs.len());
        let mut at = 0;
        for (j, r) in runs.iter().enumerate() {
            let seg = match (r.kind, j == last, j == 0) {
                (BlockKind::Active, false, _) => Segment::Average {
                    start: at,
                    len: r.len + 1,
                },
                (BlockKind::Active, true, _) => Segment::Zero {
                    start: at,
                    len: r.len,
                },
                (BlockKind::Inactive, _, true) => Segment::Identity {
                    start: at,
                    len: r.len,
                },
                (BlockKind::Inactive, _, false) => Segment::Identity {
                    start: at,
                    len: r.len - 1,
                },
            };
            let len = seg.len();
            if len > 0 {
                segments.push(seg);
            }
            at += len;
        }
        debug_assert_eq!(at, partition.dim());
        Self {
            partition,
            segments,
        }
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    /// `Hv`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), v.len())?;
        check_dim(self.dim(), out.len())?;
        for seg in &self.segments {
            let r = seg.range();
            match seg {
                Segment::Identity { .. } => out[r.clone()].copy_from_slice(&v[r]),
                Segment::Average { len, .. } => {
                    let mean = v[r.clone()].iter().sum::<f64>() / *len as f64;
                    out[r].fill(mean);
                }
                Segment::Zero { .. } => out[r].fill(0.0),
            }
        }
        Ok(())
    }

    /// `v^T H v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), v.len())?;
        Ok(self
            .segments
            .iter()
            .map(|seg| match seg {
                Segment::Identity { .. } => {
                    let s = &v[seg.range()];
                    dot(s, s)
                }
                Segment::Average { len, .. } => {
                    let t: f64 = v[seg.range()].iter().sum();
                    t * t / *len as f64
                }
                Segment::Zero { .. } => 0.0,
            })
            .sum())
    }

    /// The Newton curvature `lambda^T H lambda`.
    pub fn curvature(&self, weights: &Weights) -> Result<f64> {
        self.quadratic_form(weights.as_slice())
    }

    /// Diagonal of `D`.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for seg in &self.segments {
            if let Segment::Identity { .. } = seg {
                d[seg.range()].fill(1.0);
            }
        }
        d
    }

    /// Columns of `U`: each is constant on its range and zero elsewhere.
    pub fn factor_columns(&self) -> impl Iterator<Item = (Range<usize>, f64)> + '_ {
        self.segments.iter().filter_map(|seg| match seg {
            Segment::Average { len, .. } => Some((seg.range(), 1.0 / (*len as f64).sqrt())),
            _ => None,
        })
    }
}

impl Segment {
    fn len(&self) -> usize {
        match *self {
            Segment::Identity { len, .. }
            | Segment::Average { len, .. }
            | Segment::Zero { len, .. } => len,
        }
    }

    fn range(&self) -> Range<usize> {
        match *self {
            Segment::Identity { start, len }
            | Segment::Average { start, len }
            | Segment::Zero { start, len } => start..start + len,
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The Jacobian of `Pi_C` at `d` for the maximal active set of `Pi_C(d)`.
pub fn cone_jacobian(p: &ConeProjection) -> ConeJacobian {
    ConeJacobian::from_partition(BlockPartition::from_projection(p))
}

/// `V = H - u u^T` with `u = H alpha / |H alpha|`: the projector onto the
/// null space of `B_G` intersected with the orthogonal complement of `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineJacobian {
    cone: ConeJacobian,
    unit: Vec<f64>,
}

impl AffineJacobian {
    /// Fails with [`Error::DegenerateJacobian`] when `H alpha` vanishes.
    pub fn new(cone: ConeJacobian, alpha: &[f64]) -> Result<Self> {
        let mut unit = cone.apply(alpha)?;
        let norm = dot(&unit, &unit).sqrt();
        let scale = dot(alpha, alpha).sqrt();
        if !(norm > f64::EPSILON * scale) {
            return Err(Error::DegenerateJacobian);
        }
        unit.iter_mut().for_each(|u| *u /= norm);
        Ok(Self { cone, unit })
    }

    pub fn cone(&self) -> &ConeJacobian {
        &self.cone
    }

    /// `H alpha / |H alpha|`.
    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.cone.apply_into(v, out)?;
        // H u = u, so <u, Hv> = <u, v>.
        let c = dot(&self.unit, v);
        out.iter_mut()
            .zip(&self.unit)
            .for_each(|(o, u)| *o -= c * u);
        Ok(())
    }
}

/// `S = P^T V P`, an element of the generalized Jacobian of the ball
/// projector. Symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BallJacobian {
    sort: SignedSort,
    affine: AffineJacobian,
}

impl BallJacobian {
    pub fn new(sort: SignedSort, affine: AffineJacobian) -> Result<Self> {
        check_dim(sort.len(), affine.dim())?;
        Ok(Self { sort, affine })
    }

    pub fn sort(&self) -> &SignedSort {
        &self.sort
    }

    pub fn affine(&self) -> &AffineJacobian {
        &self.affine
    }

    pub fn dim(&self) -> usize {
        self.sort.len()
    }

    /// `Sv`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let pv = self.sort.apply(v)?;
        let vpv = self.affine.apply(&pv)?;
        self.sort.apply_inverse(&vpv)
    }
}

/// Jacobian of the ball projector at `inst.b()` given the solver output for
/// the sorted problem.
///
/// `report` must come from solving the sorted instance (as
/// [`project_ball`](crate::project_ball) does). Points strictly inside the
/// ball are rejected with [`Error::TrivialProjection`].
pub fn ball_jacobian(inst: &Instance, report: &SsnReport) -> Result<BallJacobian> {
    check_dim(inst.dim(), report.projection().len())?;
    let (sort, sorted) = signed_sort(inst.b());
    if dot(&sorted, inst.weights().as_slice()) <= inst.tau() {
        return Err(Error::TrivialProjection);
    }
    let cone = cone_jacobian(report.projection());
    let affine = AffineJacobian::new(cone, inst.weights().as_slice())?;
    BallJacobian::new(sort, affine)
}
