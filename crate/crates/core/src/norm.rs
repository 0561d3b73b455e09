//! Weights, problem instances, the OWL1 norm and the signed sort that reduces
//! every problem to one with a nonincreasing nonnegative input.

use crate::{dot, Error, Result};

/// Nonincreasing, nonnegative weights with at least one positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    /// Validates `values` without reordering them.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidWeight { index: i });
            }
        }
        if let Some(index) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::UnsortedWeights { index });
        }
        match values.first() {
            Some(&v) if v > 0.0 => Ok(Self(values)),
            _ => Err(Error::ZeroWeights),
        }
    }

    /// All-ones weights, for which the OWL1 norm is the l1 norm.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Weights {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A projection problem: the point `b`, the weights and the radius `tau > 0`.
#[derive(Debug, Clone)]
pub struct Instance {
    b: Vec<f64>,
    weights: Weights,
    tau: f64,
}

impl Instance {
    pub fn new(b: Vec<f64>, weights: Weights, tau: f64) -> Result<Self> {
        if b.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: b.len(),
            });
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidRadius(tau));
        }
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(i));
        }
        Ok(Self { b, weights, tau })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

/// A signed permutation `P` with `P b = |b|` sorted in nonincreasing order.
///
/// Row `k` of `P` picks the original entry `perm[k]` and multiplies it by
/// `signs[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSort {
    perm: Vec<usize>,
    signs: Vec<f64>,
}

impl SignedSort {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![1.0; n],
        }
    }

    /// Builds a signed permutation from its parts. `perm` must be a
    /// permutation of `0..n` and every sign must be `1.0` or `-1.0`.
    pub fn from_parts(perm: Vec<usize>, signs: Vec<f64>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: signs.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParams(format!("not a permutation: {perm:?}")));
            }
        }
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidParams("signs must be +1 or -1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `P v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        Ok(self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&i, &s)| s * v[i])
            .collect())
    }

    /// `P^T u`.
    pub fn apply_inverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u.len())?;
        let mut out = vec![0.0; u.len()];
        for ((&i, &s), &x) in self.perm.iter().zip(&self.signs).zip(u) {
            out[i] = s * x;
        }
        Ok(out)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.perm.len() {
            return Err(Error::DimensionMismatch {
                expected: self.perm.len(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Sorts `|b|` into nonincreasing order.
///
/// Ties are broken by original index and zero entries get sign `+1`, so the
/// result is deterministic. Returns the signed permutation and `|b|` sorted.
pub fn signed_sort(b: &[f64]) -> (SignedSort, Vec<f64>) {
    // Magnitude bit patterns order like the magnitudes themselves, and
    // sorting integer keys is markedly faster than comparing floats.
    let mut keys: Vec<(u64, usize)> = b.iter().map(|v| v.abs().to_bits()).zip(0..).collect();
    keys.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut perm = Vec::with_capacity(b.len());
    let mut signs = Vec::with_capacity(b.len());
    let mut sorted = Vec::with_capacity(b.len());
    for (bits, i) in keys {
        perm.push(i);
        signs.push(if b[i] < 0.0 { -1.0 } else { 1.0 });
        sorted.push(f64::from_bits(bits));
    }
    (SignedSort { perm, signs }, sorted)
}

/// `kappa_lambda(x) = <|x| sorted nonincreasingly, lambda>`.
pub fn owl_norm(x: &[f64], weights: &Weights) -> Result<f64> {
    if x.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: x.len(),
        });
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(dot(&mags, weights.as_slice()))
}

/// Whether `b` already lies in the ball, in which case it is its own projection.
pub fn is_trivial(inst: &Instance) -> bool {
    owl_norm(inst.b(), inst.weights()).is_ok_and(|k| k <= inst.tau())
}
