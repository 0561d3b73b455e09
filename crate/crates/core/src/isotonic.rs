//! Projection onto the monotone nonnegative cone
//! `C = {x : x_1 >= x_2 >= ... >= x_n >= 0}`.
//!
//! The projection is the positive part of the nonincreasing isotonic
//! regression of `d`, computed by a single left-to-right pool adjacent
//! violators pass. Adjacent blocks are pooled whenever the later mean is not
//! strictly below the earlier one, so the resulting blocks are exactly the
//! maximal runs of equal entries of the projection. Blocks whose mean is not
//! positive form a suffix and are collapsed into one zero block.

use crate::sum_sq;

/// A run `start..end` of equal entries in the projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub value: f64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// `Pi_C(d)` together with the block structure that produced it.
#[derive(Debug, Clone, Default)]
pub struct ConeProjection {
    x: Vec<f64>,
    blocks: Vec<Block>,
    zero_start: usize,
}

impl ConeProjection {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn into_x(self) -> Vec<f64> {
        self.x
    }

    /// Maximal runs of equal entries; the last one has value zero when
    /// [`zero_start`](Self::zero_start) is below `n`.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// First index of the clamped zero suffix, or `n` if the projection ends
    /// with a positive entry.
    pub fn zero_start(&self) -> usize {
        self.zero_start
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Whether the projection is the zero vector.
    pub fn is_zero(&self) -> bool {
        self.zero_start == 0
    }

    pub fn sq_norm(&self) -> f64 {
        sum_sq(&self.x)
    }

    /// Indices of the active constraints, 0-based: constraint `i < n - 1` is
    /// `x[i] >= x[i + 1]` and constraint `n - 1` is `x[n - 1] >= 0`.
    ///
    /// Read off the block structure; no entries of `x` are compared.
    pub fn active_set(&self) -> Vec<usize> {
        let n = self.x.len();
        let mut out = Vec::new();
        for blk in &self.blocks {
            if blk.start >= self.zero_start {
                out.extend(blk.start..n);
            } else {
                out.extend(blk.start..blk.end - 1);
            }
        }
        out
    }
}

/// `Pi_C(d)`.
pub fn project_cone(d: &[f64]) -> ConeProjection {
    let mut out = ConeProjection::default();
    project_cone_iter(d.iter().copied(), &mut out);
    out
}

/// Like [`project_cone`] but reuses the buffers of `out`.
pub fn project_cone_into(d: &[f64], out: &mut ConeProjection) {
    project_cone_iter(d.iter().copied(), out);
}

/// Projects the sequence produced by `d` without materialising it first.
pub(crate) fn project_cone_iter<I>(d: I, out: &mut ConeProjection)
where
    I: Iterator<Item = f64>,
{
    // The block stack holds strictly decreasing means.
    let blocks = &mut out.blocks;
    blocks.clear();
    blocks.reserve(d.size_hint().0);
    let mut n = 0;
    for v in d {
        let mut cur = Block {
            start: n,
            end: n + 1,
            value: v,
        };
        while let Some(prev) = blocks.pop() {
            if cur.value < prev.value {
                blocks.push(prev);
                break;
            }
            // Weighted mean written as a correction of the earlier mean, so
            // pooling equal values reproduces them bit for bit and a second
            // projection is an exact fixed point.
            let share = cur.len() as f64 / (cur.end - prev.start) as f64;
            cur.value = prev.value + (cur.value - prev.value) * share;
            cur.start = prev.start;
        }
        blocks.push(cur);
        n += 1;
    }

    let first_zero = blocks.iter().position(|b| b.value <= 0.0);
    out.zero_start = match first_zero {
        Some(k) => {
            let start = blocks[k].start;
            blocks.truncate(k);
            blocks.push(Block {
                start,
                end: n,
                value: 0.0,
            });
            start
        }
        None => n,
    };

    out.x.clear();
    out.x.reserve(n);
    for b in blocks.iter() {
        out.x.extend(std::iter::repeat_n(b.value, b.len()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_of_the_cone() {
        let p = project_cone(&[5.0, 3.0, 1.0]);
        assert_eq!(p.x(), &[5.0, 3.0, 1.0]);
        assert_eq!(p.blocks().len(), 3);
        assert!(p.active_set().is_empty());
    }

    #[test]
    fn pools_into_one_block() {
        let p = project_cone(&[1.0, 3.0, 2.0]);
        assert_eq!(p.x(), &[2.0, 2.0, 2.0]);
        assert_eq!(
            p.blocks(),
            &[Block {
                start: 0,
                end: 3,
                value: 2.0
            }]
        );
        assert_eq!(p.active_set(), vec![0, 1]);
    }

    #[test]
    fn clamps_to_zero() {
        let p = project_cone(&[-1.0, -2.0, 3.0]);
        assert_eq!(p.x(), &[0.0, 0.0, 0.0]);
        assert!(p.is_zero());
        assert_eq!(p.active_set(), vec![0, 1, 2]);
    }

    #[test]
    fn zero_suffix_is_one_block() {
        let p = project_cone(&[4.0, -1.0, 0.5, -3.0]);
        assert_eq!(p.x(), &[4.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.zero_start(), 1);
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(p.active_set(), vec![1, 2, 3]);
    }

    #[test]
    fn exact_ties_are_pooled() {
        let p = project_cone(&[2.0, 2.0, 1.0]);
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(p.active_set(), vec![0]);
        let p = project_cone(&[0.0, 0.0]);
        assert_eq!(p.active_set(), vec![0, 1]);
    }

    #[test]
    fn empty_input() {
        let p = project_cone(&[]);
        assert!(p.is_empty());
        assert!(p.active_set().is_empty());
    }

    #[test]
    fn buffers_are_reused() {
        let mut p = project_cone(&[1.0, 2.0, 3.0, 4.0]);
        project_cone_into(&[3.0, 1.0], &mut p);
        assert_eq!(p.x(), &[3.0, 1.0]);
        assert_eq!(p.blocks().len(), 2);
    }
}
