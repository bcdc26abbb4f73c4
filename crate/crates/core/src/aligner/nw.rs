//! Global alignment of two sentence sequences.
//!
//! `H(i, j)` is the best score aligning the first `i` source sentences
//! with the first `j` target sentences:
//!
//! ```text
//! H(i, j) = max(H(i-1, j-1) + s(i-1, j-1),  H(i, j-1) + g,  H(i-1, j) + g)
//! ```
//!
//! Ties prefer a match, then a skipped target sentence, then a skipped
//! source sentence.

use rayon::prelude::*;

use super::matrix::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::scalar::Score;

pub const DEFAULT_GAP_PENALTY: f64 = -0.3;

/// Anti-diagonals shorter than this are filled sequentially.
const PARALLEL_DIAGONAL: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Match { src: usize, tgt: usize },
    /// Source sentence left unpaired.
    GapSrc(usize),
    /// Target sentence left unpaired.
    GapTgt(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPath<S> {
    pub steps: Vec<Step>,
    pub score: S,
}

impl<S: Score> AlignmentPath<S> {
    pub fn matches(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.iter().filter_map(|s| match *s {
            Step::Match { src, tgt } => Some((src, tgt)),
            _ => None,
        })
    }

    pub fn gap_count(&self) -> usize {
        self.steps.iter().filter(|s| !matches!(s, Step::Match { .. })).count()
    }

    /// Checks that the steps cover `0..rows` and `0..cols` once each, in
    /// increasing order on both sides.
    pub fn is_valid_for(&self, rows: usize, cols: usize) -> bool {
        let (mut i, mut j) = (0, 0);
        for step in &self.steps {
            match *step {
                Step::Match { src, tgt } if src == i && tgt == j => {
                    i += 1;
                    j += 1;
                }
                Step::GapSrc(src) if src == i => i += 1,
                Step::GapTgt(tgt) if tgt == j => j += 1,
                _ => return false,
            }
        }
        i == rows && j == cols
    }

    /// Sum of match scores plus `gap` per gap, recomputed from the steps.
    pub fn rescore(&self, matrix: &SimilarityMatrix<S>, gap: S) -> S {
        self.steps.iter().fold(S::zero(), |acc, step| match *step {
            Step::Match { src, tgt } => acc + matrix.get(src, tgt),
            _ => acc + gap,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Diag,
    Left,
    Up,
}

struct Table<S> {
    cols: usize,
    h: Vec<S>,
    dir: Vec<Dir>,
}

impl<S: Score> Table<S> {
    fn new(rows: usize, cols: usize, gap: S) -> Self {
        let width = cols + 1;
        let mut h = vec![S::zero(); (rows + 1) * width];
        let mut dir = vec![Dir::Diag; (rows + 1) * width];
        for j in 1..=cols {
            h[j] = h[j - 1] + gap;
            dir[j] = Dir::Left;
        }
        for i in 1..=rows {
            h[i * width] = h[(i - 1) * width] + gap;
            dir[i * width] = Dir::Up;
        }
        Table { cols: width, h, dir }
    }

    #[inline]
    fn cell(&self, m: &SimilarityMatrix<S>, gap: S, i: usize, j: usize) -> (S, Dir) {
        let w = self.cols;
        let mut best = (self.h[(i - 1) * w + j - 1] + m.get(i - 1, j - 1), Dir::Diag);
        let left = self.h[i * w + j - 1] + gap;
        if left > best.0 {
            best = (left, Dir::Left);
        }
        let up = self.h[(i - 1) * w + j] + gap;
        if up > best.0 {
            best = (up, Dir::Up);
        }
        best
    }

    fn set(&mut self, i: usize, j: usize, (v, d): (S, Dir)) {
        let k = i * self.cols + j;
        self.h[k] = v;
        self.dir[k] = d;
    }

    fn trace(&self, rows: usize, cols: usize) -> AlignmentPath<S> {
        let (mut i, mut j) = (rows, cols);
        let mut steps = Vec::with_capacity(rows + cols);
        while i > 0 || j > 0 {
            match self.dir[i * self.cols + j] {
                Dir::Diag => {
                    i -= 1;
                    j -= 1;
                    steps.push(Step::Match { src: i, tgt: j });
                }
                Dir::Left => {
                    j -= 1;
                    steps.push(Step::GapTgt(j));
                }
                Dir::Up => {
                    i -= 1;
                    steps.push(Step::GapSrc(i));
                }
            }
        }
        steps.reverse();
        AlignmentPath {
            steps,
            score: self.h[rows * self.cols + cols],
        }
    }
}

fn check_gap<S: Score>(gap: S) -> Result<()> {
    if gap < S::zero() {
        Ok(())
    } else {
        Err(Error::invalid(format!("gap penalty must be negative, got {gap:?}")))
    }
}

/// Highest-scoring monotone alignment, filled row by row.
pub fn nw_align<S: Score>(matrix: &SimilarityMatrix<S>, gap: S) -> Result<AlignmentPath<S>> {
    check_gap(gap)?;
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut t = Table::new(rows, cols, gap);
    for i in 1..=rows {
        for j in 1..=cols {
            let c = t.cell(matrix, gap, i, j);
            t.set(i, j, c);
        }
    }
    Ok(t.trace(rows, cols))
}

/// Same result as [`nw_align`], filling anti-diagonals in parallel on the
/// current rayon pool.
pub fn nw_align_wavefront<S: Score>(matrix: &SimilarityMatrix<S>, gap: S) -> Result<AlignmentPath<S>> {
    check_gap(gap)?;
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut t = Table::new(rows, cols, gap);
    for d in 2..=rows + cols {
        let i_lo = d.saturating_sub(cols).max(1);
        let i_hi = (d - 1).min(rows);
        if i_lo > i_hi {
            continue;
        }
        let diagonal: Vec<(S, Dir)> = if i_hi - i_lo + 1 >= PARALLEL_DIAGONAL {
            (i_lo..=i_hi).into_par_iter().map(|i| t.cell(matrix, gap, i, d - i)).collect()
        } else {
            (i_lo..=i_hi).map(|i| t.cell(matrix, gap, i, d - i)).collect()
        };
        for (i, c) in (i_lo..=i_hi).zip(diagonal) {
            t.set(i, d - i, c);
        }
    }
    Ok(t.trace(rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn m(rows: Vec<Vec<f64>>) -> SimilarityMatrix<f64> {
        SimilarityMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn diagonal_two_by_two() {
        let p = nw_align(&m(vec![vec![0.9, 0.1], vec![0.1, 0.9]]), -0.3).unwrap();
        assert_eq!(p.steps, vec![Step::Match { src: 0, tgt: 0 }, Step::Match { src: 1, tgt: 1 }]);
        assert!((p.score - 1.8).abs() < 1e-12);
    }

    #[test]
    fn single_cell_matches() {
        let p = nw_align(&m(vec![vec![0.9]]), -0.3).unwrap();
        assert_eq!(p.steps, vec![Step::Match { src: 0, tgt: 0 }]);
    }

    #[test]
    fn skips_weak_source_sentence() {
        let p = nw_align(&m(vec![vec![0.1], vec![0.9]]), -0.3).unwrap();
        assert_eq!(p.steps, vec![Step::GapSrc(0), Step::Match { src: 1, tgt: 0 }]);
        assert!((p.score - 0.6).abs() < 1e-12);
    }

    #[test]
    fn ties_resolved_by_step_priority() {
        let r = |n, d| Rational64::new(n, d);
        // Both single-match paths score 0; the final cell prefers the match.
        let mat = SimilarityMatrix::from_rows(vec![vec![r(1, 10), r(1, 10)]]).unwrap();
        let p = nw_align(&mat, r(-1, 10)).unwrap();
        assert_eq!(p.score, r(0, 1));
        assert_eq!(p.steps, vec![Step::GapTgt(0), Step::Match { src: 0, tgt: 1 }]);
        // The two off-diagonal matches tie; the final cell prefers a target gap.
        let (x, h) = (r(1, 100), r(1, 2));
        let mat = SimilarityMatrix::from_rows(vec![vec![x, h], vec![h, x]]).unwrap();
        let p = nw_align(&mat, r(-1, 10)).unwrap();
        assert_eq!(p.score, r(3, 10));
        assert_eq!(p.steps, vec![Step::GapSrc(0), Step::Match { src: 1, tgt: 0 }, Step::GapTgt(1)]);
    }

    #[test]
    fn exact_rational_scores() {
        let r = |n, d| Rational64::new(n, d);
        let mat = SimilarityMatrix::from_rows(vec![vec![r(9, 10), r(1, 10)], vec![r(1, 10), r(9, 10)]]).unwrap();
        let p = nw_align(&mat, r(-3, 10)).unwrap();
        assert_eq!(p.score, r(9, 5));
        assert_eq!(nw_align_wavefront(&mat, r(-3, 10)).unwrap(), p);
    }

    #[test]
    fn rejects_non_negative_gap() {
        assert!(nw_align(&m(vec![vec![0.5]]), 0.0).is_err());
        assert!(nw_align_wavefront(&m(vec![vec![0.5]]), 0.1).is_err());
    }

    #[test]
    fn wavefront_matches_on_large_matrix() {
        let n = 600;
        let cells: Vec<f64> = (0..n * (n - 37)).map(|k| ((k * 7919) % 997) as f64 / 1000.0 + 0.001).collect();
        let mat = SimilarityMatrix::new(n, n - 37, cells).unwrap();
        let a = nw_align(&mat, -0.3).unwrap();
        let b = nw_align_wavefront(&mat, -0.3).unwrap();
        assert_eq!(a, b);
        assert!(a.is_valid_for(n, n - 37));
    }

    fn matrix_strategy() -> impl Strategy<Value = SimilarityMatrix<f64>> {
        (1usize..=7, 1usize..=7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0.001f64..0.999, r * c).prop_map(move |cells| SimilarityMatrix::new(r, c, cells).unwrap())
        })
    }

    proptest! {
        #[test]
        fn path_is_complete_and_monotone(mat in matrix_strategy(), gap in -1.0f64..-0.01) {
            let p = nw_align(&mat, gap).unwrap();
            prop_assert!(p.is_valid_for(mat.rows(), mat.cols()));
            prop_assert!((p.rescore(&mat, gap) - p.score).abs() < 1e-9);
            prop_assert_eq!(nw_align_wavefront(&mat, gap).unwrap(), p);
        }

        #[test]
        fn transpose_swaps_gap_kinds(mat in matrix_strategy(), gap in -1.0f64..-0.01) {
            let p = nw_align(&mat, gap).unwrap();
            let q = nw_align(&mat.transpose(), gap).unwrap();
            prop_assert!((p.score - q.score).abs() < 1e-9);
            let swapped: Vec<Step> = q.steps.iter().map(|s| match *s {
                Step::Match { src, tgt } => Step::Match { src: tgt, tgt: src },
                Step::GapSrc(i) => Step::GapTgt(i),
                Step::GapTgt(j) => Step::GapSrc(j),
            }).collect();
            let mut a = p.matches().collect::<Vec<_>>();
            let mut b = swapped.iter().filter_map(|s| match *s { Step::Match { src, tgt } => Some((src, tgt)), _ => None }).collect::<Vec<_>>();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }
}
