use rayon::prelude::*;

use crate::classifier::{FeatureExtractor, MaxMarginModel};
use crate::error::{Error, Result};
use crate::scalar::{Real, Score};

pub const DEFAULT_MAX_SENTENCES: usize = 2000;

/// Row-major `rows x cols` grid of similarity scores, each strictly inside
/// (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<S> {
    rows: usize,
    cols: usize,
    cells: Vec<S>,
}

impl<S: Score> SimilarityMatrix<S> {
    pub fn new(rows: usize, cols: usize, cells: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDocument);
        }
        if cells.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: cells.len(),
            });
        }
        if let Some(pos) = cells.iter().position(|v| !(*v > S::zero() && *v < S::one())) {
            return Err(Error::invalid(format!(
                "cell ({}, {}) is outside (0, 1): {:?}",
                pos / cols,
                pos % cols,
                cells[pos]
            )));
        }
        Ok(SimilarityMatrix { rows, cols, cells })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: bad.len() });
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                cells.push(self.get(i, j));
            }
        }
        SimilarityMatrix {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }
}

/// Upper bounds on document size, in sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixLimits {
    pub max_rows: usize,
    pub max_cols: usize,
}

impl Default for MatrixLimits {
    fn default() -> Self {
        MatrixLimits {
            max_rows: DEFAULT_MAX_SENTENCES,
            max_cols: DEFAULT_MAX_SENTENCES,
        }
    }
}

/// Scores every source sentence against every target sentence. Rows are
/// computed in parallel on the current rayon pool.
pub fn build_similarity_matrix<F: Real, S: AsRef<[String]> + Sync>(
    src: &[S],
    tgt: &[S],
    model: &MaxMarginModel<F>,
    extractor: &FeatureExtractor<'_>,
    limits: MatrixLimits,
) -> Result<SimilarityMatrix<F>> {
    let (rows, cols) = (src.len(), tgt.len());
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDocument);
    }
    if rows > limits.max_rows || cols > limits.max_cols {
        return Err(Error::OversizeDocument {
            rows,
            cols,
            max_rows: limits.max_rows,
            max_cols: limits.max_cols,
        });
    }
    if src.iter().chain(tgt).any(|s| s.as_ref().is_empty()) {
        return Err(Error::EmptySentence);
    }
    let src_prep: Vec<_> = src.par_iter().map(|s| extractor.prepare_src(s.as_ref())).collect();
    let tgt_prep: Vec<_> = tgt.par_iter().map(|t| extractor.prepare_tgt(t.as_ref())).collect();
    let rows_out: Vec<Vec<F>> = src_prep
        .par_iter()
        .map(|s| {
            tgt_prep
                .iter()
                .map(|t| model.score(&extractor.extract_prepared(s, t)))
                .collect::<Result<Vec<F>>>()
        })
        .collect::<Result<_>>()?;
    SimilarityMatrix::new(rows, cols, rows_out.into_iter().flatten().collect())
}
