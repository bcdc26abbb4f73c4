use std::collections::HashSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use super::matrix::{build_similarity_matrix, MatrixLimits, SimilarityMatrix};
use super::nw::{nw_align_wavefront, AlignmentPath, DEFAULT_GAP_PENALTY};
use crate::classifier::{FeatureExtractor, MaxMarginModel};
use crate::error::{Error, Result};
use crate::ingest::{ComparableDocPair, Segmenter, SentenceRecord};
use crate::lexicon::TranslationLexicon;
use crate::scalar::{Real, Score};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// A match step whose cell clears the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredMatch<S> {
    pub src_index: usize,
    pub tgt_index: usize,
    pub score: S,
}

/// Match steps of `path` scoring at least `tau`, in path order.
pub fn extract_mined_pairs<S: Score>(path: &AlignmentPath<S>, matrix: &SimilarityMatrix<S>, tau: S) -> Result<Vec<ScoredMatch<S>>> {
    if !(tau > S::zero() && tau < S::one()) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1), got {tau:?}")));
    }
    Ok(path
        .matches()
        .map(|(i, j)| ScoredMatch {
            src_index: i,
            tgt_index: j,
            score: matrix.get(i, j),
        })
        .filter(|m| m.score >= tau)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedPair<F> {
    pub src: String,
    pub tgt: String,
    pub score: F,
    pub doc_pair: String,
    pub src_index: usize,
    pub tgt_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub pair_id: String,
    pub src_sentences: usize,
    pub tgt_sentences: usize,
    pub mined: usize,
    /// Set when the pair was skipped.
    pub error: Option<String>,
}

/// Size of one side of the mined corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SideTotals {
    pub bytes: usize,
    pub sentences: usize,
    pub words: usize,
    pub unique_words: usize,
}

impl SideTotals {
    fn measure<'a>(sentences: impl Iterator<Item = &'a str>) -> Self {
        let mut totals = SideTotals::default();
        let mut vocab = HashSet::new();
        for s in sentences {
            totals.bytes += s.len() + 1;
            totals.sentences += 1;
            for tok in SentenceRecord::new(s).tokens() {
                if tok.chars().any(char::is_alphanumeric) {
                    totals.words += 1;
                    vocab.insert(tok.clone());
                }
            }
        }
        totals.unique_words = vocab.len();
        totals
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiningReport {
    pub pairs: Vec<PairReport>,
    pub src: SideTotals,
    pub tgt: SideTotals,
}

impl MiningReport {
    pub fn failed(&self) -> impl Iterator<Item = &PairReport> {
        self.pairs.iter().filter(|p| p.error.is_some())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedCorpus<F> {
    pub pairs: Vec<MinedPair<F>>,
    pub report: MiningReport,
}

#[derive(Debug, Clone)]
pub struct MiningOptions<F> {
    pub threshold: F,
    pub gap_penalty: F,
    pub workers: usize,
    pub limits: MatrixLimits,
    pub segmenter: Segmenter,
}

impl<F: Real> Default for MiningOptions<F> {
    fn default() -> Self {
        MiningOptions {
            threshold: F::of(DEFAULT_THRESHOLD),
            gap_penalty: F::of(DEFAULT_GAP_PENALTY),
            workers: 1,
            limits: MatrixLimits::default(),
            segmenter: Segmenter::default(),
        }
    }
}

fn mine_pair<F: Real>(
    pair: &ComparableDocPair,
    model: &MaxMarginModel<F>,
    extractor: &FeatureExtractor<'_>,
    opts: &MiningOptions<F>,
) -> (PairReport, Vec<MinedPair<F>>) {
    let pair_id = pair.id();
    let src = opts.segmenter.segment_and_tokenize(&pair.src.body);
    let tgt = opts.segmenter.segment_and_tokenize(&pair.tgt.body);
    let mut report = PairReport {
        pair_id: pair_id.clone(),
        src_sentences: src.len(),
        tgt_sentences: tgt.len(),
        mined: 0,
        error: None,
    };
    let run = || -> Result<Vec<MinedPair<F>>> {
        let src_tokens: Vec<&[String]> = src.iter().map(SentenceRecord::tokens).collect();
        let tgt_tokens: Vec<&[String]> = tgt.iter().map(SentenceRecord::tokens).collect();
        let matrix = build_similarity_matrix(&src_tokens, &tgt_tokens, model, extractor, opts.limits)?;
        let path = nw_align_wavefront(&matrix, opts.gap_penalty)?;
        Ok(extract_mined_pairs(&path, &matrix, opts.threshold)?
            .into_iter()
            .map(|m| MinedPair {
                src: src[m.src_index].raw().to_string(),
                tgt: tgt[m.tgt_index].raw().to_string(),
                score: m.score,
                doc_pair: pair_id.clone(),
                src_index: m.src_index,
                tgt_index: m.tgt_index,
            })
            .collect())
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(mined)) => {
            report.mined = mined.len();
            (report, mined)
        }
        Ok(Err(e)) => {
            report.error = Some(e.to_string());
            (report, Vec::new())
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".into());
            report.error = Some(format!("worker panicked: {msg}"));
            (report, Vec::new())
        }
    }
}

/// Mines every document pair on a pool of `opts.workers` threads.
///
/// Output is ordered by document pair id, then by source index, so it does
/// not depend on the worker count. A pair that fails is skipped and its
/// error is kept in the report.
pub fn mine_collection<F: Real>(
    doc_pairs: &[ComparableDocPair],
    model: &MaxMarginModel<F>,
    lexicon: &TranslationLexicon,
    opts: &MiningOptions<F>,
) -> Result<MinedCorpus<F>> {
    if opts.workers == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    if !(opts.threshold > F::zero() && opts.threshold < F::one()) {
        return Err(Error::invalid("threshold must lie in (0, 1)"));
    }
    if !(opts.gap_penalty < F::zero()) {
        return Err(Error::invalid("gap penalty must be negative"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let extractor = FeatureExtractor::new(lexicon);
    let mut results: Vec<(PairReport, Vec<MinedPair<F>>)> =
        pool.install(|| doc_pairs.par_iter().map(|p| mine_pair(p, model, &extractor, opts)).collect());
    results.sort_by(|a, b| a.0.pair_id.cmp(&b.0.pair_id));

    let mut corpus = MinedCorpus {
        pairs: Vec::new(),
        report: MiningReport::default(),
    };
    for (report, mined) in results {
        if let Some(err) = &report.error {
            log::warn!("skipped document pair {}: {err}", report.pair_id);
        }
        corpus.report.pairs.push(report);
        corpus.pairs.extend(mined);
    }
    corpus.report.src = SideTotals::measure(corpus.pairs.iter().map(|p| p.src.as_str()));
    corpus.report.tgt = SideTotals::measure(corpus.pairs.iter().map(|p| p.tgt.as_str()));
    Ok(corpus)
}

/// Writes line-aligned source and target files.
pub fn write_bitext<F, W1: Write, W2: Write>(pairs: &[MinedPair<F>], mut src: W1, mut tgt: W2) -> Result<()> {
    for p in pairs {
        writeln!(src, "{}", p.src)?;
        writeln!(tgt, "{}", p.tgt)?;
    }
    Ok(())
}

/// Writes one `doc_pair, src_index, tgt_index, score` row per mined pair.
pub fn write_scores<F: Real, W: Write>(pairs: &[MinedPair<F>], mut w: W) -> Result<()> {
    writeln!(w, "doc_pair\tsrc_index\ttgt_index\tscore")?;
    for p in pairs {
        writeln!(w, "{}\t{}\t{}\t{}", p.doc_pair, p.src_index, p.tgt_index, p.score.as_f64())?;
    }
    Ok(())
}

pub fn write_report<W: Write>(report: &MiningReport, mut w: W) -> Result<()> {
    writeln!(w, "pair_id\tsrc_sentences\ttgt_sentences\tmined\tstatus")?;
    for p in &report.pairs {
        let status = p.error.as_deref().map_or("ok".to_string(), |e| format!("skipped: {}", e.replace(['\t', '\n'], " ")));
        writeln!(w, "{}\t{}\t{}\t{}\t{}", p.pair_id, p.src_sentences, p.tgt_sentences, p.mined, status)?;
    }
    writeln!(w)?;
    writeln!(w, "side\tbytes\tsentences\twords\tunique_words")?;
    for (side, t) in [("src", report.src), ("tgt", report.tgt)] {
        writeln!(w, "{side}\t{}\t{}\t{}\t{}", t.bytes, t.sentences, t.words, t.unique_words)?;
    }
    Ok(())
}
