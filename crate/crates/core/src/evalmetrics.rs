//! Corpus BLEU, TER without block shifts, percentile bootstrap intervals
//! and the segmented test split.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_N: usize = 4;
pub const DEFAULT_RESAMPLES: usize = 1000;
pub const MIN_RESAMPLES: usize = 100;
pub const DEFAULT_SEGMENTS: usize = 200;
pub const DEFAULT_PER_SEGMENT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuOptions {
    pub max_n: usize,
    /// Add one to matches and totals for orders of 2 and above.
    pub smooth: bool,
}

impl Default for BleuOptions {
    fn default() -> Self {
        BleuOptions { max_n: DEFAULT_MAX_N, smooth: false }
    }
}

/// Counts from which corpus BLEU is computed; they add across sentences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn sentence<S: AsRef<str>>(hyp: &[S], reference: &[S], max_n: usize) -> Self {
        let mut stats = BleuStats {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
        };
        for n in 1..=max_n {
            let (h, r) = (ngram_counts(hyp, n), ngram_counts(reference, n));
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = h.iter().map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0))).sum();
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        if self.matches.is_empty() {
            self.matches = vec![0; other.matches.len()];
            self.totals = vec![0; other.totals.len()];
        }
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Orders with no hypothesis n-grams anywhere in the corpus are left
    /// out of the geometric mean.
    pub fn score(&self, smooth: bool) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut orders = 0;
        for (i, (&m, &t)) in self.matches.iter().zip(&self.totals).enumerate() {
            let (m, t) = if smooth && i >= 1 { (m + 1, t + 1) } else { (m, t) };
            if t == 0 {
                continue;
            }
            if m == 0 {
                return 0.0;
            }
            log_sum += (m as f64 / t as f64).ln();
            orders += 1;
        }
        if orders == 0 {
            return 0.0;
        }
        let (c, r) = (self.hyp_len as f64, self.ref_len as f64);
        let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
        bp * (log_sum / orders as f64).exp()
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_default() += 1;
    }
    counts
}

fn check_lengths<T, U>(hyps: &[T], refs: &[U]) -> Result<()> {
    if hyps.is_empty() {
        return Err(Error::NotEnoughData("empty evaluation corpus".into()));
    }
    if hyps.len() != refs.len() {
        return Err(Error::DimensionMismatch {
            expected: refs.len(),
            got: hyps.len(),
        });
    }
    Ok(())
}

/// Corpus BLEU of tokenized hypotheses against one reference each.
pub fn bleu<S: AsRef<[String]> + Sync>(hyps: &[S], refs: &[S], opts: BleuOptions) -> Result<f64> {
    check_lengths(hyps, refs)?;
    if opts.max_n == 0 {
        return Err(Error::invalid("max_n must be at least 1"));
    }
    let mut total = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total.add(&BleuStats::sentence(h.as_ref(), r.as_ref(), opts.max_n));
    }
    Ok(total.score(opts.smooth))
}

/// Word-level insertions, deletions and substitutions turning `hyp` into
/// `reference`.
pub fn edit_distance<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> usize {
    let h: Vec<&str> = hyp.iter().map(AsRef::as_ref).collect();
    let r: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    strsim::generic_levenshtein(&h, &r)
}

/// Edit distance over reference length. Block shifts are not searched.
pub fn ter<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::invalid("TER needs a non-empty reference"));
    }
    Ok(edit_distance(hyp, reference) as f64 / reference.len() as f64)
}

/// Total edits over total reference length.
pub fn corpus_ter<S: AsRef<[String]> + Sync>(hyps: &[S], refs: &[S]) -> Result<f64> {
    check_lengths(hyps, refs)?;
    let (edits, len) = hyps
        .iter()
        .zip(refs)
        .fold((0usize, 0usize), |(e, l), (h, r)| (e + edit_distance(h.as_ref(), r.as_ref()), l + r.as_ref().len()));
    if len == 0 {
        return Err(Error::invalid("TER needs a non-empty reference"));
    }
    Ok(edits as f64 / len as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Bleu(BleuOptions),
    Ter,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu(_) => "bleu",
            Metric::Ter => "ter",
        }
    }
}

enum Stats {
    Bleu(Vec<BleuStats>, bool),
    Ter(Vec<(u64, u64)>),
}

impl Stats {
    fn new<S: AsRef<[String]> + Sync>(metric: Metric, hyps: &[S], refs: &[S]) -> Self {
        match metric {
            Metric::Bleu(o) => Stats::Bleu(
                hyps.par_iter().zip(refs).map(|(h, r)| BleuStats::sentence(h.as_ref(), r.as_ref(), o.max_n)).collect(),
                o.smooth,
            ),
            Metric::Ter => Stats::Ter(
                hyps.iter()
                    .zip(refs)
                    .map(|(h, r)| (edit_distance(h.as_ref(), r.as_ref()) as u64, r.as_ref().len() as u64))
                    .collect(),
            ),
        }
    }

    fn score(&self, idx: impl Iterator<Item = usize>) -> f64 {
        match self {
            Stats::Bleu(s, smooth) => {
                let mut total = BleuStats::default();
                idx.for_each(|i| total.add(&s[i]));
                total.score(*smooth)
            }
            Stats::Ter(s) => {
                let (e, l) = idx.fold((0, 0), |(e, l), i| (e + s[i].0, l + s[i].1));
                if l == 0 {
                    f64::NAN
                } else {
                    e as f64 / l as f64
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapCi {
    pub point: f64,
    pub low: f64,
    pub high: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Percentile 95% interval over sentence-level resampling with
/// replacement. Resample `r` draws from its own stream of the seeded
/// generator, so the result does not depend on thread scheduling.
pub fn bootstrap_ci<S: AsRef<[String]> + Sync>(metric: Metric, hyps: &[S], refs: &[S], resamples: usize, seed: u64) -> Result<BootstrapCi> {
    check_lengths(hyps, refs)?;
    if resamples < MIN_RESAMPLES {
        return Err(Error::invalid(format!("at least {MIN_RESAMPLES} resamples are required, got {resamples}")));
    }
    let stats = Stats::new(metric, hyps, refs);
    let n = hyps.len();
    let point = stats.score(0..n);
    let mut values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            stats.score((0..n).map(|_| rng.gen_range(0..n)))
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let lo = ((resamples as f64) * 0.025).floor() as usize;
    let hi = (((resamples as f64) * 0.975).ceil() as usize).saturating_sub(1);
    Ok(BootstrapCi {
        point,
        low: values[lo],
        high: values[hi.max(lo)],
        resamples,
        seed,
    })
}

/// Indices of the held-out test pairs and the remaining training pairs,
/// both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Cuts the corpus into `n_segments` contiguous segments of equal size
/// (the last one also takes the remainder) and draws `per_segment` pairs
/// from each.
pub fn make_test_split(corpus_len: usize, n_segments: usize, per_segment: usize, seed: u64) -> Result<TestSplit> {
    if per_segment == 0 {
        return Ok(TestSplit {
            train: (0..corpus_len).collect(),
            test: Vec::new(),
        });
    }
    if n_segments == 0 {
        return Err(Error::invalid("at least one segment is required"));
    }
    let needed = n_segments * per_segment;
    if corpus_len < needed {
        return Err(Error::NotEnoughData(format!(
            "test split needs at least {needed} pairs ({n_segments} segments x {per_segment}), corpus has {corpus_len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = corpus_len / n_segments;
    let mut in_test = vec![false; corpus_len];
    for s in 0..n_segments {
        let start = s * size;
        let len = if s + 1 == n_segments { corpus_len - start } else { size };
        for k in sample(&mut rng, len, per_segment) {
            in_test[start + k] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..corpus_len).partition(|&i| in_test[i]);
    Ok(TestSplit { train, test })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub bleu: BootstrapCi,
    pub ter: BootstrapCi,
    pub bleu_options: BleuOptions,
}

pub fn evaluate<S: AsRef<[String]> + Sync>(hyps: &[S], refs: &[S], bleu_options: BleuOptions, resamples: usize, seed: u64) -> Result<EvalReport> {
    Ok(EvalReport {
        bleu: bootstrap_ci(Metric::Bleu(bleu_options), hyps, refs, resamples, seed)?,
        ter: bootstrap_ci(Metric::Ter, hyps, refs, resamples, seed)?,
        bleu_options,
    })
}

/// Writes the report TSV. NIST and METEOR rows are reserved and marked
/// `NA`.
pub fn write_eval_report<W: Write>(report: &EvalReport, mut w: W) -> Result<()> {
    writeln!(w, "# TER is word edit distance over reference length, without block shifts")?;
    writeln!(w, "metric\tpoint\tci_low\tci_high\tresamples\tseed\tvariant")?;
    let b = &report.bleu;
    let variant = format!("max_n={};smooth={}", report.bleu_options.max_n, report.bleu_options.smooth);
    writeln!(w, "bleu\t{}\t{}\t{}\t{}\t{}\t{variant}", b.point, b.low, b.high, b.resamples, b.seed)?;
    let t = &report.ter;
    writeln!(w, "ter\t{}\t{}\t{}\t{}\t{}\tno-shift", t.point, t.low, t.high, t.resamples, t.seed)?;
    writeln!(w, "nist\tNA\tNA\tNA\tNA\tNA\tnot-implemented")?;
    writeln!(w, "meteor\tNA\tNA\tNA\tNA\tNA\tnot-implemented")?;
    Ok(())
}
