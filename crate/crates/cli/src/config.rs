//! Pipeline configuration: a TOML file, overridden by command-line flags,
//! validated field by field.

use std::path::{Path, PathBuf};

use bitext_core::aligner::{DEFAULT_GAP_PENALTY, DEFAULT_MAX_SENTENCES, DEFAULT_THRESHOLD};
use bitext_core::classifier::{Hyperparams, DEFAULT_NEGATIVES_PER_POSITIVE};
use bitext_core::evalmetrics::{DEFAULT_MAX_N, DEFAULT_PER_SEGMENT, DEFAULT_RESAMPLES, DEFAULT_SEGMENTS, MIN_RESAMPLES};
use bitext_core::filterlm::{DEFAULT_ADD_K, DEFAULT_KEEP_FRACTION, DEFAULT_ORDER, MAX_ORDER};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MAX_CHAIN_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub src_lang: String,
    pub tgt_lang: String,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub paths: Paths,
    pub classifier: ClassifierConfig,
    pub mining: MiningConfig,
    pub analogy: AnalogyConfig,
    pub filter: FilterConfig,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub src_dump: Option<PathBuf>,
    pub tgt_dump: Option<PathBuf>,
    /// Paired-directory collection, used instead of dumps.
    pub collection: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// `src TAB tgt` per line.
    pub seed_corpus: Option<PathBuf>,
    /// Source-language sentences, one per line, for rewriting.
    pub monolingual: Option<PathBuf>,
    /// In-domain bitext for filtering and evaluation; defaults to the seed
    /// corpus.
    pub in_domain: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierConfig {
    pub negatives: usize,
    pub lambda: f64,
    pub epochs: usize,
    pub holdout_fraction: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let hp = Hyperparams::default();
        ClassifierConfig {
            negatives: DEFAULT_NEGATIVES_PER_POSITIVE,
            lambda: hp.lambda,
            epochs: hp.epochs,
            holdout_fraction: hp.holdout_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MiningConfig {
    pub threshold: f64,
    pub gap_penalty: f64,
    pub max_sentences: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            threshold: DEFAULT_THRESHOLD,
            gap_penalty: DEFAULT_GAP_PENALTY,
            max_sentences: DEFAULT_MAX_SENTENCES,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalogyConfig {
    pub chain_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub order: usize,
    pub add_k: f64,
    pub keep_fraction: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            order: DEFAULT_ORDER,
            add_k: DEFAULT_ADD_K,
            keep_fraction: DEFAULT_KEEP_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub segments: usize,
    pub per_segment: usize,
    pub resamples: usize,
    pub max_n: usize,
    pub smooth: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            segments: DEFAULT_SEGMENTS,
            per_segment: DEFAULT_PER_SEGMENT,
            resamples: DEFAULT_RESAMPLES,
            max_n: DEFAULT_MAX_N,
            smooth: false,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            src_lang: "pl".into(),
            tgt_lang: "en".into(),
            seed: 42,
            workers: 1,
            output: None,
            paths: Paths::default(),
            classifier: ClassifierConfig::default(),
            mining: MiningConfig::default(),
            analogy: AnalogyConfig::default(),
            filter: FilterConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

/// Values given on the command line; each replaces its config field.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn check(ok: bool, field: &str, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(invalid(field, message()))
    }
}

impl PipelineConfig {
    /// Reads `path` (or the defaults when `None`), applies `overrides`,
    /// makes every path absolute and validates the result. Config paths are
    /// relative to the config file; `--output` is relative to the working
    /// directory.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let (mut config, base) = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| invalid("--config", format!("cannot read {}: {e}", path.display())))?;
                let config: PipelineConfig = toml::from_str(&text).map_err(|e| invalid("--config", format!("{}: {}", path.display(), e.message())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (config, base)
            }
            None => (PipelineConfig::default(), PathBuf::new()),
        };
        let cwd = std::env::current_dir().map_err(|e| invalid("--output", e.to_string()))?;
        let base = cwd.join(base);
        config.resolve_paths(&base);
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(workers) = overrides.workers {
            config.workers = workers;
        }
        if let Some(output) = &overrides.output {
            config.output = Some(cwd.join(output));
        }
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        for slot in [
            &mut p.src_dump,
            &mut p.tgt_dump,
            &mut p.collection,
            &mut p.lexicon,
            &mut p.seed_corpus,
            &mut p.monolingual,
            &mut p.in_domain,
            &mut self.output,
        ] {
            if let Some(path) = slot.as_mut() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check(!self.src_lang.is_empty(), "src_lang", || "must not be empty".into())?;
        check(!self.tgt_lang.is_empty(), "tgt_lang", || "must not be empty".into())?;
        check(self.src_lang != self.tgt_lang, "tgt_lang", || format!("must differ from src_lang ({})", self.src_lang))?;
        check(self.workers >= 1, "workers", || "must be at least 1".into())?;
        check(self.output.is_some(), "output", || "no output directory given in the config or with --output".into())?;

        let p = &self.paths;
        for (field, path) in [
            ("paths.src_dump", &p.src_dump),
            ("paths.tgt_dump", &p.tgt_dump),
            ("paths.collection", &p.collection),
            ("paths.lexicon", &p.lexicon),
            ("paths.seed_corpus", &p.seed_corpus),
            ("paths.monolingual", &p.monolingual),
            ("paths.in_domain", &p.in_domain),
        ] {
            if let Some(path) = path {
                check(path.exists(), field, || format!("{} does not exist", path.display()))?;
            }
        }
        check(p.src_dump.is_some() == p.tgt_dump.is_some(), "paths.tgt_dump", || {
            "src_dump and tgt_dump must be given together".into()
        })?;
        check(!(p.src_dump.is_some() && p.collection.is_some()), "paths.collection", || {
            "give either dumps or a collection, not both".into()
        })?;

        let c = &self.classifier;
        check(c.negatives >= 1, "classifier.negatives", || "must be at least 1".into())?;
        check(c.lambda.is_finite() && c.lambda > 0.0, "classifier.lambda", || format!("must be positive, got {}", c.lambda))?;
        check(c.epochs >= 1, "classifier.epochs", || "must be at least 1".into())?;
        check((0.0..1.0).contains(&c.holdout_fraction), "classifier.holdout_fraction", || {
            format!("must lie in [0, 1), got {}", c.holdout_fraction)
        })?;

        let m = &self.mining;
        check(m.threshold > 0.0 && m.threshold < 1.0, "mining.threshold", || format!("must lie in (0, 1), got {}", m.threshold))?;
        check(m.gap_penalty.is_finite() && m.gap_penalty < 0.0, "mining.gap_penalty", || {
            format!("must be negative, got {}", m.gap_penalty)
        })?;
        check(m.max_sentences >= 1, "mining.max_sentences", || "must be at least 1".into())?;

        check(self.analogy.chain_depth <= MAX_CHAIN_DEPTH, "analogy.chain_depth", || {
            format!("must be at most {MAX_CHAIN_DEPTH}, got {}", self.analogy.chain_depth)
        })?;

        let f = &self.filter;
        check((1..=MAX_ORDER).contains(&f.order), "filter.order", || format!("must lie in 1..={MAX_ORDER}, got {}", f.order))?;
        check(f.add_k.is_finite() && f.add_k > 0.0, "filter.add_k", || format!("must be positive, got {}", f.add_k))?;
        check(f.keep_fraction > 0.0 && f.keep_fraction <= 1.0, "filter.keep_fraction", || {
            format!("must lie in (0, 1], got {}", f.keep_fraction)
        })?;

        let e = &self.eval;
        check(e.segments >= 1, "eval.segments", || "must be at least 1".into())?;
        check(e.resamples >= MIN_RESAMPLES, "eval.resamples", || format!("must be at least {MIN_RESAMPLES}, got {}", e.resamples))?;
        check(e.max_n >= 1, "eval.max_n", || "must be at least 1".into())?;
        Ok(())
    }

    pub fn output_dir(&self) -> &Path {
        self.output.as_deref().expect("validated")
    }

    /// A path a stage cannot run without.
    pub fn required<'a>(&self, path: &'a Option<PathBuf>, field: &str, stage: &str) -> Result<&'a Path, CliError> {
        path.as_deref().ok_or_else(|| invalid(field, format!("required by {stage}")))
    }

    pub fn in_domain(&self) -> Option<&Path> {
        self.paths.in_domain.as_deref().or(self.paths.seed_corpus.as_deref())
    }

    /// Canonical TOML text of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PipelineConfig, CliError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, text).unwrap();
        PipelineConfig::load(Some(&path), &Overrides::default())
    }

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn defaults_need_an_output() {
        let err = PipelineConfig::load(None, &Overrides::default()).unwrap_err();
        assert_eq!(field_of(err), "output");
        let ok = PipelineConfig::load(None, &Overrides { output: Some("x".into()), ..Overrides::default() }).unwrap();
        assert!(ok.output_dir().is_absolute());
    }

    #[test]
    fn out_of_range_values_name_the_field() {
        assert_eq!(field_of(parse("output = \"o\"\n[mining]\nthreshold = 1.5\n").unwrap_err()), "mining.threshold");
        assert_eq!(field_of(parse("output = \"o\"\n[mining]\ngap_penalty = 0.2\n").unwrap_err()), "mining.gap_penalty");
        assert_eq!(field_of(parse("output = \"o\"\n[filter]\norder = 9\n").unwrap_err()), "filter.order");
        assert_eq!(field_of(parse("output = \"o\"\nworkers = 0\n").unwrap_err()), "workers");
        assert_eq!(field_of(parse("output = \"o\"\n[paths]\nlexicon = \"nope.tsv\"\n").unwrap_err()), "paths.lexicon");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse("output = \"o\"\n[mining]\nthresold = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("thresold"), "{err}");
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "output = \"o\"\nseed = 1\nworkers = 2\n").unwrap();
        let over = Overrides { seed: Some(9), workers: Some(3), output: None };
        let c = PipelineConfig::load(Some(&path), &over).unwrap();
        assert_eq!((c.seed, c.workers), (9, 3));
        assert_eq!(c.output_dir(), dir.path().join("o"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let c = PipelineConfig::default();
        let back: PipelineConfig = toml::from_str(&c.canonical()).unwrap();
        assert_eq!(back, c);
    }
}
