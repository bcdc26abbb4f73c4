//! The pipeline stages. Each reads its inputs, writes its artifacts into
//! the output directory and commits them together with a manifest.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use bitext_core::aligner::{mine_collection, write_bitext, write_report, write_scores, MatrixLimits, MiningOptions};
use bitext_core::analogy::{cluster_analogies, detect_analogies, extract_models, generate_pairs, mine_quasi_parallel, write_models, GeneratedPair};
use bitext_core::classifier::{generate_training_set, train_classifier, training_features, FeatureExtractor, Hyperparams, MaxMarginModel};
use bitext_core::evalmetrics::{evaluate, make_test_split, write_eval_report, BleuOptions};
use bitext_core::filterlm::{filter_top, interpolate_lms, score_pairs, train_ngram_lm, write_arpa, DomainModels, EmOptions, LmOptions, NGramLM};
use bitext_core::ingest::{
    detokenize, pair_documents, parse_dump, read_paired_directory, tokenize, write_paired_directory, write_pair_manifest, ComparableDocPair,
    RawDocument, Segmenter, SentenceRecord,
};
use bitext_core::lexicon::{load_lexicon, LexiconOptions, TranslationLexicon};

use crate::artifacts::Stage;
use crate::config::PipelineConfig;
use crate::error::{io_at, CliError, Context};

pub const COLLECTION_DIR: &str = "collection";
pub const MODEL_FILE: &str = "classifier.model";
pub const REWRITING_MODELS_FILE: &str = "rewriting_models.tsv";

type Tokens = Vec<String>;

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).map_err(io_at(path))?))
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(io_at(path))?;
        if !line.trim().is_empty() {
            out.push(line.trim_end_matches('\r').to_string());
        }
    }
    Ok(out)
}

/// `src TAB tgt` lines.
fn read_bitext_tsv(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(io_at(path))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let Some((s, t)) = line.split_once('\t').filter(|(_, t)| !t.contains('\t')) else {
            return Err(CliError::Stage(format!("{}, line {}: expected src TAB tgt", path.display(), i + 1)));
        };
        out.push((s.to_string(), t.to_string()));
    }
    Ok(out)
}

fn tokenized(pairs: &[(String, String)]) -> Vec<(Tokens, Tokens)> {
    pairs.iter().map(|(s, t)| (tokenize(s), tokenize(t))).collect()
}

fn load_lex(stage: &mut Stage, config: &PipelineConfig, name: &str) -> Result<TranslationLexicon, CliError> {
    let path = config.required(&config.paths.lexicon, "paths.lexicon", name)?;
    stage.input(path)?;
    let (lexicon, report) = load_lexicon(open(path)?, &config.src_lang, &config.tgt_lang, LexiconOptions::default())
        .context(format!("reading {}", path.display()))?;
    stage.note("lexicon_pruned", report.pruned);
    stage.note("lexicon_renormalized", report.renormalized.len());
    Ok(lexicon)
}

fn load_seed(stage: &mut Stage, config: &PipelineConfig, name: &str) -> Result<Vec<(String, String)>, CliError> {
    let path = config.required(&config.paths.seed_corpus, "paths.seed_corpus", name)?;
    stage.input(path)?;
    read_bitext_tsv(path)
}

fn write_bytes(stage: &mut Stage, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    stage.write(name, |w| w.write_all(bytes).map_err(io_at(name)))
}

fn write_text_lines<I: IntoIterator<Item = String>>(stage: &mut Stage, name: &str, lines: I) -> Result<(), CliError> {
    let mut text = String::new();
    for line in lines {
        text.push_str(&line);
        text.push('\n');
    }
    write_bytes(stage, name, text.as_bytes())
}

fn read_dump_file(path: &Path, lang: &str) -> Result<(Vec<RawDocument>, usize), CliError> {
    let mut reader = parse_dump(open(path)?, lang);
    let docs = reader.by_ref().collect::<bitext_core::Result<Vec<_>>>().context(format!("reading {}", path.display()))?;
    Ok((docs, reader.skipped()))
}

pub fn harvest(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("harvest", config)?;
    let p = &config.paths;
    let pairs: Vec<ComparableDocPair> = match (&p.src_dump, &p.tgt_dump, &p.collection) {
        (Some(src), Some(tgt), _) => {
            stage.input(src)?;
            stage.input(tgt)?;
            let (src_docs, src_skipped) = read_dump_file(src, &config.src_lang)?;
            let (tgt_docs, tgt_skipped) = read_dump_file(tgt, &config.tgt_lang)?;
            stage.note("src_documents", src_docs.len());
            stage.note("tgt_documents", tgt_docs.len());
            stage.note("pages_skipped", src_skipped + tgt_skipped);
            let outcome = pair_documents(src_docs, tgt_docs).context("pairing documents")?;
            stage.note("missing_links", outcome.missing_links);
            stage.note("link_conflicts", outcome.conflicts);
            stage.note("blank_skipped", outcome.blank_skipped);
            outcome.pairs
        }
        (_, _, Some(dir)) => {
            stage.input(dir)?;
            let read = read_paired_directory(dir, &config.src_lang, &config.tgt_lang).context(format!("reading {}", dir.display()))?;
            stage.note("unknown_entries", read.unknown_entries);
            stage.note("blank_skipped", read.blank_skipped);
            read.pairs
        }
        _ => {
            return Err(CliError::Config {
                field: "paths.src_dump".into(),
                message: "harvest needs src_dump and tgt_dump, or a collection".into(),
            })
        }
    };
    stage.note("pairs", pairs.len());
    let dir = stage.dir(COLLECTION_DIR)?;
    write_paired_directory(&dir, &pairs).context("writing the collection")?;
    stage.write("doc_pairs.tsv", |w| write_pair_manifest(w, &pairs).map_err(io_at("doc_pairs.tsv")))?;
    log::info!("harvest: {} document pairs", pairs.len());
    stage.commit(config)
}

pub fn train(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("train-classifier", config)?;
    let lexicon = load_lex(&mut stage, config, "train-classifier")?;
    let corpus = tokenized(&load_seed(&mut stage, config, "train-classifier")?);
    let c = &config.classifier;
    let set = generate_training_set(&corpus, c.negatives, config.seed).context("sampling training pairs")?;
    let extractor = FeatureExtractor::new(&lexicon);
    let (pos, neg) = training_features::<f64, _>(&corpus, &set, &extractor).context("extracting features")?;
    let hp = Hyperparams {
        lambda: c.lambda,
        epochs: c.epochs,
        seed: config.seed,
        holdout_fraction: c.holdout_fraction,
        threshold: config.mining.threshold,
        ..Hyperparams::default()
    };
    let trained = train_classifier(&pos, &neg, &hp).context("training the classifier")?;
    stage.note("positives", pos.len());
    stage.note("negatives", neg.len());
    stage.note("train_size", trained.train_size);
    stage.note("holdout_size", trained.holdout_size);
    let mut model = Vec::new();
    trained.model.save(&mut model).context("serialising the model")?;
    write_bytes(&mut stage, MODEL_FILE, &model)?;
    write_text_lines(
        &mut stage,
        "classifier.trace.tsv",
        std::iter::once("epoch\tobjective".to_string())
            .chain(trained.loss_trace.iter().enumerate().map(|(e, l)| format!("{}\t{l}", e + 1))),
    )?;
    stage.commit(config)
}

fn load_collection(stage: &mut Stage, config: &PipelineConfig, producer_of_use: &'static str) -> Result<Vec<ComparableDocPair>, CliError> {
    let dir = stage.artifact(COLLECTION_DIR, producer_of_use)?;
    let read = read_paired_directory(&dir, &config.src_lang, &config.tgt_lang).context(format!("reading {}", dir.display()))?;
    Ok(read.pairs)
}

pub fn mine(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("mine", config)?;
    let model_path = stage.artifact(MODEL_FILE, "train-classifier")?;
    let model: MaxMarginModel<f64> = MaxMarginModel::load(open(&model_path)?).context(format!("reading {}", model_path.display()))?;
    let pairs = load_collection(&mut stage, config, "harvest")?;
    let lexicon = load_lex(&mut stage, config, "mine")?;
    let m = &config.mining;
    let opts = MiningOptions {
        threshold: m.threshold,
        gap_penalty: m.gap_penalty,
        workers: config.workers,
        limits: MatrixLimits {
            max_rows: m.max_sentences,
            max_cols: m.max_sentences,
        },
        segmenter: Segmenter::default(),
    };
    let mined = mine_collection(&pairs, &model, &lexicon, &opts).context("mining")?;
    let (mut src, mut tgt, mut scores, mut report) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    write_bitext(&mined.pairs, &mut src, &mut tgt).context("writing the bitext")?;
    write_scores(&mined.pairs, &mut scores).context("writing scores")?;
    write_report(&mined.report, &mut report).context("writing the report")?;
    write_bytes(&mut stage, &format!("mined.{}", config.src_lang), &src)?;
    write_bytes(&mut stage, &format!("mined.{}", config.tgt_lang), &tgt)?;
    write_bytes(&mut stage, "mined.scores.tsv", &scores)?;
    write_bytes(&mut stage, "mining.report.tsv", &report)?;
    stage.note("mined_pairs", mined.pairs.len());
    stage.note("failed_documents", mined.report.failed().count());
    log::info!("mine: {} sentence pairs from {} document pairs", mined.pairs.len(), pairs.len());
    stage.commit(config)
}

fn substitutions(g: &GeneratedPair) -> String {
    g.substitutions.iter().map(|(s, t, p)| format!("{s}>{t}:{p}")).collect::<Vec<_>>().join(" ")
}

pub fn analogy(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("analogy", config)?;
    let seed: Vec<(SentenceRecord, SentenceRecord)> = load_seed(&mut stage, config, "analogy")?
        .into_iter()
        .map(|(s, t)| (SentenceRecord::new(s), SentenceRecord::new(t)))
        .collect();
    let lexicon = load_lex(&mut stage, config, "analogy")?;
    let quads = detect_analogies(&seed);
    let clusters = cluster_analogies(&quads, config.analogy.chain_depth);
    let models = extract_models(&clusters, &seed);
    stage.note("quadruples", quads.len());
    stage.note("clusters", clusters.len());
    stage.note("chained_clusters", clusters.iter().filter(|c| !c.extensions.is_empty()).count());
    stage.note("models", models.len());
    let mut store = Vec::new();
    write_models(&models, &mut store).context("writing rewriting models")?;
    write_bytes(&mut stage, REWRITING_MODELS_FILE, &store)?;

    // (src, tgt, provenance)
    let mut out: Vec<(String, String, String)> = Vec::new();
    let mut review = vec!["src\ttgt\tmodel_id".to_string()];
    if let Some(path) = &config.paths.monolingual {
        stage.input(path)?;
        let sentences: Vec<SentenceRecord> = read_lines(path)?.into_iter().map(SentenceRecord::new).collect();
        let generation = generate_pairs(&models, &sentences, &lexicon);
        stage.note("generated", generation.generated.len());
        stage.note("review", generation.review.len());
        for g in &generation.generated {
            out.push((g.src_text(), g.tgt_text(), format!("generated\t{}\t{}", g.model_id, substitutions(g))));
        }
        for (s, t, id) in &generation.review {
            review.push(format!("{}\t{}\t{id}", detokenize(s), detokenize(t)));
        }
    }
    if stage.path(COLLECTION_DIR).exists() {
        let pairs = load_collection(&mut stage, config, "harvest")?;
        let segmenter = Segmenter::default();
        let mut matched = 0;
        for pair in &pairs {
            let src = segmenter.segment_document(&pair.src);
            let tgt = segmenter.segment_document(&pair.tgt);
            for (i, j, g) in mine_quasi_parallel(&models, &src, &tgt, &lexicon) {
                matched += 1;
                out.push((
                    src[i].raw().to_string(),
                    tgt[j].raw().to_string(),
                    format!("matched:{}:{i}:{j}\t{}\t{}", pair.id(), g.model_id, substitutions(&g)),
                ));
            }
        }
        stage.note("matched", matched);
    }
    // two models can produce the same pair; the first one is kept
    let mut seen = std::collections::HashSet::new();
    out.retain(|(s, t, _)| seen.insert((s.clone(), t.clone())));
    stage.note("quasi_pairs", out.len());
    write_text_lines(&mut stage, &format!("quasi.{}", config.src_lang), out.iter().map(|o| o.0.clone()))?;
    write_text_lines(&mut stage, &format!("quasi.{}", config.tgt_lang), out.iter().map(|o| o.1.clone()))?;
    write_text_lines(
        &mut stage,
        "quasi.provenance.tsv",
        std::iter::once("origin\tmodel_id\tsubstitutions".to_string()).chain(out.iter().map(|o| o.2.clone())),
    )?;
    write_text_lines(&mut stage, "quasi.review.tsv", review)?;
    log::info!("analogy: {} models, {} quasi-parallel pairs", models.len(), out.len());
    stage.commit(config)
}

/// Reads `<prefix>.<src>` and `<prefix>.<tgt>` when both exist.
fn read_candidates(stage: &mut Stage, config: &PipelineConfig, prefix: &str) -> Result<Option<Vec<(String, String)>>, CliError> {
    let src = stage.path(&format!("{prefix}.{}", config.src_lang));
    let tgt = stage.path(&format!("{prefix}.{}", config.tgt_lang));
    if !(src.exists() && tgt.exists()) {
        return Ok(None);
    }
    stage.input(&src)?;
    stage.input(&tgt)?;
    let (s, t) = (read_lines_keep_blank(&src)?, read_lines_keep_blank(&tgt)?);
    if s.len() != t.len() {
        return Err(CliError::Stage(format!("{} and {} differ in line count", src.display(), tgt.display())));
    }
    Ok(Some(s.into_iter().zip(t).collect()))
}

fn read_lines_keep_blank(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn train_lm(corpus: &[&Tokens], opts: &LmOptions, what: &str) -> Result<NGramLM<f64>, CliError> {
    train_ngram_lm(corpus, opts).context(format!("training the {what} language model"))
}

pub fn filter(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("filter", config)?;
    let mut pool: Vec<(String, (String, String))> = Vec::new();
    let mut any = false;
    for prefix in ["mined", "quasi"] {
        if let Some(pairs) = read_candidates(&mut stage, config, prefix)? {
            any = true;
            pool.extend(pairs.into_iter().enumerate().map(|(i, p)| (format!("{prefix}:{}", i + 1), p)));
        }
    }
    if !any {
        return Err(CliError::MissingArtifact {
            path: stage.path(&format!("mined.{}", config.src_lang)),
            producer: "mine",
        });
    }
    if pool.is_empty() {
        return Err(CliError::Stage("filter: no candidate sentence pairs to score".into()));
    }
    let in_path = config.in_domain().ok_or_else(|| CliError::Config {
        field: "paths.seed_corpus".into(),
        message: "filter needs in-domain text: set paths.in_domain or paths.seed_corpus".into(),
    })?;
    stage.input(in_path)?;
    let in_domain = tokenized(&read_bitext_tsv(in_path)?);
    let candidates: Vec<(Tokens, Tokens)> = pool.iter().map(|(_, (s, t))| (tokenize(s), tokenize(t))).collect();

    // every tenth in-domain pair is held out to fit the mixture weights
    let (train_in, dev): (Vec<_>, Vec<_>) = in_domain.iter().enumerate().partition(|(i, _)| i % 10 != 9);
    let train_in: Vec<&(Tokens, Tokens)> = if train_in.is_empty() { dev.iter().map(|p| p.1).collect() } else { train_in.into_iter().map(|p| p.1).collect() };
    let dev: Vec<&(Tokens, Tokens)> = dev.into_iter().map(|p| p.1).collect();

    let f = &config.filter;
    let side_models = |pick: fn(&(Tokens, Tokens)) -> &Tokens, side: &str| -> Result<DomainModels<NGramLM<f64>>, CliError> {
        let vocabulary = train_in.iter().map(|p| pick(p)).chain(candidates.iter().map(pick)).flatten().cloned().collect();
        let opts = LmOptions {
            order: f.order,
            add_k: f.add_k,
            vocabulary: Some(vocabulary),
        };
        let in_corpus: Vec<&Tokens> = train_in.iter().map(|p| pick(p)).collect();
        let out_corpus: Vec<&Tokens> = candidates.iter().map(pick).collect();
        Ok(DomainModels {
            in_domain: train_lm(&in_corpus, &opts, &format!("in-domain {side}"))?,
            out_domain: train_lm(&out_corpus, &opts, &format!("general {side}"))?,
        })
    };
    let src_models = side_models(|p| &p.0, &config.src_lang)?;
    let tgt_models = side_models(|p| &p.1, &config.tgt_lang)?;

    let scores: Vec<f64> = score_pairs(&src_models, &tgt_models, &candidates);
    let items: Vec<(usize, f64)> = (0..pool.len()).zip(scores).collect();
    let kept = filter_top(items, f.keep_fraction).context("selecting pairs")?;
    stage.note("candidates", pool.len());
    stage.note("kept", kept.len());

    write_text_lines(&mut stage, &format!("filtered.{}", config.src_lang), kept.iter().map(|(i, _)| pool[*i].1 .0.clone()))?;
    write_text_lines(&mut stage, &format!("filtered.{}", config.tgt_lang), kept.iter().map(|(i, _)| pool[*i].1 .1.clone()))?;
    write_text_lines(
        &mut stage,
        "filtered.scores.tsv",
        std::iter::once("origin\tscore".to_string()).chain(kept.iter().map(|(i, s)| format!("{}\t{s}", pool[*i].0))),
    )?;

    for (models, lang) in [(&src_models, &config.src_lang), (&tgt_models, &config.tgt_lang)] {
        let mut arpa = Vec::new();
        write_arpa(&models.in_domain, &mut arpa).context("writing the language model")?;
        write_bytes(&mut stage, &format!("lm.in.{lang}.arpa"), &arpa)?;
    }

    let mut weights = vec!["side\tmodel\tweight\tconverged".to_string()];
    if !dev.is_empty() {
        for (models, lang, pick) in [
            (&src_models, &config.src_lang, (|p: &(Tokens, Tokens)| p.0.clone()) as fn(&(Tokens, Tokens)) -> Tokens),
            (&tgt_models, &config.tgt_lang, |p: &(Tokens, Tokens)| p.1.clone()),
        ] {
            let dev_side: Vec<Tokens> = dev.iter().map(|p| pick(p)).collect();
            let mix = interpolate_lms(vec![models.out_domain.clone(), models.in_domain.clone()], &dev_side, &EmOptions::default())
                .context("fitting mixture weights")?;
            for (name, w) in ["general", "in_domain"].iter().zip(&mix.weights) {
                weights.push(format!("{lang}\t{name}\t{w}\t{}", mix.converged));
            }
        }
    }
    write_text_lines(&mut stage, "lm.interpolation.tsv", weights)?;
    log::info!("filter: kept {} of {} pairs", kept.len(), pool.len());
    stage.commit(config)
}

/// Word-by-word translation with the best lexicon entry; unknown words are
/// copied.
fn lexicon_baseline(lexicon: &TranslationLexicon, src: &[String]) -> Tokens {
    src.iter()
        .map(|w| lexicon.best_translation(w).map_or_else(|| w.clone(), |(t, _)| t.to_string()))
        .collect()
}

pub fn eval(config: &PipelineConfig) -> Result<(), CliError> {
    let mut stage = Stage::begin("eval", config)?;
    let path = config.in_domain().ok_or_else(|| CliError::Config {
        field: "paths.seed_corpus".into(),
        message: "eval needs a reference bitext: set paths.in_domain or paths.seed_corpus".into(),
    })?;
    stage.input(path)?;
    let corpus = tokenized(&read_bitext_tsv(path)?);
    let lexicon = load_lex(&mut stage, config, "eval")?;
    let e = &config.eval;
    let split = make_test_split(corpus.len(), e.segments, e.per_segment, config.seed).context("splitting the test set")?;
    let hyps: Vec<Tokens> = split.test.iter().map(|&i| lexicon_baseline(&lexicon, &corpus[i].0)).collect();
    let refs: Vec<Tokens> = split.test.iter().map(|&i| corpus[i].1.clone()).collect();
    let opts = BleuOptions { max_n: e.max_n, smooth: e.smooth };
    let report = evaluate(&hyps, &refs, opts, e.resamples, config.seed).context("scoring")?;
    stage.note("test_size", split.test.len());
    stage.note("train_size", split.train.len());
    stage.note("system", "lexicon-word-by-word");
    let mut text = Vec::new();
    write_eval_report(&report, &mut text).context("writing the report")?;
    write_bytes(&mut stage, "eval.tsv", &text)?;
    write_text_lines(&mut stage, &format!("eval.hyp.{}", config.tgt_lang), hyps.iter().map(|h| detokenize(h)))?;
    write_text_lines(&mut stage, &format!("eval.ref.{}", config.tgt_lang), refs.iter().map(|r| detokenize(r)))?;
    write_text_lines(&mut stage, "eval.test_indices.tsv", split.test.iter().map(|i| i.to_string()))?;
    stage.commit(config)
}

pub fn pipeline(config: &PipelineConfig) -> Result<(), CliError> {
    harvest(config)?;
    train(config)?;
    mine(config)?;
    analogy(config)?;
    filter(config)?;
    eval(config)
}
