//! Acceptance criteria 1 to 8, one test each. Every test prints a single
//! `PASS`/`FAIL` line to stderr, so the summary is visible without
//! `--nocapture`. Tests hold a shared lock so timings are not disturbed by
//! each other.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use bitext_core::aligner::{mine_collection, nw_align, write_bitext, write_report, write_scores, MiningOptions, SimilarityMatrix};
use bitext_core::analogy::{
    char_profile_holds, cluster_analogies, detect_analogies, extract_models, generate_pairs, word_levenshtein, SymbolTable,
};
use bitext_core::evalmetrics::{bleu, bootstrap_ci, ter, BleuOptions, BleuStats, Metric};
use bitext_core::filterlm::{
    bilingual_moore_lewis_score, interpolate_lms, moore_lewis_score, train_ngram_lm, DomainModels, EmOptions, LmOptions, NGramLM,
};
use bitext_core::ingest::SentenceRecord;
use bitext_core::lexicon::TranslationLexicon;
use common::{planted_collection, request_analogy_seed, train_toy_classifier, ToyLanguage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "acceptance criterion {n} {name}: {status} ({detail})");
    assert!(pass, "criterion {n} {name} failed: {detail}");
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

// ---------------------------------------------------------------------------
// 1. alignment against exhaustive path enumeration

/// Best score over every monotone path: each step matches the next pair or
/// skips one sentence on either side.
fn best_path(m: &[Vec<f64>], gap: f64, i: usize, j: usize) -> f64 {
    let (rows, cols) = (m.len(), m[0].len());
    if i == rows {
        return gap * (cols - j) as f64;
    }
    if j == cols {
        return gap * (rows - i) as f64;
    }
    let matched = m[i][j] + best_path(m, gap, i + 1, j + 1);
    let skip_src = gap + best_path(m, gap, i + 1, j);
    let skip_tgt = gap + best_path(m, gap, i, j + 1);
    matched.max(skip_src).max(skip_tgt)
}

#[test]
fn criterion_1_alignment_matches_exhaustive_enumeration() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let gaps = [-0.1, -0.3, -0.5];
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let cells: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0.001..0.999)).collect()).collect();
        let gap = gaps[trial % 3];
        let matrix = SimilarityMatrix::from_rows(cells.clone()).unwrap();
        let path = nw_align(&matrix, gap).unwrap();
        assert!(path.is_valid_for(rows, cols));
        let expected = best_path(&cells, gap, 0, 0);
        worst = worst.max((path.score - expected).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "alignment-oracle",
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        &format!("1000 matrices, max |diff| {worst:.2e}, {:.2}s", elapsed.as_secs_f64()),
    );
}

// ---------------------------------------------------------------------------
// 2. planted translations in a comparable collection

#[test]
fn criterion_2_planted_pair_benchmark() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lang = ToyLanguage::new(400, &mut rng);
    let model = train_toy_classifier(&lang, 200, &mut rng);
    // 25 pairs of 10 + 10 sentences: 500 sentences, 50 planted.
    let collection = planted_collection(&lang, 25, 10, 2, &mut rng);
    assert_eq!(collection.planted.len(), 50);
    let opts = MiningOptions { threshold: 0.5, ..MiningOptions::default() };
    let mined = mine_collection(&collection.pairs, &model, &lang.lexicon, &opts).unwrap();
    assert_eq!(mined.report.failed().count(), 0);
    for p in &mined.report.pairs {
        assert_eq!((p.src_sentences, p.tgt_sentences), (10, 10), "segmentation of {}", p.pair_id);
    }
    let found: BTreeSet<(String, usize, usize)> =
        mined.pairs.iter().map(|p| (p.doc_pair.clone(), p.src_index, p.tgt_index)).collect();
    let hits = found.intersection(&collection.planted).count();
    let precision = if found.is_empty() { 0.0 } else { hits as f64 / found.len() as f64 };
    let recall = hits as f64 / collection.planted.len() as f64;
    let elapsed = start.elapsed();
    verdict(
        2,
        "planted-pairs",
        precision >= 0.9 && recall >= 0.7 && elapsed < Duration::from_secs(60),
        &format!(
            "{} mined, {hits} correct, precision {precision:.3}, recall {recall:.3}, {:.2}s",
            found.len(),
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. the request example, end to end

#[test]
fn criterion_3_request_example_end_to_end() {
    let _guard = serial();
    let seed = request_analogy_seed();
    let quads = detect_analogies(&seed);
    let clusters = cluster_analogies(&quads, 0);
    let models = extract_models(&clusters, &seed);
    let input = [SentenceRecord::new("Poproszę bilet.")];

    let lexicon = TranslationLexicon::from_entries("pl", "en", [("bilet", "ticket", 1.0)]).unwrap();
    let with_entry = generate_pairs(&models, &input, &lexicon);
    let emitted: Vec<(String, String)> = with_entry.generated.iter().map(|g| (g.src_text(), g.tgt_text())).collect();
    let expected = vec![("Poproszę bilet.".to_string(), "A ticket, please.".to_string())];

    let empty = generate_pairs(&models, &input, &TranslationLexicon::new("pl", "en"));
    let review: Vec<String> = empty.review.iter().map(|(_, t, _)| t.join(" ")).collect();
    let review_ok = empty.generated.is_empty() && review.iter().any(|t| t == "A unknown , please .");

    verdict(
        3,
        "request-example",
        emitted == expected && with_entry.review.is_empty() && review_ok,
        &format!("{} models, emitted {emitted:?}, review {review:?}", models.len()),
    );
}

// ---------------------------------------------------------------------------
// 4. analogy detection against the unpruned quadruple scan

fn oracle_levenshtein(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn oracle_counts(text: &str) -> BTreeMap<char, i64> {
    let mut counts = BTreeMap::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
}

fn oracle_profile(a: &BTreeMap<char, i64>, b: &BTreeMap<char, i64>, c: &BTreeMap<char, i64>, d: &BTreeMap<char, i64>) -> bool {
    let alphabet: BTreeSet<char> = a.keys().chain(b.keys()).chain(c.keys()).chain(d.keys()).copied().collect();
    let get = |m: &BTreeMap<char, i64>, ch: char| m.get(&ch).copied().unwrap_or(0);
    alphabet.into_iter().all(|ch| get(a, ch) - get(b, ch) == get(c, ch) - get(d, ch))
}

fn brute_force_analogies(corpus: &[(SentenceRecord, SentenceRecord)]) -> BTreeSet<[usize; 4]> {
    let n = corpus.len();
    let dist = |side: &dyn Fn(usize) -> Vec<String>| -> Vec<usize> {
        let sentences: Vec<Vec<String>> = (0..n).map(side).collect();
        (0..n * n).map(|k| oracle_levenshtein(&sentences[k / n], &sentences[k % n])).collect()
    };
    let ds = dist(&|i| corpus[i].0.tokens().to_vec());
    let dt = dist(&|i| corpus[i].1.tokens().to_vec());
    // dense count vectors over every character of the corpus
    let dense = |texts: Vec<&str>| -> Vec<Vec<i64>> {
        let maps: Vec<BTreeMap<char, i64>> = texts.iter().map(|t| oracle_counts(t)).collect();
        let alphabet: BTreeSet<char> = maps.iter().flat_map(|m| m.keys().copied()).collect();
        maps.iter().map(|m| alphabet.iter().map(|c| m.get(c).copied().unwrap_or(0)).collect()).collect()
    };
    let cs = dense(corpus.iter().map(|(s, _)| s.raw()).collect());
    let ct = dense(corpus.iter().map(|(_, t)| t.raw()).collect());
    let profile = |m: &[Vec<i64>], a: usize, b: usize, c: usize, d: usize| {
        (0..m[a].len()).all(|k| m[a][k] - m[b][k] == m[c][k] - m[d][k])
    };
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if ds[a * n + b] != ds[c * n + d]
                        || ds[a * n + c] != ds[b * n + d]
                        || dt[a * n + b] != dt[c * n + d]
                        || dt[a * n + c] != dt[b * n + d]
                    {
                        continue;
                    }
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if distinct && profile(&cs, a, b, c, d) && profile(&ct, a, b, c, d) {
                        out.insert([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn grammar_corpus(size: usize, rng: &mut ChaCha8Rng) -> Vec<(SentenceRecord, SentenceRecord)> {
    let subjects = [("I", "Ja"), ("You", "Ty"), ("We", "My"), ("They", "Oni")];
    let verbs = [("like", "lubię"), ("see", "widzę"), ("want", "chcę")];
    let objects = [("cats", "koty"), ("dogs", "psy"), ("tea", "herbatę"), ("books", "książki")];
    let adverbs = [("today", "dziś"), ("often", "często")];
    let noise = ["zebra", "quartz", "lamp", "river", "odd", "x"];
    (0..size)
        .map(|_| {
            if rng.gen_bool(0.15) {
                let len = rng.gen_range(1..=6);
                let s: Vec<&str> = (0..len).map(|_| *noise.choose(rng).unwrap()).collect();
                let t: Vec<&str> = (0..len).map(|_| *noise.choose(rng).unwrap()).collect();
                return (SentenceRecord::new(s.join(" ")), SentenceRecord::new(t.join(" ")));
            }
            let (ss, ts) = subjects.choose(rng).unwrap();
            let (sv, tv) = verbs.choose(rng).unwrap();
            let (so, to) = objects.choose(rng).unwrap();
            let (mut src, mut tgt) = (format!("{ss} {sv} {so}"), format!("{ts} {tv} {to}"));
            if rng.gen_bool(0.3) {
                let (sa, ta) = adverbs.choose(rng).unwrap();
                src.push_str(&format!(" {sa}"));
                tgt = format!("{ta} {tgt}");
            }
            (SentenceRecord::new(format!("{src} .")), SentenceRecord::new(format!("{tgt} .")))
        })
        .collect()
}

#[test]
fn criterion_4_analogy_detection_matches_brute_force() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sizes = vec![200, 150, 120, 100];
    sizes.extend((0..46).map(|_| rng.gen_range(4..=80)));
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (k, &size) in sizes.iter().enumerate() {
        let corpus = grammar_corpus(size, &mut rng);
        let fast: BTreeSet<[usize; 4]> = detect_analogies(&corpus).into_iter().map(|q| q.indices()).collect();
        let slow = brute_force_analogies(&corpus);
        total += slow.len();
        if fast != slow {
            mismatches.push(format!("corpus {k} (n={size}): {} vs {}", fast.len(), slow.len()));
        }
    }
    verdict(
        4,
        "analogy-brute-force",
        mismatches.is_empty(),
        &format!("50 corpora, {total} quadruples in total, mismatches {mismatches:?}"),
    );
}

// ---------------------------------------------------------------------------
// 5. word distance axioms and the character relation

fn random_words(rng: &mut ChaCha8Rng) -> Vec<String> {
    let vocab = ["a", "b", "c", "d", "e"];
    let len = rng.gen_range(0..=8);
    (0..len).map(|_| vocab.choose(rng).unwrap().to_string()).collect()
}

fn random_text(rng: &mut ChaCha8Rng, max: usize) -> String {
    let alphabet: Vec<char> = "abcdeąę ".chars().collect();
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn shuffled(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    chars.shuffle(rng);
    chars.into_iter().collect()
}

#[test]
fn criterion_5_levenshtein_axioms_and_char_profile() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut axiom_failures = 0;
    for _ in 0..10_000 {
        let (x, y, z) = (random_words(&mut rng), random_words(&mut rng), random_words(&mut rng));
        let mut table = SymbolTable::new();
        let (cx, cy, cz) = (table.encode(&x), table.encode(&y), table.encode(&z));
        let dxy = word_levenshtein(&cx, &cy);
        let ok = word_levenshtein(&cx, &cx) == 0
            && (dxy == 0) == (x == y)
            && dxy == word_levenshtein(&cy, &cx)
            && word_levenshtein(&cx, &cz) <= dxy + word_levenshtein(&cy, &cz)
            && dxy == oracle_levenshtein(&x, &y);
        if !ok {
            axiom_failures += 1;
        }
    }

    let mut profile_failures = 0;
    let mut positives = 0;
    for i in 0..10_000 {
        let texts: [String; 4] = if i % 2 == 0 {
            let (p, q, r) = (random_text(&mut rng, 6), random_text(&mut rng, 4), random_text(&mut rng, 6));
            [shuffled(&format!("{p}{q}"), &mut rng), p, shuffled(&format!("{r}{q}"), &mut rng), r]
        } else {
            std::array::from_fn(|_| random_text(&mut rng, 3))
        };
        let records: Vec<SentenceRecord> = texts.iter().map(|t| SentenceRecord::new(t.clone())).collect();
        let counts: Vec<_> = texts.iter().map(|t| oracle_counts(t)).collect();
        let expected = oracle_profile(&counts[0], &counts[1], &counts[2], &counts[3]);
        positives += usize::from(expected);
        if char_profile_holds(&records[0], &records[1], &records[2], &records[3]) != expected {
            profile_failures += 1;
        }
    }
    verdict(
        5,
        "levenshtein-and-char-profile",
        axiom_failures == 0 && profile_failures == 0,
        &format!("axiom failures {axiom_failures}/10000, profile disagreements {profile_failures}/10000 ({positives} holding)"),
    );
}

// ---------------------------------------------------------------------------
// 6. domain separation by cross-entropy difference

struct Domain {
    words: Vec<String>,
}

impl Domain {
    fn sentence(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let len = rng.gen_range(4..=10);
        (0..len).map(|_| self.words.choose(rng).unwrap().clone()).collect()
    }
}

/// Two domains of 100 words sharing 30 of them.
fn domain_pair(prefix: &str) -> (Domain, Domain) {
    let shared: Vec<String> = (0..30).map(|i| common::word(&format!("{prefix}s"), i)).collect();
    let own = |tag: &str| (0..70).map(|i| common::word(&format!("{prefix}{tag}"), i)).collect::<Vec<_>>();
    let mut a = shared.clone();
    a.extend(own("a"));
    let mut b = shared;
    b.extend(own("b"));
    (Domain { words: a }, Domain { words: b })
}

fn roc_auc(in_scores: &[f64], out_scores: &[f64]) -> f64 {
    // lower score means more in-domain
    let mut wins = 0.0;
    for &i in in_scores {
        for &o in out_scores {
            wins += if i < o { 1.0 } else if i == o { 0.5 } else { 0.0 };
        }
    }
    wins / (in_scores.len() * out_scores.len()) as f64
}

#[test]
fn criterion_6_moore_lewis_separation() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (src_in, src_out) = domain_pair("p");
    let (tgt_in, tgt_out) = domain_pair("e");
    let gen = |d: &Domain, n: usize, rng: &mut ChaCha8Rng| (0..n).map(|_| d.sentence(rng)).collect::<Vec<_>>();
    let train = |corpus: &[Vec<String>], vocab: &BTreeSet<String>| -> NGramLM<f64> {
        train_ngram_lm(corpus, &LmOptions { vocabulary: Some(vocab.clone()), ..LmOptions::default() }).unwrap()
    };
    let src_vocab: BTreeSet<String> = src_in.words.iter().chain(&src_out.words).cloned().collect();
    let tgt_vocab: BTreeSet<String> = tgt_in.words.iter().chain(&tgt_out.words).cloned().collect();
    let src_models = DomainModels {
        in_domain: train(&gen(&src_in, 500, &mut rng), &src_vocab),
        out_domain: train(&gen(&src_out, 500, &mut rng), &src_vocab),
    };
    let tgt_models = DomainModels {
        in_domain: train(&gen(&tgt_in, 500, &mut rng), &tgt_vocab),
        out_domain: train(&gen(&tgt_out, 500, &mut rng), &tgt_vocab),
    };

    let score_pool = |src: &Domain, tgt: &Domain, rng: &mut ChaCha8Rng| -> (Vec<f64>, Vec<f64>) {
        (0..200)
            .map(|_| {
                let (s, t) = (src.sentence(rng), tgt.sentence(rng));
                (
                    moore_lewis_score(&src_models.in_domain, &src_models.out_domain, &s),
                    bilingual_moore_lewis_score(&src_models, &tgt_models, &s, &t),
                )
            })
            .unzip()
    };
    let (mono_in, bi_in) = score_pool(&src_in, &tgt_in, &mut rng);
    let (mono_out, bi_out) = score_pool(&src_out, &tgt_out, &mut rng);
    let auc_mono = roc_auc(&mono_in, &mono_out);
    let auc_bi = roc_auc(&bi_in, &bi_out);

    let dev = gen(&src_in, 200, &mut rng);
    let mixture = interpolate_lms(
        vec![src_models.out_domain.clone(), src_models.in_domain.clone()],
        &dev,
        &EmOptions::default(),
    )
    .unwrap();
    let in_weight = mixture.weights[1];

    verdict(
        6,
        "moore-lewis",
        auc_mono >= 0.9 && auc_bi >= 0.9 && in_weight >= 0.9,
        &format!("AUC source-side {auc_mono:.4}, bilingual {auc_bi:.4}, in-domain weight {in_weight:.4}"),
    );
}

// ---------------------------------------------------------------------------
// 7. metric sanity

/// Unit-cost word edit distance by plain recursion, no table.
fn brute_edit(h: &[String], r: &[String]) -> usize {
    match (h.split_first(), r.split_first()) {
        (None, _) => r.len(),
        (_, None) => h.len(),
        (Some((x, hs)), Some((y, rs))) => {
            let sub = brute_edit(hs, rs) + usize::from(x != y);
            sub.min(brute_edit(hs, r) + 1).min(brute_edit(h, rs) + 1)
        }
    }
}

fn noisy_copy(reference: &[String], vocab: &[&str], rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut out = Vec::new();
    for w in reference {
        if rng.gen_bool(0.1) {
            continue;
        }
        out.push(if rng.gen_bool(0.2) { vocab.choose(rng).unwrap().to_string() } else { w.clone() });
    }
    out
}

#[test]
fn criterion_7_metric_sanity() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let vocab = ["the", "a", "cat", "dog", "sat", "on", "mat", "red", "big", "runs"];
    let sentence = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| -> Vec<String> {
        let len = rng.gen_range(lo..=hi);
        (0..len).map(|_| vocab.choose(rng).unwrap().to_string()).collect()
    };

    let mut identity_ok = true;
    for _ in 0..50 {
        let refs: Vec<Vec<String>> = (0..20).map(|_| sentence(&mut rng, 4, 15)).collect();
        let score = bleu(&refs, &refs, BleuOptions::default()).unwrap();
        identity_ok &= (score - 1.0).abs() < 1e-12;
    }

    let (hyp, reference) = (toks("the the the"), toks("the cat"));
    let stats = BleuStats::sentence(&hyp, &reference, 4);
    let clipped = bleu(&[hyp.clone()], &[reference.clone()], BleuOptions::default()).unwrap();
    let clipped_ok = stats.matches[0] == 1 && stats.totals[0] == 3 && stats.matches[1] == 0 && clipped == 0.0;

    let mut ter_failures = 0;
    for _ in 0..2000 {
        let (h, r) = (sentence(&mut rng, 0, 8), sentence(&mut rng, 1, 8));
        let expected = brute_edit(&h, &r) as f64 / r.len() as f64;
        if (ter(&h, &r).unwrap() - expected).abs() > 1e-12 {
            ter_failures += 1;
        }
    }

    let mut ci_failures = Vec::new();
    for k in 0..100 {
        let n = rng.gen_range(10..=40);
        let refs: Vec<Vec<String>> = (0..n).map(|_| sentence(&mut rng, 4, 15)).collect();
        let hyps: Vec<Vec<String>> = refs.iter().map(|r| noisy_copy(r, &vocab, &mut rng)).collect();
        for metric in [Metric::Bleu(BleuOptions::default()), Metric::Ter] {
            let ci = bootstrap_ci(metric, &hyps, &refs, 200, k).unwrap();
            if !(ci.low <= ci.point && ci.point <= ci.high) {
                ci_failures.push(format!("corpus {k} {}: {} not in [{}, {}]", metric.name(), ci.point, ci.low, ci.high));
            }
        }
    }

    verdict(
        7,
        "metric-sanity",
        identity_ok && clipped_ok && ter_failures == 0 && ci_failures.is_empty(),
        &format!(
            "identity {identity_ok}, clipped example p1 {}/{} BLEU {clipped}, TER disagreements {ter_failures}/2000, CI misses {ci_failures:?}",
            stats.matches[0], stats.totals[0]
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. worker scaling with identical output

fn mined_bytes(corpus: &bitext_core::aligner::MinedCorpus<f64>) -> Vec<u8> {
    let (mut src, mut tgt, mut scores, mut report) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    write_bitext(&corpus.pairs, &mut src, &mut tgt).unwrap();
    write_scores(&corpus.pairs, &mut scores).unwrap();
    write_report(&corpus.report, &mut report).unwrap();
    [src, tgt, scores, report].concat()
}

#[test]
fn criterion_8_worker_scaling() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let lang = ToyLanguage::new(400, &mut rng);
    let model = train_toy_classifier(&lang, 200, &mut rng);
    let collection = planted_collection(&lang, 200, 30, 6, &mut rng);
    let run = |workers: usize| {
        let opts = MiningOptions { workers, ..MiningOptions::default() };
        let start = Instant::now();
        let mined = mine_collection(&collection.pairs, &model, &lang.lexicon, &opts).unwrap();
        (start.elapsed(), mined_bytes(&mined))
    };
    let (t1, out1) = run(1);
    let (t4, out4) = run(4);
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    verdict(
        8,
        "worker-scaling",
        out1 == out4 && speedup >= 2.0,
        &format!(
            "1 worker {:.2}s, 4 workers {:.2}s, speedup {speedup:.2}, identical output {}, {cores} CPU(s) available",
            t1.as_secs_f64(),
            t4.as_secs_f64(),
            out1 == out4
        ),
    );
}
