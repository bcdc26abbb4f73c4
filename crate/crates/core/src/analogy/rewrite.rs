use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::detect::AnalogyCluster;
use crate::error::{Error, Result};
use crate::ingest::{detokenize, SentenceRecord};
use crate::lexicon::TranslationLexicon;

/// Target placeholder for a middle word missing from the lexicon.
pub const UNKNOWN_TOKEN: &str = "unknown";

/// Bilingual template: fixed prefix and suffix on each side around a
/// variable middle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewritingModel {
    pub src_prefix: Vec<String>,
    pub src_suffix: Vec<String>,
    pub tgt_prefix: Vec<String>,
    pub tgt_suffix: Vec<String>,
    pub cluster_id: String,
}

fn common_prefix(a: &[String], b: &[String]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn common_suffix(a: &[String], b: &[String]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

/// `(prefix, suffix, middle_a, middle_b)` of two token sequences.
fn split_fixed<'a>(a: &'a [String], b: &'a [String]) -> (&'a [String], &'a [String], &'a [String], &'a [String]) {
    let p = common_prefix(a, b);
    let (ra, rb) = (&a[p..], &b[p..]);
    let s = common_suffix(ra, rb);
    (&a[..p], &ra[ra.len() - s..], &ra[..ra.len() - s], &rb[..rb.len() - s])
}

impl RewritingModel {
    /// Model from the two members of a cluster, or `None` when the source
    /// side has no fixed part or a side has no variable part.
    pub fn from_members(first: (&[String], &[String]), second: (&[String], &[String]), cluster_id: impl Into<String>) -> Option<Self> {
        let (sp, ss, sm1, sm2) = split_fixed(first.0, second.0);
        let (tp, ts, tm1, tm2) = split_fixed(first.1, second.1);
        if sp.is_empty() && ss.is_empty() {
            return None;
        }
        if (sm1.is_empty() && sm2.is_empty()) || (tm1.is_empty() && tm2.is_empty()) {
            return None;
        }
        Some(RewritingModel {
            src_prefix: sp.to_vec(),
            src_suffix: ss.to_vec(),
            tgt_prefix: tp.to_vec(),
            tgt_suffix: ts.to_vec(),
            cluster_id: cluster_id.into(),
        })
    }

    fn middle<'a>(tokens: &'a [String], prefix: &[String], suffix: &[String]) -> Option<&'a [String]> {
        let fixed = prefix.len() + suffix.len();
        if tokens.len() <= fixed || !tokens.starts_with(prefix) || !tokens.ends_with(suffix) {
            return None;
        }
        Some(&tokens[prefix.len()..tokens.len() - suffix.len()])
    }

    /// Variable part of a source sentence the model applies to.
    pub fn src_middle<'a>(&self, tokens: &'a [String]) -> Option<&'a [String]> {
        Self::middle(tokens, &self.src_prefix, &self.src_suffix)
    }

    pub fn tgt_middle<'a>(&self, tokens: &'a [String]) -> Option<&'a [String]> {
        Self::middle(tokens, &self.tgt_prefix, &self.tgt_suffix)
    }

    fn fill(&self, middle: impl IntoIterator<Item = String>) -> Vec<String> {
        self.tgt_prefix.iter().cloned().chain(middle).chain(self.tgt_suffix.iter().cloned()).collect()
    }
}

/// Model for a cluster of the given seed corpus.
pub fn extract_rewriting_model(cluster: &AnalogyCluster, corpus: &[(SentenceRecord, SentenceRecord)]) -> Option<RewritingModel> {
    let (i, j) = cluster.members;
    let (a, b) = (corpus.get(i)?, corpus.get(j)?);
    RewritingModel::from_members((a.0.tokens(), a.1.tokens()), (b.0.tokens(), b.1.tokens()), cluster.id())
}

/// Models of all clusters, keeping the first of any identical templates.
pub fn extract_models(clusters: &[AnalogyCluster], corpus: &[(SentenceRecord, SentenceRecord)]) -> Vec<RewritingModel> {
    let mut seen = HashSet::new();
    clusters
        .iter()
        .filter_map(|c| extract_rewriting_model(c, corpus))
        .filter(|m| seen.insert((m.src_prefix.clone(), m.src_suffix.clone(), m.tgt_prefix.clone(), m.tgt_suffix.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPair {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
    pub model_id: String,
    /// `(source word, target word, probability)` for each middle word.
    pub substitutions: Vec<(String, String, f64)>,
}

impl GeneratedPair {
    pub fn src_text(&self) -> String {
        detokenize(&self.src)
    }

    pub fn tgt_text(&self) -> String {
        detokenize(&self.tgt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Application {
    Generated(GeneratedPair),
    /// Some middle word had no translation; the target carries
    /// [`UNKNOWN_TOKEN`] in its place and is not emitted as parallel data.
    Review { src: Vec<String>, tgt: Vec<String>, model_id: String },
    NoMatch,
}

/// Translates the middle of a matching sentence word by word with the best
/// lexicon entry.
pub fn apply_rewriting_model<S: AsRef<str>>(model: &RewritingModel, src: &[S], lexicon: &TranslationLexicon) -> Application {
    let tokens: Vec<String> = src.iter().map(|t| t.as_ref().to_string()).collect();
    let Some(middle) = model.src_middle(&tokens) else {
        return Application::NoMatch;
    };
    let subs: Vec<Option<(String, String, f64)>> = middle
        .iter()
        .map(|w| lexicon.best_translation(w).map(|(t, p)| (w.clone(), t.to_string(), p)))
        .collect();
    if subs.iter().any(Option::is_none) {
        let tgt = model.fill(subs.iter().map(|s| s.as_ref().map_or(UNKNOWN_TOKEN.to_string(), |s| s.1.clone())));
        return Application::Review {
            src: tokens,
            tgt,
            model_id: model.cluster_id.clone(),
        };
    }
    let substitutions: Vec<(String, String, f64)> = subs.into_iter().flatten().collect();
    Application::Generated(GeneratedPair {
        tgt: model.fill(substitutions.iter().map(|s| s.1.clone())),
        src: tokens,
        model_id: model.cluster_id.clone(),
        substitutions,
    })
}

/// Accepts a sentence pair when both sides fit the model and every source
/// middle word has a lexicon translation among the target middle words.
pub fn validate_pair_with_model<S: AsRef<str>, T: AsRef<str>>(
    model: &RewritingModel,
    src: &[S],
    tgt: &[T],
    lexicon: &TranslationLexicon,
) -> Option<GeneratedPair> {
    let src: Vec<String> = src.iter().map(|t| t.as_ref().to_string()).collect();
    let tgt: Vec<String> = tgt.iter().map(|t| t.as_ref().to_string()).collect();
    let src_mid = model.src_middle(&src)?;
    let tgt_mid = model.tgt_middle(&tgt)?;
    let tgt_words: HashSet<String> = tgt_mid.iter().map(|w| w.to_lowercase()).collect();
    let substitutions = src_mid
        .iter()
        .map(|w| {
            lexicon
                .lookup(w)
                .iter()
                .find(|(t, _)| tgt_words.contains(&t.to_lowercase()))
                .map(|(t, p)| (w.clone(), t.clone(), *p))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(GeneratedPair {
        src,
        tgt,
        model_id: model.cluster_id.clone(),
        substitutions,
    })
}

/// Outcome of running every model over a monolingual source text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generation {
    pub generated: Vec<GeneratedPair>,
    /// `(source, target with placeholders, model id)`
    pub review: Vec<(Vec<String>, Vec<String>, String)>,
}

/// Applies every model to every sentence, in sentence then model order.
pub fn generate_pairs(models: &[RewritingModel], sentences: &[SentenceRecord], lexicon: &TranslationLexicon) -> Generation {
    let per_sentence: Vec<Vec<Application>> = sentences
        .par_iter()
        .map(|s| {
            models
                .iter()
                .map(|m| apply_rewriting_model(m, s.tokens(), lexicon))
                .filter(|a| *a != Application::NoMatch)
                .collect()
        })
        .collect();
    let mut out = Generation::default();
    for app in per_sentence.into_iter().flatten() {
        match app {
            Application::Generated(g) => out.generated.push(g),
            Application::Review { src, tgt, model_id } => out.review.push((src, tgt, model_id)),
            Application::NoMatch => {}
        }
    }
    out
}

/// Pairs sentences of one comparable document pair that some model
/// validates. Source sentences are visited in order and each takes the
/// first free target sentence accepted by any model, so every sentence is
/// used at most once.
pub fn mine_quasi_parallel(
    models: &[RewritingModel],
    src: &[SentenceRecord],
    tgt: &[SentenceRecord],
    lexicon: &TranslationLexicon,
) -> Vec<(usize, usize, GeneratedPair)> {
    let src_fits: Vec<Vec<usize>> = src
        .par_iter()
        .map(|s| (0..models.len()).filter(|&m| models[m].src_middle(s.tokens()).is_some()).collect())
        .collect();
    let mut taken = vec![false; tgt.len()];
    let mut out = Vec::new();
    for (i, fits) in src_fits.iter().enumerate() {
        if fits.is_empty() {
            continue;
        }
        'targets: for (j, t) in tgt.iter().enumerate() {
            if taken[j] {
                continue;
            }
            for &m in fits {
                if let Some(pair) = validate_pair_with_model(&models[m], src[i].tokens(), t.tokens(), lexicon) {
                    taken[j] = true;
                    out.push((i, j, pair));
                    break 'targets;
                }
            }
        }
    }
    out
}

/// Writes models as `src_prefix, src_suffix, tgt_prefix, tgt_suffix,
/// cluster_id` with space-joined tokens.
pub fn write_models<W: Write>(models: &[RewritingModel], mut w: W) -> Result<()> {
    for m in models {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            m.src_prefix.join(" "),
            m.src_suffix.join(" "),
            m.tgt_prefix.join(" "),
            m.tgt_suffix.join(" "),
            m.cluster_id
        )?;
    }
    Ok(())
}

pub fn read_models<R: BufRead>(reader: R) -> Result<Vec<RewritingModel>> {
    let split = |s: &str| s.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect::<Vec<_>>();
    let mut models = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [sp, ss, tp, ts, id] = fields[..] else {
            return Err(Error::parse("model store", n + 1, format!("expected 5 fields, found {}", fields.len())));
        };
        let model = RewritingModel {
            src_prefix: split(sp),
            src_suffix: split(ss),
            tgt_prefix: split(tp),
            tgt_suffix: split(ts),
            cluster_id: id.to_string(),
        };
        if model.src_prefix.is_empty() && model.src_suffix.is_empty() {
            return Err(Error::parse("model store", n + 1, "source side has no fixed tokens"));
        }
        models.push(model);
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::tokenize;

    fn t(s: &str) -> Vec<String> {
        tokenize(s)
    }

    fn model() -> RewritingModel {
        let (s1, t1, s2, t2) = (t("Poproszę koc ."), t("A blanket , please ."), t("Poproszę bilet ."), t("A ticket , please ."));
        RewritingModel::from_members((&s1, &t1), (&s2, &t2), "c0-2").unwrap()
    }

    fn bilet() -> TranslationLexicon {
        TranslationLexicon::from_entries("pl", "en", [("bilet", "ticket", 0.8), ("bilet", "pass", 0.2)]).unwrap()
    }

    #[test]
    fn model_from_blanket_and_ticket() {
        let m = model();
        assert_eq!(m.src_prefix, ["Poproszę"]);
        assert_eq!(m.src_suffix, ["."]);
        assert_eq!(m.tgt_prefix, ["A"]);
        assert_eq!(m.tgt_suffix, [",", "please", "."]);
    }

    #[test]
    fn degenerate_clusters_give_no_model() {
        let (s, tt) = (t("Poproszę koc ."), t("A blanket , please ."));
        assert!(RewritingModel::from_members((&s, &tt), (&s, &tt), "x").is_none());
        let (s2, t2) = (t("Zupełnie inne"), t("Something else"));
        assert!(RewritingModel::from_members((&s, &tt), (&s2, &t2), "x").is_none());
    }

    #[test]
    fn apply_with_and_without_lexicon() {
        let m = model();
        match apply_rewriting_model(&m, &t("Poproszę bilet ."), &bilet()) {
            Application::Generated(g) => {
                assert_eq!(g.tgt_text(), "A ticket, please.");
                assert_eq!(g.src_text(), "Poproszę bilet.");
                assert_eq!(g.substitutions, vec![("bilet".into(), "ticket".into(), 0.8)]);
            }
            other => panic!("{other:?}"),
        }
        match apply_rewriting_model(&m, &t("Poproszę bilet ."), &TranslationLexicon::new("pl", "en")) {
            Application::Review { tgt, .. } => assert_eq!(tgt.join(" "), "A unknown , please ."),
            other => panic!("{other:?}"),
        }
        assert_eq!(apply_rewriting_model(&m, &t("Dzień dobry ."), &bilet()), Application::NoMatch);
        assert_eq!(apply_rewriting_model(&m, &t("Poproszę ."), &bilet()), Application::NoMatch);
    }

    #[test]
    fn validation_rules() {
        let m = model();
        assert!(validate_pair_with_model(&m, &t("Poproszę bilet ."), &t("A ticket , please ."), &bilet()).is_some());
        assert!(validate_pair_with_model(&m, &t("Poproszę bilet ."), &t("Cats are animals ."), &bilet()).is_none());
        assert!(validate_pair_with_model(&m, &t("Poproszę bilet ."), &t("A dog , please ."), &bilet()).is_none());
        let pass = validate_pair_with_model(&m, &t("Poproszę bilet ."), &t("A pass , please ."), &bilet()).unwrap();
        assert_eq!(pass.substitutions[0].1, "pass");
    }

    #[test]
    fn generated_pairs_validate() {
        let m = model();
        let lex = TranslationLexicon::from_entries("pl", "en", [("bilet", "ticket", 0.8), ("kawę", "coffee", 0.9), ("dużą", "large", 0.7)]).unwrap();
        for s in ["Poproszę bilet .", "Poproszę dużą kawę .", "Poproszę Bilet ."] {
            let Application::Generated(g) = apply_rewriting_model(&m, &t(s), &lex) else { panic!("{s}") };
            assert!(!g.tgt.iter().any(|w| w == UNKNOWN_TOKEN));
            assert_eq!(validate_pair_with_model(&m, &g.src, &g.tgt, &lex), Some(g));
        }
    }

    #[test]
    fn quasi_parallel_uses_each_sentence_once() {
        let recs = |xs: &[&str]| xs.iter().map(|s| SentenceRecord::new(*s)).collect::<Vec<_>>();
        let src = recs(&["Poproszę bilet.", "Poproszę bilet.", "Dzień dobry."]);
        let tgt = recs(&["Hello.", "A ticket, please."]);
        let got = mine_quasi_parallel(&[model()], &src, &tgt, &bilet());
        assert_eq!(got.len(), 1);
        assert_eq!((got[0].0, got[0].1), (0, 1));
    }

    #[test]
    fn generation_splits_review() {
        let recs: Vec<SentenceRecord> = ["Poproszę bilet.", "Poproszę herbatę.", "Nic."].iter().map(|s| SentenceRecord::new(*s)).collect();
        let out = generate_pairs(&[model()], &recs, &bilet());
        assert_eq!(out.generated.len(), 1);
        assert_eq!(out.review.len(), 1);
        assert_eq!(out.review[0].1.join(" "), "A unknown , please .");
    }

    #[test]
    fn store_round_trip() {
        let mut buf = Vec::new();
        write_models(&[model()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "Poproszę\t.\tA\t, please .\tc0-2\n");
        assert_eq!(read_models(buf.as_slice()).unwrap(), vec![model()]);
        assert!(read_models("a\tb\n".as_bytes()).is_err());
    }
}
