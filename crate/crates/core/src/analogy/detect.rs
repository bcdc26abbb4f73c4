use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use super::symbols::{word_levenshtein, SymbolCodedSentence, SymbolTable};
use crate::ingest::SentenceRecord;

/// Indices into a seed corpus of four bilingual pairs forming
/// `A : B :: C : D` on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnalogyQuadruple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl AnalogyQuadruple {
    pub fn new(a: usize, b: usize, c: usize, d: usize) -> Self {
        AnalogyQuadruple { a, b, c, d }
    }

    /// `C : D :: A : B`
    pub fn mirror(self) -> Self {
        AnalogyQuadruple::new(self.c, self.d, self.a, self.b)
    }

    pub fn indices(self) -> [usize; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Non-zero per-character count differences `x - y`, sorted by character.
fn count_difference(x: &SentenceRecord, y: &SentenceRecord) -> Vec<(char, i64)> {
    let mut diff: BTreeMap<char, i64> = BTreeMap::new();
    for (&c, &n) in x.char_counts() {
        *diff.entry(c).or_default() += i64::from(n);
    }
    for (&c, &n) in y.char_counts() {
        *diff.entry(c).or_default() -= i64::from(n);
    }
    diff.into_iter().filter(|(_, v)| *v != 0).collect()
}

/// For every character, `count(A) - count(B) = count(C) - count(D)`.
pub fn char_profile_holds(a: &SentenceRecord, b: &SentenceRecord, c: &SentenceRecord, d: &SentenceRecord) -> bool {
    count_difference(a, b) == count_difference(c, d)
}

struct Side {
    n: usize,
    dist: Vec<u32>,
}

impl Side {
    fn new<'a>(sentences: impl Iterator<Item = &'a SentenceRecord>) -> Self {
        let mut table = SymbolTable::new();
        let coded: Vec<SymbolCodedSentence> = sentences.map(|s| table.encode(s.tokens())).collect();
        let n = coded.len();
        let upper: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| word_levenshtein(&coded[i], &coded[j]) as u32).collect())
            .collect();
        let mut dist = vec![0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                let j = i + 1 + k;
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Side { n, dist }
    }

    fn d(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }
}

type PairKey = (u32, Vec<(char, i64)>, u32, Vec<(char, i64)>);

/// Every ordered quadruple of distinct corpus indices that is an analogy on
/// both sides, sorted.
///
/// Ordered pairs `(A, B)` are grouped by their word distance and character
/// count difference on both sides. Two pairs in one group already satisfy
/// `dist(A,B) = dist(C,D)` and the character condition, so only
/// `dist(A,C) = dist(B,D)` remains to be checked.
pub fn detect_analogies(corpus: &[(SentenceRecord, SentenceRecord)]) -> Vec<AnalogyQuadruple> {
    let n = corpus.len();
    if n < 4 {
        return Vec::new();
    }
    let src = Side::new(corpus.iter().map(|(s, _)| s));
    let tgt = Side::new(corpus.iter().map(|(_, t)| t));

    let keyed: Vec<(PairKey, (usize, usize))> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let (src, tgt) = (&src, &tgt);
            (0..n).filter(move |&b| b != a).map(move |b| {
                let key = (
                    src.d(a, b),
                    count_difference(&corpus[a].0, &corpus[b].0),
                    tgt.d(a, b),
                    count_difference(&corpus[a].1, &corpus[b].1),
                );
                (key, (a, b))
            })
        })
        .collect();
    let mut groups: HashMap<PairKey, Vec<(usize, usize)>> = HashMap::new();
    for (key, pair) in keyed {
        groups.entry(key).or_default().push(pair);
    }
    let groups: Vec<Vec<(usize, usize)>> = groups.into_values().filter(|g| g.len() > 1).collect();

    let mut out: Vec<AnalogyQuadruple> = groups
        .par_iter()
        .flat_map_iter(|group| {
            let (src, tgt) = (&src, &tgt);
            group.iter().flat_map(move |&(a, b)| {
                group.iter().filter_map(move |&(c, d)| {
                    let distinct = c != a && c != b && d != a && d != b;
                    (distinct && src.d(a, c) == src.d(b, d) && tgt.d(a, c) == tgt.d(b, d))
                        .then(|| AnalogyQuadruple::new(a, b, c, d))
                })
            })
        })
        .collect();
    out.sort_unstable();
    out
}

/// Two bilingual pairs `(A, A')` and `(C, C')` taken from one analogy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyCluster {
    /// Corpus indices, smaller first.
    pub members: (usize, usize),
    pub quadruple: AnalogyQuadruple,
    /// Chains of further pairs `(E, F), ...` closing the analogy back to
    /// `A : B`.
    pub extensions: Vec<Vec<(usize, usize)>>,
}

impl AnalogyCluster {
    pub fn id(&self) -> String {
        format!("c{}-{}", self.members.0, self.members.1)
    }
}

/// One cluster per distinct `{A, C}` member set. With `chain_depth > 0`,
/// searches for chains `C:D :: E:F`, ..., closing with `E:F :: A:B`, of up
/// to `chain_depth` new pairs disjoint from the quadruple.
pub fn cluster_analogies(quadruples: &[AnalogyQuadruple], chain_depth: usize) -> Vec<AnalogyCluster> {
    let mut sorted = quadruples.to_vec();
    sorted.sort_unstable();
    let mut seen = HashSet::new();
    let mut clusters = Vec::new();
    for q in &sorted {
        let members = (q.a.min(q.c), q.a.max(q.c));
        if seen.insert(members) {
            clusters.push(AnalogyCluster {
                members,
                quadruple: *q,
                extensions: Vec::new(),
            });
        }
    }
    if chain_depth > 0 {
        let mut next: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for q in &sorted {
            next.entry((q.a, q.b)).or_default().push((q.c, q.d));
        }
        let known: HashSet<AnalogyQuadruple> = sorted.iter().copied().collect();
        for cluster in &mut clusters {
            let q = cluster.quadruple;
            let mut used: Vec<usize> = q.indices().to_vec();
            let mut chain = Vec::new();
            extend_chain(&next, &known, (q.a, q.b), (q.c, q.d), chain_depth, &mut used, &mut chain, &mut cluster.extensions);
        }
    }
    clusters.sort_by_key(|c| c.members);
    clusters
}

#[allow(clippy::too_many_arguments)]
fn extend_chain(
    next: &HashMap<(usize, usize), Vec<(usize, usize)>>,
    known: &HashSet<AnalogyQuadruple>,
    origin: (usize, usize),
    current: (usize, usize),
    depth: usize,
    used: &mut Vec<usize>,
    chain: &mut Vec<(usize, usize)>,
    found: &mut Vec<Vec<(usize, usize)>>,
) {
    if depth == 0 {
        return;
    }
    let Some(candidates) = next.get(&current) else { return };
    for &(e, f) in candidates {
        if used.contains(&e) || used.contains(&f) {
            continue;
        }
        chain.push((e, f));
        used.extend([e, f]);
        if known.contains(&AnalogyQuadruple::new(e, f, origin.0, origin.1)) {
            found.push(chain.clone());
        }
        extend_chain(next, known, origin, (e, f), depth - 1, used, chain, found);
        used.truncate(used.len() - 2);
        chain.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(s: &str) -> SentenceRecord {
        SentenceRecord::new(s)
    }

    fn corpus(pairs: &[(&str, &str)]) -> Vec<(SentenceRecord, SentenceRecord)> {
        pairs.iter().map(|(s, t)| (rec(s), rec(t))).collect()
    }

    fn toy() -> Vec<(SentenceRecord, SentenceRecord)> {
        corpus(&[
            ("I like cats", "Lubię koty"),
            ("I like dogs", "Lubię psy"),
            ("You like cats", "Ty lubisz koty"),
            ("You like dogs", "Ty lubisz psy"),
        ])
    }

    #[test]
    fn profile_examples() {
        assert!(char_profile_holds(&rec("ab"), &rec("ab"), &rec("x"), &rec("x")));
        assert!(char_profile_holds(&rec("ab"), &rec("b"), &rec("cab"), &rec("cb")));
        assert!(!char_profile_holds(&rec("ab"), &rec("b"), &rec("cab"), &rec("cab")));
    }

    #[test]
    fn toy_corpus_analogy_found_on_both_sides() {
        let quads = detect_analogies(&toy());
        assert!(quads.contains(&AnalogyQuadruple::new(0, 1, 2, 3)));
        // Every symmetric rearrangement is also an analogy.
        assert_eq!(quads.len(), 8);
        for q in &quads {
            assert!(quads.contains(&q.mirror()));
        }
    }

    #[test]
    fn target_side_must_agree() {
        let mut c = toy();
        c[3].1 = rec("Zupełnie coś innego tutaj");
        assert!(detect_analogies(&c).is_empty());
    }

    #[test]
    fn unrelated_sentences_and_small_corpora() {
        let c = corpus(&[("a", "a"), ("b c", "b c"), ("d e f", "d e f"), ("g h i j", "g h i j")]);
        assert!(detect_analogies(&c).is_empty());
        assert!(detect_analogies(&toy()[..3]).is_empty());
    }

    #[test]
    fn clusters_dedup_mirrors() {
        let q = AnalogyQuadruple::new(0, 1, 2, 3);
        let clusters = cluster_analogies(&[q, q.mirror()], 0);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members, (0, 2));
        assert_eq!(clusters[0].id(), "c0-2");
        assert_eq!(cluster_analogies(&[q], 0).len(), 1);
    }

    #[test]
    fn toy_corpus_has_no_chain_extensions() {
        let clusters = cluster_analogies(&detect_analogies(&toy()), 1);
        assert!(!clusters.is_empty());
        assert!(clusters.iter().all(|c| c.extensions.is_empty()));
    }

    #[test]
    fn chain_found_when_third_pair_exists() {
        let c = corpus(&[
            ("I like cats", "Lubię koty"),
            ("I like dogs", "Lubię psy"),
            ("You like cats", "Ty lubisz koty"),
            ("You like dogs", "Ty lubisz psy"),
            ("We like cats", "My lubimy koty"),
            ("We like dogs", "My lubimy psy"),
        ]);
        let quads = detect_analogies(&c);
        let clusters = cluster_analogies(&quads, 1);
        let cluster = clusters.iter().find(|cl| cl.quadruple == AnalogyQuadruple::new(0, 1, 2, 3)).unwrap();
        assert_eq!(cluster.extensions, vec![vec![(4, 5)]]);
    }
}
