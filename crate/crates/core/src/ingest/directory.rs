//! Paired-directory collections: `<root>/<lang>/<doc_id>.txt` plus a
//! `pairs.tsv` manifest of `doc_id_src TAB doc_id_tgt` lines.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{ComparableDocPair, LinkSource, RawDocument};
use crate::error::{Error, Result};

pub const PAIRS_FILE: &str = "pairs.tsv";

#[derive(Debug, Default)]
pub struct DirectoryPairing {
    pub pairs: Vec<ComparableDocPair>,
    /// Manifest lines naming a document with no file on disk.
    pub unknown_entries: usize,
    pub blank_skipped: usize,
}

fn doc_path(root: &Path, lang: &str, doc_id: &str) -> PathBuf {
    root.join(lang).join(format!("{doc_id}.txt"))
}

fn check_doc_id(doc_id: &str) -> Result<()> {
    let ok = !doc_id.is_empty()
        && !doc_id.starts_with('.')
        && doc_id
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("doc_id {doc_id:?} is not usable as a file name")))
    }
}

/// Reads every `<root>/<lang>/*.txt` file in file-name order. The file stem
/// is both the `doc_id` and the title; the content is taken as plain text.
pub fn read_language_dir(root: &Path, lang: &str) -> Result<impl Iterator<Item = Result<RawDocument>>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(root.join(lang))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    let lang = lang.to_string();
    Ok(paths.into_iter().map(move |path| {
        let doc_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let body = fs::read_to_string(&path)?;
        Ok(RawDocument::new(doc_id.clone(), lang.clone(), doc_id, body))
    }))
}

fn load_doc(root: &Path, lang: &str, doc_id: &str) -> Result<Option<RawDocument>> {
    if check_doc_id(doc_id).is_err() {
        return Ok(None);
    }
    match fs::read_to_string(doc_path(root, lang, doc_id)) {
        Ok(body) => Ok(Some(RawDocument::new(doc_id, lang, doc_id, body))),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn parse_link_source(field: &str) -> Option<LinkSource> {
    match field {
        "interwiki" => Some(LinkSource::Interwiki),
        "archive-id" => Some(LinkSource::ArchiveId),
        "manual" => Some(LinkSource::Manual),
        _ => None,
    }
}

/// Loads the document pairs listed in `<root>/pairs.tsv`.
///
/// An optional third column carries the link source; without it pairs are
/// tagged `archive-id`. Entries whose files are missing are skipped and
/// counted.
pub fn read_paired_directory(root: &Path, src_lang: &str, tgt_lang: &str) -> Result<DirectoryPairing> {
    let manifest_path = root.join(PAIRS_FILE);
    let manifest = fs::read_to_string(&manifest_path)?;
    let context = manifest_path.display().to_string();
    let mut out = DirectoryPairing::default();
    for (lineno, line) in manifest.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(&context, lineno + 1, "expected doc_id_src TAB doc_id_tgt"));
        }
        let link_source = match fields.get(2) {
            None => LinkSource::ArchiveId,
            Some(f) => parse_link_source(f)
                .ok_or_else(|| Error::parse(&context, lineno + 1, format!("unknown link source {f:?}")))?,
        };
        let src = load_doc(root, src_lang, fields[0])?;
        let tgt = load_doc(root, tgt_lang, fields[1])?;
        let (Some(src), Some(tgt)) = (src, tgt) else {
            log::warn!("{context}:{}: unknown document in manifest entry, skipped", lineno + 1);
            out.unknown_entries += 1;
            continue;
        };
        match ComparableDocPair::new(src, tgt, link_source) {
            Ok(pair) => out.pairs.push(pair),
            Err(Error::EmptyDocument) => out.blank_skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Writes pairs in the paired-directory layout read by
/// [`read_paired_directory`].
pub fn write_paired_directory(root: &Path, pairs: &[ComparableDocPair]) -> Result<()> {
    let mut manifest = String::new();
    for pair in pairs {
        for doc in [&pair.src, &pair.tgt] {
            check_doc_id(&doc.doc_id)?;
            let path = doc_path(root, &doc.lang, &doc.doc_id);
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, &doc.body)?;
        }
        manifest.push_str(&format!("{}\t{}\t{}\n", pair.src.doc_id, pair.tgt.doc_id, pair.link_source));
    }
    fs::create_dir_all(root)?;
    fs::write(root.join(PAIRS_FILE), manifest)?;
    Ok(())
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Document-pair manifest: one line per pair with ids, titles and the link
/// source.
pub fn write_pair_manifest<W: Write>(mut w: W, pairs: &[ComparableDocPair]) -> io::Result<()> {
    writeln!(w, "pair_id\tsrc_lang\tsrc_doc_id\tsrc_title\ttgt_lang\ttgt_doc_id\ttgt_title\tlink_source")?;
    for p in pairs {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            tsv_field(&p.id()),
            p.src.lang,
            tsv_field(&p.src.doc_id),
            tsv_field(&p.src.title),
            p.tgt.lang,
            tsv_field(&p.tgt.doc_id),
            tsv_field(&p.tgt.title),
            p.link_source
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s: &str, t: &str) -> ComparableDocPair {
        ComparableDocPair::new(
            RawDocument::new(s, "pl", s, format!("Tekst {s}.")),
            RawDocument::new(t, "en", t, format!("Text {t}.")),
            LinkSource::Interwiki,
        )
        .unwrap()
    }

    #[test]
    fn write_then_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![pair("a1", "b1"), pair("a2", "b2")];
        write_paired_directory(dir.path(), &pairs).unwrap();
        let read = read_paired_directory(dir.path(), "pl", "en").unwrap();
        assert_eq!(read.pairs.len(), 2);
        assert_eq!(read.pairs[0].src.body, "Tekst a1.");
        assert_eq!(read.pairs[1].tgt.doc_id, "b2");
        assert_eq!(read.pairs[0].link_source, LinkSource::Interwiki);
        let docs: Vec<_> = read_language_dir(dir.path(), "en").unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].doc_id, "b1");
    }

    #[test]
    fn unknown_manifest_entries_skipped() {
        let dir = tempfile::tempdir().unwrap();
        write_paired_directory(dir.path(), &[pair("a1", "b1")]).unwrap();
        fs::write(dir.path().join(PAIRS_FILE), "a1\tb1\na9\tb1\n# comment\n\na1\tzz\n").unwrap();
        let read = read_paired_directory(dir.path(), "pl", "en").unwrap();
        assert_eq!(read.pairs.len(), 1);
        assert_eq!(read.unknown_entries, 2);
        assert_eq!(read.pairs[0].link_source, LinkSource::ArchiveId);
    }

    #[test]
    fn malformed_manifest_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(PAIRS_FILE), "a1\tb1\njustone\n").unwrap();
        let err = read_paired_directory(dir.path(), "pl", "en").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn unsafe_ids_rejected_on_write() {
        let dir = tempfile::tempdir().unwrap();
        let mut p = pair("a1", "b1");
        p.src.doc_id = "../etc".into();
        assert!(write_paired_directory(dir.path(), &[p]).is_err());
    }

    #[test]
    fn manifest_has_header_and_rows() {
        let mut buf = Vec::new();
        write_pair_manifest(&mut buf, &[pair("a1", "b1")]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "pl:a1|en:b1\tpl\ta1\ta1\ten\tb1\tb1\tinterwiki");
    }
}
