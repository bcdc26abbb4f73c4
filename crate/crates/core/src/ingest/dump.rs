//! Streaming reader for encyclopedia XML dumps.
//!
//! Only the `page/title`, `page/id`, `page/ns` and `page/revision/text`
//! subset is read. One page is held in memory at a time.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::markup::strip_markup;
use super::RawDocument;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Id,
    Namespace,
    Text,
}

#[derive(Debug, Default)]
struct PageBuilder {
    title: String,
    id: String,
    namespace: String,
    text: String,
    redirect: bool,
}

/// Iterator over the articles of a dump, in stream order.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    lang: String,
    /// Element names from the root to the current element.
    path: Vec<Vec<u8>>,
    page: Option<PageBuilder>,
    field: Option<Field>,
    seq: usize,
    done: bool,
    skipped: usize,
}

/// Parses a dump of articles written in `lang`.
pub fn parse_dump<R: BufRead>(reader: R, lang: &str) -> DumpReader<R> {
    DumpReader::new(reader, lang)
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(reader: R, lang: &str) -> Self {
        let mut reader = Reader::from_reader(reader);
        reader.config_mut().check_end_names = true;
        DumpReader {
            reader,
            buf: Vec::with_capacity(8 * 1024),
            lang: lang.to_string(),
            path: Vec::new(),
            page: None,
            field: None,
            seq: 0,
            done: false,
            skipped: 0,
        }
    }

    /// Pages skipped because they are redirects or outside the article
    /// namespace.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Capacity of the internal event buffer; stays bounded by the largest
    /// single element, not by the number of pages read.
    pub fn buffer_capacity(&self) -> usize {
        self.buf.capacity()
    }

    fn xml_error(&self, message: impl Into<String>) -> Error {
        Error::Xml {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    fn field_for_path(&self) -> Option<Field> {
        let names: Vec<&[u8]> = self.path.iter().map(|n| n.as_slice()).collect();
        let page_at = names.iter().rposition(|n| *n == b"page")?;
        match &names[page_at + 1..] {
            [b"title"] => Some(Field::Title),
            [b"id"] => Some(Field::Id),
            [b"ns"] => Some(Field::Namespace),
            [b"revision", b"text"] => Some(Field::Text),
            _ => None,
        }
    }

    fn push_text(&mut self, text: &str) {
        if let (Some(page), Some(field)) = (self.page.as_mut(), self.field) {
            match field {
                Field::Title => page.title.push_str(text),
                Field::Id => page.id.push_str(text),
                Field::Namespace => page.namespace.push_str(text),
                Field::Text => page.text.push_str(text),
            }
        }
    }

    fn finish_page(&mut self, page: PageBuilder) -> Option<RawDocument> {
        let ns = page.namespace.trim();
        if page.redirect || !(ns.is_empty() || ns == "0") {
            self.skipped += 1;
            return None;
        }
        self.seq += 1;
        let doc_id = match page.id.trim() {
            "" => format!("{}-{}", self.lang, self.seq),
            id => id.to_string(),
        };
        let stripped = strip_markup(&page.text);
        Some(RawDocument {
            doc_id,
            lang: self.lang.clone(),
            title: page.title.trim().to_string(),
            body: stripped.body,
            cross_links: stripped.interwiki,
        })
    }

    fn next_document(&mut self) -> Result<Option<RawDocument>> {
        loop {
            self.buf.clear();
            let event = self
                .reader
                .read_event_into(&mut self.buf)
                .map_err(|e| Error::Xml {
                    offset: self.reader.error_position(),
                    message: e.to_string(),
                })?;
            match event {
                Event::Start(start) => {
                    let name = start.local_name().as_ref().to_vec();
                    if name == b"page" {
                        self.page = Some(PageBuilder::default());
                    }
                    self.path.push(name);
                    self.field = self.field_for_path();
                }
                Event::Empty(empty) => {
                    if empty.local_name().as_ref() == b"redirect" {
                        if let Some(page) = self.page.as_mut() {
                            page.redirect = true;
                        }
                    }
                }
                Event::End(_) => {
                    let name = self.path.pop().unwrap_or_default();
                    self.field = self.field_for_path();
                    if name == b"page" {
                        if let Some(page) = self.page.take() {
                            if let Some(doc) = self.finish_page(page) {
                                return Ok(Some(doc));
                            }
                        }
                    }
                }
                Event::Text(text) => {
                    if self.field.is_some() {
                        let text = text
                            .unescape()
                            .map_err(|e| Error::Xml {
                                offset: self.reader.buffer_position(),
                                message: e.to_string(),
                            })?
                            .into_owned();
                        self.push_text(&text);
                    }
                }
                Event::CData(data) => {
                    if self.field.is_some() {
                        let text = data
                            .decode()
                            .map_err(|e| Error::Xml {
                                offset: self.reader.buffer_position(),
                                message: e.to_string(),
                            })?
                            .into_owned();
                        self.push_text(&text);
                    }
                }
                Event::Eof => {
                    if !self.path.is_empty() {
                        return Err(self.xml_error(format!(
                            "unexpected end of input inside <{}>",
                            String::from_utf8_lossy(self.path.last().unwrap())
                        )));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<RawDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_document() {
            Ok(Some(doc)) => Some(Ok(doc)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
