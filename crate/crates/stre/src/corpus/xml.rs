//! Streaming parser for a MediaWiki export XML subset.
//!
//! Recognized structure: `<page>` elements carrying `<title>`, an optional
//! `<id>`, and `<revision>` elements with `<timestamp>` and `<text>`.
//! Pages are yielded one at a time; memory is bounded by a single page.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{finalize_revisions, CorpusError, Revision, RevisionHistory};

pub struct XmlPages<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    /// Revisions dropped because they had no text element.
    skipped_revisions: usize,
    pages_yielded: usize,
    done: bool,
}

impl<R: BufRead> XmlPages<R> {
    pub fn new(source: R) -> Self {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().trim_text(true);
        XmlPages { reader, buf: Vec::new(), skipped_revisions: 0, pages_yielded: 0, done: false }
    }

    pub fn skipped_revisions(&self) -> usize {
        self.skipped_revisions
    }

    pub fn pages_yielded(&self) -> usize {
        self.pages_yielded
    }

    fn err(&self, message: impl ToString) -> CorpusError {
        CorpusError::Xml {
            offset: self.reader.buffer_position(),
            message: message.to_string(),
        }
    }

    fn read_text_until(&mut self, end: &[u8]) -> Result<String, CorpusError> {
        let mut out = String::new();
        let mut buf = Vec::new();
        loop {
            buf.clear();
            match self.reader.read_event_into(&mut buf) {
                Ok(Event::Text(t)) => {
                    let text = match t.unescape() {
                        Ok(text) => text.into_owned(),
                        Err(e) => return Err(self.err(e)),
                    };
                    out.push_str(&text);
                }
                Ok(Event::End(e)) if e.name().as_ref() == end => return Ok(out),
                Ok(Event::Eof) => return Err(self.err("unexpected end of file")),
                Ok(_) => {}
                Err(e) => return Err(self.err(e)),
            }
        }
    }

    fn next_page(&mut self) -> Result<Option<RevisionHistory>, CorpusError> {
        // Scan for the next <page>.
        loop {
            self.buf.clear();
            match self.reader.read_event_into(&mut self.buf) {
                Ok(Event::Start(e)) if e.name().as_ref() == b"page" => break,
                Ok(Event::Eof) => return Ok(None),
                Ok(_) => {}
                Err(e) => return Err(self.err(e)),
            }
        }
        let mut title = String::new();
        let mut page_id: Option<String> = None;
        let mut revisions: Vec<Revision> = Vec::new();
        loop {
            self.buf.clear();
            match self.reader.read_event_into(&mut self.buf) {
                Ok(Event::Start(e)) => match e.name().as_ref() {
                    b"title" => title = self.read_text_until(b"title")?,
                    b"id" => {
                        let id = self.read_text_until(b"id")?;
                        if page_id.is_none() {
                            page_id = Some(id);
                        }
                    }
                    b"revision" => {
                        if let Some(rev) = self.read_revision(revisions.len())? {
                            revisions.push(rev);
                        }
                    }
                    _ => {}
                },
                Ok(Event::End(e)) if e.name().as_ref() == b"page" => break,
                Ok(Event::Eof) => return Err(self.err("unexpected end of file inside <page>")),
                Ok(_) => {}
                Err(e) => return Err(self.err(e)),
            }
        }
        finalize_revisions(&mut revisions);
        let page_id = page_id.unwrap_or_else(|| title.clone());
        self.pages_yielded += 1;
        Ok(Some(RevisionHistory { page_id, title, category: None, revisions }))
    }

    fn read_revision(&mut self, index: usize) -> Result<Option<Revision>, CorpusError> {
        let mut timestamp: Option<i64> = None;
        let mut text: Option<String> = None;
        loop {
            self.buf.clear();
            match self.reader.read_event_into(&mut self.buf) {
                Ok(Event::Start(e)) => match e.name().as_ref() {
                    b"timestamp" => {
                        let raw = self.read_text_until(b"timestamp")?;
                        let ts = chrono::DateTime::parse_from_rfc3339(&raw)
                            .map(|t| t.timestamp())
                            .or_else(|_| raw.parse::<i64>())
                            .map_err(|_| self.err(format!("bad timestamp {raw:?}")))?;
                        timestamp = Some(ts);
                    }
                    b"text" => text = Some(self.read_text_until(b"text")?),
                    _ => {}
                },
                Ok(Event::Empty(e)) if e.name().as_ref() == b"text" => text = Some(String::new()),
                Ok(Event::End(e)) if e.name().as_ref() == b"revision" => break,
                Ok(Event::Eof) => return Err(self.err("unexpected end of file inside <revision>")),
                Ok(_) => {}
                Err(e) => return Err(self.err(e)),
            }
        }
        match (timestamp, text) {
            (Some(ts), Some(text)) => Ok(Some(Revision::new(index, ts, text))),
            _ => {
                self.skipped_revisions += 1;
                Ok(None)
            }
        }
    }
}

impl<R: BufRead> Iterator for XmlPages<R> {
    type Item = Result<RevisionHistory, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_page() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Convenience wrapper collecting the whole export.
pub fn parse_mediawiki_export<R: BufRead>(source: R) -> Result<Vec<RevisionHistory>, CorpusError> {
    XmlPages::new(source).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_PAGE: &str = r#"<mediawiki>
  <page>
    <title>Alpha</title>
    <id>42</id>
    <revision><id>1</id><timestamp>2017-01-01T00:00:00Z</timestamp><text>v0</text></revision>
    <revision><id>2</id><timestamp>2017-01-02T00:00:00Z</timestamp><text>v1</text></revision>
    <revision><id>3</id><timestamp>2017-01-03T00:00:00Z</timestamp><text>v2</text></revision>
  </page>
</mediawiki>"#;

    #[test]
    fn one_page_three_revisions() {
        let pages = parse_mediawiki_export(ONE_PAGE.as_bytes()).unwrap();
        assert_eq!(pages.len(), 1);
        let page = &pages[0];
        assert_eq!(page.page_id, "42");
        assert_eq!(page.title, "Alpha");
        assert_eq!(page.revisions.len(), 3);
        assert_eq!(page.revisions[0].text, "v0");
        assert!(page.revisions[0].timestamp < page.revisions[1].timestamp);
    }

    #[test]
    fn empty_export_yields_nothing() {
        let pages = parse_mediawiki_export("<mediawiki></mediawiki>".as_bytes()).unwrap();
        assert!(pages.is_empty());
    }

    #[test]
    fn out_of_order_revisions_are_resorted() {
        let xml = r#"<mediawiki><page><title>B</title>
          <revision><timestamp>2017-01-05T00:00:00Z</timestamp><text>later</text></revision>
          <revision><timestamp>2017-01-01T00:00:00Z</timestamp><text>earlier</text></revision>
        </page></mediawiki>"#;
        let pages = parse_mediawiki_export(xml.as_bytes()).unwrap();
        assert_eq!(pages[0].revisions[0].text, "earlier");
        assert_eq!(pages[0].revisions[0].index, 0);
        assert_eq!(pages[0].revisions[1].text, "later");
    }

    #[test]
    fn revision_without_text_is_skipped_and_counted() {
        let xml = r#"<mediawiki><page><title>C</title>
          <revision><timestamp>2017-01-01T00:00:00Z</timestamp></revision>
          <revision><timestamp>2017-01-02T00:00:00Z</timestamp><text>ok</text></revision>
        </page></mediawiki>"#;
        let mut pages = XmlPages::new(xml.as_bytes());
        let page = pages.next().unwrap().unwrap();
        assert_eq!(page.revisions.len(), 1);
        assert_eq!(pages.skipped_revisions(), 1);
    }

    #[test]
    fn malformed_xml_reports_offset() {
        let xml = "<mediawiki><page><title>X</unclosed>";
        let err = parse_mediawiki_export(xml.as_bytes()).unwrap_err();
        match err {
            CorpusError::Xml { offset, .. } => assert!(offset > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn streaming_touches_each_page_once() {
        let xml = r#"<mediawiki>
          <page><title>A</title><revision><timestamp>2017-01-01T00:00:00Z</timestamp><text>a</text></revision></page>
          <page><title>B</title><revision><timestamp>2017-01-01T00:00:00Z</timestamp><text>b</text></revision></page>
          <page><title>C</title><revision><timestamp>2017-01-01T00:00:00Z</timestamp><text>c</text></revision></page>
        </mediawiki>"#;
        let mut pages = XmlPages::new(xml.as_bytes());
        let mut seen = 0;
        for page in &mut pages {
            page.unwrap();
            seen += 1;
        }
        assert_eq!(seen, 3);
        assert_eq!(pages.pages_yielded(), 3);
    }
}
