//! Flat `key = value` documents.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! area_side_m = 1000        # trailing comment
//! signal.carrier_hz = 28e9
//! ```
//!
//! Keys are dotted identifiers (`[A-Za-z0-9_.-]+`, no leading/trailing or
//! doubled dots). Values run to the end of the line or to a `#`, trimmed, and
//! must not be empty. A key may appear once.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    entries: Vec<Entry>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
        && !key.starts_with('.')
        && !key.ends_with('.')
        && !key.contains("..")
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::parse(line, format!("expected `key = value`, found `{content}`")));
            };
            let key = key.trim();
            let value = value.trim();
            if !valid_key(key) {
                return Err(Error::parse(line, format!("invalid key `{key}`")));
            }
            if value.is_empty() {
                return Err(Error::parse(line, format!("empty value for `{key}`")));
            }
            if let Some(prev) = doc.get(key) {
                return Err(Error::parse(
                    line,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
            }
            doc.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(doc)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let line = self.entries.len() + 1;
        self.entries.push(Entry {
            key: key.into(),
            value: value.into(),
            line,
        });
    }

    /// Renders the document; `parse(render(d))` yields the same entries.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.key);
            out.push_str(" = ");
            out.push_str(&e.value);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dotted_keys() {
        let doc = Document::parse("# header\n\narea_side_m = 1000 # m\nsignal.carrier_hz=28e9\n").unwrap();
        assert_eq!(doc.entries().len(), 2);
        assert_eq!(doc.get("area_side_m").unwrap().value, "1000");
        assert_eq!(doc.get("signal.carrier_hz").unwrap().line, 4);
    }

    #[test]
    fn reports_line_numbers() {
        let err = Document::parse("a = 1\n\nnot a pair\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Document::parse("a = 1\na = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Document::parse("a =   # nothing\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = Document::parse("sig..x = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn render_round_trips() {
        let text = "b = 2\na.c = x y; z\n";
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.render(), text);
        assert_eq!(Document::parse(&doc.render()).unwrap(), doc);
    }
}
