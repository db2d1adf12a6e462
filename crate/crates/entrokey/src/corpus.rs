//! Review corpus loading, validation, sentence splitting, and persistence.
//!
//! The canonical on-disk format is JSONL, one record per line:
//! `{"id": "...", "text": "...", "label": "positive"|"negative"|null, "tokens": [...]|null}`.
//! TSV (`id<TAB>label<TAB>text`) is accepted on input only.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::{Error, Result};

/// Gold polarity of a document. Neutral is never a gold label; it only
/// arises from consensus prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
    Unlabeled,
}

impl Label {
    /// Parses an optional label string case-insensitively; anything other
    /// than "positive"/"negative" maps to `Unlabeled`.
    pub fn parse(raw: Option<&str>) -> Label {
        match raw {
            Some(s) if s.eq_ignore_ascii_case("positive") => Label::Positive,
            Some(s) if s.eq_ignore_ascii_case("negative") => Label::Negative,
            _ => Label::Unlabeled,
        }
    }

    fn as_wire(self) -> Option<String> {
        match self {
            Label::Positive => Some("positive".to_string()),
            Label::Negative => Some("negative".to_string()),
            Label::Unlabeled => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Unlabeled => "unlabeled",
        })
    }
}

/// One review sentence: id, raw text, optional gold label, and the token
/// list once segmented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub tokens: Option<Vec<String>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
            label,
            tokens: None,
        }
    }

    pub fn tokens(&self) -> Result<&[String]> {
        match &self.tokens {
            Some(t) => Ok(t),
            None => Err(Error::Untokenized {
                id: self.id.clone(),
            }),
        }
    }
}

/// Derived label tally; always satisfies positive + negative + unlabeled = total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LabelCounts {
    pub positive: usize,
    pub negative: usize,
    pub unlabeled: usize,
}

impl LabelCounts {
    pub fn total(&self) -> usize {
        self.positive + self.negative + self.unlabeled
    }
}

/// An ordered, id-unique collection of documents. Immutable once built, so
/// it is safe to share across threads read-only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Validates id uniqueness and document well-formedness.
    pub fn new(documents: Vec<Document>) -> Result<Corpus> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            validate_document(doc)?;
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId { id: doc.id.clone() });
            }
        }
        Ok(Corpus { documents })
    }

    pub fn empty() -> Corpus {
        Corpus::default()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn counts(&self) -> LabelCounts {
        let mut c = LabelCounts::default();
        for doc in &self.documents {
            match doc.label {
                Label::Positive => c.positive += 1,
                Label::Negative => c.negative += 1,
                Label::Unlabeled => c.unlabeled += 1,
            }
        }
        c
    }

    /// Splits every document into sentences; the result replaces each parent
    /// with its children in order.
    pub fn split_sentences(&self) -> Corpus {
        let documents = self
            .documents
            .iter()
            .flat_map(split_sentences)
            .collect::<Vec<_>>();
        // Child ids `parent#k` cannot collide when parent ids are unique:
        // the ordinal after the final '#' is always a bare integer.
        Corpus { documents }
    }

    /// Applies a token transform to every document, keeping ids and labels.
    pub fn map_tokens(
        &self,
        mut f: impl FnMut(&Document) -> Result<Vec<String>>,
    ) -> Result<Corpus> {
        let mut documents = Vec::with_capacity(self.documents.len());
        for doc in &self.documents {
            let tokens = f(doc)?;
            documents.push(Document {
                tokens: Some(tokens),
                ..doc.clone()
            });
        }
        Ok(Corpus { documents })
    }
}

fn validate_document(doc: &Document) -> Result<()> {
    if doc.id.is_empty() {
        return Err(Error::InvalidDocument {
            id: doc.id.clone(),
            message: "empty id".to_string(),
        });
    }
    if doc.text.trim().is_empty() {
        return Err(Error::InvalidDocument {
            id: doc.id.clone(),
            message: "empty text".to_string(),
        });
    }
    Ok(())
}

/// Input format accepted by `load_corpus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<CorpusFormat> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::InvalidConfig {
                message: format!("unknown corpus format {other:?} (expected jsonl or tsv)"),
            }),
        }
    }
}

impl std::fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorpusFormat::Jsonl => "jsonl",
            CorpusFormat::Tsv => "tsv",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    tokens: Option<Vec<String>>,
}

/// Loads a corpus from disk, rejecting malformed records (with line numbers)
/// and duplicate ids.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            CorpusFormat::Jsonl => parse_jsonl_record(line),
            CorpusFormat::Tsv => parse_tsv_record(line),
        }
        .map_err(|message| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        })?;
        documents.push(doc);
    }
    Corpus::new(documents)
}

fn parse_jsonl_record(line: &str) -> std::result::Result<Document, String> {
    let record: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    Ok(Document {
        id: record.id,
        text: record.text,
        label: Label::parse(record.label.as_deref()),
        tokens: record.tokens,
    })
}

fn parse_tsv_record(line: &str) -> std::result::Result<Document, String> {
    let mut parts = line.splitn(3, '\t');
    let id = parts.next().unwrap_or_default();
    let label = parts.next().ok_or("expected id<TAB>label<TAB>text")?;
    let text = parts.next().ok_or("expected id<TAB>label<TAB>text")?;
    Ok(Document {
        id: id.to_string(),
        text: text.to_string(),
        label: Label::parse(if label.is_empty() { None } else { Some(label) }),
        tokens: None,
    })
}

/// Writes a corpus as JSONL; `load_corpus(save_corpus(c))` reproduces `c`
/// exactly.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for doc in corpus.documents() {
        let record = Record {
            id: doc.id.clone(),
            text: doc.text.clone(),
            label: doc.label.as_wire(),
            tokens: doc.tokens.clone(),
        };
        let json = serde_json::to_string(&record).expect("corpus record serializes");
        writeln!(writer, "{json}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

const TERMINATORS: &[char] = &['。', '！', '？', '!', '?', '.', '；', ';'];
const CLOSERS: &[char] = &[
    '」', '』', '”', '’', '"', '\'', ')', '）', ']', '】', '〉', '》', '〕', '｝', '}',
];

fn is_terminator(c: char) -> bool {
    TERMINATORS.contains(&c)
}

fn is_closer(c: char) -> bool {
    CLOSERS.contains(&c)
}

/// Splits a document into sentences at terminal punctuation runs (plus any
/// trailing closing quotes/brackets). Children inherit the label, get ids
/// `parent#0`, `parent#1`, ..., and start untokenized. Concatenating the
/// children's texts reproduces the parent text.
pub fn split_sentences(doc: &Document) -> Vec<Document> {
    let chars: Vec<char> = doc.text.chars().collect();
    let mut sentences: Vec<String> = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if is_terminator(chars[i]) {
            // Consume the whole run: consecutive terminators collapse into
            // one boundary, and closing quotes stay with their sentence.
            while i < chars.len() && (is_terminator(chars[i]) || is_closer(chars[i])) {
                i += 1;
            }
            sentences.push(chars[start..i].iter().collect());
            start = i;
        } else {
            i += 1;
        }
    }
    if start < chars.len() {
        let tail: String = chars[start..].iter().collect();
        if tail.chars().all(char::is_whitespace) {
            // Keep the partition exact: trailing whitespace belongs to the
            // last sentence rather than forming an empty fragment.
            if let Some(last) = sentences.last_mut() {
                last.push_str(&tail);
            }
        } else {
            sentences.push(tail);
        }
    }
    sentences
        .into_iter()
        .enumerate()
        .map(|(k, text)| Document {
            id: format!("{}#{}", doc.id, k),
            text,
            label: doc.label,
            tokens: None,
        })
        .collect()
}

/// True when every character of the token is punctuation, a digit,
/// whitespace, or a symbol (Unicode categories P, N, Z, S).
pub fn is_noise_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_noise_char)
}

fn is_noise_char(c: char) -> bool {
    use GeneralCategory::*;
    c.is_whitespace()
        || matches!(
            get_general_category(c),
            ClosePunctuation
                | ConnectorPunctuation
                | DashPunctuation
                | FinalPunctuation
                | InitialPunctuation
                | OpenPunctuation
                | OtherPunctuation
                | DecimalNumber
                | LetterNumber
                | OtherNumber
                | LineSeparator
                | ParagraphSeparator
                | SpaceSeparator
                | CurrencySymbol
                | MathSymbol
                | ModifierSymbol
                | OtherSymbol
        )
}

/// Drops noise tokens, keeping CJK and alphabetic tokens. Idempotent.
pub fn filter_noise(mut tokens: Vec<String>) -> Vec<String> {
    tokens.retain(|t| !is_noise_token(t));
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::tempdir;

    fn doc(id: &str, text: &str, label: Label) -> Document {
        Document::new(id, text, label)
    }

    #[test]
    fn load_tallies_labels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        std::fs::write(
            &path,
            "{\"id\":\"a\",\"text\":\"很好\",\"label\":\"positive\"}\n\
             {\"id\":\"b\",\"text\":\"很差\",\"label\":\"NEGATIVE\"}\n",
        )
        .unwrap();
        let corpus = load_corpus(&path, CorpusFormat::Jsonl).unwrap();
        let counts = corpus.counts();
        assert_eq!(counts.positive, 1);
        assert_eq!(counts.negative, 1);
        assert_eq!(counts.unlabeled, 0);
    }

    #[test]
    fn missing_label_is_unlabeled() {
        let d = parse_jsonl_record("{\"id\":\"a\",\"text\":\"好\"}").unwrap();
        assert_eq!(d.label, Label::Unlabeled);
        let d = parse_jsonl_record("{\"id\":\"a\",\"text\":\"好\",\"label\":null}").unwrap();
        assert_eq!(d.label, Label::Unlabeled);
        let d = parse_jsonl_record("{\"id\":\"a\",\"text\":\"好\",\"label\":\"neutral\"}").unwrap();
        assert_eq!(d.label, Label::Unlabeled);
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = Corpus::new(vec![
            doc("r1", "好", Label::Positive),
            doc("r1", "差", Label::Negative),
        ])
        .unwrap_err();
        match err {
            Error::DuplicateId { id } => assert_eq!(id, "r1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn malformed_record_reports_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        std::fs::write(&path, "{\"id\":\"a\",\"text\":\"好\"}\nnot json\n").unwrap();
        let err = load_corpus(&path, CorpusFormat::Jsonl).unwrap_err();
        match err {
            Error::MalformedRecord { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn tsv_records_parse() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        std::fs::write(&path, "a\tpositive\t很好\nb\t\t不知道\n").unwrap();
        let corpus = load_corpus(&path, CorpusFormat::Tsv).unwrap();
        assert_eq!(corpus.documents()[0].label, Label::Positive);
        assert_eq!(corpus.documents()[1].label, Label::Unlabeled);
        assert_eq!(corpus.documents()[1].text, "不知道");
    }

    #[test]
    fn split_two_terminators() {
        let parts = split_sentences(&doc("r", "很好。服务差！", Label::Positive));
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].text, "很好。");
        assert_eq!(parts[1].text, "服务差！");
        assert_eq!(parts[0].id, "r#0");
        assert_eq!(parts[1].id, "r#1");
        assert_eq!(parts[1].label, Label::Positive);
    }

    #[test]
    fn split_no_terminator_passthrough() {
        let parts = split_sentences(&doc("r", "不错", Label::Unlabeled));
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].text, "不错");
    }

    #[test]
    fn split_collapses_terminator_runs() {
        let parts = split_sentences(&doc("r", "好。。。", Label::Positive));
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].text, "好。。。");
    }

    #[test]
    fn split_keeps_closing_quote_with_sentence() {
        let parts = split_sentences(&doc("r", "他说“好！”然后走了。", Label::Unlabeled));
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].text, "他说“好！”");
        assert_eq!(parts[1].text, "然后走了。");
    }

    #[test]
    fn filter_noise_examples() {
        let got = filter_noise(vec![
            "酒店".to_string(),
            "，".to_string(),
            "123".to_string(),
            "好".to_string(),
        ]);
        assert_eq!(got, vec!["酒店", "好"]);
        assert_eq!(filter_noise(vec![]), Vec::<String>::new());
        let got = filter_noise(vec!["wifi".to_string(), "！！".to_string()]);
        assert_eq!(got, vec!["wifi"]);
    }

    #[test]
    fn save_load_round_trip_preserves_tokens() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut d = doc("a", "很好。", Label::Positive);
        d.tokens = Some(vec!["很".to_string(), "好".to_string()]);
        let corpus = Corpus::new(vec![d, doc("b", "一般", Label::Unlabeled)]).unwrap();
        save_corpus(&corpus, &path).unwrap();
        let reloaded = load_corpus(&path, CorpusFormat::Jsonl).unwrap();
        assert_eq!(reloaded, corpus);
    }

    #[test]
    fn empty_corpus_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        save_corpus(&Corpus::empty(), &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), Vec::<u8>::new());
        let reloaded = load_corpus(&path, CorpusFormat::Jsonl).unwrap();
        assert!(reloaded.is_empty());
    }

    proptest! {
        #[test]
        fn round_trip_identity(
            texts in proptest::collection::vec("[^\\s]{1,8}\\PC{0,12}", 1..8),
            labels in proptest::collection::vec(0u8..3, 8),
        ) {
            let dir = tempdir().unwrap();
            let path = dir.path().join("c.jsonl");
            let docs: Vec<Document> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let label = match labels[i % labels.len()] {
                        0 => Label::Positive,
                        1 => Label::Negative,
                        _ => Label::Unlabeled,
                    };
                    doc(&format!("d{i}"), t, label)
                })
                .collect();
            let corpus = Corpus::new(docs).unwrap();
            save_corpus(&corpus, &path).unwrap();
            prop_assert_eq!(load_corpus(&path, CorpusFormat::Jsonl).unwrap(), corpus);
        }

        #[test]
        fn split_is_a_partition(text in "[^\\s]\\PC{0,30}") {
            let parent = doc("p", &text, Label::Positive);
            let parts = split_sentences(&parent);
            let joined: String = parts.iter().map(|d| d.text.as_str()).collect();
            prop_assert_eq!(joined, text);
        }

        #[test]
        fn filter_noise_idempotent(tokens in proptest::collection::vec("\\PC{0,6}", 0..10)) {
            let once = filter_noise(tokens.clone());
            let twice = filter_noise(once.clone());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tallies_partition_corpus(labels in proptest::collection::vec(0u8..3, 0..20)) {
            let docs: Vec<Document> = labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let label = match l {
                        0 => Label::Positive,
                        1 => Label::Negative,
                        _ => Label::Unlabeled,
                    };
                    doc(&format!("d{i}"), "文", label)
                })
                .collect();
            let corpus = Corpus::new(docs).unwrap();
            prop_assert_eq!(corpus.counts().total(), corpus.len());
        }
    }
}
