//! Tokenization strategies for unspaced Chinese text.
//!
//! Pre-segmented input is first-class: `pretokenized` keeps token lists that
//! arrived with the corpus and otherwise splits on whitespace, `whitespace`
//! always splits on whitespace, and `max_match` runs greedy forward maximum
//! matching against a user-supplied dictionary.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_WORD_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentMode {
    Pretokenized,
    Whitespace,
    MaxMatch,
}

impl FromStr for SegmentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<SegmentMode> {
        match s {
            "pretokenized" => Ok(SegmentMode::Pretokenized),
            "whitespace" => Ok(SegmentMode::Whitespace),
            "max_match" => Ok(SegmentMode::MaxMatch),
            other => Err(Error::InvalidConfig {
                message: format!(
                    "unknown segmentation mode {other:?} (expected pretokenized, whitespace, or max_match)"
                ),
            }),
        }
    }
}

impl std::fmt::Display for SegmentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SegmentMode::Pretokenized => "pretokenized",
            SegmentMode::Whitespace => "whitespace",
            SegmentMode::MaxMatch => "max_match",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmenterConfig {
    pub mode: SegmentMode,
    pub dictionary_path: Option<PathBuf>,
    pub max_word_len: usize,
}

impl Default for SegmenterConfig {
    fn default() -> SegmenterConfig {
        SegmenterConfig {
            mode: SegmentMode::Pretokenized,
            dictionary_path: None,
            max_word_len: DEFAULT_MAX_WORD_LEN,
        }
    }
}

/// Deduplicated word list backing max-match segmentation.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    words: HashSet<String>,
}

impl Dictionary {
    pub fn new(words: impl IntoIterator<Item = String>) -> Dictionary {
        Dictionary {
            words: words.into_iter().collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Reads a dictionary file: UTF-8, one word per line, blank lines and `#`
/// comment lines ignored, duplicates collapsed.
pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut words = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        words.insert(word.to_string());
    }
    if words.is_empty() {
        return Err(Error::EmptyDictionary {
            path: path.to_path_buf(),
        });
    }
    Ok(Dictionary { words })
}

/// A configured tokenizer. Stateless after construction, so one instance can
/// segment many documents (including concurrently).
#[derive(Debug, Clone)]
pub struct Segmenter {
    mode: SegmentMode,
    dictionary: Option<Dictionary>,
    max_word_len: usize,
}

impl Segmenter {
    /// Builds a segmenter from config, loading the dictionary when max-match
    /// mode calls for one.
    pub fn new(config: &SegmenterConfig) -> Result<Segmenter> {
        let dictionary = match (config.mode, &config.dictionary_path) {
            (SegmentMode::MaxMatch, Some(path)) => Some(load_dictionary(path)?),
            (SegmentMode::MaxMatch, None) => return Err(Error::DictionaryRequired),
            (_, _) => None,
        };
        Segmenter::with_dictionary(config.mode, dictionary, config.max_word_len)
    }

    /// Builds a segmenter around an in-memory dictionary.
    pub fn with_dictionary(
        mode: SegmentMode,
        dictionary: Option<Dictionary>,
        max_word_len: usize,
    ) -> Result<Segmenter> {
        if max_word_len == 0 {
            return Err(Error::InvalidConfig {
                message: "max_word_len must be at least 1".to_string(),
            });
        }
        if mode == SegmentMode::MaxMatch {
            match &dictionary {
                Some(d) if !d.is_empty() => {}
                _ => return Err(Error::DictionaryRequired),
            }
        }
        Ok(Segmenter {
            mode,
            dictionary,
            max_word_len,
        })
    }

    pub fn mode(&self) -> SegmentMode {
        self.mode
    }

    /// Tokenizes one text. Concatenating the tokens always reproduces the
    /// input with its whitespace removed.
    pub fn segment(&self, text: &str) -> Vec<String> {
        match self.mode {
            SegmentMode::Pretokenized | SegmentMode::Whitespace => {
                text.split_whitespace().map(str::to_string).collect()
            }
            SegmentMode::MaxMatch => {
                let dict = self
                    .dictionary
                    .as_ref()
                    .expect("max-match segmenter holds a dictionary");
                let mut tokens = Vec::new();
                for chunk in text.split_whitespace() {
                    max_match_chunk(chunk, dict, self.max_word_len, &mut tokens);
                }
                tokens
            }
        }
    }

    /// Tokenizes a whole corpus. In pretokenized mode, documents that already
    /// carry tokens keep them; everything else goes through `segment`.
    pub fn segment_corpus(&self, corpus: &Corpus) -> Corpus {
        corpus
            .map_tokens(|doc: &Document| {
                if self.mode == SegmentMode::Pretokenized {
                    if let Some(tokens) = &doc.tokens {
                        return Ok(tokens.clone());
                    }
                }
                Ok(self.segment(&doc.text))
            })
            .expect("token transform is infallible")
    }
}

/// Greedy forward maximum matching over one whitespace-free chunk: take the
/// longest dictionary word of at most `max_word_len` code points, else emit
/// a single code point and advance.
fn max_match_chunk(chunk: &str, dict: &Dictionary, max_word_len: usize, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let limit = max_word_len.min(chars.len() - i);
        let mut taken = 1;
        for len in (2..=limit).rev() {
            let candidate: String = chars[i..i + len].iter().collect();
            if dict.contains(&candidate) {
                taken = len;
                break;
            }
        }
        out.push(chars[i..i + taken].iter().collect());
        i += taken;
    }
}
