//! Per-word class-conditional entropy statistics and ratio-test keyword
//! selection.
//!
//! For each vocabulary word, its occurrence counts across positive documents
//! are normalized into a probability distribution whose Shannon entropy (in
//! bits) measures how evenly the word spreads over that class; likewise for
//! negative documents. A word becomes a positive keyword when its positive
//! entropy exceeds `alpha` times its negative entropy (strictly), and a
//! negative keyword under the symmetric `alpha_prime` test.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA_MIN: f64 = 1.0;
pub const DEFAULT_ALPHA_MAX: f64 = 3.75;
pub const DEFAULT_ALPHA_STEP: f64 = 0.25;

/// Which ratio test produced a keyword list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Combined,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Combined => "combined",
        };
        f.write_str(s)
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Polarity> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            "combined" => Ok(Polarity::Combined),
            other => Err(Error::PolarityMismatch {
                message: format!("unknown polarity {other:?}"),
            }),
        }
    }
}

/// Per-document occurrence counts of every vocabulary word, split by class.
/// Counts are raw term frequencies, not binary presence. Unlabeled documents
/// never enter the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    vocabulary: Vec<String>,
    doc_ids_pos: Vec<String>,
    doc_ids_neg: Vec<String>,
    // Column-major sparse counts: per word, (document index, count) pairs
    // ordered by document index.
    pos_counts: Vec<Vec<(usize, u64)>>,
    neg_counts: Vec<Vec<(usize, u64)>>,
}

impl CountTable {
    /// Lexicographically sorted vocabulary; word index j is the position
    /// here.
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn doc_ids_pos(&self) -> &[String] {
        &self.doc_ids_pos
    }

    pub fn doc_ids_neg(&self) -> &[String] {
        &self.doc_ids_neg
    }

    pub fn m_pos(&self) -> usize {
        self.doc_ids_pos.len()
    }

    pub fn m_neg(&self) -> usize {
        self.doc_ids_neg.len()
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.vocabulary
            .binary_search_by(|w| w.as_str().cmp(word))
            .ok()
    }

    fn column(&self, class: Label, j: usize) -> &[(usize, u64)] {
        match class {
            Label::Positive => &self.pos_counts[j],
            Label::Negative => &self.neg_counts[j],
            Label::Unlabeled => unreachable!("count table has no unlabeled class"),
        }
    }

    /// Count of word `j` in the positive document at index `i`.
    pub fn count_pos(&self, i: usize, j: usize) -> u64 {
        lookup(&self.pos_counts[j], i)
    }

    /// Count of word `j` in the negative document at index `i`.
    pub fn count_neg(&self, i: usize, j: usize) -> u64 {
        lookup(&self.neg_counts[j], i)
    }
}

fn lookup(column: &[(usize, u64)], i: usize) -> u64 {
    column
        .binary_search_by_key(&i, |(doc, _)| *doc)
        .map(|pos| column[pos].1)
        .unwrap_or(0)
}

/// Counts every token occurrence in the labeled documents of `corpus`.
/// Requires at least one document per class, all of them tokenized.
pub fn build_count_table(corpus: &Corpus) -> Result<CountTable> {
    let mut doc_ids_pos = Vec::new();
    let mut doc_ids_neg = Vec::new();
    // (class, within-class index, word -> count) per labeled document.
    let mut doc_counts: Vec<(Label, usize, HashMap<&str, u64>)> = Vec::new();
    let mut vocabulary: HashSet<&str> = HashSet::new();

    for doc in corpus.documents() {
        let index = match doc.label {
            Label::Positive => {
                doc_ids_pos.push(doc.id.clone());
                doc_ids_pos.len() - 1
            }
            Label::Negative => {
                doc_ids_neg.push(doc.id.clone());
                doc_ids_neg.len() - 1
            }
            Label::Unlabeled => continue,
        };
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for token in doc.tokens()? {
            *counts.entry(token.as_str()).or_insert(0) += 1;
            vocabulary.insert(token.as_str());
        }
        doc_counts.push((doc.label, index, counts));
    }

    if doc_ids_pos.is_empty() {
        return Err(Error::MissingClass { class: "positive" });
    }
    if doc_ids_neg.is_empty() {
        return Err(Error::MissingClass { class: "negative" });
    }

    let mut vocabulary: Vec<String> = vocabulary.into_iter().map(str::to_string).collect();
    vocabulary.sort();
    let word_index: HashMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(j, w)| (w.as_str(), j))
        .collect();

    let mut pos_counts = vec![Vec::new(); vocabulary.len()];
    let mut neg_counts = vec![Vec::new(); vocabulary.len()];
    for (label, i, counts) in &doc_counts {
        let columns = match label {
            Label::Positive => &mut pos_counts,
            Label::Negative => &mut neg_counts,
            Label::Unlabeled => unreachable!(),
        };
        for (word, count) in counts {
            columns[word_index[word]].push((*i, *count));
        }
    }
    for column in pos_counts.iter_mut().chain(neg_counts.iter_mut()) {
        column.sort_by_key(|(i, _)| *i);
    }

    Ok(CountTable {
        vocabulary,
        doc_ids_pos,
        doc_ids_neg,
        pos_counts,
        neg_counts,
    })
}

/// Dense per-document probability vectors for one word: each count divided
/// by the word's column sum in that class, or all zeros when the word never
/// occurs there.
pub fn word_probabilities(table: &CountTable, word: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let j = table.word_index(word).ok_or_else(|| Error::UnknownWord {
        word: word.to_string(),
    })?;
    let p_pos = dense_probabilities(table.column(Label::Positive, j), table.m_pos());
    let p_neg = dense_probabilities(table.column(Label::Negative, j), table.m_neg());
    Ok((p_pos, p_neg))
}

fn dense_probabilities(column: &[(usize, u64)], m: usize) -> Vec<f64> {
    let total: u64 = column.iter().map(|(_, c)| c).sum();
    let mut p = vec![0.0; m];
    if total == 0 {
        return p;
    }
    for (i, count) in column {
        p[*i] = *count as f64 / total as f64;
    }
    p
}

/// Shannon entropy in bits, with the `0·log2(0) := 0` convention. The input
/// must be a probability vector (entries in [0,1], summing to 1) or all
/// zeros; the all-zero vector has entropy 0.
pub fn word_entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidProbabilities {
                message: format!("entry {x} outside [0, 1]"),
            });
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-12 && sum.abs() > 1e-12 {
        return Err(Error::InvalidProbabilities {
            message: format!("entries sum to {sum}, expected 0 or 1"),
        });
    }
    Ok(entropy_bits(p.iter().copied(), p.len()))
}

/// Sums the −p·log2(p) terms in sorted order so the result is invariant
/// under any permutation of the input, then clamps into [0, log2(support)]
/// to keep float drift from overshooting the mathematical bounds.
fn entropy_bits(probs: impl Iterator<Item = f64>, support: usize) -> f64 {
    let mut nonzero: Vec<f64> = probs.filter(|p| *p > 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    let h: f64 = nonzero.iter().map(|p| -p * p.log2()).sum();
    h.clamp(0.0, (support.max(1) as f64).log2())
}

/// Entropy statistics for one vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordStats {
    pub word: String,
    /// Entropy of the word's distribution over positive documents, in bits.
    pub h_pos: f64,
    /// Entropy of the word's distribution over negative documents, in bits.
    pub h_neg: f64,
    /// Number of positive documents containing the word.
    pub df_pos: usize,
    /// Number of negative documents containing the word.
    pub df_neg: usize,
}

/// Computes entropy statistics for every vocabulary word, in vocabulary
/// order.
pub fn compute_stats(table: &CountTable) -> Vec<KeywordStats> {
    table
        .vocabulary()
        .iter()
        .enumerate()
        .map(|(j, word)| {
            let pos = table.column(Label::Positive, j);
            let neg = table.column(Label::Negative, j);
            KeywordStats {
                word: word.clone(),
                h_pos: column_entropy(pos, table.m_pos()),
                h_neg: column_entropy(neg, table.m_neg()),
                df_pos: pos.len(),
                df_neg: neg.len(),
            }
        })
        .collect()
}

fn column_entropy(column: &[(usize, u64)], m: usize) -> f64 {
    let total: u64 = column.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return 0.0;
    }
    entropy_bits(column.iter().map(|(_, c)| *c as f64 / total as f64), m)
}

/// Ratio-test coefficients. Both must be finite and positive; grid sweeps
/// use values ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionConfig {
    alpha: f64,
    alpha_prime: f64,
}

impl ExtractionConfig {
    pub fn new(alpha: f64, alpha_prime: f64) -> Result<ExtractionConfig> {
        for (name, value) in [("alpha", alpha), ("alpha_prime", alpha_prime)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig {
                    message: format!("{name} must be finite and positive, got {value}"),
                });
            }
        }
        Ok(ExtractionConfig { alpha, alpha_prime })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_prime(&self) -> f64 {
        self.alpha_prime
    }
}

impl Default for ExtractionConfig {
    fn default() -> ExtractionConfig {
        ExtractionConfig {
            alpha: 2.75,
            alpha_prime: 3.75,
        }
    }
}

/// An ordered, duplicate-free keyword list. Combined lists keep positive
/// keywords first; `positive_prefix` marks where the negative section
/// starts.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordList {
    pub polarity: Polarity,
    words: Vec<String>,
    positive_prefix: usize,
    pub config: ExtractionConfig,
}

impl KeywordList {
    pub fn from_parts(
        polarity: Polarity,
        words: Vec<String>,
        positive_prefix: usize,
        config: ExtractionConfig,
    ) -> Result<KeywordList> {
        let mut seen = HashSet::with_capacity(words.len());
        for word in &words {
            if !seen.insert(word.as_str()) {
                return Err(Error::InvalidKeywordList {
                    message: format!("duplicate keyword {word:?}"),
                });
            }
        }
        if positive_prefix > words.len() {
            return Err(Error::InvalidKeywordList {
                message: "positive prefix exceeds list length".to_string(),
            });
        }
        Ok(KeywordList {
            polarity,
            words,
            positive_prefix,
            config,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Count of leading words that came from the positive ratio test.
    pub fn positive_prefix(&self) -> usize {
        self.positive_prefix
    }

    /// Words tagged with the ratio test that selected them.
    pub fn iter_with_polarity(&self) -> impl Iterator<Item = (&str, Polarity)> {
        self.words.iter().enumerate().map(move |(k, w)| {
            let polarity = if k < self.positive_prefix {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            (w.as_str(), polarity)
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }
}

/// Selects keywords by the strict ratio test: positive keywords satisfy
/// `h_pos > alpha · h_neg`, negative keywords `h_neg > alpha_prime · h_pos`.
/// Words with both entropies zero never pass either test.
pub fn select_keywords(
    stats: &[KeywordStats],
    config: ExtractionConfig,
    polarity: Polarity,
) -> Result<KeywordList> {
    let selected: Vec<String> = match polarity {
        Polarity::Positive => stats
            .iter()
            .filter(|s| s.h_pos > config.alpha * s.h_neg)
            .map(|s| s.word.clone())
            .collect(),
        Polarity::Negative => stats
            .iter()
            .filter(|s| s.h_neg > config.alpha_prime * s.h_pos)
            .map(|s| s.word.clone())
            .collect(),
        Polarity::Combined => {
            return Err(Error::PolarityMismatch {
                message: "combined lists come from combine_lists, not selection".to_string(),
            })
        }
    };
    let positive_prefix = match polarity {
        Polarity::Positive => selected.len(),
        _ => 0,
    };
    Ok(KeywordList {
        polarity,
        words: selected,
        positive_prefix,
        config,
    })
}

/// One grid point of an α sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub alpha: f64,
    pub list: KeywordList,
}

/// Keyword lists for every grid value, per polarity.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub positive: Vec<SweepEntry>,
    pub negative: Vec<SweepEntry>,
}

/// Inclusive grid `alpha_min, alpha_min + step, ..., alpha_max`.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, step: f64) -> Result<Vec<f64>> {
    if !alpha_min.is_finite() || !alpha_max.is_finite() || !step.is_finite() {
        return Err(Error::InvalidGrid {
            message: "grid bounds and step must be finite".to_string(),
        });
    }
    if alpha_min > alpha_max {
        return Err(Error::InvalidGrid {
            message: format!("alpha_min {alpha_min} exceeds alpha_max {alpha_max}"),
        });
    }
    if step <= 0.0 {
        return Err(Error::InvalidGrid {
            message: format!("step must be positive, got {step}"),
        });
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = alpha_min + f64::from(k) * step;
        if value > alpha_max + step * 1e-9 {
            break;
        }
        grid.push(value.min(alpha_max));
        k += 1;
    }
    Ok(grid)
}

/// Runs the ratio tests at every grid value, producing one positive and one
/// negative list per α.
pub fn sweep_alphas(
    stats: &[KeywordStats],
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
) -> Result<SweepResult> {
    let grid = alpha_grid(alpha_min, alpha_max, step)?;
    let mut positive = Vec::with_capacity(grid.len());
    let mut negative = Vec::with_capacity(grid.len());
    for &alpha in &grid {
        let config = ExtractionConfig::new(alpha, alpha)?;
        positive.push(SweepEntry {
            alpha,
            list: select_keywords(stats, config, Polarity::Positive)?,
        });
        negative.push(SweepEntry {
            alpha,
            list: select_keywords(stats, config, Polarity::Negative)?,
        });
    }
    Ok(SweepResult { positive, negative })
}

/// Unions a positive and a negative list: positives first, then negatives
/// not already present.
pub fn combine_lists(pos: &KeywordList, neg: &KeywordList) -> Result<KeywordList> {
    if pos.polarity != Polarity::Positive || neg.polarity != Polarity::Negative {
        return Err(Error::PolarityMismatch {
            message: format!(
                "combine_lists needs (positive, negative), got ({}, {})",
                pos.polarity, neg.polarity
            ),
        });
    }
    let mut words = pos.words.clone();
    let seen: HashSet<&str> = pos.words.iter().map(String::as_str).collect();
    for word in &neg.words {
        if !seen.contains(word.as_str()) {
            words.push(word.clone());
        }
    }
    let config = ExtractionConfig::new(pos.config.alpha, neg.config.alpha_prime)?;
    Ok(KeywordList {
        polarity: Polarity::Combined,
        positive_prefix: pos.words.len(),
        words,
        config,
    })
}

const KEYWORD_HEADER: &str = "word\tpolarity\th_pos\th_neg\talpha";

/// Writes a keyword list as TSV with entropy columns drawn from `stats`.
/// Entropies are printed with six decimal places; the alpha column carries
/// the coefficient of the test that selected each word.
pub fn write_keyword_list(
    list: &KeywordList,
    stats: &[KeywordStats],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let by_word: HashMap<&str, &KeywordStats> =
        stats.iter().map(|s| (s.word.as_str(), s)).collect();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    writeln!(writer, "{KEYWORD_HEADER}").map_err(|e| Error::io(path, e))?;
    for (word, polarity) in list.iter_with_polarity() {
        let s = by_word.get(word).ok_or_else(|| Error::UnknownWord {
            word: word.to_string(),
        })?;
        let alpha = match polarity {
            Polarity::Positive => list.config.alpha(),
            _ => list.config.alpha_prime(),
        };
        writeln!(
            writer,
            "{word}\t{polarity}\t{:.6}\t{:.6}\t{alpha}",
            s.h_pos, s.h_neg
        )
        .map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Reads a keyword list written by `write_keyword_list`. Positive rows must
/// precede negative rows; the entropy columns are parsed for validation but
/// only words, polarities, and coefficients are retained.
pub fn read_keyword_list(path: impl AsRef<Path>) -> Result<KeywordList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let malformed = |line: usize, message: String| Error::MalformedRecord {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut words = Vec::new();
    let mut positive_prefix = 0usize;
    let mut alpha = None;
    let mut alpha_prime = None;
    let mut saw_negative = false;
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != KEYWORD_HEADER {
                return Err(malformed(
                    idx + 1,
                    format!("expected header {KEYWORD_HEADER:?}"),
                ));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(malformed(
                idx + 1,
                format!("expected 5 columns, got {}", fields.len()),
            ));
        }
        let polarity: Polarity = fields[1]
            .parse()
            .map_err(|e: Error| malformed(idx + 1, e.to_string()))?;
        for col in [fields[2], fields[3]] {
            col.parse::<f64>()
                .map_err(|e| malformed(idx + 1, format!("bad entropy {col:?}: {e}")))?;
        }
        let row_alpha: f64 = fields[4]
            .parse()
            .map_err(|e| malformed(idx + 1, format!("bad alpha {:?}: {e}", fields[4])))?;
        match polarity {
            Polarity::Positive => {
                if saw_negative {
                    return Err(malformed(
                        idx + 1,
                        "positive rows must precede negative rows".to_string(),
                    ));
                }
                positive_prefix += 1;
                alpha.get_or_insert(row_alpha);
            }
            Polarity::Negative => {
                saw_negative = true;
                alpha_prime.get_or_insert(row_alpha);
            }
            Polarity::Combined => {
                return Err(malformed(
                    idx + 1,
                    "rows carry positive or negative".to_string(),
                ))
            }
        }
        words.push(fields[0].to_string());
    }
    if !saw_header {
        return Err(malformed(1, format!("expected header {KEYWORD_HEADER:?}")));
    }
    let polarity = match (positive_prefix > 0, saw_negative) {
        (true, true) => Polarity::Combined,
        (false, true) => Polarity::Negative,
        _ => Polarity::Positive,
    };
    let config = ExtractionConfig::new(alpha.unwrap_or(1.0), alpha_prime.unwrap_or(1.0))?;
    KeywordList::from_parts(polarity, words, positive_prefix, config)
}
