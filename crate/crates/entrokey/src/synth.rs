//! Synthetic review corpora with planted keyword vocabularies, for
//! end-to-end checks with known ground truth.
//!
//! Positive documents draw tokens from the planted positive vocabulary plus
//! the shared one, negative documents symmetrically; a `noise_rate` fraction
//! of tokens comes uniformly from all vocabularies. Unlabeled documents are
//! generated from either class, with the true polarity recorded in a
//! sidecar.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_pos_docs: usize,
    pub num_neg_docs: usize,
    pub num_unlabeled: usize,
    pub planted_pos_vocab: Vec<String>,
    pub planted_neg_vocab: Vec<String>,
    pub shared_vocab: Vec<String>,
    /// Tokens per document.
    pub doc_length: usize,
    /// Fraction of tokens drawn uniformly from all vocabularies, in [0, 1).
    pub noise_rate: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Builds a spec with auto-named vocabularies (`pos00`, `neg00`,
    /// `shr00`, ...) of the requested sizes.
    #[allow(clippy::too_many_arguments)]
    pub fn with_sizes(
        num_pos_docs: usize,
        num_neg_docs: usize,
        num_unlabeled: usize,
        pos_words: usize,
        neg_words: usize,
        shared_words: usize,
        doc_length: usize,
        noise_rate: f64,
        seed: u64,
    ) -> SyntheticSpec {
        let name = |prefix: &str, n: usize| {
            (0..n)
                .map(|i| format!("{prefix}{i:02}"))
                .collect::<Vec<_>>()
        };
        SyntheticSpec {
            num_pos_docs,
            num_neg_docs,
            num_unlabeled,
            planted_pos_vocab: name("pos", pos_words),
            planted_neg_vocab: name("neg", neg_words),
            shared_vocab: name("shr", shared_words),
            doc_length,
            noise_rate,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.doc_length == 0 {
            return Err(Error::InvalidSpec {
                message: "doc_length must be at least 1".to_string(),
            });
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::InvalidSpec {
                message: format!("noise_rate must be in [0, 1), got {}", self.noise_rate),
            });
        }
        if self.planted_pos_vocab.is_empty() || self.planted_neg_vocab.is_empty() {
            return Err(Error::InvalidSpec {
                message: "planted vocabularies must be non-empty".to_string(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for word in self
            .planted_pos_vocab
            .iter()
            .chain(&self.planted_neg_vocab)
            .chain(&self.shared_vocab)
        {
            if !seen.insert(word.as_str()) {
                return Err(Error::InvalidSpec {
                    message: format!("vocabularies are not disjoint: {word:?} repeats"),
                });
            }
        }
        Ok(())
    }
}

/// A generated corpus plus the true polarity of each unlabeled document.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// `(document id, true class)` for every unlabeled document, in corpus
    /// order.
    pub truth: Vec<(String, Label)>,
}

/// Generates a corpus per the spec; identical specs (including the seed)
/// produce identical corpora.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let pos_pool: Vec<&str> = spec
        .planted_pos_vocab
        .iter()
        .chain(&spec.shared_vocab)
        .map(String::as_str)
        .collect();
    let neg_pool: Vec<&str> = spec
        .planted_neg_vocab
        .iter()
        .chain(&spec.shared_vocab)
        .map(String::as_str)
        .collect();
    let all_pool: Vec<&str> = spec
        .planted_pos_vocab
        .iter()
        .chain(&spec.planted_neg_vocab)
        .chain(&spec.shared_vocab)
        .map(String::as_str)
        .collect();

    let draw_doc = |rng: &mut ChaCha8Rng, class: Label| -> Vec<String> {
        let pool = match class {
            Label::Positive => &pos_pool,
            Label::Negative => &neg_pool,
            Label::Unlabeled => unreachable!("documents are drawn from a class"),
        };
        (0..spec.doc_length)
            .map(|_| {
                let source = if rng.random_bool(spec.noise_rate) {
                    &all_pool
                } else {
                    pool
                };
                source[rng.random_range(0..source.len())].to_string()
            })
            .collect()
    };

    let mut documents = Vec::new();
    let mut truth = Vec::new();
    for i in 0..spec.num_pos_docs {
        let tokens = draw_doc(&mut rng, Label::Positive);
        documents.push(make_doc(format!("pos{i:04}"), tokens, Label::Positive));
    }
    for i in 0..spec.num_neg_docs {
        let tokens = draw_doc(&mut rng, Label::Negative);
        documents.push(make_doc(format!("neg{i:04}"), tokens, Label::Negative));
    }
    for i in 0..spec.num_unlabeled {
        let class = if rng.random_bool(0.5) {
            Label::Positive
        } else {
            Label::Negative
        };
        let tokens = draw_doc(&mut rng, class);
        let id = format!("unl{i:04}");
        truth.push((id.clone(), class));
        documents.push(make_doc(id, tokens, Label::Unlabeled));
    }

    Ok(SyntheticCorpus {
        corpus: Corpus::new(documents)?,
        truth,
    })
}

fn make_doc(id: String, tokens: Vec<String>, label: Label) -> Document {
    Document {
        id,
        text: tokens.join(" "),
        label,
        tokens: Some(tokens),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{
        build_count_table, compute_stats, select_keywords, ExtractionConfig, Polarity,
    };

    fn desk_spec(noise_rate: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec::with_sizes(50, 50, 0, 30, 30, 40, 12, noise_rate, seed)
    }

    #[test]
    fn generates_requested_counts() {
        let spec = SyntheticSpec::with_sizes(5, 7, 3, 4, 4, 2, 6, 0.1, 1);
        let synth = generate_synthetic(&spec).unwrap();
        let counts = synth.corpus.counts();
        assert_eq!(counts.positive, 5);
        assert_eq!(counts.negative, 7);
        assert_eq!(counts.unlabeled, 3);
        assert_eq!(synth.truth.len(), 3);
        for doc in synth.corpus.documents() {
            assert_eq!(doc.tokens().unwrap().len(), 6);
        }
    }

    #[test]
    fn zero_noise_keeps_planted_words_class_exclusive() {
        let spec = desk_spec(0.0, 3);
        let synth = generate_synthetic(&spec).unwrap();
        for doc in synth.corpus.documents() {
            if doc.label == Label::Positive {
                for token in doc.tokens().unwrap() {
                    assert!(
                        !spec.planted_neg_vocab.contains(token),
                        "positive doc {} contains planted negative word {token}",
                        doc.id
                    );
                }
            }
        }
    }

    #[test]
    fn same_seed_reproduces_corpus() {
        let spec = desk_spec(0.1, 42);
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = desk_spec(0.1, 0);
        spec.doc_length = 0;
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::InvalidSpec { .. })
        ));

        let mut spec = desk_spec(1.0, 0);
        spec.noise_rate = 1.0;
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::InvalidSpec { .. })
        ));

        let mut spec = desk_spec(0.1, 0);
        spec.shared_vocab.push(spec.planted_pos_vocab[0].clone());
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn entropy_extraction_recovers_planted_words() {
        let spec = desk_spec(0.1, 7);
        let synth = generate_synthetic(&spec).unwrap();
        let stats = compute_stats(&build_count_table(&synth.corpus).unwrap());
        let config = ExtractionConfig::new(2.0, 2.0).unwrap();
        for (polarity, planted) in [
            (Polarity::Positive, &spec.planted_pos_vocab),
            (Polarity::Negative, &spec.planted_neg_vocab),
        ] {
            let list = select_keywords(&stats, config, polarity).unwrap();
            let recovered = planted.iter().filter(|w| list.contains(w)).count();
            let recovery = recovered as f64 / planted.len() as f64;
            assert!(
                recovery >= 0.9,
                "{polarity} recovery {recovery} ({recovered}/{})",
                planted.len()
            );
        }
    }
}
