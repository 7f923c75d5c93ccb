//! Corpus ingestion and occurrence statistics.
//!
//! Tokenization is whitespace splitting on the declared corpus format and
//! nothing else — the point is that factor (3) of the learnability estimate
//! stays auditable. Patterns are token literals plus a single-token wildcard
//! `*`; matches are counted left-anchored at every token position within a
//! sentence, overlaps allowed.

use std::collections::BTreeMap;
use std::io::Read;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub word_count: u64,
    pub sentence_count: u64,
    /// Pattern text -> match count, for patterns counted so far.
    pub pattern_counts: BTreeMap<String, u64>,
    /// SHA-256 of the raw bytes (merged stats combine digests by XOR).
    pub sha256: String,
    sentences: Vec<Vec<String>>,
}

impl CorpusStats {
    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Ingests corpus bytes: one sentence per line, blank and `#` lines ignored.
/// Invalid UTF-8 is reported with its byte offset.
pub fn ingest_bytes(bytes: &[u8]) -> Result<CorpusStats> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    let mut sentences = Vec::new();
    let mut word_count = 0u64;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        word_count += words.len() as u64;
        sentences.push(words);
    }
    Ok(CorpusStats {
        word_count,
        sentence_count: sentences.len() as u64,
        pattern_counts: BTreeMap::new(),
        sha256: sha256_hex(bytes),
        sentences,
    })
}

/// Single-pass streaming ingestion; identical result to [`ingest_bytes`].
pub fn ingest_reader<R: Read>(mut reader: R) -> Result<CorpusStats> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    ingest_bytes(&buf)
}

/// Merges statistics from independently ingested corpora. Counts add;
/// digests combine by XOR so the merge is associative and commutative.
pub fn merge(a: &CorpusStats, b: &CorpusStats) -> CorpusStats {
    let mut digest = [0u8; 32];
    let da = a.sha256.as_bytes();
    let db = b.sha256.as_bytes();
    let parse_nibble = |c: u8| -> u8 {
        match c {
            b'0'..=b'9' => c - b'0',
            b'a'..=b'f' => c - b'a' + 10,
            _ => 0,
        }
    };
    for i in 0..32 {
        let xa = parse_nibble(da[2 * i]) << 4 | parse_nibble(da[2 * i + 1]);
        let xb = parse_nibble(db[2 * i]) << 4 | parse_nibble(db[2 * i + 1]);
        digest[i] = xa ^ xb;
    }
    let mut sentences = a.sentences.clone();
    sentences.extend(b.sentences.iter().cloned());
    let mut stats = CorpusStats {
        word_count: a.word_count + b.word_count,
        sentence_count: a.sentence_count + b.sentence_count,
        pattern_counts: BTreeMap::new(),
        sha256: hex(&digest),
        sentences,
    };
    for pat in a.pattern_counts.keys().chain(b.pattern_counts.keys()) {
        if let Ok(p) = TokenPattern::parse(pat) {
            let c = count_matches(&stats, &p);
            stats.pattern_counts.insert(pat.clone(), c);
        }
    }
    stats
}

/// A token-sequence pattern: literals and the single-token wildcard `*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenPattern {
    elems: Vec<PatternElem>,
    text: String,
}

#[derive(Debug, Clone, PartialEq)]
enum PatternElem {
    Literal(String),
    Wildcard,
}

impl TokenPattern {
    pub fn parse(text: &str) -> Result<TokenPattern> {
        let elems: Vec<PatternElem> = text
            .split_whitespace()
            .map(|t| {
                if t == "*" {
                    PatternElem::Wildcard
                } else {
                    PatternElem::Literal(t.to_string())
                }
            })
            .collect();
        if elems.is_empty() {
            return Err(Error::InvalidParameter("empty pattern".into()));
        }
        Ok(TokenPattern {
            elems,
            text: text.split_whitespace().collect::<Vec<_>>().join(" "),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    fn matches_at(&self, sentence: &[String], at: usize) -> bool {
        if at + self.elems.len() > sentence.len() {
            return false;
        }
        self.elems.iter().enumerate().all(|(i, e)| match e {
            PatternElem::Wildcard => true,
            PatternElem::Literal(w) => sentence[at + i] == *w,
        })
    }
}

/// Counts matches anchored at every token position within each sentence;
/// overlapping matches all count. Matches never cross sentence boundaries.
pub fn count_matches(stats: &CorpusStats, pattern: &TokenPattern) -> u64 {
    let mut count = 0u64;
    for sentence in &stats.sentences {
        for at in 0..sentence.len() {
            if pattern.matches_at(sentence, at) {
                count += 1;
            }
        }
    }
    count
}

/// Matches per million words.
pub fn per_million(count: u64, word_count: u64) -> Result<f64> {
    if word_count == 0 {
        return Err(Error::ZeroWordCorpus);
    }
    Ok(count as f64 * 1e6 / word_count as f64)
}

/// Expected context occurrences per year of input.
pub fn occurrence_rate_per_year(count: u64, word_count: u64, words_per_year: f64) -> Result<f64> {
    if word_count == 0 {
        return Err(Error::ZeroWordCorpus);
    }
    Ok(count as f64 * words_per_year / word_count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_counts() {
        let s = ingest_bytes(b"hi bye\nhi\n").unwrap();
        assert_eq!(s.word_count, 3);
        assert_eq!(s.sentence_count, 2);
        let again = ingest_bytes(b"hi bye\nhi\n").unwrap();
        assert_eq!(s.sha256, again.sha256);
    }

    #[test]
    fn empty_corpus() {
        let s = ingest_bytes(b"").unwrap();
        assert_eq!(s.word_count, 0);
        assert_eq!(s.sentence_count, 0);
    }

    #[test]
    fn pattern_counting() {
        let s = ingest_bytes(b"hi bye\nhi\n").unwrap();
        let p = TokenPattern::parse("hi").unwrap();
        assert_eq!(count_matches(&s, &p), 2);
        let rate = per_million(2, s.word_count).unwrap();
        assert!((rate - 2e6 / 3.0).abs() < 1e-6);
        let w = TokenPattern::parse("hi *").unwrap();
        assert_eq!(count_matches(&s, &w), 1);
    }

    #[test]
    fn rate_per_year() {
        assert!((occurrence_rate_per_year(50, 1_000_000, 1e7).unwrap() - 500.0).abs() < 1e-9);
        assert_eq!(occurrence_rate_per_year(0, 10, 1e7).unwrap(), 0.0);
        assert!(occurrence_rate_per_year(1, 0, 1e7).is_err());
    }

    #[test]
    fn streaming_equals_whole_file() {
        let bytes = b"hi bye\n# note\nhi hi hi\n";
        let whole = ingest_bytes(bytes).unwrap();
        let streamed = ingest_reader(&bytes[..]).unwrap();
        assert_eq!(whole, streamed);
    }

    #[test]
    fn merge_is_additive() {
        let a = ingest_bytes(b"hi bye\n").unwrap();
        let b = ingest_bytes(b"hi\nbye bye\n").unwrap();
        let m = merge(&a, &b);
        assert_eq!(m.word_count, 5);
        assert_eq!(m.sentence_count, 3);
        // XOR combination is symmetric.
        let m2 = merge(&b, &a);
        assert_eq!(m.sha256, m2.sha256);
    }
}
