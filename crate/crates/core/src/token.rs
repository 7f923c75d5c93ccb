//! Tokens and token sequences.
//!
//! A corpus is a stream of word tokens segmented into sentences by a reserved
//! end-of-sentence marker. Treating the marker as an ordinary symbol turns
//! distributions over unbounded streams into ordinary distributions over
//! finite sentences, so every code length below is an honest `-log2 p`.

use std::fmt;

use crate::error::{Error, Result};

/// Reserved spelling of the end-of-sentence marker in grammar files.
pub const END_TOKEN: &str = "$end";

/// One symbol of a token stream: a word or the end-of-sentence marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Word(String),
    End,
}

impl Token {
    pub fn word(s: &str) -> Token {
        Token::Word(s.to_string())
    }

    pub fn is_end(&self) -> bool {
        matches!(self, Token::End)
    }

    pub fn as_str(&self) -> &str {
        match self {
            Token::Word(w) => w,
            Token::End => END_TOKEN,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A stream of tokens, segmented into sentences by [`Token::End`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSequence { tokens }
    }

    /// Builds a single sentence `w1 .. wk $end` from whitespace-separated words.
    pub fn sentence(text: &str) -> Self {
        let mut tokens: Vec<Token> = text.split_whitespace().map(Token::word).collect();
        tokens.push(Token::End);
        TokenSequence { tokens }
    }

    /// Parses corpus text: one sentence per line, tokens separated by spaces.
    /// Blank lines and lines starting with `#` are ignored; every remaining
    /// line implicitly ends with the end-of-sentence marker.
    pub fn from_corpus_text(text: &str) -> Self {
        let mut tokens = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for word in line.split_whitespace() {
                tokens.push(Token::word(word));
            }
            tokens.push(Token::End);
        }
        TokenSequence { tokens }
    }

    /// Parses corpus bytes, reporting the byte offset of any invalid UTF-8.
    pub fn from_corpus_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
            offset: e.valid_up_to(),
        })?;
        Ok(Self::from_corpus_text(text))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn push(&mut self, tok: Token) {
        self.tokens.push(tok);
    }

    pub fn extend(&mut self, other: &TokenSequence) {
        self.tokens.extend_from_slice(&other.tokens);
    }

    /// True when the stream ends on a sentence boundary (or is empty).
    pub fn is_segmented(&self) -> bool {
        self.tokens.last().map(Token::is_end).unwrap_or(true)
    }

    /// Complete sentences, each slice ending with [`Token::End`].
    /// A trailing partial sentence is not yielded.
    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> {
        let mut out = Vec::new();
        let mut begin = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.is_end() {
                out.push(&self.tokens[begin..=i]);
                begin = i + 1;
            }
        }
        out.into_iter()
    }

    pub fn sentence_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_end()).count()
    }

    /// True when the sequence is exactly one sentence terminated by `$end`.
    pub fn is_single_sentence(&self) -> bool {
        self.sentence_count() == 1 && self.is_segmented() && !self.tokens.is_empty()
    }

    /// Renders corpus text, one sentence per line. A trailing partial
    /// sentence becomes a final line without terminator semantics.
    pub fn to_corpus_text(&self) -> String {
        let mut out = String::new();
        let mut line: Vec<&str> = Vec::new();
        for t in &self.tokens {
            match t {
                Token::Word(w) => line.push(w),
                Token::End => {
                    out.push_str(&line.join(" "));
                    out.push('\n');
                    line.clear();
                }
            }
        }
        if !line.is_empty() {
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}
