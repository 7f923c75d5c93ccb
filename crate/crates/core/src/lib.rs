//! Minimum-description-length toolkit for probabilistic grammars.
//!
//! The pieces, bottom up:
//!
//! * [`grammar`] — probabilistic finite-state and context-free grammars:
//!   parsing, validation, sampling, exact scoring.
//! * [`coding`] — two-part code lengths (grammar bits plus data bits) under a
//!   frozen encoding scheme, and crossover scans between competing grammars.
//! * [`learner`] — finite Bayesian mixtures with `2^(-L)` priors as a
//!   computable stand-in for the universal sequence predictor, plus
//!   convergence profiles checked against their theoretical bounds.
//! * [`formmeaning`] — the same machinery over sentence-interpretation pairs.
//! * [`learnability`] — how much input a grammatical restriction needs
//!   before it pays for itself, in occurrences and years.
//! * [`corpus`] — corpus statistics feeding the learnability estimates.
//! * [`report`] / [`svg`] — deterministic JSON/CSV/SVG emission.

#![forbid(unsafe_code)]

pub mod coding;
pub mod corpus;
pub mod error;
pub mod formmeaning;
pub mod grammar;
pub mod learnability;
pub mod learner;
#[cfg(feature = "test-oracles")]
pub mod oracles;
pub mod report;
pub mod svg;
pub mod token;

pub use coding::{CodeLengthReport, CodingConfig};
pub use error::{Error, Result};
pub use grammar::{parse_grammar, Grammar, Pcfg, Pfsg};
pub use token::{Token, TokenSequence, END_TOKEN};
