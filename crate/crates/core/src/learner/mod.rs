//! The sequential Bayesian mixture learner.
//!
//! A hypothesis class is a finite set of PFSGs with prior weights
//! `2^(-L(h))` (normalized), `L` being the frozen grammar encoding length.
//! The mixture's marginal dominates every member: for all streams `x`,
//! `mixture(x) >= prior(h) * P_h(x)`, which is exactly what the convergence
//! bounds in [`profile`] rely on. Hypotheses that assign the observed stream
//! probability 0 keep their slot with posterior weight 0 — late-arriving
//! evidence semantics stay faithful to the mixture definition.

pub mod process;
pub mod profile;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::coding::{grammar_code_length, CodingConfig};
use crate::error::{Error, Result};
use crate::grammar::{Grammar, Pfsg};
use crate::token::{Token, TokenSequence};

use process::{AlignedPfsg, MixState, Mixture, Process};
pub use profile::{
    bounds_for, Bounds, ConvergenceProfile, ProfileMode, ProfileParams, StepRecord,
    DEFAULT_NODE_BUDGET,
};

/// One member of a hypothesis class.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub name: String,
    pub description_bits: f64,
    pub prior_weight: f64,
}

/// A manifest line: grammar file path plus optional prior override.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: String,
    pub prior: Option<f64>,
}

/// Parses a class manifest: one `hypothesis: <path> [prior=<decimal>]` line
/// per member; `#` comments and blank lines ignored. If any prior is given,
/// all must be given and sum to 1 within 1e-9.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("hypothesis:")
            .ok_or_else(|| Error::MalformedLine {
                line: lineno,
                msg: "expected `hypothesis: <path> [prior=<decimal>]`".into(),
            })?
            .trim();
        let mut parts = rest.split_whitespace();
        let path = parts
            .next()
            .ok_or_else(|| Error::MalformedLine {
                line: lineno,
                msg: "missing grammar path".into(),
            })?
            .to_string();
        let mut prior = None;
        for extra in parts {
            match extra.strip_prefix("prior=") {
                Some(v) => {
                    let p: f64 = v.parse().map_err(|_| Error::MalformedLine {
                        line: lineno,
                        msg: format!("invalid prior `{v}`"),
                    })?;
                    prior = Some(p);
                }
                None => {
                    return Err(Error::MalformedLine {
                        line: lineno,
                        msg: format!("unexpected field `{extra}`"),
                    })
                }
            }
        }
        entries.push(ManifestEntry { path, prior });
    }
    if entries.is_empty() {
        return Err(Error::EmptyClass);
    }
    let with_prior = entries.iter().filter(|e| e.prior.is_some()).count();
    if with_prior != 0 {
        if with_prior != entries.len() {
            return Err(Error::InvalidParameter(
                "either all hypotheses carry a prior override or none do".into(),
            ));
        }
        let sum: f64 = entries.iter().map(|e| e.prior.unwrap()).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "prior overrides sum to {sum}, expected 1 within 1e-9"
            )));
        }
    }
    Ok(entries)
}

/// The finite-class approximation of the ideal sequential learner.
#[derive(Debug, Clone)]
pub struct MixturePredictor {
    hypotheses: Vec<Hypothesis>,
    mixture: Mixture<AlignedPfsg>,
    state: MixState<Vec<f64>>,
    observed: TokenSequence,
    /// Canonical prediction alphabet (sorted terminal names; end marker is
    /// implicitly the final outcome).
    alphabet: Vec<String>,
}

impl MixturePredictor {
    /// Builds a class from named grammars. Priors default to normalized
    /// `2^(-L(h))`; explicit overrides (all-or-none, summing to 1) are used
    /// verbatim. Duplicate grammars and alphabet mismatches are rejected.
    pub fn new(
        members: Vec<(String, Pfsg)>,
        priors: Option<Vec<f64>>,
        cfg: &CodingConfig,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyClass);
        }
        if let Some(p) = &priors {
            if p.len() != members.len() {
                return Err(Error::InvalidParameter(
                    "prior override count differs from hypothesis count".into(),
                ));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "prior overrides sum to {sum}, expected 1 within 1e-9"
                )));
            }
            if p.iter().any(|&x| x.is_nan() || x <= 0.0) {
                return Err(Error::InvalidParameter(
                    "prior overrides must be positive".into(),
                ));
            }
        }

        let mut alphabet: Vec<String> = members[0].1.alphabet().to_vec();
        alphabet.sort();
        let mut seen_keys: Vec<(String, String)> = Vec::new();
        let mut aligned = Vec::with_capacity(members.len());
        let mut bits = Vec::with_capacity(members.len());
        let mut names = Vec::with_capacity(members.len());
        for (name, g) in members {
            let key = g.canonical_key();
            if seen_keys.iter().any(|(k, _)| *k == key) {
                return Err(Error::DuplicateGrammar { name });
            }
            seen_keys.push((key, name.clone()));
            bits.push(grammar_code_length(&Grammar::Pfsg(g.clone()), cfg));
            aligned.push(AlignedPfsg::new(g, &alphabet).map_err(|e| match e {
                Error::AlphabetMismatch {
                    expected, found, ..
                } => Error::AlphabetMismatch {
                    expected,
                    found,
                    name: name.clone(),
                },
                other => other,
            })?);
            names.push(name);
        }

        let weights: Vec<f64> = match priors {
            Some(p) => p,
            None => {
                let raw: Vec<f64> = bits.iter().map(|&l| (-l).exp2()).collect();
                let z: f64 = raw.iter().sum();
                if z > 1.0 + 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "combined prior mass sum 2^-L(h) = {z} exceeds 1; \
                         the dominance argument needs sum <= 1"
                    )));
                }
                raw.iter().map(|&w| w / z).collect()
            }
        };
        let hypotheses = names
            .iter()
            .zip(bits.iter())
            .zip(weights.iter())
            .map(|((name, &description_bits), &prior_weight)| Hypothesis {
                name: name.clone(),
                description_bits,
                prior_weight,
            })
            .collect();
        let mixture = Mixture {
            procs: aligned,
            log2_priors: weights.iter().map(|w| w.log2()).collect(),
        };
        let state = mixture.init_state();
        Ok(MixturePredictor {
            hypotheses,
            mixture,
            state,
            observed: TokenSequence::default(),
            alphabet,
        })
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    /// Canonical alphabet (sorted); the end marker is the final outcome.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn outcome_count(&self) -> usize {
        self.alphabet.len() + 1
    }

    pub fn end_outcome(&self) -> usize {
        self.alphabet.len()
    }

    pub fn observed(&self) -> &TokenSequence {
        &self.observed
    }

    pub fn outcome_of(&self, tok: &Token) -> Result<usize> {
        match tok {
            Token::End => Ok(self.end_outcome()),
            Token::Word(w) => self
                .alphabet
                .iter()
                .position(|n| n == w)
                .ok_or_else(|| Error::OutOfVocabulary { token: w.clone() }),
        }
    }

    pub fn token_of(&self, outcome: usize) -> Token {
        if outcome == self.end_outcome() {
            Token::End
        } else {
            Token::word(&self.alphabet[outcome])
        }
    }

    /// Extends every hypothesis's evidence with one observed token.
    pub fn update(&mut self, tok: &Token) -> Result<()> {
        let outcome = self.outcome_of(tok)?;
        self.state = self.mixture.advance(&self.state, outcome);
        self.observed.push(tok.clone());
        Ok(())
    }

    pub fn update_sequence(&mut self, seq: &TokenSequence) -> Result<()> {
        for tok in seq.tokens() {
            self.update(tok)?;
        }
        Ok(())
    }

    /// Posterior weights in hypothesis order (zeros for dead hypotheses).
    pub fn posterior(&self) -> Vec<f64> {
        self.mixture.posterior(&self.state)
    }

    /// Posterior-predictive next-symbol distribution over the canonical
    /// alphabet plus the end marker.
    pub fn predict(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.outcome_count()];
        self.mixture.conditional_into(&self.state, &mut out)?;
        Ok(out)
    }

    /// log2 of the mixture marginal of the observed stream.
    pub fn log2_marginal(&self) -> f64 {
        self.mixture.log2_marginal(&self.state)
    }

    /// Per-hypothesis log2 evidence of the observed stream.
    pub fn log2_evidence(&self) -> &[f64] {
        &self.state.log2_ev
    }

    pub fn is_exhausted(&self) -> bool {
        self.posterior().iter().all(|&w| w == 0.0)
    }

    /// Forgets all observations.
    pub fn reset(&mut self) {
        self.state = self.mixture.init_state();
        self.observed = TokenSequence::default();
    }

    fn aligned_truth(&self, truth: &Pfsg) -> Result<AlignedPfsg> {
        AlignedPfsg::new(truth.clone(), &self.alphabet).map_err(|e| match e {
            Error::AlphabetMismatch {
                expected, found, ..
            } => Error::AlphabetMismatch {
                expected,
                found,
                name: "truth".into(),
            },
            other => other,
        })
    }

    fn resolve_ref_outcome(&self, ref_symbol: Option<&str>) -> Result<usize> {
        match ref_symbol {
            None => Ok(0),
            Some(name) => self.outcome_of(&Token::word(name)),
        }
    }

    /// Squared error between mixture and truth on the reference symbol's
    /// next-symbol probability after the given prefix.
    pub fn instantaneous_error(
        &self,
        truth: &Pfsg,
        prefix: &TokenSequence,
        ref_symbol: Option<&str>,
    ) -> Result<f64> {
        let truth = self.aligned_truth(truth)?;
        let ref_outcome = self.resolve_ref_outcome(ref_symbol)?;
        let mut truth_state = truth.start_state();
        let mut mix_state = self.mixture.init_state();
        for tok in prefix.tokens() {
            let outcome = self.outcome_of(tok)?;
            let mut mu = vec![0.0; self.outcome_count()];
            truth.conditional_into(&truth_state, &mut mu);
            if mu[outcome] == 0.0 {
                return Err(Error::ZeroProbabilityPrefix);
            }
            truth_state = truth.step(&truth_state, outcome).unwrap();
            mix_state = self.mixture.advance(&mix_state, outcome);
        }
        let mut mu = vec![0.0; self.outcome_count()];
        truth.conditional_into(&truth_state, &mut mu);
        let mut lam = vec![0.0; self.outcome_count()];
        self.mixture.conditional_into(&mix_state, &mut lam)?;
        let d = lam[ref_outcome] - mu[ref_outcome];
        Ok(d * d)
    }

    fn profile(
        &self,
        truth: &Pfsg,
        horizon: usize,
        f: f64,
        mode: ProfileMode,
        ref_symbol: Option<&str>,
        cfg: &CodingConfig,
    ) -> Result<ConvergenceProfile> {
        let aligned = self.aligned_truth(truth)?;
        let truth_bits = grammar_code_length(&Grammar::Pfsg(truth.clone()), cfg);
        let params = ProfileParams {
            horizon,
            f,
            ref_outcome: self.resolve_ref_outcome(ref_symbol)?,
            mode,
        };
        profile::convergence_profile(&aligned, &self.mixture, truth_bits, &params)
    }

    /// Expected squared prediction error per step (`s_n` series), with the
    /// prediction bound attached. Starts from the empty stream.
    pub fn expected_error_profile(
        &self,
        truth: &Pfsg,
        horizon: usize,
        mode: ProfileMode,
        ref_symbol: Option<&str>,
        cfg: &CodingConfig,
    ) -> Result<ConvergenceProfile> {
        self.profile(truth, horizon, 8.0, mode, ref_symbol, cfg)
    }

    /// Expected overgeneralization mass per step (`delta_n` series).
    pub fn overgen_profile(
        &self,
        truth: &Pfsg,
        horizon: usize,
        mode: ProfileMode,
        cfg: &CodingConfig,
    ) -> Result<ConvergenceProfile> {
        self.profile(truth, horizon, 8.0, mode, None, cfg)
    }

    /// Expected soft-undergeneralization mass per step (`lambda_n` series);
    /// rejects factors `f <= e`, for which the bound does not hold.
    pub fn undergen_profile(
        &self,
        truth: &Pfsg,
        f: f64,
        horizon: usize,
        mode: ProfileMode,
        cfg: &CodingConfig,
    ) -> Result<ConvergenceProfile> {
        profile::check_undergen_factor(f)?;
        self.profile(truth, horizon, f, mode, None, cfg)
    }

    /// All three series at once (shared enumeration).
    pub fn full_profile(
        &self,
        truth: &Pfsg,
        horizon: usize,
        f: f64,
        mode: ProfileMode,
        ref_symbol: Option<&str>,
        cfg: &CodingConfig,
    ) -> Result<ConvergenceProfile> {
        self.profile(truth, horizon, f, mode, ref_symbol, cfg)
    }

    /// `mixture(y | observed) / truth(y | x)` where both conditionals are
    /// products of token-level conditionals along `y`, and `x` is this
    /// predictor's observed stream. Errors when truth assigns `y`
    /// conditional probability 0.
    pub fn production_ratio(&self, truth: &Pfsg, continuation: &TokenSequence) -> Result<f64> {
        let aligned = self.aligned_truth(truth)?;
        // Truth conditions on the same observed stream.
        let mut truth_state = aligned.start_state();
        {
            let mut mu = vec![0.0; self.outcome_count()];
            for tok in self.observed.tokens() {
                let outcome = self.outcome_of(tok)?;
                aligned.conditional_into(&truth_state, &mut mu);
                if mu[outcome] == 0.0 {
                    return Err(Error::ZeroProbabilityPrefix);
                }
                truth_state = aligned.step(&truth_state, outcome).unwrap();
            }
        }
        let mut log2_mu = 0.0f64;
        let mut log2_lam = 0.0f64;
        let mut mix_state = self.state.clone();
        let mut mu = vec![0.0; self.outcome_count()];
        let mut lam = vec![0.0; self.outcome_count()];
        for tok in continuation.tokens() {
            let outcome = self.outcome_of(tok)?;
            aligned.conditional_into(&truth_state, &mut mu);
            if mu[outcome] == 0.0 {
                return Err(Error::UndefinedRatio);
            }
            match self.mixture.conditional_into(&mix_state, &mut lam) {
                Ok(()) => log2_lam += lam[outcome].log2(),
                Err(Error::ClassExhausted) => log2_lam = f64::NEG_INFINITY,
                Err(e) => return Err(e),
            }
            log2_mu += mu[outcome].log2();
            truth_state = aligned.step(&truth_state, outcome).unwrap();
            mix_state = self.mixture.advance(&mix_state, outcome);
        }
        Ok((log2_lam - log2_mu).exp2())
    }

    /// Autoregressive sampling from the posterior predictive, continuing the
    /// observed stream. Deterministic given the seed; the predictor itself is
    /// not modified.
    pub fn sample_continuation(
        &self,
        max_tokens: usize,
        seed: u64,
    ) -> Result<(TokenSequence, bool)> {
        if self.is_exhausted() {
            return Err(Error::ClassExhausted);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut out = TokenSequence::default();
        if max_tokens == 0 {
            return Ok((out, true));
        }
        let mut mix_state = self.state.clone();
        let mut lam = vec![0.0; self.outcome_count()];
        while out.len() < max_tokens {
            self.mixture.conditional_into(&mix_state, &mut lam)?;
            let outcome = Pfsg::sample_symbol(&lam, &mut rng);
            out.push(self.token_of(outcome));
            mix_state = self.mixture.advance(&mix_state, outcome);
        }
        let truncated = !out.is_segmented();
        Ok((out, truncated))
    }
}
