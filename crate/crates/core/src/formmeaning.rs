//! Learning form-meaning mappings from positive pairs.
//!
//! Interpretations are opaque labels from a finite inventory; hypotheses are
//! explicit joint tables over (sentence, interpretation) cells, with
//! sentences drawn from a base grammar up to a length bound. Pairs are
//! sampled independently, so prediction over pairs is an ordinary sequential
//! prediction problem and the whole learner stack applies unchanged — both
//! conditionals (interpretation given sentence, sentence given
//! interpretation) fall out of the learned joint.

use crate::coding::CodingConfig;
use crate::error::{Error, Result};
use crate::grammar::Grammar;
use crate::learner::process::{Mixture, MixState, Process};
use crate::learner::profile::{self, ConvergenceProfile, ProfileParams};
use crate::learner::ProfileMode;

/// The declared interpretation inventory: one label per line, `#` comments
/// and blank lines ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    labels: Vec<String>,
}

impl Inventory {
    pub fn parse(text: &str) -> Result<Inventory> {
        let mut labels = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.split_whitespace().count() != 1 {
                return Err(Error::MalformedLine {
                    line: i + 1,
                    msg: "interpretation labels cannot contain whitespace".into(),
                });
            }
            if labels.iter().any(|l| l == line) {
                return Err(Error::MalformedLine {
                    line: i + 1,
                    msg: format!("duplicate interpretation `{line}`"),
                });
            }
            labels.push(line.to_string());
        }
        if labels.is_empty() {
            return Err(Error::InvalidParameter(
                "interpretation inventory is empty".into(),
            ));
        }
        Ok(Inventory { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A sentence paired with an interpretation label id.
pub type FormMeaningPair = (Vec<String>, usize);

/// Parses a pair corpus: one `sentence<TAB>interpretation` per line.
/// Duplicate lines are kept — pairs are sampled independently and repeats
/// are evidence.
pub fn parse_pairs(text: &str, inventory: &Inventory) -> Result<Vec<FormMeaningPair>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let (sentence, label) = raw.split_once('\t').ok_or_else(|| Error::MalformedLine {
            line: lineno,
            msg: "expected `sentence<TAB>interpretation`".into(),
        })?;
        let words: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(Error::MalformedLine {
                line: lineno,
                msg: "empty sentence".into(),
            });
        }
        let label = label.trim();
        let id = inventory.id(label).ok_or_else(|| Error::UndeclaredInterpretation {
            label: label.to_string(),
            line: lineno,
        })?;
        pairs.push((words, id));
    }
    Ok(pairs)
}

/// Sentences of a base grammar up to a word-length bound, in deterministic
/// (lexicographic) order: the row space shared by all joint hypotheses.
pub fn induced_rows(base: &Grammar, max_words: usize) -> Vec<Vec<String>> {
    base.enumerate_sentences(max_words)
        .into_iter()
        .map(|(words, _)| words)
        .collect()
}

/// An explicit joint distribution over (sentence row, interpretation) cells.
#[derive(Debug, Clone)]
pub struct JointHypothesis {
    pub name: String,
    rows: Vec<Vec<String>>,
    n_labels: usize,
    /// Row-major cell probabilities, length `rows.len() * n_labels`.
    cells: Vec<f64>,
    pub description_bits: f64,
}

impl JointHypothesis {
    /// Builds a table and computes its description length: a log-size header
    /// plus `param_bits` per free cell (the last cell is implied).
    pub fn new(
        name: String,
        rows: Vec<Vec<String>>,
        n_labels: usize,
        cells: Vec<f64>,
        cfg: &CodingConfig,
    ) -> Result<Self> {
        if rows.is_empty() || n_labels == 0 {
            return Err(Error::InvalidParameter("joint table has no cells".into()));
        }
        if cells.len() != rows.len() * n_labels {
            return Err(Error::InvalidParameter(format!(
                "expected {} cells, got {}",
                rows.len() * n_labels,
                cells.len()
            )));
        }
        if cells.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidParameter("negative cell probability".into()));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "joint table cells sum to {sum}, expected 1 within 1e-9"
            )));
        }
        let header = ((rows.len() + 1) as f64).log2().ceil()
            + ((n_labels + 1) as f64).log2().ceil();
        let description_bits =
            header + f64::from(cfg.param_bits) * (cells.len() as f64 - 1.0);
        Ok(JointHypothesis {
            name,
            rows,
            n_labels,
            cells,
            description_bits,
        })
    }

    /// Parses a table file: lines `sentence | LABEL : prob`; unlisted cells
    /// are zero. Rows are fixed by the shared row space.
    pub fn parse(
        name: String,
        text: &str,
        rows: &[Vec<String>],
        inventory: &Inventory,
        cfg: &CodingConfig,
    ) -> Result<Self> {
        let n_labels = inventory.labels().len();
        let mut cells = vec![0.0; rows.len() * n_labels];
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
            let (sentence, rest) = line.split_once('|').ok_or_else(|| Error::MalformedLine {
                line: lineno,
                msg: "expected `sentence | LABEL : prob`".into(),
            })?;
            let (label, prob) = rest.split_once(':').ok_or_else(|| Error::MalformedLine {
                line: lineno,
                msg: "expected `: prob` after the label".into(),
            })?;
            let words: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
            let row = rows
                .iter()
                .position(|r| *r == words)
                .ok_or_else(|| Error::MalformedLine {
                    line: lineno,
                    msg: format!(
                        "sentence `{}` is not in the induced row space",
                        words.join(" ")
                    ),
                })?;
            let label = label.trim();
            let lab = inventory
                .id(label)
                .ok_or_else(|| Error::UndeclaredInterpretation {
                    label: label.to_string(),
                    line: lineno,
                })?;
            let p: f64 = prob
                .trim()
                .parse()
                .map_err(|_| Error::MalformedLine {
                    line: lineno,
                    msg: format!("invalid probability `{}`", prob.trim()),
                })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::MalformedLine {
                    line: lineno,
                    msg: format!("probability {p} outside (0, 1]"),
                });
            }
            cells[row * n_labels + lab] += p;
        }
        JointHypothesis::new(name, rows.to_vec(), n_labels, cells, cfg)
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn cell(&self, row: usize, label: usize) -> f64 {
        self.cells[row * self.n_labels + label]
    }

    pub fn outcome_of(&self, pair: &FormMeaningPair) -> Option<usize> {
        let row = self.rows.iter().position(|r| *r == pair.0)?;
        Some(row * self.n_labels + pair.1)
    }
}

impl Process for JointHypothesis {
    type State = ();

    fn start_state(&self) {}

    fn outcome_count(&self) -> usize {
        self.cells.len()
    }

    fn conditional_into(&self, _state: &(), out: &mut [f64]) {
        out.copy_from_slice(&self.cells);
    }

    fn step(&self, _state: &(), outcome: usize) -> Option<()> {
        if self.cells[outcome] > 0.0 {
            Some(())
        } else {
            None
        }
    }
}

/// Bayesian mixture over joint tables, updated pair by pair.
#[derive(Debug, Clone)]
pub struct JointMixture {
    mixture: Mixture<JointHypothesis>,
    state: MixState<()>,
    rows: Vec<Vec<String>>,
    n_labels: usize,
    observed: usize,
}

impl JointMixture {
    /// Priors default to normalized `2^(-description_bits)`; overrides
    /// (summing to 1) are used verbatim.
    pub fn new(hyps: Vec<JointHypothesis>, priors: Option<Vec<f64>>) -> Result<Self> {
        if hyps.is_empty() {
            return Err(Error::EmptyClass);
        }
        let rows = hyps[0].rows.clone();
        let n_labels = hyps[0].n_labels;
        for h in &hyps {
            if h.rows != rows || h.n_labels != n_labels {
                return Err(Error::InvalidParameter(format!(
                    "hypothesis `{}` disagrees on the table shape",
                    h.name
                )));
            }
        }
        for i in 0..hyps.len() {
            for j in (i + 1)..hyps.len() {
                if hyps[i].cells == hyps[j].cells {
                    return Err(Error::DuplicateGrammar {
                        name: hyps[j].name.clone(),
                    });
                }
            }
        }
        let log2_priors: Vec<f64> = match priors {
            Some(p) => {
                if p.len() != hyps.len() {
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
                p.iter().map(|w| w.log2()).collect()
            }
            None => {
                let raw: Vec<f64> = hyps.iter().map(|h| (-h.description_bits).exp2()).collect();
                let z: f64 = raw.iter().sum();
                raw.iter().map(|&w| (w / z).log2()).collect()
            }
        };
        let mixture = Mixture {
            procs: hyps,
            log2_priors,
        };
        let state = mixture.init_state();
        Ok(JointMixture {
            mixture,
            state,
            rows,
            n_labels,
            observed: 0,
        })
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn hypotheses(&self) -> &[JointHypothesis] {
        &self.mixture.procs
    }

    pub fn priors(&self) -> Vec<f64> {
        self.mixture.log2_priors.iter().map(|l| l.exp2()).collect()
    }

    pub fn observed_pairs(&self) -> usize {
        self.observed
    }

    fn outcome_of(&self, pair: &FormMeaningPair) -> Result<usize> {
        if pair.1 >= self.n_labels {
            return Err(Error::InvalidParameter("interpretation id out of range".into()));
        }
        let row = self
            .rows
            .iter()
            .position(|r| *r == pair.0)
            .ok_or_else(|| Error::InvalidParameter(format!(
                "sentence `{}` is outside the row space",
                pair.0.join(" ")
            )))?;
        Ok(row * self.n_labels + pair.1)
    }

    /// Sequential Bayesian update on one observed pair.
    pub fn update(&mut self, pair: &FormMeaningPair) -> Result<()> {
        let outcome = self.outcome_of(pair)?;
        self.state = self.mixture.advance(&self.state, outcome);
        self.observed += 1;
        if self.mixture.posterior(&self.state).iter().all(|&w| w == 0.0) {
            return Err(Error::ClassExhausted);
        }
        Ok(())
    }

    pub fn update_all(&mut self, pairs: &[FormMeaningPair]) -> Result<()> {
        for p in pairs {
            self.update(p)?;
        }
        Ok(())
    }

    pub fn posterior(&self) -> Vec<f64> {
        self.mixture.posterior(&self.state)
    }

    /// Posterior-predictive joint table (row-major cells, sums to 1).
    pub fn predictive_joint(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.rows.len() * self.n_labels];
        self.mixture.conditional_into(&self.state, &mut out)?;
        Ok(out)
    }

    /// P(interpretation | sentence) from the predictive joint.
    pub fn conditional_given_sentence(&self, sentence: &[String]) -> Result<Vec<f64>> {
        let joint = self.predictive_joint()?;
        let row = self
            .rows
            .iter()
            .position(|r| r.as_slice() == sentence)
            .ok_or_else(|| Error::InvalidParameter(format!(
                "sentence `{}` is outside the row space",
                sentence.join(" ")
            )))?;
        let slice = &joint[row * self.n_labels..(row + 1) * self.n_labels];
        let mass: f64 = slice.iter().sum();
        if mass == 0.0 {
            return Err(Error::ZeroProbabilityPrefix);
        }
        Ok(slice.iter().map(|p| p / mass).collect())
    }

    /// P(sentence | interpretation) from the predictive joint.
    pub fn conditional_given_label(&self, label: usize) -> Result<Vec<f64>> {
        if label >= self.n_labels {
            return Err(Error::InvalidParameter("interpretation id out of range".into()));
        }
        let joint = self.predictive_joint()?;
        let col: Vec<f64> = (0..self.rows.len())
            .map(|r| joint[r * self.n_labels + label])
            .collect();
        let mass: f64 = col.iter().sum();
        if mass == 0.0 {
            return Err(Error::ZeroProbabilityPrefix);
        }
        Ok(col.iter().map(|p| p / mass).collect())
    }

    /// Expected prediction-error profile over pair outcomes, with the bound
    /// computed from the truth table's description length.
    pub fn error_profile(
        &self,
        truth: &JointHypothesis,
        horizon: usize,
        mode: ProfileMode,
    ) -> Result<ConvergenceProfile> {
        if truth.rows != self.rows || truth.n_labels != self.n_labels {
            return Err(Error::InvalidParameter(
                "truth table disagrees on the table shape".into(),
            ));
        }
        let params = ProfileParams {
            horizon,
            f: 8.0,
            ref_outcome: 0,
            mode,
        };
        profile::convergence_profile(truth, &self.mixture, truth.description_bits, &params)
    }
}
