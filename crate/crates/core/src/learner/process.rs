//! Sequential stochastic processes and finite Bayesian mixtures over them.
//!
//! The learner machinery is generic over the outcome process: grammar
//! hypotheses predict the next stream symbol, form-meaning hypotheses predict
//! the next sentence-interpretation pair. Everything downstream (posteriors,
//! convergence profiles, bound checks) is shared.

use crate::error::{Error, Result};
use crate::grammar::Pfsg;

/// A stochastic process over a finite outcome alphabet `0..outcome_count()`.
pub trait Process: Sync {
    type State: Clone + Send + Sync;

    fn start_state(&self) -> Self::State;
    fn outcome_count(&self) -> usize;
    /// Writes the conditional next-outcome distribution (sums to 1).
    fn conditional_into(&self, state: &Self::State, out: &mut [f64]);
    /// Advances on an observed outcome; `None` when the outcome has
    /// conditional probability 0.
    fn step(&self, state: &Self::State, outcome: usize) -> Option<Self::State>;
}

/// A PFSG with its symbols permuted into a shared canonical order, so that
/// grammars declaring the same alphabet in different rule orders agree on
/// outcome ids. Canonical id `i` maps to local id `to_local[i]`.
#[derive(Debug, Clone)]
pub struct AlignedPfsg {
    grammar: Pfsg,
    to_local: Vec<usize>,
    from_local: Vec<usize>,
}

impl AlignedPfsg {
    /// Aligns a grammar to a canonical terminal order (the end marker is
    /// always the last outcome). The canonical names must be exactly the
    /// grammar's terminals.
    pub fn new(grammar: Pfsg, canonical_terms: &[String]) -> Result<Self> {
        if grammar.num_terminals() != canonical_terms.len() {
            return Err(alphabet_mismatch(&grammar, canonical_terms));
        }
        let mut to_local = Vec::with_capacity(canonical_terms.len() + 1);
        for name in canonical_terms {
            match grammar.term_id(name) {
                Some(id) => to_local.push(id),
                None => return Err(alphabet_mismatch(&grammar, canonical_terms)),
            }
        }
        to_local.push(grammar.end_symbol());
        let mut from_local = vec![0usize; to_local.len()];
        for (canon, &local) in to_local.iter().enumerate() {
            from_local[local] = canon;
        }
        Ok(AlignedPfsg {
            grammar,
            to_local,
            from_local,
        })
    }

    pub fn grammar(&self) -> &Pfsg {
        &self.grammar
    }

    pub fn canonical_of_local(&self, local: usize) -> usize {
        self.from_local[local]
    }
}

fn alphabet_mismatch(g: &Pfsg, canonical: &[String]) -> Error {
    Error::AlphabetMismatch {
        expected: canonical.join(", "),
        found: g.alphabet().join(", "),
        name: String::new(),
    }
}

impl Process for AlignedPfsg {
    type State = Vec<f64>;

    fn start_state(&self) -> Vec<f64> {
        self.grammar.initial_forward()
    }

    fn outcome_count(&self) -> usize {
        self.grammar.num_symbols()
    }

    fn conditional_into(&self, state: &Vec<f64>, out: &mut [f64]) {
        let mut local = vec![0.0; self.grammar.num_symbols()];
        self.grammar.next_dist_into(state, &mut local);
        for (canon, &loc) in self.to_local.iter().enumerate() {
            out[canon] = local[loc];
        }
    }

    fn step(&self, state: &Vec<f64>, outcome: usize) -> Option<Vec<f64>> {
        let (next, p) = self.grammar.advance(state, self.to_local[outcome]);
        if p > 0.0 {
            Some(next)
        } else {
            None
        }
    }
}

/// A finite Bayesian mixture over processes with fixed log2 prior weights.
#[derive(Debug, Clone)]
pub struct Mixture<P: Process> {
    pub procs: Vec<P>,
    pub log2_priors: Vec<f64>,
}

/// Running evidence state of a mixture: per-hypothesis process state
/// (dropped once the hypothesis assigns probability 0) and log2 likelihood.
/// Dead hypotheses are retained with weight 0, never removed.
#[derive(Debug, Clone)]
pub struct MixState<S> {
    pub states: Vec<Option<S>>,
    pub log2_ev: Vec<f64>,
}

impl<P: Process> Mixture<P> {
    pub fn init_state(&self) -> MixState<P::State> {
        MixState {
            states: self.procs.iter().map(|p| Some(p.start_state())).collect(),
            log2_ev: vec![0.0; self.procs.len()],
        }
    }

    pub fn outcome_count(&self) -> usize {
        self.procs[0].outcome_count()
    }

    /// Normalized posterior weights (prior times evidence). Dead hypotheses
    /// get exactly 0. Returns all zeros when the class is exhausted.
    pub fn posterior(&self, st: &MixState<P::State>) -> Vec<f64> {
        let n = self.procs.len();
        let mut logw = vec![f64::NEG_INFINITY; n];
        let mut max = f64::NEG_INFINITY;
        for h in 0..n {
            if st.states[h].is_some() {
                let lw = self.log2_priors[h] + st.log2_ev[h];
                logw[h] = lw;
                if lw > max {
                    max = lw;
                }
            }
        }
        if max == f64::NEG_INFINITY {
            return vec![0.0; n];
        }
        let mut w: Vec<f64> = logw
            .iter()
            .map(|&lw| {
                if lw == f64::NEG_INFINITY {
                    0.0
                } else {
                    (lw - max).exp2()
                }
            })
            .collect();
        let z: f64 = w.iter().sum();
        for v in w.iter_mut() {
            *v /= z;
        }
        w
    }

    /// Posterior-weighted next-outcome distribution.
    /// Errors with [`Error::ClassExhausted`] when every hypothesis is dead.
    pub fn conditional_into(&self, st: &MixState<P::State>, out: &mut [f64]) -> Result<()> {
        let w = self.posterior(st);
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::ClassExhausted);
        }
        out.fill(0.0);
        let mut buf = vec![0.0; out.len()];
        for (h, proc) in self.procs.iter().enumerate() {
            if w[h] == 0.0 {
                continue;
            }
            let state = st.states[h].as_ref().expect("alive hypothesis has state");
            proc.conditional_into(state, &mut buf);
            for (o, &p) in buf.iter().enumerate() {
                out[o] += w[h] * p;
            }
        }
        Ok(())
    }

    /// Advances every hypothesis on an observed outcome. Hypotheses that
    /// assign the outcome probability 0 die (evidence -inf) but stay listed.
    pub fn advance(&self, st: &MixState<P::State>, outcome: usize) -> MixState<P::State> {
        let n = self.procs.len();
        let mut states = Vec::with_capacity(n);
        let mut log2_ev = Vec::with_capacity(n);
        let mut buf = vec![0.0; self.outcome_count()];
        for h in 0..n {
            match &st.states[h] {
                None => {
                    states.push(None);
                    log2_ev.push(f64::NEG_INFINITY);
                }
                Some(state) => {
                    self.procs[h].conditional_into(state, &mut buf);
                    let p = buf[outcome];
                    match self.procs[h].step(state, outcome) {
                        Some(next) if p > 0.0 => {
                            states.push(Some(next));
                            log2_ev.push(st.log2_ev[h] + p.log2());
                        }
                        _ => {
                            states.push(None);
                            log2_ev.push(f64::NEG_INFINITY);
                        }
                    }
                }
            }
        }
        MixState { states, log2_ev }
    }

    /// log2 of the mixture marginal of everything observed so far:
    /// log2 sum_h prior(h) * P_h(observed).
    pub fn log2_marginal(&self, st: &MixState<P::State>) -> f64 {
        let mut max = f64::NEG_INFINITY;
        let terms: Vec<f64> = (0..self.procs.len())
            .map(|h| self.log2_priors[h] + st.log2_ev[h])
            .collect();
        for &t in &terms {
            if t > max {
                max = t;
            }
        }
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = terms
            .iter()
            .filter(|t| t.is_finite())
            .map(|&t| (t - max).exp2())
            .sum();
        max + sum.log2()
    }
}
