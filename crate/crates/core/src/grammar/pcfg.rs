//! Probabilistic context-free grammars.
//!
//! Whole-sentence probabilities are computed with the inside algorithm over
//! arbitrary right-hand sides (no normal-form conversion). Empty right-hand
//! sides and unary nonterminal cycles are rejected at validation, which keeps
//! every span computation well-founded; subcriticality of the mean matrix
//! (spectral radius below 1) guarantees that derivations terminate with
//! probability 1, so the grammar is a proper sentence distribution.

use rand::Rng;

use crate::error::{Error, Result};
use crate::token::{Token, TokenSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfgSym {
    Terminal(usize),
    Nonterminal(usize),
}

#[derive(Debug, Clone)]
pub struct PcfgRule {
    pub lhs: usize,
    pub rhs: Vec<PcfgSym>,
    pub prob: f64,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Pcfg {
    start: usize,
    nt_names: Vec<String>,
    term_names: Vec<String>,
    rules: Vec<PcfgRule>,
    by_nt: Vec<Vec<usize>>,
    /// Nonterminals in an order where unary rule targets come first.
    unary_order: Vec<usize>,
    /// Minimum terminal yield per nonterminal.
    min_len: Vec<usize>,
}

impl Pcfg {
    pub(crate) fn build(
        start: usize,
        nt_names: Vec<String>,
        term_names: Vec<String>,
        rules: Vec<PcfgRule>,
    ) -> Result<Self> {
        let mut by_nt = vec![Vec::new(); nt_names.len()];
        for (i, r) in rules.iter().enumerate() {
            by_nt[r.lhs].push(i);
        }
        let mut g = Pcfg {
            start,
            nt_names,
            term_names,
            rules,
            by_nt,
            unary_order: Vec::new(),
            min_len: Vec::new(),
        };
        g.validate()?;
        g.unary_order = g.topo_unary()?;
        g.min_len = g.compute_min_len();
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.by_nt[self.start].is_empty() {
            return Err(Error::UndeclaredSymbol {
                name: self.nt_names[self.start].clone(),
                line: 0,
            });
        }
        for (nt, idxs) in self.by_nt.iter().enumerate() {
            if idxs.is_empty() {
                continue;
            }
            let sum: f64 = idxs.iter().map(|&i| self.rules[i].prob).sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::ProbabilitySum {
                    symbol: self.nt_names[nt].clone(),
                    sum,
                    line: self.rules[idxs[0]].line,
                });
            }
        }
        let rho = self.spectral_radius_estimate();
        if rho >= 1.0 - 1e-9 {
            return Err(Error::NonTerminating {
                detail: format!(
                    "mean matrix spectral radius {rho:.6} is not below 1; \
                     expected derivation size is infinite"
                ),
            });
        }
        Ok(())
    }

    /// Upper estimate of the spectral radius of the mean matrix
    /// M[a][b] = sum over rules of `a` of prob * (occurrences of `b`), via
    /// Gelfand's formula with 20 squarings: ||M^k||_inf^(1/k) >= rho, so the
    /// subcriticality test never accepts a supercritical grammar.
    fn spectral_radius_estimate(&self) -> f64 {
        let n = self.nt_names.len();
        let mut m = vec![vec![0.0f64; n]; n];
        for r in &self.rules {
            for sym in &r.rhs {
                if let PcfgSym::Nonterminal(b) = sym {
                    m[r.lhs][*b] += r.prob;
                }
            }
        }
        let norm = |a: &Vec<Vec<f64>>| -> f64 {
            a.iter()
                .map(|row| row.iter().sum::<f64>())
                .fold(0.0, f64::max)
        };
        let mut log_norm_acc = 0.0f64; // sum of ln s_i / 2^i
        let mut cur = m;
        for i in 0..20u32 {
            let s = norm(&cur);
            if s == 0.0 {
                return 0.0;
            }
            log_norm_acc += s.ln() / f64::from(1u32 << i);
            let inv = 1.0 / s;
            for row in cur.iter_mut() {
                for v in row.iter_mut() {
                    *v *= inv;
                }
            }
            let next = mat_mul(&cur);
            cur = next;
        }
        let s = norm(&cur);
        if s == 0.0 {
            return 0.0;
        }
        (log_norm_acc + s.ln() / f64::from(1u32 << 20)).exp()
    }

    /// Order nonterminals so that for every unary rule `A -> B`, `B` comes
    /// before `A`. Rejects unary cycles.
    fn topo_unary(&self) -> Result<Vec<usize>> {
        let n = self.nt_names.len();
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n]; // A -> B
        for r in &self.rules {
            if r.rhs.len() == 1 {
                if let PcfgSym::Nonterminal(b) = r.rhs[0] {
                    edges[r.lhs].push(b);
                }
            }
        }
        let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
        let mut order = Vec::with_capacity(n);
        fn visit(
            v: usize,
            edges: &[Vec<usize>],
            color: &mut [u8],
            order: &mut Vec<usize>,
            names: &[String],
        ) -> Result<()> {
            color[v] = 1;
            for &w in &edges[v] {
                match color[w] {
                    0 => visit(w, edges, color, order, names)?,
                    1 => {
                        return Err(Error::NonTerminating {
                            detail: format!(
                                "unary nonterminal cycle through `{}`",
                                names[w]
                            ),
                        })
                    }
                    _ => {}
                }
            }
            color[v] = 2;
            order.push(v);
            Ok(())
        }
        for v in 0..n {
            if color[v] == 0 {
                visit(v, &edges, &mut color, &mut order, &self.nt_names)?;
            }
        }
        Ok(order)
    }

    fn compute_min_len(&self) -> Vec<usize> {
        let n = self.nt_names.len();
        let big = usize::MAX / 4;
        let mut min_len = vec![big; n];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let mut total = 0usize;
                let mut known = true;
                for sym in &r.rhs {
                    match sym {
                        PcfgSym::Terminal(_) => total += 1,
                        PcfgSym::Nonterminal(b) => {
                            if min_len[*b] >= big {
                                known = false;
                                break;
                            }
                            total += min_len[*b];
                        }
                    }
                }
                if known && total < min_len[r.lhs] {
                    min_len[r.lhs] = total;
                    changed = true;
                }
            }
            if !changed {
                return min_len;
            }
        }
    }

    pub fn start_symbol(&self) -> usize {
        self.start
    }

    pub fn nonterminal_names(&self) -> &[String] {
        &self.nt_names
    }

    pub fn alphabet(&self) -> &[String] {
        &self.term_names
    }

    pub fn rules(&self) -> &[PcfgRule] {
        &self.rules
    }

    pub fn num_nonterminals(&self) -> usize {
        self.nt_names.len()
    }

    pub fn num_terminals(&self) -> usize {
        self.term_names.len()
    }

    pub fn term_id(&self, name: &str) -> Option<usize> {
        self.term_names.iter().position(|n| n == name)
    }

    /// Inside probability of a terminal string under the start symbol.
    pub fn inside_prob(&self, words: &[usize]) -> f64 {
        let n = words.len();
        let nts = self.nt_names.len();
        // inside[nt][i][j] with spans keyed by (i, width)
        let mut inside = vec![vec![vec![0.0f64; n + 1]; n + 1]; nts];
        for width in 1..=n {
            for i in 0..=(n - width) {
                let j = i + width;
                // Non-unary rules first: all their parts cover strict sub-spans.
                for &nt in self.unary_order.iter() {
                    for &ri in &self.by_nt[nt] {
                        let r = &self.rules[ri];
                        let unary_nt = r.rhs.len() == 1
                            && matches!(r.rhs[0], PcfgSym::Nonterminal(_));
                        if unary_nt {
                            if let PcfgSym::Nonterminal(b) = r.rhs[0] {
                                let add = r.prob * inside[b][i][j];
                                inside[nt][i][j] += add;
                            }
                        } else {
                            inside[nt][i][j] += r.prob * self.rule_span(r, &inside, words, i, j);
                        }
                    }
                }
            }
        }
        inside[self.start][0][n]
    }

    /// Probability mass of one rule's right-hand side covering span [i, j).
    fn rule_span(
        &self,
        rule: &PcfgRule,
        inside: &[Vec<Vec<f64>>],
        words: &[usize],
        i: usize,
        j: usize,
    ) -> f64 {
        // reach[k] = mass of ways the consumed rhs prefix covers [i, k)
        let mut reach = vec![0.0f64; j + 1];
        reach[i] = 1.0;
        for sym in &rule.rhs {
            let mut next = vec![0.0f64; j + 1];
            match sym {
                PcfgSym::Terminal(t) => {
                    for k in i..j {
                        if reach[k] > 0.0 && words[k] == *t {
                            next[k + 1] += reach[k];
                        }
                    }
                }
                PcfgSym::Nonterminal(b) => {
                    for k in i..j {
                        if reach[k] == 0.0 {
                            continue;
                        }
                        for k2 in (k + 1)..=j {
                            let inner = inside[*b][k][k2];
                            if inner > 0.0 {
                                next[k2] += reach[k] * inner;
                            }
                        }
                    }
                }
            }
            reach = next;
        }
        reach[j]
    }

    /// -log2 probability of a single sentence ending with `$end`.
    pub fn sentence_log_loss(&self, sentence: &TokenSequence) -> Result<f64> {
        if !sentence.is_single_sentence() {
            return Err(Error::InvalidParameter(
                "sentence_log_loss expects exactly one sentence ending with $end".into(),
            ));
        }
        let mut words = Vec::new();
        for tok in sentence.tokens() {
            match tok {
                Token::End => break,
                Token::Word(w) => {
                    words.push(self.term_id(w).ok_or_else(|| Error::OutOfVocabulary {
                        token: w.clone(),
                    })?);
                }
            }
        }
        let p = self.inside_prob(&words);
        if p <= 0.0 {
            Ok(f64::INFINITY)
        } else {
            Ok(-p.log2())
        }
    }

    /// Samples a sentence stream by leftmost expansion, up to `max_tokens`
    /// symbols including end markers.
    pub fn generate<R: Rng>(&self, rng: &mut R, max_tokens: usize) -> (TokenSequence, bool) {
        let mut out = TokenSequence::default();
        if max_tokens == 0 {
            return (out, true);
        }
        'stream: loop {
            let mut stack = vec![PcfgSym::Nonterminal(self.start)];
            while let Some(sym) = stack.pop() {
                match sym {
                    PcfgSym::Terminal(t) => {
                        if out.len() >= max_tokens {
                            return (out, true);
                        }
                        out.push(Token::word(&self.term_names[t]));
                    }
                    PcfgSym::Nonterminal(a) => {
                        let idxs = &self.by_nt[a];
                        let dist: Vec<f64> = idxs.iter().map(|&i| self.rules[i].prob).collect();
                        let pick = super::pfsg::Pfsg::sample_symbol(&dist, rng);
                        for sym in self.rules[idxs[pick]].rhs.iter().rev() {
                            stack.push(*sym);
                        }
                    }
                }
            }
            if out.len() >= max_tokens {
                return (out, true);
            }
            out.push(Token::End);
            if out.len() >= max_tokens {
                break 'stream;
            }
        }
        (out, false)
    }

    /// All sentences of at most `max_tokens` words with positive probability,
    /// lexicographically ordered by terminal ids. Intended for small grammars.
    pub fn enumerate_sentences(&self, max_tokens: usize) -> Vec<(Vec<String>, f64)> {
        let mut acc: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut yield_buf: Vec<usize> = Vec::new();
        self.enum_form(
            &[PcfgSym::Nonterminal(self.start)],
            1.0,
            max_tokens,
            &mut yield_buf,
            &mut acc,
        );
        let mut named: Vec<(Vec<String>, f64)> = acc
            .into_iter()
            .map(|(toks, p)| {
                (
                    toks.iter()
                        .map(|&t| self.term_names[t].clone())
                        .collect::<Vec<_>>(),
                    p,
                )
            })
            .collect();
        named.sort_by(|a, b| a.0.cmp(&b.0));
        named
    }

    fn enum_form(
        &self,
        form: &[PcfgSym],
        prob: f64,
        budget: usize,
        done: &mut Vec<usize>,
        acc: &mut Vec<(Vec<usize>, f64)>,
    ) {
        match form.first() {
            None => {
                if let Some(entry) = acc.iter_mut().find(|(toks, _)| toks == done) {
                    entry.1 += prob;
                } else {
                    acc.push((done.clone(), prob));
                }
            }
            Some(PcfgSym::Terminal(t)) => {
                if budget == 0 {
                    return;
                }
                done.push(*t);
                self.enum_form(&form[1..], prob, budget - 1, done, acc);
                done.pop();
            }
            Some(PcfgSym::Nonterminal(a)) => {
                // Prune expansions that cannot finish within the budget.
                let rest_min: usize = form[1..]
                    .iter()
                    .map(|s| match s {
                        PcfgSym::Terminal(_) => 1,
                        PcfgSym::Nonterminal(b) => self.min_len[*b],
                    })
                    .sum();
                for &ri in &self.by_nt[*a] {
                    let r = &self.rules[ri];
                    let head_min: usize = r
                        .rhs
                        .iter()
                        .map(|s| match s {
                            PcfgSym::Terminal(_) => 1,
                            PcfgSym::Nonterminal(b) => self.min_len[*b],
                        })
                        .sum();
                    if head_min + rest_min > budget {
                        continue;
                    }
                    let mut next_form: Vec<PcfgSym> = r.rhs.clone();
                    next_form.extend_from_slice(&form[1..]);
                    self.enum_form(&next_form, prob * r.prob, budget, done, acc);
                }
            }
        }
    }

    pub fn canonical_key(&self) -> String {
        let mut parts: Vec<String> = self
            .rules
            .iter()
            .map(|r| {
                let rhs: Vec<&str> = r
                    .rhs
                    .iter()
                    .map(|s| match s {
                        PcfgSym::Terminal(t) => self.term_names[*t].as_str(),
                        PcfgSym::Nonterminal(b) => self.nt_names[*b].as_str(),
                    })
                    .collect();
                format!(
                    "{}>{}@{:016x}",
                    self.nt_names[r.lhs],
                    rhs.join(","),
                    r.prob.to_bits()
                )
            })
            .collect();
        parts.sort();
        format!("pcfg|{}|{}", self.nt_names[self.start], parts.join(";"))
    }
}

fn mat_mul(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let v = a[i][k];
            if v == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += v * a[k][j];
            }
        }
    }
    out
}
