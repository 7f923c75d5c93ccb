//! Convergence profiles and their theoretical bounds.
//!
//! Three per-step quantities are tracked for a learner mixture predicting a
//! true process mu, all as expectations over length-(n-1) prefixes drawn from
//! mu:
//!
//! * `s_n` — squared prediction error on a designated reference outcome,
//!   plus a total-variation-squared summary; cumulative sum bounded by
//!   `(ln 2 / 2) * L(mu)`.
//! * `delta_n` — mixture mass placed on outcomes mu forbids
//!   (overgeneralization); cumulative sum bounded by `L(mu) / ln 2`.
//! * `lambda_n` — true mass of outcomes the mixture underestimates by at
//!   least a factor `f` (soft undergeneralization); cumulative sum bounded by
//!   `L(mu) / log2(f / e)`, valid only for `f > e`.
//!
//! Exact mode enumerates every positive-probability prefix (with a node
//! budget guard); Monte-Carlo mode samples prefixes from mu and reports
//! normal-approximation confidence intervals. Exact mode is the oracle the
//! Monte-Carlo mode is tested against.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learner::process::{MixState, Mixture, Process};

/// Default node budget for exact enumeration.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileMode {
    Exact { node_budget: u64 },
    MonteCarlo { trials: u32, seed: u64 },
}

impl ProfileMode {
    pub fn describe(&self) -> String {
        match self {
            ProfileMode::Exact { .. } => "exact".to_string(),
            ProfileMode::MonteCarlo { trials, seed } => {
                format!("monte-carlo(trials={trials},seed={seed})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileParams {
    pub horizon: usize,
    /// Underestimation factor for the soft-undergeneralization series.
    pub f: f64,
    /// Reference outcome for the designated-symbol squared error.
    pub ref_outcome: usize,
    pub mode: ProfileMode,
}

#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub n: usize,
    pub s: f64,
    pub s_tv: f64,
    pub delta: f64,
    pub lambda: f64,
    pub cum_s: f64,
    pub cum_delta: f64,
    pub cum_lambda: f64,
    /// Half-widths of 95% confidence intervals (Monte-Carlo mode only).
    pub s_ci: Option<f64>,
    pub delta_ci: Option<f64>,
    pub lambda_ci: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub prediction: f64,
    pub overgeneralization: f64,
    pub undergeneralization: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceProfile {
    pub steps: Vec<StepRecord>,
    pub bounds: Bounds,
    pub truth_bits: f64,
    pub f: f64,
    pub mode: String,
}

pub(crate) fn check_undergen_factor(f: f64) -> Result<()> {
    if f <= std::f64::consts::E {
        return Err(Error::UndergenFactor { f });
    }
    Ok(())
}

pub fn bounds_for(truth_bits: f64, f: f64) -> Bounds {
    let ln2 = std::f64::consts::LN_2;
    Bounds {
        prediction: ln2 / 2.0 * truth_bits,
        overgeneralization: truth_bits / ln2,
        undergeneralization: truth_bits / (f / std::f64::consts::E).log2(),
    }
}

#[derive(Clone)]
struct Accum {
    s: Vec<f64>,
    s_tv: Vec<f64>,
    delta: Vec<f64>,
    lambda: Vec<f64>,
}

impl Accum {
    fn new(horizon: usize) -> Self {
        Accum {
            s: vec![0.0; horizon],
            s_tv: vec![0.0; horizon],
            delta: vec![0.0; horizon],
            lambda: vec![0.0; horizon],
        }
    }
}

/// Records the three per-step quantities at one prefix into `acc[n-1]`,
/// weighted by the prefix probability.
fn record(
    acc: &mut Accum,
    n: usize,
    weight: f64,
    mu: &[f64],
    lam: &[f64],
    f: f64,
    ref_outcome: usize,
) {
    let d = lam[ref_outcome] - mu[ref_outcome];
    acc.s[n - 1] += weight * d * d;
    let tv: f64 = mu
        .iter()
        .zip(lam.iter())
        .map(|(&m, &l)| (m - l).abs())
        .sum::<f64>()
        / 2.0;
    acc.s_tv[n - 1] += weight * tv * tv;
    let mut over = 0.0;
    let mut under = 0.0;
    for k in 0..mu.len() {
        if mu[k] == 0.0 {
            over += lam[k];
        } else if f * lam[k] <= mu[k] {
            under += mu[k];
        }
    }
    acc.delta[n - 1] += weight * over;
    acc.lambda[n - 1] += weight * under;
}

/// Computes all three series for a mixture predicting `truth`.
/// `truth_bits` is the encoded description length of the true generator,
/// used for the attached bounds.
pub fn convergence_profile<P: Process>(
    truth: &P,
    mixture: &Mixture<P>,
    truth_bits: f64,
    params: &ProfileParams,
) -> Result<ConvergenceProfile> {
    check_undergen_factor(params.f)?;
    if params.horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    if truth.outcome_count() != mixture.outcome_count() {
        return Err(Error::InvalidParameter(
            "truth and hypothesis class disagree on the outcome alphabet".into(),
        ));
    }
    let acc = match params.mode {
        ProfileMode::Exact { node_budget } => {
            let mut acc = Accum::new(params.horizon);
            let mut nodes = 0u64;
            exact_walk(
                truth,
                mixture,
                params,
                node_budget,
                0,
                &truth.start_state(),
                1.0,
                &mixture.init_state(),
                &mut acc,
                &mut nodes,
            )?;
            (acc, None)
        }
        ProfileMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidParameter("trials must be positive".into()));
            }
            let (mean, ci) = monte_carlo(truth, mixture, params, trials, seed)?;
            (mean, Some(ci))
        }
    };
    Ok(assemble(acc.0, acc.1, truth_bits, params))
}

fn assemble(
    acc: Accum,
    ci: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    truth_bits: f64,
    params: &ProfileParams,
) -> ConvergenceProfile {
    let mut steps = Vec::with_capacity(params.horizon);
    let (mut cs, mut cd, mut cl) = (0.0, 0.0, 0.0);
    for i in 0..params.horizon {
        cs += acc.s[i];
        cd += acc.delta[i];
        cl += acc.lambda[i];
        steps.push(StepRecord {
            n: i + 1,
            s: acc.s[i],
            s_tv: acc.s_tv[i],
            delta: acc.delta[i],
            lambda: acc.lambda[i],
            cum_s: cs,
            cum_delta: cd,
            cum_lambda: cl,
            s_ci: ci.as_ref().map(|c| c.0[i]),
            delta_ci: ci.as_ref().map(|c| c.1[i]),
            lambda_ci: ci.as_ref().map(|c| c.2[i]),
        });
    }
    ConvergenceProfile {
        steps,
        bounds: bounds_for(truth_bits, params.f),
        truth_bits,
        f: params.f,
        mode: params.mode.describe(),
    }
}

#[allow(clippy::too_many_arguments)]
fn exact_walk<P: Process>(
    truth: &P,
    mixture: &Mixture<P>,
    params: &ProfileParams,
    budget: u64,
    depth: usize,
    truth_state: &P::State,
    path_prob: f64,
    mix_state: &MixState<P::State>,
    acc: &mut Accum,
    nodes: &mut u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded {
            nodes: *nodes,
            budget,
        });
    }
    let k = truth.outcome_count();
    let mut mu = vec![0.0; k];
    truth.conditional_into(truth_state, &mut mu);
    let mut lam = vec![0.0; k];
    mixture.conditional_into(mix_state, &mut lam)?;
    let n = depth + 1;
    record(acc, n, path_prob, &mu, &lam, params.f, params.ref_outcome);
    if n == params.horizon {
        return Ok(());
    }
    for outcome in 0..k {
        if mu[outcome] == 0.0 {
            continue;
        }
        let next_truth = truth
            .step(truth_state, outcome)
            .expect("positive-probability outcome must be steppable");
        let next_mix = mixture.advance(mix_state, outcome);
        exact_walk(
            truth,
            mixture,
            params,
            budget,
            depth + 1,
            &next_truth,
            path_prob * mu[outcome],
            &next_mix,
            acc,
            nodes,
        )?;
    }
    Ok(())
}

/// splitmix64; used to derive independent per-trial seeds so results are
/// identical under any parallel schedule.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

type CiTriple = (Vec<f64>, Vec<f64>, Vec<f64>);

fn monte_carlo<P: Process>(
    truth: &P,
    mixture: &Mixture<P>,
    params: &ProfileParams,
    trials: u32,
    seed: u64,
) -> Result<(Accum, CiTriple)> {
    use rand::SeedableRng;

    let per_trial: Vec<Result<Accum>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(seed, u64::from(t)));
            let mut acc = Accum::new(params.horizon);
            let k = truth.outcome_count();
            let mut mu = vec![0.0; k];
            let mut lam = vec![0.0; k];
            let mut truth_state = truth.start_state();
            let mut mix_state = mixture.init_state();
            for n in 1..=params.horizon {
                truth.conditional_into(&truth_state, &mut mu);
                mixture.conditional_into(&mix_state, &mut lam)?;
                record(&mut acc, n, 1.0, &mu, &lam, params.f, params.ref_outcome);
                let outcome = crate::grammar::Pfsg::sample_symbol(&mu, &mut rng);
                truth_state = truth
                    .step(&truth_state, outcome)
                    .expect("sampled outcome must be steppable");
                mix_state = mixture.advance(&mix_state, outcome);
            }
            Ok(acc)
        })
        .collect();

    // In-order reduction keeps the result independent of scheduling.
    let mut samples = Vec::with_capacity(trials as usize);
    for r in per_trial {
        samples.push(r?);
    }
    let tn = trials as f64;
    let mut mean = Accum::new(params.horizon);
    for s in &samples {
        for i in 0..params.horizon {
            mean.s[i] += s.s[i];
            mean.s_tv[i] += s.s_tv[i];
            mean.delta[i] += s.delta[i];
            mean.lambda[i] += s.lambda[i];
        }
    }
    for i in 0..params.horizon {
        mean.s[i] /= tn;
        mean.s_tv[i] /= tn;
        mean.delta[i] /= tn;
        mean.lambda[i] /= tn;
    }
    let half_width = |get: &dyn Fn(&Accum) -> &Vec<f64>, m: &[f64]| -> Vec<f64> {
        (0..params.horizon)
            .map(|i| {
                if trials < 2 {
                    return f64::INFINITY;
                }
                let var: f64 = samples
                    .iter()
                    .map(|s| {
                        let d = get(s)[i] - m[i];
                        d * d
                    })
                    .sum::<f64>()
                    / (tn - 1.0);
                1.96 * (var / tn).sqrt()
            })
            .collect()
    };
    let ci = (
        half_width(&|a| &a.s, &mean.s),
        half_width(&|a| &a.delta, &mean.delta),
        half_width(&|a| &a.lambda, &mean.lambda),
    );
    Ok((mean, ci))
}
