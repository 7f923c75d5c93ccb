//! Form-meaning learning: exact Bayes arithmetic oracle, conditional
//! recovery, order invariance, and the pair-prediction error bound.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use simplicity_core::coding::CodingConfig;
use simplicity_core::formmeaning::{
    induced_rows, parse_pairs, FormMeaningPair, Inventory, JointHypothesis, JointMixture,
};
use simplicity_core::learner::{ProfileMode, DEFAULT_NODE_BUDGET};

fn cfg() -> CodingConfig {
    CodingConfig::default()
}

fn inventory() -> Inventory {
    Inventory::parse(&load_fixture("formmeaning/inventory.txt")).unwrap()
}

fn rows() -> Vec<Vec<String>> {
    induced_rows(&load_grammar("formmeaning/base.g"), 4)
}

fn truth() -> JointHypothesis {
    JointHypothesis::parse(
        "truth".into(),
        &load_fixture("formmeaning/truth.table"),
        &rows(),
        &inventory(),
        &cfg(),
    )
    .unwrap()
}

fn alt() -> JointHypothesis {
    JointHypothesis::parse(
        "alt".into(),
        &load_fixture("formmeaning/alt.table"),
        &rows(),
        &inventory(),
        &cfg(),
    )
    .unwrap()
}

fn sample_pairs(table: &JointHypothesis, n: usize, seed: u64) -> Vec<FormMeaningPair> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let cells = table.cells();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let roll: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = cells.len() - 1;
        for (i, &p) in cells.iter().enumerate() {
            acc += p;
            if roll < acc {
                pick = i;
                break;
            }
        }
        let row = pick / table.n_labels();
        let lab = pick % table.n_labels();
        out.push((table.rows()[row].clone(), lab));
    }
    out
}

#[test]
fn induced_rows_are_sorted_and_complete() {
    let rows = rows();
    assert_eq!(
        rows,
        vec![
            vec!["bye".to_string()],
            vec!["hi".to_string()],
            vec!["hi".to_string(), "bye".to_string()],
        ]
    );
}

#[test]
fn table_description_bits_golden() {
    // 3x3 table: header ceil(log2 4) + ceil(log2 4) = 4 bits, 8 free cells
    // at 8 bits each: 68 bits.
    assert_eq!(truth().description_bits, 68.0);
    assert_eq!(alt().description_bits, 68.0);
}

#[test]
fn posterior_beats_99_percent_after_100_pairs_and_matches_bayes_arithmetic() {
    let t = truth();
    let a = alt();
    let pairs = sample_pairs(&t, 100, 2024);
    let mut m = JointMixture::new(vec![t.clone(), a.clone()], None).unwrap();
    m.update_all(&pairs).unwrap();
    let post = m.posterior();

    // Independent Bayes arithmetic: plain product loop over the pair stream.
    let mut like_t = 1.0f64;
    let mut like_a = 1.0f64;
    for p in &pairs {
        like_t *= t.cells()[t.outcome_of(p).unwrap()];
        like_a *= a.cells()[a.outcome_of(p).unwrap()];
    }
    // Equal priors (both tables cost 68 bits).
    let oracle_t = like_t / (like_t + like_a);
    assert!((post[0] - oracle_t).abs() < 1e-9);
    assert!(post[0] > 0.99, "posterior(truth) = {}", post[0]);
}

#[test]
fn conditionals_close_to_truth_after_many_pairs() {
    let t = truth();
    let pairs = sample_pairs(&t, 10_000, 7);
    let mut m = JointMixture::new(vec![t.clone(), alt()], None).unwrap();
    m.update_all(&pairs).unwrap();

    for (r, row) in t.rows().iter().enumerate() {
        let row_mass: f64 = (0..3).map(|l| t.cell(r, l)).sum();
        if row_mass == 0.0 {
            continue;
        }
        let cond = m.conditional_given_sentence(row).unwrap();
        let tv: f64 = (0..3)
            .map(|l| (cond[l] - t.cell(r, l) / row_mass).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.05, "row {row:?}: tv {tv}");
    }
    for l in 0..3 {
        let col_mass: f64 = (0..3).map(|r| t.cell(r, l)).sum();
        if col_mass == 0.0 {
            continue;
        }
        let cond = m.conditional_given_label(l).unwrap();
        let tv: f64 = (0..3)
            .map(|r| (cond[r] - t.cell(r, l) / col_mass).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.05, "label {l}: tv {tv}");
    }
}

#[test]
fn posterior_is_order_invariant() {
    let t = truth();
    let a = alt();
    let mut pairs = sample_pairs(&t, 60, 42);
    let mut m1 = JointMixture::new(vec![t.clone(), a.clone()], None).unwrap();
    m1.update_all(&pairs).unwrap();
    pairs.reverse();
    // An arbitrary permutation beyond reversal.
    pairs.swap(0, 17);
    pairs.swap(3, 44);
    let mut m2 = JointMixture::new(vec![t, a], None).unwrap();
    m2.update_all(&pairs).unwrap();
    for (x, y) in m1.posterior().iter().zip(m2.posterior().iter()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn predictive_joint_recomposes_conditionals() {
    let t = truth();
    let mut m = JointMixture::new(vec![t.clone(), alt()], None).unwrap();
    m.update_all(&sample_pairs(&t, 50, 3)).unwrap();
    let joint = m.predictive_joint().unwrap();
    let sum: f64 = joint.iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);
    for (r, row) in m.rows().to_vec().iter().enumerate() {
        let row_mass: f64 = joint[r * 3..(r + 1) * 3].iter().sum();
        if row_mass == 0.0 {
            continue;
        }
        let cond = m.conditional_given_sentence(row).unwrap();
        for l in 0..3 {
            let recomposed = cond[l] * row_mass;
            assert!(
                (recomposed - joint[r * 3 + l]).abs() < 1e-9,
                "cell ({r},{l}) chain rule"
            );
        }
    }
}

#[test]
fn pair_error_profile_respects_prediction_bound() {
    let t = truth();
    let m = JointMixture::new(vec![t.clone(), alt()], None).unwrap();
    let p = m
        .error_profile(
            &t,
            8,
            ProfileMode::Exact {
                node_budget: DEFAULT_NODE_BUDGET,
            },
        )
        .unwrap();
    for step in &p.steps {
        assert!(step.s >= 0.0 && step.s <= 1.0);
        assert!(
            step.cum_s <= p.bounds.prediction + 1e-12,
            "n={}: cum_s {} > bound {}",
            step.n,
            step.cum_s,
            p.bounds.prediction
        );
    }
    // Truth-only class: identically zero.
    let only = JointMixture::new(vec![t.clone()], None).unwrap();
    let p0 = only
        .error_profile(
            &t,
            6,
            ProfileMode::Exact {
                node_budget: DEFAULT_NODE_BUDGET,
            },
        )
        .unwrap();
    assert!(p0.steps.iter().all(|s| s.s == 0.0));
}

#[test]
fn fixture_pairs_file_parses() {
    let pairs = parse_pairs(&load_fixture("formmeaning/pairs.txt"), &inventory()).unwrap();
    assert_eq!(pairs.len(), 16);
    let mut m = JointMixture::new(vec![truth(), alt()], None).unwrap();
    m.update_all(&pairs).unwrap();
    assert!(m.posterior().iter().all(|&w| w > 0.0));
}
