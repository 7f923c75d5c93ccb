//! Fixture loading plus re-exported brute-force oracles (see
//! `simplicity_core::oracles` for the enumeration code).

#![allow(dead_code)]
#![allow(unused_imports)]

use std::path::PathBuf;

use simplicity_core::grammar::{Grammar, Pcfg, Pfsg};

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn load_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).expect("fixture file")
}

pub fn load_grammar(rel: &str) -> Grammar {
    simplicity_core::parse_grammar(&load_fixture(rel)).expect("valid fixture grammar")
}

pub fn load_pfsg(rel: &str) -> Pfsg {
    match load_grammar(rel) {
        Grammar::Pfsg(g) => g,
        _ => panic!("expected a PFSG fixture"),
    }
}

pub fn load_pcfg(rel: &str) -> Pcfg {
    match load_grammar(rel) {
        Grammar::Pcfg(g) => g,
        _ => panic!("expected a PCFG fixture"),
    }
}

pub use simplicity_core::oracles::*;

/// One-sample chi-square p-value of observed category counts against exact
/// probabilities.
pub fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (o, p) in observed.iter().zip(probs.iter()) {
        let e = *p * n as f64;
        assert!(e > 0.0, "expected count must be positive");
        let d = *o as f64 - e;
        stat += d * d / e;
    }
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}
