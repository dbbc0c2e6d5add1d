//! Embedded oracle suite run by the `selftest` subcommand.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::charsum::{char_sum, extension_sums, histogram_over, CharacterChoice, CycInt};
use crate::error::Result;
use crate::exec::ExecConfig;
use crate::ff::{build_field, GaloisField};
use crate::mpoly::{parse, MultiPoly};
use crate::singular::{analyze_germ, milnor_orlik};
use crate::verify::{
    chi_from_point_counts, euler_chain_with_sign, euler_singular_top_form_with_sign,
    predicted_dimension, projective_point_counts, recover_with, RecoveryStatus, VANISHING_CYCLE_SIGN,
};

/// Deliberate defects used to check that the oracles can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    FlipVanishingSign,
    CorruptNewton,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn outcome(name: &str, passed: bool, detail: String) -> OracleOutcome {
    OracleOutcome { name: name.to_string(), passed, detail }
}

fn poly(text: &str, n: usize, k: &GaloisField) -> MultiPoly<GaloisField> {
    parse(text, n, k).expect("oracle polynomial parses")
}

fn gauss_sums() -> Result<OracleOutcome> {
    let mut detail = Vec::new();
    let mut ok = true;
    for p in [5u64, 7, 13] {
        let k = build_field(p, 1)?;
        let h = histogram_over(&poly("x1^2", 1, &k), &k, &ExecConfig::sequential())?;
        let s = char_sum(&h, CharacterChoice::new(p, 1)?);
        // g^2 = (-1/p) p
        let sign: i64 = if p % 4 == 1 { 1 } else { -1 };
        let exact = s.mul(&s) == CycInt::from_int(p, sign * p as i64);
        let abs = s.numeric_value(1).norm();
        let close = (abs - (p as f64).sqrt()).abs() < 1e-9;
        ok &= exact && close;
        detail.push(format!("p={p} |S|={abs:.12}"));
    }
    Ok(outcome("gauss-sums", ok, detail.join(", ")))
}

fn hasse_davenport(mutation: Mutation) -> Result<OracleOutcome> {
    let k = build_field(5, 1)?;
    let f = poly("x1^2", 1, &k);
    let (sums, _) = extension_sums(&f, &k, 3, CharacterChoice::new(5, 1)?, &ExecConfig::sequential())?;
    // -S_m = (-S_1)^m
    let lifted = (1..=3).all(|m| sums[m - 1].neg() == sums[0].neg().pow(m as u32));
    let rec = recover_with(&sums, 1, 5, 1, mutation == Mutation::CorruptNewton);
    let ok = lifted && rec.status == RecoveryStatus::Verified;
    Ok(outcome("hasse-davenport", ok, format!("lift relation {lifted}, recovery {:?}", rec.status)))
}

fn euler_sign(mutation: Mutation) -> Result<OracleOutcome> {
    let sigma = match mutation {
        Mutation::FlipVanishingSign => -VANISHING_CYCLE_SIGN,
        _ => VANISHING_CYCLE_SIGN,
    };
    let k = build_field(5, 1)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, text, mu) in [("nodal cubic", "x2^2*x3 - x1^3 - x1^2*x3", 1u64), ("triangle", "x1*x2*x3", 3)] {
        let counts = projective_point_counts(&poly(text, 3, &k), &k, 3)?;
        let chi = chi_from_point_counts(5, &counts);
        let formula = euler_singular_top_form_with_sign(3, 3, mu, sigma);
        ok &= chi == Some(formula);
        detail.push(format!("{name}: counts {counts:?}, χ = {chi:?}, formula {formula}"));
    }
    for d in 2..=6u32 {
        for n in 1..=4usize {
            let top = (d as u64 - 1).pow(n as u32);
            for mu in 0..top {
                let chain = euler_chain_with_sign(d, n, mu, sigma);
                if Some(chain.dimension) != predicted_dimension(d, n, mu).ok() {
                    ok = false;
                }
            }
        }
    }
    Ok(outcome("euler-sign", ok, format!("σ = {sigma}; {}", detail.join("; "))))
}

fn milnor_cross_checks() -> Result<OracleOutcome> {
    let k = build_field(7, 1)?;
    let mut cases = vec![("x1*x2".to_string(), 1u64), ("x1^3 + x2^2".to_string(), 2)];
    for i in 2..=5u64 {
        cases.push((format!("x1^{i} + x2^{i}"), (i - 1) * (i - 1)));
    }
    let mut ok = true;
    let mut detail = Vec::new();
    for (text, expected) in &cases {
        let g = analyze_germ(&poly(text, 2, &k))?;
        let orlik = g.weights.as_ref().map(milnor_orlik);
        let agrees = g.milnor == Some(*expected) && orlik == Some(BigInt::from(*expected).into());
        ok &= agrees;
        detail.push(format!("μ({text}) = {:?}", g.milnor));
    }
    Ok(outcome("milnor", ok, detail.join(", ")))
}

/// Runs every oracle; `mutation` injects a known defect.
pub fn run_selftest(mutation: Mutation) -> Result<Vec<OracleOutcome>> {
    Ok(vec![gauss_sums()?, hasse_davenport(mutation)?, euler_sign(mutation)?, milnor_cross_checks()?])
}
