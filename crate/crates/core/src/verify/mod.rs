//! The verification pipeline: hypotheses, predicted dimension, bound checks
//! on computed sums and exact eigenvalue recovery.

mod euler;
mod hypotheses;
mod recovery;

use serde::{Deserialize, Serialize};

pub use euler::{
    chi_from_point_counts, dimension_via_chi, euler_chain_with_sign, euler_singular_top_form,
    euler_singular_top_form_with_sign, euler_smooth_fiber, predicted_dimension, projective_point_counts, resolve_vanishing_sign, EulerChain,
    VANISHING_CYCLE_SIGN,
};
pub use hypotheses::{
    check_hypotheses, compare_arrangement, critical_locus_finite, split_into_lines, transversal_hyperplane,
    ArrangementComparison, CriticalLocus, HypothesisOptions, HypothesisReport, SingularPointRecord, Transversal, Verdict,
};
pub(crate) use recovery::recover_with;
pub use recovery::{
    elementary_from_power_sums, polynomial_roots, recover_eigenvalues, recurrence_holds, verify_bound, BoundCheck,
    EigenvalueRecovery, EmbeddingCheck, RecoveryStatus, BOUND_TOLERANCE, PURITY_TOLERANCE,
};

use crate::charsum::{char_sum, evaluation_count, extension_histograms, CharacterChoice, CycInt, TraceHistogram};
use crate::error::{Error, Result};
use crate::exec::ExecConfig;
use crate::ff::{FiniteField, GaloisField};
use crate::mpoly::MultiPoly;

pub const REPORT_SCHEMA: &str = "expsum-verification";
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub hypotheses: HypothesisOptions,
    /// Number of extension sums; defaults to `2D` (at least 1).
    pub m_max: Option<usize>,
    /// Character used for extension sums and recovery.
    pub character: u64,
    pub exec: ExecConfig,
    /// Recorded in the report when the input came from a seeded generator.
    pub seed: Option<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            hypotheses: HypothesisOptions::default(),
            m_max: None,
            character: 1,
            exec: ExecConfig::default(),
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRecord {
    pub b: u64,
    pub exact: CycInt,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl SumRecord {
    pub fn new(b: u64, exact: CycInt) -> Self {
        // the character is already folded into `exact`; embed with ζ = e^{2πi/p}
        let z = exact.numeric_value(1);
        SumRecord { b, re: z.re, im: z.im, abs: z.norm(), exact }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSum {
    pub m: usize,
    pub histogram: TraceHistogram,
    pub sum: SumRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u64,
    pub s: usize,
    pub q: u64,
    /// Modulus coefficients, constant term first.
    pub modulus: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    /// Extension degree the run aimed for.
    pub m_target: usize,
    pub m_computed: usize,
    /// First degree skipped for lack of budget, with its evaluation count.
    pub truncated_at: Option<(usize, u128)>,
    /// Degrees `m` whose sums were checked exactly against the recurrence.
    pub exact_terms: Vec<usize>,
    /// Degrees whose sums were only checked against the bound.
    pub bounded_terms: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub budget: u128,
    pub e_max: usize,
    pub m_max: Option<usize>,
    pub character: u64,
    pub seed: Option<u64>,
    pub vanishing_cycle_sign: i128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub version: u32,
    pub polynomial: String,
    pub field: FieldInfo,
    pub n: usize,
    pub degree: Option<u32>,
    pub hypotheses: HypothesisReport,
    pub predicted_dimension: Option<i128>,
    pub euler: Option<EulerChain>,
    /// `S(Ψ_b, f)` over the base field for every `b = 1..p-1`.
    pub s1: Vec<SumRecord>,
    pub extension_sums: Vec<ExtensionSum>,
    pub bound_checks: Vec<BoundCheck>,
    pub recovery: Option<EigenvalueRecovery>,
    pub arrangement: Option<ArrangementComparison>,
    pub coverage: Coverage,
    pub provenance: Provenance,
    /// Informational remarks; never affect [`VerificationReport::consistent`].
    pub notes: Vec<String>,
    /// Internal inconsistencies.
    pub findings: Vec<String>,
    pub consistent: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed report: {e}")))
    }
}

/// Largest `m ≥ 0` with `q^{mn}` within the budget.
fn budget_degree(q: u64, n: usize, budget: u128) -> usize {
    let mut m = 0;
    while m < 64 && evaluation_count(q, n * (m + 1)) <= budget {
        m += 1;
    }
    m
}

pub fn verify(f: &MultiPoly<GaloisField>, base: &GaloisField, opts: &VerifyOptions) -> Result<VerificationReport> {
    let p = base.prime();
    let n = f.nvars();
    let psi = CharacterChoice::new(p, opts.character)?;
    let hyp = check_hypotheses(f, base, &opts.hypotheses)?;
    let mut findings = Vec::new();
    let mut notes = Vec::new();
    notes.extend(hyp.reasons.iter().cloned());

    let mut predicted = None;
    let mut euler = None;
    if hyp.verdict.applies() {
        let mu = hyp.milnor_sum.expect("applicable verdict carries a Milnor sum");
        match predicted_dimension(hyp.d, n, mu) {
            Ok(dim) => predicted = Some(dim),
            Err(e) => findings.push(e.to_string()),
        }
        match dimension_via_chi(hyp.d, n, mu) {
            Ok(chain) => euler = Some(chain),
            Err(e) => findings.push(e.to_string()),
        }
        if hyp.verdict == Verdict::AppliesModuloHeuristic {
            notes.push("isolatedness of the singular points rests on point counts".into());
        }
    }
    for r in &hyp.points {
        if r.germ.milnor_orlik_agrees == Some(false) {
            notes.push(format!(
                "Milnor-Orlik product {} differs from μ = {} at {}",
                r.germ.milnor_orlik.as_deref().unwrap_or("?"),
                r.germ.milnor.map_or("?".to_string(), |m| m.to_string()),
                r.label
            ));
        }
    }

    let m_budget = budget_degree(base.order(), n, opts.exec.budget);
    let m_default = predicted.map_or(1, |d| (2 * d as usize).max(1));
    let m_target = opts.m_max.unwrap_or(m_default);
    let m_run = m_target.min(m_budget.max(1));
    let ext = extension_histograms(f, base, m_run, &opts.exec)?;
    let mut truncated_at = ext.truncated_at;
    if truncated_at.is_none() && m_run < m_target {
        truncated_at = Some((m_run + 1, evaluation_count(base.order(), n * (m_run + 1))));
    }
    if let Some((m, required)) = truncated_at {
        notes.push(format!("extension sums stop before m = {m}: {required} evaluations exceed the budget"));
    }
    let s1 = match ext.histograms.first() {
        Some(h) => (1..p).map(|b| SumRecord::new(b, char_sum(h, CharacterChoice::new(p, b).unwrap()))).collect(),
        None => Vec::new(),
    };
    let sums = ext.sums(psi);
    let extension_sums: Vec<ExtensionSum> = ext
        .histograms
        .iter()
        .zip(&sums)
        .map(|(h, s)| ExtensionSum { m: h.m, histogram: h.clone(), sum: SumRecord::new(psi.index(), s.clone()) })
        .collect();

    let mut bound_checks = Vec::new();
    let mut recovery = None;
    let mut exact_terms = Vec::new();
    let mut bounded_terms = Vec::new();
    if let Some(dim) = predicted {
        bound_checks = verify_bound(&sums, dim as u64, base.order(), n);
        for c in bound_checks.iter().filter(|c| !c.holds) {
            findings.push(format!(
                "bound violated at m = {}: |S_m| = {:.6} exceeds D q^(mn/2) = {:.6}",
                c.m, c.max_abs, c.bound
            ));
        }
        let rec = recover_eigenvalues(&sums, dim as usize, base.order(), n);
        match rec.status {
            RecoveryStatus::Verified => {}
            RecoveryStatus::InsufficientTerms => notes.push(format!(
                "eigenvalue recovery needs {} extension sums, only {} computed",
                dim + 1,
                sums.len()
            )),
            RecoveryStatus::DimensionInconsistent => {
                findings.push(format!("dimension D = {dim} inconsistent with sums"))
            }
            RecoveryStatus::Impure => findings.push("a recovered eigenvalue has modulus other than q^(n/2)".into()),
        }
        if !matches!(rec.status, RecoveryStatus::InsufficientTerms) && !rec.galois_consistent && rec.newton_exact
            && rec.recurrence_verified {
                findings.push("root moduli differ between embeddings".into());
            }
        let sums_len = sums.len();
        if rec.recurrence_verified {
            exact_terms = (1..=sums_len).collect();
        } else {
            bounded_terms = (1..=sums_len).collect();
        }
        recovery = Some(rec);
    } else if hyp.verdict == Verdict::NotApplicable {
        notes.push("eigenvalue recovery refused: the input lies outside the theorem's scope".into());
    }

    let mut arrangement = None;
    if n == 3 && hyp.d >= 2 {
        let top = f.homogeneous_part(hyp.d);
        if let Some(lines) = split_into_lines(&top, base)? {
            let cmp = compare_arrangement(&lines, base, hyp.milnor_sum)?;
            if let Some(computed) = cmp.computed_milnor_sum {
                if computed != cmp.incidence_milnor_sum {
                    findings.push(format!(
                        "germ Milnor sum {computed} differs from the ordinary multiple point count {}",
                        cmp.incidence_milnor_sum
                    ));
                }
            }
            if let Some(flag) = &cmp.flag {
                notes.push(flag.clone());
            }
            arrangement = Some(cmp);
        }
    }

    let consistent = findings.is_empty();
    Ok(VerificationReport {
        schema: REPORT_SCHEMA.to_string(),
        version: REPORT_VERSION,
        polynomial: f.to_string(),
        field: FieldInfo { p, s: base.degree(), q: base.order(), modulus: base.descriptor().modulus.clone() },
        n,
        degree: f.degree(),
        hypotheses: hyp,
        predicted_dimension: predicted,
        euler,
        s1,
        extension_sums,
        bound_checks,
        recovery,
        arrangement,
        coverage: Coverage { m_target, m_computed: sums.len(), truncated_at, exact_terms, bounded_terms },
        provenance: Provenance {
            budget: opts.exec.budget,
            e_max: opts.hypotheses.search.e_max,
            m_max: opts.m_max,
            character: psi.index(),
            seed: opts.seed,
            vanishing_cycle_sign: VANISHING_CYCLE_SIGN,
        },
        notes,
        findings,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;
    use crate::mpoly::parse;

    fn run(p: u64, n: usize, text: &str, m_max: Option<usize>) -> VerificationReport {
        let k = build_field(p, 1).unwrap();
        let f = parse(text, n, &k).unwrap();
        verify(&f, &k, &VerifyOptions { m_max, ..Default::default() }).unwrap()
    }

    #[test]
    fn quadratic_one_variable() {
        let r = run(5, 1, "x1^2", None);
        assert_eq!(r.predicted_dimension, Some(1));
        let rec = r.recovery.as_ref().unwrap();
        assert_eq!(rec.status, RecoveryStatus::Verified);
        assert!(r.consistent, "{:?}", r.findings);
        assert!((r.s1[0].abs - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn smooth_cubic_binary() {
        let r = run(7, 2, "x1^3 + x2^3 + x1", Some(2));
        assert_eq!(r.hypotheses.verdict, Verdict::Applies);
        assert_eq!(r.predicted_dimension, Some(4));
        assert_eq!(r.coverage.m_computed, 2);
        assert_eq!(r.recovery.as_ref().unwrap().status, RecoveryStatus::InsufficientTerms);
        assert!(r.bound_checks.iter().all(|c| c.holds));
        assert!(r.consistent, "{:?}", r.findings);
    }

    #[test]
    fn negative_verdict_is_consistent() {
        let r = run(3, 2, "x1^4 + x2^3", None);
        assert_eq!(r.hypotheses.verdict, Verdict::DoesNotApply);
        assert!(r.consistent);
        assert!(r.recovery.is_none());
        assert_eq!(r.s1.len(), 2);
    }

    #[test]
    fn zero_polynomial() {
        let r = run(5, 2, "0", None);
        assert_eq!(r.hypotheses.verdict, Verdict::NotApplicable);
        assert_eq!(r.s1[0].exact.as_integer().unwrap(), &25.into());
        assert!(r.recovery.is_none());
    }

    #[test]
    fn json_round_trip() {
        let r = run(5, 1, "x1^3 + x1", None);
        let text = r.to_json();
        let back = VerificationReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn triangle_flags_example() {
        let k = build_field(7, 1).unwrap();
        let f = parse("x1*x2*x3 + x1^2 + x2^2 + x3^2", 3, &k).unwrap();
        let opts = VerifyOptions { m_max: Some(1), ..Default::default() };
        let r = verify(&f, &k, &opts).unwrap();
        assert_eq!(r.hypotheses.milnor_sum, Some(3));
        assert_eq!(r.predicted_dimension, Some(5));
        let a = r.arrangement.unwrap();
        assert!(a.flag.unwrap().starts_with("example formula disagrees"));
        assert!(r.consistent);
    }
}
