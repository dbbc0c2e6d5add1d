//! Seeded families of test polynomials and the tables produced by running
//! the verifier over them.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecConfig;
use crate::ff::{build_field, Field, FiniteField, GaloisField};
use crate::mpoly::{Monomial, MultiPoly};
use crate::singular::SearchOptions;
use crate::verify::{compare_arrangement, verify, HypothesisOptions, VerificationReport, VerifyOptions};

pub const SWEEP_SCHEMA: &str = "expsum-sweep/1";

/// Attempts allowed when rejection sampling a family member.
const MAX_ATTEMPTS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    BinaryForms,
    LineArrangements,
    SmoothFermat,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary-forms" => Ok(Preset::BinaryForms),
            "line-arrangements" => Ok(Preset::LineArrangements),
            "smooth-fermat" => Ok(Preset::SmoothFermat),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset {other:?}; expected binary-forms, line-arrangements or smooth-fermat"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::BinaryForms => "binary-forms",
            Preset::LineArrangements => "line-arrangements",
            Preset::SmoothFermat => "smooth-fermat",
        })
    }
}

/// Incidence pattern of a line arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    /// Only double points.
    Generic,
    /// `k` lines through one point, all other intersections double.
    Pencil(u32),
}

impl FromStr for Incidence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "generic" {
            return Ok(Incidence::Generic);
        }
        s.strip_prefix("pencil:")
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 3)
            .map(Incidence::Pencil)
            .ok_or_else(|| Error::InvalidArgument(format!("incidence must be `generic` or `pencil:k` with k >= 3, got {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub preset: Preset,
    pub degrees: Vec<u32>,
    pub primes: Vec<u64>,
    /// Number of variables for `smooth-fermat`.
    pub n: usize,
    /// Root multiplicities for `binary-forms`; defaults to `(2, 1, …, 1)`.
    pub multiplicities: Option<Vec<u32>>,
    pub incidence: Incidence,
    /// Cases per `(d, p)`.
    pub count: usize,
    pub seed: u64,
    pub m_max: Option<usize>,
    pub e_max: usize,
    pub exec: ExecConfig,
}

impl SweepConfig {
    pub fn new(preset: Preset) -> Self {
        SweepConfig {
            preset,
            degrees: vec![3],
            primes: vec![5],
            n: 2,
            multiplicities: None,
            incidence: Incidence::Generic,
            count: 1,
            seed: 0,
            m_max: None,
            e_max: 6,
            exec: ExecConfig::default(),
        }
    }
}

fn monomials(n: usize, deg: u32) -> Vec<Monomial> {
    fn rec(n: usize, deg: u32, prefix: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(deg as u16);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e as u16);
            rec(n, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, deg, &mut Vec::new(), &mut out);
    }
    out
}

fn random_form(rng: &mut ChaCha8Rng, k: &GaloisField, n: usize, deg: u32) -> MultiPoly<GaloisField> {
    let q = k.order();
    MultiPoly::from_terms(k, n, monomials(n, deg).into_iter().map(|m| (m.exponents().to_vec(), k.element_at(rng.gen_range(0..q)))))
}

/// Random terms of every degree below `d`.
fn random_lower(rng: &mut ChaCha8Rng, k: &GaloisField, n: usize, d: u32) -> MultiPoly<GaloisField> {
    (0..d).fold(MultiPoly::zero(k, n), |acc, e| acc.add(&random_form(rng, k, n, e)))
}

fn nonzero(rng: &mut ChaCha8Rng, k: &GaloisField) -> <GaloisField as Field>::Elem {
    k.element_at(rng.gen_range(1..k.order()))
}

fn linear(k: &GaloisField, c: &[<GaloisField as Field>::Elem]) -> MultiPoly<GaloisField> {
    (0..c.len()).fold(MultiPoly::zero(k, c.len()), |acc, j| acc.add(&MultiPoly::var(k, c.len(), j).scale(&c[j])))
}

/// `c · Π l_i^{k_i}` for distinct rational roots `l_i`, plus random lower
/// terms whose degree `d - 1` part misses every multiple root.
pub fn binary_form(rng: &mut ChaCha8Rng, k: &GaloisField, multiplicities: &[u32]) -> Result<MultiPoly<GaloisField>> {
    let d: u32 = multiplicities.iter().sum();
    let q = k.order();
    if multiplicities.is_empty() || multiplicities.contains(&0) || multiplicities.len() as u64 > q + 1 {
        return Err(Error::InvalidArgument(format!(
            "need between 1 and {} positive multiplicities, got {multiplicities:?}",
            q + 1
        )));
    }
    // points (1:a) for a in F_q and (0:1), indexed 0..=q
    let mut idx: Vec<u64> = (0..=q).collect();
    for _ in 0..MAX_ATTEMPTS {
        idx.shuffle(rng);
        let roots: Vec<[<GaloisField as Field>::Elem; 2]> =
            idx[..multiplicities.len()].iter().map(|&i| if i == q { [k.zero(), k.one()] } else { [k.one(), k.element_at(i)] }).collect();
        let mut top = MultiPoly::constant(k, 2, nonzero(rng, k));
        for (r, &m) in roots.iter().zip(multiplicities) {
            // b x1 - a x2 vanishes at (a:b)
            let l = linear(k, &[r[1].clone(), k.neg(&r[0])]);
            top = top.mul(&l.pow(m)?);
        }
        let lower = random_lower(rng, k, 2, d);
        let sub = lower.homogeneous_part(d - 1);
        let misses = roots
            .iter()
            .zip(multiplicities)
            .filter(|(_, &m)| m >= 2)
            .all(|(r, _)| !k.is_zero(&sub.evaluate(r).expect("arity matches")));
        if misses {
            return Ok(top.add(&lower));
        }
    }
    Err(Error::InvalidArgument("could not place the lower terms off the multiple roots".into()))
}

/// A product of `d` distinct lines over `F_q` with the requested incidence,
/// plus random lower terms whose degree `d - 1` part misses every multiple
/// point.
pub fn line_arrangement(rng: &mut ChaCha8Rng, k: &GaloisField, d: u32, incidence: Incidence) -> Result<MultiPoly<GaloisField>> {
    let q = k.order();
    let random_line = |rng: &mut ChaCha8Rng| loop {
        let c: Vec<_> = (0..3).map(|_| k.element_at(rng.gen_range(0..q))).collect();
        if c.iter().any(|x| !k.is_zero(x)) {
            return c;
        }
    };
    for _ in 0..MAX_ATTEMPTS {
        let mut coeffs: Vec<Vec<_>> = Vec::new();
        let pencil = match incidence {
            Incidence::Pencil(kk) if kk > d => {
                return Err(Error::InvalidArgument(format!("a pencil of {kk} lines needs d >= {kk}")))
            }
            Incidence::Pencil(kk) => kk as usize,
            Incidence::Generic => 0,
        };
        if pencil > 0 {
            // lines through a random point: c · P = 0
            let pt = random_line(rng);
            while coeffs.len() < pencil {
                let c = random_line(rng);
                let dot = (0..3).fold(k.zero(), |acc, j| k.add(&acc, &k.mul(&c[j], &pt[j])));
                if k.is_zero(&dot) {
                    coeffs.push(c);
                }
            }
        }
        while coeffs.len() < d as usize {
            coeffs.push(random_line(rng));
        }
        let lines: Vec<MultiPoly<GaloisField>> = coeffs.iter().map(|c| linear(k, c).monic()).collect();
        if (0..lines.len()).any(|i| lines[i + 1..].contains(&lines[i])) {
            continue;
        }
        let cmp = compare_arrangement(&lines, k, None)?;
        let ok = match incidence {
            Incidence::Generic => cmp.generic,
            Incidence::Pencil(kk) => {
                cmp.incidences.get(&(kk as u64)) == Some(&1)
                    && cmp.incidences.keys().all(|&i| i == 2 || i == kk as u64)
            }
        };
        if !ok {
            continue;
        }
        let top = lines.iter().fold(MultiPoly::one(k, 3), |acc, l| acc.mul(l));
        for _ in 0..64 {
            let lower = random_lower(rng, k, 3, d);
            let sub = lower.homogeneous_part(d - 1);
            if intersection_points(&coeffs, k).iter().all(|pt| !k.is_zero(&sub.evaluate(pt).expect("arity matches"))) {
                return Ok(top.add(&lower));
            }
        }
    }
    Err(Error::InvalidArgument(format!("no arrangement of {d} lines with incidence {incidence:?} found over F_{q}")))
}

fn intersection_points(
    coeffs: &[Vec<<GaloisField as Field>::Elem>],
    k: &GaloisField,
) -> Vec<Vec<<GaloisField as Field>::Elem>> {
    let mut out = Vec::new();
    for (i, a) in coeffs.iter().enumerate() {
        for b in &coeffs[i + 1..] {
            let cross = vec![
                k.sub(&k.mul(&a[1], &b[2]), &k.mul(&a[2], &b[1])),
                k.sub(&k.mul(&a[2], &b[0]), &k.mul(&a[0], &b[2])),
                k.sub(&k.mul(&a[0], &b[1]), &k.mul(&a[1], &b[0])),
            ];
            if cross.iter().any(|x| !k.is_zero(x)) {
                out.push(cross);
            }
        }
    }
    out
}

/// `x_1^d + … + x_n^d`, plus random lower terms when `perturb` is set.
pub fn fermat(rng: &mut ChaCha8Rng, k: &GaloisField, n: usize, d: u32, perturb: bool) -> MultiPoly<GaloisField> {
    let top = (0..n).fold(MultiPoly::zero(k, n), |acc, j| {
        acc.add(&MultiPoly::var(k, n, j).pow(d).expect("small exponent"))
    });
    if perturb {
        top.add(&random_lower(rng, k, n, d))
    } else {
        top
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema: String,
    pub preset: String,
    pub seed: u64,
    pub case: usize,
    pub p: u64,
    pub n: usize,
    pub d: u32,
    pub polynomial: String,
    /// `label:mu=μ:delta=δ` entries separated by `;`.
    pub singular_points: String,
    pub milnor_sum: Option<u64>,
    pub verdict: String,
    pub d_predicted: Option<i128>,
    pub s1_abs: Option<f64>,
    pub bound_ratio_max: Option<f64>,
    pub m_computed: usize,
    pub recovery_status: String,
    /// `Σ n_i (i-1)` for line arrangements.
    pub example_formula_value: Option<u64>,
    pub consistent: bool,
}

impl SweepRow {
    fn from_report(cfg: &SweepConfig, case: usize, r: &VerificationReport) -> Self {
        let singular_points = r
            .hypotheses
            .points
            .iter()
            .map(|pt| {
                let mu = pt.germ.milnor.map_or("?".to_string(), |m| m.to_string());
                let delta = pt.germ.weights.as_ref().map_or("?".to_string(), |w| w.delta.to_string());
                format!("{}:mu={mu}:delta={delta}", pt.label)
            })
            .collect::<Vec<_>>()
            .join(";");
        let bound_ratio_max = r.bound_checks.iter().filter_map(|c| c.ratio).reduce(f64::max);
        let recovery_status = r.recovery.as_ref().map_or("not_run".to_string(), |rec| {
            serde_json::to_value(rec.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
        });
        SweepRow {
            schema: SWEEP_SCHEMA.to_string(),
            preset: cfg.preset.to_string(),
            seed: cfg.seed,
            case,
            p: r.field.p,
            n: r.n,
            d: r.hypotheses.d,
            polynomial: r.polynomial.clone(),
            singular_points,
            milnor_sum: r.hypotheses.milnor_sum,
            verdict: r.hypotheses.verdict.to_string(),
            d_predicted: r.predicted_dimension,
            s1_abs: r.s1.first().map(|s| s.abs),
            bound_ratio_max,
            m_computed: r.coverage.m_computed,
            recovery_status,
            example_formula_value: r.arrangement.as_ref().map(|a| a.example_formula_value),
            consistent: r.consistent,
        }
    }
}

/// The family members a sweep would verify, in row order.
pub fn generate_cases(cfg: &SweepConfig) -> Result<Vec<(GaloisField, MultiPoly<GaloisField>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for &p in &cfg.primes {
        let k = build_field(p, 1)?;
        for &d in &cfg.degrees {
            if d < 2 {
                return Err(Error::InvalidArgument(format!("degree must be at least 2, got {d}")));
            }
            for i in 0..cfg.count {
                let f = match cfg.preset {
                    Preset::BinaryForms => {
                        let mults = match &cfg.multiplicities {
                            Some(m) => m.clone(),
                            None => std::iter::once(2).chain(std::iter::repeat_n(1, d as usize - 2)).collect(),
                        };
                        if mults.iter().sum::<u32>() != d {
                            return Err(Error::InvalidArgument(format!("multiplicities {mults:?} do not sum to d = {d}")));
                        }
                        binary_form(&mut rng, &k, &mults)?
                    }
                    Preset::LineArrangements => line_arrangement(&mut rng, &k, d, cfg.incidence)?,
                    Preset::SmoothFermat => fermat(&mut rng, &k, cfg.n, d, i > 0),
                };
                out.push((k.clone(), f));
            }
        }
    }
    Ok(out)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let opts = VerifyOptions {
        hypotheses: HypothesisOptions {
            search: SearchOptions { e_max: cfg.e_max, ..Default::default() },
            diagnostics: false,
            ..Default::default()
        },
        m_max: cfg.m_max,
        character: 1,
        exec: cfg.exec.clone(),
        seed: Some(cfg.seed),
    };
    generate_cases(cfg)?
        .iter()
        .enumerate()
        .map(|(i, (k, f))| Ok(SweepRow::from_report(cfg, i, &verify(f, k, &opts)?)))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(preset: Preset, d: u32, p: u64) -> SweepConfig {
        SweepConfig { degrees: vec![d], primes: vec![p], m_max: Some(1), ..SweepConfig::new(preset) }
    }

    #[test]
    fn binary_forms_rows() {
        let rows = run_sweep(&SweepConfig { count: 3, ..cfg(Preset::BinaryForms, 3, 5) }).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.d_predicted, Some(3), "{r:?}");
            assert_eq!(r.milnor_sum, Some(1));
            assert!(r.consistent);
        }
    }

    #[test]
    fn triangle_rows() {
        let rows = run_sweep(&cfg(Preset::LineArrangements, 3, 7)).unwrap();
        assert_eq!(rows[0].milnor_sum, Some(3));
        assert_eq!(rows[0].d_predicted, Some(5));
        assert_eq!(rows[0].example_formula_value, Some(3));
    }

    #[test]
    fn pencil_arrangement() {
        let c = SweepConfig { incidence: Incidence::Pencil(3), ..cfg(Preset::LineArrangements, 4, 7) };
        let rows = run_sweep(&c).unwrap();
        // one triple point (μ = 4) and three double points
        assert_eq!(rows[0].milnor_sum, Some(7));
        assert_eq!(rows[0].d_predicted, Some(20));
    }

    #[test]
    fn fermat_rows() {
        let rows = run_sweep(&SweepConfig { count: 2, ..cfg(Preset::SmoothFermat, 3, 7) }).unwrap();
        assert_eq!(rows[0].polynomial, "x1^3 + x2^3");
        assert!(rows.iter().all(|r| r.d_predicted == Some(4)));
    }

    #[test]
    fn seeded_and_csv() {
        let c = SweepConfig { count: 2, seed: 17, ..cfg(Preset::BinaryForms, 4, 7) };
        let a = run_sweep(&c).unwrap();
        assert_eq!(a, run_sweep(&c).unwrap());
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("schema,preset,seed,case,p,n,d,polynomial"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn infeasible_parameters() {
        let c = SweepConfig { multiplicities: Some(vec![2, 2]), ..cfg(Preset::BinaryForms, 3, 5) };
        assert!(run_sweep(&c).is_err());
        let c = SweepConfig { incidence: Incidence::Pencil(5), ..cfg(Preset::LineArrangements, 4, 7) };
        assert!(run_sweep(&c).is_err());
        assert!("pencil:2".parse::<Incidence>().is_err());
        assert!("bogus".parse::<Preset>().is_err());
    }
}
