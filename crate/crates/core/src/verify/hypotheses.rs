use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{build_field, Field, FieldElement, FiniteField, GaloisField, ZechField};
use crate::mpoly::linalg::inverse;
use crate::mpoly::{extend_scalars, groebner_basis, MultiPoly};
use crate::singular::{
    germ_at, is_isolated, singular_points, GermData, Isolation, ProjectivePoint, SearchOptions, SingularSearch,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Applies,
    /// All hypotheses hold but isolatedness rests on point counts.
    AppliesModuloHeuristic,
    DoesNotApply,
    /// Degenerate input (constant or linear `f`).
    NotApplicable,
}

impl Verdict {
    pub fn applies(self) -> bool {
        matches!(self, Verdict::Applies | Verdict::AppliesModuloHeuristic)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Applies => "theorem applies",
            Verdict::AppliesModuloHeuristic => "applies modulo heuristic certification",
            Verdict::DoesNotApply => "theorem does not apply",
            Verdict::NotApplicable => "not applicable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPointRecord {
    pub point: ProjectivePoint,
    pub label: String,
    pub germ: GermData,
    /// `f_{d-1}` at the point.
    pub lower_form_value: String,
    pub on_lower_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalLocus {
    /// Exact answer from a Gröbner basis of the partials (small `n`).
    pub exact: Option<bool>,
    /// Critical points in `A^n(F_{q^e})` for the levels that were counted.
    pub counts: Vec<u64>,
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    pub e: usize,
    /// Coefficients `c` of the hyperplane `Σ c_i x_i = 0` over `F_{q^e}`.
    pub hyperplane: Vec<FieldElement>,
    /// Invertible `A` with last row `c`; `y = A x` sends the hyperplane to
    /// `y_n = 0`.
    pub matrix: Vec<Vec<FieldElement>>,
    /// The top form restricted to the hyperplane.
    pub restricted: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub p: u64,
    pub s: usize,
    pub q: u64,
    pub d: u32,
    pub n: usize,
    pub top_form: String,
    pub lower_form: String,
    pub search: Option<SingularSearch>,
    pub isolation: Option<Isolation>,
    pub points: Vec<SingularPointRecord>,
    /// `Σ μ_i` over geometric points.
    pub milnor_sum: Option<u64>,
    /// Isolated weighted homogeneous singularities.
    pub h1: Option<bool>,
    /// No singular point on `X_f^{d-1}`.
    pub h2: Option<bool>,
    /// `gcd(p, d(d-1)Π δ_i) = 1`.
    pub h3: bool,
    pub critical_locus: Option<CriticalLocus>,
    pub transversal: Option<Transversal>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl HypothesisReport {
    /// `μ_i` repeated once per geometric point.
    pub fn geometric_milnor_list(&self) -> Option<Vec<u64>> {
        let mut out = Vec::new();
        for r in &self.points {
            let mu = r.germ.milnor?;
            out.extend(std::iter::repeat_n(mu, r.point.e));
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisOptions {
    pub search: SearchOptions,
    /// Whether to run the critical-locus and transversality diagnostics.
    pub diagnostics: bool,
    /// Largest `A^n(F_{q^e})` enumerated when counting critical points.
    pub critical_count_limit: u64,
    /// Hyperplanes tried per extension degree.
    pub transversal_candidates: usize,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions {
            search: SearchOptions::default(),
            diagnostics: true,
            critical_count_limit: 1 << 20,
            transversal_candidates: 512,
        }
    }
}

pub fn check_hypotheses(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    let p = base.prime();
    let n = f.nvars();
    let d = f.degree().unwrap_or(0);
    let top = f.homogeneous_part(d);
    let lower = if d > 0 { f.homogeneous_part(d - 1) } else { MultiPoly::zero(base, n) };
    let mut report = HypothesisReport {
        p,
        s: base.degree(),
        q: base.order(),
        d,
        n,
        top_form: top.to_string(),
        lower_form: lower.to_string(),
        search: None,
        isolation: None,
        points: Vec::new(),
        milnor_sum: None,
        h1: None,
        h2: None,
        h3: false,
        critical_locus: None,
        transversal: None,
        verdict: Verdict::NotApplicable,
        reasons: Vec::new(),
    };
    if f.is_zero() || d < 2 || n == 0 {
        report.reasons.push(format!("degree {} is below 2; the character sum is degenerate", d));
        return Ok(report);
    }
    if opts.diagnostics {
        report.critical_locus = Some(critical_locus_finite(f, base, opts.search.e_max, opts.critical_count_limit)?);
        report.transversal = transversal_hyperplane(&top, base, opts.search.e_max, opts.transversal_candidates)?;
    }
    let d_part = d as u64 * (d as u64 - 1);
    if (d as u64).gcd(&p) != 1 {
        report.reasons.push(format!("p = {p} divides d = {d}"));
        report.verdict = Verdict::DoesNotApply;
        return Ok(report);
    }
    let search = singular_points(&top, base, &opts.search)?;
    let isolation = is_isolated(&top, base, &search)?;
    let mut gcd_acc = d_part.gcd(&p);
    let mut all_wh = true;
    let mut h2 = true;
    let mut mu_sum = Some(0u64);
    for pt in &search.points {
        let germ = germ_at(&top, base, pt)?;
        let ext = pt.field(base)?;
        let lower_ext = extend_scalars(&lower, base, &ext)?;
        let value = lower_ext.evaluate(&pt.coords)?;
        let on_lower = ext.is_zero(&value);
        h2 &= !on_lower;
        match &germ.weights {
            Some(w) => gcd_acc = gcd_acc.max(w.delta.gcd(&p)),
            None => all_wh = false,
        }
        if germ.milnor.is_none() {
            all_wh = false;
        }
        mu_sum = match (mu_sum, germ.milnor) {
            (Some(acc), Some(mu)) => Some(acc + mu * pt.e as u64),
            _ => None,
        };
        report.points.push(SingularPointRecord {
            label: pt.to_string(),
            point: pt.clone(),
            germ,
            lower_form_value: ext.render(&value),
            on_lower_form: on_lower,
        });
    }
    let isolated = matches!(isolation, Isolation::Certified | Isolation::Heuristic);
    let h1 = isolated && all_wh;
    let h3 = gcd_acc == 1;
    if !isolated {
        report.reasons.push(match isolation {
            Isolation::NonIsolated => "the singular locus of the top form is not finite".to_string(),
            _ => "isolatedness could not be decided".to_string(),
        });
    } else if !all_wh {
        report.reasons.push("a singular point has no weighted homogeneous isolated local equation".into());
    }
    if !h2 {
        report.reasons.push("a singular point lies on the hypersurface of the degree d-1 component".into());
    }
    if !h3 {
        report.reasons.push(format!("p = {p} divides d(d-1) times the product of the weighted degrees"));
    }
    report.milnor_sum = if h1 { mu_sum } else { None };
    report.h1 = Some(h1);
    report.h2 = Some(h2);
    report.h3 = h3;
    report.verdict = if h1 && h2 && h3 {
        if isolation == Isolation::Heuristic {
            Verdict::AppliesModuloHeuristic
        } else {
            Verdict::Applies
        }
    } else {
        Verdict::DoesNotApply
    };
    report.isolation = Some(isolation);
    report.search = Some(search);
    Ok(report)
}

/// Whether `f: A^n → A^1` has finitely many critical points. Exact through
/// a Gröbner basis of the partials for `n ≤ 3`; point counts over
/// `F_{q^e}` are reported in every case.
pub fn critical_locus_finite(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    e_max: usize,
    count_limit: u64,
) -> Result<CriticalLocus> {
    let n = f.nvars();
    let partials = f.gradient();
    let exact = if n <= 3 {
        let gb = groebner_basis(&partials)?;
        Some(gb.is_unit_ideal() || gb.is_zero_dimensional())
    } else {
        None
    };
    let mut counts = Vec::new();
    for e in 1..=e_max {
        let ext = match build_field(base.prime(), base.degree() * e) {
            Ok(x) if ZechField::supports(&x) => x,
            Ok(_) | Err(Error::FieldTooLarge { .. }) => break,
            Err(err) => return Err(err),
        };
        let total = (ext.order() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > count_limit as u128 {
            break;
        }
        let z = ZechField::new(&ext)?;
        let lifted: Vec<MultiPoly<ZechField>> =
            partials.iter().map(|g| extend_scalars(g, base, &z)).collect::<Result<_>>()?;
        let q = z.order();
        let mut count = 0u64;
        let mut pt = vec![z.zero(); n];
        for idx in 0..total as u64 {
            let mut rest = idx;
            for x in pt.iter_mut() {
                *x = z.element_at(rest % q);
                rest /= q;
            }
            if lifted.iter().all(|g| g.evaluate(&pt).map(|v| z.is_zero(&v)).unwrap_or(false)) {
                count += 1;
            }
        }
        counts.push(count);
    }
    let finite = match exact {
        Some(x) => x,
        None => !(counts.len() >= 2 && counts.windows(2).all(|w| w[1] > w[0])),
    };
    Ok(CriticalLocus { exact, counts, finite })
}

/// `h` defines a smooth hypersurface: `(h, ∂h)` is the unit ideal in every
/// affine chart.
fn is_smooth_form<F: Field>(h: &MultiPoly<F>) -> Result<bool> {
    let k = h.nvars();
    if h.is_zero() {
        return Ok(false);
    }
    if k <= 1 {
        return Ok(true);
    }
    let field = h.field();
    let mut gens = vec![h.clone()];
    gens.extend(h.gradient());
    for i in 0..k {
        let mut point = vec![field.zero(); k];
        point[i] = field.one();
        let chart: Vec<MultiPoly<F>> = gens.iter().map(|g| g.dehomogenize_translate(&point)).collect::<Result<_>>()?;
        if !groebner_basis(&chart)?.is_unit_ideal() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First hyperplane (in canonical enumeration order, over the smallest
/// possible `F_{q^e}`) meeting `{top = 0}` in a smooth hypersurface.
pub fn transversal_hyperplane(
    top: &MultiPoly<GaloisField>,
    base: &GaloisField,
    e_max: usize,
    candidates: usize,
) -> Result<Option<Transversal>> {
    let n = top.nvars();
    if n < 2 {
        return Ok(None);
    }
    for e in 1..=e_max {
        let ext = match build_field(base.prime(), base.degree() * e) {
            Ok(x) => x,
            Err(Error::FieldTooLarge { .. }) => break,
            Err(err) => return Err(err),
        };
        let lifted = extend_scalars(top, base, &ext)?;
        let q = ext.order();
        let mut tried = 0usize;
        for lead in 0..n {
            let free = (n - lead - 1) as u32;
            let count = q.checked_pow(free).unwrap_or(u64::MAX);
            for idx in 0..count {
                if tried >= candidates {
                    break;
                }
                tried += 1;
                let mut c = vec![ext.zero(); n];
                c[lead] = ext.one();
                let mut rest = idx;
                for x in c[lead + 1..].iter_mut() {
                    *x = ext.element_at(rest % q);
                    rest /= q;
                }
                let mut a: Vec<Vec<FieldElement>> = (0..n)
                    .filter(|&i| i != lead)
                    .map(|i| (0..n).map(|j| if i == j { ext.one() } else { ext.zero() }).collect())
                    .collect();
                a.push(c.clone());
                let inv = inverse(&ext, &a).expect("hyperplane matrix is invertible");
                let h = lifted.linear_change(&inv)?.restrict_to_zero(n - 1);
                if is_smooth_form(&h)? {
                    return Ok(Some(Transversal { e, hyperplane: c, matrix: a, restricted: h.to_string() }));
                }
            }
        }
    }
    Ok(None)
}

/// Line arrangement data for a plane curve that splits into distinct lines
/// over the base field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementComparison {
    pub lines: Vec<String>,
    /// `i -> n_i`, the number of points where exactly `i ≥ 2` lines meet.
    pub incidences: BTreeMap<u64, u64>,
    pub generic: bool,
    /// `Σ μ` from the germ pipeline.
    pub computed_milnor_sum: Option<u64>,
    /// `Σ n_i (i-1)^2`, the Milnor sum of ordinary `i`-fold points.
    pub incidence_milnor_sum: u64,
    /// `Σ n_i (i-1)`, the correction in the general example formula.
    pub example_formula_value: u64,
    /// `(d-1)^3 - Σ n_i (i-1)`, the dimension the example formula predicts.
    pub example_dimension: i128,
    /// `(d-1)(d-2)/2`, the correction in the generic example formula.
    pub example_generic_value: Option<u64>,
    pub example_disagrees: bool,
    pub flag: Option<String>,
}

/// Distinct linear factors of a ternary form, when it is a product of
/// `deg` of them over the base field.
pub fn split_into_lines(top: &MultiPoly<GaloisField>, base: &GaloisField) -> Result<Option<Vec<MultiPoly<GaloisField>>>> {
    if top.nvars() != 3 || base.order() > 1024 {
        return Ok(None);
    }
    let d = top.degree().unwrap_or(0);
    let q = base.order();
    let mut rest = top.clone();
    let mut lines = Vec::new();
    for lead in 0..3 {
        let free = 2 - lead;
        for idx in 0..q.pow(free as u32) {
            let mut c = vec![base.zero(); 3];
            c[lead] = base.one();
            let mut r = idx;
            for x in c[lead + 1..].iter_mut() {
                *x = base.element_at(r % q);
                r /= q;
            }
            let l = (0..3).fold(MultiPoly::zero(base, 3), |acc, j| {
                acc.add(&MultiPoly::var(base, 3, j).scale(&c[j]))
            });
            if let Some(quot) = rest.div_exact(&l)? {
                if quot.div_exact(&l)?.is_some() {
                    return Ok(None);
                }
                rest = quot;
                lines.push(l);
            }
        }
    }
    Ok((lines.len() as u32 == d && rest.is_constant()).then_some(lines))
}

pub fn compare_arrangement(
    lines: &[MultiPoly<GaloisField>],
    base: &GaloisField,
    computed: Option<u64>,
) -> Result<ArrangementComparison> {
    let d = lines.len() as u64;
    let coeff = |l: &MultiPoly<GaloisField>, j: usize| {
        let mut e = vec![0u16; 3];
        e[j] = 1;
        l.coeff(&crate::mpoly::Monomial::new(e))
    };
    let k = base;
    let mut points: BTreeMap<Vec<FieldElement>, u64> = BTreeMap::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let (a0, a1, a2) = (coeff(a, 0), coeff(a, 1), coeff(a, 2));
            let (b0, b1, b2) = (coeff(b, 0), coeff(b, 1), coeff(b, 2));
            let cross = [k.sub(&k.mul(&a1, &b2), &k.mul(&a2, &b1)),
                k.sub(&k.mul(&a2, &b0), &k.mul(&a0, &b2)),
                k.sub(&k.mul(&a0, &b1), &k.mul(&a1, &b0))];
            let lead = cross.iter().position(|x| !k.is_zero(x)).expect("distinct lines meet in a point");
            let inv = k.inv(&cross[lead]).unwrap();
            let pt: Vec<FieldElement> = cross.iter().map(|x| k.mul(x, &inv)).collect();
            if points.contains_key(&pt) {
                continue;
            }
            let through = lines.iter().filter(|l| l.evaluate(&pt).map(|v| k.is_zero(&v)).unwrap_or(false)).count();
            points.insert(pt, through as u64);
        }
    }
    let mut incidences: BTreeMap<u64, u64> = BTreeMap::new();
    for &i in points.values() {
        *incidences.entry(i).or_default() += 1;
    }
    let generic = incidences.keys().all(|&i| i == 2);
    let incidence_milnor_sum = incidences.iter().map(|(&i, &c)| c * (i - 1) * (i - 1)).sum();
    let example_formula_value = incidences.iter().map(|(&i, &c)| c * (i - 1)).sum();
    let example_generic_value = generic.then(|| (d - 1) * (d - 2) / 2);
    let example_dimension = ((d as i128) - 1).pow(3) - example_formula_value as i128;
    let reference = computed.unwrap_or(incidence_milnor_sum);
    let example_disagrees =
        example_formula_value != reference || example_generic_value.is_some_and(|v| v != reference);
    let flag = example_disagrees.then(|| {
        let mut msg = format!("example formula disagrees: computed Σμ = {reference}, Σ n_i(i-1) = {example_formula_value}");
        if let Some(v) = example_generic_value {
            msg.push_str(&format!(", (d-1)(d-2)/2 = {v}"));
        }
        msg
    });
    Ok(ArrangementComparison {
        lines: lines.iter().map(|l| l.to_string()).collect(),
        incidences,
        generic,
        computed_milnor_sum: computed,
        incidence_milnor_sum,
        example_formula_value,
        example_dimension,
        example_generic_value,
        example_disagrees,
        flag,
    })
}
