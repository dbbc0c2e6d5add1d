use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::search::ProjectivePoint;
use crate::error::{Error, Result};
use crate::ff::{Field, GaloisField, Rationals};
use crate::mpoly::linalg::{inverse, nullspace};
use crate::mpoly::{extend_scalars, groebner_basis, Monomial, MultiPoly};

/// Largest total degree tried when the weight system has several solutions.
const DELTA_SEARCH_LIMIT: u64 = 64;
/// Cap on standard monomials counted for one Milnor number.
pub const MILNOR_LIMIT: u64 = 1 << 20;
/// Cap on support subsets tried when looking for a unit factor.
const CANDIDATE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: Vec<u64>,
    pub delta: u64,
}

impl Weights {
    fn weighted_degree(&self, m: &Monomial) -> u64 {
        m.exponents().iter().zip(&self.alpha).map(|(&e, &a)| e as u64 * a).sum()
    }
}

/// Positive coprime weights `α` and degree `δ` with `⟨a, α⟩ = δ` for every
/// exponent `a` in the support of `g`, or `None`. When the solutions form a
/// line the primitive one is returned; otherwise the smallest `δ` wins, ties
/// broken lexicographically in `α`.
pub fn detect_weights<F: Field>(g: &MultiPoly<F>) -> Option<Weights> {
    let k = g.nvars();
    if g.is_zero() || !g.field().is_zero(&g.constant_term()) {
        return None;
    }
    let support: Vec<&Monomial> = g.terms().map(|(m, _)| m).collect();
    let present: Vec<usize> = (0..k).filter(|&j| support.iter().any(|m| m.exponents()[j] > 0)).collect();
    let q = Rationals;
    let rows: Vec<Vec<BigRational>> = support
        .iter()
        .map(|m| {
            let mut row: Vec<BigRational> = present.iter().map(|&j| q.from_int(m.exponents()[j] as i64)).collect();
            row.push(q.from_int(-1));
            row
        })
        .collect();
    let basis = nullspace(&q, &rows, present.len() + 1);
    let sub = match basis.len() {
        0 => return None,
        1 => primitive_positive(&basis[0])?,
        _ => smallest_delta(&support, &present)?,
    };
    let mut alpha = vec![1u64; k];
    for (slot, &j) in sub.iter().zip(&present) {
        alpha[j] = *slot;
    }
    let w = Weights { alpha, delta: *sub.last().unwrap() };
    support.iter().all(|m| w.weighted_degree(m) == w.delta).then_some(w)
}

/// Integer multiple of `v` with coprime entries and positive last entry;
/// `None` unless every entry is then positive.
fn primitive_positive(v: &[BigRational]) -> Option<Vec<u64>> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    for x in ints.iter_mut() {
        *x = &*x / &g * &sign;
    }
    ints.iter().map(|x| if x.is_positive() { x.to_u64() } else { None }).collect()
}

fn smallest_delta(support: &[&Monomial], present: &[usize]) -> Option<Vec<u64>> {
    let k = present.len();
    for delta in 1..=DELTA_SEARCH_LIMIT {
        let mut alpha = vec![1u64; k];
        loop {
            let ok = support.iter().all(|m| {
                present.iter().zip(&alpha).map(|(&j, &a)| m.exponents()[j] as u64 * a).sum::<u64>() == delta
            });
            if ok {
                let mut out = alpha.clone();
                out.push(delta);
                return Some(out);
            }
            // odometer, last entry fastest, so the first hit is lexicographically least
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if alpha[i] < delta {
                    alpha[i] += 1;
                    for a in alpha[i + 1..].iter_mut() {
                        *a = 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX || k == 0 {
                break;
            }
        }
    }
    None
}

/// `μ = dim K[x]/(∂g)` when finite. For weighted homogeneous `g` the
/// origin is the only critical point, so this is the local Milnor number.
pub fn milnor_number<F: Field>(g: &MultiPoly<F>) -> Result<Option<u64>> {
    if g.nvars() == 0 {
        return Ok(Some(0));
    }
    let gb = groebner_basis(&g.gradient())?;
    if !gb.is_zero_dimensional() {
        return Ok(None);
    }
    gb.quotient_dimension(MILNOR_LIMIT).map(Some)
}

/// `Π (δ - α_j) / α_j`.
pub fn milnor_orlik(w: &Weights) -> BigRational {
    w.alpha.iter().fold(BigRational::one(), |acc, &a| {
        acc * BigRational::new(BigInt::from(w.delta) - BigInt::from(a), BigInt::from(a))
    })
}

/// How the weighted homogeneous local equation was obtained from the chart
/// equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// The chart equation is itself weighted homogeneous.
    Direct,
    /// One variable: `u^k` times a unit.
    Univariate,
    /// Nondegenerate quadratic part, odd characteristic.
    Morse,
    /// The lowest weighted part divides the chart equation with a unit
    /// quotient.
    UnitFactor,
    /// No weighted homogeneous local equation was found.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermData {
    /// The chart equation at the point, moved to the origin.
    pub local_equation: String,
    /// The weighted homogeneous equation defining the same germ.
    pub normal_form: Option<String>,
    pub normalization: Normalization,
    pub weights: Option<Weights>,
    /// `None` when the singularity is not isolated or no normal form exists.
    pub milnor: Option<u64>,
    /// `Π (δ - α_j) / α_j` as an exact fraction.
    pub milnor_orlik: Option<String>,
    pub milnor_orlik_agrees: Option<bool>,
}

impl GermData {
    /// Weighted homogeneous with an isolated singularity.
    pub fn is_isolated_wh(&self) -> bool {
        self.weights.is_some() && self.milnor.is_some()
    }
}

/// Germ of `{form = 0}` at a point, computed over the point's field of
/// definition.
pub fn germ_at(form: &MultiPoly<GaloisField>, base: &GaloisField, point: &ProjectivePoint) -> Result<GermData> {
    let ext = point.field(base)?;
    let lifted = extend_scalars(form, base, &ext)?;
    let g = lifted.dehomogenize_translate(&point.coords)?;
    analyze_germ(&g)
}

/// Normalizes a chart equation vanishing at the origin and computes its
/// invariants.
pub fn analyze_germ<F: Field>(g: &MultiPoly<F>) -> Result<GermData> {
    if !g.field().is_zero(&g.constant_term()) {
        return Err(Error::InvalidArgument("the point is not on the hypersurface".into()));
    }
    let local_equation = g.to_string();
    let (normalization, normal) = normalize(g)?;
    let Some(h) = normal else {
        return Ok(GermData {
            local_equation,
            normal_form: None,
            normalization,
            weights: None,
            milnor: None,
            milnor_orlik: None,
            milnor_orlik_agrees: None,
        });
    };
    let weights = detect_weights(&h);
    let milnor = milnor_number(&h)?;
    let mo = weights.as_ref().map(milnor_orlik);
    let agrees = match (&mo, milnor) {
        (Some(r), Some(mu)) => Some(*r == BigRational::from_integer(BigInt::from(mu))),
        _ => None,
    };
    Ok(GermData {
        local_equation,
        normal_form: Some(h.to_string()),
        normalization,
        weights,
        milnor,
        milnor_orlik: mo.map(|r| r.to_string()),
        milnor_orlik_agrees: agrees,
    })
}

fn normalize<F: Field>(g: &MultiPoly<F>) -> Result<(Normalization, Option<MultiPoly<F>>)> {
    let k = g.nvars();
    let field = g.field();
    if k == 0 || g.is_zero() {
        return Ok((Normalization::Failed, None));
    }
    if k == 1 {
        if g.num_terms() == 1 {
            return Ok((Normalization::Direct, Some(g.clone())));
        }
        let ord = g.terms().map(|(m, _)| m.degree()).min().unwrap();
        let h = MultiPoly::monomial(field, Monomial::new(vec![ord as u16]), field.one());
        return Ok((Normalization::Univariate, Some(h)));
    }
    if detect_weights(g).is_some() {
        return Ok((Normalization::Direct, Some(g.clone())));
    }
    if let Some(q2) = morse_part(g) {
        return Ok((Normalization::Morse, Some(q2)));
    }
    for w in candidate_weights(g) {
        let low = lowest_part(g, &w);
        if detect_weights(&low).is_none() || milnor_number(&low)?.is_none() {
            continue;
        }
        if let Some(v) = g.div_exact(&low)? {
            if !field.is_zero(&v.constant_term()) {
                return Ok((Normalization::UnitFactor, Some(low)));
            }
        }
    }
    Ok((Normalization::Failed, None))
}

/// The quadratic part when it is a nondegenerate form and `g` has no linear
/// part, in odd or zero characteristic.
fn morse_part<F: Field>(g: &MultiPoly<F>) -> Option<MultiPoly<F>> {
    let field = g.field();
    if field.characteristic() == 2 || !g.homogeneous_part(1).is_zero() {
        return None;
    }
    let q2 = g.homogeneous_part(2);
    let k = g.nvars();
    let mut b = vec![vec![field.zero(); k]; k];
    for (m, c) in q2.terms() {
        let idx: Vec<usize> = (0..k).flat_map(|j| std::iter::repeat_n(j, m.exponents()[j] as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            b[i][i] = field.add(c, c);
        } else {
            b[i][j] = c.clone();
            b[j][i] = c.clone();
        }
    }
    inverse(field, &b).map(|_| q2)
}

fn lowest_part<F: Field>(g: &MultiPoly<F>, w: &Weights) -> MultiPoly<F> {
    let low = g.terms().map(|(m, _)| w.weighted_degree(m)).min().unwrap_or(0);
    let terms = g
        .terms()
        .filter(|(m, _)| w.weighted_degree(m) == low)
        .map(|(m, c)| (m.exponents().to_vec(), c.clone()));
    MultiPoly::from_terms(g.field(), g.nvars(), terms)
}

/// Standard weights first, then the weights determined by each set of `k`
/// support monomials.
fn candidate_weights<F: Field>(g: &MultiPoly<F>) -> Vec<Weights> {
    let k = g.nvars();
    let field = g.field();
    let mut out: Vec<Weights> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut push = |w: Weights, out: &mut Vec<Weights>| {
        if seen.insert(w.alpha.clone()) {
            out.push(w);
        }
    };
    push(Weights { alpha: vec![1; k], delta: 0 }, &mut out);
    let support: Vec<Monomial> = g.terms().map(|(m, _)| m.clone()).collect();
    let mut tried = 0;
    for subset in combinations(support.len(), k) {
        tried += 1;
        if tried > CANDIDATE_LIMIT {
            break;
        }
        let sub = MultiPoly::from_terms(
            field,
            k,
            subset.iter().map(|&i| (support[i].exponents().to_vec(), field.one())),
        );
        if let Some(w) = detect_weights(&sub) {
            push(w, &mut out);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;
    use crate::mpoly::parse;

    fn w(alpha: &[u64], delta: u64) -> Option<Weights> {
        Some(Weights { alpha: alpha.to_vec(), delta })
    }

    #[test]
    fn weight_examples() {
        let q = Rationals;
        assert_eq!(detect_weights(&parse("x1^3 + x2^2", 2, &q).unwrap()), w(&[2, 3], 6));
        assert_eq!(detect_weights(&parse("x1*x2", 2, &q).unwrap()), w(&[1, 1], 2));
        assert_eq!(detect_weights(&parse("x1^3 + x1*x2^3", 2, &q).unwrap()), w(&[3, 2], 9));
        assert_eq!(detect_weights(&parse("x1^2 + x1^3", 2, &q).unwrap()), None);
        assert_eq!(detect_weights(&parse("x1^2*x2^3", 2, &q).unwrap()), w(&[1, 1], 5));
        assert_eq!(detect_weights(&parse("x1^2 + 1", 2, &q).unwrap()), None);
    }

    #[test]
    fn orlik_examples() {
        assert_eq!(milnor_orlik(&Weights { alpha: vec![2, 3], delta: 6 }), BigRational::from_integer(2.into()));
        assert_eq!(milnor_orlik(&Weights { alpha: vec![1, 1], delta: 2 }), BigRational::one());
        for i in 2..7u64 {
            let r = milnor_orlik(&Weights { alpha: vec![1, 1], delta: i });
            assert_eq!(r, BigRational::from_integer(((i - 1) * (i - 1)).into()));
        }
        assert_eq!(milnor_orlik(&Weights { alpha: vec![2, 1], delta: 4 }).to_string(), "3");
        assert_eq!(milnor_orlik(&Weights { alpha: vec![3, 2], delta: 8 }).to_string(), "5");
    }

    #[test]
    fn germ_examples() {
        let k = build_field(5, 1).unwrap();
        let f = parse("x1^2*x2", 2, &k).unwrap();
        let p = ProjectivePoint { e: 1, coords: vec![k.from_int(0), k.from_int(1)] };
        let g = germ_at(&f, &k, &p).unwrap();
        assert_eq!(g.local_equation, "x1^2");
        assert_eq!((g.weights, g.milnor), (w(&[1], 2), Some(1)));

        let k7 = build_field(7, 1).unwrap();
        let xyz = parse("x1*x2*x3", 3, &k7).unwrap();
        let p = ProjectivePoint { e: 1, coords: vec![k7.from_int(0), k7.from_int(0), k7.from_int(1)] };
        let g = germ_at(&xyz, &k7, &p).unwrap();
        assert_eq!((g.local_equation.as_str(), g.weights, g.milnor), ("x1*x2", w(&[1, 1], 2), Some(1)));

        let cusp = parse("x1^2*x3 + x2^3", 3, &k7).unwrap();
        let g = germ_at(&cusp, &k7, &p).unwrap();
        assert_eq!((g.weights, g.milnor, g.normalization), (w(&[3, 2], 6), Some(2), Normalization::Direct));
        assert_eq!(g.milnor_orlik_agrees, Some(true));
    }

    #[test]
    fn normalizations() {
        let k = build_field(7, 1).unwrap();
        // node with higher terms
        let g = analyze_germ(&parse("x2^2 - x1^2 - x1^3", 2, &k).unwrap()).unwrap();
        assert_eq!((g.normalization, g.milnor), (Normalization::Morse, Some(1)));
        // ordinary triple point times a unit
        let g = analyze_germ(&parse("x1*x2*(x1 + x2)*(1 + x1 + 3*x2^2)", 2, &k).unwrap()).unwrap();
        assert_eq!((g.normalization, g.milnor, g.weights), (Normalization::UnitFactor, Some(4), w(&[1, 1], 3)));
        // double root of a binary form
        let g = analyze_germ(&parse("x1^2 + 3*x1^3", 1, &k).unwrap()).unwrap();
        assert_eq!((g.normalization, g.milnor), (Normalization::Univariate, Some(1)));
        // a tacnode-like germ with higher terms is not handled
        let g = analyze_germ(&parse("x2^2 - x1^4 - x1^5", 2, &k).unwrap()).unwrap();
        assert_eq!((g.normalization, g.milnor), (Normalization::Failed, None));
    }

    #[test]
    fn non_isolated_germ() {
        let k = build_field(7, 1).unwrap();
        let g = analyze_germ(&parse("x1^2", 2, &k).unwrap()).unwrap();
        assert_eq!(g.milnor, None);
        assert!(!g.is_isolated_wh());
    }

    #[test]
    fn milnor_examples() {
        let k = build_field(7, 1).unwrap();
        for (text, mu) in [("x1*x2", 1), ("x1^3 + x2^2", 2), ("x1^3 + x2^3", 4)] {
            assert_eq!(milnor_number(&parse(text, 2, &k).unwrap()).unwrap(), Some(mu));
        }
    }
}
