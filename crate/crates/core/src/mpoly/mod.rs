//! Sparse multivariate polynomials over a [`Field`], graded reverse
//! lexicographic order throughout.

mod groebner;
pub mod linalg;
mod monomial;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, FiniteField, GaloisField};

pub use groebner::{groebner_basis, GroebnerBasis};
pub use monomial::Monomial;
pub use parse::{parse, parse_with_generator};

#[derive(Clone)]
pub struct MultiPoly<F: Field> {
    field: F,
    n: usize,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl<F: Field> Eq for MultiPoly<F> {}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: &F, n: usize) -> Self {
        MultiPoly { field: field.clone(), n, terms: BTreeMap::new() }
    }

    pub fn constant(field: &F, n: usize, c: F::Elem) -> Self {
        Self::monomial(field, Monomial::one(n), c)
    }

    pub fn one(field: &F, n: usize) -> Self {
        Self::constant(field, n, field.one())
    }

    pub fn var(field: &F, n: usize, j: usize) -> Self {
        Self::monomial(field, Monomial::var(n, j), field.one())
    }

    pub fn monomial(field: &F, m: Monomial, c: F::Elem) -> Self {
        let mut p = Self::zero(field, m.nvars());
        if !field.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    /// Collects terms, combining like monomials and dropping zeros.
    pub fn from_terms<I>(field: &F, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u16>, F::Elem)>,
    {
        let mut p = Self::zero(field, n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length");
            p.add_term(Monomial::new(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = self.field.add(old, &c);
                if self.field.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn constant_term(&self) -> F::Elem {
        self.coeff(&Monomial::one(self.n))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, self.n);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), self.field.mul(a, c))).collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn checked_mul_term(&self, m: &Monomial, c: &F::Elem) -> Result<Self> {
        let mut out = Self::zero(&self.field, self.n);
        if self.field.is_zero(c) {
            return Ok(out);
        }
        for (a, x) in &self.terms {
            out.terms.insert(a.checked_mul(m)?, self.field.mul(x, c));
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(&self.field, self.n);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.checked_mul(b)?, self.field.mul(x, y));
            }
        }
        Ok(out)
    }

    /// Product; panics on exponent overflow (see [`Self::checked_mul`]).
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("exponent overflow in polynomial product")
    }

    pub fn pow(&self, mut e: u32) -> Result<Self> {
        let mut acc = Self::one(&self.field, self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Makes the leading coefficient 1.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(&self.field.inv(c).expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    /// Degree -> homogeneous component; the components sum to `self`.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Self::zero(&self.field, self.n))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Formal partial derivative in `x_j`, coefficients reduced in the field.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = Self::zero(&self.field, self.n);
        for (m, c) in &self.terms {
            let e = m.exponents()[j];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[j] -= 1;
            out.add_term(Monomial::new(exps), self.field.mul(c, &self.field.from_int(e as i64)));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.n).map(|j| self.partial(j)).collect()
    }

    /// Nested Horner evaluation, one variable at a time.
    pub fn evaluate(&self, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut terms: Vec<(&[u16], &F::Elem)> = self.terms.iter().map(|(m, c)| (m.exponents(), c)).collect();
        terms.sort_by(|a, b| b.0.cmp(a.0));
        Ok(horner(&self.field, &terms, 0, point))
    }

    /// Term-by-term evaluation with independent powers.
    pub fn evaluate_naive(&self, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let f = &self.field;
        Ok(self.terms.iter().fold(f.zero(), |acc, (m, c)| {
            let t = m.exponents().iter().zip(point).fold(c.clone(), |t, (&e, x)| f.mul(&t, &f.pow(x, e as u64)));
            f.add(&acc, &t)
        }))
    }

    /// Replaces `x_i` by `images[i]`; all images share a variable count.
    pub fn substitute(&self, images: &[Self]) -> Result<Self> {
        if images.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: images.len() });
        }
        let m = images.first().map_or(0, |p| p.n);
        let mut cache: Vec<Vec<Self>> = images.iter().map(|p| vec![Self::one(&self.field, m), p.clone()]).collect();
        let mut out = Self::zero(&self.field, m);
        for (mono, c) in &self.terms {
            let mut t = Self::constant(&self.field, m, c.clone());
            for (i, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().checked_mul(&images[i])?;
                    cache[i].push(next);
                }
                t = t.checked_mul(&cache[i][e as usize])?;
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// `f(M x)`: substitutes `x_i -> sum_j M[i][j] x_j`. `M` must be invertible.
    pub fn linear_change(&self, matrix: &[Vec<F::Elem>]) -> Result<Self> {
        if matrix.len() != self.n || matrix.iter().any(|r| r.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, got: matrix.len() });
        }
        if linalg::inverse(&self.field, matrix).is_none() {
            return Err(Error::SingularMatrix);
        }
        let images: Vec<Self> = matrix
            .iter()
            .map(|row| {
                let terms = row.iter().enumerate().map(|(j, c)| {
                    let mut e = vec![0u16; self.n];
                    e[j] = 1;
                    (e, c.clone())
                });
                Self::from_terms(&self.field, self.n, terms)
            })
            .collect();
        self.substitute(&images)
    }

    /// Restricts a form to the affine chart where the first nonzero
    /// coordinate of `point` is 1 and moves the point to the origin. The
    /// result lives in `n - 1` variables, ordered as the remaining coordinates.
    pub fn dehomogenize_translate(&self, point: &[F::Elem]) -> Result<Self> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let f = &self.field;
        let lead = point.iter().position(|x| !f.is_zero(x)).ok_or(Error::ZeroPoint)?;
        let scale = f.inv(&point[lead]).unwrap();
        let m = self.n - 1;
        let mut k = 0;
        let images: Vec<Self> = (0..self.n)
            .map(|i| {
                if i == lead {
                    Self::one(f, m)
                } else {
                    let shifted = Self::constant(f, m, f.mul(&point[i], &scale)).add(&Self::var(f, m, k));
                    k += 1;
                    shifted
                }
            })
            .collect();
        self.substitute(&images)
    }

    /// The quotient `self / h` when `h` divides `self` exactly.
    pub fn div_exact(&self, h: &Self) -> Result<Option<Self>> {
        let f = &self.field;
        let Some((hm, hc)) = h.leading_term() else {
            return Ok(None);
        };
        let hc_inv = f.inv(hc).expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = Self::zero(f, self.n);
        while let Some((m, c)) = rem.leading_term() {
            if !hm.divides(m) {
                return Ok(None);
            }
            let qm = hm.quotient_of(m);
            let qc = f.mul(c, &hc_inv);
            rem = rem.sub(&h.checked_mul_term(&qm, &qc)?);
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    /// Sets `x_j = 0` and drops the variable.
    pub fn restrict_to_zero(&self, j: usize) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.exponents()[j] == 0).map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e.remove(j);
            (e, c.clone())
        });
        MultiPoly::from_terms(&self.field, self.n - 1, terms)
    }

    pub fn map_coeffs<G: Field>(&self, target: &G, f: impl Fn(&F::Elem) -> G::Elem) -> MultiPoly<G> {
        let terms = self.terms.iter().map(|(m, c)| (m.exponents().to_vec(), f(c)));
        MultiPoly::from_terms(target, self.n, terms)
    }
}

fn horner<F: Field>(field: &F, terms: &[(&[u16], &F::Elem)], var: usize, point: &[F::Elem]) -> F::Elem {
    if terms.is_empty() {
        return field.zero();
    }
    if var == point.len() {
        return terms.iter().fold(field.zero(), |acc, (_, c)| field.add(&acc, c));
    }
    // terms are sorted by exponent vectors, descending, so groups with equal
    // exponent in `var` are contiguous and in descending order
    let x = &point[var];
    let mut acc = field.zero();
    let mut prev: Option<u16> = None;
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0[var];
        let end = start + terms[start..].iter().take_while(|t| t.0[var] == e).count();
        let inner = horner(field, &terms[start..end], var + 1, point);
        if let Some(pe) = prev {
            acc = field.mul(&acc, &field.pow(x, (pe - e) as u64));
        }
        acc = field.add(&acc, &inner);
        prev = Some(e);
        start = end;
    }
    if let Some(pe) = prev {
        acc = field.mul(&acc, &field.pow(x, pe as u64));
    }
    acc
}

/// Extends the scalars of `f` from `base` to an extension `target`. Equal
/// degrees map coordinates directly; otherwise the deterministic
/// [`Embedding`] is used.
pub fn extend_scalars<T: FiniteField>(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    target: &T,
) -> Result<MultiPoly<T>> {
    if target.prime() == base.prime() && target.degree() == base.degree() {
        return Ok(f.map_coeffs(target, |c| target.from_coeffs(&c.coeffs)));
    }
    let emb = Embedding::new(base, target)?;
    Ok(f.map_coeffs(target, |c| emb.apply(c)))
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let cs = self.field.render(c);
                if m.is_one() {
                    cs
                } else if self.field.is_one(c) {
                    monomial::render_monomial(m)
                } else {
                    format!("{cs}*{}", monomial::render_monomial(m))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{build_field, GaloisField, Rationals};

    fn f(p: u64) -> GaloisField {
        build_field(p, 1).unwrap()
    }

    #[test]
    fn homogeneous_components_examples() {
        let k = f(7);
        let g = parse("x1^3 + x2^3 + x1*x2 + 1", 2, &k).unwrap();
        let comps = g.homogeneous_components();
        assert_eq!(comps.keys().copied().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(comps[&3], parse("x1^3 + x2^3", 2, &k).unwrap());
        assert_eq!(comps[&2], parse("x1*x2", 2, &k).unwrap());
        let h = parse("x1^2*x2", 2, &k).unwrap();
        assert_eq!(h.homogeneous_components().len(), 1);
        let a = parse("x1^2*x2 + x2^2", 2, &k).unwrap();
        let c = a.homogeneous_components();
        assert_eq!(c[&3], parse("x1^2*x2", 2, &k).unwrap());
        assert_eq!(c[&2], parse("x2^2", 2, &k).unwrap());
        let sum = c.values().fold(MultiPoly::zero(&k, 2), |acc, p| acc.add(p));
        assert_eq!(sum, a);
    }

    #[test]
    fn partial_examples() {
        let k = f(7);
        let g = parse("x1^3 + x2^2", 2, &k).unwrap();
        assert_eq!(g.partial(0), parse("3*x1^2", 2, &k).unwrap());
        let k5 = f(5);
        assert!(parse("x1^5", 1, &k5).unwrap().partial(0).is_zero());
        assert_eq!(parse("x1^2*x2", 2, &k).unwrap().partial(1), parse("x1^2", 2, &k).unwrap());
    }

    #[test]
    fn linear_change_examples() {
        let k = f(7);
        let g = parse("x1^2*x2", 2, &k).unwrap();
        let id = linalg::identity(&k, 2);
        assert_eq!(g.linear_change(&id).unwrap(), g);
        let swap = vec![vec![k.zero(), k.one()], vec![k.one(), k.zero()]];
        assert_eq!(g.linear_change(&swap).unwrap(), parse("x2^2*x1", 2, &k).unwrap());
        let sing = vec![vec![k.one(), k.one()], vec![k.one(), k.one()]];
        assert_eq!(g.linear_change(&sing).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn linear_change_composition() {
        let k = f(7);
        let g = parse("x1^3 + 2*x1*x2 + x2^2 + 5", 2, &k).unwrap();
        let a = vec![vec![k.from_int(1), k.from_int(2)], vec![k.from_int(3), k.from_int(5)]];
        let b = vec![vec![k.from_int(2), k.from_int(0)], vec![k.from_int(1), k.from_int(1)]];
        let lhs = g.linear_change(&a).unwrap().linear_change(&b).unwrap();
        let rhs = g.linear_change(&linalg::mat_mul(&k, &a, &b)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.degree(), g.degree());
    }

    #[test]
    fn dehomogenize_examples() {
        let k = f(7);
        let g = parse("x1^2*x2", 2, &k).unwrap();
        let local = g.dehomogenize_translate(&[k.zero(), k.one()]).unwrap();
        assert_eq!(local, parse("x1^2", 1, &k).unwrap());
        let xy = parse("x1*x2", 3, &k).unwrap();
        let local = xy.dehomogenize_translate(&[k.zero(), k.zero(), k.one()]).unwrap();
        assert_eq!(local, parse("x1*x2", 2, &k).unwrap());
        let off = g.dehomogenize_translate(&[k.one(), k.one()]).unwrap();
        assert!(!k.is_zero(&off.constant_term()));
        // scaling of the point does not matter
        let scaled = g.dehomogenize_translate(&[k.zero(), k.from_int(3)]).unwrap();
        assert_eq!(scaled, local_scaled_check(&k));
        assert_eq!(g.dehomogenize_translate(&[k.zero(), k.zero()]).unwrap_err(), Error::ZeroPoint);
    }

    fn local_scaled_check(k: &GaloisField) -> MultiPoly<GaloisField> {
        parse("x1^2", 1, k).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let k = f(5);
        assert!(k.is_zero(&MultiPoly::zero(&k, 2).evaluate(&[k.one(), k.one()]).unwrap()));
        let g = parse("x1^2 + x2^2", 2, &k).unwrap();
        assert!(k.is_zero(&g.evaluate(&[k.from_int(1), k.from_int(2)]).unwrap()));
        assert!(g.evaluate(&[k.one()]).is_err());
    }

    #[test]
    fn euler_relation() {
        let k = f(7);
        for text in ["x1^3 + 2*x1*x2*x3 + x3^3", "x1^2*x2 + x2^3", "x1^4 + 3*x1^2*x2^2 + x2*x3^3"] {
            let g = parse(text, 3, &k).unwrap();
            let d = g.degree().unwrap();
            let lhs = (0..3).fold(MultiPoly::zero(&k, 3), |acc, j| acc.add(&MultiPoly::var(&k, 3, j).mul(&g.partial(j))));
            assert_eq!(lhs, g.scale(&k.from_int(d as i64)));
        }
    }

    #[test]
    fn degree_of_zero_and_products() {
        let k = f(7);
        assert_eq!(MultiPoly::zero(&k, 2).degree(), None);
        let a = parse("x1^2 + x2", 2, &k).unwrap();
        let b = parse("x1*x2^3 + 1", 2, &k).unwrap();
        assert_eq!(a.mul(&b).degree(), Some(6));
    }

    #[test]
    fn rationals_ring_axioms() {
        let q = Rationals;
        let a = parse("x1^2 + 3*x2 - 1", 2, &q).unwrap();
        let b = parse("2*x1 - x2^2", 2, &q).unwrap();
        let c = parse("x1*x2 + 7", 2, &q).unwrap();
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn restrict() {
        let k = f(7);
        let g = parse("x1^2*x2 + x1*x2*x3 + x3^3", 3, &k).unwrap();
        assert_eq!(g.restrict_to_zero(2), parse("x1^2*x2", 2, &k).unwrap());
    }

    #[test]
    fn exact_division() {
        let k = f(7);
        let a = parse("x1^2 + 3*x2 - 1", 2, &k).unwrap();
        let b = parse("x1*x2 + 5*x2^3 + 2", 2, &k).unwrap();
        assert_eq!(a.mul(&b).div_exact(&a).unwrap(), Some(b.clone()));
        assert_eq!(a.mul(&b).add(&MultiPoly::one(&k, 2)).div_exact(&a).unwrap(), None);
        assert_eq!(a.div_exact(&MultiPoly::zero(&k, 2)).unwrap(), None);
    }
}
