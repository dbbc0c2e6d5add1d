//! Buchberger's algorithm with the normal selection strategy and the product
//! and chain criteria. Bases are returned reduced and monic.

use std::collections::BTreeSet;

use super::{Monomial, MultiPoly};
use crate::error::{Error, Result};
use crate::ff::Field;

#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    polys: Vec<MultiPoly<F>>,
    n: usize,
}

pub fn groebner_basis<F: Field>(generators: &[MultiPoly<F>]) -> Result<GroebnerBasis<F>> {
    let n = match generators.first() {
        Some(g) => g.nvars(),
        None => return Err(Error::InvalidArgument("empty generator list".into())),
    };
    let mut basis: Vec<MultiPoly<F>> = Vec::new();
    for g in generators {
        if g.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.nvars() });
        }
        let r = normal_form(g, &basis)?;
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    let mut pairs: BTreeSet<(Monomial, usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((lm(&basis[i]).lcm(lm(&basis[j])), i, j));
        }
    }
    let mut live: Vec<bool> = vec![true; basis.len()];
    while let Some(pair) = pairs.pop_first() {
        let (l, i, j) = pair;
        if lm(&basis[i]).is_coprime(lm(&basis[j])) {
            continue;
        }
        // chain criterion: some k with lm_k | lcm and both pairs already handled
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(&basis[k]).divides(&l)
                && !pairs.contains(&ordered(&basis, i, k))
                && !pairs.contains(&ordered(&basis, j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j])?;
        let active: Vec<MultiPoly<F>> =
            basis.iter().zip(&live).filter(|(_, &a)| a).map(|(g, _)| g.clone()).collect();
        let r = normal_form(&s, &active)?;
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_constant() {
            let one = MultiPoly::one(r.field(), n);
            return Ok(GroebnerBasis { polys: vec![one], n });
        }
        let k = basis.len();
        for (t, g) in basis.iter().enumerate() {
            pairs.insert((lm(g).lcm(lm(&r)), t, k));
        }
        for (t, g) in basis.iter().enumerate() {
            if lm(&r).divides(lm(g)) {
                live[t] = false;
            }
        }
        basis.push(r);
        live.push(true);
    }
    let kept: Vec<MultiPoly<F>> = basis.into_iter().zip(live).filter(|(_, a)| *a).map(|(g, _)| g).collect();
    Ok(GroebnerBasis { polys: interreduce(kept)?, n })
}

fn ordered<F: Field>(basis: &[MultiPoly<F>], a: usize, b: usize) -> (Monomial, usize, usize) {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    (lm(&basis[i]).lcm(lm(&basis[j])), i, j)
}

fn lm<F: Field>(p: &MultiPoly<F>) -> &Monomial {
    p.leading_monomial().expect("nonzero basis element")
}

fn s_polynomial<F: Field>(f: &MultiPoly<F>, g: &MultiPoly<F>) -> Result<MultiPoly<F>> {
    let field = f.field();
    let (mf, cf) = f.leading_term().expect("nonzero");
    let (mg, cg) = g.leading_term().expect("nonzero");
    let l = mf.lcm(mg);
    let a = f.checked_mul_term(&mf.quotient_of(&l), &field.inv(cf).expect("nonzero"))?;
    let b = g.checked_mul_term(&mg.quotient_of(&l), &field.inv(cg).expect("nonzero"))?;
    Ok(a.sub(&b))
}

/// Full reduction of `p` modulo `basis` (any order of divisors).
fn normal_form<F: Field>(p: &MultiPoly<F>, basis: &[MultiPoly<F>]) -> Result<MultiPoly<F>> {
    let field = p.field().clone();
    let mut work = p.clone();
    let mut rem = MultiPoly::zero(&field, p.nvars());
    while let Some((m, c)) = work.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        match basis.iter().find(|g| lm(g).divides(&m)) {
            Some(g) => {
                let (gm, gc) = g.leading_term().expect("nonzero");
                let factor = field.neg(&field.div(&c, gc).expect("nonzero"));
                let q = gm.quotient_of(&m);
                for (a, x) in g.terms.iter() {
                    work.add_term(a.checked_mul(&q)?, field.mul(x, &factor));
                }
            }
            None => {
                work.terms.remove(&m);
                rem.terms.insert(m, c);
            }
        }
    }
    Ok(rem)
}

fn interreduce<F: Field>(mut polys: Vec<MultiPoly<F>>) -> Result<Vec<MultiPoly<F>>> {
    polys.sort_by(|a, b| lm(a).cmp(lm(b)));
    let mut out = Vec::with_capacity(polys.len());
    for i in 0..polys.len() {
        let others: Vec<MultiPoly<F>> =
            polys.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
        let r = normal_form(&polys[i], &others)?;
        if !r.is_zero() {
            out.push(r.monic());
        }
    }
    out.sort_by(|a, b| lm(a).cmp(lm(b)));
    Ok(out)
}

impl<F: Field> GroebnerBasis<F> {
    pub fn polys(&self) -> &[MultiPoly<F>] {
        &self.polys
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn reduce(&self, p: &MultiPoly<F>) -> Result<MultiPoly<F>> {
        normal_form(p, &self.polys)
    }

    pub fn contains(&self, p: &MultiPoly<F>) -> Result<bool> {
        Ok(self.reduce(p)?.is_zero())
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.polys.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    /// True when the quotient ring has finite dimension: every variable has
    /// a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        (0..self.n).all(|j| self.polys.iter().any(|g| lm(g).is_one() || lm(g).pure_power_var() == Some(j)))
    }

    /// Monomials outside the leading ideal, in ascending order. Fails if the
    /// ideal is not zero-dimensional or the count would exceed `limit`.
    pub fn standard_monomials(&self, limit: u64) -> Result<Vec<Monomial>> {
        if self.is_unit_ideal() {
            return Ok(Vec::new());
        }
        if !self.is_zero_dimensional() {
            return Err(Error::StandardMonomialBound(limit));
        }
        let bounds: Vec<u16> = (0..self.n)
            .map(|j| {
                self.polys
                    .iter()
                    .filter(|g| lm(g).pure_power_var() == Some(j))
                    .map(|g| lm(g).exponents()[j])
                    .min()
                    .expect("zero-dimensional")
            })
            .collect();
        let leads: Vec<&Monomial> = self.polys.iter().map(lm).collect();
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.n];
        self.collect(0, &bounds, &leads, &mut exps, &mut out, limit)?;
        out.sort();
        Ok(out)
    }

    fn collect(
        &self,
        j: usize,
        bounds: &[u16],
        leads: &[&Monomial],
        exps: &mut Vec<u16>,
        out: &mut Vec<Monomial>,
        limit: u64,
    ) -> Result<()> {
        if j == self.n {
            let m = Monomial::new(exps.clone());
            if !leads.iter().any(|l| l.divides(&m)) {
                if out.len() as u64 >= limit {
                    return Err(Error::StandardMonomialBound(limit));
                }
                out.push(m);
            }
            return Ok(());
        }
        for e in 0..bounds[j] {
            exps[j] = e;
            // prune: if the partial monomial (later exponents zero) is already
            // in the leading ideal, so is every extension
            let partial = Monomial::new(exps.iter().take(j + 1).copied().chain(std::iter::repeat(0)).take(self.n).collect());
            if leads.iter().any(|l| l.divides(&partial)) {
                break;
            }
            self.collect(j + 1, bounds, leads, exps, out, limit)?;
        }
        exps[j] = 0;
        Ok(())
    }

    pub fn quotient_dimension(&self, limit: u64) -> Result<u64> {
        Ok(self.standard_monomials(limit)?.len() as u64)
    }
}
