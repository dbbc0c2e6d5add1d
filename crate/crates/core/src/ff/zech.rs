//! Zech-logarithm representation of small finite fields.
//!
//! An element is stored as `0` for zero and `k + 1` for `g^k`, where `g` is
//! the first primitive element in odometer order. Multiplication is an
//! addition of logarithms, addition goes through the Zech table
//! `Z(k) = log(1 + g^k)`, and the absolute trace is a table lookup.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::fp_poly::prime_factors;
use super::{Field, FieldDescriptor, FiniteField, GaloisField};
use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const ZECH_TABLE_LIMIT: u64 = 1 << 22;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ZechElem(pub u32);

struct Tables {
    desc: Arc<FieldDescriptor>,
    /// `q - 1`
    n: u32,
    /// index (odometer) of `g^k`
    exp: Vec<u32>,
    /// log of index `i`; entry 0 unused
    log: Vec<u32>,
    /// `log(1 + g^k) + 1`, or 0 when `1 + g^k = 0`
    zech: Vec<u32>,
    /// absolute trace of `g^k`
    trace: Vec<u32>,
}

#[derive(Clone)]
pub struct ZechField(Arc<Tables>);

impl fmt::Debug for ZechField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Zech(F_{}^{})", self.0.desc.p, self.0.desc.s)
    }
}

fn zech_cache() -> &'static Mutex<HashMap<(u64, usize), ZechField>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), ZechField>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn digits(mut idx: u64, p: u64, s: usize) -> Vec<u64> {
    (0..s)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

fn index_of(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

impl ZechField {
    /// Tables for the same field as `field`; cached per `(p, s)`.
    pub fn new(field: &GaloisField) -> Result<Self> {
        let desc = field.descriptor().clone();
        let key = (desc.p, desc.s);
        if let Some(z) = zech_cache().lock().unwrap().get(&key) {
            return Ok(z.clone());
        }
        if desc.order > ZECH_TABLE_LIMIT {
            return Err(Error::FieldTooLarge { p: desc.p, s: desc.s, limit: ZECH_TABLE_LIMIT });
        }
        let z = ZechField(Arc::new(build_tables(field)));
        zech_cache().lock().unwrap().insert(key, z.clone());
        Ok(z)
    }

    /// Whether [`ZechField::new`] would accept this field.
    pub fn supports(field: &GaloisField) -> bool {
        field.order() <= ZECH_TABLE_LIMIT
    }

    pub fn galois(&self) -> GaloisField {
        GaloisField::from_descriptor(self.0.desc.clone())
    }

    /// Discrete logarithm of a nonzero element.
    #[inline]
    pub fn log(&self, a: ZechElem) -> Option<u32> {
        a.0.checked_sub(1)
    }

    #[inline]
    pub fn from_log(&self, k: u32) -> ZechElem {
        ZechElem(k % self.0.n + 1)
    }
}

fn build_tables(field: &GaloisField) -> Tables {
    let desc = field.descriptor().clone();
    let (p, s, q) = (desc.p, desc.s, desc.order);
    let n = (q - 1) as u32;
    let factors = prime_factors(q - 1);
    let g = (1..q)
        .map(|i| field.element_at(i))
        .find(|x| factors.iter().all(|&r| !field.is_one(&field.pow(x, (q - 1) / r))))
        .expect("multiplicative group is cyclic");

    // multiplication by g as a linear map on coordinates
    let basis_images: Vec<Vec<u64>> = (0..s)
        .map(|j| {
            let mut e = vec![0u64; s];
            e[j] = 1;
            field.mul(&g, &field.from_coeffs(&e)).coeffs
        })
        .collect();
    let basis_traces: Vec<u64> = (0..s)
        .map(|j| {
            let mut e = vec![0u64; s];
            e[j] = 1;
            field.trace_to_prime(&field.from_coeffs(&e))
        })
        .collect();

    let mut exp = Vec::with_capacity(n as usize);
    let mut log = vec![0u32; q as usize];
    let mut trace = Vec::with_capacity(n as usize);
    let mut cur = vec![0u64; s];
    cur[0] = 1;
    for k in 0..n {
        let idx = index_of(&cur, p);
        exp.push(idx as u32);
        log[idx as usize] = k;
        let tr = cur.iter().zip(&basis_traces).fold(0u64, |acc, (&c, &t)| (acc + c * t % p) % p);
        trace.push(tr as u32);
        let mut next = vec![0u64; s];
        for (j, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &b) in basis_images[j].iter().enumerate() {
                next[i] = (next[i] + c * b) % p;
            }
        }
        cur = next;
    }

    let zech = (0..n)
        .map(|k| {
            let mut d = digits(exp[k as usize] as u64, p, s);
            d[0] = (d[0] + 1) % p;
            let idx = index_of(&d, p);
            if idx == 0 {
                0
            } else {
                log[idx as usize] + 1
            }
        })
        .collect();

    Tables { desc, n, exp, log, zech, trace }
}

impl Field for ZechField {
    type Elem = ZechElem;

    #[inline]
    fn zero(&self) -> ZechElem {
        ZechElem(0)
    }

    #[inline]
    fn one(&self) -> ZechElem {
        ZechElem(1)
    }

    fn from_int(&self, v: i64) -> ZechElem {
        let r = v.rem_euclid(self.0.desc.p as i64) as usize;
        if r == 0 {
            ZechElem(0)
        } else {
            ZechElem(self.0.log[r] + 1)
        }
    }

    #[inline]
    fn is_zero(&self, a: &ZechElem) -> bool {
        a.0 == 0
    }

    #[inline]
    fn add(&self, a: &ZechElem, b: &ZechElem) -> ZechElem {
        if a.0 == 0 {
            return *b;
        }
        if b.0 == 0 {
            return *a;
        }
        let t = &*self.0;
        let (la, lb) = (a.0 - 1, b.0 - 1);
        let d = if lb >= la { lb - la } else { lb + t.n - la };
        let z = t.zech[d as usize];
        if z == 0 {
            return ZechElem(0);
        }
        let mut r = la + (z - 1);
        if r >= t.n {
            r -= t.n;
        }
        ZechElem(r + 1)
    }

    #[inline]
    fn neg(&self, a: &ZechElem) -> ZechElem {
        if a.0 == 0 || self.0.desc.p == 2 {
            return *a;
        }
        let t = &*self.0;
        let mut r = a.0 - 1 + t.n / 2;
        if r >= t.n {
            r -= t.n;
        }
        ZechElem(r + 1)
    }

    #[inline]
    fn mul(&self, a: &ZechElem, b: &ZechElem) -> ZechElem {
        if a.0 == 0 || b.0 == 0 {
            return ZechElem(0);
        }
        let n = self.0.n;
        let mut r = (a.0 - 1) + (b.0 - 1);
        if r >= n {
            r -= n;
        }
        ZechElem(r + 1)
    }

    fn inv(&self, a: &ZechElem) -> Option<ZechElem> {
        let la = a.0.checked_sub(1)?;
        let n = self.0.n;
        Some(ZechElem((n - la) % n + 1))
    }

    fn pow(&self, a: &ZechElem, exp: u64) -> ZechElem {
        match a.0 {
            0 if exp == 0 => ZechElem(1),
            0 => ZechElem(0),
            la => {
                let n = self.0.n as u64;
                ZechElem((((la - 1) as u64 * (exp % n)) % n) as u32 + 1)
            }
        }
    }

    fn characteristic(&self) -> u64 {
        self.0.desc.p
    }

    fn render(&self, a: &ZechElem) -> String {
        super::render_coeffs(&self.to_coeffs(a))
    }

    fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0.desc == *other.0.desc
    }
}

impl FiniteField for ZechField {
    fn descriptor(&self) -> &Arc<FieldDescriptor> {
        &self.0.desc
    }

    /// Index 0 is zero, index `k + 1` is `g^k`.
    #[inline]
    fn element_at(&self, i: u64) -> ZechElem {
        ZechElem(i as u32)
    }

    fn to_coeffs(&self, a: &ZechElem) -> Vec<u64> {
        let t = &*self.0;
        match a.0 {
            0 => vec![0; t.desc.s],
            k => digits(t.exp[(k - 1) as usize] as u64, t.desc.p, t.desc.s),
        }
    }

    fn from_coeffs(&self, coeffs: &[u64]) -> ZechElem {
        let idx = index_of(coeffs, self.0.desc.p);
        if idx == 0 {
            ZechElem(0)
        } else {
            ZechElem(self.0.log[idx as usize] + 1)
        }
    }

    #[inline]
    fn trace_to_prime(&self, a: &ZechElem) -> u64 {
        match a.0 {
            0 => 0,
            k => self.0.trace[(k - 1) as usize] as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;

    fn agree(p: u64, s: usize) {
        let g = build_field(p, s).unwrap();
        let z = ZechField::new(&g).unwrap();
        let elems: Vec<_> = g.enumerate().collect();
        let step = (elems.len() / 40).max(1);
        for a in elems.iter().step_by(step) {
            let za = z.from_coeffs(&a.coeffs);
            assert_eq!(z.to_coeffs(&za), a.coeffs);
            assert_eq!(z.trace_to_prime(&za), g.trace_to_prime(a));
            assert_eq!(z.to_coeffs(&z.neg(&za)), g.neg(a).coeffs);
            if let Some(ai) = g.inv(a) {
                assert_eq!(z.to_coeffs(&z.inv(&za).unwrap()), ai.coeffs);
            }
            for b in elems.iter().step_by(step) {
                let zb = z.from_coeffs(&b.coeffs);
                assert_eq!(z.to_coeffs(&z.add(&za, &zb)), g.add(a, b).coeffs);
                assert_eq!(z.to_coeffs(&z.mul(&za, &zb)), g.mul(a, b).coeffs);
                assert_eq!(z.to_coeffs(&z.sub(&za, &zb)), g.sub(a, b).coeffs);
            }
        }
        assert_eq!(z.to_coeffs(&z.from_int(3)), g.from_int(3).coeffs);
    }

    #[test]
    fn matches_vector_arithmetic() {
        for &(p, s) in &[(2u64, 1usize), (2, 4), (3, 3), (5, 1), (5, 2), (7, 2), (13, 1), (2, 8)] {
            agree(p, s);
        }
    }

    #[test]
    fn enumeration_covers_field() {
        let g = build_field(3, 3).unwrap();
        let z = ZechField::new(&g).unwrap();
        let all: std::collections::HashSet<_> = (0..z.order()).map(|i| z.to_coeffs(&z.element_at(i))).collect();
        assert_eq!(all.len(), 27);
    }

    #[test]
    fn too_large() {
        let g = build_field(2, 23).unwrap();
        assert!(!ZechField::supports(&g));
        assert!(ZechField::new(&g).is_err());
    }
}
