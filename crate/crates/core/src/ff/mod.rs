//! Finite fields `F_{p^s}` in the power basis of a deterministically chosen
//! modulus, Zech-logarithm tables for fast enumeration, and the rationals.

pub mod fp_poly;
mod rational;
mod zech;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use fp_poly::{inv_mod_p, is_irreducible, is_prime, mul_mod_p};

pub use rational::Rationals;
pub use zech::{ZechElem, ZechField, ZECH_TABLE_LIMIT};

/// Default bound on `p^s`.
pub const DEFAULT_FIELD_LIMIT: u64 = 1 << 31;

/// A field context. Elements are plain values; all arithmetic goes through
/// the context.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn render(&self, a: &Self::Elem) -> String;
    /// Whether two contexts describe the same field.
    fn same_field(&self, other: &Self) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// A finite field `F_{p^s}` with a fixed power basis.
pub trait FiniteField: Field {
    fn descriptor(&self) -> &Arc<FieldDescriptor>;

    fn prime(&self) -> u64 {
        self.descriptor().p
    }

    fn degree(&self) -> usize {
        self.descriptor().s
    }

    fn order(&self) -> u64 {
        self.descriptor().order
    }

    /// The `i`-th element of a fixed enumeration of the field, `0 <= i < q`.
    /// Index 0 is always zero.
    fn element_at(&self, i: u64) -> Self::Elem;

    /// Coordinates in the power basis of the modulus.
    fn to_coeffs(&self, a: &Self::Elem) -> Vec<u64>;

    fn from_coeffs(&self, coeffs: &[u64]) -> Self::Elem;

    /// `Tr_{F_{p^s}/F_p}(a)` as a residue in `[0, p)`.
    fn trace_to_prime(&self, a: &Self::Elem) -> u64 {
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..self.degree() {
            acc = self.add(&acc, &x);
            x = self.frobenius(&x);
        }
        self.to_coeffs(&acc)[0]
    }

    /// `a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.prime())
    }
}

/// `F_{p^s}` with its modulus: a monic irreducible polynomial of degree `s`,
/// coefficients stored low-to-high (length `s + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub s: usize,
    pub modulus: Vec<u64>,
    pub order: u64,
}

/// An element of `F_{p^s}`: `s` residues mod `p` in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

/// Vector-representation arithmetic in `F_{p^s}`. Works for every field the
/// size bound admits; [`ZechField`] is the fast path for small ones.
#[derive(Clone)]
pub struct GaloisField(Arc<FieldDescriptor>);

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.s)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u64, usize), Arc<FieldDescriptor>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<FieldDescriptor>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `F_{p^s}` under the default size bound `p^s <= 2^31`.
pub fn build_field(p: u64, s: usize) -> Result<GaloisField> {
    build_field_with_limit(p, s, DEFAULT_FIELD_LIMIT)
}

/// Builds `F_{p^s}` with the lexicographically first monic irreducible modulus
/// of degree `s`, comparing the coefficient vectors `(c_0, ..., c_{s-1})`
/// with `c_0` most significant. For `s = 1` the modulus is `x`.
pub fn build_field_with_limit(p: u64, s: usize, limit: u64) -> Result<GaloisField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    let order = u32::try_from(s)
        .ok()
        .and_then(|e| p.checked_pow(e))
        .filter(|&q| q <= limit)
        .ok_or(Error::FieldTooLarge { p, s, limit })?;
    if let Some(d) = field_cache().lock().unwrap().get(&(p, s)) {
        return Ok(GaloisField(d.clone()));
    }
    let modulus = if s == 1 { vec![0, 1] } else { first_irreducible(p, s) };
    let desc = Arc::new(FieldDescriptor { p, s, modulus, order });
    field_cache().lock().unwrap().insert((p, s), desc.clone());
    Ok(GaloisField(desc))
}

fn first_irreducible(p: u64, s: usize) -> Vec<u64> {
    // c_0 = 0 makes the polynomial divisible by x, so start at c_0 = 1.
    let mut lower = vec![0u64; s];
    lower[0] = 1;
    loop {
        let mut f = lower.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // Lexicographic successor with c_0 most significant.
        let mut j = s - 1;
        loop {
            lower[j] += 1;
            if lower[j] < p {
                break;
            }
            lower[j] = 0;
            assert!(j > 0, "no irreducible polynomial of degree {s} over F_{p}");
            j -= 1;
        }
    }
}

impl GaloisField {
    pub fn from_descriptor(desc: Arc<FieldDescriptor>) -> Self {
        GaloisField(desc)
    }

    /// Validated element construction.
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.0.s {
            return Err(Error::DimensionMismatch { expected: self.0.s, got: coeffs.len() });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.0.p) {
            return Err(Error::InvalidArgument(format!("residue {c} not reduced mod {}", self.0.p)));
        }
        Ok(FieldElement { coeffs: coeffs.to_vec() })
    }

    /// The class of the polynomial variable, `t`.
    pub fn generator(&self) -> FieldElement {
        let mut c = vec![0; self.0.s];
        if self.0.s > 1 {
            c[1] = 1;
        } else {
            // In F_p the class of t is the root of the modulus x, i.e. zero.
            c[0] = 0;
        }
        FieldElement { coeffs: c }
    }

    /// Every element in odometer order of the coefficient vectors.
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.order).map(move |i| self.element_at(i))
    }

    /// The `chunk`-th of `chunks` contiguous pieces of [`Self::enumerate`].
    pub fn enumerate_chunk(&self, chunk: usize, chunks: usize) -> impl Iterator<Item = FieldElement> + '_ {
        chunk_range(self.0.order, chunk, chunks).map(move |i| self.element_at(i))
    }

    /// `Tr_{F_{q^m}/F_q}(a) = sum_{i<m} a^{q^i}` where `q = p^sub_degree`.
    pub fn relative_trace(&self, a: &FieldElement, sub_degree: usize) -> Result<FieldElement> {
        relative_trace(self, a, sub_degree)
    }
}

/// Relative trace down to the subfield of degree `sub_degree` over `F_p`.
pub fn relative_trace<F: FiniteField>(field: &F, a: &F::Elem, sub_degree: usize) -> Result<F::Elem> {
    let s = field.degree();
    if sub_degree == 0 || !s.is_multiple_of(sub_degree) {
        return Err(Error::IncompatibleFields(format!("degree {sub_degree} does not divide {s}")));
    }
    let q = field.prime().pow(sub_degree as u32);
    let mut acc = field.zero();
    let mut x = a.clone();
    for _ in 0..s / sub_degree {
        acc = field.add(&acc, &x);
        x = field.pow(&x, q);
    }
    Ok(acc)
}

/// Contiguous sub-range `chunk` of `0..total` split into `chunks` pieces.
pub fn chunk_range(total: u64, chunk: usize, chunks: usize) -> Range<u64> {
    let chunks = chunks.max(1) as u128;
    let chunk = chunk as u128;
    let lo = (total as u128 * chunk / chunks) as u64;
    let hi = (total as u128 * (chunk + 1) / chunks) as u64;
    lo..hi
}

impl Field for GaloisField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.0.s] }
    }

    fn one(&self) -> FieldElement {
        let mut c = vec![0; self.0.s];
        c[0] = 1;
        FieldElement { coeffs: c }
    }

    fn from_int(&self, v: i64) -> FieldElement {
        let mut c = vec![0; self.0.s];
        c[0] = v.rem_euclid(self.0.p as i64) as u64;
        FieldElement { coeffs: c }
    }

    fn is_zero(&self, a: &FieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % p).collect() }
    }

    fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement { coeffs: a.coeffs.iter().map(|&x| (p - x) % p).collect() }
    }

    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.0.p;
        FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect() }
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let FieldDescriptor { p, s, ref modulus, .. } = *self.0;
        if s == 1 {
            return FieldElement { coeffs: vec![mul_mod_p(a.coeffs[0], b.coeffs[0], p)] };
        }
        let mut prod = vec![0u64; 2 * s - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod_p(x, y, p)) % p;
            }
        }
        for i in (s..2 * s - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..s {
                let t = mul_mod_p(c, modulus[j], p);
                prod[i - s + j] = (prod[i - s + j] + p - t) % p;
            }
        }
        prod.truncate(s);
        FieldElement { coeffs: prod }
    }

    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        if self.0.s == 1 {
            return Some(FieldElement { coeffs: vec![inv_mod_p(a.coeffs[0], self.0.p)] });
        }
        Some(self.pow(a, self.0.order - 2))
    }

    fn characteristic(&self) -> u64 {
        self.0.p
    }

    fn render(&self, a: &FieldElement) -> String {
        render_coeffs(&a.coeffs)
    }

    fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

/// Renders a power-basis vector as a polynomial in `t`; prime-field elements
/// render as plain integers.
pub(crate) fn render_coeffs(coeffs: &[u64]) -> String {
    if coeffs.len() == 1 {
        return coeffs[0].to_string();
    }
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    match parts.len() {
        0 => "0".to_string(),
        1 => parts.pop().unwrap(),
        _ => format!("({})", parts.join("+")),
    }
}

impl FiniteField for GaloisField {
    fn descriptor(&self) -> &Arc<FieldDescriptor> {
        &self.0
    }

    fn element_at(&self, mut i: u64) -> FieldElement {
        let p = self.0.p;
        let coeffs = (0..self.0.s)
            .map(|_| {
                let c = i % p;
                i /= p;
                c
            })
            .collect();
        FieldElement { coeffs }
    }

    fn to_coeffs(&self, a: &FieldElement) -> Vec<u64> {
        a.coeffs.clone()
    }

    fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        FieldElement { coeffs: coeffs.to_vec() }
    }
}

/// The embedding `F_{p^s} -> F_{p^S}` (`s | S`) sending the class of `t` to
/// the root of the source modulus with the lexicographically smallest
/// coefficient vector in the target.
#[derive(Debug, Clone)]
pub struct Embedding<T: FiniteField> {
    source: GaloisField,
    target: T,
    generator_image: T::Elem,
}

impl<T: FiniteField> Embedding<T> {
    pub fn new(source: &GaloisField, target: &T) -> Result<Self> {
        let (sp, ss) = (source.prime(), source.degree());
        let (tp, ts) = (target.prime(), target.degree());
        if sp != tp {
            return Err(Error::IncompatibleFields(format!("characteristics {sp} and {tp}")));
        }
        if ts % ss != 0 {
            return Err(Error::IncompatibleFields(format!("degree {ss} does not divide {ts}")));
        }
        let modulus = &source.descriptor().modulus;
        let generator_image = if ss == 1 {
            target.zero()
        } else {
            let eval = |x: &T::Elem| {
                modulus
                    .iter()
                    .rev()
                    .fold(target.zero(), |acc, &c| target.add(&target.mul(&acc, x), &target.from_int(c as i64)))
            };
            let root = (0..target.order())
                .map(|i| target.element_at(i))
                .find(|x| target.is_zero(&eval(x)))
                .ok_or_else(|| Error::IncompatibleFields("source modulus has no root in target".into()))?;
            let mut best = root.clone();
            let mut conj = root;
            for _ in 1..ss {
                conj = target.frobenius(&conj);
                if target.to_coeffs(&conj) < target.to_coeffs(&best) {
                    best = conj.clone();
                }
            }
            best
        };
        Ok(Embedding { source: source.clone(), target: target.clone(), generator_image })
    }

    pub fn generator_image(&self) -> &T::Elem {
        &self.generator_image
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn source(&self) -> &GaloisField {
        &self.source
    }

    pub fn apply(&self, x: &FieldElement) -> T::Elem {
        let t = &self.target;
        x.coeffs
            .iter()
            .rev()
            .fold(t.zero(), |acc, &c| t.add(&t.mul(&acc, &self.generator_image), &t.from_int(c as i64)))
    }
}

/// Embeds one element; see [`Embedding`].
pub fn embed<T: FiniteField>(x: &FieldElement, source: &GaloisField, target: &T) -> Result<T::Elem> {
    Ok(Embedding::new(source, target)?.apply(x))
}
