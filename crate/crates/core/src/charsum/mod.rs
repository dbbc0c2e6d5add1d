//! Exact exponential sums `S(Ψ_b, f) = Σ_{x ∈ F^n} ζ_p^{b·Tr f(x)}` via trace
//! histograms, over the base field and its extensions.

mod cycint;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use cycint::CycInt;

use crate::error::{Error, Result};
use crate::exec::{run_chunks, ExecConfig};
use crate::ff::{build_field, chunk_range, FiniteField, GaloisField, ZechField};
use crate::mpoly::{extend_scalars, MultiPoly};

/// `counts[a] = #{x ∈ F_{q^m}^n : Tr f(x) = a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHistogram {
    pub p: u64,
    pub counts: Vec<u64>,
    /// Order of the base field.
    pub q: u64,
    pub n: usize,
    /// Extension degree over the base field.
    pub m: usize,
}

impl TraceHistogram {
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }
}

/// A non-trivial additive character `Ψ_b(a) = ζ_p^{ab}` of `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterChoice {
    b: u64,
}

impl CharacterChoice {
    pub fn new(p: u64, b: u64) -> Result<Self> {
        if b == 0 || b >= p {
            return Err(Error::InvalidArgument(format!("character index must lie in 1..{}, got {b}", p - 1)));
        }
        Ok(CharacterChoice { b })
    }

    pub fn index(&self) -> u64 {
        self.b
    }
}

/// `Σ_a N_a ζ^{ab}`.
pub fn char_sum(h: &TraceHistogram, psi: CharacterChoice) -> CycInt {
    let p = h.p;
    let mut coeffs = vec![BigInt::from(0); p as usize];
    for (a, &n) in h.counts.iter().enumerate() {
        coeffs[((a as u64 * psi.b) % p) as usize] += n;
    }
    CycInt::from_coeffs(p, coeffs)
}

/// Number of evaluations needed to enumerate `F_Q^n`, saturating.
pub fn evaluation_count(order: u64, n: usize) -> u128 {
    (order as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

/// Chunk count used for a flat enumeration of `total` points. Depends only
/// on the problem size, never on the worker count.
pub fn default_chunks(total: u64) -> usize {
    (total >> 16).clamp(1, 1024) as usize
}

/// Histogram of `Tr f` over `field^n` for a polynomial with coefficients in
/// `field` itself.
pub fn histogram_over<F: FiniteField>(f: &MultiPoly<F>, field: &F, exec: &ExecConfig) -> Result<TraceHistogram> {
    let total = evaluation_count(field.order(), f.nvars());
    if total > exec.budget {
        return Err(Error::BudgetExceeded { required: total, budget: exec.budget });
    }
    let total = u64::try_from(total).map_err(|_| Error::BudgetExceeded { required: u128::MAX, budget: exec.budget })?;
    histogram_with_chunks(f, field, default_chunks(total), exec)
}

/// As [`histogram_over`] with an explicit chunk count and no budget check.
pub fn histogram_with_chunks<F: FiniteField>(
    f: &MultiPoly<F>,
    field: &F,
    chunks: usize,
    exec: &ExecConfig,
) -> Result<TraceHistogram> {
    let n = f.nvars();
    let q = field.order();
    let p = field.prime();
    let total = u64::try_from(evaluation_count(q, n))
        .map_err(|_| Error::BudgetExceeded { required: u128::MAX, budget: exec.budget })?;
    let kernel = Kernel::new(f, field);
    let parts = run_chunks(exec, chunks.max(1), total, |c| kernel.run(chunk_range(total, c, chunks.max(1))));
    let mut counts = vec![0u64; p as usize];
    for part in parts {
        for (a, v) in counts.iter_mut().zip(part) {
            *a += v;
        }
    }
    Ok(TraceHistogram { p, counts, q, n, m: 1 })
}

/// `f` viewed as a polynomial in the last variable with coefficients in the
/// others.
struct Kernel<'a, F: FiniteField> {
    field: &'a F,
    n: usize,
    q: u64,
    p: usize,
    /// `slices[k]` lists the terms `(outer exponents, c)` of `x_n^k`.
    slices: Vec<Vec<(Vec<u16>, F::Elem)>>,
}

impl<'a, F: FiniteField> Kernel<'a, F> {
    fn new(f: &MultiPoly<F>, field: &'a F) -> Self {
        let n = f.nvars();
        let mut slices: Vec<Vec<(Vec<u16>, F::Elem)>> = Vec::new();
        for (m, c) in f.terms() {
            let e = m.exponents();
            let k = if n == 0 { 0 } else { e[n - 1] as usize };
            if slices.len() <= k {
                slices.resize_with(k + 1, Vec::new);
            }
            let outer = if n == 0 { Vec::new() } else { e[..n - 1].to_vec() };
            slices[k].push((outer, c.clone()));
        }
        if slices.is_empty() {
            slices.push(Vec::new());
        }
        Kernel { field, n, q: field.order(), p: field.prime() as usize, slices }
    }

    fn run(&self, range: std::ops::Range<u64>) -> Vec<u64> {
        let field = self.field;
        let mut counts = vec![0u64; self.p];
        if range.is_empty() {
            return counts;
        }
        if self.n == 0 {
            let v = self.slices[0].iter().fold(field.zero(), |acc, (_, c)| field.add(&acc, c));
            counts[field.trace_to_prime(&v) as usize] += range.end - range.start;
            return counts;
        }
        let q = self.q;
        let mut outer = vec![field.zero(); self.n - 1];
        let mut coeffs = vec![field.zero(); self.slices.len()];
        let mut o = range.start / q;
        while o * q < range.end {
            let lo = range.start.max(o * q) - o * q;
            let hi = range.end.min((o + 1) * q) - o * q;
            let mut rest = o;
            for x in outer.iter_mut() {
                *x = field.element_at(rest % q);
                rest /= q;
            }
            for (slot, terms) in coeffs.iter_mut().zip(&self.slices) {
                *slot = terms.iter().fold(field.zero(), |acc, (e, c)| {
                    let t = e.iter().zip(&outer).fold(c.clone(), |t, (&k, x)| {
                        if k == 0 {
                            t
                        } else {
                            field.mul(&t, &field.pow(x, k as u64))
                        }
                    });
                    field.add(&acc, &t)
                });
            }
            let deg = coeffs.iter().rposition(|c| !field.is_zero(c)).unwrap_or(0);
            if deg == 0 {
                counts[field.trace_to_prime(&coeffs[0]) as usize] += hi - lo;
            } else {
                let top = &coeffs[deg];
                for j in lo..hi {
                    let y = field.element_at(j);
                    let mut v = top.clone();
                    for c in coeffs[..deg].iter().rev() {
                        v = field.add(&field.mul(&v, &y), c);
                    }
                    counts[field.trace_to_prime(&v) as usize] += 1;
                }
            }
            o += 1;
        }
        counts
    }
}

/// Histogram of `Tr_{F_{q^m}/F_p} f` over `F_{q^m}^n`, where `f` has
/// coefficients in the base field `F_q`.
pub fn trace_histogram(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    m: usize,
    exec: &ExecConfig,
) -> Result<TraceHistogram> {
    if m == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    let n = f.nvars();
    let required = evaluation_count(base.order(), n * m);
    if required > exec.budget {
        return Err(Error::BudgetExceeded { required, budget: exec.budget });
    }
    let ext = build_field(base.prime(), base.degree() * m)?;
    let mut h = if ZechField::supports(&ext) {
        let z = ZechField::new(&ext)?;
        histogram_over(&extend_scalars(f, base, &z)?, &z, exec)?
    } else {
        histogram_over(&extend_scalars(f, base, &ext)?, &ext, exec)?
    };
    h.q = base.order();
    h.m = m;
    Ok(h)
}

/// Histograms for `m = 1..=m_max`, stopping at the first degree whose
/// enumeration exceeds the budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionHistograms {
    pub histograms: Vec<TraceHistogram>,
    /// Set when the sequence stopped before `m_max`: `(m, required steps)`.
    pub truncated_at: Option<(usize, u128)>,
}

impl ExtensionHistograms {
    pub fn sums(&self, psi: CharacterChoice) -> Vec<CycInt> {
        self.histograms.iter().map(|h| char_sum(h, psi)).collect()
    }
}

pub fn extension_histograms(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    m_max: usize,
    exec: &ExecConfig,
) -> Result<ExtensionHistograms> {
    let mut histograms = Vec::new();
    for m in 1..=m_max {
        match trace_histogram(f, base, m, exec) {
            Ok(h) => histograms.push(h),
            Err(Error::BudgetExceeded { required, .. }) => {
                return Ok(ExtensionHistograms { histograms, truncated_at: Some((m, required)) })
            }
            Err(Error::FieldTooLarge { .. }) => {
                let required = evaluation_count(base.order(), f.nvars() * m);
                return Ok(ExtensionHistograms { histograms, truncated_at: Some((m, required)) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ExtensionHistograms { histograms, truncated_at: None })
}

/// `S_1, …, S_M` for one character; see [`extension_histograms`].
pub fn extension_sums(
    f: &MultiPoly<GaloisField>,
    base: &GaloisField,
    m_max: usize,
    psi: CharacterChoice,
    exec: &ExecConfig,
) -> Result<(Vec<CycInt>, Option<(usize, u128)>)> {
    let e = extension_histograms(f, base, m_max, exec)?;
    Ok((e.sums(psi), e.truncated_at))
}
