//! Euler characteristics and the dimension they predict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{build_field, Field, FiniteField, GaloisField, ZechField};
use crate::mpoly::{extend_scalars, MultiPoly};

/// Sign of the vanishing-cycle correction in `χ(X_f^d)`, fixed so that a
/// nodal plane cubic has `χ = 1` and a triangle of lines has `χ = 3`.
pub const VANISHING_CYCLE_SIGN: i128 = -1;

fn ipow(b: i128, e: usize) -> i128 {
    (0..e).fold(1i128, |acc, _| acc * b)
}

/// `(d - 1)^n - Σ μ_i`.
pub fn predicted_dimension(d: u32, n: usize, milnor_sum: u64) -> Result<i128> {
    let top = ipow(d as i128 - 1, n);
    let dim = top - milnor_sum as i128;
    if dim < 0 {
        return Err(Error::NegativeDimension { top, milnor_sum: milnor_sum as i128 });
    }
    Ok(dim)
}

/// `χ` of a smooth degree-`d` hypersurface in `P^n`:
/// `((1 - d)^{n+1} - 1) / d + n + 1`.
pub fn euler_smooth_fiber(d: u32, n: usize) -> i128 {
    let d = d as i128;
    (ipow(1 - d, n + 1) - 1) / d + n as i128 + 1
}

/// `χ(X_f^d) = ((1 - d)^n - 1) / d + n + σ (-1)^n Σ μ`.
pub fn euler_singular_top_form(d: u32, n: usize, milnor_sum: u64) -> i128 {
    euler_singular_top_form_with_sign(d, n, milnor_sum, VANISHING_CYCLE_SIGN)
}

pub fn euler_singular_top_form_with_sign(d: u32, n: usize, milnor_sum: u64, sigma: i128) -> i128 {
    let di = d as i128;
    (ipow(1 - di, n) - 1) / di + n as i128 + sigma * ipow(-1, n) * milnor_sum as i128
}

/// The sign among `±1` reproducing every `(d, n, Σμ, χ)` oracle, if exactly
/// one does.
pub fn resolve_vanishing_sign(oracles: &[(u32, usize, u64, i128)]) -> Option<i128> {
    let fits: Vec<i128> = [1i128, -1]
        .into_iter()
        .filter(|&s| oracles.iter().all(|&(d, n, mu, chi)| euler_singular_top_form_with_sign(d, n, mu, s) == chi))
        .collect();
    (fits.len() == 1).then(|| fits[0])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerChain {
    pub sigma: i128,
    /// `χ` of the projective closure of a generic fiber.
    pub closure_of_fiber: i128,
    /// `χ(X_f^d)`, the part at infinity.
    pub top_form: i128,
    /// `χ_c` of a generic fiber.
    pub generic_fiber: i128,
    /// `χ_c(A^n, f^* L) = 1 - χ_c(generic fiber)`.
    pub sheaf: i128,
    /// `(-1)^n χ_c(A^n, f^* L)`.
    pub dimension: i128,
}

/// Runs the chain of Euler characteristics down to the dimension and checks
/// it against [`predicted_dimension`].
pub fn dimension_via_chi(d: u32, n: usize, milnor_sum: u64) -> Result<EulerChain> {
    let chain = euler_chain_with_sign(d, n, milnor_sum, VANISHING_CYCLE_SIGN);
    let closed = predicted_dimension(d, n, milnor_sum)?;
    if chain.dimension != closed {
        return Err(Error::ChainMismatch { chain: chain.dimension, closed });
    }
    Ok(chain)
}

pub fn euler_chain_with_sign(d: u32, n: usize, milnor_sum: u64, sigma: i128) -> EulerChain {
    let closure_of_fiber = euler_smooth_fiber(d, n);
    let top_form = euler_singular_top_form_with_sign(d, n, milnor_sum, sigma);
    let generic_fiber = closure_of_fiber - top_form;
    let sheaf = 1 - generic_fiber;
    EulerChain { sigma, closure_of_fiber, top_form, generic_fiber, sheaf, dimension: ipow(-1, n) * sheaf }
}

/// Fits `N_m = a q^m + c` to point counts for `m = 1, 2` and checks every
/// further count; returns `χ = a + c`.
pub fn chi_from_point_counts(q: u64, counts: &[u64]) -> Option<i128> {
    if counts.len() < 2 {
        return None;
    }
    let q = q as i128;
    let (n1, n2) = (counts[0] as i128, counts[1] as i128);
    let num = n2 - n1;
    let den = q * q - q;
    if num % den != 0 {
        return None;
    }
    let a = num / den;
    let c = n1 - a * q;
    let fits = counts.iter().enumerate().all(|(i, &n)| a * ipow(q, i + 1) + c == n as i128);
    fits.then_some(a + c)
}

/// `#{form = 0}` in `P^{n-1}(F_{q^m})` for `m = 1..=m_max`.
pub fn projective_point_counts(form: &MultiPoly<GaloisField>, base: &GaloisField, m_max: usize) -> Result<Vec<u64>> {
    let n = form.nvars();
    let mut out = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let ext = build_field(base.prime(), base.degree() * m)?;
        let z = ZechField::new(&ext)?;
        let g = extend_scalars(form, base, &z)?;
        let q = z.order();
        let mut count = 0u64;
        for lead in 0..n {
            let free = (n - lead - 1) as u32;
            let mut pt = vec![z.zero(); n];
            pt[lead] = z.one();
            for idx in 0..q.pow(free) {
                let mut rest = idx;
                for x in pt[lead + 1..].iter_mut() {
                    *x = z.element_at(rest % q);
                    rest /= q;
                }
                if z.is_zero(&g.evaluate(&pt)?) {
                    count += 1;
                }
            }
        }
        out.push(count);
    }
    Ok(out)
}
