//! Frobenius eigenvalues from extension sums: exact Newton identities and
//! recurrence checks in `Z[ζ_p]`, then numeric roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charsum::CycInt;

/// Relative tolerance on root moduli.
pub const PURITY_TOLERANCE: f64 = 1e-6;
/// Allowed excess of the bound ratio over 1.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    /// Newton division exact, recurrence holds on every surplus term and all
    /// roots are pure.
    Verified,
    /// Exact algebra holds but some root modulus is off.
    Impure,
    /// Newton division failed or the recurrence broke: the dimension does
    /// not match the sums.
    DimensionInconsistent,
    /// Fewer than `D + 1` sums were available.
    InsufficientTerms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub b: u64,
    /// Root moduli, ascending.
    pub moduli: Vec<f64>,
    pub purity_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecovery {
    pub dimension: usize,
    /// `P_m = (-1)^n S_m`, `m = 1..=M`.
    pub power_sums: Vec<CycInt>,
    /// `e_1..e_D`, as far as Newton's identities divided exactly.
    pub elementary: Vec<CycInt>,
    pub newton_exact: bool,
    /// Surplus terms `D < m ≤ M` on which the recurrence was checked.
    pub recurrence_terms: usize,
    pub recurrence_verified: bool,
    /// Expected modulus `q^{n/2}`.
    pub target_modulus: f64,
    pub embeddings: Vec<EmbeddingCheck>,
    pub purity_ok: bool,
    /// Root moduli agree across all embeddings.
    pub galois_consistent: bool,
    pub status: RecoveryStatus,
}

/// Newton's identities `k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} P_i`. Stops at
/// the first `k` where the division is not exact.
pub fn elementary_from_power_sums(power: &[CycInt], dim: usize) -> (Vec<CycInt>, bool) {
    newton(power, dim, false)
}

pub(crate) fn newton(power: &[CycInt], dim: usize, corrupt: bool) -> (Vec<CycInt>, bool) {
    let p = power.first().map(CycInt::p).unwrap_or(2);
    let mut e = vec![CycInt::from_int(p, 1)];
    for k in 1..=dim.min(power.len()) {
        let mut acc = CycInt::zero(p);
        for i in 1..=k {
            // the corrupted variant shifts the power-sum index
            let pi = if corrupt { power.get(i).unwrap_or(&power[i - 1]) } else { &power[i - 1] };
            let t = e[k - i].mul(pi);
            acc = if i % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        match acc.div_exact(&BigInt::from(k)) {
            Some(v) => e.push(v),
            None => return (e.split_off(1), false),
        }
    }
    (e.split_off(1), true)
}

/// `P_m = Σ_{k=1}^D (-1)^{k+1} e_k P_{m-k}` for every `D < m ≤ M`.
pub fn recurrence_holds(power: &[CycInt], elementary: &[CycInt]) -> bool {
    let dim = elementary.len();
    let p = power.first().map(CycInt::p).unwrap_or(2);
    (dim + 1..=power.len()).all(|m| {
        let mut acc = CycInt::zero(p);
        for (k, ek) in elementary.iter().enumerate().map(|(i, e)| (i + 1, e)) {
            let t = ek.mul(&power[m - k - 1]);
            acc = if k % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc == power[m - 1]
    })
}

/// Recovers the `D` eigenvalues behind `S_1..S_M` for `n` variables over
/// `F_q`.
pub fn recover_eigenvalues(sums: &[CycInt], dim: usize, q: u64, n: usize) -> EigenvalueRecovery {
    recover_with(sums, dim, q, n, false)
}

pub(crate) fn recover_with(sums: &[CycInt], dim: usize, q: u64, n: usize, corrupt: bool) -> EigenvalueRecovery {
    let power: Vec<CycInt> = sums.iter().map(|s| if n % 2 == 1 { s.neg() } else { s.clone() }).collect();
    let target = (q as f64).powf(n as f64 / 2.0);
    let mut out = EigenvalueRecovery {
        dimension: dim,
        power_sums: power.clone(),
        elementary: Vec::new(),
        newton_exact: false,
        recurrence_terms: 0,
        recurrence_verified: false,
        target_modulus: target,
        embeddings: Vec::new(),
        purity_ok: false,
        galois_consistent: false,
        status: RecoveryStatus::InsufficientTerms,
    };
    if power.len() < dim + 1 {
        return out;
    }
    let (e, exact) = newton(&power, dim, corrupt);
    out.elementary = e;
    out.newton_exact = exact;
    if !exact {
        out.status = RecoveryStatus::DimensionInconsistent;
        return out;
    }
    out.recurrence_terms = power.len() - dim;
    out.recurrence_verified = recurrence_holds(&power, &out.elementary);
    if !out.recurrence_verified {
        out.status = RecoveryStatus::DimensionInconsistent;
        return out;
    }
    let p = power[0].p();
    for b in 1..p {
        // T^D - e_1 T^{D-1} + ... + (-1)^D e_D, low degree first
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim + 1];
        coeffs[dim] = Complex64::new(1.0, 0.0);
        for (k, ek) in out.elementary.iter().enumerate().map(|(i, e)| (i + 1, e)) {
            let v = ek.numeric_value(b);
            coeffs[dim - k] = if k % 2 == 1 { -v } else { v };
        }
        let mut moduli: Vec<f64> = polynomial_roots(&coeffs, target).iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        let purity_ok = moduli.iter().all(|m| ((m - target) / target).abs() <= PURITY_TOLERANCE);
        out.embeddings.push(EmbeddingCheck { b, moduli, purity_ok });
    }
    out.purity_ok = out.embeddings.iter().all(|e| e.purity_ok);
    let first = &out.embeddings[0].moduli;
    out.galois_consistent = out.embeddings.iter().all(|e| {
        e.moduli.len() == first.len()
            && e.moduli.iter().zip(first).all(|(a, b)| (a - b).abs() <= PURITY_TOLERANCE * target.max(1.0))
    });
    out.status = if out.purity_ok { RecoveryStatus::Verified } else { RecoveryStatus::Impure };
    out
}

/// Roots of the monic polynomial `Σ c_k T^k` by Aberth iteration on the
/// rescaled polynomial `T = scale·U`. A cluster of `k` near-coincident roots
/// is replaced by one `k`-fold root, polished on the `(k-1)`-th derivative,
/// which is far more accurate than the scattered approximations.
pub fn polynomial_roots(coeffs: &[Complex64], scale: f64) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let c: Vec<Complex64> = coeffs.iter().enumerate().map(|(k, a)| a / scale.powi((deg - k) as i32)).collect();
    if deg == 1 {
        return vec![-c[0] * scale];
    }
    let radius = (0..deg).map(|k| c[k].norm().powf(1.0 / (deg - k) as f64)).fold(0.0f64, f64::max).max(0.5);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / deg as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dv = dv * x + v;
            v = v * x + a;
        }
        (v, dv)
    };
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for j in 0..deg {
            let (v, dv) = eval(z[j]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..deg).filter(|&k| k != j).map(|k| (z[j] - z[k]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[j] -= w;
                biggest = biggest.max(w.norm() / z[j].norm().max(1.0));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    // a k-fold root scatters by about eps^(1/k)
    let cluster_radius = (8.0 * f64::EPSILON.powf(1.0 / deg as f64)).max(1e-4);
    let mut assigned = vec![usize::MAX; deg];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..deg {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![i];
        assigned[i] = id;
        let mut t = 0;
        while t < members.len() {
            let a = z[members[t]];
            for k in 0..deg {
                if assigned[k] == usize::MAX && (z[k] - a).norm() < cluster_radius {
                    assigned[k] = id;
                    members.push(k);
                }
            }
            t += 1;
        }
        clusters.push(members);
    }
    let mut out: Vec<Complex64> = z.iter().map(|r| r * scale).collect();
    for members in &clusters {
        if members.len() == 1 {
            continue;
        }
        if let Some(root) = refine_multiple_root(&c, members.iter().map(|&k| z[k]), members.len()) {
            for &k in members {
                out[k] = root * scale;
            }
        }
    }
    out
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect()
}

/// Value and a magnitude scale for the rounding error of Horner's rule.
fn eval_with_scale(c: &[Complex64], x: Complex64) -> (Complex64, f64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for a in c.iter().rev() {
        v = v * x + a;
        mag = mag * x.norm() + a.norm();
    }
    (v, mag)
}

/// The mean of a cluster, polished as a simple root of the `(k-1)`-th
/// derivative. `None` when the lower derivatives do not vanish there, i.e.
/// the cluster is not a `k`-fold root after all.
fn refine_multiple_root(c: &[Complex64], members: impl Iterator<Item = Complex64>, k: usize) -> Option<Complex64> {
    let pts: Vec<Complex64> = members.collect();
    let mut x = pts.iter().sum::<Complex64>() / k as f64;
    let mut derivs = vec![c.to_vec()];
    for _ in 1..k {
        let next = derivative(derivs.last().unwrap());
        derivs.push(next);
    }
    let top = &derivs[k - 1];
    let dtop = derivative(top);
    for _ in 0..16 {
        let (v, _) = eval_with_scale(top, x);
        let (dv, _) = eval_with_scale(&dtop, x);
        let step = v / dv;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    let genuine = derivs[..k - 1].iter().all(|d| {
        let (v, mag) = eval_with_scale(d, x);
        v.norm() <= 1e-7 * mag.max(f64::MIN_POSITIVE)
    });
    genuine.then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub m: usize,
    /// `D q^{mn/2}`.
    pub bound: f64,
    /// Largest `|S_m|` over all embeddings.
    pub max_abs: f64,
    /// `max_abs / bound`; absent when the bound is zero.
    pub ratio: Option<f64>,
    pub holds: bool,
}

/// `|S_m| ≤ D q^{mn/2}` under every embedding.
pub fn verify_bound(sums: &[CycInt], dim: u64, q: u64, n: usize) -> Vec<BoundCheck> {
    sums.iter()
        .enumerate()
        .map(|(i, s)| {
            let m = i + 1;
            let bound = dim as f64 * (q as f64).powf((m * n) as f64 / 2.0);
            let max_abs = (1..s.p()).map(|b| s.numeric_value(b).norm()).fold(0.0f64, f64::max);
            let (ratio, holds) = if bound > 0.0 {
                let r = max_abs / bound;
                (Some(r), r <= 1.0 + BOUND_TOLERANCE)
            } else {
                (None, max_abs <= 1e-9)
            };
            BoundCheck { m, bound, max_abs, ratio, holds }
        })
        .collect()
}
