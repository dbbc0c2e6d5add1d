//! Dense univariate polynomials over a prime field `F_p`, stored low-to-high.
//!
//! Only what modulus selection needs: arithmetic modulo a fixed polynomial,
//! gcd, and Rabin's irreducibility test.

pub(crate) fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod_p(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_p(acc, base, p);
        }
        base = mul_mod_p(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod_p(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod_p(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = trim(m.to_vec());
    assert!(!m.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod_p(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let c = mul_mod_p(*r.last().unwrap(), lead_inv, p);
        for (j, &mj) in m.iter().enumerate() {
            let t = mul_mod_p(c, mj, p);
            r[shift + j] = (r[shift + j] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

fn pow_mod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        exp >>= 1;
    }
    rem(&acc, m, p)
}

/// `x^(p^k) mod m`, by `k` successive p-th powers.
fn frobenius_power_of_x(k: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut x = rem(&[0, 1], m, p);
    for _ in 0..k {
        x = pow_mod(&x, p, m, p);
    }
    x
}

/// Rabin's test for a monic polynomial `f` of degree `s >= 1` over `F_p`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let s = match f.len() {
        0 | 1 => return false,
        len => len - 1,
    };
    if s == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let full = frobenius_power_of_x(s, &f, p);
    if !sub(&full, &rem(&x, &f, p), p).is_empty() {
        return false;
    }
    for r in prime_factors(s as u64) {
        let h = frobenius_power_of_x(s / r as usize, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Brute-force irreducibility by trial division with every monic polynomial of
/// degree at most `s/2`. Test oracle for [`is_irreducible`].
pub fn is_irreducible_trial(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let s = f.len().saturating_sub(1);
    if s == 0 {
        return false;
    }
    for deg in 1..=s / 2 {
        let count = p.pow(deg as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(deg + 1);
            let mut v = idx;
            for _ in 0..deg {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_147_483_647));
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(15624), vec![2, 3, 7, 31]);
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for p in [2u64, 3, 5] {
            for s in 1..=4usize {
                for idx in 0..p.pow(s as u32) {
                    let mut f = Vec::new();
                    let mut v = idx;
                    for _ in 0..s {
                        f.push(v % p);
                        v /= p;
                    }
                    f.push(1);
                    assert_eq!(is_irreducible(&f, p), is_irreducible_trial(&f, p), "p={p} f={f:?}");
                }
            }
        }
    }

    #[test]
    fn known_polynomials() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[1, 0, 0, 1], 2));
    }
}
