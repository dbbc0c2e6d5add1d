use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element `Σ c_a ζ^a` of `Z[ζ_p]`, kept in the canonical form
/// `c_{p-1} = 0`. In that form `1, ζ, …, ζ^{p-2}` is a basis, so equality is
/// coefficient equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u64) -> Self {
        CycInt { p, coeffs: vec![BigInt::zero(); p as usize] }
    }

    pub fn from_int(p: u64, k: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = k.into();
        z.canonicalize()
    }

    /// `ζ^a`.
    pub fn zeta_pow(p: u64, a: u64) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[(a % p) as usize] = BigInt::one();
        z.canonicalize()
    }

    /// Any length-`p` coefficient vector; the result is canonicalized.
    pub fn from_coeffs(p: u64, coeffs: Vec<BigInt>) -> Self {
        assert_eq!(coeffs.len(), p as usize, "coefficient vector length");
        CycInt { p, coeffs }.canonicalize()
    }

    fn canonicalize(mut self) -> Self {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in &mut self.coeffs {
                *c -= &last;
            }
        }
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let p = self.p as usize;
        let mut out = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % p] += a * b;
                }
            }
        }
        CycInt { p: self.p, coeffs: out }.canonicalize()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::from_int(self.p, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self / k` when every canonical coordinate is divisible by `k`.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        if k.is_zero() {
            return None;
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        Some(CycInt { p: self.p, coeffs })
    }

    /// The Galois conjugate `ζ ↦ ζ^b`.
    pub fn conjugate(&self, b: u64) -> Self {
        let p = self.p as usize;
        let mut out = vec![BigInt::zero(); p];
        for (a, c) in self.coeffs.iter().enumerate() {
            out[(a * b as usize) % p] += c;
        }
        CycInt { p: self.p, coeffs: out }.canonicalize()
    }

    /// Complex value under `ζ ↦ exp(2πi b / p)`.
    pub fn numeric_value(&self, b: u64) -> Complex64 {
        let p = self.p;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| {
                let k = (a as u64 * b) % p;
                let angle = std::f64::consts::TAU * k as f64 / p as f64;
                Complex64::from_polar(1.0, angle) * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }

    /// Largest absolute coordinate.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match a {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => f.write_str("z")?,
                1 => write!(f, "{mag}*z")?,
                _ if mag.is_one() => write!(f, "z^{a}")?,
                _ => write!(f, "{mag}*z^{a}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct Wire {
    p: u64,
    coeffs: Vec<Coeff>,
}

impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => Coeff::Small(v),
                None => Coeff::Big(c.to_string()),
            })
            .collect();
        Wire { p: self.p, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = Wire::deserialize(d)?;
        if w.p < 2 || w.coeffs.len() as u64 != w.p {
            return Err(D::Error::custom("coefficient vector must have length p"));
        }
        let coeffs = w
            .coeffs
            .into_iter()
            .map(|c| match c {
                Coeff::Small(v) => Ok(BigInt::from(v)),
                Coeff::Big(s) => s.parse::<BigInt>().map_err(D::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycInt::from_coeffs(w.p, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        // 1 + ζ + ζ^2 = 0 for p = 3
        let s = CycInt::from_coeffs(3, vec![1.into(), 1.into(), 1.into()]);
        assert!(s.is_zero());
        let z = CycInt::zeta_pow(3, 2);
        assert_eq!(z.coeffs(), &[BigInt::from(-1), BigInt::from(-1), BigInt::zero()]);
        assert_eq!(CycInt::from_int(7, 5).as_integer(), Some(&BigInt::from(5)));
    }

    #[test]
    fn numeric_examples() {
        assert_eq!(CycInt::zero(5).numeric_value(1), Complex64::new(0.0, 0.0));
        for b in 1..7 {
            let v = CycInt::from_int(7, 4).numeric_value(b);
            assert!((v - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        }
        let w = CycInt::from_int(3, 1).add(&CycInt::zeta_pow(3, 1)).numeric_value(1);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!((w - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn zeta_has_order_p() {
        for p in [2u64, 3, 5, 7, 13] {
            let z = CycInt::zeta_pow(p, 1);
            assert_eq!(z.pow(p as u32), CycInt::from_int(p, 1));
            assert_eq!(z.mul(&z.conjugate(p - 1)), CycInt::from_int(p, 1));
        }
    }

    #[test]
    fn exact_division() {
        let z = CycInt::from_coeffs(5, vec![6.into(), (-3).into(), 9.into(), 0.into(), 3.into()]);
        let d = z.div_exact(&BigInt::from(3)).unwrap();
        assert_eq!(d.scale(&BigInt::from(3)), z);
        assert!(z.div_exact(&BigInt::from(2)).is_none());
    }

    #[test]
    fn json_round_trip() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let z = CycInt::from_coeffs(3, vec![big.clone(), (-4).into(), 0.into()]);
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"{"p":3,"coeffs":["123456789012345678901234567890",-4,0]}"#);
        assert_eq!(serde_json::from_str::<CycInt>(&text).unwrap(), z);
        let shifted: CycInt = serde_json::from_str(r#"{"p":3,"coeffs":[1,1,2]}"#).unwrap();
        assert_eq!(shifted, CycInt::zeta_pow(3, 2));
        assert!(serde_json::from_str::<CycInt>(r#"{"p":3,"coeffs":[1]}"#).is_err());
    }
}
