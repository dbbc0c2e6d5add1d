//! Dense univariate polynomials as coefficient vectors, low degree first.
//! The zero polynomial is the empty vector.

use crate::ff::Field;

pub(crate) fn trim<F: Field>(field: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().is_some_and(|c| field.is_zero(c)) {
        a.pop();
    }
    a
}

pub(crate) fn eval<F: Field>(field: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
}

fn rem<F: Field>(field: &F, mut a: Vec<F::Elem>, b: &[F::Elem]) -> Vec<F::Elem> {
    let lead_inv = field.inv(b.last().expect("nonzero divisor")).expect("nonzero");
    while a.len() >= b.len() {
        let c = field.mul(a.last().unwrap(), &lead_inv);
        let shift = a.len() - b.len();
        for (i, x) in b.iter().enumerate() {
            let t = field.mul(&c, x);
            a[shift + i] = field.sub(&a[shift + i], &t);
        }
        a.pop();
        a = trim(field, a);
    }
    a
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub(crate) fn gcd<F: Field>(field: &F, a: Vec<F::Elem>, b: Vec<F::Elem>) -> Vec<F::Elem> {
    let (mut a, mut b) = (trim(field, a), trim(field, b));
    while !b.is_empty() {
        let r = rem(field, a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last() {
        let inv = field.inv(l).expect("nonzero");
        a = a.iter().map(|c| field.mul(c, &inv)).collect();
    }
    a
}
