//! Small dense matrices over a [`Field`], as `Vec<Vec<Elem>>` rows.

use crate::ff::Field;

pub type Matrix<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(field: &F, n: usize) -> Matrix<F::Elem> {
    (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(field.zero(), |acc, k| field.add(&acc, &field.mul(&row[k], &b[k][j]))))
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse; `None` if singular.
pub fn inverse<F: Field>(field: &F, m: &[Vec<F::Elem>]) -> Option<Matrix<F::Elem>> {
    let n = m.len();
    let mut a: Vec<Vec<F::Elem>> = m
        .iter()
        .zip(identity(field, n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !field.is_zero(&a[r][col]))?;
        a.swap(col, piv);
        let inv = field.inv(&a[col][col])?;
        for x in a[col].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for r in 0..n {
            if r == col || field.is_zero(&a[r][col]) {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..2 * n {
                let t = field.mul(&factor, &a[col][c]);
                a[r][c] = field.sub(&a[r][c], &t);
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Basis of the right null space `{v : A v = 0}` via reduced row echelon form.
pub fn nullspace<F: Field>(field: &F, m: &Matrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut a = m.clone();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !field.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, piv);
        let inv = field.inv(&a[r][c]).unwrap();
        for x in a[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for i in 0..rows {
            if i == r || field.is_zero(&a[i][c]) {
                continue;
            }
            let factor = a[i][c].clone();
            for k in 0..cols {
                let t = field.mul(&factor, &a[r][k]);
                a[i][k] = field.sub(&a[i][k], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); cols];
            v[fc] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(&a[row][fc]);
            }
            v
        })
        .collect()
}
