//! Small dense matrices over `F_q`, row-major `Vec<u32>`.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::FiniteField;

pub fn identity(d: usize) -> Vec<u32> {
    let mut m = vec![0; d * d];
    for i in 0..d {
        m[i * d + i] = 1;
    }
    m
}

pub fn transpose(m: &[u32], d: usize) -> Vec<u32> {
    let mut t = vec![0; d * d];
    for i in 0..d {
        for j in 0..d {
            t[j * d + i] = m[i * d + j];
        }
    }
    t
}

pub fn mat_mul(f: &FiniteField, a: &[u32], b: &[u32], d: usize) -> Vec<u32> {
    let mut c = vec![0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0 {
                continue;
            }
            for j in 0..d {
                c[i * d + j] = f.add(c[i * d + j], f.mul(aik, b[k * d + j]));
            }
        }
    }
    c
}

/// `m v`.
pub fn mat_vec(f: &FiniteField, m: &[u32], v: &[u32]) -> Vec<u32> {
    let d = v.len();
    (0..d)
        .map(|i| (0..d).fold(0, |acc, j| f.add(acc, f.mul(m[i * d + j], v[j]))))
        .collect()
}

/// Rank of a `rows x cols` matrix.
pub fn rank(f: &FiniteField, m: &[u32], rows: usize, cols: usize) -> usize {
    let mut a = m.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(r * cols + j, piv * cols + j);
        }
        let inv = f.inv(a[r * cols + c]).unwrap();
        for i in 0..rows {
            if i != r && a[i * cols + c] != 0 {
                let factor = f.mul(a[i * cols + c], inv);
                for j in 0..cols {
                    a[i * cols + j] = f.sub(a[i * cols + j], f.mul(factor, a[r * cols + j]));
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn determinant(f: &FiniteField, m: &[u32], d: usize) -> u32 {
    let mut a = m.to_vec();
    let mut det = 1;
    for c in 0..d {
        let Some(piv) = (c..d).find(|&i| a[i * d + c] != 0) else {
            return 0;
        };
        if piv != c {
            for j in 0..d {
                a.swap(c * d + j, piv * d + j);
            }
            det = f.neg(det);
        }
        det = f.mul(det, a[c * d + c]);
        let inv = f.inv(a[c * d + c]).unwrap();
        for i in c + 1..d {
            if a[i * d + c] != 0 {
                let factor = f.mul(a[i * d + c], inv);
                for j in c..d {
                    a[i * d + j] = f.sub(a[i * d + j], f.mul(factor, a[c * d + j]));
                }
            }
        }
    }
    det
}
