//! Exact arithmetic in `F_q`, `q = p^n` with `p` an odd prime.
//!
//! Elements are encoded as integers in `[0, q)`: the element
//! `c_0 + c_1 t + ... + c_{n-1} t^{n-1}` of `F_p[t]/(f)` has index
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`. For `n = 1` the index is the
//! residue itself. All operations are table lookups on these indices.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::math;

/// Largest field order the tables are built for.
pub const MAX_ORDER: u64 = 1024;

/// Default irreducible moduli (coefficients low to high, monic) for
/// `p <= 13`, `n <= 3`. Each entry is the smallest monic irreducible
/// polynomial when ordered by the index of its lower coefficients.
const DEFAULT_MODULI: &[(u32, u32, &[u32])] = &[
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[1, 1, 0, 1]),
    (7, 2, &[1, 0, 1]),
    (7, 3, &[2, 0, 0, 1]),
    (11, 2, &[1, 0, 1]),
    (11, 3, &[4, 1, 0, 1]),
    (13, 2, &[2, 0, 1]),
    (13, 3, &[2, 0, 0, 1]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NonPrime(u64),
    NotPrimePower(u64),
    EvenCharacteristic,
    BadDegree(u32),
    FieldTooLarge(u64),
    /// Modulus has the wrong length or is not monic.
    BadModulus,
    ReducibleModulus,
    ElementOutOfRange(u64),
    DivisionByZero,
    MixedFields,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NonPrime(p) => write!(f, "NonPrime: {p} is not prime"),
            FieldError::NotPrimePower(q) => write!(f, "NonPrime: {q} is not a prime power"),
            FieldError::EvenCharacteristic => {
                write!(f, "EvenCharacteristic: the characteristic must be an odd prime")
            }
            FieldError::BadDegree(n) => write!(f, "BadDegree: extension degree {n} must be >= 1"),
            FieldError::FieldTooLarge(q) => {
                write!(f, "FieldTooLarge: q = {q} exceeds the supported maximum {MAX_ORDER}")
            }
            FieldError::BadModulus => {
                write!(f, "BadModulus: expected n+1 coefficients of a monic polynomial")
            }
            FieldError::ReducibleModulus => write!(f, "ReducibleModulus: modulus is reducible over F_p"),
            FieldError::ElementOutOfRange(v) => write!(f, "ElementOutOfRange: {v}"),
            FieldError::DivisionByZero => write!(f, "DivisionByZero"),
            FieldError::MixedFields => write!(f, "MixedFields: operands belong to different fields"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FieldError {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits `q` into `(p, n)` with `q = p^n`.
pub fn prime_power(q: u64) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let mut rest = q;
    let mut n = 0;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p as u32, n))
}

struct Tables {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    trace: Vec<u32>,
    eta: Vec<i8>,
    sqrt: Vec<Option<u32>>,
    /// `exp(2 pi i k / p)` for `k` in `[0, p)`.
    roots: Vec<Complex64>,
}

/// A finite field of odd characteristic. Cheap to clone; the tables are
/// shared and immutable.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.inner.p)
            .field("n", &self.inner.n)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.n == other.inner.n
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FiniteField {}

// Polynomial helpers over F_p, coefficients low to high.

fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while a.len() > db {
        let top = *a.last().unwrap();
        if top != 0 {
            let factor = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = a.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (factor as u64 * bi as u64 % p as u64) as u32;
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        }
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Trial division by every monic polynomial of degree `1..=n/2`.
pub(crate) fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    for k in 1..=n / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut divisor: Vec<u32> = (0..k).map(|i| ((idx / (p as u64).pow(i as u32)) % p as u64) as u32).collect();
            divisor.push(1);
            if poly_rem(modulus.to_vec(), &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for idx in 0..count {
        let mut m: Vec<u32> = (0..n).map(|i| ((idx / (p as u64).pow(i)) % p as u64) as u32).collect();
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Default modulus for `(p, n)`: the built-in table when it has an entry,
/// otherwise the smallest monic irreducible found by search.
pub fn default_modulus(p: u32, n: u32) -> Vec<u32> {
    DEFAULT_MODULI
        .iter()
        .find(|(tp, tn, _)| *tp == p && *tn == n)
        .map(|(_, _, m)| m.to_vec())
        .unwrap_or_else(|| smallest_irreducible(p, n))
}

impl FiniteField {
    /// Builds `F_{p^n}`. For `n > 1` the modulus is given low-to-high as
    /// `n + 1` coefficients of a monic polynomial; `None` picks the default.
    pub fn new(p: u32, n: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrime(p as u64));
        }
        if n == 0 {
            return Err(FieldError::BadDegree(n));
        }
        let q = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(FieldError::FieldTooLarge(q));
        }
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            let m = match modulus {
                Some(m) => {
                    if m.len() != n as usize + 1 {
                        return Err(FieldError::BadModulus);
                    }
                    let m: Vec<u32> = m.iter().map(|&c| c % p).collect();
                    if m[n as usize] != 1 {
                        return Err(FieldError::BadModulus);
                    }
                    if !is_irreducible(&m, p) {
                        return Err(FieldError::ReducibleModulus);
                    }
                    m
                }
                None => default_modulus(p, n),
            };
            m
        };
        Ok(Self { inner: Arc::new(Tables::build(p, n, q as u32, modulus)) })
    }

    /// Builds the field of order `q` with the default modulus.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        let (p, n) = prime_power(q)?;
        Self::new(p, n, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.n
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, low to high (`[0, 1]` for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.inner.add[(a * self.inner.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.inner.mul[(a * self.inner.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.inner.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inner.inv[a as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// Absolute trace `x + x^p + ... + x^{p^{n-1}}`, as a residue in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: u32) -> u32 {
        self.inner.trace[a as usize]
    }

    /// Quadratic character: 0 at 0, 1 on nonzero squares, -1 otherwise.
    #[inline]
    pub fn eta(&self, a: u32) -> i8 {
        self.inner.eta[a as usize]
    }

    /// Canonical additive character `exp(2 pi i Tr(x) / p)`.
    #[inline]
    pub fn chi(&self, a: u32) -> Complex64 {
        self.inner.roots[self.trace(a) as usize]
    }

    /// Smallest-index `l` with `l^2 = a`, if any.
    #[inline]
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        self.inner.sqrt[a as usize]
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(self.inner.p as i64) as u32
    }

    /// Element with the given polynomial coefficients (low to high).
    pub fn from_digits(&self, digits: &[u32]) -> Result<u32, FieldError> {
        if digits.len() > self.inner.n as usize || digits.iter().any(|&c| c >= self.inner.p) {
            return Err(FieldError::BadModulus);
        }
        Ok(digits.iter().rev().fold(0, |acc, &c| acc * self.inner.p + c))
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        let p = self.inner.p;
        (0..self.inner.n).map(|i| (a / p.pow(i)) % p).collect()
    }

    pub fn minus_one(&self) -> u32 {
        self.inner.p - 1
    }

    /// Checked element handle.
    pub fn element(&self, index: u32) -> Result<Elem<'_>, FieldError> {
        if index >= self.inner.q {
            return Err(FieldError::ElementOutOfRange(index as u64));
        }
        Ok(Elem { field: self, index })
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem<'_>> {
        (0..self.inner.q).map(move |index| Elem { field: self, index })
    }

    /// The nonzero squares.
    pub fn nonzero_squares(&self) -> Vec<u32> {
        (1..self.inner.q).filter(|&x| self.eta(x) == 1).collect()
    }
}

impl Tables {
    fn build(p: u32, n: u32, q: u32, modulus: Vec<u32>) -> Self {
        let qs = q as usize;
        let digits = |a: u32| -> Vec<u32> { (0..n).map(|i| (a / p.pow(i)) % p).collect() };
        let encode = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        let all_digits: Vec<Vec<u32>> = (0..q).map(digits).collect();
        for a in 0..qs {
            for b in a..qs {
                let da = &all_digits[a];
                let db = &all_digits[b];
                let sum: Vec<u32> = da.iter().zip(db).map(|(x, y)| (x + y) % p).collect();
                let s = encode(&sum);
                add[a * qs + b] = s;
                add[b * qs + a] = s;

                let mut prod = vec![0u32; 2 * n as usize - 1];
                for (i, &x) in da.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                    }
                }
                let mut r = if n == 1 { prod } else { poly_rem(prod, &modulus, p) };
                r.resize(n as usize, 0);
                let m = encode(&r);
                mul[a * qs + b] = m;
                mul[b * qs + a] = m;
            }
        }

        let mut neg = vec![0u32; qs];
        let mut inv = vec![0u32; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u32;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u32;
                }
            }
        }

        let pow = |a: u32, mut e: u64| -> u32 {
            let (mut base, mut acc) = (a, 1u32);
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul[(acc * q + base) as usize];
                }
                base = mul[(base * q + base) as usize];
                e >>= 1;
            }
            acc
        };

        let trace: Vec<u32> = (0..q)
            .map(|a| {
                let mut t = 0;
                let mut frob = a;
                for _ in 0..n {
                    t = add[(t * q + frob) as usize];
                    frob = pow(frob, p as u64);
                }
                debug_assert!(t < p, "trace must land in the prime field");
                t
            })
            .collect();

        let half = (q as u64 - 1) / 2;
        let minus_one = p - 1;
        let eta: Vec<i8> = (0..q)
            .map(|a| match a {
                0 => 0,
                _ => {
                    let e = pow(a, half);
                    if e == 1 {
                        1
                    } else {
                        debug_assert_eq!(e, minus_one);
                        -1
                    }
                }
            })
            .collect();

        let mut sqrt = vec![None; qs];
        for l in (0..q).rev() {
            sqrt[mul[(l * q + l) as usize] as usize] = Some(l);
        }

        let roots = (0..p)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / p as f64;
                Complex64::new(math::cos(theta), math::sin(theta))
            })
            .collect();

        Tables { p, n, q, modulus, add, mul, neg, inv, trace, eta, sqrt, roots }
    }
}

/// An element bound to its field.
#[derive(Clone, Copy)]
pub struct Elem<'f> {
    field: &'f FiniteField,
    index: u32,
}

impl fmt::Debug for Elem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({:?})", self.field.digits(self.index))
    }
}

impl PartialEq for Elem<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.field == other.field
    }
}

impl Eq for Elem<'_> {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl<'f> Elem<'f> {
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn field(self) -> &'f FiniteField {
        self.field
    }

    pub fn digits(self) -> Vec<u32> {
        self.field.digits(self.index)
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }

    fn same_field(self, other: Elem<'_>) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    pub fn try_add(self, other: Elem<'_>) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.index, other.index)))
    }

    pub fn try_mul(self, other: Elem<'_>) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.index, other.index)))
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        self.field.inv(self.index).map(|i| self.with(i)).ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(self, e: u64) -> Self {
        self.with(self.field.pow(self.index, e))
    }

    pub fn chi(self) -> Complex64 {
        self.field.chi(self.index)
    }

    pub fn eta(self) -> i8 {
        self.field.eta(self.index)
    }

    pub fn sqrt(self) -> Option<Self> {
        self.field.sqrt(self.index).map(|l| self.with(l))
    }

    fn with(self, index: u32) -> Self {
        Elem { field: self.field, index }
    }
}

/// Applies `op`; the second operand is ignored by the unary operations.
pub fn element_arithmetic<'f>(a: Elem<'f>, b: Elem<'_>, op: ArithOp) -> Result<Elem<'f>, FieldError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Neg => Ok(-a),
        ArithOp::Inv => a.inv(),
    }
}

// Operator sugar; these panic on operands from different fields.

impl<'f> Add for Elem<'f> {
    type Output = Elem<'f>;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("operands from different fields")
    }
}

impl<'f> Sub for Elem<'f> {
    type Output = Elem<'f>;
    fn sub(self, rhs: Self) -> Self {
        self.try_add(-rhs).expect("operands from different fields")
    }
}

impl<'f> Mul for Elem<'f> {
    type Output = Elem<'f>;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("operands from different fields")
    }
}

impl<'f> Neg for Elem<'f> {
    type Output = Elem<'f>;
    fn neg(self) -> Self {
        self.with(self.field.neg(self.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn orders() -> Vec<u64> {
        (3..=49).filter(|&q| prime_power(q).map(|(p, _)| p != 2).unwrap_or(false)).collect()
    }

    #[test]
    fn builds_prime_and_extension_fields() {
        let f3 = FiniteField::new(3, 1, None).unwrap();
        assert_eq!(f3.order(), 3);
        let f9 = FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap();
        assert_eq!(f9.order(), 9);
        assert_eq!(FiniteField::of_order(9).unwrap(), f9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FiniteField::new(2, 1, None).unwrap_err(), FieldError::EvenCharacteristic);
        assert_eq!(FiniteField::new(9, 1, None).unwrap_err(), FieldError::NonPrime(9));
        assert_eq!(FiniteField::new(3, 0, None).unwrap_err(), FieldError::BadDegree(0));
        // t^2 + 2 = (t + 1)(t + 2) over F_3.
        assert_eq!(FiniteField::new(3, 2, Some(&[2, 0, 1])).unwrap_err(), FieldError::ReducibleModulus);
        assert_eq!(FiniteField::new(3, 2, Some(&[1, 0, 2])).unwrap_err(), FieldError::BadModulus);
        assert_eq!(FiniteField::of_order(4).unwrap_err(), FieldError::EvenCharacteristic);
        assert_eq!(FiniteField::of_order(12).unwrap_err(), FieldError::NotPrimePower(12));
        assert!(matches!(FiniteField::of_order(3u64.pow(7)), Err(FieldError::FieldTooLarge(_))));
    }

    #[test]
    fn default_table_entries_are_minimal_irreducibles() {
        for &(p, n, m) in DEFAULT_MODULI {
            assert!(is_irreducible(m, p), "table entry for ({p},{n})");
            assert_eq!(smallest_irreducible(p, n), m.to_vec());
        }
    }

    #[test]
    fn arithmetic_examples() {
        let f7 = FiniteField::of_order(7).unwrap();
        let three = f7.element(3).unwrap();
        assert_eq!(three.inv().unwrap().index(), 5);
        assert_eq!(f7.element(0).unwrap().inv().unwrap_err(), FieldError::DivisionByZero);

        let f9 = FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap();
        let t = f9.element(f9.from_digits(&[0, 1]).unwrap()).unwrap();
        assert_eq!((t * t).index(), 2);

        let f5 = FiniteField::of_order(5).unwrap();
        let a = f5.element(2).unwrap();
        assert_eq!(element_arithmetic(a, a, ArithOp::Add).unwrap().index(), 4);
        assert_eq!(element_arithmetic(a, a, ArithOp::Inv).unwrap().index(), 3);
        assert_eq!(
            element_arithmetic(a, f7.element(2).unwrap(), ArithOp::Mul).unwrap_err(),
            FieldError::MixedFields
        );
    }

    #[test]
    fn additive_inverse_and_group_order() {
        let mut rng = crate::seed::rng(11);
        for q in orders() {
            let f = FiniteField::of_order(q).unwrap();
            for x in f.elements() {
                assert!((x + (-x)).is_zero());
            }
            for _ in 0..200 {
                let x = f.element(rng.gen_range(1..f.order())).unwrap();
                assert_eq!(x.pow(q - 1).index(), 1);
            }
        }
    }

    #[test]
    fn additive_character_examples() {
        let f3 = FiniteField::of_order(3).unwrap();
        assert!((f3.chi(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = Complex64::new(math::cos(2.0 * PI / 3.0), math::sin(2.0 * PI / 3.0));
        assert!((f3.chi(1) - w).norm() < 1e-15);

        let f9 = FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap();
        let t = f9.from_digits(&[0, 1]).unwrap();
        assert_eq!(f9.trace(t), 0);
        assert!((f9.chi(t) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn character_orthogonality_and_homomorphism() {
        for q in orders() {
            let f = FiniteField::of_order(q).unwrap();
            for t in 0..f.order() {
                let s: Complex64 = (0..f.order()).map(|x| f.chi(f.mul(t, x))).sum();
                let expect = if t == 0 { q as f64 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() <= 1e-10 * q as f64, "q={q} t={t}");
            }
            for x in 0..f.order() {
                assert!((f.chi(x).norm() - 1.0).abs() < 1e-14);
                for y in 0..f.order() {
                    assert!((f.chi(f.add(x, y)) - f.chi(x) * f.chi(y)).norm() < 1e-12);
                }
            }
            assert!((1..f.order()).any(|x| (f.chi(x) - Complex64::new(1.0, 0.0)).norm() > 1e-6));
        }
    }

    #[test]
    fn quadratic_character_examples_and_counts() {
        let f7 = FiniteField::of_order(7).unwrap();
        assert_eq!(f7.eta(0), 0);
        assert_eq!(f7.eta(3), -1);
        assert_eq!(f7.eta(2), 1);
        for q in orders() {
            let f = FiniteField::of_order(q).unwrap();
            assert_eq!(f.nonzero_squares().len() as u64, (q - 1) / 2);
            assert_eq!((1..f.order()).map(|x| f.eta(x) as i64).sum::<i64>(), 0);
            for x in 0..f.order() {
                for y in 0..f.order() {
                    assert_eq!(f.eta(f.mul(x, y)), f.eta(x) * f.eta(y));
                }
            }
        }
    }

    #[test]
    fn square_roots() {
        let f7 = FiniteField::of_order(7).unwrap();
        assert_eq!(f7.sqrt(0), Some(0));
        assert_eq!(f7.sqrt(2), Some(3));
        assert_eq!(f7.sqrt(3), None);
        for q in orders() {
            let f = FiniteField::of_order(q).unwrap();
            for x in 0..f.order() {
                match f.sqrt(x) {
                    Some(l) => {
                        assert!(f.eta(x) >= 0);
                        assert_eq!(f.square(l), x);
                        assert!((0..l).all(|k| f.square(k) != x));
                    }
                    None => assert_eq!(f.eta(x), -1),
                }
            }
        }
    }
}
