//! Gauss sums and the complete-square identities, by direct summation and
//! in closed form.

use core::fmt;

use num_complex::Complex64;

use crate::field::FiniteField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharSumError {
    ZeroLeadingCoefficient,
}

impl fmt::Display for CharSumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharSumError::ZeroLeadingCoefficient => write!(f, "ZeroLeadingCoefficient: a must be nonzero"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CharSumError {}

/// A Gauss sum `G_t = sum_{s != 0} eta(s) chi(t s)` with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussSumValue {
    pub t: u32,
    pub value: Complex64,
}

/// `G_t(eta, chi)`, summed directly over the `q - 1` nonzero elements.
pub fn gauss_sum(field: &FiniteField, t: u32) -> Complex64 {
    (1..field.order())
        .map(|s| field.chi(field.mul(t, s)) * f64::from(field.eta(s)))
        .sum()
}

pub fn gauss_sum_value(field: &FiniteField, t: u32) -> GaussSumValue {
    GaussSumValue { t, value: gauss_sum(field, t) }
}

/// `sum_s chi(t s^2)`.
pub fn square_character_sum(field: &FiniteField, t: u32) -> Complex64 {
    (0..field.order()).map(|s| field.chi(field.mul(t, field.square(s)))).sum()
}

/// `sum_s chi(a s^2 + b s)` by direct summation.
pub fn complete_square_sum(field: &FiniteField, a: u32, b: u32) -> Result<Complex64, CharSumError> {
    if a == 0 {
        return Err(CharSumError::ZeroLeadingCoefficient);
    }
    Ok((0..field.order())
        .map(|s| field.chi(field.add(field.mul(a, field.square(s)), field.mul(b, s))))
        .sum())
}

/// Closed form `G_1 eta(a) chi(-b^2 / (4a))` of [`complete_square_sum`].
pub fn complete_square_closed_form(field: &FiniteField, a: u32, b: u32) -> Result<Complex64, CharSumError> {
    let a_inv = field.inv(a).ok_or(CharSumError::ZeroLeadingCoefficient)?;
    let four_inv = field.inv(field.from_int(4)).expect("odd characteristic");
    let shift = field.neg(field.mul(field.square(b), field.mul(four_inv, a_inv)));
    Ok(gauss_sum(field, 1) * f64::from(field.eta(a)) * field.chi(shift))
}
