//! Lebesgue exponents in `[1, inf]`.

use core::fmt;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BadExponent(pub f64);

impl fmt::Display for BadExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BadExponent: {} is not in [1, inf]", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BadExponent {}

impl Exponent {
    pub fn new(p: f64) -> Result<Self, BadExponent> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(BadExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/inf = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// The dual exponent `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// Strictly between 1 and infinity.
    pub fn is_interior(self) -> bool {
        matches!(self, Exponent::Finite(p) if p > 1.0)
    }
}

/// `(sum_i w |v_i|^p)^(1/p)`, or `max |v_i|` for `p = inf`.
pub fn weighted_norm<I>(abs_values: I, weight: f64, p: Exponent) -> f64
where
    I: IntoIterator<Item = f64>,
{
    match p {
        Exponent::Infinity => abs_values.into_iter().fold(0.0, f64::max),
        Exponent::Finite(p) if p == 1.0 => weight * abs_values.into_iter().sum::<f64>(),
        Exponent::Finite(p) if p == 2.0 => math::sqrt(weight * abs_values.into_iter().map(|a| a * a).sum::<f64>()),
        Exponent::Finite(p) => {
            // Scale by the max to keep |v|^p representable.
            let values: alloc::vec::Vec<f64> = abs_values.into_iter().collect();
            let top = values.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            let s: f64 = values.iter().map(|&a| math::powf(a / top, p)).sum();
            top * math::powf(weight * s, 1.0 / p)
        }
    }
}
