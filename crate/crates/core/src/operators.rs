//! Extension, restriction and averaging over `S`, the kernel
//! `K = (d sigma)^v - delta_0` and its transform, restriction energy, and the
//! dyadic level decomposition.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::exponent::{weighted_norm, Exponent};
use crate::fourier::{self, Dual, FourierError, GridFunction, Primal};
use crate::variety::{surface_measure, Variety};

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    WrongLength { expected: usize, got: usize },
    NotIndicator,
    NegativeInput,
    Fourier(FourierError),
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorError::WrongLength { expected, got } => {
                write!(f, "WrongLength: expected {expected} values, got {got}")
            }
            OperatorError::NotIndicator => write!(f, "NotIndicator: input must be 0/1-valued"),
            OperatorError::NegativeInput => write!(f, "NegativeInput: input must be real and nonnegative"),
            OperatorError::Fourier(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OperatorError {}

impl From<FourierError> for OperatorError {
    fn from(e: FourierError) -> Self {
        OperatorError::Fourier(e)
    }
}

/// A function on `S`, indexed like [`Variety::points`], with the
/// probability measure `d sigma`.
#[derive(Debug, Clone)]
pub struct SurfaceFunction<'v> {
    variety: &'v Variety,
    values: Vec<Complex64>,
}

impl<'v> SurfaceFunction<'v> {
    pub fn new(variety: &'v Variety, values: Vec<Complex64>) -> Result<Self, OperatorError> {
        if values.len() != variety.cardinality() {
            return Err(OperatorError::WrongLength { expected: variety.cardinality(), got: values.len() });
        }
        Ok(Self { variety, values })
    }

    pub fn constant(variety: &'v Variety, c: Complex64) -> Self {
        Self { variety, values: vec![c; variety.cardinality()] }
    }

    /// Restriction to `S` of a function given at every grid point.
    pub fn sample(variety: &'v Variety, full: &[Complex64]) -> Self {
        Self { variety, values: variety.points().iter().map(|&x| full[x as usize]).collect() }
    }

    pub fn variety(&self) -> &'v Variety {
        self.variety
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `(|S|^-1 sum |f|^p)^(1/p)`.
    pub fn norm(&self, p: Exponent) -> f64 {
        weighted_norm(self.values.iter().map(|z| z.norm()), 1.0 / self.values.len() as f64, p)
    }

    /// `int f conj(g) d sigma`.
    pub fn inner(&self, other: &SurfaceFunction<'_>) -> Complex64 {
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s / self.values.len() as f64
    }

    /// `f sigma` as a primal grid function.
    pub fn to_density(&self) -> GridFunction<Primal> {
        let v = self.variety;
        let n = v.grid().len();
        let h = n as f64 / v.cardinality() as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (&x, &fx) in v.points().iter().zip(&self.values) {
            out[x as usize] = fx * h;
        }
        GridFunction::new(v.field(), v.dim(), out).expect("grid length")
    }
}

/// `(f d sigma)^v(m) = |S|^-1 sum_{x in S} f(x) chi(x.m)`.
pub fn extend(f: &SurfaceFunction<'_>) -> GridFunction<Dual> {
    fourier::inverse_transform_dual(&f.to_density())
}

/// `g^` sampled on `S`. This is the adjoint of [`extend`] between
/// `L^2(dm)` and `L^2(S, d sigma)`.
pub fn restrict<'v>(g: &GridFunction<Dual>, v: &'v Variety) -> SurfaceFunction<'v> {
    SurfaceFunction::sample(v, fourier::transform_dual(g).values())
}

/// `(f * d sigma)(x) = |S|^-1 sum_{y in S} f(x - y)`, summed directly.
pub fn average(f: &GridFunction<Primal>, v: &Variety) -> GridFunction<Primal> {
    let grid = v.grid();
    let field = v.field();
    let q = field.order() as usize;
    let n = grid.len();
    let d = v.dim();
    let mut powers = vec![1usize; d];
    for j in 1..d {
        powers[j] = powers[j - 1] * q;
    }
    // sub_offset[j][a * q + b] = (a - b) q^j
    let sub_offset: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut t = vec![0usize; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = field.sub(a as u32, b as u32) as usize * powers[j];
                }
            }
            t
        })
        .collect();
    let ycoords: Vec<Vec<u32>> = v.points().iter().map(|&y| grid.coords(y as usize)).collect();
    let inv = 1.0 / v.cardinality() as f64;
    let src = f.values();
    let out = crate::par::map_indexed(n, |x| {
        let xc = grid.coords(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for yc in &ycoords {
            let mut idx = 0;
            for j in 0..d {
                idx += sub_offset[j][xc[j] as usize * q + yc[j] as usize];
            }
            acc += src[idx];
        }
        acc * inv
    });
    GridFunction::new(field, d, out).expect("grid length")
}

/// `f * d sigma` through the convolution theorem, given the multiplier
/// `(d sigma)^v`.
pub fn average_spectral(f: &GridFunction<Primal>, multiplier: &GridFunction<Dual>) -> Result<GridFunction<Primal>, OperatorError> {
    let fhat = fourier::transform_primal(f);
    Ok(fourier::inverse_transform(&fhat.pointwise_mul(multiplier)?))
}

/// `K = (d sigma)^v - delta_0`.
pub fn kernel_k(v: &Variety) -> GridFunction<Dual> {
    let sigma = fourier::sigma_inv_bruteforce(v);
    let mut values = sigma.into_values();
    values[0] = Complex64::new(0.0, 0.0);
    GridFunction::new(v.field(), v.dim(), values).expect("grid length")
}

/// `K^ = sigma - 1`.
pub fn k_hat(v: &Variety) -> GridFunction<Primal> {
    surface_measure(v).map(|z| z - 1.0)
}

/// `sum_{m in v} |E^(m)|^2` for a 0/1-valued `E`.
pub fn restriction_energy(e: &GridFunction<Primal>, v: &Variety) -> Result<f64, OperatorError> {
    if e.values().iter().any(|z| z.im != 0.0 || (z.re != 0.0 && z.re != 1.0)) {
        return Err(OperatorError::NotIndicator);
    }
    if e.dim() != v.dim() || e.field() != v.field() {
        return Err(FourierError::ShapeMismatch.into());
    }
    let ehat = fourier::transform_primal(e);
    Ok(v.points().iter().map(|&m| ehat.values()[m as usize].norm_sqr()).sum())
}

/// Smallest `N >= 0` with `2^-(N+1) <= q^(-d/p)`.
pub fn dyadic_cutoff(q: u32, d: usize, p: f64) -> usize {
    let target = libm::pow(f64::from(q), -(d as f64) / p);
    let guess = libm::ceil(d as f64 * libm::log2(f64::from(q)) / p) - 1.0;
    let mut n = if guess > 0.0 { guess as usize } else { 0 };
    while n > 0 && libm::ldexp(1.0, -(n as i32)) <= target {
        n -= 1;
    }
    while libm::ldexp(1.0, -(n as i32 + 1)) > target {
        n += 1;
    }
    n
}

/// `f / ||f||_inf = sum_{k <= N} f_k + tail`, with `f_k = f 1_{E_k}` and
/// `E_k = {2^(-k-1) < f <= 2^-k}`.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    /// `||f||_inf` divided out before splitting.
    pub scale: f64,
    pub normalized: GridFunction<Primal>,
    pub levels: Vec<GridFunction<Primal>>,
    /// Grid indices of `E_k`.
    pub supports: Vec<Vec<usize>>,
    pub tail: GridFunction<Primal>,
}

impl DyadicDecomposition {
    /// Indicator of `E_k`.
    pub fn level_set(&self, k: usize) -> GridFunction<Primal> {
        let mut values = vec![Complex64::new(0.0, 0.0); self.normalized.values().len()];
        for &i in &self.supports[k] {
            values[i] = Complex64::new(1.0, 0.0);
        }
        GridFunction::new(self.normalized.field(), self.normalized.dim(), values).expect("grid length")
    }
}

pub fn dyadic_decompose(f: &GridFunction<Primal>, levels: usize) -> Result<DyadicDecomposition, OperatorError> {
    if f.values().iter().any(|z| z.im != 0.0 || z.re < 0.0 || z.re.is_nan()) {
        return Err(OperatorError::NegativeInput);
    }
    let scale = f.values().iter().map(|z| z.re).fold(0.0, f64::max);
    let normalized = if scale > 0.0 { f.scale(1.0 / scale) } else { f.clone() };
    let n = normalized.values().len();
    let zero = Complex64::new(0.0, 0.0);
    let mut level_values = vec![vec![zero; n]; levels + 1];
    let mut supports = vec![Vec::new(); levels + 1];
    let mut tail = vec![zero; n];
    for (i, z) in normalized.values().iter().enumerate() {
        let v = z.re;
        let level = (0..=levels).find(|&k| v > libm::ldexp(1.0, -(k as i32) - 1) && v <= libm::ldexp(1.0, -(k as i32)));
        match level {
            Some(k) => {
                level_values[k][i] = *z;
                supports[k].push(i);
            }
            None => tail[i] = *z,
        }
    }
    let field = f.field();
    let d = f.dim();
    Ok(DyadicDecomposition {
        scale,
        levels: level_values.into_iter().map(|v| GridFunction::new(field, d, v).expect("grid length")).collect(),
        supports,
        tail: GridFunction::new(field, d, tail).expect("grid length"),
        normalized,
    })
}
