//! Functions on `F_q^d` tagged with their measure side, the four Fourier
//! transforms between the sides, convolution, and `(d sigma)^v`.
//!
//! The primal side carries the normalized measure `dx` (mass `q^-d` per
//! point), the dual side the counting measure `dm`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::marker::PhantomData;

use num_complex::Complex64;

use crate::charsums::gauss_sum;
use crate::exponent::{weighted_norm, BadExponent, Exponent};
use crate::field::FiniteField;
use crate::grid::Grid;
use crate::par;
use crate::variety::{self, QuadraticForm, Variety, VarietyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideKind {
    Primal,
    Dual,
}

impl SideKind {
    pub fn name(self) -> &'static str {
        match self {
            SideKind::Primal => "primal",
            SideKind::Dual => "dual",
        }
    }
}

mod sealed {
    pub trait Sealed {}
}

/// Measure side of a [`GridFunction`].
pub trait Side: sealed::Sealed + Copy + fmt::Debug + Send + Sync + 'static {
    const KIND: SideKind;
}

/// `(F_q^d, dx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primal;

/// `(F_q^d, dm)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dual;

impl sealed::Sealed for Primal {}
impl sealed::Sealed for Dual {}

impl Side for Primal {
    const KIND: SideKind = SideKind::Primal;
}

impl Side for Dual {
    const KIND: SideKind = SideKind::Dual;
}

#[derive(Debug, Clone, PartialEq)]
pub enum FourierError {
    SideMismatch { left: SideKind, right: SideKind },
    ShapeMismatch,
    WrongLength { expected: usize, got: usize },
    BadExponent(BadExponent),
}

impl fmt::Display for FourierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourierError::SideMismatch { left, right } => {
                write!(f, "SideMismatch: {} vs {}", left.name(), right.name())
            }
            FourierError::ShapeMismatch => write!(f, "ShapeMismatch: operands live on different grids"),
            FourierError::WrongLength { expected, got } => {
                write!(f, "WrongLength: expected {expected} values, got {got}")
            }
            FourierError::BadExponent(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FourierError {}

impl From<BadExponent> for FourierError {
    fn from(e: BadExponent) -> Self {
        FourierError::BadExponent(e)
    }
}

/// Dense complex function on `F_q^d`, indexed by the grid encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S: Side> {
    field: FiniteField,
    d: usize,
    values: Vec<Complex64>,
    _side: PhantomData<S>,
}

impl<S: Side> GridFunction<S> {
    pub fn new(field: &FiniteField, d: usize, values: Vec<Complex64>) -> Result<Self, FourierError> {
        let expected = Grid::new(field.order(), d).len();
        if values.len() != expected {
            return Err(FourierError::WrongLength { expected, got: values.len() });
        }
        Ok(Self { field: field.clone(), d, values, _side: PhantomData })
    }

    pub(crate) fn from_vec(field: &FiniteField, d: usize, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), Grid::new(field.order(), d).len());
        Self { field: field.clone(), d, values, _side: PhantomData }
    }

    /// Panics if `values.len() != q^d`.
    pub fn from_real(field: &FiniteField, d: usize, values: &[f64]) -> Self {
        Self::new(field, d, values.iter().map(|&v| Complex64::new(v, 0.0)).collect()).expect("length q^d")
    }

    pub fn zeros(field: &FiniteField, d: usize) -> Self {
        Self::from_vec(field, d, vec![Complex64::new(0.0, 0.0); Grid::new(field.order(), d).len()])
    }

    pub fn constant(field: &FiniteField, d: usize, c: Complex64) -> Self {
        Self::from_vec(field, d, vec![c; Grid::new(field.order(), d).len()])
    }

    /// `value` at grid index `at`, zero elsewhere.
    pub fn delta(field: &FiniteField, d: usize, at: usize, value: f64) -> Self {
        let mut out = Self::zeros(field, d);
        out.values[at] = Complex64::new(value, 0.0);
        out
    }

    pub fn side(&self) -> SideKind {
        S::KIND
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.field.order(), self.d)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Mass of a single point: `q^-d` on the primal side, `1` on the dual side.
    pub fn point_weight(&self) -> f64 {
        match S::KIND {
            SideKind::Primal => 1.0 / self.values.len() as f64,
            SideKind::Dual => 1.0,
        }
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        weighted_norm(self.values.iter().map(|z| z.norm()), self.point_weight(), p)
    }

    /// `int f conj(g)` against this side's measure.
    pub fn inner(&self, other: &Self) -> Result<Complex64, FourierError> {
        self.same_shape(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.point_weight())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_vec(&self.field, self.d, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self, FourierError> {
        self.same_shape(other)?;
        Ok(Self::from_vec(&self.field, self.d, self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FourierError> {
        self.same_shape(other)?;
        Ok(Self::from_vec(&self.field, self.d, self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, FourierError> {
        self.same_shape(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn same_shape<T: Side>(&self, other: &GridFunction<T>) -> Result<(), FourierError> {
        if self.d != other.d || self.field != other.field {
            return Err(FourierError::ShapeMismatch);
        }
        Ok(())
    }
}

/// Side-erased grid function, for deserialized data.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGridFunction {
    Primal(GridFunction<Primal>),
    Dual(GridFunction<Dual>),
}

impl AnyGridFunction {
    pub fn side(&self) -> SideKind {
        match self {
            AnyGridFunction::Primal(_) => SideKind::Primal,
            AnyGridFunction::Dual(_) => SideKind::Dual,
        }
    }

    pub fn field(&self) -> &FiniteField {
        match self {
            AnyGridFunction::Primal(f) => f.field(),
            AnyGridFunction::Dual(g) => g.field(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyGridFunction::Primal(f) => f.dim(),
            AnyGridFunction::Dual(g) => g.dim(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        match self {
            AnyGridFunction::Primal(f) => f.values(),
            AnyGridFunction::Dual(g) => g.values(),
        }
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        match self {
            AnyGridFunction::Primal(f) => f.norm(p),
            AnyGridFunction::Dual(g) => g.norm(p),
        }
    }

    pub fn into_primal(self) -> Result<GridFunction<Primal>, FourierError> {
        match self {
            AnyGridFunction::Primal(f) => Ok(f),
            AnyGridFunction::Dual(_) => Err(FourierError::SideMismatch { left: SideKind::Dual, right: SideKind::Primal }),
        }
    }

    pub fn into_dual(self) -> Result<GridFunction<Dual>, FourierError> {
        match self {
            AnyGridFunction::Dual(g) => Ok(g),
            AnyGridFunction::Primal(_) => Err(FourierError::SideMismatch { left: SideKind::Primal, right: SideKind::Dual }),
        }
    }
}

impl From<GridFunction<Primal>> for AnyGridFunction {
    fn from(f: GridFunction<Primal>) -> Self {
        AnyGridFunction::Primal(f)
    }
}

impl From<GridFunction<Dual>> for AnyGridFunction {
    fn from(g: GridFunction<Dual>) -> Self {
        AnyGridFunction::Dual(g)
    }
}

/// `table[a q + b] = chi(sign a b)`.
fn character_table(field: &FiniteField, negate: bool) -> Vec<Complex64> {
    let q = field.order();
    let mut t = Vec::with_capacity((q * q) as usize);
    for a in 0..q {
        for b in 0..q {
            let z = field.chi(field.mul(a, b));
            t.push(if negate { z.conj() } else { z });
        }
    }
    t
}

/// Applies `out[..k..] = sum_j table[k q + j] in[..j..]` along every axis,
/// then multiplies by `scale`.
fn separable_transform(values: &[Complex64], q: usize, d: usize, table: &[Complex64], scale: f64) -> Vec<Complex64> {
    let mut cur = values.to_vec();
    let mut stride = 1usize;
    for _ in 0..d {
        let block = stride * q;
        let blocks = cur.len() / block;
        let src = &cur;
        let parts: Vec<Vec<Complex64>> = par::map_indexed(blocks, |b| {
            let base = b * block;
            let mut out = vec![Complex64::new(0.0, 0.0); block];
            for j in 0..q {
                let line = &src[base + j * stride..base + (j + 1) * stride];
                if line.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                for k in 0..q {
                    let w = table[k * q + j];
                    for (o, &v) in out[k * stride..(k + 1) * stride].iter_mut().zip(line) {
                        *o += w * v;
                    }
                }
            }
            out
        });
        cur = parts.into_iter().flatten().collect();
        stride = block;
    }
    if scale != 1.0 {
        for v in cur.iter_mut() {
            *v *= scale;
        }
    }
    cur
}

fn apply<S: Side, T: Side>(h: &GridFunction<S>, negate: bool, normalize: bool) -> GridFunction<T> {
    let q = h.field.order() as usize;
    let table = character_table(&h.field, negate);
    let scale = if normalize { 1.0 / h.values.len() as f64 } else { 1.0 };
    GridFunction::from_vec(&h.field, h.d, separable_transform(&h.values, q, h.d, &table, scale))
}

/// `g^(x) = sum_m chi(-m.x) g(m)`.
pub fn transform_dual(g: &GridFunction<Dual>) -> GridFunction<Primal> {
    apply(g, true, false)
}

/// `f^(m) = q^-d sum_x chi(-x.m) f(x)`.
pub fn transform_primal(f: &GridFunction<Primal>) -> GridFunction<Dual> {
    apply(f, true, true)
}

/// `f(x) = sum_m chi(m.x) f^(m)`; inverts [`transform_primal`].
pub fn inverse_transform(fhat: &GridFunction<Dual>) -> GridFunction<Primal> {
    apply(fhat, false, false)
}

/// `g(m) = q^-d sum_x chi(m.x) g^(x)`; inverts [`transform_dual`].
pub fn inverse_transform_dual(ghat: &GridFunction<Primal>) -> GridFunction<Dual> {
    apply(ghat, false, true)
}

pub fn lp_norm<S: Side>(h: &GridFunction<S>, p: f64) -> Result<f64, BadExponent> {
    Ok(h.norm(Exponent::new(p)?))
}

/// Convolution against the side's measure, via the convolution theorem.
pub fn convolve<S: Side>(f: &GridFunction<S>, h: &GridFunction<S>) -> Result<GridFunction<S>, FourierError> {
    f.same_shape(h)?;
    let out = match S::KIND {
        SideKind::Primal => {
            let fh = apply::<S, Dual>(f, true, true);
            let hh = apply::<S, Dual>(h, true, true);
            apply::<Dual, S>(&fh.pointwise_mul(&hh)?, false, false)
        }
        SideKind::Dual => {
            let fh = apply::<S, Primal>(f, true, false);
            let hh = apply::<S, Primal>(h, true, false);
            apply::<Primal, S>(&fh.pointwise_mul(&hh)?, false, true)
        }
    };
    Ok(out)
}

/// Literal `sum_y f(x - y) h(y)` (times `q^-d` on the primal side).
pub fn convolve_direct<S: Side>(f: &GridFunction<S>, h: &GridFunction<S>) -> Result<GridFunction<S>, FourierError> {
    f.same_shape(h)?;
    let grid = f.grid();
    let n = grid.len();
    let field = &f.field;
    let coords: Vec<Vec<u32>> = (0..n).map(|i| grid.coords(i)).collect();
    let weight = f.point_weight();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut diff = vec![0u32; f.d];
    for (x, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..n {
            if h.values[y] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..f.d {
                diff[j] = field.sub(coords[x][j], coords[y][j]);
            }
            acc += f.values[grid.index(&diff)] * h.values[y];
        }
        *slot = acc * weight;
    }
    Ok(GridFunction::from_vec(field, f.d, out))
}

/// Side-checked convolution of side-erased functions.
pub fn convolve_any(f: &AnyGridFunction, h: &AnyGridFunction) -> Result<AnyGridFunction, FourierError> {
    match (f, h) {
        (AnyGridFunction::Primal(a), AnyGridFunction::Primal(b)) => Ok(convolve(a, b)?.into()),
        (AnyGridFunction::Dual(a), AnyGridFunction::Dual(b)) => Ok(convolve(a, b)?.into()),
        _ => Err(FourierError::SideMismatch { left: f.side(), right: h.side() }),
    }
}

/// `(d sigma)^v(m) = |S|^-1 sum_{x in S} chi(x.m)`, summed over `S`
/// one axis at a time.
pub fn sigma_inv_bruteforce(v: &Variety) -> GridFunction<Dual> {
    inverse_transform_dual(&variety::surface_measure(v))
}

/// The same sum, one term at a time. Quadratic in the grid size; kept as a
/// reference for small cases.
pub fn sigma_inv_literal(v: &Variety) -> GridFunction<Dual> {
    let grid = v.grid();
    let f = v.field();
    let inv = 1.0 / v.cardinality() as f64;
    let values = (0..grid.len())
        .map(|m| v.points().iter().map(|&x| f.chi(grid.dot(f, x as usize, m))).sum::<Complex64>() * inv)
        .collect();
    GridFunction::from_vec(f, v.dim(), values)
}

/// Closed form of `(d sigma)^v` for a diagonal form.
pub fn sigma_inv_closed_form(form: &QuadraticForm) -> Result<GridFunction<Dual>, VarietyError> {
    let a = form.require_diag()?;
    let f = form.field();
    let d = form.dim();
    let q = f64::from(f.order());
    let size = variety::variety_cardinality(form) as f64;
    let g1 = gauss_sum(f, 1);
    let prod = a.iter().fold(1, |acc, &x| f.mul(acc, x));
    let dual_values = form.dual()?.values();
    let zero = Complex64::new(0.0, 0.0);
    let values: Vec<Complex64> = if d % 2 == 1 {
        let c = g1.powu(d as u32 + 1) / (q * size) * f64::from(f.eta(f.neg(prod)));
        dual_values
            .iter()
            .enumerate()
            .map(|(m, &qs)| {
                if m == 0 {
                    Complex64::new(libm::pow(q, d as f64 - 1.0) / size, 0.0)
                } else if qs == 0 {
                    zero
                } else {
                    c * f64::from(f.eta(qs))
                }
            })
            .collect()
    } else {
        let gd = g1.powu(d as u32) * f64::from(f.eta(prod));
        let on_cone = gd * (1.0 - 1.0 / q) / size;
        let off_cone = -gd / (q * size);
        let origin = Complex64::new(libm::pow(q, d as f64 - 1.0) / size, 0.0) + on_cone;
        dual_values
            .iter()
            .enumerate()
            .map(|(m, &qs)| if m == 0 { origin } else if qs == 0 { on_cone } else { off_cone })
            .collect()
    };
    Ok(GridFunction::from_vec(f, d, values))
}
