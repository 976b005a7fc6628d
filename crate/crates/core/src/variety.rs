//! Quadratic forms over `F_q`, their zero sets, the surface measure, the
//! dual witness sets `M`, `Omega`, `D`, and contained subspaces.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldError, FiniteField};
use crate::fourier::{GridFunction, Primal};
use crate::grid::Grid;
use crate::linalg;

/// Default cap on `q^d` for anything that materializes the whole grid.
pub const DEFAULT_GUARD: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarietyError {
    BadDimension(usize),
    ZeroCoefficient(usize),
    WrongLength { expected: usize, got: usize },
    NotSymmetric,
    DegenerateForm,
    NotDiagonal,
    GridTooLarge { len: Option<usize>, guard: usize },
    NoSquareRatio,
    ConstructionInapplicable(&'static str),
    DependentBasis,
    Field(FieldError),
}

impl fmt::Display for VarietyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietyError::BadDimension(d) => write!(f, "BadDimension: d = {d}"),
            VarietyError::ZeroCoefficient(j) => write!(f, "DegenerateForm: coefficient {j} is zero"),
            VarietyError::WrongLength { expected, got } => {
                write!(f, "WrongLength: expected {expected} entries, got {got}")
            }
            VarietyError::NotSymmetric => write!(f, "NotSymmetric: gram matrix must be symmetric"),
            VarietyError::DegenerateForm => write!(f, "DegenerateForm: form is degenerate"),
            VarietyError::NotDiagonal => write!(f, "NotDiagonal: operation needs a diagonal form"),
            VarietyError::GridTooLarge { len, guard } => match len {
                Some(len) => write!(f, "GridTooLarge: q^d = {len} exceeds guard {guard}"),
                None => write!(f, "GridTooLarge: q^d overflows (guard {guard})"),
            },
            VarietyError::NoSquareRatio => {
                write!(f, "NoSquareRatio: no pair i != j with -a_i/a_j a square")
            }
            VarietyError::ConstructionInapplicable(why) => write!(f, "ConstructionInapplicable: {why}"),
            VarietyError::DependentBasis => write!(f, "DependentBasis: basis vectors are dependent"),
            VarietyError::Field(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for VarietyError {}

impl From<FieldError> for VarietyError {
    fn from(e: FieldError) -> Self {
        VarietyError::Field(e)
    }
}

pub(crate) fn check_guard(grid: Grid, guard: usize) -> Result<usize, VarietyError> {
    match grid.checked_len() {
        Some(len) if len <= guard => Ok(len),
        len => Err(VarietyError::GridTooLarge { len, guard }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormRepr {
    /// `a_1 x_1^2 + ... + a_d x_d^2`.
    Diagonal(Vec<u32>),
    /// `x^T G x` for a symmetric `d x d` matrix `G`.
    Gram(Vec<u32>),
}

/// A nondegenerate quadratic form on `F_q^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    field: FiniteField,
    d: usize,
    repr: FormRepr,
}

impl QuadraticForm {
    pub fn diagonal(field: &FiniteField, coeffs: Vec<u32>) -> Result<Self, VarietyError> {
        let d = coeffs.len();
        if d < 2 {
            return Err(VarietyError::BadDimension(d));
        }
        for (j, &a) in coeffs.iter().enumerate() {
            if a >= field.order() {
                return Err(FieldError::ElementOutOfRange(a as u64).into());
            }
            if a == 0 {
                return Err(VarietyError::ZeroCoefficient(j));
            }
        }
        Ok(Self { field: field.clone(), d, repr: FormRepr::Diagonal(coeffs) })
    }

    /// Diagonal form with integer coefficients read in the prime subfield.
    pub fn from_ints(field: &FiniteField, coeffs: &[i64]) -> Result<Self, VarietyError> {
        Self::diagonal(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn gram(field: &FiniteField, d: usize, matrix: Vec<u32>) -> Result<Self, VarietyError> {
        if d < 2 {
            return Err(VarietyError::BadDimension(d));
        }
        if matrix.len() != d * d {
            return Err(VarietyError::WrongLength { expected: d * d, got: matrix.len() });
        }
        if let Some(&bad) = matrix.iter().find(|&&a| a >= field.order()) {
            return Err(FieldError::ElementOutOfRange(bad as u64).into());
        }
        for i in 0..d {
            for j in 0..i {
                if matrix[i * d + j] != matrix[j * d + i] {
                    return Err(VarietyError::NotSymmetric);
                }
            }
        }
        if linalg::determinant(field, &matrix, d) == 0 {
            return Err(VarietyError::DegenerateForm);
        }
        Ok(Self { field: field.clone(), d, repr: FormRepr::Gram(matrix) })
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

    pub fn repr(&self) -> &FormRepr {
        &self.repr
    }

    pub fn diag(&self) -> Option<&[u32]> {
        match &self.repr {
            FormRepr::Diagonal(a) => Some(a),
            FormRepr::Gram(_) => None,
        }
    }

    pub fn require_diag(&self) -> Result<&[u32], VarietyError> {
        self.diag().ok_or(VarietyError::NotDiagonal)
    }

    pub fn gram_matrix(&self) -> Vec<u32> {
        match &self.repr {
            FormRepr::Gram(g) => g.clone(),
            FormRepr::Diagonal(a) => {
                let mut g = vec![0; self.d * self.d];
                for (j, &aj) in a.iter().enumerate() {
                    g[j * self.d + j] = aj;
                }
                g
            }
        }
    }

    pub fn evaluate(&self, x: &[u32]) -> u32 {
        self.polar(x, x)
    }

    /// Polar bilinear form `B(x, y) = x^T G y`, so that `B(x, x) = Q(x)`.
    pub fn polar(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &self.field;
        match &self.repr {
            FormRepr::Diagonal(a) => (0..self.d).fold(0, |acc, j| f.add(acc, f.mul(a[j], f.mul(x[j], y[j])))),
            FormRepr::Gram(g) => {
                let mut acc = 0;
                for i in 0..self.d {
                    if x[i] == 0 {
                        continue;
                    }
                    let row = (0..self.d).fold(0, |r, j| f.add(r, f.mul(g[i * self.d + j], y[j])));
                    acc = f.add(acc, f.mul(x[i], row));
                }
                acc
            }
        }
    }

    /// Determinant of the gram matrix (`a_1 ... a_d` for diagonal forms).
    pub fn determinant(&self) -> u32 {
        match &self.repr {
            FormRepr::Diagonal(a) => a.iter().fold(1, |acc, &x| self.field.mul(acc, x)),
            FormRepr::Gram(g) => linalg::determinant(&self.field, g, self.d),
        }
    }

    /// The dual form `Q*(m) = m_1^2/a_1 + ... + m_d^2/a_d`.
    pub fn dual(&self) -> Result<QuadraticForm, VarietyError> {
        let a = self.require_diag()?;
        let inv = a.iter().map(|&x| self.field.inv(x).expect("nonzero")).collect();
        QuadraticForm::diagonal(&self.field, inv)
    }

    /// `Q` at every grid point, in grid order.
    pub fn values(&self) -> Vec<u32> {
        let grid = self.grid();
        let f = &self.field;
        match &self.repr {
            FormRepr::Diagonal(a) => {
                let tables: Vec<Vec<u32>> =
                    a.iter().map(|&aj| (0..f.order()).map(|x| f.mul(aj, f.square(x))).collect()).collect();
                grid.separable_values(f, &tables)
            }
            FormRepr::Gram(_) => {
                let mut coords = vec![0; self.d];
                (0..grid.len())
                    .map(|i| {
                        grid.coords_into(i, &mut coords);
                        self.evaluate(&coords)
                    })
                    .collect()
            }
        }
    }
}

/// Output of [`diagonalize`]: `P^T G P = diag(coeffs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalization {
    pub coeffs: Vec<u32>,
    /// Change of basis `P`, row-major; column `j` is the `j`-th new basis vector.
    pub change: Vec<u32>,
}

impl Diagonalization {
    pub fn form(&self, field: &FiniteField) -> Result<QuadraticForm, VarietyError> {
        QuadraticForm::diagonal(field, self.coeffs.clone())
    }
}

/// Symmetric Gaussian elimination by congruence. Diagonal input returns the
/// identity change of basis.
pub fn diagonalize(form: &QuadraticForm) -> Result<Diagonalization, VarietyError> {
    let f = form.field();
    let d = form.dim();
    let mut a = form.gram_matrix();
    let mut p = linalg::identity(d);

    // Column operation e_j <- e_j + c e_i, applied as a congruence.
    let combine = |a: &mut Vec<u32>, p: &mut Vec<u32>, j: usize, i: usize, c: u32| {
        for r in 0..d {
            p[r * d + j] = f.add(p[r * d + j], f.mul(c, p[r * d + i]));
        }
        for r in 0..d {
            a[r * d + j] = f.add(a[r * d + j], f.mul(c, a[r * d + i]));
        }
        for col in 0..d {
            a[j * d + col] = f.add(a[j * d + col], f.mul(c, a[i * d + col]));
        }
    };
    let swap = |a: &mut Vec<u32>, p: &mut Vec<u32>, i: usize, j: usize| {
        for r in 0..d {
            p.swap(r * d + i, r * d + j);
            a.swap(r * d + i, r * d + j);
        }
        for col in 0..d {
            a.swap(i * d + col, j * d + col);
        }
    };

    for k in 0..d {
        if a[k * d + k] == 0 {
            if let Some(i) = (k + 1..d).find(|&i| a[i * d + i] != 0) {
                swap(&mut a, &mut p, k, i);
            } else if let Some(j) = (k + 1..d).find(|&j| a[k * d + j] != 0) {
                // a_kk = a_jj = 0, a_kj != 0: e_k + e_j has value 2 a_kj != 0.
                combine(&mut a, &mut p, k, j, 1);
            } else if let Some((i, j)) =
                (k + 1..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).find(|&(i, j)| a[i * d + j] != 0)
            {
                combine(&mut a, &mut p, i, j, 1);
                swap(&mut a, &mut p, k, i);
            } else {
                return Err(VarietyError::DegenerateForm);
            }
        }
        let pivot_inv = f.inv(a[k * d + k]).ok_or(VarietyError::DegenerateForm)?;
        for j in k + 1..d {
            if a[k * d + j] != 0 {
                let c = f.neg(f.mul(a[k * d + j], pivot_inv));
                combine(&mut a, &mut p, j, k, c);
            }
        }
    }
    let coeffs: Vec<u32> = (0..d).map(|i| a[i * d + i]).collect();
    if coeffs.contains(&0) {
        return Err(VarietyError::DegenerateForm);
    }
    Ok(Diagonalization { coeffs, change: p })
}

/// The gram form of `x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d`.
pub fn cone_form(d: usize, field: &FiniteField) -> Result<QuadraticForm, VarietyError> {
    if d < 3 {
        return Err(VarietyError::BadDimension(d));
    }
    let mut g = vec![0; d * d];
    for j in 0..d - 2 {
        g[j * d + j] = 1;
    }
    let minus_half = field.neg(field.inv(field.from_int(2)).expect("odd characteristic"));
    g[(d - 2) * d + (d - 1)] = minus_half;
    g[(d - 1) * d + (d - 2)] = minus_half;
    QuadraticForm::gram(field, d, g)
}

/// The zero set `S` of a quadratic form, enumerated.
#[derive(Debug, Clone)]
pub struct Variety {
    form: QuadraticForm,
    points: Vec<u32>,
    members: Vec<bool>,
}

impl Variety {
    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn field(&self) -> &FiniteField {
        self.form.field()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn grid(&self) -> Grid {
        self.form.grid()
    }

    /// Grid indices of the points of `S`, increasing.
    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn contains_coords(&self, x: &[u32]) -> bool {
        self.members[self.grid().index(x)]
    }

    /// Membership mask over the grid.
    pub fn mask(&self) -> &[bool] {
        &self.members
    }
}

pub fn enumerate_variety(form: &QuadraticForm) -> Result<Variety, VarietyError> {
    enumerate_variety_with_guard(form, DEFAULT_GUARD)
}

pub fn enumerate_variety_with_guard(form: &QuadraticForm, guard: usize) -> Result<Variety, VarietyError> {
    check_guard(form.grid(), guard)?;
    let members: Vec<bool> = form.values().into_iter().map(|v| v == 0).collect();
    let points = members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as u32).collect();
    Ok(Variety { form: form.clone(), points, members })
}

/// Closed-form `|S|`: `q^{d-1}` for odd `d`, and
/// `q^{d-1} + eta((-1)^{d/2} det) q^{d/2-1} (q-1)` for even `d`.
pub fn variety_cardinality(form: &QuadraticForm) -> u64 {
    let f = form.field();
    let q = f.order() as i64;
    let d = form.dim() as u32;
    if d % 2 == 1 {
        return q.pow(d - 1) as u64;
    }
    let sign = if (d / 2) % 2 == 0 { 1 } else { f.minus_one() };
    let disc = f.mul(sign, form.determinant());
    (q.pow(d - 1) + i64::from(f.eta(disc)) * q.pow(d / 2 - 1) * (q - 1)) as u64
}

/// `sigma(x) = q^d / |S|` on `S`, zero elsewhere.
pub fn surface_measure(v: &Variety) -> GridFunction<Primal> {
    let height = v.grid().len() as f64 / v.cardinality() as f64;
    let values = v.mask().iter().map(|&m| if m { height } else { 0.0 }).collect::<Vec<f64>>();
    GridFunction::from_real(v.field(), v.dim(), &values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessLabel {
    M,
    Omega,
    D,
}

/// A dual-side test set. `dim` is the dimension of the ambient space
/// (`1` for `D`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub label: WitnessLabel,
    pub dim: usize,
    pub points: Vec<u32>,
}

impl WitnessSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indicator(&self, field: &FiniteField) -> GridFunction<crate::fourier::Dual> {
        let grid = Grid::new(field.order(), self.dim);
        let mut values = vec![0.0; grid.len()];
        for &m in &self.points {
            values[m as usize] = 1.0;
        }
        GridFunction::from_real(field, self.dim, &values)
    }
}

/// `M = {m : m_1^2/a_1 + ... + m_d^2/a_d = 0}`.
pub fn witness_m(form: &QuadraticForm) -> Result<WitnessSet, VarietyError> {
    let dual = enumerate_variety(&form.dual()?)?;
    Ok(WitnessSet { label: WitnessLabel::M, dim: form.dim(), points: dual.points })
}

/// `D`, the nonzero squares of `F_q`.
pub fn witness_d(field: &FiniteField) -> WitnessSet {
    WitnessSet { label: WitnessLabel::D, dim: 1, points: field.nonzero_squares() }
}

/// The change of variables used for the `Omega` witness.
#[derive(Debug, Clone)]
pub struct OmegaWitness {
    /// `S' = {b_1 y_1^2 + ... + b_{d-2} y_{d-2}^2 - y_{d-1} y_d = 0}`.
    pub transformed: Variety,
    /// Coefficients `b` of the untouched coordinates.
    pub rest: Vec<u32>,
    /// The coordinate pair `(i, j)` with `-a_i/a_j = l^2`.
    pub pair: (usize, usize),
    pub l: u32,
    /// `L` with `y = L x`; `x` is on `S` iff `L x` is on `S'`.
    pub substitution: Vec<u32>,
    pub omega: WitnessSet,
}

/// First pair `(i, j)`, `i != j`, with `-a_i/a_j` a square. The pair of the
/// last two coordinates is tried first.
pub fn square_ratio_pair(field: &FiniteField, a: &[u32]) -> Option<(usize, usize, u32)> {
    let d = a.len();
    let ratio = |i: usize, j: usize| field.neg(field.div(a[i], a[j]).expect("nonzero"));
    let preferred = (d >= 2).then_some((d - 2, d - 1));
    preferred
        .into_iter()
        .chain((0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))))
        .find_map(|(i, j)| field.sqrt(ratio(i, j)).map(|l| (i, j, l)))
}

pub fn witness_omega(form: &QuadraticForm) -> Result<OmegaWitness, VarietyError> {
    let a = form.require_diag()?;
    let f = form.field();
    let d = form.dim();
    if d < 3 {
        return Err(VarietyError::BadDimension(d));
    }
    let (i, j, l) = square_ratio_pair(f, a).ok_or(VarietyError::NoSquareRatio)?;
    let rest_idx: Vec<usize> = (0..d).filter(|&k| k != i && k != j).collect();
    let rest: Vec<u32> = rest_idx.iter().map(|&k| a[k]).collect();

    // y_r = x_{rest_r}; y_{d-2} = a_j (l x_i + x_j); y_{d-1} = l x_i - x_j.
    let mut sub = vec![0u32; d * d];
    for (r, &k) in rest_idx.iter().enumerate() {
        sub[r * d + k] = 1;
    }
    sub[(d - 2) * d + i] = f.mul(a[j], l);
    sub[(d - 2) * d + j] = a[j];
    sub[(d - 1) * d + i] = l;
    sub[(d - 1) * d + j] = f.minus_one();

    let mut gram = vec![0u32; d * d];
    for (r, &b) in rest.iter().enumerate() {
        gram[r * d + r] = b;
    }
    let minus_half = f.neg(f.inv(f.from_int(2)).expect("odd characteristic"));
    gram[(d - 2) * d + (d - 1)] = minus_half;
    gram[(d - 1) * d + (d - 2)] = minus_half;
    let transformed = enumerate_variety(&QuadraticForm::gram(f, d, gram)?)?;

    // Omega = {m in F_q^{d-1} x D : m_{d-1} = (sum_r m_r^2 / b_r) / (4 m_d)}.
    let grid = form.grid();
    let squares = f.nonzero_squares();
    let head = Grid::new(f.order(), d - 2);
    let four = f.from_int(4);
    let b_inv: Vec<u32> = rest.iter().map(|&b| f.inv(b).expect("nonzero")).collect();
    let mut points = Vec::with_capacity(head.len() * squares.len());
    let mut coords = vec![0u32; d];
    for h in 0..head.len() {
        head.coords_into(h, &mut coords[..d - 2]);
        let num = (0..d - 2).fold(0, |acc, r| f.add(acc, f.mul(b_inv[r], f.square(coords[r]))));
        for &md in &squares {
            coords[d - 1] = md;
            coords[d - 2] = f.div(num, f.mul(four, md)).expect("nonzero");
            points.push(grid.index(&coords) as u32);
        }
    }
    points.sort_unstable();
    Ok(OmegaWitness {
        transformed,
        rest,
        pair: (i, j),
        l,
        substitution: sub,
        omega: WitnessSet { label: WitnessLabel::Omega, dim: d, points },
    })
}

/// `H = offset + span(basis)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    pub offset: Vec<u32>,
    pub basis: Vec<Vec<u32>>,
}

impl AffineSubspace {
    pub fn new(field: &FiniteField, offset: Vec<u32>, basis: Vec<Vec<u32>>) -> Result<Self, VarietyError> {
        let d = offset.len();
        if basis.iter().any(|b| b.len() != d) {
            return Err(VarietyError::WrongLength { expected: d, got: basis.iter().map(|b| b.len()).find(|&l| l != d).unwrap() });
        }
        let flat: Vec<u32> = basis.iter().flatten().copied().collect();
        if linalg::rank(field, &flat, basis.len(), d) != basis.len() {
            return Err(VarietyError::DependentBasis);
        }
        Ok(Self { offset, basis })
    }

    pub fn linear(field: &FiniteField, basis: Vec<Vec<u32>>) -> Result<Self, VarietyError> {
        let d = basis.first().map(|b| b.len()).unwrap_or(0);
        Self::new(field, vec![0; d], basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    /// Grid indices of all `q^k` points.
    pub fn points(&self, field: &FiniteField) -> Vec<usize> {
        let d = self.ambient_dim();
        let grid = Grid::new(field.order(), d);
        let params = Grid::new(field.order(), self.dim());
        let mut t = vec![0u32; self.dim()];
        (0..params.len())
            .map(|s| {
                params.coords_into(s, &mut t);
                let x: Vec<u32> = (0..d)
                    .map(|c| {
                        self.basis
                            .iter()
                            .zip(&t)
                            .fold(self.offset[c], |acc, (b, &tk)| field.add(acc, field.mul(tk, b[c])))
                    })
                    .collect();
                grid.index(&x)
            })
            .collect()
    }

    /// Image under `x -> P x`.
    pub fn map(&self, field: &FiniteField, p: &[u32]) -> Result<Self, VarietyError> {
        let offset = linalg::mat_vec(field, p, &self.offset);
        let basis = self.basis.iter().map(|b| linalg::mat_vec(field, p, b)).collect();
        Self::new(field, offset, basis)
    }
}

pub fn verify_subspace(h: &AffineSubspace, v: &Variety) -> bool {
    h.ambient_dim() == v.dim() && h.points(v.field()).into_iter().all(|x| v.contains(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// `(t_1, t_1, ..., t_k, t_k, 0)`, `k = (d-1)/2`.
    AlternatingOdd,
    /// `(t_1, t_1, ..., t_k, t_k)`, `k = d/2`.
    AlternatingEven,
    /// `(t_1, l_1 t_1, ..., t_k, l_k t_k, 0)` with `l_i^2 = -a_{2i-1}/a_{2i}`.
    ConeOdd,
    /// `(t_1, l_1 t_1, ..., t_k, l_k t_k)` with `l_i^2 = -a_{2i-1}/a_{2i}`.
    ConeEven,
    /// `{t (e_i + l e_j)}` for the first pair with `-a_i/a_j = l^2`.
    Line,
}

impl SubspaceKind {
    pub const ALL: [SubspaceKind; 5] = [
        SubspaceKind::AlternatingOdd,
        SubspaceKind::AlternatingEven,
        SubspaceKind::ConeOdd,
        SubspaceKind::ConeEven,
        SubspaceKind::Line,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubspaceKind::AlternatingOdd => "alternating-odd",
            SubspaceKind::AlternatingEven => "alternating-even",
            SubspaceKind::ConeOdd => "cone-odd",
            SubspaceKind::ConeEven => "cone-even",
            SubspaceKind::Line => "line",
        }
    }
}

/// Builds one of the explicit subspaces contained in `S` and checks that
/// every point satisfies the form.
pub fn paper_subspace(form: &QuadraticForm, kind: SubspaceKind) -> Result<AffineSubspace, VarietyError> {
    let a = form.require_diag()?;
    let f = form.field();
    let d = form.dim();
    let pair_vec = |i: usize, j: usize, l: u32| {
        let mut v = vec![0u32; d];
        v[i] = 1;
        v[j] = l;
        v
    };
    let paired = |pairs: usize, forced_one: bool| -> Result<Vec<Vec<u32>>, VarietyError> {
        (0..pairs)
            .map(|k| {
                let (i, j) = (2 * k, 2 * k + 1);
                let target = f.neg(f.div(a[i], a[j]).expect("nonzero"));
                if forced_one {
                    if target != 1 {
                        return Err(VarietyError::ConstructionInapplicable("coefficients do not alternate in sign"));
                    }
                    Ok(pair_vec(i, j, 1))
                } else {
                    let l = f
                        .sqrt(target)
                        .ok_or(VarietyError::ConstructionInapplicable("-a_i/a_j is not a square for some pair"))?;
                    Ok(pair_vec(i, j, l))
                }
            })
            .collect()
    };
    let basis = match kind {
        SubspaceKind::AlternatingOdd | SubspaceKind::ConeOdd if d % 2 == 0 || d < 3 => {
            return Err(VarietyError::ConstructionInapplicable("needs odd d >= 3"))
        }
        SubspaceKind::AlternatingEven | SubspaceKind::ConeEven if d % 2 == 1 => {
            return Err(VarietyError::ConstructionInapplicable("needs even d"))
        }
        SubspaceKind::AlternatingOdd => paired((d - 1) / 2, true)?,
        SubspaceKind::AlternatingEven => paired(d / 2, true)?,
        SubspaceKind::ConeOdd => paired((d - 1) / 2, false)?,
        SubspaceKind::ConeEven => paired(d / 2, false)?,
        SubspaceKind::Line => {
            let (i, j, l) = (0..d)
                .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
                .find_map(|(i, j)| f.sqrt(f.neg(f.div(a[i], a[j]).unwrap())).map(|l| (i, j, l)))
                .ok_or(VarietyError::ConstructionInapplicable("no pair with -a_i/a_j a square"))?;
            vec![pair_vec(i, j, l)]
        }
    };
    let h = AffineSubspace::linear(f, basis)?;
    let grid = form.grid();
    let ok = h.points(f).into_iter().all(|x| form.evaluate(&grid.coords(x)) == 0);
    if !ok {
        return Err(VarietyError::ConstructionInapplicable("constructed subspace leaves S"));
    }
    Ok(h)
}

/// A largest linear subspace on which the form vanishes, by depth-first
/// search over isotropic vectors that are pairwise orthogonal for the polar
/// form. Candidates are normalized (first nonzero coordinate 1) and taken
/// in increasing grid order, so each subspace is reached through its
/// sorted basis.
pub fn max_isotropic_subspace(form: &QuadraticForm) -> Result<AffineSubspace, VarietyError> {
    max_isotropic_subspace_with_guard(form, DEFAULT_GUARD)
}

pub fn max_isotropic_subspace_with_guard(form: &QuadraticForm, guard: usize) -> Result<AffineSubspace, VarietyError> {
    let grid = form.grid();
    let len = check_guard(grid, guard)?;
    let f = form.field();
    let d = form.dim();
    let values = form.values();
    let vectors: Vec<Vec<u32>> = (1..len)
        .filter(|&i| values[i] == 0)
        .map(|i| grid.coords(i))
        .filter(|c| c.iter().find(|&&x| x != 0) == Some(&1))
        .collect();

    struct Search<'a> {
        form: &'a QuadraticForm,
        vectors: &'a [Vec<u32>],
        best: Vec<usize>,
        d: usize,
    }

    impl Search<'_> {
        fn independent(&self, chosen: &[usize], next: usize) -> bool {
            let f = self.form.field();
            let rows: Vec<u32> = chosen
                .iter()
                .chain(core::iter::once(&next))
                .flat_map(|&c| self.vectors[c].iter().copied())
                .collect();
            linalg::rank(f, &rows, chosen.len() + 1, self.d) == chosen.len() + 1
        }

        fn run(&mut self, chosen: &mut Vec<usize>, candidates: &[usize]) {
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            for (pos, &c) in candidates.iter().enumerate() {
                // Even taking every remaining candidate cannot beat the best.
                if chosen.len() + candidates.len() - pos <= self.best.len() {
                    return;
                }
                if !self.independent(chosen, c) {
                    continue;
                }
                let next: Vec<usize> = candidates[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&o| self.form.polar(&self.vectors[c], &self.vectors[o]) == 0)
                    .collect();
                chosen.push(c);
                self.run(chosen, &next);
                chosen.pop();
            }
        }
    }

    let mut search = Search { form, vectors: &vectors, best: Vec::new(), d };
    let all: Vec<usize> = (0..vectors.len()).collect();
    search.run(&mut Vec::new(), &all);
    let basis: Vec<Vec<u32>> = search.best.iter().map(|&i| vectors[i].clone()).collect();
    if basis.is_empty() {
        return Ok(AffineSubspace { offset: vec![0; d], basis });
    }
    AffineSubspace::linear(f, basis)
}

/// Witt index of the form.
pub fn max_isotropic_dimension(form: &QuadraticForm) -> Result<usize, VarietyError> {
    max_isotropic_subspace(form).map(|h| h.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn field(q: u64) -> FiniteField {
        FiniteField::of_order(q).unwrap()
    }

    fn random_form(f: &FiniteField, d: usize, rng: &mut impl Rng) -> QuadraticForm {
        QuadraticForm::diagonal(f, (0..d).map(|_| rng.gen_range(1..f.order())).collect()).unwrap()
    }

    fn brute_count(form: &QuadraticForm) -> usize {
        let g = form.grid();
        (0..g.len()).filter(|&i| form.evaluate(&g.coords(i)) == 0).count()
    }

    #[test]
    fn rejects_degenerate_input() {
        let f = field(5);
        assert_eq!(QuadraticForm::from_ints(&f, &[1, 0, 1]).unwrap_err(), VarietyError::ZeroCoefficient(1));
        assert_eq!(QuadraticForm::from_ints(&f, &[1]).unwrap_err(), VarietyError::BadDimension(1));
        assert_eq!(QuadraticForm::gram(&f, 2, vec![1, 2, 3, 1]).unwrap_err(), VarietyError::NotSymmetric);
        assert_eq!(QuadraticForm::gram(&f, 2, vec![1, 1, 1, 1]).unwrap_err(), VarietyError::DegenerateForm);
    }

    #[test]
    fn enumeration_examples() {
        let f3 = field(3);
        let s = enumerate_variety(&QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap()).unwrap();
        assert_eq!(s.cardinality(), 9);
        assert!(s.contains(0));
        let s = enumerate_variety(&QuadraticForm::from_ints(&f3, &[1, -1]).unwrap()).unwrap();
        assert_eq!(s.cardinality(), 5);
        let big = QuadraticForm::from_ints(&field(13), &[1; 7]).unwrap();
        assert!(matches!(enumerate_variety(&big), Err(VarietyError::GridTooLarge { .. })));
    }

    #[test]
    fn cardinality_examples() {
        let f3 = field(3);
        assert_eq!(variety_cardinality(&QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap()), 9);
        assert_eq!(variety_cardinality(&QuadraticForm::from_ints(&f3, &[1, -1]).unwrap()), 5);
        assert_eq!(variety_cardinality(&QuadraticForm::from_ints(&f3, &[1, 1]).unwrap()), 1);
        let f5 = field(5);
        let form = QuadraticForm::from_ints(&f5, &[1, 1]).unwrap();
        assert_eq!(variety_cardinality(&form), 9);
        assert_eq!(brute_count(&form), 9);
    }

    #[test]
    fn cardinality_closed_form_matches_enumeration() {
        let mut rng = crate::seed::rng(5);
        for q in [3u64, 5, 7, 9, 11, 13] {
            let f = field(q);
            for d in 2..=5usize {
                if (q as usize).pow(d as u32) > 200_000 {
                    continue;
                }
                for _ in 0..20 {
                    let form = random_form(&f, d, &mut rng);
                    let s = enumerate_variety(&form).unwrap();
                    assert_eq!(s.cardinality() as u64, variety_cardinality(&form), "q={q} d={d}");
                    for &x in s.points() {
                        let neg = s.grid().neg(&f, x as usize);
                        assert!(s.contains(neg));
                    }
                }
            }
        }
    }

    #[test]
    fn surface_measure_has_unit_mass() {
        let f3 = field(3);
        let s = enumerate_variety(&QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap()).unwrap();
        let sigma = surface_measure(&s);
        let mass: f64 = sigma.values().iter().map(|z| z.re).sum::<f64>() / 27.0;
        assert!((mass - 1.0).abs() < 1e-14);
        for (i, z) in sigma.values().iter().enumerate() {
            let expect = if s.contains(i) { 3.0 } else { 0.0 };
            assert_eq!(z.re, expect);
        }
    }

    #[test]
    fn diagonalize_examples() {
        let f5 = field(5);
        let diag = QuadraticForm::from_ints(&f5, &[1, 2, 3]).unwrap();
        let out = diagonalize(&diag).unwrap();
        assert_eq!(out.change, linalg::identity(3));
        assert_eq!(out.coeffs, vec![1, 2, 3]);

        let cone = cone_form(3, &f5).unwrap();
        let out = diagonalize(&cone).unwrap();
        let g = cone.gram_matrix();
        let pt = linalg::transpose(&out.change, 3);
        let dmat = linalg::mat_mul(&f5, &linalg::mat_mul(&f5, &pt, &g, 3), &out.change, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(dmat[i * 3 + j] == 0, i != j);
            }
        }
        let classes: Vec<i8> = out.coeffs.iter().map(|&c| f5.eta(c)).collect();
        // (1, -1, 1) up to squares; -1 is a square mod 5.
        assert_eq!(classes, vec![1, f5.eta(f5.minus_one()), 1]);
        // (0,1,0) and (0,0,1) lie on the cone.
        let c = enumerate_variety(&cone).unwrap();
        assert!(c.contains_coords(&[0, 1, 0]) && c.contains_coords(&[0, 0, 1]));
    }

    #[test]
    fn diagonalize_random_grams() {
        let mut rng = crate::seed::rng(9);
        let f7 = field(7);
        let d = 4;
        let mut done = 0;
        while done < 30 {
            let mut g = vec![0u32; d * d];
            for i in 0..d {
                for j in i..d {
                    let v = rng.gen_range(0..7);
                    g[i * d + j] = v;
                    g[j * d + i] = v;
                }
            }
            let Ok(form) = QuadraticForm::gram(&f7, d, g.clone()) else { continue };
            let out = diagonalize(&form).unwrap();
            let pt = linalg::transpose(&out.change, d);
            let dmat = linalg::mat_mul(&f7, &linalg::mat_mul(&f7, &pt, &g, d), &out.change, d);
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        assert_eq!(dmat[i * d + i], out.coeffs[i]);
                        assert_ne!(out.coeffs[i], 0);
                    } else {
                        assert_eq!(dmat[i * d + j], 0);
                    }
                }
            }
            assert_ne!(linalg::determinant(&f7, &out.change, d), 0);
            let diag = out.form(&f7).unwrap();
            assert_eq!(brute_count(&form), enumerate_variety(&diag).unwrap().cardinality());
            done += 1;
        }
    }

    #[test]
    fn even_cone_cardinality_matches_its_diagonalization() {
        for q in [3u64, 5, 7] {
            let f = field(q);
            let cone = cone_form(4, &f).unwrap();
            let diag = diagonalize(&cone).unwrap().form(&f).unwrap();
            let c = enumerate_variety(&cone).unwrap();
            assert_eq!(c.cardinality() as u64, variety_cardinality(&diag));
            assert_eq!(c.cardinality() as u64, variety_cardinality(&cone));
        }
    }

    #[test]
    fn witness_m_examples() {
        let f3 = field(3);
        let ones = QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap();
        let m = witness_m(&ones).unwrap();
        assert_eq!(m.points, enumerate_variety(&ones).unwrap().points().to_vec());
        let split = QuadraticForm::from_ints(&f3, &[1, -1]).unwrap();
        let m = witness_m(&split).unwrap();
        assert_eq!(m.len(), 5);
        assert!(m.points.contains(&0));
    }

    #[test]
    fn witness_omega_examples() {
        let f3 = field(3);
        let w = witness_omega(&QuadraticForm::from_ints(&f3, &[1, 1, -1]).unwrap()).unwrap();
        assert_eq!(w.omega.len(), 3);
        let f5 = field(5);
        let w = witness_omega(&QuadraticForm::from_ints(&f5, &[1, 2, 3]).unwrap());
        if let Ok(w) = w {
            assert_eq!(w.omega.len(), 10);
        }
        let w = witness_omega(&QuadraticForm::from_ints(&f5, &[1, 1, 1]).unwrap()).unwrap();
        assert_eq!(w.omega.len(), 10);
        assert_eq!(
            witness_omega(&QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap()).unwrap_err(),
            VarietyError::NoSquareRatio
        );
        assert_eq!(witness_d(&f5).points, vec![1, 4]);
    }

    #[test]
    fn omega_substitution_maps_s_onto_transformed_surface() {
        for q in [3u64, 5, 7] {
            let f = field(q);
            for coeffs in [[1i64, -1, 1], [1, 1, -1], [2, 1, -1]] {
                let form = QuadraticForm::from_ints(&f, &coeffs).unwrap();
                let Ok(w) = witness_omega(&form) else { continue };
                let s = enumerate_variety(&form).unwrap();
                assert_eq!(s.cardinality(), w.transformed.cardinality());
                let g = form.grid();
                for &x in s.points() {
                    let y = linalg::mat_vec(&f, &w.substitution, &g.coords(x as usize));
                    assert!(w.transformed.contains_coords(&y));
                }
                let expect = (q as usize).pow(1) * (q as usize - 1) / 2;
                assert_eq!(w.omega.len(), expect);
            }
        }
    }

    #[test]
    fn paper_subspace_examples() {
        let f5 = field(5);
        let alt3 = QuadraticForm::from_ints(&f5, &[1, -1, 1]).unwrap();
        let h = paper_subspace(&alt3, SubspaceKind::Line).unwrap();
        assert_eq!(h.basis, vec![vec![1, 1, 0]]);
        let h = paper_subspace(&alt3, SubspaceKind::AlternatingOdd).unwrap();
        assert_eq!(h.dim(), 1);

        let alt4 = QuadraticForm::from_ints(&f5, &[1, -1, 1, -1]).unwrap();
        let h = paper_subspace(&alt4, SubspaceKind::AlternatingEven).unwrap();
        assert_eq!(h.basis, vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        assert!(verify_subspace(&h, &enumerate_variety(&alt4).unwrap()));

        let newcone = QuadraticForm::from_ints(&f5, &[1, 1, -1]).unwrap();
        let h = paper_subspace(&newcone, SubspaceKind::ConeOdd).unwrap();
        assert_eq!(h.basis, vec![vec![1, 2, 0]]);
        assert!(verify_subspace(&h, &enumerate_variety(&newcone).unwrap()));

        let f3 = field(3);
        let cone3 = QuadraticForm::from_ints(&f3, &[1, 1, -1]).unwrap();
        assert!(matches!(paper_subspace(&cone3, SubspaceKind::ConeOdd), Err(VarietyError::ConstructionInapplicable(_))));
        assert!(matches!(paper_subspace(&alt4, SubspaceKind::AlternatingOdd), Err(VarietyError::ConstructionInapplicable(_))));
    }

    #[test]
    fn verify_subspace_rejects_bad_candidates() {
        let f5 = field(5);
        let ones = QuadraticForm::from_ints(&f5, &[1, 1, 1]).unwrap();
        let s = enumerate_variety(&ones).unwrap();
        let axis = AffineSubspace::linear(&f5, vec![vec![1, 0, 0]]).unwrap();
        assert!(!verify_subspace(&axis, &s));

        let alt = QuadraticForm::from_ints(&f5, &[1, -1, 1]).unwrap();
        let s = enumerate_variety(&alt).unwrap();
        let lam = paper_subspace(&alt, SubspaceKind::Line).unwrap();
        assert!(verify_subspace(&lam, &s));
        // alpha = (0,0,1): Q(alpha) = 1 != 0.
        let shifted = AffineSubspace::new(&f5, vec![0, 0, 1], lam.basis.clone()).unwrap();
        assert!(!verify_subspace(&shifted, &s));
        assert_eq!(
            AffineSubspace::linear(&f5, vec![vec![1, 1, 0], vec![2, 2, 0]]).unwrap_err(),
            VarietyError::DependentBasis
        );
    }

    #[test]
    fn witt_index_examples_and_bounds() {
        let f3 = field(3);
        assert_eq!(max_isotropic_dimension(&QuadraticForm::from_ints(&f3, &[1, -1]).unwrap()).unwrap(), 1);
        assert_eq!(max_isotropic_dimension(&QuadraticForm::from_ints(&f3, &[1, 1]).unwrap()).unwrap(), 0);
        let mut rng = crate::seed::rng(17);
        for q in [3u64, 5, 7] {
            let f = field(q);
            for d in 2..=4usize {
                for _ in 0..5 {
                    let form = random_form(&f, d, &mut rng);
                    let h = max_isotropic_subspace(&form).unwrap();
                    assert!(h.dim() <= d / 2);
                    if d % 2 == 1 {
                        assert!(h.dim() <= (d - 1) / 2);
                    }
                    assert!(verify_subspace(&h, &enumerate_variety(&form).unwrap()));
                }
            }
        }
    }
}
