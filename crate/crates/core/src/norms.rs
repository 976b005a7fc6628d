//! Lower bounds for the `L^p -> L^r` norms of the extension, restriction and
//! averaging operators: explicit witnesses, exact `L^2` values, and a
//! nonlinear power ascent for general exponents.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::exponent::{weighted_norm, Exponent};
use crate::fourier::{self, Dual, GridFunction, Primal};
use crate::operators::{self, SurfaceFunction};
use crate::par;
use crate::seed;
use crate::variety::{self, AffineSubspace, SubspaceKind, Variety, VarietyError, WitnessSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `f -> (f d sigma)^v`, `L^p(S, d sigma) -> L^r(dm)`.
    Extension,
    /// `g -> g^|_S`, `L^p(dm) -> L^r(S, d sigma)`.
    Restriction,
    /// `f -> f * d sigma`, `L^p(dx) -> L^r(dx)`.
    Averaging,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Extension => "extension",
            OperatorKind::Restriction => "restriction",
            OperatorKind::Averaging => "averaging",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormError {
    BadExponent(f64),
    ZeroWitness,
    WrongLength { expected: usize, got: usize },
    NotL2,
    MonotonicityViolation { restart: usize, iteration: usize, drop: f64 },
    Variety(VarietyError),
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::BadExponent(p) => write!(f, "BadExponent: {p} is not in [1, inf]"),
            NormError::ZeroWitness => write!(f, "ZeroWitness: witness has zero norm"),
            NormError::WrongLength { expected, got } => {
                write!(f, "WrongLength: expected {expected} values, got {got}")
            }
            NormError::NotL2 => write!(f, "NotL2: exact norm needs p = r = 2"),
            NormError::MonotonicityViolation { restart, iteration, drop } => write!(
                f,
                "MonotonicityViolation: objective fell by {drop:e} at restart {restart}, iteration {iteration}"
            ),
            NormError::Variety(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NormError {}

impl From<VarietyError> for NormError {
    fn from(e: VarietyError) -> Self {
        NormError::Variety(e)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OperatorSpec<'v> {
    pub kind: OperatorKind,
    pub variety: &'v Variety,
    pub p: Exponent,
    pub r: Exponent,
}

impl<'v> OperatorSpec<'v> {
    pub fn new(kind: OperatorKind, variety: &'v Variety, p: f64, r: f64) -> Result<Self, NormError> {
        let p = Exponent::new(p).map_err(|e| NormError::BadExponent(e.0))?;
        let r = Exponent::new(r).map_err(|e| NormError::BadExponent(e.0))?;
        Ok(Self { kind, variety, p, r })
    }

    /// Length of an input vector.
    pub fn input_len(&self) -> usize {
        match self.kind {
            OperatorKind::Extension => self.variety.cardinality(),
            OperatorKind::Restriction | OperatorKind::Averaging => self.variety.grid().len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Witness,
    Ascent,
    Power22,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Witness => "witness",
            Method::Ascent => "ascent",
            Method::Power22 => "power-2-2",
        }
    }
}

/// How a stored witness re-derives its ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `||T w||_r / ||w||_p`.
    Direct,
    /// For extension specs: a dual-grid `g` tested through the adjoint,
    /// `||g^|_V||_{p'} / ||g||_{r'}`, where `V` is `S` or, when
    /// `transformed`, the linearly equivalent surface of the `Omega`
    /// construction.
    Dual { transformed: bool },
}

/// A lower bound for an operator norm, with the input that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub method: Method,
    pub witness: String,
    pub iterations: usize,
    pub converged: bool,
    pub route: Route,
    pub input: Vec<Complex64>,
    /// FNV-1a over the bits of `input`.
    pub digest: u64,
    pub diagnostics: Vec<(String, f64)>,
}

impl NormEstimate {
    fn new(value: f64, method: Method, witness: &str, route: Route, input: Vec<Complex64>) -> Self {
        let digest = digest(&input);
        Self {
            value,
            method,
            witness: witness.to_string(),
            iterations: 0,
            converged: true,
            route,
            input,
            digest,
            diagnostics: Vec::new(),
        }
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

pub fn digest(values: &[Complex64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for z in values {
        for b in z.re.to_bits().to_le_bytes().into_iter().chain(z.im.to_bits().to_le_bytes()) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// The operator as a map between weighted coordinate spaces.
struct Op<'a> {
    kind: OperatorKind,
    variety: &'a Variety,
    multiplier: Option<GridFunction<Dual>>,
}

impl<'a> Op<'a> {
    fn new(kind: OperatorKind, variety: &'a Variety) -> Self {
        let multiplier = (kind == OperatorKind::Averaging).then(|| fourier::sigma_inv_bruteforce(variety));
        Self { kind, variety, multiplier }
    }

    fn surface_weight(&self) -> f64 {
        1.0 / self.variety.cardinality() as f64
    }

    fn grid_weight(&self) -> f64 {
        1.0 / self.variety.grid().len() as f64
    }

    fn in_weight(&self) -> f64 {
        match self.kind {
            OperatorKind::Extension => self.surface_weight(),
            OperatorKind::Restriction => 1.0,
            OperatorKind::Averaging => self.grid_weight(),
        }
    }

    fn out_weight(&self) -> f64 {
        match self.kind {
            OperatorKind::Extension => 1.0,
            OperatorKind::Restriction => self.surface_weight(),
            OperatorKind::Averaging => self.grid_weight(),
        }
    }

    fn dual_grid(&self, values: &[Complex64]) -> GridFunction<Dual> {
        GridFunction::new(self.variety.field(), self.variety.dim(), values.to_vec()).expect("grid length")
    }

    fn extend(&self, values: &[Complex64]) -> Vec<Complex64> {
        let f = SurfaceFunction::new(self.variety, values.to_vec()).expect("surface length");
        operators::extend(&f).into_values()
    }

    fn restrict(&self, values: &[Complex64]) -> Vec<Complex64> {
        operators::restrict(&self.dual_grid(values), self.variety).into_values()
    }

    fn average(&self, values: &[Complex64]) -> Vec<Complex64> {
        let f = GridFunction::<Primal>::new(self.variety.field(), self.variety.dim(), values.to_vec()).expect("grid length");
        operators::average_spectral(&f, self.multiplier.as_ref().expect("multiplier"))
            .expect("same grid")
            .into_values()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self.kind {
            OperatorKind::Extension => self.extend(x),
            OperatorKind::Restriction => self.restrict(x),
            OperatorKind::Averaging => self.average(x),
        }
    }

    /// Adjoint for the weighted inner products of the two sides.
    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        match self.kind {
            OperatorKind::Extension => self.restrict(y),
            OperatorKind::Restriction => self.extend(y),
            OperatorKind::Averaging => self.average(y),
        }
    }

    fn ratio(&self, x: &[Complex64], p: Exponent, r: Exponent) -> (f64, Vec<Complex64>) {
        let tx = self.apply(x);
        let num = weighted_norm(tx.iter().map(|z| z.norm()), self.out_weight(), r);
        let den = weighted_norm(x.iter().map(|z| z.norm()), self.in_weight(), p);
        (if den > 0.0 { num / den } else { 0.0 }, tx)
    }
}

/// `||T w||_r / ||w||_p` with the measures fixed by the operator kind.
pub fn norm_lower_witness(spec: &OperatorSpec<'_>, w: &[Complex64]) -> Result<NormEstimate, NormError> {
    norm_lower_witness_named(spec, w, "explicit")
}

fn norm_lower_witness_named(spec: &OperatorSpec<'_>, w: &[Complex64], name: &str) -> Result<NormEstimate, NormError> {
    let expected = spec.input_len();
    if w.len() != expected {
        return Err(NormError::WrongLength { expected, got: w.len() });
    }
    if w.iter().all(|z| z.norm() == 0.0) {
        return Err(NormError::ZeroWitness);
    }
    let op = Op::new(spec.kind, spec.variety);
    let (value, _) = op.ratio(w, spec.p, spec.r);
    Ok(NormEstimate::new(value, Method::Witness, name, Route::Direct, w.to_vec()))
}

/// Lower bound for the extension norm through its adjoint:
/// `||g^|_V||_{L^{p'}(V, d sigma)} / ||g||_{L^{r'}(dm)}`.
fn dual_route_ratio(spec: &OperatorSpec<'_>, surface: &Variety, g: &GridFunction<Dual>) -> f64 {
    let gh = operators::restrict(g, surface);
    let num = gh.norm(spec.p.conjugate());
    let den = g.norm(spec.r.conjugate());
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Re-derives an estimate's value from its stored input.
pub fn recheck(spec: &OperatorSpec<'_>, est: &NormEstimate) -> Result<f64, NormError> {
    match est.route {
        Route::Direct => {
            if est.method == Method::Power22 && est.witness == "mean-zero" {
                return Ok(Op::new(spec.kind, spec.variety).ratio(&est.input, spec.p, spec.r).0);
            }
            Ok(norm_lower_witness(spec, &est.input)?.value)
        }
        Route::Dual { transformed } => {
            let v = spec.variety;
            let g = GridFunction::<Dual>::new(v.field(), v.dim(), est.input.clone())
                .map_err(|_| NormError::WrongLength { expected: v.grid().len(), got: est.input.len() })?;
            if transformed {
                let w = variety::witness_omega(v.form())?;
                Ok(dual_route_ratio(spec, &w.transformed, &g))
            } else {
                Ok(dual_route_ratio(spec, v, &g))
            }
        }
    }
}

/// Largest singular value for `p = r = 2`, by power iteration on `T* T`.
pub fn exact_norm_2_2(spec: &OperatorSpec<'_>) -> Result<NormEstimate, NormError> {
    exact_norm_2_2_impl(spec, false)
}

/// [`exact_norm_2_2`] restricted to inputs with mean zero (averaging only).
pub fn exact_norm_2_2_mean_zero(spec: &OperatorSpec<'_>) -> Result<NormEstimate, NormError> {
    exact_norm_2_2_impl(spec, true)
}

fn exact_norm_2_2_impl(spec: &OperatorSpec<'_>, mean_zero: bool) -> Result<NormEstimate, NormError> {
    if spec.p != Exponent::Finite(2.0) || spec.r != Exponent::Finite(2.0) {
        return Err(NormError::NotL2);
    }
    const TOL: f64 = 1e-10;
    const MAX_ITER: usize = 10_000;
    let op = Op::new(spec.kind, spec.variety);
    let n = spec.input_len();
    let mut rng = seed::rng(seed::derive(0, "power-2-2", n as u64));
    let mut x: Vec<Complex64> = (0..n).map(|_| Complex64::new(1.0 + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
    let project = |x: &mut Vec<Complex64>| {
        if mean_zero {
            let mean = x.iter().sum::<Complex64>() / n as f64;
            for z in x.iter_mut() {
                *z -= mean;
            }
        }
    };
    let l2 = |x: &[Complex64], w: f64| weighted_norm(x.iter().map(|z| z.norm()), w, Exponent::Finite(2.0));
    project(&mut x);
    let mut rayleigh = 0.0f64;
    let mut iterations = 0;
    let mut converged = false;
    let mut monotone = true;
    for it in 1..=MAX_ITER {
        iterations = it;
        let nx = l2(&x, op.in_weight());
        if nx == 0.0 {
            return Err(NormError::ZeroWitness);
        }
        for z in x.iter_mut() {
            *z /= nx;
        }
        let tx = op.apply(&x);
        let next = crate::math::powf(l2(&tx, op.out_weight()), 2.0);
        if next < rayleigh * (1.0 - 1e-12) {
            monotone = false;
        }
        let done = (next - rayleigh).abs() <= TOL * next.max(f64::MIN_POSITIVE);
        rayleigh = next;
        if done {
            converged = true;
            break;
        }
        x = op.adjoint(&tx);
        project(&mut x);
    }
    let value = libm::sqrt(rayleigh);
    let name = if mean_zero { "mean-zero" } else { "power" };
    let mut est = NormEstimate::new(value, Method::Power22, name, Route::Direct, x);
    est.iterations = iterations;
    est.converged = converged;
    est.diagnostics.push(("rayleigh_monotone".to_string(), if monotone { 1.0 } else { 0.0 }));
    Ok(est)
}

/// `Phi_s(z) = |z|^(s-1) z/|z|`.
fn phi(z: Complex64, s: f64) -> Complex64 {
    let a = z.norm();
    if a == 0.0 {
        z
    } else {
        z * (libm::pow(a, s - 1.0) / a)
    }
}

/// Nonlinear power ascent `f <- Phi_{p'}(T* Phi_r(T f))`, normalized in
/// `L^p`, from a constant start and `restarts - 1` seeded random starts.
/// Endpoint exponents fall back to [`endpoint_search`].
pub fn norm_estimate_ascent(
    spec: &OperatorSpec<'_>,
    restarts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<NormEstimate, NormError> {
    if !spec.p.is_interior() || !spec.r.is_interior() {
        return endpoint_search(spec, restarts, seed);
    }
    let (p, r) = (spec.p.value(), spec.r.value());
    let pc = spec.p.conjugate().value();
    let op = Op::new(spec.kind, spec.variety);
    let n = spec.input_len();
    let nonnegative = spec.kind == OperatorKind::Averaging;
    let check_monotone = nonnegative && p <= r;

    let run = |k: usize| -> Result<NormEstimate, NormError> {
        let mut x: Vec<Complex64> = if k == 0 {
            vec![Complex64::new(1.0, 0.0); n]
        } else {
            let mut rng = seed::rng(seed::derive(seed, "ascent", k as u64));
            (0..n)
                .map(|_| {
                    let mag: f64 = rng.gen_range(0.0..1.0);
                    if nonnegative {
                        Complex64::new(mag, 0.0)
                    } else {
                        Complex64::from_polar(mag, rng.gen_range(0.0..TAU))
                    }
                })
                .collect()
        };
        let (mut value, mut tx) = op.ratio(&x, spec.p, spec.r);
        let mut best = (value, x.clone());
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            let y: Vec<Complex64> = tx.iter().map(|&z| phi(z, r)).collect();
            let mut next: Vec<Complex64> = op.adjoint(&y).into_iter().map(|z| phi(z, pc)).collect();
            let norm = weighted_norm(next.iter().map(|z| z.norm()), op.in_weight(), spec.p);
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            for z in next.iter_mut() {
                *z /= norm;
            }
            let (v, t) = op.ratio(&next, spec.p, spec.r);
            if check_monotone && v < value - 1e-9 * value.max(1.0) {
                return Err(NormError::MonotonicityViolation { restart: k, iteration: it, drop: value - v });
            }
            let step = (v - value).abs();
            x = next;
            tx = t;
            value = v;
            if value > best.0 {
                best = (value, x.clone());
            }
            if step <= tol * value {
                converged = true;
                break;
            }
        }
        let mut est = NormEstimate::new(best.0, Method::Ascent, if k == 0 { "ascent-constant" } else { "ascent-random" }, Route::Direct, best.1);
        est.iterations = iterations;
        est.converged = converged;
        Ok(est)
    };

    let results = par::map_indexed(restarts.max(1), run);
    let mut best: Option<NormEstimate> = None;
    let mut all_converged = true;
    let mut total_iterations = 0;
    for res in results {
        let est = res?;
        all_converged &= est.converged;
        total_iterations += est.iterations;
        if best.as_ref().is_none_or(|b| est.value > b.value) {
            best = Some(est);
        }
    }
    let mut best = best.expect("at least one restart");
    best.diagnostics.push(("restarts".to_string(), restarts.max(1) as f64));
    best.diagnostics.push(("total_iterations".to_string(), total_iterations as f64));
    best.diagnostics.push(("all_converged".to_string(), if all_converged { 1.0 } else { 0.0 }));
    Ok(best)
}

/// Endpoint exponents: witness battery, point masses, and sampled
/// unimodular patterns. The pattern search is heuristic.
pub fn endpoint_search(spec: &OperatorSpec<'_>, samples: usize, seed: u64) -> Result<NormEstimate, NormError> {
    const POINT_CAP: usize = 4096;
    let n = spec.input_len();
    let mut best: Option<NormEstimate> = None;
    let mut consider = |e: NormEstimate| {
        if best.as_ref().is_none_or(|b| e.value > b.value) {
            best = Some(e);
        }
    };
    for e in witness_battery(spec) {
        consider(e);
    }
    let op = Op::new(spec.kind, spec.variety);
    let step = (n / POINT_CAP).max(1);
    for i in (0..n).step_by(step) {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        w[i] = Complex64::new(1.0, 0.0);
        let (v, _) = op.ratio(&w, spec.p, spec.r);
        consider(NormEstimate::new(v, Method::Witness, "point-mass", Route::Direct, w));
    }
    let nonnegative = spec.kind == OperatorKind::Averaging;
    for k in 0..samples {
        let mut rng = seed::rng(seed::derive(seed, "pattern", k as u64));
        let w: Vec<Complex64> = (0..n)
            .map(|_| {
                if nonnegative {
                    Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { 0.0 }, 0.0)
                } else {
                    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
                }
            })
            .collect();
        if w.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let (v, _) = op.ratio(&w, spec.p, spec.r);
        consider(NormEstimate::new(v, Method::Witness, "pattern", Route::Direct, w));
    }
    let mut est = best.ok_or(NormError::ZeroWitness)?;
    est.diagnostics.push(("heuristic".to_string(), 1.0));
    Ok(est)
}

/// Subspaces of `S` used as witnesses: every applicable explicit
/// construction, plus a maximal isotropic subspace on small grids.
pub fn witness_subspaces(v: &Variety) -> Vec<(String, AffineSubspace)> {
    const SEARCH_LIMIT: usize = 200_000;
    let mut out: Vec<(String, AffineSubspace)> = Vec::new();
    if v.form().diag().is_some() {
        for kind in SubspaceKind::ALL {
            if let Ok(h) = variety::paper_subspace(v.form(), kind) {
                if !out.iter().any(|(_, o)| o == &h) {
                    out.push((format!("H-{}", kind.name()), h));
                }
            }
        }
    }
    if v.grid().len() <= SEARCH_LIMIT {
        if let Ok(h) = variety::max_isotropic_subspace(v.form()) {
            if h.dim() > 0 && !out.iter().any(|(_, o)| o.dim() >= h.dim()) {
                out.push(("H-isotropic".to_string(), h));
            }
        }
    }
    out
}

fn indicator_on_grid(len: usize, points: impl IntoIterator<Item = usize>) -> Vec<Complex64> {
    let mut w = vec![Complex64::new(0.0, 0.0); len];
    for i in points {
        w[i] = Complex64::new(1.0, 0.0);
    }
    w
}

fn magnitude_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, 0.0), |(lo, hi), a| (lo.min(a), hi.max(a)))
}

/// `|M^(x)|` over `S \ {0}`: `(min, max)`.
pub fn m_hat_range(v: &Variety, m: &WitnessSet) -> (f64, f64) {
    let gh = fourier::transform_dual(&m.indicator(v.field()));
    magnitude_range(v.points().iter().filter(|&&x| x != 0).map(|&x| gh.values()[x as usize].norm()))
}

/// `|Omega^(x)|` over the transformed surface where coordinate `d-2`
/// (0-based) is nonzero: `(min, max)`.
pub fn omega_hat_range(w: &variety::OmegaWitness) -> (f64, f64) {
    let s = &w.transformed;
    let d = s.dim();
    let grid = s.grid();
    let gh = fourier::transform_dual(&w.omega.indicator(s.field()));
    magnitude_range(
        s.points()
            .iter()
            .filter(|&&x| grid.coords(x as usize)[d - 2] != 0)
            .map(|&x| gh.values()[x as usize].norm()),
    )
}

/// One estimate per applicable witness.
pub fn witness_battery(spec: &OperatorSpec<'_>) -> Vec<NormEstimate> {
    let v = spec.variety;
    let field = v.field();
    let d = v.dim();
    let q = f64::from(field.order());
    let n = v.grid().len();
    let size = v.cardinality();
    let op = Op::new(spec.kind, v);
    let mut out = Vec::new();
    let direct = |w: Vec<Complex64>, name: &str, out: &mut Vec<NormEstimate>| {
        if w.iter().any(|z| z.norm() > 0.0) {
            let (value, _) = op.ratio(&w, spec.p, spec.r);
            out.push(NormEstimate::new(value, Method::Witness, name, Route::Direct, w));
        }
    };
    let subspaces = witness_subspaces(v);

    match spec.kind {
        OperatorKind::Averaging => {
            direct(indicator_on_grid(n, [0]), "delta0", &mut out);
            direct(vec![Complex64::new(1.0, 0.0); n], "one", &mut out);
            for (name, h) in &subspaces {
                let pts = h.points(field);
                let hs = pts.len();
                let w = indicator_on_grid(n, pts.iter().copied());
                direct(w.clone(), name, &mut out);
                let avg = op.apply(&w);
                let min_on_h = pts.iter().map(|&x| avg[x].re).fold(f64::INFINITY, f64::min);
                let last = out.last_mut().expect("pushed");
                last.diagnostics.push(("h_dim".to_string(), h.dim() as f64));
                last.diagnostics.push(("h_min_on_h".to_string(), min_on_h));
                last.diagnostics.push(("h_bound".to_string(), hs as f64 / size as f64));
            }
        }
        OperatorKind::Extension | OperatorKind::Restriction => {
            let surface_len = size;
            let index_on_s = |x: usize| v.points().binary_search(&(x as u32)).ok();
            if spec.kind == OperatorKind::Extension {
                direct(vec![Complex64::new(1.0, 0.0); surface_len], "one", &mut out);
                let x0 = v.points().iter().position(|&x| x != 0).unwrap_or(0);
                direct(indicator_on_grid(surface_len, [x0]), "point", &mut out);
                for (name, h) in &subspaces {
                    let w = indicator_on_grid(surface_len, h.points(field).into_iter().filter_map(index_on_s));
                    direct(w, name, &mut out);
                }
            } else {
                direct(indicator_on_grid(n, [0]), "delta0", &mut out);
                direct(vec![Complex64::new(1.0, 0.0); n], "one", &mut out);
            }

            let dual_witness = |set: &WitnessSet, surface: &Variety, transformed: bool, out: &mut Vec<NormEstimate>| {
                let g = set.indicator(field);
                let name = match set.label {
                    variety::WitnessLabel::M => "M",
                    variety::WitnessLabel::Omega => "Omega",
                    variety::WitnessLabel::D => "D",
                };
                let est = match spec.kind {
                    OperatorKind::Extension => {
                        let value = dual_route_ratio(spec, surface, &g);
                        NormEstimate::new(value, Method::Witness, name, Route::Dual { transformed }, g.into_values())
                    }
                    _ if transformed => return,
                    _ => {
                        let w = g.into_values();
                        let (value, _) = op.ratio(&w, spec.p, spec.r);
                        NormEstimate::new(value, Method::Witness, name, Route::Direct, w)
                    }
                };
                out.push(est);
            };

            if let Ok(m) = variety::witness_m(v.form()) {
                dual_witness(&m, v, false, &mut out);
                let (lo, hi) = m_hat_range(v, &m);
                let last = out.last_mut().expect("pushed");
                last.diagnostics.push(("m_size".to_string(), m.len() as f64));
                last.diagnostics.push(("m_hat_min".to_string(), lo));
                last.diagnostics.push(("m_hat_max".to_string(), hi));
                if d % 2 == 0 {
                    last.diagnostics.push(("m_hat_expected".to_string(), libm::pow(q, (d as f64 - 2.0) / 2.0) * (q - 1.0)));
                }
            }
            if d % 2 == 1 {
                if let Ok(w) = variety::witness_omega(v.form()) {
                    let before = out.len();
                    dual_witness(&w.omega, &w.transformed, true, &mut out);
                    if out.len() > before {
                        let (lo, hi) = omega_hat_range(&w);
                        let last = out.last_mut().expect("pushed");
                        last.diagnostics.push(("omega_size".to_string(), w.omega.len() as f64));
                        last.diagnostics.push(("omega_hat_min".to_string(), lo));
                        last.diagnostics.push(("omega_hat_max".to_string(), hi));
                        last.diagnostics
                            .push(("omega_hat_expected".to_string(), libm::pow(q, (d as f64 - 2.0) / 2.0) * (q - 1.0) / 2.0));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::variety::{enumerate_variety, QuadraticForm};

    fn variety(q: u64, coeffs: &[i64]) -> Variety {
        let f = FiniteField::of_order(q).unwrap();
        enumerate_variety(&QuadraticForm::from_ints(&f, coeffs).unwrap()).unwrap()
    }

    #[test]
    fn witness_examples() {
        let v = variety(3, &[1, 1, 1]);
        let one = Complex64::new(1.0, 0.0);
        let spec = OperatorSpec::new(OperatorKind::Averaging, &v, 1.5, 3.0).unwrap();
        let mut delta = vec![Complex64::new(0.0, 0.0); 27];
        delta[0] = one;
        let e = norm_lower_witness(&spec, &delta).unwrap();
        let expect = libm::pow(3.0, -1.0) * libm::pow(9.0, -2.0 / 3.0) / libm::pow(3.0, -2.0);
        assert!((e.value - expect).abs() < 1e-12);
        let e = norm_lower_witness(&spec, &[one; 27]).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert_eq!(norm_lower_witness(&spec, &[Complex64::new(0.0, 0.0); 27]), Err(NormError::ZeroWitness));

        let spec = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 4.0).unwrap();
        let e = norm_lower_witness(&spec, &[one; 9]).unwrap();
        assert!((e.value - libm::pow(11.0 / 9.0, 0.25)).abs() < 1e-12);
    }

    #[test]
    fn exact_l2_values() {
        let v = variety(5, &[1, 1, 1]);
        let avg = OperatorSpec::new(OperatorKind::Averaging, &v, 2.0, 2.0).unwrap();
        let e = exact_norm_2_2(&avg).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
        let e = exact_norm_2_2_mean_zero(&avg).unwrap();
        assert!((e.value - 0.2).abs() < 1e-10, "{}", e.value);
        let ext = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 2.0).unwrap();
        let e = exact_norm_2_2(&ext).unwrap();
        assert!((e.value * e.value - 125.0 / 25.0).abs() < 1e-9);
        let bad = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 4.0).unwrap();
        assert_eq!(exact_norm_2_2(&bad).unwrap_err(), NormError::NotL2);
    }

    #[test]
    fn ascent_examples() {
        let v = variety(3, &[1, 1, 1]);
        let avg = OperatorSpec::new(OperatorKind::Averaging, &v, 2.0, 2.0).unwrap();
        let e = norm_estimate_ascent(&avg, 4, 500, 1e-12, 1).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8);
        let ext = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 4.0).unwrap();
        let e = norm_estimate_ascent(&ext, 4, 200, 1e-8, 1).unwrap();
        assert!(e.value >= libm::pow(11.0 / 9.0, 0.25) - 1e-12);
        assert!((recheck(&ext, &e).unwrap() - e.value).abs() < 1e-10);
        for (p, r) in [(2.0, 2.0), (3.0, 1.5), (4.0, 4.0), (1.5, 1.2)] {
            let spec = OperatorSpec::new(OperatorKind::Averaging, &v, p, r).unwrap();
            let e = norm_estimate_ascent(&spec, 4, 200, 1e-10, 3).unwrap();
            assert!(e.value <= 1.0 + 1e-8, "p={p} r={r} value={}", e.value);
        }
        let again = norm_estimate_ascent(&ext, 4, 200, 1e-8, 1).unwrap();
        assert_eq!(again.value.to_bits(), e.value.to_bits());
        assert_eq!(again.digest, e.digest);
    }

    #[test]
    fn endpoints_use_witnesses() {
        let v = variety(3, &[1, -1, 1]);
        let spec = OperatorSpec::new(OperatorKind::Extension, &v, 1.0, f64::INFINITY).unwrap();
        let e = norm_estimate_ascent(&spec, 4, 10, 1e-8, 0).unwrap();
        assert_eq!(e.method, Method::Witness);
        // ||(f dsigma)^v||_inf <= ||f||_{L^1(dsigma)}, attained by f = 1.
        assert!((e.value - 1.0).abs() < 1e-12);
        assert_eq!(e.diagnostic("heuristic"), Some(1.0));
    }

    #[test]
    fn battery_diagnostics() {
        let v = variety(3, &[1, -1, 1]);
        let spec = OperatorSpec::new(OperatorKind::Averaging, &v, 1.5, 3.0).unwrap();
        let battery = witness_battery(&spec);
        let line = battery.iter().find(|e| e.witness == "H-alternating-odd").unwrap();
        assert!((line.diagnostic("h_bound").unwrap() - 3.0 / 9.0).abs() < 1e-15);
        assert!(line.diagnostic("h_min_on_h").unwrap() >= 3.0 / 9.0 - 1e-12);

        let v = variety(5, &[1, -1, 1, -1]);
        let spec = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 2.5).unwrap();
        let battery = witness_battery(&spec);
        let m = battery.iter().find(|e| e.witness == "M").unwrap();
        let expect = m.diagnostic("m_hat_expected").unwrap();
        assert!((m.diagnostic("m_hat_min").unwrap() - expect).abs() < 1e-9 * expect);
        assert!((m.diagnostic("m_hat_max").unwrap() - expect).abs() < 1e-9 * expect);
        for e in &battery {
            assert!((recheck(&spec, e).unwrap() - e.value).abs() < 1e-10 * e.value.max(1.0), "{}", e.witness);
        }

        let v = variety(7, &[1, 1, -1]);
        let spec = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 2.5).unwrap();
        let battery = witness_battery(&spec);
        let o = battery.iter().find(|e| e.witness == "Omega").unwrap();
        let expect = o.diagnostic("omega_hat_expected").unwrap();
        assert!((o.diagnostic("omega_hat_min").unwrap() - expect).abs() < 1e-9 * expect);
        assert!((o.diagnostic("omega_hat_max").unwrap() - expect).abs() < 1e-9 * expect);
        assert!((recheck(&spec, o).unwrap() - o.value).abs() < 1e-10 * o.value);
    }
}
