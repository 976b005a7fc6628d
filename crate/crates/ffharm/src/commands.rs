#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! One function per subcommand, each producing a [`Report`].

use std::fs;

use serde_json::{json, Value};

use ffharm_core::experiments::{self, Scheme, SuiteParams, SweepMethod};
use ffharm_core::fourier::{self, AnyGridFunction};
use ffharm_core::norms::{self, NormEstimate, OperatorKind, OperatorSpec, Route};
use ffharm_core::variety::{self, QuadraticForm, SubspaceKind};
use ffharm_core::{charsums, FiniteField, Variety};

use crate::config::{Command, Options, RunConfig};
use crate::dump;
use crate::error::CliError;
use crate::records::{self, SubspaceRecord, VarietyRecord};
use crate::report::{num, CheckRow, Report};
use crate::svg;

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let o = &cfg.options;
    let report = Report::new(cfg.command.name(), cfg.params(), None);
    match &cfg.command {
        Command::Field => field(o, report),
        Command::Gauss => gauss(o, report),
        Command::Variety => variety_cmd(o, report),
        Command::SigmaHat => sigma_hat(o, report),
        Command::Subspaces => subspaces(o, report),
        Command::Norm => norm(o, report),
        Command::Sweep => sweep(o, report),
        Command::Region => region(o, report),
        Command::Suite { name } => suite(name, o, report),
    }
}

fn single<T: Copy>(values: &[T], flag: &str) -> Result<T> {
    match values {
        [v] => Ok(*v),
        [] => Err(invalid(format!("missing --{flag}"))),
        _ => Err(invalid(format!("--{flag} takes a single value here"))),
    }
}

fn field_of(o: &Options) -> Result<FiniteField> {
    FiniteField::of_order(u64::from(single(&o.q, "q")?)).map_err(CliError::invalid)
}

fn require_seed(o: &Options) -> Result<u64> {
    o.seed.ok_or_else(|| invalid("--seed is required for randomized commands"))
}

fn scheme_of(o: &Options) -> Result<Option<Scheme>> {
    Ok(match o.scheme.as_deref() {
        None => None,
        Some("all-ones") | Some("ones") => Some(Scheme::AllOnes),
        Some("alternating") => Some(Scheme::Alternating),
        Some("cone") => Some(Scheme::Cone),
        Some(other) => return Err(invalid(format!("BadScheme: unknown scheme {other:?}"))),
    })
}

fn form_of(o: &Options, f: &FiniteField, d: usize) -> Result<QuadraticForm> {
    if let Some(text) = &o.coeffs {
        let coeffs = records::parse_coefficients(f, text).map_err(CliError::Invalid)?;
        if coeffs.len() != d {
            return Err(invalid(format!("--coeffs has {} entries but d = {d}", coeffs.len())));
        }
        return QuadraticForm::diagonal(f, coeffs).map_err(CliError::invalid);
    }
    match scheme_of(o)? {
        Some(s) => s.form(f, d).map_err(CliError::invalid),
        None => Err(invalid("give --coeffs or --scheme")),
    }
}

fn variety_of(o: &Options) -> Result<(FiniteField, Variety)> {
    let f = field_of(o)?;
    let d = single(&o.d, "d")?;
    let form = form_of(o, &f, d)?;
    let v = variety::enumerate_variety(&form).map_err(CliError::invalid)?;
    Ok((f, v))
}

fn exponent(text: Option<&str>, flag: &str) -> Result<f64> {
    let s = text.ok_or_else(|| invalid(format!("missing --{flag}")))?;
    let v = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|_| invalid(format!("BadExponent: --{flag} {s:?}")))?,
    };
    if !(v >= 1.0) {
        return Err(invalid(format!("BadExponent: --{flag} must be >= 1, got {s}")));
    }
    Ok(v)
}

fn kind_of(o: &Options, default: OperatorKind) -> Result<OperatorKind> {
    Ok(match o.kind.as_deref() {
        None => default,
        Some("extension") => OperatorKind::Extension,
        Some("restriction") => OperatorKind::Restriction,
        Some("averaging") => OperatorKind::Averaging,
        Some(other) => return Err(invalid(format!("unknown --kind {other:?}"))),
    })
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Direct => "direct",
        Route::Dual { transformed: false } => "dual",
        Route::Dual { transformed: true } => "dual-transformed",
    }
}

fn field(o: &Options, report: Report) -> Result<Report> {
    let f = field_of(o)?;
    let mut rep = report.columns(&["index", "digits", "trace", "eta", "chi_re", "chi_im"]);
    for a in 0..f.order() {
        let chi = f.chi(a);
        rep.row(vec![
            json!(a),
            json!(records::element_string(&f, a)),
            json!(f.trace(a)),
            json!(f.eta(a)),
            num(chi.re),
            num(chi.im),
        ]);
    }
    rep.constant("p", f64::from(f.characteristic()));
    rep.constant("n", f64::from(f.degree()));
    rep.constant("q", f64::from(f.order()));
    rep.info = Some(json!({ "modulus": f.modulus() }));
    Ok(rep)
}

fn gauss(o: &Options, report: Report) -> Result<Report> {
    let f = field_of(o)?;
    let mut rep = report.columns(&["t", "re", "im", "abs"]);
    for t in 0..f.order() {
        let g = charsums::gauss_sum(&f, t);
        rep.row(vec![json!(t), num(g.re), num(g.im), num(g.norm())]);
    }
    let (mag, g0, sq) = experiments::gauss_sum_errors(&f);
    rep.constant("sqrt_q", f64::from(f.order()).sqrt());
    rep.constant("max_rel_err_abs", mag);
    rep.constant("abs_g0", g0);
    rep.constant("g1_squared_rel_err", sq);
    Ok(rep)
}

fn variety_cmd(o: &Options, report: Report) -> Result<Report> {
    let (_, v) = variety_of(o)?;
    let record = VarietyRecord::new(&v, o.points);
    let mut rep = report.columns(&["index", "point"]);
    if o.points {
        let grid = v.grid();
        for &i in v.points() {
            let c: Vec<String> = grid.coords(i as usize).iter().map(u32::to_string).collect();
            rep.row(vec![json!(i), json!(c.join(" "))]);
        }
    }
    rep.constant("point_count", v.cardinality() as f64);
    rep.constant("closed_form_count", variety::variety_cardinality(v.form()) as f64);
    rep.info = Some(serde_json::to_value(record).expect("record"));
    Ok(rep)
}

fn sigma_hat(o: &Options, report: Report) -> Result<Report> {
    let (_, v) = variety_of(o)?;
    let brute = fourier::sigma_inv_bruteforce(&v);
    let closed = fourier::sigma_inv_closed_form(v.form()).map_err(CliError::invalid)?;
    let chosen = match o.method.as_deref().unwrap_or("closed") {
        "closed" => &closed,
        "brute" => &brute,
        other => return Err(invalid(format!("unknown --method {other:?} (closed or brute)"))),
    };
    let mut rep = report.columns(&["index", "re", "im"]);
    for (i, z) in chosen.values().iter().enumerate() {
        rep.row(vec![json!(i), num(z.re), num(z.im)]);
    }
    rep.constant("max_abs_diff_closed_vs_brute", brute.max_abs_diff(&closed).expect("same grid"));
    rep.constant("max_abs_off_origin", chosen.values()[1..].iter().map(|z| z.norm()).fold(0.0, f64::max));
    rep.constant("cardinality", v.cardinality() as f64);
    if let Some(path) = &o.dump {
        let mut file = fs::File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        dump::write_dump(&mut file, &AnyGridFunction::Dual(chosen.clone()))
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(rep)
}

fn subspaces(o: &Options, report: Report) -> Result<Report> {
    let (f, v) = variety_of(o)?;
    let form = v.form();
    let mut rep = report.columns(&["kind", "dim", "verified", "basis"]);
    let mut records = Vec::new();
    let mut push = |rep: &mut Report, name: &str, h: &variety::AffineSubspace| {
        let ok = variety::verify_subspace(h, &v);
        let basis: Vec<String> = h.basis.iter().map(|b| b.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")).collect();
        rep.row(vec![json!(name), json!(h.dim()), json!(ok), json!(basis.join("; "))]);
        records.push(SubspaceRecord::new(name, h, ok));
    };
    for kind in SubspaceKind::ALL {
        if let Ok(h) = variety::paper_subspace(form, kind) {
            push(&mut rep, kind.name(), &h);
        }
    }
    let h = variety::max_isotropic_subspace(form).map_err(CliError::invalid)?;
    push(&mut rep, "max-isotropic", &h);
    rep.constant("max_isotropic_dimension", h.dim() as f64);
    rep.constant("minus_one_is_square", f64::from(u8::from(f.eta(f.minus_one()) == 1)));
    rep.info = Some(json!({ "subspaces": records }));
    Ok(rep)
}

fn estimate_row(rep: &mut Report, e: &NormEstimate) {
    rep.row(vec![
        json!(e.witness),
        json!(e.method.name()),
        json!(route_name(e.route)),
        num(e.value),
        json!(e.iterations),
        json!(e.converged),
        json!(format!("{:016x}", e.digest)),
    ]);
}

fn norm(o: &Options, report: Report) -> Result<Report> {
    let (_, v) = variety_of(o)?;
    let kind = kind_of(o, OperatorKind::Extension)?;
    let (p, r) = (exponent(o.p.as_deref(), "p")?, exponent(o.r.as_deref(), "r")?);
    let spec = OperatorSpec::new(kind, &v, p, r).map_err(CliError::invalid)?;
    let mut rep = report.columns(&["witness", "method", "route", "value", "iterations", "converged", "digest"]);
    match o.method.as_deref().unwrap_or("ascent") {
        "ascent" => {
            let seed = require_seed(o)?;
            rep.seed = Some(seed);
            let est = norms::norm_estimate_ascent(&spec, o.restarts.unwrap_or(16), o.max_iter.unwrap_or(500), 1e-8, seed)
                .map_err(CliError::invalid)?;
            estimate_row(&mut rep, &est);
            rep.constant("value", est.value);
            for (k, x) in &est.diagnostics {
                rep.constant(k.clone(), *x);
            }
        }
        "exact22" | "power-2-2" => {
            let est = norms::exact_norm_2_2(&spec).map_err(CliError::invalid)?;
            estimate_row(&mut rep, &est);
            rep.constant("value", est.value);
        }
        "witness" => {
            let battery = norms::witness_battery(&spec);
            let best = battery.iter().map(|e| e.value).fold(0.0, f64::max);
            for e in &battery {
                estimate_row(&mut rep, e);
                for (k, x) in &e.diagnostics {
                    rep.constant(format!("{}.{k}", e.witness), *x);
                }
            }
            rep.constant("value", best);
        }
        other => return Err(invalid(format!("unknown --method {other:?} (ascent, exact22 or witness)"))),
    }
    rep.constant("cardinality", v.cardinality() as f64);
    Ok(rep)
}

fn sweep_method(o: &Options) -> Result<SweepMethod> {
    Ok(match o.method.as_deref().unwrap_or("ascent") {
        "ascent" => SweepMethod::Ascent { restarts: o.restarts.unwrap_or(16), max_iter: o.max_iter.unwrap_or(500), tol: 1e-8 },
        "exact22" | "power-2-2" => SweepMethod::Exact22,
        "best-witness" => SweepMethod::BestWitness,
        m if m.starts_with("witness:") => SweepMethod::Witness(m["witness:".len()..].to_string()),
        other => return Err(invalid(format!("unknown --method {other:?}"))),
    })
}

fn sweep(o: &Options, report: Report) -> Result<Report> {
    if o.q.is_empty() {
        return Err(invalid("missing --q"));
    }
    let d = single(&o.d, "d")?;
    let scheme = match (&o.coeffs, scheme_of(o)?) {
        (Some(text), _) => Scheme::Explicit(
            text.split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| invalid(format!("BadScheme: sweeps take integer coefficients, got {s:?}"))))
                .collect::<Result<_>>()?,
        ),
        (None, Some(s)) => s,
        (None, None) => Scheme::Alternating,
    };
    let kind = kind_of(o, OperatorKind::Extension)?;
    let (p, r) = (exponent(o.p.as_deref(), "p")?, exponent(o.r.as_deref(), "r")?);
    let method = sweep_method(o)?;
    let seed = match method {
        SweepMethod::Ascent { .. } => require_seed(o)?,
        _ => o.seed.unwrap_or(0),
    };
    let s = experiments::run_sweep(&o.q, d, &scheme, kind, p, r, &method, seed).map_err(CliError::invalid)?;
    let mut rep = report.columns(&["q", "cardinality", "value", "method", "witness", "converged"]);
    rep.seed = o.seed;
    for row in &s.rows {
        rep.row(vec![json!(row.q), json!(row.cardinality), num(row.value), json!(row.method), json!(row.witness), json!(row.converged)]);
    }
    let fit = experiments::fit_exponent(&s).ok();
    if let Some(fit) = &fit {
        rep.constant("slope", fit.slope);
        rep.constant("intercept", fit.intercept);
        rep.constant("r2", fit.r2);
        rep.constant("max_residual", fit.max_residual);
    } else {
        rep.observations.push("fewer than 3 positive rows; no exponent fit".into());
    }
    let witnesses: Vec<Value> = s
        .rows
        .iter()
        .map(|row| json!({ "q": row.q, "witnesses": row.witnesses.iter().map(|(n, v)| json!({ "name": n, "value": num(*v) })).collect::<Vec<_>>() }))
        .collect();
    rep.info = Some(json!({ "scheme": scheme.name(), "battery": witnesses }));
    if let Some(path) = &o.svg {
        fs::write(path, svg::sweep_svg(&s, fit.as_ref())).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(rep)
}

fn region(o: &Options, report: Report) -> Result<Report> {
    let d = single(&o.d, "d")?;
    let kind = kind_of(o, OperatorKind::Extension)?;
    let reg = match kind {
        OperatorKind::Averaging => experiments::region_necessary_averaging(d, o.k),
        _ => experiments::region_necessary_extension(d, o.k, o.square_ratio),
    }
    .map_err(CliError::invalid)?;
    let mut rep = report.columns(&["inv_p", "inv_r"]);
    for &(x, y) in &reg.vertices {
        rep.row(vec![num(x), num(y)]);
    }
    if o.p.is_some() || o.r.is_some() {
        let (p, r) = (exponent(o.p.as_deref(), "p")?, exponent(o.r.as_deref(), "r")?);
        rep.constant("contains", f64::from(u8::from(reg.contains_exponents(p, r))));
    }
    Ok(rep)
}

fn suite(name: &str, o: &Options, report: Report) -> Result<Report> {
    let seed = require_seed(o)?;
    let params = SuiteParams {
        q_list: (!o.q.is_empty()).then(|| o.q.clone()),
        d_list: (!o.d.is_empty()).then(|| o.d.clone()),
        trials: o.trials,
        restarts: o.restarts,
        max_iter: o.max_iter,
    };
    let s = experiments::run_suite(name, &params, seed).map_err(CliError::invalid)?;
    let mut rep = report;
    rep.seed = Some(seed);
    rep.checks = Some(
        s.checks
            .iter()
            .map(|c| CheckRow { name: c.name.clone(), passed: c.passed, measured: num(c.measured), threshold: num(c.threshold) })
            .collect(),
    );
    rep.passed = Some(s.passed);
    for (k, v) in &s.constants {
        rep.constant(k.clone(), *v);
    }
    rep.observations = s.observations.clone();
    Ok(rep)
}
