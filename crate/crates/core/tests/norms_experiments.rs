use ffharm_core::experiments::{self, Scheme, SuiteParams, SweepMethod};
use ffharm_core::norms::{self, NormError, OperatorKind, OperatorSpec};
use ffharm_core::variety::{self, QuadraticForm, Variety};
use ffharm_core::{Complex64, FiniteField};
use proptest::prelude::*;

fn variety(q: u64, a: &[i64]) -> Variety {
    let f = FiniteField::of_order(q).unwrap();
    variety::enumerate_variety(&QuadraticForm::from_ints(&f, a).unwrap()).unwrap()
}

#[test]
fn ascent_dominates_constant_start_and_is_reproducible() {
    let v = variety(5, &[1, -1, 1]);
    for kind in [OperatorKind::Extension, OperatorKind::Restriction, OperatorKind::Averaging] {
        let spec = OperatorSpec::new(kind, &v, 1.5, 3.0).unwrap();
        let a = norms::norm_estimate_ascent(&spec, 4, 200, 1e-10, 9).unwrap();
        let b = norms::norm_estimate_ascent(&spec, 4, 200, 1e-10, 9).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{}", kind.name());
        assert_eq!(a.digest, b.digest);
        let ones = vec![Complex64::new(1.0, 0.0); spec.input_len()];
        let w = norms::norm_lower_witness(&spec, &ones).unwrap();
        assert!(a.value >= w.value * (1.0 - 1e-12), "{}: {} < {}", kind.name(), a.value, w.value);
        assert!((norms::recheck(&spec, &a).unwrap() - a.value).abs() <= 1e-9 * a.value);
    }
}

#[test]
fn exact_l2_norms() {
    for (q, a) in [(3u64, vec![1i64, 1, 1]), (5, vec![1, -1]), (7, vec![1, 1, 1, 1])] {
        let v = variety(q, &a);
        let avg = OperatorSpec::new(OperatorKind::Averaging, &v, 2.0, 2.0).unwrap();
        assert!((norms::exact_norm_2_2(&avg).unwrap().value - 1.0).abs() < 1e-9);
        let ext = OperatorSpec::new(OperatorKind::Extension, &v, 2.0, 2.0).unwrap();
        let expect = (v.grid().len() as f64 / v.cardinality() as f64).sqrt();
        assert!((norms::exact_norm_2_2(&ext).unwrap().value - expect).abs() < 1e-8 * expect);
    }
}

#[test]
fn norm_errors() {
    let v = variety(3, &[1, 1, 1]);
    assert!(matches!(OperatorSpec::new(OperatorKind::Averaging, &v, 0.5, 2.0), Err(NormError::BadExponent(_))));
    let spec = OperatorSpec::new(OperatorKind::Averaging, &v, 2.0, 2.0).unwrap();
    let zeros = vec![Complex64::new(0.0, 0.0); spec.input_len()];
    assert_eq!(norms::norm_lower_witness(&spec, &zeros).unwrap_err(), NormError::ZeroWitness);
    assert!(matches!(norms::norm_lower_witness(&spec, &zeros[1..]), Err(NormError::WrongLength { .. })));
}

#[test]
fn sweeps_are_deterministic() {
    let m = SweepMethod::Ascent { restarts: 3, max_iter: 50, tol: 1e-8 };
    let a = experiments::run_sweep(&[3, 5, 7], 3, &Scheme::Alternating, OperatorKind::Extension, 2.0, 4.0, &m, 3).unwrap();
    let b = experiments::run_sweep(&[3, 5, 7], 3, &Scheme::Alternating, OperatorKind::Extension, 2.0, 4.0, &m, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn suites_are_deterministic() {
    let p = SuiteParams { q_list: Some(vec![3, 5]), d_list: Some(vec![2, 4]), trials: Some(4), ..Default::default() };
    let a = experiments::run_suite("mainlemma", &p, 11).unwrap();
    let b = experiments::run_suite("mainlemma", &p, 11).unwrap();
    assert_eq!(a, b);
    assert!(a.passed);
}

#[test]
fn every_named_suite_runs_small() {
    let p = SuiteParams {
        q_list: Some(vec![3, 5, 7]),
        d_list: Some(vec![3]),
        trials: Some(2),
        restarts: Some(2),
        max_iter: Some(40),
    };
    for name in experiments::SUITES {
        let rep = experiments::run_suite(name, &p, 1).unwrap();
        assert_eq!(rep.suite, name);
        assert!(!rep.checks.is_empty(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Witness sweeps only ever refute points outside the necessary region.
    #[test]
    fn regions_are_nested(d in 2usize..=7, x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let base = experiments::region_necessary_extension(d, None, false).unwrap();
        let tighter = experiments::region_necessary_extension(d, None, true).unwrap();
        if tighter.contains(x, y) {
            prop_assert!(base.contains(x, y));
        }
        if d >= 3 {
            let with_h = experiments::region_necessary_extension(d, Some(1), false).unwrap();
            if with_h.contains(x, y) {
                prop_assert!(base.contains(x, y));
            }
        }
        let t = experiments::region_necessary_averaging(d, None).unwrap();
        // Everything with r <= p (y >= x) is inside.
        if y >= x {
            prop_assert!(t.contains(x, y));
        }
    }
}

#[test]
fn witness_sweeps_respect_regions() {
    // Points well inside the odd-d region: no witness grows.
    let qs = [3u32, 5, 7, 11, 13];
    let inside = experiments::region_necessary_extension(3, Some(1), true).unwrap();
    for &(p, r) in &[(2.0, 6.0), (1.5, 8.0), (4.0, 5.0)] {
        assert!(inside.contains_exponents(p, r));
        let s = experiments::run_sweep(&qs, 3, &Scheme::Alternating, OperatorKind::Extension, p, r, &SweepMethod::BestWitness, 0).unwrap();
        let slope = experiments::fit_exponent(&s).unwrap().slope;
        assert!(slope <= experiments::BLOWUP_SLOPE, "({p},{r}): {slope}");
    }
    // Well outside: some witness grows.
    for &(p, r) in &[(2.0, 2.2), (1.2, 3.0)] {
        assert!(!inside.contains_exponents(p, r));
        let s = experiments::run_sweep(&qs, 3, &Scheme::Alternating, OperatorKind::Extension, p, r, &SweepMethod::BestWitness, 0).unwrap();
        let slope = experiments::fit_exponent(&s).unwrap().slope;
        assert!(slope >= experiments::BLOWUP_SLOPE, "({p},{r}): {slope}");
    }
}
