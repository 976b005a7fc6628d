use ffharm_core::fourier;
use ffharm_core::variety::{self, QuadraticForm, SubspaceKind, VarietyError};
use ffharm_core::FiniteField;
use proptest::prelude::*;

fn form_case() -> impl Strategy<Value = (u64, Vec<u32>)> {
    (prop::sample::select(vec![3u64, 5, 7, 9, 11, 25]), 2usize..=4)
        .prop_flat_map(|(q, d)| (Just(q), prop::collection::vec(1..q as u32, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cardinality_matches_closed_form((q, a) in form_case()) {
        let f = FiniteField::of_order(q).unwrap();
        let form = QuadraticForm::diagonal(&f, a).unwrap();
        let v = variety::enumerate_variety(&form).unwrap();
        prop_assert_eq!(v.cardinality() as u64, variety::variety_cardinality(&form));
        prop_assert!(v.contains(0));
    }

    #[test]
    fn closed_form_matches_bruteforce((q, a) in form_case()) {
        let f = FiniteField::of_order(q).unwrap();
        let form = QuadraticForm::diagonal(&f, a).unwrap();
        let v = variety::enumerate_variety(&form).unwrap();
        let brute = fourier::sigma_inv_bruteforce(&v);
        let closed = fourier::sigma_inv_closed_form(&form).unwrap();
        prop_assert!(brute.max_abs_diff(&closed).unwrap() < 1e-9);
        // (d sigma)^v(0) = 1.
        prop_assert!((brute.values()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paper_subspaces_lie_on_the_variety((q, a) in form_case()) {
        let f = FiniteField::of_order(q).unwrap();
        let form = QuadraticForm::diagonal(&f, a).unwrap();
        let v = variety::enumerate_variety(&form).unwrap();
        for kind in SubspaceKind::ALL {
            if let Ok(h) = variety::paper_subspace(&form, kind) {
                prop_assert!(variety::verify_subspace(&h, &v), "{}", kind.name());
            }
        }
        let h = variety::max_isotropic_subspace(&form).unwrap();
        prop_assert!(variety::verify_subspace(&h, &v));
        prop_assert!(2 * h.dim() <= form.dim());
    }

    #[test]
    fn diagonalization_preserves_the_variety(q in prop::sample::select(vec![3u64, 5, 7, 9]), d in 3usize..=4) {
        let f = FiniteField::of_order(q).unwrap();
        let cone = variety::cone_form(d, &f).unwrap();
        let diag = variety::diagonalize(&cone).unwrap();
        let dv = variety::enumerate_variety(&diag.form(&f).unwrap()).unwrap();
        let cv = variety::enumerate_variety(&cone).unwrap();
        prop_assert_eq!(dv.cardinality(), cv.cardinality());
        let grid = dv.grid();
        for &y in dv.points() {
            let x = ffharm_core::linalg::mat_vec(&f, &diag.change, &grid.coords(y as usize));
            prop_assert!(cv.contains_coords(&x));
        }
    }
}

#[test]
fn known_cardinalities() {
    let f3 = FiniteField::of_order(3).unwrap();
    let s = variety::enumerate_variety(&QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap()).unwrap();
    assert_eq!(s.cardinality(), 9);
    let s = variety::enumerate_variety(&QuadraticForm::from_ints(&f3, &[1, -1]).unwrap()).unwrap();
    assert_eq!(s.cardinality(), 5);
}

#[test]
fn odd_forms_have_isotropic_dimension_half() {
    for q in [3u64, 5, 7] {
        let f = FiniteField::of_order(q).unwrap();
        for a in [[1i64, 1, 1], [1, -1, 1], [1, 2, 3]] {
            let Ok(form) = QuadraticForm::from_ints(&f, &a) else { continue };
            assert_eq!(variety::max_isotropic_dimension(&form).unwrap(), 1, "q={q} a={a:?}");
        }
    }
}

#[test]
fn construction_errors() {
    let f = FiniteField::of_order(5).unwrap();
    assert_eq!(QuadraticForm::from_ints(&f, &[1, 5, 1]).unwrap_err(), VarietyError::ZeroCoefficient(1));
    let big = QuadraticForm::from_ints(&FiniteField::of_order(13).unwrap(), &[1; 7]).unwrap();
    assert!(matches!(variety::enumerate_variety(&big), Err(VarietyError::GridTooLarge { .. })));
    // x^2 + y^2 + z^2 over F_3 has no square ratio pair of the required kind
    // only when every -a_i/a_j is a non-square.
    let f3 = FiniteField::of_order(3).unwrap();
    let all_ones = QuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap();
    assert!(variety::square_ratio_pair(&f3, all_ones.diag().unwrap()).is_none());
}
