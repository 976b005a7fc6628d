use ffharm_core::charsums;
use ffharm_core::FiniteField;
use proptest::prelude::*;

const ORDERS: [u64; 7] = [3, 5, 7, 9, 25, 27, 49];

fn field_and_elems(k: usize) -> impl Strategy<Value = (FiniteField, Vec<u32>)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(move |q| {
        let f = FiniteField::of_order(q).unwrap();
        (Just(f), prop::collection::vec(0..q as u32, k))
    })
}

proptest! {
    #[test]
    fn ring_axioms((f, v) in field_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
    }

    #[test]
    fn inverses_and_order((f, v) in field_and_elems(1)) {
        let a = v[0];
        match f.inv(a) {
            None => prop_assert_eq!(a, 0),
            Some(i) => prop_assert_eq!(f.mul(a, i), 1),
        }
        prop_assert_eq!(f.pow(a, u64::from(f.order())), a);
    }

    #[test]
    fn frobenius_and_trace((f, v) in field_and_elems(2)) {
        let (a, b) = (v[0], v[1]);
        let p = u64::from(f.characteristic());
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.characteristic());
        prop_assert!(f.trace(a) < f.characteristic());
    }

    #[test]
    fn characters_are_homomorphisms((f, v) in field_and_elems(2)) {
        let (a, b) = (v[0], v[1]);
        prop_assert!((f.chi(f.add(a, b)) - f.chi(a) * f.chi(b)).norm() < 1e-12);
        prop_assert_eq!(f.eta(f.mul(a, b)), f.eta(a) * f.eta(b));
        if a != 0 {
            prop_assert_eq!(f.eta(f.square(a)), 1);
        }
    }

    #[test]
    fn complete_square((f, v) in field_and_elems(2)) {
        prop_assume!(v[0] != 0);
        let brute = charsums::complete_square_sum(&f, v[0], v[1]).unwrap();
        let closed = charsums::complete_square_closed_form(&f, v[0], v[1]).unwrap();
        prop_assert!((brute - closed).norm() < 1e-9);
    }
}

#[test]
fn gauss_sums_have_modulus_root_q() {
    for q in [3u64, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 49, 81, 125] {
        let f = FiniteField::of_order(q).unwrap();
        let qf = q as f64;
        for t in 1..f.order() {
            assert!((charsums::gauss_sum(&f, t).norm() - qf.sqrt()).abs() < 1e-9, "q={q} t={t}");
        }
        assert!(charsums::gauss_sum(&f, 0).norm() < 1e-9);
        let g = charsums::gauss_sum(&f, 1);
        assert!((g * g - f64::from(f.eta(f.minus_one())) * qf).norm() < 1e-9 * qf);
    }
}

#[test]
fn field_errors() {
    assert!(FiniteField::of_order(6).is_err());
    assert!(FiniteField::of_order(4).is_err());
    assert!(FiniteField::of_order(1).is_err());
    assert!(FiniteField::of_order(2048).is_err());
}
