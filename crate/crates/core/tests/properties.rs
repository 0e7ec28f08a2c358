use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pfaff::exactalg::{Polynomial, Rational, RationalMatrix};
use pfaff::integral::{character_report, verify_integral_element};
use pfaff::testing::{random_form, random_point, small_rational};
use pfaff::{DifferentialForm, PfaffianSystem, TangentVector};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sign(p: usize, q: usize) -> Polynomial {
    Polynomial::constant(4, Rational::from_integer(if (p * q).is_multiple_of(2) { 1 } else { -1 }.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wedge_is_graded_commutative(seed: u64, p in 0usize..3, q in 0usize..3) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 3);
        let b = random_form(&mut r, 4, q, 3);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert_eq!(ab, ba.scale(&sign(p, q)));
    }

    #[test]
    fn d_squared_vanishes(seed: u64, p in 0usize..4) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 4);
        prop_assert!(a.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn leibniz_rule(seed: u64, p in 0usize..3, q in 0usize..3) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 3);
        let b = random_form(&mut r, 4, q, 3);
        let lhs = a.wedge(&b).unwrap().exterior_derivative();
        let rhs = &a.exterior_derivative().wedge(&b).unwrap()
            + &a.wedge(&b.exterior_derivative()).unwrap().scale(&sign(p, 1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn interior_products_anticommute(seed: u64, p in 2usize..4) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 4);
        let v = TangentVector::from_rationals(4, &random_point(&mut r, 4));
        let w = TangentVector::from_rationals(4, &random_point(&mut r, 4));
        let vw = a.interior_product(&v).unwrap().interior_product(&w).unwrap();
        let wv = a.interior_product(&w).unwrap().interior_product(&v).unwrap();
        prop_assert!((&vw + &wv).is_zero());
    }

    #[test]
    fn evaluation_commutes_with_wedge(seed: u64, p in 0usize..3, q in 0usize..3) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 3);
        let b = random_form(&mut r, 4, q, 3);
        let x = random_point(&mut r, 4);
        let lhs = a.wedge(&b).unwrap().evaluate_at(&x).unwrap();
        let rhs = a.evaluate_at(&x).unwrap().wedge(&b.evaluate_at(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn restriction_commutes_with_d(seed: u64, p in 0usize..3, fixed in 0usize..4) {
        let mut r = rng(seed);
        let a = random_form(&mut r, 4, p, 4);
        let mut slice = BTreeMap::new();
        slice.insert(fixed, small_rational(&mut r));
        prop_assert_eq!(
            a.exterior_derivative().restrict(&slice),
            a.restrict(&slice).exterior_derivative()
        );
    }

    #[test]
    fn rank_plus_nullity(seed: u64, rows in 1usize..6, cols in 1usize..7) {
        let mut r = rng(seed);
        let data: Vec<Vec<Rational>> = (0..rows).map(|_| random_point(&mut r, cols)).collect();
        let m = RationalMatrix::from_rows((), cols, data).unwrap();
        let kernel = m.nullspace();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == Rational::from_integer(0.into())));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn chains_are_integral_elements(seed: u64, n in 3usize..6, r in 1usize..3) {
        let mut g = rng(seed);
        let gens: Vec<DifferentialForm> = (0..r)
            .map(|i| &DifferentialForm::dx(n, i) + &random_form(&mut g, n, 1, 2))
            .collect();
        let system = PfaffianSystem::new(n, gens);
        prop_assume!(system.is_ok());
        let system = system.unwrap();
        let x = random_point(&mut g, n);
        prop_assume!(system.check_point(&x).is_ok());
        let report = character_report(&system, &x, &[], 8).unwrap();
        prop_assert!(verify_integral_element(&system, &x, &report.chain).unwrap());
        prop_assert_eq!(report.rho_chain + report.character_chain, n - r);
        if let Some(rho) = report.rho_max() {
            prop_assert!(rho >= report.rho_chain);
        }
    }
}
