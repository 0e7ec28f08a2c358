//! Random generators shared by unit and integration tests.

use rand::Rng;

use crate::exactalg::rational::ratio;
use crate::exactalg::{Monomial, Polynomial, Rational};
use crate::exterior::DifferentialForm;

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let d = [1i64, 1, 1, 2, 3][rng.gen_range(0..5)];
    ratio(rng.gen_range(-4..=4), d)
}

/// Random polynomial with at most `terms` terms of total degree at most
/// `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, terms: usize, max_degree: u32) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for _ in 0..terms {
        let mut e = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=max_degree);
        while budget > 0 && nvars > 0 {
            e[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        p = &p + &Polynomial::monomial(nvars, Monomial::from_exponents(e), small_rational(rng));
    }
    p
}

pub fn random_form<R: Rng>(rng: &mut R, nvars: usize, degree: usize, terms: usize) -> DifferentialForm {
    let mut f = DifferentialForm::zero(nvars, degree);
    if degree > nvars {
        return f;
    }
    for _ in 0..terms {
        let mut idx: Vec<usize> = (0..nvars).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(degree);
        let c = random_poly(rng, nvars, 2, 2);
        f = &f + &DifferentialForm::monomial(nvars, idx, c);
    }
    f
}

pub fn random_point<R: Rng>(rng: &mut R, nvars: usize) -> Vec<Rational> {
    (0..nvars).map(|_| small_rational(rng)).collect()
}
