//! Differential forms with polynomial coefficients on an `n`-dimensional
//! coordinate chart.
//!
//! A form of degree `k` is stored as a map from strictly increasing index
//! lists `i1 < .. < ik` (the basis element `dx_{i1} ∧ .. ∧ dx_{ik}`) to
//! nonzero polynomial coefficients. Indices are zero-based; the default
//! rendering names coordinate `i` as `x{i+1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::exactalg::poly::default_names;
use crate::exactalg::{AlgebraError, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("forms live on charts of different dimension ({0} vs {1})")]
    ChartMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("interior product of a 0-form is undefined")]
    InteriorOfFunction,
    #[error("expected {expected} vectors, found {found}")]
    VectorCount { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Strictly increasing list of coordinate indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Sorts `indices`, returning the permutation sign, or `None` if an index
    /// repeats.
    pub fn normalize(mut indices: Vec<usize>) -> Option<(MultiIndex, i32)> {
        let mut sign = 1;
        // insertion sort counts transpositions
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((MultiIndex(indices), sign))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Concatenation `self ++ other` sorted, with its sign; `None` if they
    /// share an index.
    fn merge(&self, other: &MultiIndex) -> Option<(MultiIndex, i32)> {
        let mut inversions = 0usize;
        for &a in &self.0 {
            for &b in &other.0 {
                if a == b {
                    return None;
                }
                if a > b {
                    inversions += 1;
                }
            }
        }
        let mut merged: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        merged.sort_unstable();
        Some((MultiIndex(merged), if inversions.is_multiple_of(2) { 1 } else { -1 }))
    }
}

/// A tangent vector (or vector field) given by its components in the
/// coordinate basis `∂/∂x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentVector {
    components: Vec<Polynomial>,
}

impl TangentVector {
    pub fn new(components: Vec<Polynomial>) -> Self {
        TangentVector { components }
    }

    pub fn from_rationals(nvars: usize, components: &[Rational]) -> Self {
        TangentVector {
            components: components
                .iter()
                .map(|c| Polynomial::constant(nvars, c.clone()))
                .collect(),
        }
    }

    /// The coordinate vector `∂/∂x_i`.
    pub fn basis(nvars: usize, i: usize) -> Self {
        let mut components = vec![Polynomial::zero(nvars); nvars];
        components[i] = Polynomial::one(nvars);
        TangentVector { components }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DifferentialForm {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl DifferentialForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        DifferentialForm {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A function viewed as a 0-form.
    pub fn function(p: Polynomial) -> Self {
        let mut f = Self::zero(p.nvars(), 0);
        f.add_term(MultiIndex(Vec::new()), p);
        f
    }

    /// The coordinate differential `dx_i`.
    pub fn dx(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "coordinate {i} out of range");
        Self::monomial(nvars, vec![i], Polynomial::one(nvars))
    }

    /// `coeff * dx_{i1} ∧ .. ∧ dx_{ik}` for indices in any order.
    pub fn monomial(nvars: usize, indices: Vec<usize>, coeff: Polynomial) -> Self {
        assert_eq!(coeff.nvars(), nvars);
        assert!(indices.iter().all(|&i| i < nvars), "index out of range");
        let degree = indices.len();
        let mut f = Self::zero(nvars, degree);
        if let Some((idx, sign)) = MultiIndex::normalize(indices) {
            let c = if sign < 0 { -coeff } else { coeff };
            f.add_term(idx, c);
        }
        f
    }

    /// Sum of `coeff_i dx_i`.
    pub fn one_form(coeffs: Vec<Polynomial>) -> Self {
        let n = coeffs.len();
        let mut f = Self::zero(n, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            f.add_term(MultiIndex(vec![i]), c);
        }
        f
    }

    fn add_term(&mut self, idx: MultiIndex, c: Polynomial) {
        debug_assert_eq!(idx.len(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, indices: &[usize]) -> Polynomial {
        self.terms
            .get(&MultiIndex(indices.to_vec()))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    /// Coefficients `a_i` of a 1-form `sum a_i dx_i`.
    pub fn one_form_coefficients(&self) -> Vec<Polynomial> {
        assert_eq!(self.degree, 1, "not a 1-form");
        (0..self.nvars).map(|i| self.coefficient(&[i])).collect()
    }

    /// Coordinates that occur in a coefficient or as a differential.
    pub fn involves(&self, coordinate: usize) -> bool {
        self.terms
            .iter()
            .any(|(idx, c)| idx.contains(coordinate) || c.uses_var(coordinate))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FormError> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FormError> {
        if self.nvars != other.nvars {
            return Err(FormError::ChartMismatch(self.nvars, other.nvars));
        }
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Polynomial) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c * f);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        if self.nvars != other.nvars {
            return Err(FormError::ChartMismatch(self.nvars, other.nvars));
        }
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((idx, sign)) = ia.merge(ib) {
                    let c = ca * cb;
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ self ∧ .. ∧ self` (`k` factors); `k = 0` gives the constant 1.
    pub fn wedge_power(&self, k: u32) -> Self {
        let mut acc = Self::function(Polynomial::one(self.nvars));
        for _ in 0..k {
            acc = acc.wedge(self).expect("same chart");
        }
        acc
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.degree + 1);
        for (idx, c) in &self.terms {
            for j in 0..self.nvars {
                if idx.contains(j) {
                    continue;
                }
                let dc = c.partial_derivative(j).expect("index in range");
                if dc.is_zero() {
                    continue;
                }
                // dx_j moved past the indices of idx smaller than j
                let before = idx.0.iter().filter(|&&i| i < j).count();
                let mut merged = idx.0.clone();
                merged.insert(before, j);
                out.add_term(
                    MultiIndex(merged),
                    if before % 2 == 0 { dc } else { -dc },
                );
            }
        }
        out
    }

    /// Contraction `i(v)` in the first slot.
    pub fn interior_product(&self, v: &TangentVector) -> Result<Self, FormError> {
        if self.degree == 0 {
            return Err(FormError::InteriorOfFunction);
        }
        if v.len() != self.nvars {
            return Err(FormError::ChartMismatch(self.nvars, v.len()));
        }
        let mut out = Self::zero(self.nvars, self.degree - 1);
        for (idx, c) in &self.terms {
            for (m, &i) in idx.0.iter().enumerate() {
                let comp = &v.components[i];
                if comp.is_zero() {
                    continue;
                }
                let mut rest = idx.0.clone();
                rest.remove(m);
                let t = c * comp;
                out.add_term(MultiIndex(rest), if m % 2 == 0 { t } else { -t });
            }
        }
        Ok(out)
    }

    /// The form with every coefficient evaluated at `point`.
    pub fn evaluate_at(&self, point: &[Rational]) -> Result<Self, FormError> {
        if point.len() != self.nvars {
            return Err(FormError::ChartMismatch(self.nvars, point.len()));
        }
        let mut out = Self::zero(self.nvars, self.degree);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), Polynomial::constant(self.nvars, c.evaluate(point)?));
        }
        Ok(out)
    }

    pub fn is_zero_at(&self, point: &[Rational]) -> Result<bool, FormError> {
        Ok(self.evaluate_at(point)?.is_zero())
    }

    /// Value of the form at `point` on `vectors` (one per degree).
    pub fn evaluate_on(&self, point: &[Rational], vectors: &[Vec<Rational>]) -> Result<Rational, FormError> {
        if vectors.len() != self.degree {
            return Err(FormError::VectorCount {
                expected: self.degree,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.nvars) {
            return Err(FormError::ChartMismatch(self.nvars, v.len()));
        }
        let mut acc = Rational::zero();
        for (idx, c) in &self.terms {
            let minor: Vec<Vec<Rational>> = vectors
                .iter()
                .map(|v| idx.0.iter().map(|&i| v[i].clone()).collect())
                .collect();
            let det = determinant(minor);
            if !det.is_zero() {
                acc += c.evaluate(point)? * det;
            }
        }
        Ok(acc)
    }

    /// Substitutes constants for the assigned coordinates, deletes their
    /// differentials and re-reads the result on the remaining coordinates.
    pub fn restrict(&self, assignments: &BTreeMap<usize, Rational>) -> Self {
        let kept: Vec<usize> = (0..self.nvars)
            .filter(|i| !assignments.contains_key(i))
            .collect();
        let mut out = Self::zero(kept.len(), self.degree);
        for (idx, c) in &self.terms {
            if idx.0.iter().any(|i| assignments.contains_key(i)) {
                continue;
            }
            let c = c
                .substitute(assignments)
                .reindex(&kept)
                .expect("assigned coordinates were substituted");
            let new_idx = idx
                .0
                .iter()
                .map(|i| kept.iter().position(|k| k == i).expect("kept"))
                .collect();
            out.add_term(MultiIndex(new_idx), c);
        }
        out
    }

    /// Re-reads the form on the chart of the `kept` coordinates. Returns the
    /// first dropped coordinate that occurs, as the error.
    pub fn reindex(&self, kept: &[usize]) -> Result<Self, usize> {
        if let Some(bad) = (0..self.nvars)
            .filter(|i| !kept.contains(i))
            .find(|&i| self.involves(i))
        {
            return Err(bad);
        }
        let mut out = Self::zero(kept.len(), self.degree);
        for (idx, c) in &self.terms {
            let c = c.reindex(kept).expect("checked above");
            let new_idx = idx
                .0
                .iter()
                .map(|i| kept.iter().position(|k| k == i).expect("checked above"))
                .collect();
            out.add_term(MultiIndex(new_idx), c);
        }
        Ok(out)
    }

    /// Places the form on a larger chart; coordinate `i` goes to
    /// `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Self {
        let mut out = Self::zero(nvars, self.degree);
        for (idx, c) in &self.terms {
            let mapped: Vec<usize> = idx.0.iter().map(|&i| positions[i]).collect();
            let (new_idx, sign) = MultiIndex::normalize(mapped).expect("positions are distinct");
            let c = c.embed(nvars, positions);
            out.add_term(new_idx, if sign < 0 { -c } else { c });
        }
        out
    }

    /// Canonical text such as `dx1 + x4*dx5` or `dx4∧dx5 + dx2∧dx3`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            let basis = idx
                .0
                .iter()
                .map(|&i| format!("d{}", names[i]))
                .collect::<Vec<_>>()
                .join("∧");
            let term = if basis.is_empty() {
                c.to_text(names)
            } else if c.num_terms() == 1 {
                let ct = c.to_text(names);
                match ct.as_str() {
                    "1" => basis,
                    "-1" => format!("-{basis}"),
                    _ => format!("{ct}*{basis}"),
                }
            } else {
                format!("({})*{basis}", c.to_text(names))
            };
            if k == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det *= &piv;
        for i in col + 1..n {
            let f = &m[i][col] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let t = &f * &m[col][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

impl Add for &DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, other: &DifferentialForm) -> DifferentialForm {
        self.check_compatible(other).expect("compatible forms");
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, other: &DifferentialForm) -> DifferentialForm {
        self + &(-other)
    }
}

impl Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        DifferentialForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::rat;

    const N: usize = 5;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(N, i - 1)
    }
    fn dx(i: usize) -> DifferentialForm {
        DifferentialForm::dx(N, i - 1)
    }
    fn e(i: usize) -> TangentVector {
        TangentVector::basis(N, i - 1)
    }

    #[test]
    fn wedge_basics() {
        let w = dx(4).wedge(&dx(5)).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.coefficient(&[3, 4]), Polynomial::one(N));
        assert!(dx(4).wedge(&dx(4)).unwrap().is_zero());
        let other = DifferentialForm::dx(3, 0);
        assert!(matches!(dx(1).wedge(&other), Err(FormError::ChartMismatch(5, 3))));
    }

    #[test]
    fn square_of_gender_two_form() {
        // (dx4∧dx5 + dx2∧dx3)^2 = 2 dx2∧dx3∧dx4∧dx5 by hand expansion
        let omega = &dx(4).wedge(&dx(5)).unwrap() + &dx(2).wedge(&dx(3)).unwrap();
        let sq = omega.wedge(&omega).unwrap();
        let expected = DifferentialForm::monomial(N, vec![1, 2, 3, 4], Polynomial::constant(N, rat(2)));
        assert_eq!(sq, expected);
        assert_eq!(sq.to_string(), "2*dx2∧dx3∧dx4∧dx5");
    }

    #[test]
    fn derivatives_of_generators() {
        let w1 = &dx(1) + &dx(5).scale(&x(4));
        assert_eq!(w1.exterior_derivative(), dx(4).wedge(&dx(5)).unwrap());
        let w3 = &dx(3) + &dx(1).scale(&x(5));
        assert_eq!(w3.exterior_derivative(), dx(5).wedge(&dx(1)).unwrap());
        let f = dx(2).scale(&(&x(4).pow(2) * &x(5)));
        assert!(f.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn interior_products() {
        let b = dx(4).wedge(&dx(5)).unwrap();
        assert_eq!(b.interior_product(&e(4)).unwrap(), dx(5));
        let mut comps = e(5).components().to_vec();
        comps[0] = -x(4);
        let v = TangentVector::new(comps);
        assert_eq!(b.interior_product(&v).unwrap(), -&dx(4));
        assert!(b.interior_product(&e(1)).unwrap().is_zero());
        let f = DifferentialForm::function(x(1));
        assert!(matches!(f.interior_product(&e(1)), Err(FormError::InteriorOfFunction)));
    }

    #[test]
    fn pointwise_evaluation() {
        let p = [rat(0), rat(0), rat(0), rat(2), rat(0)];
        let w1 = &dx(1) + &dx(5).scale(&x(4));
        let expected = &dx(1) + &dx(5).scale(&Polynomial::constant(N, rat(2)));
        assert_eq!(w1.evaluate_at(&p).unwrap(), expected);
        let b = dx(4).wedge(&dx(5)).unwrap();
        assert_eq!(b.evaluate_at(&p).unwrap(), b);
        let c = dx(1).wedge(&dx(2)).unwrap().scale(&x(5));
        let q = [rat(1), rat(1), rat(1), rat(1), rat(3)];
        assert_eq!(
            c.evaluate_at(&q).unwrap(),
            dx(1).wedge(&dx(2)).unwrap().scale(&Polynomial::constant(N, rat(3)))
        );
    }

    #[test]
    fn evaluation_on_vectors_matches_contraction() {
        let b = &dx(4).wedge(&dx(5)).unwrap() + &dx(1).wedge(&dx(4)).unwrap().scale(&x(2));
        let p = vec![rat(1), rat(2), rat(3), rat(4), rat(5)];
        let v = vec![rat(1), rat(0), rat(-1), rat(2), rat(1)];
        let w = vec![rat(0), rat(3), rat(1), rat(1), rat(-2)];
        let direct = b.evaluate_on(&p, &[v.clone(), w.clone()]).unwrap();
        let contracted = b
            .interior_product(&TangentVector::from_rationals(N, &v))
            .unwrap()
            .evaluate_on(&p, &[w])
            .unwrap();
        assert_eq!(direct, contracted);
    }

    #[test]
    fn text_rendering() {
        let w1 = &dx(1) + &dx(5).scale(&x(4));
        assert_eq!(w1.to_string(), "dx1 + x4*dx5");
        let w = &dx(2).scale(&(&x(1) + &x(2))) - &dx(3).scale(&x(1));
        assert_eq!(w.to_string(), "(x1 + x2)*dx2 - x1*dx3");
    }

    #[test]
    fn restrict_and_reindex() {
        let w1 = &dx(1) + &dx(5).scale(&x(4));
        let mut slice = BTreeMap::new();
        slice.insert(1, rat(7));
        slice.insert(2, rat(0));
        let r = w1.restrict(&slice);
        assert_eq!(r.nvars(), 3);
        assert_eq!(r.to_string(), "dx1 + x2*dx3");
        assert_eq!(w1.reindex(&[0, 1, 2, 4]), Err(3));
        let kept = w1.reindex(&[0, 3, 4]).unwrap();
        assert_eq!(kept.embed(N, &[0, 3, 4]), w1);
    }
}
