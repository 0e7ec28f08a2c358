//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::AlgebraError;

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then lexicographic with `x1 > x2 > ...`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` chart coordinates with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    /// The coordinate function `x_{index}` (zero-based).
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range");
        Self::monomial(nvars, Monomial::var(nvars, index), Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn uses_var(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.0[index] > 0)
    }

    pub fn var_degree(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.0[index]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_same_chart(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_same_chart(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_same_chart(other)?;
        Ok(self * other)
    }

    pub fn partial_derivative(&self, index: usize) -> Result<Polynomial, AlgebraError> {
        if index >= self.nvars {
            return Err(AlgebraError::Dimension {
                expected: self.nvars,
                found: index,
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[index] -= 1;
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Replaces the assigned coordinates by constants; the chart is unchanged.
    pub fn substitute(&self, assignments: &BTreeMap<usize, Rational>) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = m.clone();
            for (&i, value) in assignments {
                let e = rest.0[i];
                if e > 0 {
                    coeff *= num_traits::pow(value.clone(), e as usize);
                    rest.0[i] = 0;
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    /// Re-reads the polynomial on the chart made of the `kept` coordinates,
    /// in the given order. Fails if a dropped coordinate occurs.
    pub fn reindex(&self, kept: &[usize]) -> Option<Polynomial> {
        let mut out = Polynomial::zero(kept.len());
        for (m, c) in &self.terms {
            let dropped = (0..self.nvars)
                .filter(|i| !kept.contains(i))
                .any(|i| m.0[i] > 0);
            if dropped {
                return None;
            }
            out.add_term(Monomial(kept.iter().map(|&i| m.0[i]).collect()), c.clone());
        }
        Some(out)
    }

    /// Places the polynomial on a larger chart; coordinate `i` goes to
    /// `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Polynomial {
        assert_eq!(positions.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &p) in positions.iter().enumerate() {
                e[p] = m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, divisor.nvars);
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm.checked_div(&lm)?;
            let c = rc / &lc;
            let step = Polynomial::monomial(self.nvars, m, c);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
        Some(quot)
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Scales so that the leading coefficient is positive.
    pub fn with_positive_lead(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    fn first_used_var(&self) -> Option<usize> {
        (0..self.nvars).find(|&i| self.uses_var(i))
    }

    /// Coefficients as a polynomial in `x_v`: entry `k` multiplies `x_v^k`.
    fn coefficients_in(&self, v: usize) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(self.nvars); self.var_degree(v) as usize + 1];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut rest = m.clone();
            rest.0[v] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    fn shift_var(&self, v: usize, k: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.0[v] += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    fn content_in(&self, v: usize) -> Polynomial {
        self.coefficients_in(v)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Polynomial::zero(self.nvars), |g, c| gcd(&g, &c))
    }

    fn primitive_part_in(&self, v: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides its polynomial")
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials in `x_v`.
fn pseudo_remainder(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let k = b.var_degree(v);
    let lead_b = b.coefficients_in(v).swap_remove(k as usize);
    let mut r = a.clone();
    while !r.is_zero() && r.var_degree(v) >= k {
        let m = r.var_degree(v);
        let lead_r = r.coefficients_in(v).swap_remove(m as usize);
        r = &(&r * &lead_b) - &(&lead_r * &b.shift_var(v, m - k));
    }
    r
}

/// Greatest common divisor, normalized to be monic (zero only for two zeros).
///
/// Recursive primitive remainder sequence: contents are taken with respect
/// to the first variable that occurs and handled by recursion on the
/// remaining ones.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    assert_eq!(a.nvars, b.nvars);
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(n);
    }
    let v = match (a.first_used_var(), b.first_used_var()) {
        (Some(x), Some(y)) => x.min(y),
        _ => unreachable!("non-constant polynomials use a variable"),
    };
    if !a.uses_var(v) {
        return gcd(a, &b.content_in(v));
    }
    if !b.uses_var(v) {
        return gcd(&a.content_in(v), b);
    }
    let (ca, cb) = (a.content_in(v), b.content_in(v));
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.var_degree(v) < q.var_degree(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_remainder(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.var_degree(v) == 0 {
            q = Polynomial::one(n);
            break;
        }
        p = q;
        q = r.primitive_part_in(v);
    }
    (&c * &q.primitive_part_in(v)).monic()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials on different charts");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials on different charts");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials on different charts");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Default coordinate names `x1 .. xn`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                names[i].clone()
            } else {
                format!("{}^{}", names[i], e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl Polynomial {
    /// Renders with the given coordinate names, highest graded-lex term
    /// first, e.g. `x4^2*x5 - 1/2*x1 + 3`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = monomial_text(m, names);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.nvars)))
    }
}
