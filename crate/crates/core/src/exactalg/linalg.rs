//! Fraction-free (Bareiss) elimination over `Q` and `Q[x1..xn]`, and the
//! kernel/rank computations built on it.
//!
//! Matrices over the function field `Q(x1..xn)` are handled by clearing the
//! denominators of each row, which changes neither the kernel nor the rank.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{gcd, Polynomial};
use super::ratfunc::RationalFunction;
use super::rational::Rational;
use super::AlgebraError;

/// Entry type of a matrix: an integral domain with exact division.
pub trait Entry: Clone + PartialEq + fmt::Debug {
    /// Whatever is needed to build constants (the chart size for polynomials).
    type Ctx: Clone + PartialEq + fmt::Debug;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn div_exact(&self, other: &Self) -> Option<Self>;
    /// Canonical scaling of a kernel vector whose entry `free` is nonzero.
    fn normalize_kernel_vector(v: &mut [Self], free: usize);
}

impl Entry for Rational {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        <Rational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
    fn normalize_kernel_vector(v: &mut [Self], free: usize) {
        let s = v[free].recip();
        for x in v.iter_mut() {
            *x *= &s;
        }
    }
}

impl Entry for Polynomial {
    type Ctx = usize;

    fn zero(n: &usize) -> Self {
        Polynomial::zero(*n)
    }
    fn one(n: &usize) -> Self {
        Polynomial::one(*n)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        Polynomial::div_exact(self, other)
    }
    fn normalize_kernel_vector(v: &mut [Self], free: usize) {
        let n = v[free].nvars();
        let g = v.iter().fold(Polynomial::zero(n), |g, p| gcd(&g, p));
        for p in v.iter_mut() {
            *p = p.div_exact(&g).expect("gcd divides every entry");
        }
        // clear rational content: integer coefficients with gcd one
        let den_lcm = v
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| c.denom().clone()).collect::<Vec<_>>())
            .fold(BigInt::one(), |l, d| l.lcm(&d));
        let mut s = Rational::from_integer(den_lcm);
        let int_gcd = v
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| (c * &s).numer().clone()).collect::<Vec<_>>())
            .fold(BigInt::zero(), |g, x| g.gcd(&x));
        if !int_gcd.is_zero() {
            s /= Rational::from_integer(int_gcd);
        }
        if v[free].leading_term().is_some_and(|(_, c)| c.is_negative()) {
            s = -s;
        }
        for p in v.iter_mut() {
            *p = p.scale(&s);
        }
    }
}

/// Rectangular matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Entry> {
    ctx: T::Ctx,
    rows: usize,
    cols: usize,
    data: Vec<Vec<T>>,
}

pub type RationalMatrix = Matrix<Rational>;
pub type PolyMatrix = Matrix<Polynomial>;

impl<T: Entry> Matrix<T> {
    pub fn from_rows(ctx: T::Ctx, cols: usize, data: Vec<Vec<T>>) -> Result<Self, AlgebraError> {
        if let Some(bad) = data.iter().find(|r| r.len() != cols) {
            return Err(AlgebraError::Dimension {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            ctx,
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn zeros(ctx: T::Ctx, rows: usize, cols: usize) -> Self {
        let data = vec![vec![T::zero(&ctx); cols]; rows];
        Matrix {
            ctx,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(ctx: T::Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.data[i][i] = T::one(&m.ctx);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &T::Ctx {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i][j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[Vec<T>] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let data = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.data[i][j].clone()).collect())
            .collect();
        Matrix {
            ctx: self.ctx.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Dimension {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(T::zero(&self.ctx), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    /// Fraction-free Gauss-Jordan elimination.
    ///
    /// Every non-pivot row is updated as `(p*a_ij - a_ic*a_rj) / p_prev`; all
    /// divisions are exact and entries stay in the domain. At the end every
    /// pivot entry equals the last pivot, and pivot columns are otherwise
    /// zero.
    pub fn eliminate(&self) -> Echelon<T> {
        let mut a = self.data.clone();
        let mut prev = T::one(&self.ctx);
        let mut pivot_cols = Vec::new();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let piv = a[row][col].clone();
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let factor = a[i][col].clone();
                for j in 0..self.cols {
                    if j == col {
                        continue;
                    }
                    let num = piv.mul(&a[i][j]).sub(&factor.mul(&a[row][j]));
                    a[i][j] = num
                        .div_exact(&prev)
                        .expect("fraction-free elimination divides exactly");
                }
                a[i][col] = T::zero(&self.ctx);
            }
            pivot_cols.push(col);
            pivots.push(piv.clone());
            prev = piv;
            row += 1;
        }
        Echelon {
            ctx: self.ctx.clone(),
            cols: self.cols,
            reduced: a,
            pivot_cols,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate().rank()
    }

    /// Basis of the right kernel, one vector per free column in increasing
    /// column order.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let basis = self.eliminate().kernel_basis();
        if cfg!(debug_assertions) {
            assert_eq!(self.rank() + basis.len(), self.cols, "rank-nullity");
            for v in &basis {
                let mv = self.mul_vec(v).expect("dimensions agree");
                assert!(mv.iter().all(T::is_zero), "kernel vector not annihilated");
            }
        }
        basis
    }
}

/// Result of [`Matrix::eliminate`].
#[derive(Clone, Debug)]
pub struct Echelon<T: Entry> {
    ctx: T::Ctx,
    cols: usize,
    reduced: Vec<Vec<T>>,
    pivot_cols: Vec<usize>,
    pivots: Vec<T>,
}

impl<T: Entry> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    /// Pivots in the order they were chosen. Over polynomials these are the
    /// minors whose vanishing signals a drop of rank.
    pub fn pivots(&self) -> &[T] {
        &self.pivots
    }

    pub fn reduced(&self) -> &[Vec<T>] {
        &self.reduced
    }

    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|c| !self.pivot_cols.contains(c))
            .collect()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let d = self
            .pivots
            .last()
            .cloned()
            .unwrap_or_else(|| T::one(&self.ctx));
        self.free_cols()
            .into_iter()
            .map(|f| {
                let mut v = vec![T::zero(&self.ctx); self.cols];
                v[f] = d.clone();
                for (k, &c) in self.pivot_cols.iter().enumerate() {
                    v[c] = T::zero(&self.ctx).sub(&self.reduced[k][f]);
                }
                T::normalize_kernel_vector(&mut v, f);
                v
            })
            .collect()
    }
}

/// Matrix over the rational-function field.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionMatrix {
    nvars: usize,
    cols: usize,
    data: Vec<Vec<RationalFunction>>,
}

impl FunctionMatrix {
    pub fn from_rows(
        nvars: usize,
        cols: usize,
        data: Vec<Vec<RationalFunction>>,
    ) -> Result<Self, AlgebraError> {
        for row in &data {
            if row.len() != cols {
                return Err(AlgebraError::Dimension {
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some(f) = row.iter().find(|f| f.nvars() != nvars) {
                return Err(AlgebraError::Dimension {
                    expected: nvars,
                    found: f.nvars(),
                });
            }
        }
        Ok(FunctionMatrix { nvars, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Multiplies each row by the lcm of its denominators.
    pub fn cleared(&self) -> PolyMatrix {
        let data = self
            .data
            .iter()
            .map(|row| {
                let l = row.iter().fold(Polynomial::one(self.nvars), |l, f| {
                    let g = gcd(&l, f.denominator());
                    (&l * f.denominator()).div_exact(&g).expect("gcd divides")
                });
                row.iter()
                    .map(|f| {
                        let cofactor = l.div_exact(f.denominator()).expect("lcm multiple");
                        f.numerator() * &cofactor
                    })
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(self.nvars, self.cols, data).expect("same shape")
    }

    /// Rank over the function field, i.e. at a generic point.
    pub fn rank(&self) -> usize {
        self.cleared().rank()
    }

    /// Kernel basis with polynomial entries free of common content.
    pub fn nullspace(&self) -> Vec<Vec<Polynomial>> {
        self.cleared().nullspace()
    }

    pub fn mul_vec(&self, v: &[RationalFunction]) -> Result<Vec<RationalFunction>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Dimension {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(RationalFunction::zero(self.nvars), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }
}

// ---- helpers on rational vectors ----

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Rank of a list of equal-length vectors.
pub fn rank_of_vectors(vectors: &[Vec<Rational>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    RationalMatrix::from_rows((), dim, vectors.to_vec())
        .expect("equal lengths")
        .rank()
}

/// Greedy independent subset, keeping the given order.
pub fn independent_subset(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut kept: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        let mut trial = kept.clone();
        trial.push(v.clone());
        if rank_of_vectors(&trial, dim) == trial.len() {
            kept = trial;
        }
    }
    kept
}

pub fn in_span(basis: &[Vec<Rational>], v: &[Rational], dim: usize) -> bool {
    let mut trial = basis.to_vec();
    trial.push(v.to_vec());
    rank_of_vectors(&trial, dim) == rank_of_vectors(basis, dim)
}

/// Coordinates `c` with `sum c_k basis_k = v`, if `v` lies in the span of the
/// (independent) basis.
pub fn coordinates_in(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let dim = v.len();
    let k = basis.len();
    // columns: basis vectors, then -v; a kernel vector with last entry 1
    let data: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(-v[i].clone());
            row
        })
        .collect();
    let m = RationalMatrix::from_rows((), k + 1, data).ok()?;
    m.nullspace()
        .into_iter()
        .find(|z| !Zero::is_zero(&z[k]))
        .map(|z| {
            let s = z[k].recip();
            z[..k].iter().map(|x| x * &s).collect()
        })
}

/// Intersection of two subspaces of `Q^dim`, both given by spanning lists.
pub fn intersect(a: &[Vec<Rational>], b: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let a = independent_subset(a, dim);
    let b = independent_subset(b, dim);
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // sum x_k a_k - sum y_l b_l = 0
    let cols = a.len() + b.len();
    let data: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            a.iter()
                .map(|v| v[i].clone())
                .chain(b.iter().map(|v| -v[i].clone()))
                .collect()
        })
        .collect();
    let m = RationalMatrix::from_rows((), cols, data).expect("shape");
    let vectors: Vec<Vec<Rational>> = m
        .nullspace()
        .into_iter()
        .map(|z| {
            (0..dim)
                .map(|i| a.iter().zip(&z).map(|(v, x)| &v[i] * x).sum())
                .collect()
        })
        .collect();
    independent_subset(&vectors, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, ratio};

    fn q(rows: &[&[i64]]) -> RationalMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RationalMatrix::from_rows(
            (),
            cols,
            rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn function_kernel_single_relation() {
        let n = 5;
        let x4 = Polynomial::var(n, 3);
        let m = FunctionMatrix::from_rows(
            n,
            2,
            vec![vec![RationalFunction::one(n), RationalFunction::from_poly(x4.clone())]],
        )
        .unwrap();
        assert_eq!(m.nullspace(), vec![vec![-&x4, Polynomial::one(n)]]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let id = RationalMatrix::identity((), 3);
        assert!(id.nullspace().is_empty());
        assert_eq!(id.rank(), 3);
    }

    #[test]
    fn pointwise_generator_kernel() {
        // {dx1 + x4 dx5, dx2} at (0,0,0,2,0)
        let m = q(&[&[1, 0, 0, 0, 2], &[0, 1, 0, 0, 0]]);
        let kernel = m.nullspace();
        assert_eq!(kernel.len(), 3);
        for v in &kernel {
            // substitution oracle: both rows vanish on v
            assert!(Zero::is_zero(&(&v[0] + &(rat(2) * &v[4]))));
            assert!(Zero::is_zero(&v[1]));
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(RationalMatrix::zeros((), 3, 4).rank(), 0);
        let n = 5;
        let x4 = Polynomial::var(n, 3);
        let m = PolyMatrix::from_rows(
            n,
            2,
            vec![
                vec![Polynomial::one(n), x4],
                vec![Polynomial::zero(n), Polynomial::one(n)],
            ],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn bareiss_stays_polynomial() {
        let n = 2;
        let x = Polynomial::var(n, 0);
        let y = Polynomial::var(n, 1);
        let one = Polynomial::one(n);
        // rank 2 with a non-trivial pivot sequence
        let m = PolyMatrix::from_rows(
            n,
            3,
            vec![
                vec![x.clone(), y.clone(), one.clone()],
                vec![y.clone(), x.clone(), one.clone()],
                vec![&x + &y, &x + &y, one.scale(&rat(2))],
            ],
        )
        .unwrap();
        let e = m.eliminate();
        assert_eq!(e.rank(), 2);
        let kernel = m.nullspace();
        assert_eq!(kernel.len(), 1);
        assert!(m.mul_vec(&kernel[0]).unwrap().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn span_helpers() {
        let a = vec![vec![rat(1), rat(0), rat(0)], vec![rat(0), rat(1), rat(0)]];
        let b = vec![vec![rat(0), rat(1), rat(1)], vec![rat(0), rat(0), rat(1)]];
        let i = intersect(&a, &b, 3);
        assert_eq!(i.len(), 1);
        assert!(in_span(&i, &[rat(0), rat(3), rat(0)], 3));
        let c = coordinates_in(&a, &[rat(2), ratio(1, 2), rat(0)]).unwrap();
        assert_eq!(c, vec![rat(2), ratio(1, 2)]);
        assert!(coordinates_in(&a, &[rat(0), rat(0), rat(1)]).is_none());
    }

    #[test]
    fn malformed_rows_rejected() {
        let r = RationalMatrix::from_rows((), 2, vec![vec![rat(1)]]);
        assert!(matches!(r, Err(AlgebraError::Dimension { .. })));
    }
}
