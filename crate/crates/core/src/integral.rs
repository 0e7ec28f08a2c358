//! Integral elements at a point: involution, polar spaces, ascending chains,
//! characters and a bounded search for integral elements of maximal
//! dimension.
//!
//! Everything here works in the coordinates of a fixed basis of the
//! annihilator `Σ_p`; [`PointFrame`] converts to and from ambient vectors.

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::exactalg::linalg::{coordinates_in, independent_subset, rank_of_vectors};
use crate::exactalg::rational::ratio;
use crate::exactalg::{Rational, RationalMatrix};
use crate::pfaffian::{combine, common_kernel, skew_matrices, PfaffianError, PfaffianSystem};

pub const DEFAULT_SEARCH_LIMIT: usize = 8;

/// Number of grid combinations tried by the default stream before it falls
/// back to the polar basis.
const STREAM_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegralError {
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error("vector ({0}) is not in the annihilator of the system")]
    OutsideAnnihilator(String),
    #[error("vector has {found} components, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("not an integral element: vectors {a} and {b} are not in involution for form {form}")]
    NotIntegral { a: usize, b: usize, form: usize },
    #[error("vector is not in the polar space of the current element")]
    NotInPolar,
    #[error("vector lies in the span of the current element")]
    InSpan,
    #[error("annihilator has dimension {dim}, above the search limit {limit}")]
    SearchRefused { dim: usize, limit: usize },
}

/// Annihilator basis at a point together with the restrictions of the
/// `dω_i(p)` to it.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFrame {
    base_point: Vec<Rational>,
    nvars: usize,
    rank: usize,
    basis: Vec<Vec<Rational>>,
    skew: Vec<Vec<Vec<Rational>>>,
}

pub fn point_frame(system: &PfaffianSystem, p: &[Rational]) -> Result<PointFrame, IntegralError> {
    let basis = system.annihilator_at(p)?;
    let dforms = system
        .generators()
        .iter()
        .map(|g| g.exterior_derivative().evaluate_at(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(PfaffianError::from)?;
    let skew = skew_matrices(&dforms, &basis, p)?;
    Ok(PointFrame {
        base_point: p.to_vec(),
        nvars: system.nvars(),
        rank: system.rank(),
        basis,
        skew,
    })
}

impl PointFrame {
    /// Frame from explicit data; `skew` holds one `d×d` matrix per form.
    pub fn from_parts(
        base_point: Vec<Rational>,
        basis: Vec<Vec<Rational>>,
        skew: Vec<Vec<Vec<Rational>>>,
    ) -> Self {
        let nvars = base_point.len();
        let d = basis.len();
        assert!(skew.iter().all(|m| m.len() == d && m.iter().all(|r| r.len() == d)));
        PointFrame {
            base_point,
            nvars,
            rank: nvars - d,
            basis,
            skew,
        }
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base_point
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `dim Σ_p`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Annihilator basis as ambient vectors.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn skew_forms(&self) -> &[Vec<Vec<Rational>>] {
        &self.skew
    }

    pub fn to_ambient(&self, coords: &[Rational]) -> Vec<Rational> {
        combine(&self.basis, coords, self.nvars)
    }

    pub fn to_frame_coords(&self, ambient: &[Rational]) -> Result<Vec<Rational>, IntegralError> {
        if ambient.len() != self.nvars {
            return Err(IntegralError::Length {
                expected: self.nvars,
                found: ambient.len(),
            });
        }
        if self.basis.is_empty() {
            return if ambient.iter().all(Zero::is_zero) {
                Ok(Vec::new())
            } else {
                Err(IntegralError::OutsideAnnihilator(crate::pfaffian::join(ambient)))
            };
        }
        coordinates_in(&self.basis, ambient)
            .ok_or_else(|| IntegralError::OutsideAnnihilator(crate::pfaffian::join(ambient)))
    }

    fn check_len(&self, v: &[Rational]) -> Result<(), IntegralError> {
        if v.len() != self.dim() {
            return Err(IntegralError::Length {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `B_i(v, w)`.
    pub fn pairing(&self, form: usize, v: &[Rational], w: &[Rational]) -> Rational {
        let b = &self.skew[form];
        let mut acc = Rational::zero();
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for (c, wc) in w.iter().enumerate() {
                if !wc.is_zero() && !b[a][c].is_zero() {
                    acc += va * &b[a][c] * wc;
                }
            }
        }
        acc
    }

    fn involutive(&self, v: &[Rational], w: &[Rational]) -> bool {
        (0..self.skew.len()).all(|i| self.pairing(i, v, w).is_zero())
    }

    pub fn is_in_involution(&self, v: &[Rational], w: &[Rational]) -> Result<bool, IntegralError> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(self.involutive(v, w))
    }

    /// Same as [`PointFrame::is_in_involution`] for ambient vectors.
    pub fn is_in_involution_ambient(&self, v: &[Rational], w: &[Rational]) -> Result<bool, IntegralError> {
        let v = self.to_frame_coords(v)?;
        let w = self.to_frame_coords(w)?;
        Ok(self.involutive(&v, &w))
    }

    pub fn check_integral(&self, element: &[Vec<Rational>]) -> Result<(), IntegralError> {
        for v in element {
            self.check_len(v)?;
        }
        for a in 0..element.len() {
            for b in a + 1..element.len() {
                if let Some(form) =
                    (0..self.skew.len()).find(|&i| !self.pairing(i, &element[a], &element[b]).is_zero())
                {
                    return Err(IntegralError::NotIntegral { a, b, form });
                }
            }
        }
        Ok(())
    }

    /// All `w` in involution with every vector of `element`.
    pub fn polar_space(&self, element: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, IntegralError> {
        self.check_integral(element)?;
        Ok(self.polar_unchecked(element))
    }

    fn polar_unchecked(&self, element: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let d = self.dim();
        let mut rows = Vec::new();
        for v in element {
            for b in &self.skew {
                let row: Vec<Rational> = (0..d)
                    .map(|c| {
                        v.iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(a, x)| x * &b[a][c])
                            .sum()
                    })
                    .collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return RationalMatrix::identity((), d).row_vectors().to_vec();
        }
        RationalMatrix::from_rows((), d, rows)
            .expect("rows of length d")
            .nullspace()
    }

    /// Vectors of `E` in involution with all of `E`.
    pub fn characteristic_element_of(&self, element: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, IntegralError> {
        for v in element {
            self.check_len(v)?;
        }
        let e = independent_subset(element, self.dim());
        if e.is_empty() {
            return Ok(Vec::new());
        }
        let restricted: Vec<Vec<Vec<Rational>>> = (0..self.skew.len())
            .map(|i| {
                e.iter()
                    .map(|u| e.iter().map(|w| self.pairing(i, u, w)).collect())
                    .collect()
            })
            .collect();
        let kernel = common_kernel(&restricted, e.len());
        Ok(kernel.iter().map(|c| combine(&e, c, self.dim())).collect())
    }

    /// Whether the characteristic elements of `E` and `F` are in involution.
    pub fn are_conjugate(&self, e: &[Vec<Rational>], f: &[Vec<Rational>]) -> Result<bool, IntegralError> {
        let ce = self.characteristic_element_of(e)?;
        let cf = self.characteristic_element_of(f)?;
        Ok(ce.iter().all(|v| cf.iter().all(|w| self.involutive(v, w))))
    }

    /// Largest dimension any isotropic subspace can have: `d - rank/2` for
    /// the largest rank found in the pencil `Σ c_i B_i`.
    pub fn isotropic_upper_bound(&self) -> usize {
        let d = self.dim();
        let mut best = 0;
        let mut coefficient_sets: Vec<Vec<Rational>> = (0..self.skew.len())
            .map(|i| (0..self.skew.len()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        for k in 1..=3i64 {
            coefficient_sets.push((0..self.skew.len()).map(|i| ratio((i as i64 + 2).pow(k as u32), 1)).collect());
        }
        for c in coefficient_sets {
            let mut m = vec![vec![Rational::zero(); d]; d];
            for (ci, b) in c.iter().zip(&self.skew) {
                for a in 0..d {
                    for e in 0..d {
                        if !b[a][e].is_zero() {
                            m[a][e] += ci * &b[a][e];
                        }
                    }
                }
            }
            best = best.max(rank_of_vectors(&m, d));
        }
        d - best / 2
    }
}

/// Ascending chain `E_1 ⊂ E_2 ⊂ ..` of integral elements.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralChain {
    vectors: Vec<Vec<Rational>>,
    /// `s_j = dim Ẽ_j` for `j = 1..k`.
    polar_dims: Vec<usize>,
    sigma_dim: usize,
    polar: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Extended,
    Exhausted,
}

impl IntegralChain {
    pub fn new(frame: &PointFrame) -> Self {
        IntegralChain {
            vectors: Vec::new(),
            polar_dims: Vec::new(),
            sigma_dim: frame.dim(),
            polar: frame.polar_unchecked(&[]),
        }
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn polar_dims(&self) -> &[usize] {
        &self.polar_dims
    }

    /// `s_j` with `s_0 = dim Σ_p`.
    pub fn s(&self, j: usize) -> usize {
        if j == 0 {
            self.sigma_dim
        } else {
            self.polar_dims[j - 1]
        }
    }

    /// Current polar space `Ẽ_k`.
    pub fn polar(&self) -> &[Vec<Rational>] {
        &self.polar
    }

    pub fn is_exhausted(&self) -> bool {
        self.polar.len() == self.vectors.len()
    }

    fn admissible(&self, frame: &PointFrame, v: &[Rational]) -> Result<(), IntegralError> {
        frame.check_len(v)?;
        if !self.vectors.iter().all(|u| frame.involutive(u, v)) {
            return Err(IntegralError::NotInPolar);
        }
        let d = frame.dim();
        let mut trial = self.vectors.clone();
        trial.push(v.to_vec());
        if rank_of_vectors(&trial, d) < trial.len() {
            return Err(IntegralError::InSpan);
        }
        Ok(())
    }

    /// Appends `v` (frame coordinates) or the first admissible vector of
    /// the default stream.
    pub fn extend(&mut self, frame: &PointFrame, v: Option<&[Rational]>) -> Result<Extension, IntegralError> {
        let v = match v {
            Some(v) => {
                self.admissible(frame, v)?;
                v.to_vec()
            }
            None => {
                if self.is_exhausted() {
                    return Ok(Extension::Exhausted);
                }
                self.next_from_stream(frame)
            }
        };
        self.vectors.push(v);
        self.polar = frame.polar_unchecked(&self.vectors);
        self.polar_dims.push(self.polar.len());
        Ok(Extension::Extended)
    }

    fn next_from_stream(&self, frame: &PointFrame) -> Vec<Rational> {
        let d = frame.dim();
        let units = (0..d).map(|i| {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            e
        });
        units
            .chain(GridCombinations::new(d).take(STREAM_BUDGET))
            .chain(self.polar.iter().cloned())
            .find(|c| self.admissible(frame, c).is_ok())
            .expect("the polar basis contains a vector outside the span")
    }

    /// Extends with the default stream until exhausted.
    pub fn complete(&mut self, frame: &PointFrame) {
        while self.extend(frame, None).expect("stream vectors are admissible") == Extension::Extended {}
    }
}

/// Grid values used for candidate coefficients, in stream order.
pub fn grid_values() -> Vec<Rational> {
    vec![
        ratio(-2, 1),
        ratio(-1, 1),
        ratio(-1, 2),
        ratio(0, 1),
        ratio(1, 2),
        ratio(1, 1),
        ratio(2, 1),
    ]
}

/// Nonzero vectors of `d` grid values in lexicographic order.
struct GridCombinations {
    values: Vec<Rational>,
    digits: Vec<usize>,
    done: bool,
}

impl GridCombinations {
    fn new(d: usize) -> Self {
        GridCombinations {
            values: grid_values(),
            digits: vec![0; d],
            done: d == 0,
        }
    }
}

impl Iterator for GridCombinations {
    type Item = Vec<Rational>;

    fn next(&mut self) -> Option<Vec<Rational>> {
        loop {
            if self.done {
                return None;
            }
            let v: Vec<Rational> = self.digits.iter().map(|&i| self.values[i].clone()).collect();
            // advance odometer, last position fastest
            let mut pos = self.digits.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.digits[pos] += 1;
                if self.digits[pos] < self.values.len() {
                    break;
                }
                self.digits[pos] = 0;
            }
            if v.iter().any(|x| !x.is_zero()) {
                return Some(v);
            }
        }
    }
}

/// Result of [`max_integral_dimension`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaxIntegral {
    pub rho_max: usize,
    /// Witness basis in frame coordinates.
    pub witness: Vec<Vec<Rational>>,
    pub upper_bound: usize,
    /// The witness reaches the pencil upper bound, so `rho_max` is exact
    /// independently of the candidate grid.
    pub certified: bool,
}

/// Backtracking search for an integral element of largest dimension.
pub fn max_integral_dimension(frame: &PointFrame, limit: usize) -> Result<MaxIntegral, IntegralError> {
    let d = frame.dim();
    if d > limit {
        return Err(IntegralError::SearchRefused { dim: d, limit });
    }
    let bound = frame.isotropic_upper_bound();
    let mut search = Search {
        frame,
        bound,
        best: Vec::new(),
        seen: HashSet::new(),
    };
    search.visit(Vec::new());
    let rho_max = search.best.len();
    Ok(MaxIntegral {
        rho_max,
        witness: search.best,
        upper_bound: bound,
        certified: rho_max == bound,
    })
}

struct Search<'a> {
    frame: &'a PointFrame,
    bound: usize,
    best: Vec<Vec<Rational>>,
    seen: HashSet<Vec<Vec<Rational>>>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.best.len() >= self.bound
    }

    fn visit(&mut self, element: Vec<Vec<Rational>>) {
        if self.done() {
            return;
        }
        let d = self.frame.dim();
        if !self.seen.insert(canonical_basis(&element, d)) {
            return;
        }
        let polar = self.frame.polar_unchecked(&element);
        if element.len() > self.best.len() {
            self.best = element.clone();
        }
        if polar.len() <= self.best.len() {
            return;
        }
        // the whole polar space may already be integral
        if self.frame.check_integral(&polar).is_ok() {
            if polar.len() > self.best.len() {
                self.best = polar;
            }
            return;
        }
        let mut spanning = element.clone();
        spanning.extend(polar.iter().cloned());
        let quotient: Vec<Vec<Rational>> = independent_subset(&spanning, d)
            .into_iter()
            .skip(element.len())
            .collect();
        for c in quotient_candidates(quotient.len()) {
            if self.done() {
                return;
            }
            let v = combine(&quotient, &c, d);
            if !element.iter().all(|u| self.frame.involutive(u, &v)) {
                continue;
            }
            let mut next = element.clone();
            next.push(v);
            self.visit(next);
        }
    }
}

/// Coefficient vectors over a quotient basis: unit vectors first, then grid
/// vectors whose first nonzero entry is 1.
fn quotient_candidates(m: usize) -> impl Iterator<Item = Vec<Rational>> {
    let units = (0..m).map(move |i| {
        let mut e = vec![Rational::zero(); m];
        e[i] = Rational::one();
        e
    });
    let grid = GridCombinations::new(m).filter(|v| {
        let first = v.iter().find(|x| !x.is_zero()).expect("nonzero");
        first.is_one() && v.iter().filter(|x| !x.is_zero()).count() > 1
    });
    units.chain(grid)
}

/// Reduced row echelon basis, a canonical label for a subspace.
fn canonical_basis(vectors: &[Vec<Rational>], d: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let e = RationalMatrix::from_rows((), d, vectors.to_vec())
        .expect("length d")
        .eliminate();
    e.reduced()[..e.rank()]
        .iter()
        .zip(e.pivot_cols())
        .map(|(row, &c)| {
            let s = row[c].recip();
            row.iter().map(|x| x * &s).collect()
        })
        .collect()
}

/// Checks directly on the forms that `vectors` (ambient) span an integral
/// element at `p`: every generator and every `dω_i` vanish on them.
pub fn verify_integral_element(
    system: &PfaffianSystem,
    p: &[Rational],
    vectors: &[Vec<Rational>],
) -> Result<bool, IntegralError> {
    for g in system.generators() {
        for v in vectors {
            if !g.evaluate_on(p, std::slice::from_ref(v)).map_err(PfaffianError::from)?.is_zero() {
                return Ok(false);
            }
        }
        let dg = g.exterior_derivative();
        for a in 0..vectors.len() {
            for b in a + 1..vectors.len() {
                let val = dg
                    .evaluate_on(p, &[vectors[a].clone(), vectors[b].clone()])
                    .map_err(PfaffianError::from)?;
                if !val.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(rank_of_vectors(vectors, system.nvars()) == vectors.len())
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaximalSearch {
    Found(MaxIntegral),
    Refused { dim: usize, limit: usize },
}

/// Chain-relative and maximal characters at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterReport {
    pub nvars: usize,
    pub rank: usize,
    pub sigma_dim: usize,
    pub seeds_used: usize,
    /// Chain vectors as ambient vectors, seeds first.
    pub chain: Vec<Vec<Rational>>,
    pub rho_chain: usize,
    pub character_chain: usize,
    /// `s_1, s_2, ..` along the chain.
    pub enlarged_characters: Vec<usize>,
    pub maximal: MaximalSearch,
}

pub fn character_report(
    system: &PfaffianSystem,
    p: &[Rational],
    seeds: &[Vec<Rational>],
    search_limit: usize,
) -> Result<CharacterReport, IntegralError> {
    let frame = point_frame(system, p)?;
    character_report_in(&frame, seeds, search_limit)
}

/// [`character_report`] on an existing frame; seeds are ambient vectors.
pub fn character_report_in(
    frame: &PointFrame,
    seeds: &[Vec<Rational>],
    search_limit: usize,
) -> Result<CharacterReport, IntegralError> {
    let mut chain = IntegralChain::new(frame);
    for s in seeds {
        let coords = frame.to_frame_coords(s)?;
        chain.extend(frame, Some(&coords))?;
    }
    chain.complete(frame);
    let maximal = match max_integral_dimension(frame, search_limit) {
        Ok(m) => MaximalSearch::Found(m),
        Err(IntegralError::SearchRefused { dim, limit }) => MaximalSearch::Refused { dim, limit },
        Err(e) => return Err(e),
    };
    let rho_chain = chain.dim();
    Ok(CharacterReport {
        nvars: frame.nvars(),
        rank: frame.rank(),
        sigma_dim: frame.dim(),
        seeds_used: seeds.len(),
        chain: chain.vectors().iter().map(|v| frame.to_ambient(v)).collect(),
        rho_chain,
        character_chain: frame.dim() - rho_chain,
        enlarged_characters: chain.polar_dims().to_vec(),
        maximal,
    })
}

impl CharacterReport {
    pub fn rho_max(&self) -> Option<usize> {
        match &self.maximal {
            MaximalSearch::Found(m) => Some(m.rho_max),
            MaximalSearch::Refused { .. } => None,
        }
    }

    pub fn character_min(&self) -> Option<usize> {
        self.rho_max().map(|r| self.sigma_dim - r)
    }

    /// `s_j` with `s_0 = dim Σ_p`.
    pub fn s(&self, j: usize) -> usize {
        if j == 0 {
            self.sigma_dim
        } else {
            self.enlarged_characters[j - 1]
        }
    }

    /// For chain character 2: whether `s_{ρ-1} ≤ 1`. `None` otherwise.
    pub fn singular_char2(&self) -> Option<bool> {
        if self.character_chain != 2 || self.rho_chain == 0 {
            return None;
        }
        Some(self.s(self.rho_chain - 1) <= 1)
    }

    /// `n - r = 2ρ` along the chain.
    pub fn systatic_indicator(&self) -> bool {
        self.sigma_dim == 2 * self.rho_chain
    }

    /// `s_1 - s_2 ≥ s_2 - s_3 ≥ ..` along the chain.
    pub fn polar_increments_monotone(&self) -> bool {
        let s = &self.enlarged_characters;
        let diffs: Vec<i64> = s.windows(2).map(|w| w[0] as i64 - w[1] as i64).collect();
        diffs.windows(2).all(|w| w[0] >= w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::rat;
    use crate::exactalg::Polynomial;
    use crate::exterior::DifferentialForm;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i - 1)
    }
    fn dx(n: usize, i: usize) -> DifferentialForm {
        DifferentialForm::dx(n, i - 1)
    }
    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    fn system_a() -> PfaffianSystem {
        PfaffianSystem::new(5, vec![&dx(5, 1) + &dx(5, 5).scale(&x(5, 4)), dx(5, 2), dx(5, 3)]).unwrap()
    }

    fn system_b() -> PfaffianSystem {
        let n = 6;
        PfaffianSystem::new(
            n,
            vec![
                &dx(n, 1) + &dx(n, 5).scale(&x(n, 4)),
                &dx(n, 2) + &dx(n, 6).scale(&x(n, 5)),
                dx(n, 3),
            ],
        )
        .unwrap()
    }

    fn system_c() -> PfaffianSystem {
        let n = 6;
        PfaffianSystem::new(
            n,
            vec![
                &dx(n, 1) + &dx(n, 5).scale(&x(n, 4)),
                &dx(n, 2) + &dx(n, 6).scale(&x(n, 5)),
                &dx(n, 3) + &dx(n, 4).scale(&x(n, 6)),
            ],
        )
        .unwrap()
    }

    fn integrable() -> PfaffianSystem {
        PfaffianSystem::new(5, vec![dx(5, 2), dx(5, 3)]).unwrap()
    }

    #[test]
    fn frames() {
        let a = system_a();
        let f = point_frame(&a, &a.origin()).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.basis(), &[v(&[0, 0, 0, 1, 0]), v(&[0, 0, 0, 0, 1])]);
        assert_eq!(f.skew_forms()[0], vec![v(&[0, 1]), v(&[-1, 0])]);
        assert!(f.skew_forms()[1].iter().flatten().all(Zero::is_zero));
        let b = system_b();
        assert_eq!(point_frame(&b, &b.origin()).unwrap().dim(), 3);
        let i = integrable();
        let fi = point_frame(&i, &i.origin()).unwrap();
        assert_eq!(fi.dim(), 3);
        assert!(fi.skew_forms().iter().flatten().flatten().all(Zero::is_zero));
    }

    #[test]
    fn frame_away_from_origin_uses_tilted_basis() {
        let a = system_a();
        let p = v(&[0, 0, 0, 3, 0]);
        let f = point_frame(&a, &p).unwrap();
        // e5 - x4 e1 at x4 = 3
        assert!(f.to_frame_coords(&v(&[-3, 0, 0, 0, 1])).is_ok());
        assert!(matches!(
            f.to_frame_coords(&v(&[0, 0, 0, 0, 1])),
            Err(IntegralError::OutsideAnnihilator(_))
        ));
    }

    #[test]
    fn involution() {
        let a = system_a();
        let f = point_frame(&a, &a.origin()).unwrap();
        assert!(!f.is_in_involution(&v(&[1, 0]), &v(&[0, 1])).unwrap());
        assert!(f.is_in_involution(&v(&[1, 2]), &v(&[1, 2])).unwrap());
        let b = system_b();
        let fb = point_frame(&b, &b.origin()).unwrap();
        assert!(fb
            .is_in_involution_ambient(&v(&[0, 0, 0, 1, 0, 0]), &v(&[0, 0, 0, 0, 0, 1]))
            .unwrap());
    }

    #[test]
    fn polar_spaces() {
        let a = system_a();
        let f = point_frame(&a, &a.origin()).unwrap();
        assert_eq!(f.polar_space(&[v(&[1, 0])]).unwrap(), vec![v(&[1, 0])]);
        assert!(matches!(
            f.polar_space(&[v(&[1, 0]), v(&[0, 1])]),
            Err(IntegralError::NotIntegral { a: 0, b: 1, form: 0 })
        ));
        let b = system_b();
        let fb = point_frame(&b, &b.origin()).unwrap();
        let seed = fb.to_frame_coords(&v(&[0, 0, 0, 0, 1, 0])).unwrap();
        let polar = fb.polar_space(std::slice::from_ref(&seed)).unwrap();
        assert_eq!(polar.len(), 1);
        assert_eq!(rank_of_vectors(&[polar[0].clone(), seed], 3), 1);
        let i = integrable();
        let fi = point_frame(&i, &i.origin()).unwrap();
        assert_eq!(fi.polar_space(&[v(&[1, 1, 0])]).unwrap().len(), 3);
    }

    #[test]
    fn chains() {
        let a = system_a();
        let f = point_frame(&a, &a.origin()).unwrap();
        let mut chain = IntegralChain::new(&f);
        chain.extend(&f, Some(&v(&[1, 0]))).unwrap();
        assert_eq!(chain.extend(&f, None).unwrap(), Extension::Exhausted);
        assert_eq!(f.dim() - chain.dim(), 1);

        let b = system_b();
        let fb = point_frame(&b, &b.origin()).unwrap();
        let r = character_report_in(&fb, &[v(&[0, 0, 0, 0, 1, 0])], DEFAULT_SEARCH_LIMIT).unwrap();
        assert_eq!((r.rho_chain, r.character_chain), (1, 2));
        let r = character_report_in(
            &fb,
            &[v(&[0, 0, 0, 1, 0, 0]), v(&[0, 0, 0, 0, 0, 1])],
            DEFAULT_SEARCH_LIMIT,
        )
        .unwrap();
        assert_eq!(r.rho_chain, 2);
        let mut chain = IntegralChain::new(&fb);
        chain.extend(&fb, Some(&v(&[1, 0, 0]))).unwrap();
        assert_eq!(chain.extend(&fb, Some(&v(&[2, 0, 0]))), Err(IntegralError::InSpan));
        assert_eq!(chain.extend(&fb, Some(&v(&[0, 1, 0]))), Err(IntegralError::NotInPolar));
    }

    #[test]
    fn maximal_dimension() {
        let a = system_a();
        let m = max_integral_dimension(&point_frame(&a, &a.origin()).unwrap(), 8).unwrap();
        assert_eq!((m.rho_max, m.certified), (1, true));
        let i = integrable();
        let m = max_integral_dimension(&point_frame(&i, &i.origin()).unwrap(), 8).unwrap();
        assert_eq!(m.rho_max, 3);
        let c = system_c();
        let fc = point_frame(&c, &c.origin()).unwrap();
        let m = max_integral_dimension(&fc, 8).unwrap();
        assert_eq!(m.rho_max, 1);
        let ambient: Vec<_> = m.witness.iter().map(|w| fc.to_ambient(w)).collect();
        assert!(verify_integral_element(&c, &c.origin(), &ambient).unwrap());
        assert!(matches!(
            max_integral_dimension(&fc, 2),
            Err(IntegralError::SearchRefused { dim: 3, limit: 2 })
        ));
        let b = system_b();
        let m = max_integral_dimension(&point_frame(&b, &b.origin()).unwrap(), 8).unwrap();
        assert_eq!((m.rho_max, m.certified), (2, true));
    }

    #[test]
    fn characteristic_elements_and_conjugacy() {
        let a = system_a();
        let f = point_frame(&a, &a.origin()).unwrap();
        let sigma = vec![v(&[1, 0]), v(&[0, 1])];
        assert!(f.characteristic_element_of(&sigma).unwrap().is_empty());
        assert_eq!(f.characteristic_element_of(&[v(&[1, 1])]).unwrap(), vec![v(&[1, 1])]);
        assert!(!f.are_conjugate(&[v(&[1, 0])], &[v(&[0, 1])]).unwrap());
        assert!(f.are_conjugate(&[v(&[1, 0])], &[v(&[1, 0])]).unwrap());
        let i = integrable();
        let fi = point_frame(&i, &i.origin()).unwrap();
        let all = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        assert_eq!(fi.characteristic_element_of(&all).unwrap().len(), 3);
    }

    #[test]
    fn predicates() {
        let b = system_b();
        let r = character_report(&b, &b.origin(), &[v(&[0, 0, 0, 0, 1, 0])], 8).unwrap();
        assert_eq!(r.singular_char2(), Some(false));
        assert!(!r.systatic_indicator());
        let i = integrable();
        let r = character_report(&i, &i.origin(), &[], 8).unwrap();
        assert_eq!((r.rho_chain, r.rho_max(), r.character_chain), (3, Some(3), 0));
        assert_eq!(r.singular_char2(), None);
        assert!(!r.systatic_indicator());
    }
}
