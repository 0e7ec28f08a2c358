//! Pfaffian systems and their pointwise and generic invariants.

use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactalg::linalg::{independent_subset, rank_of_vectors};
use crate::exactalg::poly::default_names;
use crate::exactalg::{AlgebraError, PolyMatrix, Polynomial, Rational, RationalMatrix};
use crate::exterior::{DifferentialForm, FormError, MultiIndex, TangentVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PfaffianError {
    #[error("generator {label} has degree {degree}, expected a 1-form")]
    NotOneForm { label: String, degree: usize },
    #[error("generator {label} lives on a {found}-chart, expected {expected}")]
    ChartMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("generators are dependent: generic rank {rank} < {count}")]
    GenericallyDependent { rank: usize, count: usize },
    #[error("point has {found} coordinates, chart has {expected}")]
    PointLength { expected: usize, found: usize },
    #[error("degenerate point ({}): generators dependent; vanishing pivots: {}", join(.point), .vanishing.join(", "))]
    Degenerate {
        point: Vec<Rational>,
        vanishing: Vec<String>,
    },
    #[error("Darboux class undefined: the form vanishes at the point")]
    UndefinedClass,
    #[error("gender needs a form of positive degree")]
    GenderOfFunction,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn coefficient_rows(generators: &[DifferentialForm]) -> Vec<Vec<Polynomial>> {
    generators.iter().map(DifferentialForm::one_form_coefficients).collect()
}

pub(crate) fn join(point: &[Rational]) -> String {
    point.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
}

/// `r` 1-forms on an `n`-chart, generically independent.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianSystem {
    nvars: usize,
    coordinates: Vec<String>,
    labels: Vec<String>,
    generators: Vec<DifferentialForm>,
    /// Computed on first use: elimination over polynomials can be slow.
    pivots: OnceLock<Vec<Polynomial>>,
    top: DifferentialForm,
}

impl PfaffianSystem {
    /// System with default coordinate names `x1..xn` and labels `w1..wr`.
    pub fn new(nvars: usize, generators: Vec<DifferentialForm>) -> Result<Self, PfaffianError> {
        let labels = (1..=generators.len()).map(|i| format!("w{i}")).collect();
        Self::with_names(default_names(nvars), labels, generators)
    }

    pub fn with_names(
        coordinates: Vec<String>,
        labels: Vec<String>,
        generators: Vec<DifferentialForm>,
    ) -> Result<Self, PfaffianError> {
        let nvars = coordinates.len();
        assert_eq!(labels.len(), generators.len(), "one label per generator");
        for (g, label) in generators.iter().zip(&labels) {
            if g.nvars() != nvars {
                return Err(PfaffianError::ChartMismatch {
                    label: label.clone(),
                    expected: nvars,
                    found: g.nvars(),
                });
            }
            if g.degree() != 1 {
                return Err(PfaffianError::NotOneForm {
                    label: label.clone(),
                    degree: g.degree(),
                });
            }
        }
        let mut top = DifferentialForm::function(Polynomial::one(nvars));
        for g in &generators {
            top = top.wedge(g)?;
        }
        if top.is_zero() {
            let rank = PolyMatrix::from_rows(nvars, nvars, coefficient_rows(&generators))?.rank();
            return Err(PfaffianError::GenericallyDependent {
                rank,
                count: generators.len(),
            });
        }
        Ok(PfaffianSystem {
            nvars,
            coordinates,
            labels,
            generators,
            pivots: OnceLock::new(),
            top,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of generators, equal to the generic rank.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[DifferentialForm] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    /// Pivots of fraction-free elimination of the coefficient matrix; the
    /// rank can only drop where one of them vanishes.
    pub fn generic_pivots(&self) -> &[Polynomial] {
        self.pivots.get_or_init(|| {
            PolyMatrix::from_rows(self.nvars, self.nvars, coefficient_rows(&self.generators))
                .expect("rows have chart length")
                .eliminate()
                .pivots()
                .to_vec()
        })
    }

    /// `ω1 ∧ .. ∧ ωr` (the constant 1 for the empty system).
    pub fn top_form(&self) -> &DifferentialForm {
        &self.top
    }

    pub fn render(&self, form: &DifferentialForm) -> String {
        form.to_text(&self.coordinates)
    }

    pub fn origin(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.nvars]
    }

    pub fn coefficient_matrix_at(&self, p: &[Rational]) -> Result<Vec<Vec<Rational>>, PfaffianError> {
        self.check_length(p)?;
        let mut rows = Vec::with_capacity(self.rank());
        for g in &self.generators {
            let mut row = Vec::with_capacity(self.nvars);
            for c in g.one_form_coefficients() {
                row.push(c.evaluate(p)?);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    fn check_length(&self, p: &[Rational]) -> Result<(), PfaffianError> {
        if p.len() != self.nvars {
            return Err(PfaffianError::PointLength {
                expected: self.nvars,
                found: p.len(),
            });
        }
        Ok(())
    }

    /// Fails with a diagnostic when the generators are dependent at `p`.
    pub fn check_point(&self, p: &[Rational]) -> Result<(), PfaffianError> {
        let rows = self.coefficient_matrix_at(p)?;
        if rank_of_vectors(&rows, self.nvars) == self.rank() {
            return Ok(());
        }
        let vanishing = self
            .generic_pivots()
            .iter()
            .filter(|q| q.evaluate(p).map(|v| v.is_zero()).unwrap_or(false))
            .map(|q| q.to_text(&self.coordinates))
            .collect();
        Err(PfaffianError::Degenerate {
            point: p.to_vec(),
            vanishing,
        })
    }

    /// Basis of the annihilator `Σ_p` as ambient vectors.
    pub fn annihilator_at(&self, p: &[Rational]) -> Result<Vec<Vec<Rational>>, PfaffianError> {
        self.check_point(p)?;
        let rows = self.coefficient_matrix_at(p)?;
        Ok(RationalMatrix::from_rows((), self.nvars, rows)?.nullspace())
    }

    /// `Ω ≡ 0 mod P`, tested as `ω1 ∧ .. ∧ ωr ∧ Ω = 0` identically or at a point.
    pub fn congruent_zero_mod(
        &self,
        omega: &DifferentialForm,
        at: Option<&[Rational]>,
    ) -> Result<bool, PfaffianError> {
        let w = self.top.wedge(omega)?;
        match at {
            None => Ok(w.is_zero()),
            Some(p) => {
                self.check_point(p)?;
                Ok(w.is_zero_at(p)?)
            }
        }
    }

    /// Whether the 1-form `eta` lies in the span of the generators over the
    /// rational functions.
    pub fn contains(&self, eta: &DifferentialForm) -> Result<bool, PfaffianError> {
        Ok(self.top.wedge(eta)?.is_zero())
    }

    pub fn is_frobenius_integrable(&self) -> bool {
        self.generators.iter().all(|g| {
            self.top
                .wedge(&g.exterior_derivative())
                .expect("same chart")
                .is_zero()
        })
    }

    /// Generic derived system: all `Σ λ_i ω_i` with `Σ λ_i dω_i ≡ 0 mod P`.
    pub fn derived_system(&self) -> PfaffianSystem {
        let r = self.rank();
        let columns: Vec<DifferentialForm> = self
            .generators
            .iter()
            .map(|g| g.exterior_derivative().wedge(&self.top).expect("same chart"))
            .collect();
        let mut row_keys: Vec<MultiIndex> = columns
            .iter()
            .flat_map(|c| c.terms().map(|(i, _)| i.clone()))
            .collect();
        row_keys.sort();
        row_keys.dedup();
        let rows: Vec<Vec<Polynomial>> = row_keys
            .iter()
            .map(|k| columns.iter().map(|c| c.coefficient(k.indices())).collect())
            .collect();
        let kernel = if rows.is_empty() {
            (0..r)
                .map(|k| {
                    (0..r)
                        .map(|j| {
                            if j == k {
                                Polynomial::one(self.nvars)
                            } else {
                                Polynomial::zero(self.nvars)
                            }
                        })
                        .collect()
                })
                .collect()
        } else {
            PolyMatrix::from_rows(self.nvars, r, rows)
                .expect("rows have r entries")
                .nullspace()
        };
        let mut generators = Vec::with_capacity(kernel.len());
        let mut labels = Vec::with_capacity(kernel.len());
        for lambda in &kernel {
            let mut eta = DifferentialForm::zero(self.nvars, 1);
            for (l, g) in lambda.iter().zip(&self.generators) {
                eta = &eta + &g.scale(l);
            }
            generators.push(eta);
            labels.push(self.combination_label(lambda));
        }
        PfaffianSystem::with_names(self.coordinates.clone(), labels, generators)
            .expect("kernel vectors are independent")
    }

    fn combination_label(&self, lambda: &[Polynomial]) -> String {
        let nonzero: Vec<usize> = (0..lambda.len()).filter(|&k| !lambda[k].is_zero()).collect();
        if nonzero.len() == 1 && lambda[nonzero[0]].constant_value() == Some(Rational::from_integer(1.into())) {
            return self.labels[nonzero[0]].clone();
        }
        let mut out = String::new();
        for (j, &k) in nonzero.iter().enumerate() {
            let c = &lambda[k];
            let ct = c.to_text(&self.coordinates);
            let term = if c.num_terms() > 1 {
                format!("({ct})*{}", self.labels[k])
            } else if ct == "1" {
                self.labels[k].clone()
            } else if ct == "-1" {
                format!("-{}", self.labels[k])
            } else {
                format!("{ct}*{}", self.labels[k])
            };
            if j == 0 {
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

    pub fn derived_flag(&self) -> DerivedFlag {
        let mut systems = vec![self.clone()];
        loop {
            let last = systems.last().expect("nonempty");
            let next = last.derived_system();
            if next.rank() == last.rank() {
                break;
            }
            systems.push(next);
        }
        DerivedFlag { systems }
    }

    pub fn flag_classification(&self) -> FlagClassification {
        self.derived_flag().classification()
    }

    pub fn is_flag_system(&self) -> bool {
        self.flag_classification().flag_system
    }

    pub fn characteristic_data_at(&self, p: &[Rational]) -> Result<CharacteristicData, PfaffianError> {
        let sigma = self.annihilator_at(p)?;
        let n = self.nvars;
        let dforms: Vec<DifferentialForm> = self
            .generators
            .iter()
            .map(|g| g.exterior_derivative().evaluate_at(p))
            .collect::<Result<_, _>>()?;
        let mut covectors = self.coefficient_matrix_at(p)?;
        for v in &sigma {
            let tv = TangentVector::from_rationals(n, v);
            for d in &dforms {
                let c = d.interior_product(&tv)?;
                covectors.push(constant_row(&c));
            }
        }
        let covectors = independent_subset(&covectors, n);
        let skew = skew_matrices(&dforms, &sigma, p)?;
        let char_coords = common_kernel(&skew, sigma.len());
        let characteristic_space: Vec<Vec<Rational>> =
            char_coords.iter().map(|c| combine(&sigma, c, n)).collect();
        assert_eq!(
            covectors.len() + characteristic_space.len(),
            n,
            "characteristic covectors and vectors must be complementary"
        );
        for c in &covectors {
            for v in &characteristic_space {
                assert!(
                    c.iter().zip(v).map(|(a, b)| a * b).sum::<Rational>().is_zero(),
                    "characteristic vector not annihilated"
                );
            }
        }
        Ok(CharacteristicData {
            base_point: p.to_vec(),
            covector_rank: covectors.len(),
            covectors,
            characteristic_space,
        })
    }

    /// Smallest `h` with `Ω^{h+1} = 0` at `p`, modulo the system or
    /// absolutely.
    pub fn gender_of_form_at(
        &self,
        omega: &DifferentialForm,
        p: &[Rational],
        mod_system: bool,
    ) -> Result<usize, PfaffianError> {
        if omega.degree() == 0 {
            return Err(PfaffianError::GenderOfFunction);
        }
        self.check_point(p)?;
        let omega_p = omega.evaluate_at(p)?;
        let top_p = self.top.evaluate_at(p)?;
        let mut power = omega_p.clone();
        let mut h = 0;
        loop {
            let test = if mod_system {
                top_p.wedge(&power)?
            } else {
                power.clone()
            };
            if test.is_zero() {
                return Ok(h);
            }
            power = power.wedge(&omega_p)?;
            h += 1;
        }
    }

    /// Largest gender over the `dω` of the given generators.
    pub fn system_gender_at(&self, p: &[Rational], mod_system: bool) -> Result<usize, PfaffianError> {
        self.check_point(p)?;
        let mut h = 0;
        for g in &self.generators {
            h = h.max(self.gender_of_form_at(&g.exterior_derivative(), p, mod_system)?);
        }
        Ok(h)
    }

    /// Largest gender over the generators and `samples` random sections
    /// `Σ a_i ω_i` with affine coefficients `a_i`; reproducible from `seed`.
    pub fn sampled_section_gender_at(
        &self,
        p: &[Rational],
        mod_system: bool,
        samples: usize,
        seed: u64,
    ) -> Result<usize, PfaffianError> {
        let mut h = self.system_gender_at(p, mod_system)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let mut section = DifferentialForm::zero(self.nvars, 1);
            for g in &self.generators {
                let mut a = Polynomial::constant(self.nvars, Rational::from_integer(rng.gen_range(-3i64..=3).into()));
                for j in 0..self.nvars {
                    let c = Rational::from_integer(rng.gen_range(-2i64..=2).into());
                    a = &a + &Polynomial::var(self.nvars, j).scale(&c);
                }
                section = &section + &g.scale(&a);
            }
            let d = section.exterior_derivative();
            if !d.is_zero() {
                h = h.max(self.gender_of_form_at(&d, p, mod_system)?);
            }
        }
        Ok(h)
    }
}

impl fmt::Display for PfaffianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| self.render(g)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Row vector of a 1-form with constant coefficients.
pub(crate) fn constant_row(form: &DifferentialForm) -> Vec<Rational> {
    form.one_form_coefficients()
        .iter()
        .map(|c| c.constant_value().expect("constant coefficients"))
        .collect()
}

/// `Σ c_k basis_k`.
pub(crate) fn combine(basis: &[Vec<Rational>], coords: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (b, c) in basis.iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Matrices `B_i[a][b] = dω_i(p)(v_a, v_b)` on the given basis.
pub(crate) fn skew_matrices(
    dforms: &[DifferentialForm],
    basis: &[Vec<Rational>],
    p: &[Rational],
) -> Result<Vec<Vec<Vec<Rational>>>, PfaffianError> {
    let d = basis.len();
    let mut out = Vec::with_capacity(dforms.len());
    for form in dforms {
        let mut m = vec![vec![Rational::zero(); d]; d];
        for a in 0..d {
            for b in a + 1..d {
                let v = form.evaluate_on(p, &[basis[a].clone(), basis[b].clone()])?;
                m[b][a] = -v.clone();
                m[a][b] = v;
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Vectors `x` of length `d` with `B x = 0` for every `B`.
pub(crate) fn common_kernel(skew: &[Vec<Vec<Rational>>], d: usize) -> Vec<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> = skew.iter().flat_map(|m| m.iter().cloned()).collect();
    if rows.is_empty() {
        return RationalMatrix::identity((), d).row_vectors().to_vec();
    }
    RationalMatrix::from_rows((), d, rows)
        .expect("square blocks")
        .nullspace()
}

/// `P = P0 ⊃ P1 ⊃ .. ⊃ Pμ`, stopped at the first repeat.
#[derive(Clone, Debug)]
pub struct DerivedFlag {
    systems: Vec<PfaffianSystem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagClassification {
    pub flag_system: bool,
    /// The system is integrable, so the flag has length zero.
    pub trivial: bool,
}

impl DerivedFlag {
    pub fn systems(&self) -> &[PfaffianSystem] {
        &self.systems
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.systems.iter().map(PfaffianSystem::rank).collect()
    }

    pub fn terminal(&self) -> &PfaffianSystem {
        self.systems.last().expect("nonempty")
    }

    /// First derived system (the system itself when integrable).
    pub fn first_derived(&self) -> &PfaffianSystem {
        self.systems.get(1).unwrap_or(&self.systems[0])
    }

    pub fn classification(&self) -> FlagClassification {
        let ranks = self.ranks();
        FlagClassification {
            flag_system: ranks.windows(2).all(|w| w[0] == w[1] + 1),
            trivial: ranks.len() == 1,
        }
    }
}

/// Characteristic system at a point: covectors spanning `CH_p` and the
/// characteristic vectors they annihilate.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicData {
    pub base_point: Vec<Rational>,
    pub covector_rank: usize,
    pub covectors: Vec<Vec<Rational>>,
    pub characteristic_space: Vec<Vec<Rational>>,
}

impl CharacteristicData {
    pub fn null_characteristics(&self) -> bool {
        self.characteristic_space.is_empty()
    }
}

/// Darboux class of a 1-form at `p`.
pub fn darboux_class_at(omega: &DifferentialForm, p: &[Rational]) -> Result<usize, PfaffianError> {
    if omega.degree() != 1 {
        return Err(PfaffianError::NotOneForm {
            label: omega.to_string(),
            degree: omega.degree(),
        });
    }
    if p.len() != omega.nvars() {
        return Err(PfaffianError::PointLength {
            expected: omega.nvars(),
            found: p.len(),
        });
    }
    let w = omega.evaluate_at(p)?;
    if w.is_zero() {
        return Err(PfaffianError::UndefinedClass);
    }
    let dw = omega.exterior_derivative().evaluate_at(p)?;
    let mut h = 0;
    let mut power = DifferentialForm::function(Polynomial::one(omega.nvars()));
    loop {
        let next = power.wedge(&dw)?;
        if next.is_zero() {
            break;
        }
        power = next;
        h += 1;
    }
    if w.wedge(&power)?.is_zero() {
        Ok(2 * h)
    } else {
        Ok(2 * h + 1)
    }
}
