//! Restrictions to coordinate slices, coordinate-adapted quotients and a
//! numeric tracer for 1-dimensional integral curves.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::exactalg::linalg::{coordinates_in, rank_of_vectors};
use crate::exactalg::rational::{from_f64, to_f64};
use crate::exactalg::{Rational, RationalMatrix};
use crate::exterior::DifferentialForm;
use crate::pfaffian::{PfaffianError, PfaffianSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error("coordinate index {index} outside a {nvars}-chart")]
    CoordinateOutOfRange { index: usize, nvars: usize },
    #[error("cannot drop {coordinate}: generator {generator} involves it")]
    InvolvesDropped { generator: String, coordinate: String },
    #[error("direction index {index} out of range: annihilator has dimension {dim}")]
    DirectionIndex { index: usize, dim: usize },
    #[error("direction is not annihilated by the system at the start point")]
    DirectionOutsideKernel,
    #[error("annihilator is zero at the start point")]
    NoKernel,
    #[error("step must be positive and finite")]
    BadStep,
    #[error("kernel field degenerates at step {step}")]
    FieldDegenerate { step: usize },
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
}

/// Constant values for some coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSpec {
    assignments: BTreeMap<usize, Rational>,
}

impl SliceSpec {
    pub fn new(nvars: usize, assignments: BTreeMap<usize, Rational>) -> Result<Self, ReductionError> {
        if let Some(&index) = assignments.keys().find(|&&i| i >= nvars) {
            return Err(ReductionError::CoordinateOutOfRange { index, nvars });
        }
        Ok(SliceSpec { assignments })
    }

    pub fn assignments(&self) -> &BTreeMap<usize, Rational> {
        &self.assignments
    }

    /// Coordinates left free by the slice.
    pub fn residual_coordinates(&self, nvars: usize) -> Vec<usize> {
        (0..nvars).filter(|i| !self.assignments.contains_key(i)).collect()
    }

    /// Embeds a point of the residual chart into the full chart.
    pub fn embed_point(&self, nvars: usize, residual: &[Rational]) -> Vec<Rational> {
        let mut it = residual.iter();
        (0..nvars)
            .map(|i| match self.assignments.get(&i) {
                Some(c) => c.clone(),
                None => it.next().expect("residual point has the right length").clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub system: PfaffianSystem,
    pub notices: Vec<String>,
}

pub fn restrict_to_slice(system: &PfaffianSystem, slice: &SliceSpec) -> Restriction {
    let n = system.nvars();
    let kept = slice.residual_coordinates(n);
    let coordinates: Vec<String> = kept.iter().map(|&i| system.coordinates()[i].clone()).collect();
    let mut notices = Vec::new();
    let mut labels = Vec::new();
    let mut generators: Vec<DifferentialForm> = Vec::new();
    for (g, label) in system.generators().iter().zip(system.labels()) {
        let restricted = g.restrict(slice.assignments());
        if restricted.is_zero() {
            notices.push(format!("generator {label} restricts to zero and is dropped"));
            continue;
        }
        let mut trial = generators.clone();
        trial.push(restricted.clone());
        let mut trial_labels = labels.clone();
        trial_labels.push(label.clone());
        if PfaffianSystem::with_names(coordinates.clone(), trial_labels, trial).is_ok() {
            generators.push(restricted);
            labels.push(label.clone());
        } else {
            notices.push(format!(
                "generator {label} becomes dependent on the previous ones and is dropped"
            ));
        }
    }
    if generators.is_empty() {
        notices.push("restricted system is empty".to_string());
    }
    let system = PfaffianSystem::with_names(coordinates, labels, generators)
        .expect("kept generators are independent");
    Restriction { system, notices }
}

/// Re-reads the system on the chart of the `kept` coordinates.
pub fn drop_coordinates(system: &PfaffianSystem, kept: &[usize]) -> Result<PfaffianSystem, ReductionError> {
    let n = system.nvars();
    if let Some(&index) = kept.iter().find(|&&i| i >= n) {
        return Err(ReductionError::CoordinateOutOfRange { index, nvars: n });
    }
    let mut kept = kept.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let mut generators = Vec::new();
    for (g, label) in system.generators().iter().zip(system.labels()) {
        match g.reindex(&kept) {
            Ok(f) => generators.push(f),
            Err(c) => {
                return Err(ReductionError::InvolvesDropped {
                    generator: label.clone(),
                    coordinate: system.coordinates()[c].clone(),
                })
            }
        }
    }
    let coordinates = kept.iter().map(|&i| system.coordinates()[i].clone()).collect();
    Ok(PfaffianSystem::with_names(coordinates, system.labels().to_vec(), generators)
        .expect("same coefficient matrix up to zero columns"))
}

/// Places the system on a larger chart; coordinate `i` goes to
/// `positions[i]` and `coordinates` names the new chart.
pub fn extend_to_chart(
    system: &PfaffianSystem,
    coordinates: Vec<String>,
    positions: &[usize],
) -> PfaffianSystem {
    let n = coordinates.len();
    let generators = system
        .generators()
        .iter()
        .map(|g| g.embed(n, positions))
        .collect();
    PfaffianSystem::with_names(coordinates, system.labels().to_vec(), generators)
        .expect("embedding keeps independence")
}

/// Which kernel vector to follow from the start point.
#[derive(Clone, Debug, PartialEq)]
pub enum Direction {
    /// Index into the annihilator basis at the start point.
    Basis(usize),
    /// Explicit ambient vector, which must be annihilated at the start.
    Vector(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracedCurve {
    pub samples: Vec<Vec<f64>>,
    pub step: f64,
    /// `|ω_i(x_k)(γ'(t_k))|` per sample and generator.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
}

impl TracedCurve {
    pub fn to_csv(&self, coordinates: &[String], labels: &[String]) -> String {
        let mut out = String::new();
        let header: Vec<String> = coordinates
            .iter()
            .cloned()
            .chain(labels.iter().map(|l| format!("res_{l}")))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (x, r) in self.samples.iter().zip(&self.residuals) {
            let row: Vec<String> = x.iter().chain(r).map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Kernel field with fixed free columns: at `x` it is the kernel vector
/// whose free entries equal `weights`.
struct KernelField<'a> {
    system: &'a PfaffianSystem,
    pivots: Vec<usize>,
    free: Vec<usize>,
    weights: Vec<Rational>,
}

impl KernelField<'_> {
    fn at(&self, x: &[f64]) -> Option<Vec<f64>> {
        let p: Vec<Rational> = x.iter().map(|&v| from_f64(v)).collect::<Option<_>>()?;
        let m = self.system.coefficient_matrix_at(&p).ok()?;
        let r = self.pivots.len();
        // M_P v_P = -M_F w
        let mut aug: Vec<Vec<Rational>> = m
            .iter()
            .map(|row| {
                let mut a: Vec<Rational> = self.pivots.iter().map(|&c| row[c].clone()).collect();
                let rhs: Rational = self
                    .free
                    .iter()
                    .zip(&self.weights)
                    .map(|(&c, w)| &row[c] * w)
                    .sum();
                a.push(-rhs);
                a
            })
            .collect();
        let sol = solve(&mut aug, r)?;
        let mut v = vec![0.0; x.len()];
        for (&c, s) in self.pivots.iter().zip(&sol) {
            v[c] = to_f64(s);
        }
        for (&c, w) in self.free.iter().zip(&self.weights) {
            v[c] = to_f64(w);
        }
        Some(v)
    }
}

/// Gaussian elimination on an `r × (r+1)` augmented matrix.
fn solve(aug: &mut [Vec<Rational>], r: usize) -> Option<Vec<Rational>> {
    for col in 0..r {
        let p = (col..r).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(p, col);
        let piv = aug[col][col].clone();
        for i in 0..r {
            if i == col || aug[i][col].is_zero() {
                continue;
            }
            let f = &aug[i][col] / &piv;
            for j in col..=r {
                let t = &f * &aug[col][j];
                aug[i][j] -= t;
            }
        }
    }
    Some((0..r).map(|i| &aug[i][r] / &aug[i][i]).collect())
}

/// Classical fourth-order integration of a kernel field from `p0`.
pub fn trace_integral_curve(
    system: &PfaffianSystem,
    p0: &[Rational],
    direction: &Direction,
    step: f64,
    count: usize,
) -> Result<TracedCurve, ReductionError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(ReductionError::BadStep);
    }
    let basis = system.annihilator_at(p0)?;
    if basis.is_empty() {
        return Err(ReductionError::NoKernel);
    }
    let n = system.nvars();
    let rows = system.coefficient_matrix_at(p0)?;
    let echelon = if rows.is_empty() {
        None
    } else {
        Some(RationalMatrix::from_rows((), n, rows.clone()).expect("n columns").eliminate())
    };
    let pivots: Vec<usize> = echelon.as_ref().map_or(Vec::new(), |e| e.pivot_cols().to_vec());
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let weights: Vec<Rational> = match direction {
        Direction::Basis(i) => {
            if *i >= basis.len() {
                return Err(ReductionError::DirectionIndex {
                    index: *i,
                    dim: basis.len(),
                });
            }
            free.iter().map(|&c| basis[*i][c].clone()).collect()
        }
        Direction::Vector(v) => {
            if v.len() != n || coordinates_in(&basis, v).is_none() || rank_of_vectors(std::slice::from_ref(v), n) == 0 {
                return Err(ReductionError::DirectionOutsideKernel);
            }
            free.iter().map(|&c| v[c].clone()).collect()
        }
    };
    let field = KernelField {
        system,
        pivots,
        free,
        weights,
    };
    let mut x: Vec<f64> = p0.iter().map(to_f64).collect();
    let mut samples = vec![x.clone()];
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    for s in 0..count {
        let degenerate = || ReductionError::FieldDegenerate { step: s };
        let k1 = field.at(&x).ok_or_else(degenerate)?;
        let k2 = field.at(&axpy(&x, &k1, step / 2.0)).ok_or_else(degenerate)?;
        let k3 = field.at(&axpy(&x, &k2, step / 2.0)).ok_or_else(degenerate)?;
        let k4 = field.at(&axpy(&x, &k3, step)).ok_or_else(degenerate)?;
        x = (0..n)
            .map(|i| x[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        samples.push(x.clone());
    }
    let residuals = residuals(system, &samples, step);
    let max_residual = residuals.iter().flatten().fold(0.0f64, |m, &r| m.max(r));
    Ok(TracedCurve {
        samples,
        step,
        residuals,
        max_residual,
    })
}

/// `|ω_i(x_k)(t_k)|` with the finite-difference tangent `t_k`.
fn residuals(system: &PfaffianSystem, samples: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    let n = system.nvars();
    let m = samples.len();
    let tangent = |k: usize| -> Vec<f64> {
        if m < 2 {
            return vec![0.0; n];
        }
        (0..n)
            .map(|i| {
                if m == 2 {
                    (samples[1][i] - samples[0][i]) / step
                } else if k == 0 {
                    (-3.0 * samples[0][i] + 4.0 * samples[1][i] - samples[2][i]) / (2.0 * step)
                } else if k == m - 1 {
                    (3.0 * samples[k][i] - 4.0 * samples[k - 1][i] + samples[k - 2][i]) / (2.0 * step)
                } else {
                    (samples[k + 1][i] - samples[k - 1][i]) / (2.0 * step)
                }
            })
            .collect()
    };
    (0..m)
        .map(|k| {
            let p: Vec<Rational> = samples[k].iter().map(|&v| from_f64(v).unwrap_or_default()).collect();
            let t: Vec<Rational> = tangent(k).iter().map(|&v| from_f64(v).unwrap_or_default()).collect();
            system
                .generators()
                .iter()
                .map(|g| {
                    g.evaluate_on(&p, std::slice::from_ref(&t))
                        .map(|v| to_f64(&v).abs())
                        .unwrap_or(f64::NAN)
                })
                .collect()
        })
        .collect()
}
