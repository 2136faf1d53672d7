//! Discrete joint distributions `p(s, x)` over a secret `S` and data `X`.

use std::collections::HashSet;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Axis, Error, Result};
use crate::numerics::plogp_neg;

/// Default normalization tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The pinned generator behind every seeded experiment.
///
/// ChaCha8 has a documented, platform-independent output stream, so seeded
/// results are reproducible byte for byte.
pub type ExperimentRng = ChaCha8Rng;

/// Options for [`JointDistribution::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub tol: f64,
    /// Scale the matrix by `1 / sum` before the normalization check.
    pub renormalize: bool,
    /// Remove zero-mass rows and columns instead of rejecting them.
    pub drop_dead_symbols: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            renormalize: false,
            drop_dead_symbols: false,
        }
    }
}

/// A validated joint pmf `p(s, x)` with cached marginals.
///
/// Rows are indexed by `s`, columns by `x`. Zero cells are allowed as long as
/// every row and column keeps positive mass. The only exception is the output
/// of [`crate::watchdog::apply_mechanism`], whose `Y` alphabet mirrors `X` and may
/// contain outputs that are never produced; those columns have `p(y) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    s_labels: Vec<String>,
    x_labels: Vec<String>,
    pmf: Vec<f64>,
    p_s: Vec<f64>,
    p_x: Vec<f64>,
    tol: f64,
}

impl JointDistribution {
    /// Validates `raw` (one row per `s`) against the distribution invariants.
    pub fn validate(
        raw: &[Vec<f64>],
        s_labels: Vec<String>,
        x_labels: Vec<String>,
        opts: ValidateOptions,
    ) -> Result<Self> {
        if !(opts.tol >= 0.0 && opts.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be finite and >= 0, got {}",
                opts.tol
            )));
        }
        let num_s = raw.len();
        let num_x = raw.first().map_or(0, Vec::len);
        if num_s == 0 || num_x == 0 {
            return Err(Error::DimensionMismatch(
                "the joint matrix must have at least one row and one column".into(),
            ));
        }
        if let Some((i, row)) = raw.iter().enumerate().find(|(_, r)| r.len() != num_x) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {num_x}",
                row.len()
            )));
        }
        if s_labels.len() != num_s {
            return Err(Error::DimensionMismatch(format!(
                "{} S labels for {num_s} rows",
                s_labels.len()
            )));
        }
        if x_labels.len() != num_x {
            return Err(Error::DimensionMismatch(format!(
                "{} X labels for {num_x} columns",
                x_labels.len()
            )));
        }
        check_unique(&s_labels, Axis::S)?;
        check_unique(&x_labels, Axis::X)?;

        let mut pmf = Vec::with_capacity(num_s * num_x);
        for (i, row) in raw.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j, value: v });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j, value: v });
                }
                pmf.push(v);
            }
        }

        let sum: f64 = pmf.iter().sum();
        if opts.renormalize {
            if sum <= 0.0 {
                return Err(Error::NotNormalized { sum, tol: opts.tol });
            }
            pmf.iter_mut().for_each(|v| *v /= sum);
        } else if (sum - 1.0).abs() > opts.tol {
            return Err(Error::NotNormalized { sum, tol: opts.tol });
        }

        let joint = Self::from_parts(s_labels, x_labels, pmf, opts.tol);
        if opts.drop_dead_symbols {
            return Ok(joint.without_dead_symbols());
        }
        if let Some(i) = joint.p_s.iter().position(|&p| p <= 0.0) {
            return Err(Error::DeadSymbol {
                axis: Axis::S,
                label: joint.s_labels[i].clone(),
            });
        }
        if let Some(j) = joint.p_x.iter().position(|&p| p <= 0.0) {
            return Err(Error::DeadSymbol {
                axis: Axis::X,
                label: joint.x_labels[j].clone(),
            });
        }
        Ok(joint)
    }

    /// Validates `raw` with default labels `s1..`, `x1..` and default options.
    pub fn from_matrix(raw: &[Vec<f64>]) -> Result<Self> {
        let num_s = raw.len();
        let num_x = raw.first().map_or(0, Vec::len);
        Self::validate(
            raw,
            default_labels("s", num_s),
            default_labels("x", num_x),
            ValidateOptions::default(),
        )
    }

    /// Builds `p(s, x) = p(s) p(x|s)` from a prior and one conditional row per `s`.
    pub fn from_conditional(
        prior: &[f64],
        conditional: &[Vec<f64>],
        s_labels: Vec<String>,
        x_labels: Vec<String>,
    ) -> Result<Self> {
        if prior.len() != conditional.len() {
            return Err(Error::DimensionMismatch(format!(
                "prior has {} entries but there are {} conditional rows",
                prior.len(),
                conditional.len()
            )));
        }
        let raw: Vec<Vec<f64>> = prior
            .iter()
            .zip(conditional)
            .map(|(&ps, row)| row.iter().map(|&c| ps * c).collect())
            .collect();
        Self::validate(&raw, s_labels, x_labels, ValidateOptions::default())
    }

    /// Wraps an already-normalized matrix without the dead-symbol check.
    pub(crate) fn from_parts(
        s_labels: Vec<String>,
        x_labels: Vec<String>,
        pmf: Vec<f64>,
        tol: f64,
    ) -> Self {
        let num_s = s_labels.len();
        let num_x = x_labels.len();
        debug_assert_eq!(pmf.len(), num_s * num_x);
        let mut p_s = vec![0.0; num_s];
        let mut p_x = vec![0.0; num_x];
        for i in 0..num_s {
            for j in 0..num_x {
                let v = pmf[i * num_x + j];
                p_s[i] += v;
                p_x[j] += v;
            }
        }
        Self {
            s_labels,
            x_labels,
            pmf,
            p_s,
            p_x,
            tol,
        }
    }

    fn without_dead_symbols(self) -> Self {
        let keep_s: Vec<usize> = (0..self.num_s()).filter(|&i| self.p_s[i] > 0.0).collect();
        let keep_x: Vec<usize> = (0..self.num_x()).filter(|&j| self.p_x[j] > 0.0).collect();
        let pmf: Vec<f64> = keep_s
            .iter()
            .flat_map(|&i| keep_x.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        let sum: f64 = pmf.iter().sum();
        Self::from_parts(
            keep_s.iter().map(|&i| self.s_labels[i].clone()).collect(),
            keep_x.iter().map(|&j| self.x_labels[j].clone()).collect(),
            pmf.into_iter().map(|v| v / sum).collect(),
            self.tol,
        )
    }

    pub fn num_s(&self) -> usize {
        self.s_labels.len()
    }

    pub fn num_x(&self) -> usize {
        self.x_labels.len()
    }

    pub fn s_labels(&self) -> &[String] {
        &self.s_labels
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `p(s, x)`.
    #[inline]
    pub fn get(&self, s: usize, x: usize) -> f64 {
        self.pmf[s * self.num_x() + x]
    }

    /// The row `p(s, ·)`.
    pub fn row(&self, s: usize) -> &[f64] {
        let n = self.num_x();
        &self.pmf[s * n..(s + 1) * n]
    }

    /// Rows of the matrix as owned vectors.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.num_s()).map(|s| self.row(s).to_vec()).collect()
    }

    pub fn p_s(&self) -> &[f64] {
        &self.p_s
    }

    pub fn p_x(&self) -> &[f64] {
        &self.p_x
    }

    /// `(p(s), p(x))`.
    pub fn marginals(&self) -> (&[f64], &[f64]) {
        (&self.p_s, &self.p_x)
    }

    /// `p(x | s)`.
    pub fn x_given_s(&self, s: usize, x: usize) -> f64 {
        self.get(s, x) / self.p_s[s]
    }

    /// `p(s | x)`; zero for a zero-mass column.
    pub fn s_given_x(&self, s: usize, x: usize) -> f64 {
        if self.p_x[x] > 0.0 {
            self.get(s, x) / self.p_x[x]
        } else {
            0.0
        }
    }

    /// `H(X)` in nats.
    pub fn entropy_x(&self) -> f64 {
        self.p_x.iter().map(|&p| plogp_neg(p)).sum()
    }

    pub fn x_index(&self, label: &str) -> Option<usize> {
        self.x_labels.iter().position(|l| l == label)
    }

    /// Draws i.i.d. uniform(0, 1) cells and normalizes them to sum to 1.
    ///
    /// Cells are filled row by row from a [`ExperimentRng`] seeded with `seed`.
    pub fn random(num_s: usize, num_x: usize, seed: u64) -> Result<Self> {
        if num_s < 2 || num_x < 2 {
            return Err(Error::BadDimensions { num_s, num_x });
        }
        let mut rng = ExperimentRng::seed_from_u64(seed);
        let mut pmf: Vec<f64> = (0..num_s * num_x)
            .map(|_| rng.sample::<f64, _>(Open01))
            .collect();
        let sum: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|v| *v /= sum);
        Ok(Self::from_parts(
            default_labels("s", num_s),
            default_labels("x", num_x),
            pmf,
            DEFAULT_TOL,
        ))
    }
}

/// Free-function form of [`JointDistribution::validate`].
pub fn validate_joint(
    raw: &[Vec<f64>],
    s_labels: Vec<String>,
    x_labels: Vec<String>,
    opts: ValidateOptions,
) -> Result<JointDistribution> {
    JointDistribution::validate(raw, s_labels, x_labels, opts)
}

pub fn marginals(joint: &JointDistribution) -> (Vec<f64>, Vec<f64>) {
    (joint.p_s().to_vec(), joint.p_x().to_vec())
}

pub fn entropy_x(joint: &JointDistribution) -> f64 {
    joint.entropy_x()
}

pub fn random_joint(num_s: usize, num_x: usize, seed: u64) -> Result<JointDistribution> {
    JointDistribution::random(num_s, num_x, seed)
}

pub fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn check_unique(labels: &[String], axis: Axis) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

/// Built-in example: `p(x|s)` over `x ∈ {a, b, c, d}` for `s ∈ {1, 2}`.
pub const EXAMPLE_CONDITIONAL: [[f64; 4]; 2] = [[0.2, 0.05, 0.7, 0.05], [0.6, 0.1, 0.1, 0.2]];

/// The built-in conditional combined with the prior `p(S=1) = rho`.
pub fn example_joint(rho: f64) -> Result<JointDistribution> {
    JointDistribution::from_conditional(
        &[rho, 1.0 - rho],
        &EXAMPLE_CONDITIONAL.map(|r| r.to_vec()),
        vec!["1".into(), "2".into()],
        ["a", "b", "c", "d"].map(String::from).to_vec(),
    )
}
