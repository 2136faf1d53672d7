//! Lift, log-lift, α-lift and the Sibson leakage measures built on them.
//!
//! For a joint `p(s, x)` the lift of a cell is `l(s,x) = p(s,x) / (p(s) p(x))`
//! and the α-lift of a symbol is the `p(s)`-weighted `L_α` norm of its lift
//! column, `ℓ_α(x) = (Σ_s p(s) l(s,x)^α)^{1/α}`, with `ℓ_∞(x) = max_s l(s,x)`.
//! All logarithms are natural, all information quantities are in nats.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::logsumexp;
use crate::probability::JointDistribution;

/// Order of the α-lift: a finite `α > 1` or the symbolic `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaParam {
    Finite(f64),
    Infinity,
}

impl AlphaParam {
    pub fn finite(order: f64) -> Result<Self> {
        if order.is_nan() || order <= 1.0 {
            return Err(Error::InvalidAlpha(order));
        }
        if order.is_infinite() {
            return Ok(AlphaParam::Infinity);
        }
        Ok(AlphaParam::Finite(order))
    }

    /// `α / (α − 1)`, and 1 at infinity.
    pub fn prefactor(self) -> f64 {
        match self {
            AlphaParam::Finite(a) => a / (a - 1.0),
            AlphaParam::Infinity => 1.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, AlphaParam::Infinity)
    }

    /// Ordering key; infinity sorts last.
    pub fn as_f64(self) -> f64 {
        match self {
            AlphaParam::Finite(a) => a,
            AlphaParam::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaParam::Finite(a) => write!(f, "{a}"),
            AlphaParam::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for AlphaParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(AlphaParam::Infinity);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse {
            context: "alpha".into(),
            message: format!("'{s}' is neither a number nor 'inf'"),
        })?;
        AlphaParam::finite(v)
    }
}

impl serde::Serialize for AlphaParam {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// `ln ‖r‖_α` under the weights `p_s`, given `ln r(s)` for each `s`.
///
/// Finite orders use `(1/α) · LSE_s(ln p(s) + α ln r(s))`; `-inf` log-ratios
/// (zero ratios) drop out of the sum. Infinity takes the plain maximum over
/// the support of `p_s`.
pub fn log_alpha_norm(p_s: &[f64], log_ratio: impl Fn(usize) -> f64, alpha: AlphaParam) -> f64 {
    match alpha {
        AlphaParam::Finite(a) => {
            let terms: Vec<f64> = (0..p_s.len())
                .filter(|&s| p_s[s] > 0.0)
                .map(|s| {
                    let lr = log_ratio(s);
                    if lr == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        p_s[s].ln() + a * lr
                    }
                })
                .collect();
            logsumexp(terms) / a
        }
        AlphaParam::Infinity => (0..p_s.len())
            .filter(|&s| p_s[s] > 0.0)
            .map(log_ratio)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Per-cell lift and log-lift plus the per-symbol α-lift for one order.
#[derive(Debug, Clone)]
pub struct LiftProfile {
    num_s: usize,
    num_x: usize,
    lift: Vec<f64>,
    log_lift: Vec<f64>,
    alpha: AlphaParam,
    alpha_lift: Vec<f64>,
    log_alpha_lift: Vec<f64>,
}

impl LiftProfile {
    pub fn new(joint: &JointDistribution, alpha: AlphaParam) -> Self {
        let (num_s, num_x) = (joint.num_s(), joint.num_x());
        let (p_s, p_x) = joint.marginals();
        let mut lift = vec![0.0; num_s * num_x];
        let mut log_lift = vec![f64::NEG_INFINITY; num_s * num_x];
        for s in 0..num_s {
            for x in 0..num_x {
                let p = joint.get(s, x);
                if p > 0.0 {
                    lift[s * num_x + x] = p / (p_s[s] * p_x[x]);
                    log_lift[s * num_x + x] = p.ln() - p_s[s].ln() - p_x[x].ln();
                }
            }
        }
        let mut alpha_lift = vec![0.0; num_x];
        let mut log_alpha_lift = vec![f64::NEG_INFINITY; num_x];
        for x in 0..num_x {
            if p_x[x] <= 0.0 {
                continue;
            }
            match alpha {
                AlphaParam::Infinity => {
                    let (best, _) = (0..num_s)
                        .map(|s| (lift[s * num_x + x], log_lift[s * num_x + x]))
                        .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.0 > acc.0 { v } else { acc });
                    alpha_lift[x] = best;
                    log_alpha_lift[x] = best.ln();
                }
                AlphaParam::Finite(_) => {
                    let l = log_alpha_norm(p_s, |s| log_lift[s * num_x + x], alpha);
                    log_alpha_lift[x] = l;
                    alpha_lift[x] = l.exp();
                }
            }
        }
        Self {
            num_s,
            num_x,
            lift,
            log_lift,
            alpha,
            alpha_lift,
            log_alpha_lift,
        }
    }

    pub fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    pub fn num_s(&self) -> usize {
        self.num_s
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    /// `l(s, x)`.
    pub fn lift(&self, s: usize, x: usize) -> f64 {
        self.lift[s * self.num_x + x]
    }

    /// `i(s, x) = ln l(s, x)`; `-inf` on zero cells.
    pub fn log_lift(&self, s: usize, x: usize) -> f64 {
        self.log_lift[s * self.num_x + x]
    }

    /// `ℓ_α(x)` for every `x`; zero for outputs that carry no mass.
    pub fn alpha_lift(&self) -> &[f64] {
        &self.alpha_lift
    }

    /// `i_α(x) = ln ℓ_α(x)`.
    pub fn log_alpha_lift(&self) -> &[f64] {
        &self.log_alpha_lift
    }

    /// `max_s |i(s, x)|`; zero cells count as `+inf`.
    pub fn max_abs_log_lift(&self, x: usize) -> f64 {
        (0..self.num_s)
            .map(|s| self.log_lift(s, x).abs())
            .fold(0.0, f64::max)
    }

    /// `max_{s,x} i(s, x)`, over the columns that carry mass.
    pub fn max_log_lift(&self) -> f64 {
        (0..self.num_x)
            .filter(|&x| self.alpha_lift[x] > 0.0)
            .flat_map(|x| (0..self.num_s).map(move |s| (s, x)))
            .map(|(s, x)| self.log_lift(s, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `E[ℓ_α(X)] = Σ_x p(x) ℓ_α(x)`.
    pub fn expected_alpha_lift(&self, joint: &JointDistribution) -> f64 {
        joint
            .p_x()
            .iter()
            .zip(&self.alpha_lift)
            .map(|(p, l)| p * l)
            .sum()
    }

    /// `max_x ℓ_α(x)` and its first argmax.
    pub fn max_alpha_lift(&self) -> (usize, f64) {
        self.alpha_lift
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
    }

    /// `(α/(α−1)) ln E[ℓ_α(X)]`.
    pub fn sibson_mi(&self, joint: &JointDistribution) -> f64 {
        self.alpha.prefactor() * self.expected_alpha_lift(joint).ln()
    }

    /// `(α/(α−1)) ln max_x ℓ_α(x)`.
    pub fn max_sibson_mi(&self) -> f64 {
        let best = self
            .log_alpha_lift
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        self.alpha.prefactor() * best
    }
}

pub fn lift_profile(joint: &JointDistribution, alpha: AlphaParam) -> LiftProfile {
    LiftProfile::new(joint, alpha)
}

/// Sibson mutual information `I_α^S(S;X) = (α/(α−1)) ln E[ℓ_α(X)]`.
///
/// At infinity this is `ln E[max_s l(s, X)]`.
pub fn sibson_mi(joint: &JointDistribution, alpha: AlphaParam) -> f64 {
    LiftProfile::new(joint, alpha).sibson_mi(joint)
}

/// Sibson mutual information from its defining sum over the channel `p(x|s)`:
/// `(α/(α−1)) ln Σ_x (Σ_s p(s) p(x|s)^α)^{1/α}`, or `ln Σ_x max_s p(x|s)` at
/// infinity. Does not go through lifts.
pub fn sibson_mi_direct(joint: &JointDistribution, alpha: AlphaParam) -> f64 {
    let p_s = joint.p_s();
    let total: f64 = (0..joint.num_x())
        .map(|x| match alpha {
            AlphaParam::Finite(a) => (0..joint.num_s())
                .map(|s| p_s[s] * joint.x_given_s(s, x).powf(a))
                .sum::<f64>()
                .powf(1.0 / a),
            AlphaParam::Infinity => (0..joint.num_s())
                .map(|s| joint.x_given_s(s, x))
                .fold(0.0, f64::max),
        })
        .sum();
    alpha.prefactor() * total.ln()
}

/// Maximum Sibson mutual information `(α/(α−1)) ln max_x ℓ_α(x)`.
pub fn max_sibson_mi(joint: &JointDistribution, alpha: AlphaParam) -> f64 {
    LiftProfile::new(joint, alpha).max_sibson_mi()
}

/// `max_{s,x} i(s, x)`.
pub fn max_log_lift(joint: &JointDistribution) -> f64 {
    LiftProfile::new(joint, AlphaParam::Infinity).max_log_lift()
}
