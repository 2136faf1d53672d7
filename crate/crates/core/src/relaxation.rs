//! Alternative high-risk selections built on the classical absolute log-lift
//! test `max_s |i(s,x)| > ε̄`: intersecting it with an α-lift threshold, or
//! greedily releasing symbols while the residual violation mass stays below δ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::{AlphaParam, LiftProfile};
use crate::probability::JointDistribution;
use crate::watchdog::{apply_mechanism, x_invariant_mechanism, WatchdogPartition};

/// Parameters shared by both relaxation methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationConfig {
    /// Threshold on `max_s |i(s,x)|`, in nats.
    pub eps_bar: f64,
    pub alpha: AlphaParam,
    /// Threshold on `ln ℓ_α(x)`, in nats.
    pub epsilon: f64,
    /// Allowed probability of an absolute log-lift above `eps_bar`.
    pub delta: f64,
    /// Cap on every absolute log-lift left after refinement.
    pub eps_max: f64,
}

impl RelaxationConfig {
    pub fn new(eps_bar: f64, alpha: AlphaParam, epsilon: f64, delta: f64, eps_max: f64) -> Result<Self> {
        let cfg = Self {
            eps_bar,
            alpha,
            epsilon,
            delta,
            eps_max,
        };
        cfg.check()?;
        Ok(cfg)
    }

    /// Collects every violated constraint into one error.
    pub fn check(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.eps_bar > 0.0 && self.eps_bar.is_finite()) {
            problems.push(format!("eps_bar must be finite and > 0, got {}", self.eps_bar));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            problems.push(format!("delta must lie in [0, 1], got {}", self.delta));
        }
        if self.eps_max.is_nan() || self.eps_max < self.eps_bar {
            problems.push(format!(
                "eps_max must be >= eps_bar, got {} < {}",
                self.eps_max, self.eps_bar
            ));
        }
        if !self.epsilon.is_finite() {
            problems.push(format!("epsilon must be finite, got {}", self.epsilon));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }

    /// The α-lift threshold is only a relaxation when it sits below `eps_bar`.
    pub fn epsilon_below_eps_bar(&self) -> bool {
        self.epsilon < self.eps_bar
    }
}

fn check_eps_bar(eps_bar: f64) -> Result<()> {
    if eps_bar > 0.0 && eps_bar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(format!(
            "eps_bar must be finite and > 0, got {eps_bar}"
        )))
    }
}

/// `{x : max_s |i(s,x)| > eps_bar}`; a zero cell has `|i| = ∞`.
pub fn abs_loglift_high_risk(joint: &JointDistribution, eps_bar: f64) -> Result<Vec<usize>> {
    check_eps_bar(eps_bar)?;
    let profile = LiftProfile::new(joint, AlphaParam::Infinity);
    Ok(abs_set(&profile, eps_bar))
}

fn abs_set(profile: &LiftProfile, eps_bar: f64) -> Vec<usize> {
    (0..profile.num_x())
        .filter(|&x| profile.max_abs_log_lift(x) > eps_bar)
        .collect()
}

/// `{x : ln ℓ_α(x) > ε} ∩ {x : max_s |i(s,x)| > ε̄}`.
pub fn combined_high_risk(joint: &JointDistribution, config: &RelaxationConfig) -> Result<Vec<usize>> {
    config.check()?;
    let profile = LiftProfile::new(joint, config.alpha);
    Ok(abs_set(&profile, config.eps_bar)
        .into_iter()
        .filter(|&x| profile.log_alpha_lift()[x] > config.epsilon)
        .collect())
}

/// One certified release made by [`delta_refine_logged`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub symbol: usize,
    /// Violation mass of the released singletons plus the merged remainder.
    pub violation_mass: f64,
    /// Largest absolute log-lift among released singletons and the remainder.
    pub max_abs_log_lift: f64,
}

/// Result of a δ-refinement with its removal log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub final_set: Vec<usize>,
    pub removals: Vec<Removal>,
}

/// Greedy δ-refinement of a high-risk set; see [`delta_refine_logged`].
pub fn delta_refine(
    joint: &JointDistribution,
    initial_set: &[usize],
    eps_bar: f64,
    delta: f64,
    eps_max: f64,
) -> Result<Vec<usize>> {
    Ok(delta_refine_logged(joint, initial_set, eps_bar, delta, eps_max)?.final_set)
}

/// Releases high-risk symbols back to the published set one at a time.
///
/// Candidates are scanned in ascending `max_s |i(s,x)|` (index breaks ties).
/// A candidate `x` is released when, with `L` the symbols already published
/// and `M` the high-risk set without `x`:
///
/// * the mass of cells `(s, x')`, `x' ∈ L ∪ {x}`, with `|i(s,x')| > ε̄`, plus the
///   mass `p(s, M)` of every `s` with `|ln(p(M|s)/p(M))| > ε̄`, is at most `δ`;
/// * every one of those absolute log-lifts is at most `ε_max`.
///
/// The scan restarts after each release and stops after a pass that releases
/// nothing. An empty remainder contributes nothing to either condition.
pub fn delta_refine_logged(
    joint: &JointDistribution,
    initial_set: &[usize],
    eps_bar: f64,
    delta: f64,
    eps_max: f64,
) -> Result<Refinement> {
    check_eps_bar(eps_bar)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidConfig(format!("delta must lie in [0, 1], got {delta}")));
    }
    if eps_max.is_nan() {
        return Err(Error::InvalidConfig("eps_max is NaN".into()));
    }
    let (num_s, num_x) = (joint.num_s(), joint.num_x());
    let mut in_set = vec![false; num_x];
    for &x in initial_set {
        if x >= num_x {
            return Err(Error::DimensionMismatch(format!(
                "index {x} out of range for |X| = {num_x}"
            )));
        }
        in_set[x] = true;
    }

    let profile = LiftProfile::new(joint, AlphaParam::Infinity);
    let max_abs: Vec<f64> = (0..num_x).map(|x| profile.max_abs_log_lift(x)).collect();
    let violation: Vec<f64> = (0..num_x)
        .map(|x| {
            (0..num_s)
                .filter(|&s| profile.log_lift(s, x).abs() > eps_bar)
                .map(|s| joint.get(s, x))
                .sum()
        })
        .collect();

    let p_s = joint.p_s();
    let mut removals = Vec::new();
    loop {
        let released_mass: f64 = (0..num_x).filter(|&x| !in_set[x]).map(|x| violation[x]).sum();
        let released_max = (0..num_x)
            .filter(|&x| !in_set[x])
            .map(|x| max_abs[x])
            .fold(0.0, f64::max);
        let mut candidates: Vec<usize> = (0..num_x).filter(|&x| in_set[x]).collect();
        candidates.sort_by(|&a, &b| max_abs[a].total_cmp(&max_abs[b]).then(a.cmp(&b)));

        let accepted = candidates.into_iter().find_map(|x| {
            let remainder: Vec<usize> = (0..num_x).filter(|&y| in_set[y] && y != x).collect();
            let (merged_mass, merged_max) = merged_violation(joint, p_s, &remainder, eps_bar);
            let mass = released_mass + violation[x] + merged_mass;
            let cap = released_max.max(max_abs[x]).max(merged_max);
            (mass <= delta && cap <= eps_max).then_some(Removal {
                symbol: x,
                violation_mass: mass,
                max_abs_log_lift: cap,
            })
        });
        match accepted {
            Some(r) => {
                in_set[r.symbol] = false;
                removals.push(r);
            }
            None => break,
        }
    }
    Ok(Refinement {
        final_set: (0..num_x).filter(|&x| in_set[x]).collect(),
        removals,
    })
}

/// Violation mass and largest absolute log-lift of the merged symbol `set`.
fn merged_violation(joint: &JointDistribution, p_s: &[f64], set: &[usize], eps_bar: f64) -> (f64, f64) {
    if set.is_empty() {
        return (0.0, 0.0);
    }
    let mass_s: Vec<f64> = (0..joint.num_s())
        .map(|s| set.iter().map(|&x| joint.get(s, x)).sum())
        .collect();
    let mass: f64 = set.iter().map(|&x| joint.p_x()[x]).sum();
    let ln_mass = mass.ln();
    let mut violated = 0.0;
    let mut worst = 0.0f64;
    for s in 0..joint.num_s() {
        let abs_i = if mass_s[s] > 0.0 {
            ((mass_s[s] / p_s[s]).ln() - ln_mass).abs()
        } else {
            f64::INFINITY
        };
        worst = worst.max(abs_i);
        if abs_i > eps_bar {
            violated += mass_s[s];
        }
    }
    (violated, worst)
}

/// Probability that the sanitized output has `|i(s,y)| > eps_bar`, when
/// `final_set` is merged by the uniform X-invariant randomization.
pub fn realized_delta(joint: &JointDistribution, final_set: &[usize], eps_bar: f64) -> Result<f64> {
    check_eps_bar(eps_bar)?;
    let part = WatchdogPartition::from_high_risk(joint, AlphaParam::Infinity, final_set)?;
    let out = apply_mechanism(joint, &x_invariant_mechanism(&part, None)?)?;
    let profile = LiftProfile::new(&out, AlphaParam::Infinity);
    let mut total = 0.0;
    for y in 0..out.num_x() {
        if out.p_x()[y] <= 0.0 {
            continue;
        }
        for s in 0..out.num_s() {
            if profile.log_lift(s, y).abs() > eps_bar {
                total += out.get(s, y);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::example_joint;

    fn independent() -> JointDistribution {
        let p_s = [0.3, 0.7];
        let p_x = [0.2, 0.5, 0.3];
        let raw: Vec<Vec<f64>> = p_s.iter().map(|s| p_x.iter().map(|x| s * x).collect()).collect();
        JointDistribution::from_matrix(&raw).unwrap()
    }

    #[test]
    fn abs_set_examples() {
        assert!(abs_loglift_high_risk(&independent(), 0.1).unwrap().is_empty());
        let t = example_joint(0.6).unwrap();
        // i(S=2, d) = ln(0.2 / 0.11) ≈ 0.5978
        assert!(abs_loglift_high_risk(&t, 0.55).unwrap().contains(&3));
        assert!(abs_loglift_high_risk(&t, 10.0).unwrap().is_empty());
        assert!(abs_loglift_high_risk(&t, 0.0).is_err());
        assert!(abs_loglift_high_risk(&t, -1.0).is_err());
    }

    #[test]
    fn example_abs_set_by_hand() {
        let t = example_joint(0.6).unwrap();
        let cond = crate::probability::EXAMPLE_CONDITIONAL;
        let p_x = [0.36, 0.07, 0.46, 0.11];
        let expected: Vec<usize> = (0..4)
            .filter(|&x| (0..2).any(|s| (cond[s][x] / p_x[x]).ln().abs() > 0.55))
            .collect();
        assert_eq!(abs_loglift_high_risk(&t, 0.55).unwrap(), expected);
    }

    #[test]
    fn combined_examples() {
        let j = JointDistribution::random(6, 10, 4).unwrap();
        let abs = abs_loglift_high_risk(&j, 0.3).unwrap();
        let cfg = RelaxationConfig::new(0.3, AlphaParam::finite(2.0).unwrap(), 0.0, 0.01, 4.0).unwrap();
        // ε = 0 is vacuous once every ℓ_α > 1
        assert_eq!(combined_high_risk(&j, &cfg).unwrap(), abs);
        let cfg = RelaxationConfig { epsilon: 100.0, ..cfg };
        assert!(combined_high_risk(&j, &cfg).unwrap().is_empty());
    }

    #[test]
    fn config_errors_are_aggregated() {
        let err = RelaxationConfig::new(-1.0, AlphaParam::Infinity, 0.1, 2.0, 4.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("eps_bar") && msg.contains("delta"), "{msg}");
        assert!(RelaxationConfig::new(1.0, AlphaParam::Infinity, 0.1, 0.5, 0.5).is_err());
        assert!(RelaxationConfig::new(1.0, AlphaParam::Infinity, 0.45, 0.01, f64::INFINITY).is_ok());
    }

    #[test]
    fn zero_delta_removes_nothing() {
        for seed in 0..20 {
            let j = JointDistribution::random(8, 10, seed).unwrap();
            let initial = abs_loglift_high_risk(&j, 0.2).unwrap();
            // every remaining candidate carries positive violation mass
            let refined = delta_refine(&j, &initial, 0.2, 0.0, 4.0).unwrap();
            assert_eq!(refined, initial);
        }
    }

    #[test]
    fn refinement_is_a_subset() {
        for seed in 0..20 {
            let j = JointDistribution::random(5, 8, seed).unwrap();
            let initial = abs_loglift_high_risk(&j, 0.5).unwrap();
            let refined = delta_refine(&j, &initial, 0.5, 1.0, f64::INFINITY).unwrap();
            assert!(refined.iter().all(|x| initial.contains(x)));
        }
    }

    #[test]
    fn delta_one_releases_everything() {
        // with δ = 1 and no cap both conditions always hold
        let j = JointDistribution::random(5, 8, 3).unwrap();
        let initial = abs_loglift_high_risk(&j, 0.5).unwrap();
        let refined = delta_refine(&j, &initial, 0.5, 1.0, f64::INFINITY).unwrap();
        assert!(refined.is_empty());
    }

    #[test]
    fn refinement_is_deterministic() {
        let j = JointDistribution::random(15, 20, 42).unwrap();
        let initial = abs_loglift_high_risk(&j, 1.0).unwrap();
        let a = delta_refine_logged(&j, &initial, 1.0, 0.01, 4.0).unwrap();
        let b = delta_refine_logged(&j, &initial, 1.0, 0.01, 4.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn realized_delta_examples() {
        assert_eq!(realized_delta(&independent(), &[0, 2], 0.1).unwrap(), 0.0);
        assert_eq!(realized_delta(&independent(), &[], 0.1).unwrap(), 0.0);
        assert!(realized_delta(&independent(), &[], 0.0).is_err());

        let t = example_joint(0.6).unwrap();
        // no merge: mass of cells with |i| > ε̄ in the raw joint
        let profile = LiftProfile::new(&t, AlphaParam::Infinity);
        let raw: f64 = (0..2)
            .flat_map(|s| (0..4).map(move |x| (s, x)))
            .filter(|&(s, x)| profile.log_lift(s, x).abs() > 0.4)
            .map(|(s, x)| t.get(s, x))
            .sum();
        assert!((realized_delta(&t, &[], 0.4).unwrap() - raw).abs() < 1e-15);
    }

    #[test]
    fn realized_delta_of_merged_pair_by_hand() {
        let t = example_joint(0.6).unwrap();
        // merging {c, d}: p(M|S=1) = 0.75, p(M|S=2) = 0.3, p(M) = 0.57
        let merged = [(0.75f64 / 0.57).ln(), (0.3f64 / 0.57).ln()];
        let mass = [0.6 * 0.75, 0.4 * 0.3];
        let profile = LiftProfile::new(&t, AlphaParam::Infinity);
        let eps_bar = 0.4;
        let mut expected = 0.0;
        for s in 0..2 {
            for x in 0..2 {
                if profile.log_lift(s, x).abs() > eps_bar {
                    expected += t.get(s, x);
                }
            }
            if merged[s].abs() > eps_bar {
                expected += mass[s];
            }
        }
        let got = realized_delta(&t, &[2, 3], eps_bar).unwrap();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }
}
