//! Brute-force checks of the X-invariant optimality bounds.
//!
//! Random feasible watchdog randomizations are drawn and the resulting output
//! α-lifts are compared against the merged lift `ℓ̄_α`: no randomization may
//! push `max_y ℓ_α(y)` below `ℓ̄_α`, nor `Σ_y p(y) ℓ_α(y)` below `p(X^c) ℓ̄_α`.

use std::fmt;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::AlphaParam;
use crate::numerics::derive_seed;
use crate::probability::{ExperimentRng, JointDistribution};
use crate::watchdog::{output_alpha_lift, x_invariant_mechanism, Mechanism, WatchdogPartition};

/// Slack allowed on the lower bounds.
pub const BOUND_TOL: f64 = 1e-9;
/// The X-invariant sample must meet the bounds with equality to this.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Deterministic maps `X^c -> X^c` are enumerated up to this many.
const MAX_DETERMINISTIC: usize = 4096;

/// Summary of one oracle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub alpha: AlphaParam,
    pub high_risk: Vec<String>,
    pub merged_lift: f64,
    pub high_risk_mass: f64,
    /// Smallest `max_y ℓ_α(y)` seen over all samples.
    pub best_sampled_max: f64,
    /// Smallest `Σ_y p(y) ℓ_α(y)` seen over all samples.
    pub best_sampled_expected: f64,
    /// Mechanisms evaluated, fixed ones included.
    pub num_samples: usize,
    pub violations: usize,
    /// `|max_y ℓ_α(y) − ℓ̄_α|` of the X-invariant sample.
    pub x_invariant_gap: f64,
}

/// The first offending sample of a failed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Position in the evaluation order (0 is the X-invariant sample).
    pub sample_index: usize,
    /// Seed of the random sample, `None` for fixed samples.
    pub seed: Option<u64>,
    pub max_lift: f64,
    pub expected_lift: f64,
    pub mechanism: Mechanism,
    pub report: Option<OracleReport>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sample {} (seed {:?}): max lift {}, expected lift {}",
            self.sample_index, self.seed, self.max_lift, self.expected_lift
        )
    }
}

/// A random feasible watchdog randomization of `part`: identity on the
/// low-risk symbols, each high-risk row an independent point of the simplex
/// over the high-risk symbols (normalized i.i.d. uniform(0, 1) weights).
pub fn sample_watchdog_mechanism(part: &WatchdogPartition, seed: u64) -> Result<Mechanism> {
    let high = part.high_risk();
    if high.is_empty() {
        return Err(Error::EmptyHighRisk);
    }
    let mut rng = ExperimentRng::seed_from_u64(seed);
    let mut mech = Mechanism::identity(part.labels());
    for &x in high {
        let w: Vec<f64> = high.iter().map(|_| rng.sample::<f64, _>(Open01)).collect();
        let total: f64 = w.iter().sum();
        mech.transition[x][x] = 0.0;
        for (&y, v) in high.iter().zip(w) {
            mech.transition[x][y] = v / total;
        }
    }
    Ok(mech)
}

/// Fixed corner samples: every deterministic map of the high-risk block into
/// itself when there are few enough, otherwise only the merge-to-one maps.
fn corner_mechanisms(part: &WatchdogPartition) -> Vec<Mechanism> {
    let high = part.high_risk();
    let k = high.len();
    let total = (k as u32)
        .checked_pow(k as u32)
        .map(|t| t as usize)
        .filter(|&t| t <= MAX_DETERMINISTIC);
    let build = |targets: &[usize]| {
        let mut mech = Mechanism::identity(part.labels());
        for (&x, &t) in high.iter().zip(targets) {
            mech.transition[x][x] = 0.0;
            mech.transition[x][high[t]] = 1.0;
        }
        mech
    };
    match total {
        Some(total) => (0..total)
            .map(|mut code| {
                let targets: Vec<usize> = (0..k)
                    .map(|_| {
                        let t = code % k;
                        code /= k;
                        t
                    })
                    .collect();
                build(&targets)
            })
            .collect(),
        None => (0..k).map(|t| build(&vec![t; k])).collect(),
    }
}

/// `(Σ_s p(s) v(s)^α)^{1/α}`, or `max_s v(s)` at infinity, by direct powers.
fn weighted_norm(p_s: &[f64], values: &[f64], alpha: AlphaParam) -> f64 {
    match alpha {
        AlphaParam::Finite(a) => p_s
            .iter()
            .zip(values)
            .map(|(p, v)| p * v.powf(a))
            .sum::<f64>()
            .powf(1.0 / a),
        AlphaParam::Infinity => p_s
            .iter()
            .zip(values)
            .filter(|(p, _)| **p > 0.0)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    max_lift: f64,
    expected_lift: f64,
    /// `Σ_y (Σ_s p(s) p(y|s)^α)^{1/α}` over the high-risk outputs.
    minkowski_sum: f64,
}

fn evaluate(joint: &JointDistribution, part: &WatchdogPartition, mech: &Mechanism) -> Result<Evaluation> {
    let lifts = output_alpha_lift(joint, mech, part.alpha())?;
    let p_x = joint.p_x();
    let mut max_lift = f64::NEG_INFINITY;
    let mut expected_lift = 0.0;
    let mut minkowski_sum = 0.0;
    for &y in part.high_risk() {
        let p_y: f64 = (0..joint.num_x()).map(|x| mech.get(x, y) * p_x[x]).sum();
        if p_y <= 0.0 {
            continue;
        }
        max_lift = max_lift.max(lifts[y]);
        expected_lift += p_y * lifts[y];
        let y_given_s: Vec<f64> = (0..joint.num_s())
            .map(|s| (0..joint.num_x()).map(|x| mech.get(x, y) * joint.x_given_s(s, x)).sum())
            .collect();
        minkowski_sum += weighted_norm(joint.p_s(), &y_given_s, part.alpha());
    }
    Ok(Evaluation {
        max_lift,
        expected_lift,
        minkowski_sum,
    })
}

/// Samples `num_samples` random watchdog randomizations (plus the X-invariant
/// one and the deterministic corners) and checks both optimality bounds on
/// each. Sample `k` is seeded with `derive_seed(seed, k)`, so the report does
/// not depend on how the work is scheduled across threads.
pub fn verify_merged_lift_bound(
    joint: &JointDistribution,
    part: &WatchdogPartition,
    num_samples: usize,
    seed: u64,
) -> Result<OracleReport> {
    let merged = part.merged_lift().ok_or(Error::EmptyHighRisk)?;
    if num_samples == 0 {
        return Err(Error::InvalidConfig("num_samples must be >= 1".into()));
    }
    let mass = part.high_risk_mass();
    let high: Vec<usize> = part.high_risk().to_vec();
    let p_s = joint.p_s();
    let mass_given_s: Vec<f64> = (0..joint.num_s())
        .map(|s| high.iter().map(|&x| joint.x_given_s(s, x)).sum())
        .collect();
    let minkowski_bound = weighted_norm(p_s, &mass_given_s, part.alpha());

    let bound_max = merged - BOUND_TOL;
    let bound_expected = mass * merged - BOUND_TOL;
    let breaches = |e: &Evaluation| {
        e.max_lift < bound_max || e.expected_lift < bound_expected || e.minkowski_sum < minkowski_bound - BOUND_TOL
    };

    let x_inv = x_invariant_mechanism(part, None)?;
    let x_inv_eval = evaluate(joint, part, &x_inv)?;
    let x_invariant_gap = (x_inv_eval.max_lift - merged).abs();
    let x_inv_bad = x_invariant_gap > EQUALITY_TOL
        || (x_inv_eval.expected_lift - mass * merged).abs() > EQUALITY_TOL
        || breaches(&x_inv_eval);

    let mut fixed = vec![x_inv];
    fixed.extend(corner_mechanisms(part));
    let fixed_evals: Vec<Evaluation> = fixed
        .iter()
        .map(|m| evaluate(joint, part, m))
        .collect::<Result<_>>()?;

    let random_evals: Vec<(u64, Evaluation)> = (0..num_samples as u64)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, k);
            let m = sample_watchdog_mechanism(part, s)?;
            Ok((s, evaluate(joint, part, &m)?))
        })
        .collect::<Result<_>>()?;

    let mut first_bad: Option<(usize, Option<u64>, Evaluation)> = None;
    let mut violations = 0;
    let all = fixed_evals
        .iter()
        .map(|e| (None, *e))
        .chain(random_evals.iter().map(|(s, e)| (Some(*s), *e)));
    let mut best_max = f64::INFINITY;
    let mut best_expected = f64::INFINITY;
    for (i, (s, e)) in all.enumerate() {
        best_max = best_max.min(e.max_lift);
        best_expected = best_expected.min(e.expected_lift);
        let bad = breaches(&e) || (i == 0 && x_inv_bad);
        if bad {
            violations += 1;
            first_bad.get_or_insert((i, s, e));
        }
    }

    let report = OracleReport {
        alpha: part.alpha(),
        high_risk: high.iter().map(|&x| part.labels()[x].clone()).collect(),
        merged_lift: merged,
        high_risk_mass: mass,
        best_sampled_max: best_max,
        best_sampled_expected: best_expected,
        num_samples: fixed_evals.len() + random_evals.len(),
        violations,
        x_invariant_gap,
    };
    match first_bad {
        None => Ok(report),
        Some((index, s, e)) => {
            let mechanism = match s {
                Some(s) => sample_watchdog_mechanism(part, s)?,
                None => fixed[index].clone(),
            };
            Err(Error::ViolationFound(Box::new(Violation {
                sample_index: index,
                seed: s,
                max_lift: e.max_lift,
                expected_lift: e.expected_lift,
                mechanism,
                report: Some(report),
            })))
        }
    }
}

/// Checks the strict tradeoff on one mechanism: if every high-risk output but
/// one has `ℓ_α(y') < ℓ̄_α − BOUND_TOL`, the remaining one must satisfy
/// `ℓ_α(y) > ℓ̄_α`. Returns `None` when the premise does not hold, otherwise
/// whether the conclusion held.
pub fn strict_tradeoff_holds(
    joint: &JointDistribution,
    part: &WatchdogPartition,
    mech: &Mechanism,
) -> Result<Option<bool>> {
    let merged = part.merged_lift().ok_or(Error::EmptyHighRisk)?;
    let lifts = output_alpha_lift(joint, mech, part.alpha())?;
    let p_x = joint.p_x();
    let mut outputs = Vec::with_capacity(part.high_risk().len());
    for &y in part.high_risk() {
        let p_y: f64 = (0..joint.num_x()).map(|x| mech.get(x, y) * p_x[x]).sum();
        if p_y <= 0.0 {
            // an unused output: the block effectively has fewer symbols
            return Ok(None);
        }
        outputs.push(lifts[y]);
    }
    let above: Vec<f64> = outputs
        .iter()
        .copied()
        .filter(|&l| l >= merged - BOUND_TOL || l.is_nan())
        .collect();
    if outputs.len() < 2 || above.len() != 1 {
        return Ok(None);
    }
    Ok(Some(above[0] > merged))
}

/// Runs [`strict_tradeoff_holds`] over the X-invariant sample and
/// `num_samples` random samples; returns how many triggered the premise.
pub fn verify_strict_tradeoff(
    joint: &JointDistribution,
    part: &WatchdogPartition,
    num_samples: usize,
    seed: u64,
) -> Result<usize> {
    if part.high_risk().len() < 2 {
        return Err(Error::InvalidConfig(
            "the strict tradeoff needs at least two high-risk symbols".into(),
        ));
    }
    let x_inv = x_invariant_mechanism(part, None)?;
    if strict_tradeoff_holds(joint, part, &x_inv)? == Some(false) {
        return Err(Error::ViolationFound(Box::new(Violation {
            sample_index: 0,
            seed: None,
            max_lift: f64::NAN,
            expected_lift: f64::NAN,
            mechanism: x_inv,
            report: None,
        })));
    }
    let outcomes: Vec<(u64, Option<bool>)> = (0..num_samples as u64)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, k);
            let m = sample_watchdog_mechanism(part, s)?;
            Ok((s, strict_tradeoff_holds(joint, part, &m)?))
        })
        .collect::<Result<_>>()?;
    if let Some((i, (s, _))) = outcomes.iter().enumerate().find(|(_, (_, o))| *o == Some(false)) {
        let mechanism = sample_watchdog_mechanism(part, *s)?;
        let lifts = output_alpha_lift(joint, &mechanism, part.alpha())?;
        let max_lift = part.high_risk().iter().map(|&y| lifts[y]).fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::ViolationFound(Box::new(Violation {
            sample_index: i + 1,
            seed: Some(*s),
            max_lift,
            expected_lift: f64::NAN,
            mechanism,
            report: None,
        })));
    }
    Ok(outcomes.iter().filter(|(_, o)| o.is_some()).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::example_joint;
    use crate::watchdog::ROW_SUM_TOL;

    fn a(v: f64) -> AlphaParam {
        AlphaParam::finite(v).unwrap()
    }

    #[test]
    fn single_symbol_block_is_forced() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[2]).unwrap();
        let m = sample_watchdog_mechanism(&p, 5).unwrap();
        assert_eq!(m, Mechanism::identity(j.x_labels()));
    }

    #[test]
    fn sampling_is_seeded_and_feasible() {
        let j = JointDistribution::random(3, 5, 0).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[0, 2, 4]).unwrap();
        assert_eq!(
            sample_watchdog_mechanism(&p, 9).unwrap(),
            sample_watchdog_mechanism(&p, 9).unwrap()
        );
        for seed in 0..1000 {
            let m = sample_watchdog_mechanism(&p, seed).unwrap();
            for row in &m.transition {
                assert!((row.iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOL);
            }
            assert!(m.is_watchdog_form(&p));
        }
    }

    #[test]
    fn empty_block_is_an_error() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[]).unwrap();
        assert!(matches!(sample_watchdog_mechanism(&p, 0), Err(Error::EmptyHighRisk)));
        assert!(matches!(verify_merged_lift_bound(&j, &p, 10, 0), Err(Error::EmptyHighRisk)));
    }

    #[test]
    fn corners_cover_every_map() {
        let j = JointDistribution::random(3, 5, 0).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[0, 2, 4]).unwrap();
        let corners = corner_mechanisms(&p);
        assert_eq!(corners.len(), 27);
        assert!(corners.iter().all(|m| m.is_watchdog_form(&p)));
    }

    #[test]
    fn bound_holds_on_small_instance() {
        let j = JointDistribution::random(3, 4, 17).unwrap();
        for alpha in [a(2.0), AlphaParam::Infinity] {
            let p = WatchdogPartition::from_high_risk(&j, alpha, &[1, 3]).unwrap();
            let r = verify_merged_lift_bound(&j, &p, 10_000, 1).unwrap();
            assert_eq!(r.violations, 0);
            assert!(r.x_invariant_gap <= EQUALITY_TOL);
            assert!(r.best_sampled_max >= r.merged_lift - BOUND_TOL);
            assert!(r.best_sampled_expected >= r.high_risk_mass * r.merged_lift - BOUND_TOL);
        }
    }

    #[test]
    fn report_is_deterministic() {
        let j = JointDistribution::random(4, 5, 3).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(1.5), &[0, 1, 4]).unwrap();
        assert_eq!(verify_merged_lift_bound(&j, &p, 500, 8).unwrap(), verify_merged_lift_bound(&j, &p, 500, 8).unwrap());
    }

    #[test]
    fn x_invariant_never_triggers_premise() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[1, 2]).unwrap();
        let m = x_invariant_mechanism(&p, None).unwrap();
        assert_eq!(strict_tradeoff_holds(&j, &p, &m).unwrap(), None);
    }

    #[test]
    fn skewed_mechanism_triggers_premise() {
        // publishing b and c unmixed: ℓ_2(b) ≈ 1.059 sits below the merged
        // lift of {b, c} (≈ 1.122), so c must sit above it
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[1, 2]).unwrap();
        let m = Mechanism::identity(j.x_labels());
        assert!(m.is_watchdog_form(&p));
        assert_eq!(strict_tradeoff_holds(&j, &p, &m).unwrap(), Some(true));
    }

    #[test]
    fn strict_tradeoff_random_pair() {
        let j = JointDistribution::random(3, 4, 5).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[0, 2]).unwrap();
        let triggered = verify_strict_tradeoff(&j, &p, 10_000, 3).unwrap();
        assert!(triggered > 0);
        let single = WatchdogPartition::from_high_risk(&j, a(2.0), &[0]).unwrap();
        assert!(verify_strict_tradeoff(&j, &single, 10, 3).is_err());
    }
}
