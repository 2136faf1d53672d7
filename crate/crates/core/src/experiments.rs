//! Privacy-utility experiments: the α-lift ordering, normalized mutual
//! information loss, cut sweeps and the Monte-Carlo comparison of the two
//! relaxation methods.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::{AlphaParam, LiftProfile};
use crate::numerics::{derive_seed, plogp_neg};
use crate::probability::JointDistribution;
use crate::relaxation::{abs_loglift_high_risk, combined_high_risk, delta_refine, realized_delta, RelaxationConfig};
use crate::watchdog::{optimal_leakage, WatchdogPartition};

/// Symbols of `X` sorted by descending `ℓ_α(x)`; equal values keep index order.
pub fn alpha_lift_ordering(joint: &JointDistribution, alpha: AlphaParam) -> Vec<usize> {
    ordering_of(&LiftProfile::new(joint, alpha))
}

fn ordering_of(profile: &LiftProfile) -> Vec<usize> {
    let lifts = profile.alpha_lift();
    let mut order: Vec<usize> = (0..lifts.len()).collect();
    order.sort_by(|&a, &b| lifts[b].total_cmp(&lifts[a]));
    order
}

/// `(H(X) − I(X;Y)) / H(X)` when `high_risk` is merged into one output and
/// every other symbol is published as-is.
pub fn nmil(joint: &JointDistribution, high_risk: &[usize]) -> Result<f64> {
    let h = joint.entropy_x();
    if h <= 0.0 {
        return Err(Error::DegenerateEntropy);
    }
    let p_x = joint.p_x();
    if let Some(&x) = high_risk.iter().find(|&&x| x >= p_x.len()) {
        return Err(Error::DimensionMismatch(format!(
            "index {x} out of range for |X| = {}",
            p_x.len()
        )));
    }
    if high_risk.len() == p_x.len() {
        return Ok(1.0);
    }
    // H(X) − I(X;Y) only involves the merged symbols
    let split: f64 = high_risk.iter().map(|&x| plogp_neg(p_x[x])).sum();
    let merged_mass: f64 = high_risk.iter().map(|&x| p_x[x]).sum();
    Ok((split - plogp_neg(merged_mass)) / h)
}

/// One cut of a privacy-utility sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PutCurvePoint {
    pub alpha: AlphaParam,
    /// Number of merged symbols: the first `cut_index` of the ordering.
    pub cut_index: usize,
    /// `ln ℓ_α` of the first unmerged symbol, when that threshold reproduces
    /// this cut exactly (absent at the full cut and on ties).
    pub epsilon_equiv: Option<f64>,
    pub nmil: f64,
    pub min_sibson: f64,
    pub min_max_sibson: f64,
}

/// Grows the merged set one symbol at a time along the descending α-lift
/// ordering, for every α in `alphas`, from the empty cut to all of `X`.
pub fn put_sweep(joint: &JointDistribution, alphas: &[AlphaParam]) -> Result<Vec<PutCurvePoint>> {
    let n = joint.num_x();
    let mut points = Vec::with_capacity(alphas.len() * (n + 1));
    for &alpha in alphas {
        let profile = LiftProfile::new(joint, alpha);
        let order = ordering_of(&profile);
        let lifts = profile.alpha_lift();
        for cut in 0..=n {
            let part = WatchdogPartition::from_profile(joint, &profile, &order[..cut])?;
            let leak = optimal_leakage(&part);
            let epsilon_equiv = (cut < n && (cut == 0 || lifts[order[cut - 1]] > lifts[order[cut]]))
                .then(|| profile.log_alpha_lift()[order[cut]]);
            points.push(PutCurvePoint {
                alpha,
                cut_index: cut,
                epsilon_equiv,
                nmil: nmil(joint, &order[..cut])?,
                min_sibson: leak.min_sibson,
                min_max_sibson: leak.min_max_sibson,
            });
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Absolute log-lift set refined by the δ rule.
    DeltaRefinement,
    /// Absolute log-lift set intersected with the α-lift threshold.
    AlphaLiftRelaxation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DeltaRefinement => "delta_refinement",
            Method::AlphaLiftRelaxation => "alpha_lift_relaxation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    pub nmil: f64,
    pub realized_delta: f64,
}

/// Runs `num_trials` independent trials. Trial `t` draws a fresh uniform joint
/// seeded with `derive_seed(base_seed, t)` and records, for each method, the
/// NMIL and realized δ of merging its high-risk set. Records come back ordered
/// by trial, delta refinement first.
pub fn cdf_trials(
    num_trials: usize,
    num_s: usize,
    num_x: usize,
    config: &RelaxationConfig,
    base_seed: u64,
) -> Result<Vec<TrialRecord>> {
    if num_trials == 0 {
        return Err(Error::InvalidConfig("num_trials must be >= 1".into()));
    }
    config.check()?;
    let per_trial: Vec<[TrialRecord; 2]> = (0..num_trials)
        .into_par_iter()
        .map(|trial| run_trial(trial, num_s, num_x, config, base_seed))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn run_trial(
    trial: usize,
    num_s: usize,
    num_x: usize,
    config: &RelaxationConfig,
    base_seed: u64,
) -> Result<[TrialRecord; 2]> {
    let seed = derive_seed(base_seed, trial as u64);
    let joint = JointDistribution::random(num_s, num_x, seed)?;
    let abs = abs_loglift_high_risk(&joint, config.eps_bar)?;
    let refined = delta_refine(&joint, &abs, config.eps_bar, config.delta, config.eps_max)?;
    let combined = combined_high_risk(&joint, config)?;
    let record = |method, set: &[usize]| -> Result<TrialRecord> {
        Ok(TrialRecord {
            trial,
            seed,
            method,
            nmil: nmil(&joint, set)?,
            realized_delta: realized_delta(&joint, set, config.eps_bar)?,
        })
    };
    Ok([
        record(Method::DeltaRefinement, &refined)?,
        record(Method::AlphaLiftRelaxation, &combined)?,
    ])
}

/// Fraction of `method`'s records with `nmil <= threshold`.
pub fn empirical_cdf(records: &[TrialRecord], method: Method, threshold: f64) -> f64 {
    let (hits, total) = records
        .iter()
        .filter(|r| r.method == method)
        .fold((0usize, 0usize), |(h, t), r| (h + usize::from(r.nmil <= threshold), t + 1));
    if total == 0 {
        f64::NAN
    } else {
        hits as f64 / total as f64
    }
}

/// Nearest-rank quantile: the smallest value with at least `q · n` values at or
/// below it.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Headline statistics of a CDF run for one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfSummary {
    pub method: Method,
    pub trials: usize,
    pub p_nmil_le_0_2: f64,
    pub median_nmil: f64,
    pub realized_delta_p99: f64,
}

pub fn summarize(records: &[TrialRecord]) -> Vec<CdfSummary> {
    [Method::DeltaRefinement, Method::AlphaLiftRelaxation]
        .into_iter()
        .map(|method| {
            let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.method == method).collect();
            let nmils: Vec<f64> = mine.iter().map(|r| r.nmil).collect();
            let deltas: Vec<f64> = mine.iter().map(|r| r.realized_delta).collect();
            CdfSummary {
                method,
                trials: mine.len(),
                p_nmil_le_0_2: empirical_cdf(records, method, 0.2),
                median_nmil: quantile(&nmils, 0.5),
                realized_delta_p99: quantile(&deltas, 0.99),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{max_sibson_mi, sibson_mi};
    use crate::probability::example_joint;

    #[test]
    fn example_orderings() {
        let j = example_joint(0.6).unwrap();
        assert_eq!(alpha_lift_ordering(&j, AlphaParam::finite(1.5).unwrap())[0], 2);
        assert_eq!(alpha_lift_ordering(&j, AlphaParam::Infinity)[0], 3);
    }

    #[test]
    fn equal_lifts_keep_index_order() {
        // identical columns give bit-identical α-lifts
        let j = JointDistribution::from_matrix(&[vec![0.15; 4], vec![0.1; 4]]).unwrap();
        assert_eq!(alpha_lift_ordering(&j, AlphaParam::finite(2.0).unwrap()), [0, 1, 2, 3]);
    }

    #[test]
    fn nmil_endpoints() {
        let j = JointDistribution::random(3, 6, 1).unwrap();
        assert_eq!(nmil(&j, &[]).unwrap(), 0.0);
        assert_eq!(nmil(&j, &[0, 1, 2, 3, 4, 5]).unwrap(), 1.0);
        assert_eq!(nmil(&j, &[4]).unwrap(), 0.0);
        let mid = nmil(&j, &[1, 4]).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn nmil_by_hand() {
        let t = example_joint(0.6).unwrap();
        let p = [0.36f64, 0.07, 0.46, 0.11];
        let h: f64 = -p.iter().map(|v| v * v.ln()).sum::<f64>();
        let i_xy = -(p[0] * p[0].ln() + p[1] * p[1].ln()) - 0.57 * 0.57f64.ln();
        assert!((nmil(&t, &[2, 3]).unwrap() - (h - i_xy) / h).abs() < 1e-14);
    }

    #[test]
    fn nmil_degenerate_entropy() {
        let j = JointDistribution::from_matrix(&[vec![0.4], vec![0.6]]).unwrap();
        assert!(matches!(nmil(&j, &[]), Err(Error::DegenerateEntropy)));
    }

    #[test]
    fn sweep_endpoints() {
        let j = JointDistribution::random(5, 7, 13).unwrap();
        let alphas = [AlphaParam::finite(1.5).unwrap(), AlphaParam::Infinity];
        let pts = put_sweep(&j, &alphas).unwrap();
        assert_eq!(pts.len(), 16);
        for (k, &alpha) in alphas.iter().enumerate() {
            let first = &pts[k * 8];
            let last = &pts[k * 8 + 7];
            assert_eq!(first.cut_index, 0);
            assert_eq!(first.nmil, 0.0);
            assert!((first.min_sibson - sibson_mi(&j, alpha)).abs() < 1e-14);
            assert!((first.min_max_sibson - max_sibson_mi(&j, alpha)).abs() < 1e-14);
            assert_eq!((last.nmil, last.min_sibson, last.min_max_sibson), (1.0, 0.0, 0.0));
            assert_eq!(last.epsilon_equiv, None);
        }
    }

    #[test]
    fn epsilon_equiv_reproduces_cut() {
        let j = JointDistribution::random(4, 9, 2).unwrap();
        let alpha = AlphaParam::finite(2.0).unwrap();
        let order = alpha_lift_ordering(&j, alpha);
        for p in put_sweep(&j, &[alpha]).unwrap() {
            if let Some(eps) = p.epsilon_equiv.filter(|e| *e > 0.0) {
                let part = WatchdogPartition::by_threshold(&j, alpha, eps).unwrap();
                let mut expected = order[..p.cut_index].to_vec();
                expected.sort_unstable();
                assert_eq!(part.high_risk(), expected);
            }
        }
    }

    #[test]
    fn quantile_nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.99), 99.0);
        assert_eq!(quantile(&v, 0.5), 50.0);
        assert_eq!(quantile(&v, 1.0), 100.0);
        assert_eq!(quantile(&[3.0], 0.99), 3.0);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = RelaxationConfig::new(1.0, AlphaParam::finite(10.0).unwrap(), 0.45, 0.01, 4.0).unwrap();
        let a = cdf_trials(3, 15, 20, &cfg, 77).unwrap();
        let b = cdf_trials(3, 15, 20, &cfg, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        // earlier trials do not depend on the trial count
        let one = cdf_trials(1, 15, 20, &cfg, 77).unwrap();
        assert_eq!(one[..], a[..2]);
        for r in &a {
            assert!((0.0..=1.0).contains(&r.nmil));
            assert!((0.0..=1.0).contains(&r.realized_delta));
        }
    }
}
