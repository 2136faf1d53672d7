//! The α-privacy watchdog: split `X` into low-risk symbols that are published
//! as-is and high-risk symbols that are randomized among themselves, and the
//! optimal (X-invariant) randomization of the high-risk block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{log_alpha_norm, AlphaParam, LiftProfile};
use crate::probability::JointDistribution;

/// Row-sum tolerance of a transition matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// The cut `{X_ε, X_ε^c}` for one α.
#[derive(Debug, Clone, PartialEq)]
pub struct WatchdogPartition {
    alpha: AlphaParam,
    epsilon: Option<f64>,
    labels: Vec<String>,
    low_risk: Vec<usize>,
    high_risk: Vec<usize>,
    alpha_lift: Vec<f64>,
    log_alpha_lift: Vec<f64>,
    p_x: Vec<f64>,
    high_risk_mass: f64,
    merged_lift: Option<f64>,
}

impl WatchdogPartition {
    /// Thresholds `i_α(x) = ln ℓ_α(x)` at `epsilon`: `x` is high-risk iff
    /// `i_α(x) > epsilon`. Ties stay low-risk.
    pub fn by_threshold(joint: &JointDistribution, alpha: AlphaParam, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidThreshold(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        let profile = LiftProfile::new(joint, alpha);
        let high: Vec<usize> = (0..joint.num_x())
            .filter(|&x| profile.log_alpha_lift()[x] > epsilon)
            .collect();
        let mut part = Self::build(joint, &profile, &high);
        part.epsilon = Some(epsilon);
        Ok(part)
    }

    /// A cut with an explicitly chosen high-risk set (indices into `X`).
    pub fn from_high_risk(joint: &JointDistribution, alpha: AlphaParam, high_risk: &[usize]) -> Result<Self> {
        let profile = LiftProfile::new(joint, alpha);
        Self::from_profile(joint, &profile, high_risk)
    }

    /// Like [`Self::from_high_risk`] but reuses an existing profile.
    pub fn from_profile(joint: &JointDistribution, profile: &LiftProfile, high_risk: &[usize]) -> Result<Self> {
        let n = joint.num_x();
        let mut seen = vec![false; n];
        for &x in high_risk {
            if x >= n {
                return Err(Error::DimensionMismatch(format!(
                    "high-risk index {x} out of range for |X| = {n}"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidConfig(format!(
                    "symbol '{}' listed twice in the high-risk set",
                    joint.x_labels()[x]
                )));
            }
        }
        let mut sorted = high_risk.to_vec();
        sorted.sort_unstable();
        Ok(Self::build(joint, profile, &sorted))
    }

    fn build(joint: &JointDistribution, profile: &LiftProfile, high: &[usize]) -> Self {
        let n = joint.num_x();
        let mut is_high = vec![false; n];
        high.iter().for_each(|&x| is_high[x] = true);
        let low: Vec<usize> = (0..n).filter(|&x| !is_high[x]).collect();
        let high_risk_mass = if low.is_empty() {
            1.0
        } else {
            high.iter().map(|&x| joint.p_x()[x]).sum()
        };
        Self {
            alpha: profile.alpha(),
            epsilon: None,
            labels: joint.x_labels().to_vec(),
            low_risk: low,
            high_risk: high.to_vec(),
            alpha_lift: profile.alpha_lift().to_vec(),
            log_alpha_lift: profile.log_alpha_lift().to_vec(),
            p_x: joint.p_x().to_vec(),
            high_risk_mass,
            merged_lift: merged_lift(joint, high, profile.alpha()),
        }
    }

    pub fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    /// The threshold, when the cut came from [`Self::by_threshold`].
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `X_ε`, ascending.
    pub fn low_risk(&self) -> &[usize] {
        &self.low_risk
    }

    /// `X_ε^c`, ascending.
    pub fn high_risk(&self) -> &[usize] {
        &self.high_risk
    }

    pub fn is_high_risk(&self, x: usize) -> bool {
        self.high_risk.binary_search(&x).is_ok()
    }

    /// `p(X_ε^c)`; exactly 1 when every symbol is high-risk.
    pub fn high_risk_mass(&self) -> f64 {
        self.high_risk_mass
    }

    /// `ℓ̄_α`, absent when the high-risk set is empty.
    pub fn merged_lift(&self) -> Option<f64> {
        self.merged_lift
    }

    /// `ℓ_α(x)` of the input symbols.
    pub fn alpha_lift(&self) -> &[f64] {
        &self.alpha_lift
    }

    pub fn log_alpha_lift(&self) -> &[f64] {
        &self.log_alpha_lift
    }
}

/// Free-function form of [`WatchdogPartition::by_threshold`].
pub fn partition(joint: &JointDistribution, alpha: AlphaParam, epsilon: f64) -> Result<WatchdogPartition> {
    WatchdogPartition::by_threshold(joint, alpha, epsilon)
}

/// α-lift of the merged super-symbol `set`:
/// `ℓ̄_α = (Σ_s p(s) (p(set|s) / p(set))^α)^{1/α}`, or the max ratio at infinity.
///
/// `None` for an empty set; exactly 1 when `set` is all of `X`.
pub fn merged_lift(joint: &JointDistribution, set: &[usize], alpha: AlphaParam) -> Option<f64> {
    if set.is_empty() {
        return None;
    }
    if set.len() == joint.num_x() {
        return Some(1.0);
    }
    let p_s = joint.p_s();
    let mass_given_s: Vec<f64> = (0..joint.num_s())
        .map(|s| set.iter().map(|&x| joint.get(s, x)).sum::<f64>() / p_s[s])
        .collect();
    let mass: f64 = set.iter().map(|&x| joint.p_x()[x]).sum();
    if mass <= 0.0 {
        return None;
    }
    Some(match alpha {
        AlphaParam::Infinity => mass_given_s.iter().fold(0.0f64, |m, &v| m.max(v)) / mass,
        AlphaParam::Finite(_) => {
            let ln_mass = mass.ln();
            log_alpha_norm(p_s, |s| safe_ln(mass_given_s[s]) - ln_mass, alpha).exp()
        }
    })
}

fn safe_ln(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// A channel `p(y|x)`; rows are inputs, columns outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub transition: Vec<Vec<f64>>,
}

impl Mechanism {
    pub fn new(input_labels: Vec<String>, output_labels: Vec<String>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self {
            input_labels,
            output_labels,
            transition,
        };
        m.check()?;
        Ok(m)
    }

    pub fn identity(labels: &[String]) -> Self {
        let n = labels.len();
        let transition = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            input_labels: labels.to_vec(),
            output_labels: labels.to_vec(),
            transition,
        }
    }

    /// Checks shape, entry range and row sums.
    pub fn check(&self) -> Result<()> {
        if self.transition.len() != self.input_labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} transition rows for {} input labels",
                self.transition.len(),
                self.input_labels.len()
            )));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != self.output_labels.len() {
                return Err(Error::DimensionMismatch(format!(
                    "transition row {i} has {} entries for {} output labels",
                    row.len(),
                    self.output_labels.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidMechanism(format!(
                    "entry {v} in row {i} is outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidMechanism(format!("row {i} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_labels.len()
    }

    /// `p(y | x)`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.transition[x][y]
    }

    /// Whether this channel has the watchdog block form for `part`: identity on
    /// the low-risk symbols and high-risk rows supported on high-risk columns.
    pub fn is_watchdog_form(&self, part: &WatchdogPartition) -> bool {
        let n = part.labels().len();
        if self.num_inputs() != n || self.num_outputs() != n {
            return false;
        }
        (0..n).all(|x| {
            (0..n).all(|y| {
                let v = self.get(x, y);
                match (part.is_high_risk(x), part.is_high_risk(y)) {
                    (false, _) => v == if x == y { 1.0 } else { 0.0 },
                    (true, false) => v == 0.0,
                    (true, true) => true,
                }
            })
        })
    }
}

/// The watchdog channel with `r(y|x) = R(y)` on the high-risk block.
///
/// `r` is indexed like `part.high_risk()`; `None` means uniform.
pub fn x_invariant_mechanism(part: &WatchdogPartition, r: Option<&[f64]>) -> Result<Mechanism> {
    let high = part.high_risk();
    let weights: Vec<f64> = match r {
        None => vec![1.0 / high.len() as f64; high.len()],
        Some(r) => {
            if r.len() != high.len() {
                return Err(Error::BadR(format!(
                    "{} weights for {} high-risk symbols",
                    r.len(),
                    high.len()
                )));
            }
            if let Some(v) = r.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::BadR(format!("weight {v} is not a probability")));
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::BadR(format!("weights sum to {sum}")));
            }
            r.to_vec()
        }
    };
    let mut mech = Mechanism::identity(part.labels());
    for &x in high {
        mech.transition[x][x] = 0.0;
        for (&y, &w) in high.iter().zip(&weights) {
            mech.transition[x][y] = w;
        }
    }
    Ok(mech)
}

/// `p(s, y) = Σ_x p(s, x) p(y|x)` along the chain `S − X − Y`.
///
/// The output keeps every label of the mechanism; outputs that are never
/// produced have a zero column.
pub fn apply_mechanism(joint: &JointDistribution, mech: &Mechanism) -> Result<JointDistribution> {
    if mech.num_inputs() != joint.num_x() {
        return Err(Error::DimensionMismatch(format!(
            "mechanism has {} inputs but |X| = {}",
            mech.num_inputs(),
            joint.num_x()
        )));
    }
    let ny = mech.num_outputs();
    let mut pmf = vec![0.0; joint.num_s() * ny];
    for s in 0..joint.num_s() {
        for (x, &p) in joint.row(s).iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for y in 0..ny {
                pmf[s * ny + y] += p * mech.get(x, y);
            }
        }
    }
    Ok(JointDistribution::from_parts(
        joint.s_labels().to_vec(),
        mech.output_labels.clone(),
        pmf,
        joint.tol(),
    ))
}

/// `ℓ_α(y)` for every output, from `p(y|s) = Σ_x p(y|x) p(x|s)` and
/// `p(y) = Σ_x p(y|x) p(x)`. Outputs with `p(y) = 0` get 0.
pub fn output_alpha_lift(joint: &JointDistribution, mech: &Mechanism, alpha: AlphaParam) -> Result<Vec<f64>> {
    if mech.num_inputs() != joint.num_x() {
        return Err(Error::DimensionMismatch(format!(
            "mechanism has {} inputs but |X| = {}",
            mech.num_inputs(),
            joint.num_x()
        )));
    }
    let (p_s, p_x) = joint.marginals();
    let out = (0..mech.num_outputs())
        .map(|y| {
            let p_y: f64 = (0..joint.num_x()).map(|x| mech.get(x, y) * p_x[x]).sum();
            if p_y <= 0.0 {
                return 0.0;
            }
            let y_given_s: Vec<f64> = (0..joint.num_s())
                .map(|s| {
                    (0..joint.num_x())
                        .map(|x| mech.get(x, y) * joint.x_given_s(s, x))
                        .sum()
                })
                .collect();
            match alpha {
                AlphaParam::Infinity => y_given_s.iter().fold(0.0f64, |m, &v| m.max(v)) / p_y,
                AlphaParam::Finite(_) => {
                    let ln_py = p_y.ln();
                    log_alpha_norm(p_s, |s| safe_ln(y_given_s[s]) - ln_py, alpha).exp()
                }
            }
        })
        .collect();
    Ok(out)
}

/// Whether `(ε′, α)`-log-lift is attainable on the high-risk set, i.e.
/// `epsilon_prime ≥ ln ℓ̄_α`.
pub fn attainable(part: &WatchdogPartition, epsilon_prime: f64) -> Result<bool> {
    let merged = part.merged_lift().ok_or(Error::EmptyHighRisk)?;
    Ok(epsilon_prime >= merged.ln())
}

/// Smallest achievable leakage over all watchdog randomizations of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalLeakage {
    /// `min_r Ī_α^S(S;Y)`.
    pub min_max_sibson: f64,
    /// `min_r I_α^S(S;Y)`.
    pub min_sibson: f64,
}

/// Closed-form optimal leakages of the cut `part`:
/// `prefactor · ln max{max_{x∈X_ε} ℓ_α(x), ℓ̄_α}` and
/// `prefactor · ln[Σ_{x∈X_ε} p(x) ℓ_α(x) + p(X_ε^c) ℓ̄_α]`.
pub fn optimal_leakage(part: &WatchdogPartition) -> OptimalLeakage {
    let prefactor = part.alpha().prefactor();
    let merged = part.merged_lift();
    let worst_low = part
        .low_risk()
        .iter()
        .map(|&x| part.log_alpha_lift()[x])
        .fold(f64::NEG_INFINITY, f64::max);
    let worst = merged.map_or(worst_low, |m| worst_low.max(m.ln()));
    let mut expected: f64 = part
        .low_risk()
        .iter()
        .map(|&x| part.p_x[x] * part.alpha_lift()[x])
        .sum();
    if let Some(m) = merged {
        expected += part.high_risk_mass() * m;
    }
    OptimalLeakage {
        min_max_sibson: prefactor * worst,
        min_sibson: prefactor * expected.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{max_sibson_mi, sibson_mi};
    use crate::probability::example_joint;

    fn a(v: f64) -> AlphaParam {
        AlphaParam::finite(v).unwrap()
    }

    #[test]
    fn threshold_above_every_alpha_lift_is_empty() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::by_threshold(&j, a(1.5), 1.2f64.ln()).unwrap();
        assert!(p.high_risk().is_empty());
        assert_eq!(p.low_risk(), [0, 1, 2, 3]);
        assert_eq!(p.merged_lift(), None);
        assert!(matches!(attainable(&p, 1.0), Err(Error::EmptyHighRisk)));
    }

    #[test]
    fn tiny_threshold_merges_everything() {
        let j = JointDistribution::random(4, 6, 11).unwrap();
        let p = WatchdogPartition::by_threshold(&j, a(2.0), 1e-300).unwrap();
        assert_eq!(p.high_risk().len(), 6);
        assert_eq!(p.merged_lift(), Some(1.0));
        assert!(attainable(&p, 0.0).unwrap());
    }

    #[test]
    fn threshold_must_be_positive() {
        let j = example_joint(0.6).unwrap();
        assert!(WatchdogPartition::by_threshold(&j, a(2.0), 0.0).is_err());
        assert!(WatchdogPartition::by_threshold(&j, a(2.0), -1.0).is_err());
        assert!(WatchdogPartition::by_threshold(&j, a(2.0), f64::NAN).is_err());
    }

    #[test]
    fn ties_stay_low_risk() {
        let j = example_joint(0.6).unwrap();
        let prof = LiftProfile::new(&j, a(2.0));
        let eps = prof.log_alpha_lift()[2];
        let p = WatchdogPartition::by_threshold(&j, a(2.0), eps).unwrap();
        assert!(!p.is_high_risk(2));
    }

    #[test]
    fn merged_lift_of_c_and_d() {
        let j = example_joint(0.6).unwrap();
        let prof = LiftProfile::new(&j, a(2.0));
        let mut logs: Vec<f64> = prof.log_alpha_lift().to_vec();
        logs.sort_by(|x, y| y.total_cmp(x));
        // {c, d} are the two largest ℓ_2
        let eps = 0.5 * (logs[1] + logs[2]);
        let p = WatchdogPartition::by_threshold(&j, a(2.0), eps).unwrap();
        assert_eq!(p.high_risk(), [2, 3]);
        // p(X^c|S=1) = 0.75, p(X^c|S=2) = 0.3, p(X^c) = 0.57
        let expected = (0.6 * (0.75f64 / 0.57).powi(2) + 0.4 * (0.3f64 / 0.57).powi(2)).sqrt();
        assert!((p.merged_lift().unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.07219).abs() < 5e-6);
        let inf = merged_lift(&j, &[2, 3], AlphaParam::Infinity).unwrap();
        assert!((inf - 0.75 / 0.57).abs() < 1e-14);
    }

    #[test]
    fn x_invariant_rows() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[2, 3]).unwrap();
        let m = x_invariant_mechanism(&p, None).unwrap();
        assert_eq!(m.transition[2], [0.0, 0.0, 0.5, 0.5]);
        assert_eq!(m.transition[3], [0.0, 0.0, 0.5, 0.5]);
        assert_eq!(m.transition[0], [1.0, 0.0, 0.0, 0.0]);
        assert!(m.is_watchdog_form(&p));

        let m = x_invariant_mechanism(&p, Some(&[0.3, 0.7])).unwrap();
        assert_eq!(m.transition[2], [0.0, 0.0, 0.3, 0.7]);
        assert_eq!(m.transition[3], [0.0, 0.0, 0.3, 0.7]);
        let out = output_alpha_lift(&j, &m, a(2.0)).unwrap();
        let merged = p.merged_lift().unwrap();
        assert!((out[2] - merged).abs() < 1e-12);
        assert!((out[3] - merged).abs() < 1e-12);
    }

    #[test]
    fn bad_r_is_rejected() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[2, 3]).unwrap();
        assert!(matches!(x_invariant_mechanism(&p, Some(&[0.5])), Err(Error::BadR(_))));
        assert!(matches!(x_invariant_mechanism(&p, Some(&[0.5, 0.6])), Err(Error::BadR(_))));
        assert!(matches!(x_invariant_mechanism(&p, Some(&[1.5, -0.5])), Err(Error::BadR(_))));
    }

    #[test]
    fn empty_high_risk_gives_identity() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[]).unwrap();
        let m = x_invariant_mechanism(&p, None).unwrap();
        assert_eq!(m, Mechanism::identity(j.x_labels()));
        let out = apply_mechanism(&j, &m).unwrap();
        assert_eq!(out, j);
        let lifts = output_alpha_lift(&j, &m, a(2.0)).unwrap();
        let direct = LiftProfile::new(&j, a(2.0));
        for (u, v) in lifts.iter().zip(direct.alpha_lift()) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn full_merge_makes_outputs_independent() {
        let j = JointDistribution::random(3, 5, 2).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[0, 1, 2, 3, 4]).unwrap();
        let out = apply_mechanism(&j, &x_invariant_mechanism(&p, None).unwrap()).unwrap();
        for s in 0..3 {
            for y in 0..5 {
                assert!((out.get(s, y) - j.p_s()[s] / 5.0).abs() < 1e-15);
            }
        }
        let leak = optimal_leakage(&p);
        assert_eq!(leak.min_max_sibson, 0.0);
        assert_eq!(leak.min_sibson, 0.0);
    }

    #[test]
    fn markov_sum_by_hand() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[2, 3]).unwrap();
        let out = apply_mechanism(&j, &x_invariant_mechanism(&p, None).unwrap()).unwrap();
        assert!((out.get(0, 2) - 0.225).abs() < 1e-15);
        assert!((out.get(0, 3) - 0.225).abs() < 1e-15);
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let j = example_joint(0.6).unwrap();
        let m = Mechanism::identity(&["a".to_string(), "b".to_string()]);
        assert!(matches!(apply_mechanism(&j, &m), Err(Error::DimensionMismatch(_))));
        assert!(matches!(output_alpha_lift(&j, &m, a(2.0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn mechanism_checks() {
        let l = vec!["a".to_string(), "b".to_string()];
        assert!(Mechanism::new(l.clone(), l.clone(), vec![vec![0.5, 0.5], vec![0.0, 1.0]]).is_ok());
        assert!(Mechanism::new(l.clone(), l.clone(), vec![vec![0.5, 0.6], vec![0.0, 1.0]]).is_err());
        assert!(Mechanism::new(l.clone(), l.clone(), vec![vec![1.5, -0.5], vec![0.0, 1.0]]).is_err());
        assert!(Mechanism::new(l.clone(), l, vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn attainability_boundary() {
        let j = example_joint(0.6).unwrap();
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[2, 3]).unwrap();
        let bound = p.merged_lift().unwrap().ln();
        assert!(attainable(&p, bound).unwrap());
        assert!(!attainable(&p, bound - 1e-6).unwrap());
    }

    #[test]
    fn empty_cut_leakage_is_unsanitized() {
        let j = JointDistribution::random(4, 7, 5).unwrap();
        for alpha in [a(1.5), a(2.0), AlphaParam::Infinity] {
            let p = WatchdogPartition::from_high_risk(&j, alpha, &[]).unwrap();
            let leak = optimal_leakage(&p);
            assert!((leak.min_max_sibson - max_sibson_mi(&j, alpha)).abs() < 1e-14);
            assert!((leak.min_sibson - sibson_mi(&j, alpha)).abs() < 1e-14);
        }
    }

    #[test]
    fn optimal_leakage_matches_mechanism_side() {
        let j = JointDistribution::random(4, 5, 21).unwrap();
        let alpha = a(2.0);
        let p = WatchdogPartition::from_high_risk(&j, alpha, &[1, 3, 4]).unwrap();
        let mech = x_invariant_mechanism(&p, None).unwrap();
        let out = apply_mechanism(&j, &mech).unwrap();
        let prof = LiftProfile::new(&out, alpha);
        let leak = optimal_leakage(&p);
        assert!((leak.min_max_sibson - prof.max_sibson_mi()).abs() < 1e-10);
        assert!((leak.min_sibson - prof.sibson_mi(&out)).abs() < 1e-10);
    }

    #[test]
    fn from_high_risk_validates_indices() {
        let j = example_joint(0.6).unwrap();
        assert!(WatchdogPartition::from_high_risk(&j, a(2.0), &[4]).is_err());
        assert!(WatchdogPartition::from_high_risk(&j, a(2.0), &[1, 1]).is_err());
        let p = WatchdogPartition::from_high_risk(&j, a(2.0), &[3, 1]).unwrap();
        assert_eq!(p.high_risk(), [1, 3]);
    }
}
