//! Uniform-sampling feasible-set estimation: one generative query per
//! `(s, a, h)` per round until every confidence radius drops below the
//! target accuracy. Also evaluates the closed-form sample-complexity bounds.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};
use crate::mdp::{Dims, InstanceJson, MdpR, PolicyTable};
use crate::sampling::{build_empirical, GenerativeOracle, SampleDataset};

pub const DEFAULT_MAX_SAMPLES: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    InhomogeneousKnown,
    HomogeneousKnown,
    InhomogeneousUnknown,
    HomogeneousUnknown,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::InhomogeneousKnown,
        Variant::HomogeneousKnown,
        Variant::InhomogeneousUnknown,
        Variant::HomogeneousUnknown,
    ];

    pub fn homogeneous(self) -> bool {
        matches!(self, Variant::HomogeneousKnown | Variant::HomogeneousUnknown)
    }

    pub fn known_policy(self) -> bool {
        matches!(self, Variant::InhomogeneousKnown | Variant::HomogeneousKnown)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Variant::InhomogeneousKnown => "inhomogeneous-known",
            Variant::HomogeneousKnown => "homogeneous-known",
            Variant::InhomogeneousUnknown => "inhomogeneous-unknown",
            Variant::HomogeneousUnknown => "homogeneous-unknown",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag() == tag)
            .ok_or_else(|| IrlError::Invalid(format!("unknown variant `{tag}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub variant: Variant,
    /// Smallest positive expert probability; unknown-policy variants only.
    pub pi_min: Option<f64>,
    /// Total-sample safety cap.
    pub max_samples: u64,
}

impl ConfidenceConfig {
    pub fn new(epsilon: f64, delta: f64, variant: Variant) -> Self {
        ConfidenceConfig {
            epsilon,
            delta,
            variant,
            pi_min: None,
            max_samples: DEFAULT_MAX_SAMPLES,
        }
    }

    pub fn with_pi_min(mut self, pi_min: f64) -> Self {
        self.pi_min = Some(pi_min);
        self
    }

    pub fn validate(&self) -> Result<()> {
        // Accuracies above the reward diameter are accepted; they stop after
        // the first round.
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(IrlError::Invalid(format!("epsilon {} must be positive", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(IrlError::Invalid(format!("delta {} outside (0,1)", self.delta)));
        }
        if !self.variant.known_policy() {
            match self.pi_min {
                Some(p) if p > 0.0 && p <= 1.0 => {}
                Some(p) => return Err(IrlError::Invalid(format!("pi_min {p} outside (0,1]"))),
                None => return Err(IrlError::Invalid("unknown-policy variant needs pi_min".into())),
            }
        }
        Ok(())
    }

    /// Confidence level left for the transition estimate.
    fn transition_delta(&self) -> f64 {
        if self.variant.known_policy() {
            self.delta
        } else {
            self.delta / 2.0
        }
    }
}

/// `(S-1) log(e (1 + n/(S-1)))`, zero for a single state.
fn count_term(n: f64, s: usize) -> f64 {
    if s <= 1 {
        return 0.0;
    }
    let k = (s - 1) as f64;
    k * (E * (1.0 + n / k)).ln()
}

/// `log(SAH/delta) + (S-1) log(e(1 + n/(S-1)))`.
pub fn beta(n: f64, delta: f64, s: usize, a: usize, h: usize) -> f64 {
    ((s * a * h) as f64 / delta).ln() + count_term(n, s)
}

/// `beta` without the horizon factor, for stage-merged counts.
pub fn beta_tilde(n: f64, delta: f64, s: usize, a: usize) -> f64 {
    ((s * a) as f64 / delta).ln() + count_term(n, s)
}

fn policy_log(pi_min: f64) -> f64 {
    (1.0 / (1.0 - pi_min)).ln()
}

/// `log(2 SAH n^2 / delta) / log(1/(1 - pi_min))`; zero once `pi_min = 1`.
pub fn xi(n: f64, delta: f64, s: usize, a: usize, h: usize, pi_min: f64) -> f64 {
    if pi_min >= 1.0 {
        return 0.0;
    }
    (2.0 * (s * a * h) as f64 * n * n / delta).ln() / policy_log(pi_min)
}

pub fn xi_tilde(n: f64, delta: f64, s: usize, a: usize, pi_min: f64) -> f64 {
    if pi_min >= 1.0 {
        return 0.0;
    }
    (2.0 * (s * a) as f64 * n * n / delta).ln() / policy_log(pi_min)
}

/// Confidence radius at `(s, a, h)` (0-based stage) for the current counts.
pub fn confidence(data: &SampleDataset, s: usize, a: usize, h: usize, cfg: &ConfidenceConfig) -> f64 {
    let d = data.dims();
    let weight = (d.h - h) as f64;
    let homogeneous = cfg.variant.homogeneous();
    let n_sa = if homogeneous {
        data.merged_visits(s, a)
    } else {
        data.visits[d.idx(h, s, a)]
    } as f64;
    if n_sa == 0.0 {
        return f64::INFINITY;
    }
    let delta = cfg.transition_delta();
    let b = if homogeneous {
        beta_tilde(n_sa, delta, d.s, d.a)
    } else {
        beta(n_sa, delta, d.s, d.a, d.h)
    };
    let radius = (2.0 * b / n_sa).sqrt();
    if cfg.variant.known_policy() {
        return 2.0 * 2f64.sqrt() * weight * radius;
    }
    let pi_min = cfg.pi_min.unwrap_or(1.0);
    let n_s = if homogeneous {
        data.merged_state_visits(s)
    } else {
        data.state_visits[h * d.s + s]
    } as f64;
    let threshold = if homogeneous {
        xi_tilde(n_s, cfg.delta / 2.0, d.s, d.a, pi_min)
    } else {
        xi(n_s, cfg.delta / 2.0, d.s, d.a, d.h, pi_min)
    };
    let unseen = if n_s < threshold.max(1.0) { 1.0 } else { 0.0 };
    2.0 * weight * (unseen + radius)
}

/// Largest confidence radius over all triples.
pub fn max_confidence(data: &SampleDataset, cfg: &ConfidenceConfig) -> f64 {
    let d = data.dims();
    let mut worst: f64 = 0.0;
    for h in 0..d.h {
        for s in 0..d.s {
            for a in 0..d.a {
                worst = worst.max(confidence(data, s, a, h, cfg));
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: ConfidenceConfig,
    pub seed: u64,
    /// Largest confidence radius after each round.
    pub eps_rounds: Vec<f64>,
    /// Total samples at stop.
    pub tau: u64,
    pub rounds: u64,
    /// The safety cap ended the run before the stopping rule fired.
    pub capped: bool,
    pub empirical: InstanceJson,
}

impl RunTrace {
    pub fn final_eps(&self) -> f64 {
        self.eps_rounds.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn empirical_tables(&self) -> Result<(MdpR, PolicyTable)> {
        self.empirical.to_tables()
    }
}

/// Runs uniform sampling until the stopping rule or the safety cap.
pub fn run_us_irl(oracle: &mut GenerativeOracle, cfg: &ConfidenceConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let d = oracle.dims();
    let per_round = d.len() as u64;
    let mut data = SampleDataset::new(d);
    let mut eps_rounds = Vec::new();
    let mut rounds = 0u64;
    let mut capped = false;
    loop {
        if data.total() + per_round > cfg.max_samples {
            capped = true;
            break;
        }
        for h in 0..d.h {
            for s in 0..d.s {
                for a in 0..d.a {
                    data.collect(oracle, s, a, h)?;
                }
            }
        }
        rounds += 1;
        let eps_t = max_confidence(&data, cfg);
        eps_rounds.push(eps_t);
        if eps_t <= cfg.epsilon {
            break;
        }
    }
    let (m_hat, pi_hat) = build_empirical(&data, cfg.variant.homogeneous())?;
    Ok(RunTrace {
        config: cfg.clone(),
        seed: oracle.seed(),
        eps_rounds,
        tau: data.total(),
        rounds,
        capped,
        empirical: InstanceJson::from_tables(&m_hat, &pi_hat),
    })
}

/// `log(e/(S-1) + 8 e H^2 / ((S-1) eps^2) (L + 4e))` times `S - 1`; zero for
/// one state.
fn inner_log_term(s: usize, h: usize, epsilon: f64, l: f64) -> f64 {
    if s <= 1 {
        return 0.0;
    }
    let k = (s - 1) as f64;
    let hf = h as f64;
    k * (E / k + 8.0 * E * hf * hf / (k * epsilon * epsilon) * (l + 4.0 * E)).ln()
}

/// Closed-form stopping-time bound for the given variant.
pub fn upper_bound_tau(dims: Dims, epsilon: f64, delta: f64, variant: Variant, pi_min: Option<f64>) -> Result<f64> {
    let (s, a, h) = (dims.s, dims.a, dims.h);
    let (sf, af, hf) = (s as f64, a as f64, h as f64);
    let eps2 = epsilon * epsilon;
    let (prefactor, outer, inner) = match variant {
        Variant::InhomogeneousKnown => {
            let l = (sf * af * hf / delta).ln();
            (8.0 * hf.powi(3) * sf * af / eps2, l, l)
        }
        Variant::HomogeneousKnown => {
            let l = (sf * af / delta).ln();
            (8.0 * hf * hf * sf * af / eps2, l, l)
        }
        Variant::InhomogeneousUnknown => (
            8.0 * hf.powi(3) * sf * af / eps2,
            (sf * af * hf / delta).ln(),
            (2.0 * sf * af * hf / delta).ln(),
        ),
        Variant::HomogeneousUnknown => (
            8.0 * hf * hf * sf * af / eps2,
            (sf * af / delta).ln(),
            (2.0 * sf * af / delta).ln(),
        ),
    };
    let transitions = prefactor * (outer + inner_log_term(s, h, epsilon, inner));
    if variant.known_policy() {
        return Ok(transitions);
    }
    let pi_min = pi_min.ok_or_else(|| IrlError::Invalid("unknown-policy bound needs pi_min".into()))?;
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(IrlError::Invalid(format!("pi_min {pi_min} outside (0,1]")));
    }
    let (count, l4) = if variant.homogeneous() {
        (sf, (4.0 * sf * af / delta).ln())
    } else {
        (sf * hf, (4.0 * sf * af * hf / delta).ln())
    };
    let policy = if pi_min >= 1.0 {
        0.0
    } else {
        let pl = policy_log(pi_min);
        let c2 = 2.0 * ((l4 + 2.0) / pl).ln();
        count / pl * (l4 + c2)
    };
    Ok(transitions + sf * hf + policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    /// The parameters satisfy the validity conditions of the bound.
    pub in_range: bool,
}

/// Minimax lower bound for learning the transition part.
pub fn lower_bound_transitions(dims: Dims, epsilon: f64, delta: f64, homogeneous: bool) -> LowerBound {
    let (sf, af, hf) = (dims.s as f64, dims.a as f64, dims.h as f64);
    let body = 0.5 * (1.0 / delta).ln() + sf / 5.0;
    let value = if homogeneous {
        hf * hf * sf * af / (512.0 * epsilon * epsilon) * body
    } else {
        hf.powi(3) * sf * af / (1024.0 * epsilon * epsilon) * body
    };
    let in_range = delta <= 1.0 / 32.0 && dims.s >= 9 && dims.a >= 2 && dims.h >= 12;
    LowerBound { value, in_range }
}

/// Minimax lower bound for detecting the expert's support.
pub fn lower_bound_policy(dims: Dims, epsilon: f64, delta: f64, pi_min: f64, homogeneous: bool) -> LowerBound {
    let (sf, hf) = (dims.s as f64, dims.h as f64);
    let pl = policy_log(pi_min);
    let value = if homogeneous {
        sf / (4.0 * pl) * (1.0 / delta).ln()
    } else {
        sf * hf / (8.0 * pl) * (1.0 / delta).ln()
    };
    let in_range = epsilon <= 0.5 && delta < 1.0 / 16.0 && dims.s >= 7 && dims.a >= 2 && dims.h >= 3;
    LowerBound { value, in_range }
}

/// Lower bound for the variant; unknown-policy variants take the larger of
/// the transition and policy bounds.
pub fn lower_bound_tau(dims: Dims, epsilon: f64, delta: f64, variant: Variant, pi_min: Option<f64>) -> Result<LowerBound> {
    let t = lower_bound_transitions(dims, epsilon, delta, variant.homogeneous());
    if variant.known_policy() {
        return Ok(t);
    }
    let pi_min = pi_min.ok_or_else(|| IrlError::Invalid("unknown-policy bound needs pi_min".into()))?;
    let p = lower_bound_policy(dims, epsilon, delta, pi_min, variant.homogeneous());
    Ok(LowerBound {
        value: t.value.max(p.value),
        in_range: t.in_range && p.in_range,
    })
}
