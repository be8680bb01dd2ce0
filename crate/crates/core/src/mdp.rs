//! Tabular finite-horizon MDPs without reward, policies, rewards and exact
//! backward induction.
//!
//! Stages are 0-based in this API (`h = 0` is the first decision stage);
//! human-facing reports add one. All tables are flattened with the stage as
//! the slowest index: `(h, s, a)` maps to `(h * S + s) * A + a`.

use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};

/// Tolerance on probability rows summing to one.
pub const STOCH_TOL: f64 = 1e-12;
/// Tolerance on Bellman residuals.
pub const BELLMAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub s: usize,
    pub a: usize,
    pub h: usize,
}

impl Dims {
    pub fn new(s: usize, a: usize, h: usize) -> Self {
        Dims { s, a, h }
    }

    /// Number of reward coordinates `S * A * H`.
    pub fn len(&self) -> usize {
        self.s * self.a * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.s + s) * self.a + a
    }

    /// Inverse of [`Dims::idx`].
    pub fn unflatten(&self, i: usize) -> (usize, usize, usize) {
        let a = i % self.a;
        let s = (i / self.a) % self.s;
        let h = i / (self.a * self.s);
        (h, s, a)
    }

    fn check(&self) -> Result<()> {
        if self.s == 0 || self.a == 0 || self.h == 0 {
            return Err(IrlError::Invalid(format!(
                "S, A, H must be positive (got {}, {}, {})",
                self.s, self.a, self.h
            )));
        }
        Ok(())
    }
}

fn check_row(row: &[f64], context: impl FnOnce() -> String) -> Result<()> {
    let mut sum = 0.0;
    for &x in row {
        if !x.is_finite() || x < 0.0 {
            return Err(IrlError::Distribution {
                context: context(),
                detail: format!("entry {x} is negative or not finite"),
            });
        }
        sum += x;
    }
    if (sum - 1.0).abs() > STOCH_TOL {
        return Err(IrlError::Distribution {
            context: context(),
            detail: format!("sums to {sum}"),
        });
    }
    Ok(())
}

/// Finite-horizon MDP without reward. Kernels are validated on construction
/// and immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpR {
    dims: Dims,
    p: Vec<f64>,
    homogeneous: bool,
}

impl MdpR {
    /// `p` is indexed `[h][s][a][s']`, flattened.
    pub fn new(dims: Dims, p: Vec<f64>, homogeneous: bool) -> Result<Self> {
        dims.check()?;
        let row = dims.s;
        if p.len() != dims.len() * row {
            return Err(IrlError::Dimension(format!(
                "transition table has {} entries, expected {}",
                p.len(),
                dims.len() * row
            )));
        }
        for h in 0..dims.h {
            for s in 0..dims.s {
                for a in 0..dims.a {
                    let start = dims.idx(h, s, a) * row;
                    check_row(&p[start..start + row], || {
                        format!("p[h={h}][s={s}][a={a}]")
                    })?;
                }
            }
        }
        if homogeneous {
            let stage = dims.s * dims.a * row;
            for h in 1..dims.h {
                if p[h * stage..(h + 1) * stage] != p[..stage] {
                    return Err(IrlError::Invalid(format!(
                        "homogeneous flag set but stage {h} kernel differs from stage 0"
                    )));
                }
            }
        }
        Ok(MdpR { dims, p, homogeneous })
    }

    /// Replicates a single `[s][a][s']` kernel over all stages.
    pub fn homogeneous(dims: Dims, kernel: &[f64]) -> Result<Self> {
        let mut p = Vec::with_capacity(kernel.len() * dims.h);
        for _ in 0..dims.h {
            p.extend_from_slice(kernel);
        }
        MdpR::new(dims, p, true)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Next-state distribution `p_h(. | s, a)`.
    #[inline]
    pub fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let start = self.dims.idx(h, s, a) * self.dims.s;
        &self.p[start..start + self.dims.s]
    }

    pub fn prob(&self, h: usize, s: usize, a: usize, s2: usize) -> f64 {
        self.row(h, s, a)[s2]
    }

    pub fn table(&self) -> &[f64] {
        &self.p
    }

    /// Expected next value `sum_s' p_h(s'|s,a) v(s')`.
    #[inline]
    pub fn expect(&self, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
        self.row(h, s, a).iter().zip(v).map(|(p, x)| p * x).sum()
    }
}

/// Stage-dependent state-conditioned action distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    dims: Dims,
    probs: Vec<f64>,
    homogeneous: bool,
}

impl PolicyTable {
    /// `probs` is indexed `[h][s][a]`, flattened.
    pub fn new(dims: Dims, probs: Vec<f64>, homogeneous: bool) -> Result<Self> {
        dims.check()?;
        if probs.len() != dims.len() {
            return Err(IrlError::Dimension(format!(
                "policy table has {} entries, expected {}",
                probs.len(),
                dims.len()
            )));
        }
        for h in 0..dims.h {
            for s in 0..dims.s {
                let start = dims.idx(h, s, 0);
                check_row(&probs[start..start + dims.a], || format!("pi[h={h}][s={s}]"))?;
            }
        }
        if homogeneous {
            let stage = dims.s * dims.a;
            for h in 1..dims.h {
                if probs[h * stage..(h + 1) * stage] != probs[..stage] {
                    return Err(IrlError::Invalid(format!(
                        "homogeneous policy differs at stage {h}"
                    )));
                }
            }
        }
        Ok(PolicyTable { dims, probs, homogeneous })
    }

    /// Deterministic policy from `actions[h][s]`.
    pub fn deterministic(dims: Dims, actions: &[Vec<usize>]) -> Result<Self> {
        if actions.len() != dims.h || actions.iter().any(|row| row.len() != dims.s) {
            return Err(IrlError::Dimension("action table must be [H][S]".into()));
        }
        let mut probs = vec![0.0; dims.len()];
        for (h, row) in actions.iter().enumerate() {
            for (s, &a) in row.iter().enumerate() {
                if a >= dims.a {
                    return Err(IrlError::Invalid(format!("action {a} out of range")));
                }
                probs[dims.idx(h, s, a)] = 1.0;
            }
        }
        let homogeneous = actions.windows(2).all(|w| w[0] == w[1]);
        PolicyTable::new(dims, probs, homogeneous)
    }

    /// Same action in a state at every stage.
    pub fn stationary(dims: Dims, actions: &[usize]) -> Result<Self> {
        PolicyTable::deterministic(dims, &vec![actions.to_vec(); dims.h])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    #[inline]
    pub fn prob(&self, h: usize, s: usize, a: usize) -> f64 {
        self.probs[self.dims.idx(h, s, a)]
    }

    pub fn dist(&self, h: usize, s: usize) -> &[f64] {
        let start = self.dims.idx(h, s, 0);
        &self.probs[start..start + self.dims.a]
    }

    pub fn table(&self) -> &[f64] {
        &self.probs
    }

    /// Whether the policy plays `a` at `(s, h)` with positive probability.
    #[inline]
    pub fn supports(&self, h: usize, s: usize, a: usize) -> bool {
        self.prob(h, s, a) > 0.0
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0 || p == 1.0)
    }

    /// Smallest positive action probability.
    pub fn min_positive(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(1.0, f64::min)
    }
}

/// Structural restriction on a reward function.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Restriction {
    #[default]
    None,
    StateOnly,
    TimeHomogeneous,
    /// Margins for unsupported actions: either `H` per-stage values or
    /// `H * S` per-(stage, state) values indexed `[h][s]`.
    BetaMargin(Vec<f64>),
}

impl Restriction {
    pub fn tag(&self) -> &'static str {
        match self {
            Restriction::None => "none",
            Restriction::StateOnly => "state-only",
            Restriction::TimeHomogeneous => "time-homogeneous",
            Restriction::BetaMargin(_) => "beta-margin",
        }
    }

    pub fn from_tag(tag: &str, beta: Option<Vec<f64>>) -> Result<Self> {
        match tag {
            "none" => Ok(Restriction::None),
            "state-only" => Ok(Restriction::StateOnly),
            "time-homogeneous" => Ok(Restriction::TimeHomogeneous),
            "beta-margin" => beta
                .map(Restriction::BetaMargin)
                .ok_or_else(|| IrlError::Invalid("beta-margin requires beta values".into())),
            other => Err(IrlError::Invalid(format!("unknown restriction '{other}'"))),
        }
    }

    pub fn beta(&self) -> Option<&[f64]> {
        match self {
            Restriction::BetaMargin(b) => Some(b),
            _ => None,
        }
    }

    /// Margin required at `(h, s)`; zero without a margin restriction.
    pub fn margin(&self, dims: Dims, h: usize, s: usize) -> f64 {
        match self {
            Restriction::BetaMargin(b) if b.len() == dims.h => b[h],
            Restriction::BetaMargin(b) => b[h * dims.s + s],
            _ => 0.0,
        }
    }

    pub(crate) fn check_margins(&self, dims: Dims) -> Result<()> {
        if let Restriction::BetaMargin(beta) = self {
            let ok_len = beta.len() == dims.h || beta.len() == dims.h * dims.s;
            if !ok_len || beta.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
                return Err(IrlError::Invalid(
                    "beta-margin needs H or H*S finite non-negative margins".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Reward function bounded in `[-1, 1]`, indexed `[h][s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    dims: Dims,
    r: Vec<f64>,
    restriction: Restriction,
}

impl RewardTable {
    pub fn new(dims: Dims, r: Vec<f64>, restriction: Restriction) -> Result<Self> {
        dims.check()?;
        if r.len() != dims.len() {
            return Err(IrlError::Dimension(format!(
                "reward table has {} entries, expected {}",
                r.len(),
                dims.len()
            )));
        }
        if let Some(i) = r.iter().position(|x| !x.is_finite() || x.abs() > 1.0 + STOCH_TOL) {
            let (h, s, a) = dims.unflatten(i);
            return Err(IrlError::Invalid(format!(
                "reward {} at (h={h}, s={s}, a={a}) outside [-1, 1]",
                r[i]
            )));
        }
        match &restriction {
            Restriction::StateOnly => {
                for h in 0..dims.h {
                    for s in 0..dims.s {
                        let base = r[dims.idx(h, s, 0)];
                        if (1..dims.a).any(|a| r[dims.idx(h, s, a)] != base) {
                            return Err(IrlError::Invalid(format!(
                                "state-only reward depends on the action at (h={h}, s={s})"
                            )));
                        }
                    }
                }
            }
            Restriction::TimeHomogeneous => {
                let stage = dims.s * dims.a;
                if (1..dims.h).any(|h| r[h * stage..(h + 1) * stage] != r[..stage]) {
                    return Err(IrlError::Invalid(
                        "time-homogeneous reward differs across stages".into(),
                    ));
                }
            }
            Restriction::BetaMargin(_) => restriction.check_margins(dims)?,
            Restriction::None => {}
        }
        Ok(RewardTable { dims, r, restriction })
    }

    pub fn zeros(dims: Dims) -> Self {
        RewardTable {
            dims,
            r: vec![0.0; dims.len()],
            restriction: Restriction::None,
        }
    }

    /// Reward depending only on `(s, a)`, replicated over stages.
    pub fn stationary(dims: Dims, per_state_action: &[f64]) -> Result<Self> {
        let mut r = Vec::with_capacity(dims.len());
        for _ in 0..dims.h {
            r.extend_from_slice(per_state_action);
        }
        RewardTable::new(dims, r, Restriction::None)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.r[self.dims.idx(h, s, a)]
    }
}

/// Q and V tables from backward induction; `V_{H}` (one past the last
/// stage) is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSet {
    dims: Dims,
    q: Vec<f64>,
    v: Vec<f64>,
}

impl ValueSet {
    #[inline]
    pub fn q(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q[self.dims.idx(h, s, a)]
    }

    /// `h` ranges over `0..=H`; the final stage is zero.
    #[inline]
    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.v[h * self.dims.s + s]
    }

    pub fn v_stage(&self, h: usize) -> &[f64] {
        &self.v[h * self.dims.s..(h + 1) * self.dims.s]
    }

    pub fn q_table(&self) -> &[f64] {
        &self.q
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Largest `|Q_h - r_h - p_h V_{h+1}|` over all triples.
    pub fn bellman_residual(&self, m: &MdpR, r: &[f64]) -> f64 {
        let d = self.dims;
        let mut worst: f64 = 0.0;
        for h in 0..d.h {
            let next = self.v_stage(h + 1);
            for s in 0..d.s {
                for a in 0..d.a {
                    let i = d.idx(h, s, a);
                    worst = worst.max((self.q[i] - r[i] - m.expect(h, s, a, next)).abs());
                }
            }
        }
        worst
    }
}

fn same_dims(m: &MdpR, other: Dims, what: &str) -> Result<()> {
    if m.dims() != other {
        return Err(IrlError::Dimension(format!(
            "{what} has dims {:?}, MDP has {:?}",
            other,
            m.dims()
        )));
    }
    Ok(())
}

enum Backup<'a> {
    Policy(&'a PolicyTable),
    Max,
    /// Minimum over the allowed actions; mask indexed like rewards.
    MinOver(&'a [bool]),
}

fn backward(m: &MdpR, r: &[f64], backup: Backup) -> ValueSet {
    let d = m.dims();
    let mut q = vec![0.0; d.len()];
    let mut v = vec![0.0; (d.h + 1) * d.s];
    for h in (0..d.h).rev() {
        let (head, tail) = v.split_at_mut((h + 1) * d.s);
        let next = &tail[..d.s];
        for s in 0..d.s {
            for a in 0..d.a {
                let i = d.idx(h, s, a);
                q[i] = r[i] + m.expect(h, s, a, next);
            }
            let qs = &q[d.idx(h, s, 0)..d.idx(h, s, 0) + d.a];
            head[h * d.s + s] = match backup {
                Backup::Policy(pi) => pi.dist(h, s).iter().zip(qs).map(|(p, x)| p * x).sum(),
                Backup::Max => qs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                Backup::MinOver(mask) => qs
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| mask[d.idx(h, s, *a)])
                    .map(|(_, &x)| x)
                    .fold(f64::INFINITY, f64::min),
            };
        }
    }
    ValueSet { dims: d, q, v }
}

/// Policy evaluation on a raw reward vector (no bound check).
pub fn evaluate_policy_raw(m: &MdpR, pi: &PolicyTable, r: &[f64]) -> Result<ValueSet> {
    same_dims(m, pi.dims(), "policy")?;
    if r.len() != m.dims().len() {
        return Err(IrlError::Dimension("reward vector length".into()));
    }
    Ok(backward(m, r, Backup::Policy(pi)))
}

/// Optimal values on a raw reward vector.
pub fn optimal_values_raw(m: &MdpR, r: &[f64]) -> Result<ValueSet> {
    if r.len() != m.dims().len() {
        return Err(IrlError::Dimension("reward vector length".into()));
    }
    Ok(backward(m, r, Backup::Max))
}

/// Pointwise-minimal values over policies restricted to `allowed[h][s][a]`.
/// Every `(h, s)` must allow at least one action.
pub fn min_values_over(m: &MdpR, r: &[f64], allowed: &[bool]) -> Result<ValueSet> {
    let d = m.dims();
    if r.len() != d.len() || allowed.len() != d.len() {
        return Err(IrlError::Dimension("reward or mask length".into()));
    }
    for h in 0..d.h {
        for s in 0..d.s {
            if !(0..d.a).any(|a| allowed[d.idx(h, s, a)]) {
                return Err(IrlError::Invalid(format!("no allowed action at (h={h}, s={s})")));
            }
        }
    }
    Ok(backward(m, r, Backup::MinOver(allowed)))
}

pub fn evaluate_policy(m: &MdpR, pi: &PolicyTable, r: &RewardTable) -> Result<ValueSet> {
    same_dims(m, r.dims(), "reward")?;
    evaluate_policy_raw(m, pi, r.values())
}

pub fn optimal_values(m: &MdpR, r: &RewardTable) -> Result<ValueSet> {
    same_dims(m, r.dims(), "reward")?;
    optimal_values_raw(m, r.values())
}

/// `A_h(s,a) = Q_h(s,a) - V_h(s)`, indexed like rewards.
pub fn advantage_raw(m: &MdpR, pi: &PolicyTable, r: &[f64]) -> Result<Vec<f64>> {
    let vs = evaluate_policy_raw(m, pi, r)?;
    let d = m.dims();
    let mut adv = vs.q.clone();
    for h in 0..d.h {
        for s in 0..d.s {
            let v = vs.v(h, s);
            for a in 0..d.a {
                adv[d.idx(h, s, a)] -= v;
            }
        }
    }
    Ok(adv)
}

pub fn advantage(m: &MdpR, pi: &PolicyTable, r: &RewardTable) -> Result<Vec<f64>> {
    same_dims(m, r.dims(), "reward")?;
    advantage_raw(m, pi, r.values())
}

/// Greedy deterministic policy on a Q table; ties go to the lowest action.
pub fn greedy_policy(vs: &ValueSet) -> PolicyTable {
    let d = vs.dims;
    let mut actions = vec![vec![0; d.s]; d.h];
    for (h, row) in actions.iter_mut().enumerate() {
        for (s, best) in row.iter_mut().enumerate() {
            for a in 1..d.a {
                if vs.q(h, s, a) > vs.q(h, s, *best) {
                    *best = a;
                }
            }
        }
    }
    PolicyTable::deterministic(d, &actions).expect("greedy policy is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Largest positive advantage or bound excess; zero when none.
    pub max_violation: f64,
    /// Triple `(h, s, a)` attaining the violation, if any.
    pub worst: Option<(usize, usize, usize)>,
}

/// Checks `A^{pi_e}_h(s,a; r) <= tol` everywhere and `|r| <= 1 + tol`.
pub fn is_feasible_raw(m: &MdpR, pi_e: &PolicyTable, r: &[f64], tol: f64) -> Result<Feasibility> {
    if !(tol >= 0.0) {
        return Err(IrlError::Invalid("tolerance must be non-negative".into()));
    }
    let adv = advantage_raw(m, pi_e, r)?;
    let d = m.dims();
    let mut worst = None;
    let mut max_violation = 0.0;
    for i in 0..d.len() {
        let v = adv[i].max(r[i].abs() - 1.0);
        if v > max_violation {
            max_violation = v;
            worst = Some(d.unflatten(i));
        }
    }
    Ok(Feasibility {
        feasible: max_violation <= tol,
        max_violation,
        worst,
    })
}

pub fn is_feasible(m: &MdpR, pi_e: &PolicyTable, r: &RewardTable, tol: f64) -> Result<Feasibility> {
    same_dims(m, r.dims(), "reward")?;
    is_feasible_raw(m, pi_e, r.values(), tol)
}

/// Instance file layout: `{"S","A","H","homogeneous","p","policy"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "H")]
    pub h: usize,
    pub homogeneous: bool,
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
    pub policy: Vec<Vec<Vec<f64>>>,
}

impl InstanceJson {
    pub fn from_tables(m: &MdpR, pi: &PolicyTable) -> Self {
        let d = m.dims();
        let p = (0..d.h)
            .map(|h| {
                (0..d.s)
                    .map(|s| (0..d.a).map(|a| m.row(h, s, a).to_vec()).collect())
                    .collect()
            })
            .collect();
        let policy = (0..d.h)
            .map(|h| (0..d.s).map(|s| pi.dist(h, s).to_vec()).collect())
            .collect();
        InstanceJson {
            s: d.s,
            a: d.a,
            h: d.h,
            homogeneous: m.is_homogeneous(),
            p,
            policy,
        }
    }

    pub fn to_tables(&self) -> Result<(MdpR, PolicyTable)> {
        let d = Dims::new(self.s, self.a, self.h);
        let shape_err = || IrlError::Dimension("instance arrays do not match S, A, H".into());
        if self.p.len() != d.h || self.policy.len() != d.h {
            return Err(shape_err());
        }
        let mut p = Vec::with_capacity(d.len() * d.s);
        for stage in &self.p {
            if stage.len() != d.s {
                return Err(shape_err());
            }
            for state in stage {
                if state.len() != d.a || state.iter().any(|row| row.len() != d.s) {
                    return Err(shape_err());
                }
                state.iter().for_each(|row| p.extend_from_slice(row));
            }
        }
        let mut probs = Vec::with_capacity(d.len());
        for stage in &self.policy {
            if stage.len() != d.s || stage.iter().any(|row| row.len() != d.a) {
                return Err(shape_err());
            }
            stage.iter().for_each(|row| probs.extend_from_slice(row));
        }
        let m = MdpR::new(d, p, self.homogeneous)?;
        let homogeneous_policy = {
            let stage = d.s * d.a;
            (1..d.h).all(|h| probs[h * stage..(h + 1) * stage] == probs[..stage])
        };
        let pi = PolicyTable::new(d, probs, homogeneous_policy)?;
        Ok((m, pi))
    }
}

/// Reward file layout: `{"r":[h][s][a],"restriction":..,"beta":[h]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardJson {
    pub r: Vec<Vec<Vec<f64>>>,
    pub restriction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

impl RewardJson {
    pub fn from_table(r: &RewardTable) -> Self {
        let d = r.dims();
        RewardJson {
            r: (0..d.h)
                .map(|h| {
                    (0..d.s)
                        .map(|s| (0..d.a).map(|a| r.get(h, s, a)).collect())
                        .collect()
                })
                .collect(),
            restriction: r.restriction().tag().to_string(),
            beta: r.restriction().beta().map(|b| b.to_vec()),
        }
    }

    pub fn to_table(&self) -> Result<RewardTable> {
        let h = self.r.len();
        let s = self.r.first().map_or(0, |x| x.len());
        let a = self.r.first().and_then(|x| x.first()).map_or(0, |x| x.len());
        let d = Dims::new(s, a, h);
        let mut values = Vec::with_capacity(d.len());
        for stage in &self.r {
            if stage.len() != s || stage.iter().any(|row| row.len() != a) {
                return Err(IrlError::Dimension("ragged reward array".into()));
            }
            stage.iter().for_each(|row| values.extend_from_slice(row));
        }
        let restriction = Restriction::from_tag(&self.restriction, self.beta.clone())?;
        RewardTable::new(d, values, restriction)
    }
}
