//! Generators for the counterexamples, the unbounded-transport example and
//! the hard instance families used by the sample-complexity lower bounds.
//!
//! State and action orderings are fixed per family and documented on each
//! generator; stages are 0-based throughout.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{IrlError, Result};
use crate::mdp::{Dims, MdpR, PolicyTable, Restriction, RewardTable};

/// A named expected quantity of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact {
    pub name: String,
    pub value: f64,
    /// How the value is known: `closed-form` or `numerical-oracle`.
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceBundle {
    pub name: String,
    pub mdp: MdpR,
    pub policy: PolicyTable,
    pub alternative: Option<(MdpR, PolicyTable)>,
    pub restriction: Restriction,
    /// A reward known to be feasible for the primary problem.
    pub witness: Option<RewardTable>,
    pub facts: Vec<Fact>,
    pub params: BTreeMap<String, f64>,
}

impl InstanceBundle {
    pub fn fact(&self, name: &str) -> Option<f64> {
        self.facts.iter().find(|f| f.name == name).map(|f| f.value)
    }
}

fn fact(name: &str, value: f64, basis: &str) -> Fact {
    Fact {
        name: name.into(),
        value,
        basis: basis.into(),
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn check_unit(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if !(x >= lo && x <= hi) {
        return Err(IrlError::Invalid(format!("{name} = {x} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Kernel table builder, rows default to zero.
struct Kernel {
    d: Dims,
    p: Vec<f64>,
}

impl Kernel {
    fn new(d: Dims) -> Self {
        Kernel {
            d,
            p: vec![0.0; d.len() * d.s],
        }
    }

    fn set(&mut self, h: usize, s: usize, a: usize, row: &[(usize, f64)]) {
        let base = self.d.idx(h, s, a) * self.d.s;
        self.p[base..base + self.d.s].iter_mut().for_each(|x| *x = 0.0);
        for &(s2, q) in row {
            self.p[base + s2] += q;
        }
    }

    fn all_actions(&mut self, h: usize, s: usize, row: &[(usize, f64)]) {
        for a in 0..self.d.a {
            self.set(h, s, a, row);
        }
    }

    /// Flags homogeneity only when every stage carries the same kernel.
    fn build(self) -> Result<MdpR> {
        let stage = self.d.s * self.d.a * self.d.s;
        let homogeneous = (1..self.d.h).all(|h| self.p[h * stage..(h + 1) * stage] == self.p[..stage]);
        MdpR::new(self.d, self.p, homogeneous)
    }
}

/// Three states `s0, s+, s-`, actions `a1, a2`; from `s0`, `a1` reaches `s+`
/// with probability `q` and `a2` splits evenly; `s+` and `s-` are absorbing.
fn three_state_split(h: usize, q: f64) -> Result<MdpR> {
    let d = Dims::new(3, 2, h);
    let mut k = Kernel::new(d);
    for t in 0..h {
        k.set(t, 0, 0, &[(1, q), (2, 1.0 - q)]);
        k.set(t, 0, 1, &[(1, 0.5), (2, 0.5)]);
        k.all_actions(t, 1, &[(1, 1.0)]);
        k.all_actions(t, 2, &[(2, 1.0)]);
    }
    k.build()
}

/// State-only counterexample: `H = 2`, expert plays `a1` everywhere, the two
/// kernels move `1/2 +- eps/4` of the `s0, a1` mass toward `s+`.
pub fn example_state_only(eps: f64) -> Result<InstanceBundle> {
    check_unit("eps", eps, f64::MIN_POSITIVE, 1.0)?;
    let m = three_state_split(2, 0.5 + eps / 4.0)?;
    let m_hat = three_state_split(2, 0.5 - eps / 4.0)?;
    let d = m.dims();
    let pi = PolicyTable::stationary(d, &[0, 0, 0])?;
    let mut r = vec![0.0; d.len()];
    for a in 0..2 {
        r[d.idx(1, 1, a)] = 1.0;
        r[d.idx(1, 2, a)] = -1.0;
    }
    Ok(InstanceBundle {
        name: "example_state_only".into(),
        witness: Some(RewardTable::new(d, r, Restriction::StateOnly)?),
        alternative: Some((m_hat, pi.clone())),
        mdp: m,
        policy: pi,
        restriction: Restriction::StateOnly,
        facts: vec![
            fact("l1_gap", eps, "closed-form"),
            fact("hausdorff", 1.0, "numerical-oracle"),
        ],
        params: params(&[("eps", eps)]),
    })
}

/// Two states `s0, s1`, actions `a1, a2`, `H = 2`; from `s0`, `a1` stays with
/// probability `q` and `a2` splits evenly; `s1` is absorbing. The expert plays
/// `a1` at stage 0 and `a2` at stage 1.
fn two_state_split(q: f64) -> Result<MdpR> {
    let d = Dims::new(2, 2, 2);
    let mut k = Kernel::new(d);
    for t in 0..2 {
        k.set(t, 0, 0, &[(0, q), (1, 1.0 - q)]);
        k.set(t, 0, 1, &[(0, 0.5), (1, 0.5)]);
        k.all_actions(t, 1, &[(1, 1.0)]);
    }
    k.build()
}

/// Time-homogeneous counterexample.
///
/// The witness is `r(s0,a2) = 1`, `r(s0,a1) = 1 - eps/12`, `r(s1,.) = 1/2`:
/// stage 1 needs `r(s0,a2) >= r(s0,a1)` and stage 0 then has slack `eps/24`.
pub fn example_time_homogeneous(eps: f64) -> Result<InstanceBundle> {
    check_unit("eps", eps, f64::MIN_POSITIVE, 1.0)?;
    let m = two_state_split(0.5 + eps / 4.0)?;
    let m_hat = two_state_split(0.5 - eps / 4.0)?;
    let d = m.dims();
    let pi = PolicyTable::deterministic(d, &[vec![0, 0], vec![1, 0]])?;
    let w = RewardTable::stationary(d, &[1.0 - eps / 12.0, 1.0, 0.5, 0.5])?;
    let w = RewardTable::new(d, w.values().to_vec(), Restriction::TimeHomogeneous)?;
    Ok(InstanceBundle {
        name: "example_time_homogeneous".into(),
        witness: Some(w),
        alternative: Some((m_hat, pi.clone())),
        mdp: m,
        policy: pi,
        restriction: Restriction::TimeHomogeneous,
        facts: vec![
            fact("l1_gap", eps, "closed-form"),
            fact("hausdorff_lower", 0.25, "closed-form"),
        ],
        params: params(&[("eps", eps)]),
    })
}

/// Margin counterexample on the three-state chain with `1/2 +- eps`.
///
/// The margin `2 + 2 eps (H-1)` is imposed at `(s0, stage 0)` only; every
/// other unsupported action keeps margin zero.
pub fn example_beta_margin(eps: f64, h: usize) -> Result<InstanceBundle> {
    check_unit("eps", eps, f64::MIN_POSITIVE, 0.5)?;
    if h < 2 {
        return Err(IrlError::Invalid("beta-margin example needs H >= 2".into()));
    }
    let m = three_state_split(h, 0.5 + eps)?;
    let m_hat = three_state_split(h, 0.5 - eps)?;
    let d = m.dims();
    let pi = PolicyTable::stationary(d, &[0, 0, 0])?;
    let beta1 = 2.0 + 2.0 * eps * (h as f64 - 1.0);
    let mut margins = vec![0.0; d.h * d.s];
    margins[0] = beta1;
    let restriction = Restriction::BetaMargin(margins);
    let mut r = vec![0.0; d.len()];
    r[d.idx(0, 0, 0)] = 1.0;
    r[d.idx(0, 0, 1)] = -1.0;
    for t in 1..h {
        for a in 0..2 {
            r[d.idx(t, 1, a)] = 1.0;
            r[d.idx(t, 2, a)] = -1.0;
        }
    }
    Ok(InstanceBundle {
        name: "example_beta_margin".into(),
        witness: Some(RewardTable::new(d, r, restriction.clone())?),
        alternative: Some((m_hat, pi.clone())),
        mdp: m,
        policy: pi,
        restriction,
        facts: vec![
            fact("beta1", beta1, "closed-form"),
            fact("alternative_empty", if h as f64 >= 1.0 + 1.0 / eps - 1e-12 { 1.0 } else { 0.0 }, "closed-form"),
        ],
        params: params(&[("eps", eps), ("H", h as f64)]),
    })
}

/// Two states `s1, s2`, `H = 10`: `a1` loops at `s1`, `a2` loops at `s2`,
/// the other action moves `9/10` back to the same state from `s1` and `9/10`
/// to `s2` from `s2`. The alternative kernel is `1 - p`.
pub fn fact_large_reward() -> Result<InstanceBundle> {
    let h = 10;
    let d = Dims::new(2, 2, h);
    let mut k = Kernel::new(d);
    let mut k_hat = Kernel::new(d);
    let flip = |row: &[(usize, f64)]| -> Vec<(usize, f64)> {
        let mut dense = [0.0; 2];
        for &(s, q) in row {
            dense[s] += q;
        }
        vec![(0, 1.0 - dense[0]), (1, 1.0 - dense[1])]
    };
    let rows: [(usize, usize, Vec<(usize, f64)>); 4] = [
        (0, 0, vec![(0, 1.0)]),
        (0, 1, vec![(0, 0.9), (1, 0.1)]),
        (1, 0, vec![(0, 0.1), (1, 0.9)]),
        (1, 1, vec![(1, 1.0)]),
    ];
    for t in 0..h {
        for (s, a, row) in &rows {
            k.set(t, *s, *a, row);
            k_hat.set(t, *s, *a, &flip(row));
        }
    }
    let pi = PolicyTable::stationary(d, &[0, 1])?;
    let r = RewardTable::stationary(d, &[0.0, -1.0, 0.0, 1.0])?;
    Ok(InstanceBundle {
        name: "fact_large_reward".into(),
        mdp: k.build()?,
        alternative: Some((k_hat.build()?, pi.clone())),
        policy: pi,
        restriction: Restriction::None,
        witness: Some(r),
        facts: vec![
            fact("unscaled_s1_a1_stage0", -9.0, "closed-form"),
            fact("max_abs_unscaled", 10.0, "closed-form"),
        ],
        params: params(&[("H", h as f64)]),
    })
}

/// Which triple of a hard family carries the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Base,
    /// `(i, a, h)`: the `i`-th gadget state, action, 0-based stage.
    At(usize, usize, usize),
}

fn check_family(h: usize, h_bar: usize, target: Target) -> Result<()> {
    if h_bar < 1 || h_bar > h {
        return Err(IrlError::Invalid(format!("H_bar = {h_bar} must lie in [1, H = {h}]")));
    }
    if h < 3 {
        return Err(IrlError::Invalid("hard families need H >= 3".into()));
    }
    if let Target::At(_, _, t) = target {
        // 1-based stages 3..=H_bar+2.
        if t < 2 || t > h_bar + 1 || t >= h {
            return Err(IrlError::Invalid(format!(
                "target stage {} outside [3, {}] (1-based)",
                t + 1,
                h_bar + 2
            )));
        }
    }
    Ok(())
}

/// Entry chain: `start` (state 0) lingers with probability 1/2 before stage
/// `h_bar - 1`, then `root` (state 1) spreads uniformly over `count` gadget
/// states starting at index 2.
fn entry_chain(k: &mut Kernel, h_bar: usize, count: usize) {
    let spread: Vec<(usize, f64)> = (0..count).map(|i| (2 + i, 1.0 / count as f64)).collect();
    for t in 0..k.d.h {
        if t + 1 < h_bar {
            k.all_actions(t, 0, &[(0, 0.5), (1, 0.5)]);
        } else {
            k.all_actions(t, 0, &[(1, 1.0)]);
        }
        k.all_actions(t, 1, &spread);
    }
}

/// Small-delta family. States: `start, root, s_1..s_Sbar, s-, s+` with
/// `Sbar = S - 4`; actions `a_0..a_{A-1}`, expert `a_0`. Every gadget state
/// sends all actions to `s-`/`s+` evenly except `a_*` at `(s_*, h_*)`, which
/// reaches `s+` with probability `1/2 + eps'`.
pub fn lb_small_delta(s: usize, a: usize, h: usize, h_bar: usize, eps_prime: f64, target: Target) -> Result<InstanceBundle> {
    if s < 5 || a < 2 {
        return Err(IrlError::Invalid("small-delta family needs S >= 5, A >= 2".into()));
    }
    check_unit("eps_prime", eps_prime, 0.0, 0.25)?;
    check_family(h, h_bar, target)?;
    let s_bar = s - 4;
    let (minus, plus) = (s - 2, s - 1);
    if let Target::At(i, ta, _) = target {
        if i >= s_bar || ta == 0 || ta >= a {
            return Err(IrlError::Invalid("target must be a gadget state and a non-expert action".into()));
        }
    }
    let d = Dims::new(s, a, h);
    let mut k = Kernel::new(d);
    entry_chain(&mut k, h_bar, s_bar);
    for t in 0..h {
        for i in 0..s_bar {
            k.all_actions(t, 2 + i, &[(minus, 0.5), (plus, 0.5)]);
        }
        k.all_actions(t, minus, &[(minus, 1.0)]);
        k.all_actions(t, plus, &[(plus, 1.0)]);
    }
    let mut facts = vec![fact("size_condition_met", if h >= h_bar + 10 { 1.0 } else { 0.0 }, "closed-form")];
    let mut ps = vec![
        ("S", s as f64),
        ("A", a as f64),
        ("H", h as f64),
        ("H_bar", h_bar as f64),
        ("eps_prime", eps_prime),
    ];
    if let Target::At(i, ta, t) = target {
        k.set(t, 2 + i, ta, &[(minus, 0.5 - eps_prime), (plus, 0.5 + eps_prime)]);
        facts.push(fact("hausdorff_lower", eps_prime * (h - t - 1) as f64, "closed-form"));
        facts.push(fact("kl_per_query_upper", 8.0 * eps_prime * eps_prime, "closed-form"));
        ps.extend([("s_star", (2 + i) as f64), ("a_star", ta as f64), ("h_star", t as f64)]);
    }
    let pi = PolicyTable::stationary(d, &vec![0; s])?;
    Ok(InstanceBundle {
        name: "lb_small_delta".into(),
        mdp: k.build()?,
        policy: pi,
        alternative: None,
        restriction: Restriction::None,
        witness: None,
        facts,
        params: params(&ps),
    })
}

/// Next-state assignment for one `(gadget state, action, stage)` triple of
/// the large-delta family.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub state: usize,
    pub action: usize,
    pub stage: usize,
    pub v: Vec<i8>,
}

/// Large-delta family. States: `start, root, s_1..s_Sbar, s'_1..s'_Sbar`
/// with `Sbar = (S - 2) / 2`. `a_0` spreads uniformly over the primed
/// states; any assigned `(s_i, a_j, h)` uses `(1 + eps' v_k) / Sbar`;
/// unassigned triples behave like `a_0`. Primed states are absorbing.
pub fn lb_large_delta(
    s: usize,
    a: usize,
    h: usize,
    h_bar: usize,
    eps_prime: f64,
    assignment: &[Assignment],
) -> Result<InstanceBundle> {
    if s < 4 || !s.is_multiple_of(2) || a < 2 {
        return Err(IrlError::Invalid("large-delta family needs even S >= 4 and A >= 2".into()));
    }
    check_unit("eps_prime", eps_prime, 0.0, 0.5)?;
    check_family(h, h_bar, Target::Base)?;
    let s_bar = (s - 2) / 2;
    let d = Dims::new(s, a, h);
    let mut k = Kernel::new(d);
    entry_chain(&mut k, h_bar, s_bar);
    let uniform: Vec<(usize, f64)> = (0..s_bar).map(|j| (2 + s_bar + j, 1.0 / s_bar as f64)).collect();
    for t in 0..h {
        for i in 0..s_bar {
            k.all_actions(t, 2 + i, &uniform);
        }
        for j in 0..s_bar {
            let sj = 2 + s_bar + j;
            k.all_actions(t, sj, &[(sj, 1.0)]);
        }
    }
    for x in assignment {
        if x.state >= s_bar || x.action == 0 || x.action >= a || x.stage >= h {
            return Err(IrlError::Invalid("assignment must target a gadget state and a non-expert action".into()));
        }
        if x.v.len() != s_bar || x.v.iter().any(|&y| y != 1 && y != -1) || x.v.iter().map(|&y| y as i32).sum::<i32>() != 0 {
            return Err(IrlError::Invalid("assignment vector must be a balanced sign vector of length Sbar".into()));
        }
        let row: Vec<(usize, f64)> = x
            .v
            .iter()
            .enumerate()
            .map(|(j, &y)| (2 + s_bar + j, (1.0 + eps_prime * y as f64) / s_bar as f64))
            .collect();
        k.set(x.stage, 2 + x.state, x.action, &row);
    }
    let pi = PolicyTable::stationary(d, &vec![0; s])?;
    Ok(InstanceBundle {
        name: "lb_large_delta".into(),
        mdp: k.build()?,
        policy: pi,
        alternative: None,
        restriction: Restriction::None,
        witness: None,
        facts: vec![
            fact("kl_row_upper", 2.0 * eps_prime * eps_prime, "closed-form"),
            fact("size_condition_met", if h >= h_bar + 130 { 1.0 } else { 0.0 }, "closed-form"),
        ],
        params: params(&[
            ("S", s as f64),
            ("A", a as f64),
            ("H", h as f64),
            ("H_bar", h_bar as f64),
            ("eps_prime", eps_prime),
            ("S_bar", s_bar as f64),
        ]),
    })
}

/// Policy family. States: `start, root, s_1..s_Sbar, sink` with
/// `Sbar = S - 3`; gadget states move to the absorbing sink under every
/// action. The expert plays `a_0`, except at the target `(s_*, h_*)` where it
/// plays `a_*` with probability `pi_min`.
pub fn lb_policy(s: usize, a: usize, h: usize, h_bar: usize, pi_min: f64, target: Target) -> Result<InstanceBundle> {
    if s < 4 || a < 2 {
        return Err(IrlError::Invalid("policy family needs S >= 4, A >= 2".into()));
    }
    check_unit("pi_min", pi_min, f64::MIN_POSITIVE, 0.5)?;
    check_family(h, h_bar, target)?;
    let s_bar = s - 3;
    let sink = s - 1;
    let d = Dims::new(s, a, h);
    let mut k = Kernel::new(d);
    entry_chain(&mut k, h_bar, s_bar);
    for t in 0..h {
        for i in 0..s_bar {
            k.all_actions(t, 2 + i, &[(sink, 1.0)]);
        }
        k.all_actions(t, sink, &[(sink, 1.0)]);
    }
    let mut probs = vec![0.0; d.len()];
    for t in 0..h {
        for st in 0..s {
            probs[d.idx(t, st, 0)] = 1.0;
        }
    }
    let mut facts = Vec::new();
    let mut ps = vec![
        ("S", s as f64),
        ("A", a as f64),
        ("H", h as f64),
        ("H_bar", h_bar as f64),
        ("pi_min", pi_min),
    ];
    if let Target::At(i, ta, t) = target {
        if i >= s_bar || ta == 0 || ta >= a {
            return Err(IrlError::Invalid("target must be a gadget state and a non-expert action".into()));
        }
        probs[d.idx(t, 2 + i, 0)] = 1.0 - pi_min;
        probs[d.idx(t, 2 + i, ta)] = pi_min;
        facts.push(fact("policy_kl", (1.0 / (1.0 - pi_min)).ln(), "closed-form"));
        facts.push(fact("hausdorff_lower", 1.0, "closed-form"));
        ps.extend([("s_star", (2 + i) as f64), ("a_star", ta as f64), ("h_star", t as f64)]);
    }
    let stage = d.s * d.a;
    let homogeneous = (1..h).all(|t| probs[t * stage..(t + 1) * stage] == probs[..stage]);
    Ok(InstanceBundle {
        name: "lb_policy".into(),
        mdp: k.build()?,
        policy: PolicyTable::new(d, probs, homogeneous)?,
        alternative: None,
        restriction: Restriction::None,
        witness: None,
        facts,
        params: params(&ps),
    })
}

fn l1_signs(v: &[i8], w: &[i8]) -> i32 {
    v.iter().zip(w).map(|(&x, &y)| (x as i32 - y as i32).abs()).sum()
}

/// Candidate budget for the greedy packing.
const PACKING_CANDIDATES: usize = 1024;

/// Greedy packing of balanced sign vectors at pairwise L1 distance at least
/// `D/16`: lexicographic candidates first, then random permutations.
pub fn packing_set(d: usize, seed: u64) -> Result<Vec<Vec<i8>>> {
    if d < 16 || !d.is_multiple_of(2) || d > 62 {
        return Err(IrlError::Invalid(format!("packing needs even D in [16, 62], got {d}")));
    }
    let min_dist = d as f64 / 16.0;
    let target = 2f64.powf(d as f64 / 5.0).ceil() as usize;
    let mut kept: Vec<Vec<i8>> = Vec::new();
    let consider = |v: Vec<i8>, kept: &mut Vec<Vec<i8>>| {
        if kept.iter().all(|w| l1_signs(&v, w) as f64 >= min_dist) {
            kept.push(v);
        }
    };
    let to_vec = |mask: u64| -> Vec<i8> { (0..d).map(|j| if mask >> j & 1 == 1 { 1 } else { -1 }).collect() };
    // Gosper's hack over masks with D/2 set bits.
    let half = d / 2;
    let mut mask: u64 = (1u64 << half) - 1;
    let limit = 1u64 << d;
    let mut used = 0;
    while mask < limit && used < PACKING_CANDIDATES / 2 {
        consider(to_vec(mask), &mut kept);
        used += 1;
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base: Vec<i8> = (0..d).map(|j| if j < half { 1 } else { -1 }).collect();
    while used < PACKING_CANDIDATES {
        base.shuffle(&mut rng);
        consider(base.clone(), &mut kept);
        used += 1;
    }
    if kept.len() < target {
        return Err(IrlError::Numerical(format!(
            "packing reached {} vectors, below 2^(D/5) = {target}",
            kept.len()
        )));
    }
    Ok(kept)
}

/// Parameters for building a library instance by name.
pub type Params = BTreeMap<String, String>;

fn get_f(p: &Params, key: &str, default: Option<f64>) -> Result<f64> {
    match p.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| IrlError::Invalid(format!("parameter {key} = `{v}` is not a number"))),
        None => default.ok_or_else(|| IrlError::Invalid(format!("missing parameter {key}"))),
    }
}

fn get_u(p: &Params, key: &str, default: Option<usize>) -> Result<usize> {
    match p.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| IrlError::Invalid(format!("parameter {key} = `{v}` is not a count"))),
        None => default.ok_or_else(|| IrlError::Invalid(format!("missing parameter {key}"))),
    }
}

/// `s_star` (1-based gadget index), `a_star` (action index, `a_0` being the
/// expert's) and `h_star` (1-based stage); no `h_star` means the base instance.
fn get_target(p: &Params) -> Result<Target> {
    if !p.contains_key("h_star") {
        return Ok(Target::Base);
    }
    let i = get_u(p, "s_star", Some(1))?;
    let a = get_u(p, "a_star", Some(1))?;
    let h = get_u(p, "h_star", None)?;
    if i == 0 || h == 0 {
        return Err(IrlError::Invalid("s_star and h_star are 1-based".into()));
    }
    Ok(Target::At(i - 1, a, h - 1))
}

pub const REGISTRY: [&str; 7] = [
    "example_state_only",
    "example_time_homogeneous",
    "example_beta_margin",
    "fact_large_reward",
    "lb_small_delta",
    "lb_large_delta",
    "lb_policy",
];

/// Builds a library instance. `H_bar` defaults to `H/2` for inhomogeneous
/// families, or 1 when `homogeneous=1`.
pub fn build_named(name: &str, p: &Params) -> Result<InstanceBundle> {
    let h_bar = |h: usize| -> Result<usize> {
        let hom = get_u(p, "homogeneous", Some(0))? == 1;
        get_u(p, "H_bar", Some(if hom { 1 } else { (h / 2).max(1) }))
    };
    match name {
        "example_state_only" => example_state_only(get_f(p, "eps", Some(0.2))?),
        "example_time_homogeneous" => example_time_homogeneous(get_f(p, "eps", Some(0.2))?),
        "example_beta_margin" => example_beta_margin(get_f(p, "eps", Some(0.1))?, get_u(p, "H", Some(11))?),
        "fact_large_reward" => fact_large_reward(),
        "lb_small_delta" => {
            let h = get_u(p, "H", Some(12))?;
            lb_small_delta(
                get_u(p, "S", Some(9))?,
                get_u(p, "A", Some(2))?,
                h,
                h_bar(h)?,
                get_f(p, "eps_prime", Some(0.1))?,
                get_target(p)?,
            )
        }
        "lb_large_delta" => {
            let h = get_u(p, "H", Some(12))?;
            let mut assignment = Vec::new();
            if let Some(v) = p.get("v") {
                let v: Vec<i8> = v
                    .split(',')
                    .map(|x| x.trim().parse::<i8>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| IrlError::Invalid("v must be comma-separated signs".into()))?;
                match get_target(p)? {
                    Target::At(state, action, stage) => assignment.push(Assignment { state, action, stage, v }),
                    Target::Base => return Err(IrlError::Invalid("v given without h_star".into())),
                }
            }
            lb_large_delta(
                get_u(p, "S", Some(10))?,
                get_u(p, "A", Some(2))?,
                h,
                h_bar(h)?,
                get_f(p, "eps_prime", Some(0.1))?,
                &assignment,
            )
        }
        "lb_policy" => {
            let h = get_u(p, "H", Some(4))?;
            lb_policy(
                get_u(p, "S", Some(7))?,
                get_u(p, "A", Some(2))?,
                h,
                h_bar(h)?,
                get_f(p, "pi_min", Some(0.3))?,
                get_target(p)?,
            )
        }
        other => Err(IrlError::Invalid(format!(
            "unknown instance `{other}`; known: {}",
            REGISTRY.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::kl_categorical;
    use crate::mdp::is_feasible;

    fn l1(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
    }

    #[test]
    fn counterexample_gaps_and_witnesses() {
        let b = example_state_only(0.2).unwrap();
        let (mh, _) = b.alternative.as_ref().unwrap();
        assert!((l1(b.mdp.row(0, 0, 0), mh.row(0, 0, 0)) - 0.2).abs() < 1e-12);
        assert!(is_feasible(&b.mdp, &b.policy, b.witness.as_ref().unwrap(), 0.0).unwrap().feasible);

        let b = example_time_homogeneous(0.2).unwrap();
        let (mh, _) = b.alternative.as_ref().unwrap();
        for h in 0..2 {
            assert!((l1(b.mdp.row(h, 0, 0), mh.row(h, 0, 0)) - 0.2).abs() < 1e-12);
        }
        assert!(b.mdp.is_homogeneous());
        assert!(is_feasible(&b.mdp, &b.policy, b.witness.as_ref().unwrap(), 0.0).unwrap().feasible);

        let b = example_beta_margin(0.1, 11).unwrap();
        assert!((b.fact("beta1").unwrap() - 4.0).abs() < 1e-12);
        assert!(is_feasible(&b.mdp, &b.policy, b.witness.as_ref().unwrap(), 0.0).unwrap().feasible);
    }

    #[test]
    fn large_reward_advantages() {
        let b = fact_large_reward();
        let b = b.unwrap();
        let adv = crate::mdp::advantage(&b.mdp, &b.policy, b.witness.as_ref().unwrap()).unwrap();
        let d = b.mdp.dims();
        for h in 0..d.h {
            // 1-based stage h+1: -1 + (H - (h+1))/10
            let want = -1.0 + (d.h - h - 1) as f64 / 10.0;
            assert!((adv[d.idx(h, 0, 1)] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn small_delta_differs_only_at_target() {
        let base = lb_small_delta(9, 3, 12, 2, 0.2, Target::Base).unwrap();
        let pert = lb_small_delta(9, 3, 12, 2, 0.2, Target::At(2, 2, 3)).unwrap();
        let d = base.mdp.dims();
        for i in 0..d.len() {
            let (h, s, a) = d.unflatten(i);
            let same = base.mdp.row(h, s, a) == pert.mdp.row(h, s, a);
            assert_eq!(same, (h, s, a) != (3, 4, 2), "{h} {s} {a}");
        }
        let kl = kl_categorical(pert.mdp.row(3, 4, 2), base.mdp.row(3, 4, 2)).unwrap();
        assert!(kl <= 8.0 * 0.04);
        assert!(lb_small_delta(9, 2, 12, 2, 0.2, Target::At(0, 1, 5)).is_err());
        assert!(base.mdp.dims() == Dims::new(9, 3, 12));
    }

    #[test]
    fn large_delta_rows_and_kl() {
        let v = vec![1, -1, 1, -1];
        let b = lb_large_delta(10, 2, 4, 1, 0.3, &[Assignment { state: 0, action: 1, stage: 2, v }]).unwrap();
        let row = b.mdp.row(2, 2, 1);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
        let kl = kl_categorical(row, b.mdp.row(2, 2, 0)).unwrap();
        assert!(kl <= 2.0 * 0.09);
        assert!(lb_large_delta(10, 2, 4, 1, 0.3, &[Assignment { state: 0, action: 1, stage: 2, v: vec![1, 1, 1, -1] }]).is_err());
    }

    #[test]
    fn policy_family() {
        let base = lb_policy(5, 2, 4, 1, 0.3, Target::Base).unwrap();
        let pert = lb_policy(5, 2, 4, 1, 0.3, Target::At(0, 1, 2)).unwrap();
        assert_eq!(base.mdp, pert.mdp);
        let kl = kl_categorical(base.policy.dist(2, 2), pert.policy.dist(2, 2)).unwrap();
        assert!((kl - (1.0f64 / 0.7).ln()).abs() < 1e-12);
        assert!((pert.policy.min_positive() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn packing_sizes_and_distances() {
        for d in [16usize, 32] {
            let set = packing_set(d, 5).unwrap();
            assert!(set.len() as f64 >= 2f64.powf(d as f64 / 5.0));
            for (i, v) in set.iter().enumerate() {
                assert_eq!(v.iter().map(|&x| x as i32).sum::<i32>(), 0);
                for w in &set[i + 1..] {
                    assert!(l1_signs(v, w) as f64 >= d as f64 / 16.0);
                }
            }
        }
        assert!(packing_set(15, 1).is_err());
    }

    #[test]
    fn registry_builds_every_name() {
        for name in REGISTRY {
            let b = build_named(name, &Params::new()).unwrap();
            assert_eq!(b.name, name);
        }
        assert!(build_named("nope", &Params::new()).is_err());
    }
}
