//! Reward premetrics, the distance between IRL problems, the explicit
//! decomposition of feasible rewards and the bounded reward transport
//! between two IRL problems.

use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};
use crate::mdp::{
    evaluate_policy_raw, is_feasible_raw, min_values_over, optimal_values_raw, Dims, MdpR,
    PolicyTable, Restriction, RewardTable,
};

/// Default tolerance defining near-optimal action sets.
pub const OPT_TOL: f64 = 1e-9;
/// Feasibility tolerance applied to inputs of the decomposition.
pub const FEAS_TOL: f64 = 1e-9;

fn check_same(a: Dims, b: Dims) -> Result<()> {
    if a != b {
        return Err(IrlError::Dimension(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Max-norm distance between reward tables.
pub fn d_g(r: &RewardTable, r2: &RewardTable) -> Result<f64> {
    check_same(r.dims(), r2.dims())?;
    Ok(max_abs_diff(r.values(), r2.values()))
}

/// Max-norm distance between the optimal Q-functions.
pub fn d_qstar(r: &RewardTable, r2: &RewardTable, m: &MdpR) -> Result<f64> {
    check_same(r.dims(), r2.dims())?;
    check_same(r.dims(), m.dims())?;
    let q1 = optimal_values_raw(m, r.values())?;
    let q2 = optimal_values_raw(m, r2.values())?;
    Ok(max_abs_diff(q1.q_table(), q2.q_table()))
}

/// Per-`(h, s, a)` mask of actions whose optimal Q under `r` is within
/// `opt_tol` of the optimal value.
pub fn optimal_action_mask(m: &MdpR, r: &[f64], opt_tol: f64) -> Result<Vec<bool>> {
    let vs = optimal_values_raw(m, r)?;
    let d = m.dims();
    let mut mask = vec![false; d.len()];
    for h in 0..d.h {
        for s in 0..d.s {
            let v = vs.v(h, s);
            for a in 0..d.a {
                mask[d.idx(h, s, a)] = vs.q(h, s, a) >= v - opt_tol;
            }
        }
    }
    Ok(mask)
}

/// Worst suboptimality under `r` of any policy optimal for `r2`.
pub fn d_vstar(r: &RewardTable, r2: &RewardTable, m: &MdpR, opt_tol: f64) -> Result<f64> {
    check_same(r.dims(), r2.dims())?;
    check_same(r.dims(), m.dims())?;
    if !(opt_tol >= 0.0) {
        return Err(IrlError::Invalid("opt_tol must be non-negative".into()));
    }
    let mask = optimal_action_mask(m, r2.values(), opt_tol)?;
    let star = optimal_values_raw(m, r.values())?;
    let worst = min_values_over(m, r.values(), &mask)?;
    let d = m.dims();
    let mut gap: f64 = 0.0;
    for h in 0..d.h {
        for s in 0..d.s {
            gap = gap.max(star.v(h, s) - worst.v(h, s));
        }
    }
    Ok(gap)
}

/// Distance between two IRL problems with its per-triple ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDistance {
    pub value: f64,
    /// `|1{pi=0} - 1{pi2=0}|` per triple.
    pub policy_term: Vec<f64>,
    /// `||p_h(.|s,a) - p2_h(.|s,a)||_1` per triple.
    pub transition_term: Vec<f64>,
    /// Triple attaining the maximum.
    pub argmax: (usize, usize, usize),
}

/// `max (H-h+1) (|1{pi=0} - 1{pi2=0}| + ||p - p2||_1)` over triples
/// (with the 0-based stage, the weight is `H - h`).
pub fn rho_g(m: &MdpR, pi: &PolicyTable, m2: &MdpR, pi2: &PolicyTable) -> Result<ProblemDistance> {
    let d = m.dims();
    check_same(d, m2.dims())?;
    check_same(d, pi.dims())?;
    check_same(d, pi2.dims())?;
    let mut policy_term = vec![0.0; d.len()];
    let mut transition_term = vec![0.0; d.len()];
    let mut value = 0.0;
    let mut argmax = (0, 0, 0);
    for h in 0..d.h {
        let weight = (d.h - h) as f64;
        for s in 0..d.s {
            for a in 0..d.a {
                let i = d.idx(h, s, a);
                policy_term[i] = if pi.supports(h, s, a) == pi2.supports(h, s, a) { 0.0 } else { 1.0 };
                transition_term[i] = m
                    .row(h, s, a)
                    .iter()
                    .zip(m2.row(h, s, a))
                    .map(|(x, y)| (x - y).abs())
                    .sum();
                let v = weight * (policy_term[i] + transition_term[i]);
                if v > value {
                    value = v;
                    argmax = (h, s, a);
                }
            }
        }
    }
    Ok(ProblemDistance {
        value,
        policy_term,
        transition_term,
        argmax,
    })
}

/// Explicit form of a feasible reward: advantage magnitudes on unsupported
/// actions and the expert's value function.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardDecomposition {
    dims: Dims,
    /// `A_h(s,a) >= 0`, zero on supported actions; indexed like rewards.
    pub adv: Vec<f64>,
    /// `V_h(s)` for `h in 0..=H`; the last stage is zero.
    pub values: Vec<f64>,
}

impl RewardDecomposition {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.values[h * self.dims.s + s]
    }

    fn v_stage(&self, h: usize) -> &[f64] {
        &self.values[h * self.dims.s..(h + 1) * self.dims.s]
    }

    /// `r_h(s,a) = -A_h(s,a) 1{pi(a|s)=0} + V_h(s) - p_h V_{h+1}(s,a)`,
    /// optionally scaled by `1 / scale`.
    pub fn reconstruct(&self, m: &MdpR, pi: &PolicyTable, scale: f64) -> Vec<f64> {
        let d = self.dims;
        let mut r = vec![0.0; d.len()];
        for h in 0..d.h {
            let next = self.v_stage(h + 1);
            for s in 0..d.s {
                for a in 0..d.a {
                    let i = d.idx(h, s, a);
                    let penalty = if pi.supports(h, s, a) { 0.0 } else { self.adv[i] };
                    r[i] = (-penalty + self.v(h, s) - m.expect(h, s, a, next)) / scale;
                }
            }
        }
        r
    }
}

/// Splits a feasible reward into advantage magnitudes and values.
pub fn decompose_reward(m: &MdpR, pi_e: &PolicyTable, r: &RewardTable) -> Result<RewardDecomposition> {
    check_same(m.dims(), r.dims())?;
    decompose_raw(m, pi_e, r.values())
}

fn decompose_raw(m: &MdpR, pi_e: &PolicyTable, r: &[f64]) -> Result<RewardDecomposition> {
    let d = m.dims();
    let feas = is_feasible_raw(m, pi_e, r, FEAS_TOL)?;
    if !feas.feasible {
        let (h, s, a) = feas.worst.unwrap_or((0, 0, 0));
        return Err(IrlError::Infeasible {
            h,
            s,
            a,
            advantage: feas.max_violation,
        });
    }
    let vs = evaluate_policy_raw(m, pi_e, r)?;
    let mut adv = vec![0.0; d.len()];
    for h in 0..d.h {
        for s in 0..d.s {
            for a in 0..d.a {
                if !pi_e.supports(h, s, a) {
                    adv[d.idx(h, s, a)] = (vs.v(h, s) - vs.q(h, s, a)).max(0.0);
                }
            }
        }
    }
    let values = (0..=d.h).flat_map(|h| vs.v_stage(h).to_vec()).collect();
    Ok(RewardDecomposition { dims: d, adv, values })
}

/// Result of moving a feasible reward to another IRL problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    /// Scaled reward, feasible for the target problem and bounded by one.
    pub reward: RewardTable,
    /// Target-feasible reward before scaling; may leave `[-1, 1]`.
    pub unscaled: Vec<f64>,
    /// Per-triple `unscaled - r`.
    pub eps_terms: Vec<f64>,
    /// `max |eps_terms|`.
    pub epsilon: f64,
}

/// Transports `r` (feasible for `(m, pi)`) to `(m2, pi2)`: keep the value
/// function and advantage magnitudes, swap in the target kernel and support,
/// and shrink by `1 + epsilon` so the result stays in `[-1, 1]`.
pub fn transport_reward(
    r: &RewardTable,
    (m, pi): (&MdpR, &PolicyTable),
    (m2, pi2): (&MdpR, &PolicyTable),
) -> Result<Transport> {
    let d = m.dims();
    check_same(d, r.dims())?;
    check_same(d, m2.dims())?;
    check_same(d, pi2.dims())?;
    let dec = decompose_reward(m, pi, r)?;
    let unscaled = dec.reconstruct(m2, pi2, 1.0);
    let eps_terms: Vec<f64> = unscaled.iter().zip(r.values()).map(|(u, x)| u - x).collect();
    let epsilon = eps_terms.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    let scaled: Vec<f64> = unscaled
        .iter()
        .map(|x| (x / (1.0 + epsilon)).clamp(-1.0, 1.0))
        .collect();
    let reward = RewardTable::new(d, scaled, Restriction::None)?;
    Ok(Transport {
        reward,
        unscaled,
        eps_terms,
        epsilon,
    })
}

/// The Lipschitz bound `2 rho / (1 + rho)`.
pub fn lipschitz_bound(rho: f64) -> f64 {
    2.0 * rho / (1.0 + rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{advantage_raw, is_feasible};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mdp(rng: &mut ChaCha8Rng, d: Dims) -> MdpR {
        let mut p = Vec::with_capacity(d.len() * d.s);
        for _ in 0..d.len() {
            let w: Vec<f64> = (0..d.s).map(|_| rng.gen_range(0.0..1.0)).collect();
            let t: f64 = w.iter().sum();
            p.extend(w.iter().map(|x| x / t));
        }
        // Renormalize the last entry to absorb rounding.
        for row in p.chunks_mut(d.s) {
            let head: f64 = row[..d.s - 1].iter().sum();
            row[d.s - 1] = (1.0 - head).max(0.0);
        }
        MdpR::new(d, p, false).unwrap()
    }

    fn random_reward(rng: &mut ChaCha8Rng, d: Dims) -> RewardTable {
        RewardTable::new(
            d,
            (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            Restriction::None,
        )
        .unwrap()
    }

    /// Enumerates every deterministic policy and returns the worst value
    /// under `r` among those optimal for `r2`.
    fn brute_force_vstar(m: &MdpR, r: &RewardTable, r2: &RewardTable) -> f64 {
        let d = m.dims();
        let cells = d.h * d.s;
        let total = d.a.pow(cells as u32);
        let star = optimal_values_raw(m, r.values()).unwrap();
        let star2 = optimal_values_raw(m, r2.values()).unwrap();
        let mut gap: f64 = 0.0;
        for code in 0..total {
            let mut c = code;
            let mut actions = vec![vec![0; d.s]; d.h];
            for row in actions.iter_mut() {
                for a in row.iter_mut() {
                    *a = c % d.a;
                    c /= d.a;
                }
            }
            let pi = PolicyTable::deterministic(d, &actions).unwrap();
            let v2 = evaluate_policy_raw(m, &pi, r2.values()).unwrap();
            let optimal = (0..d.h).all(|h| (0..d.s).all(|s| v2.v(h, s) >= star2.v(h, s) - 1e-9));
            if optimal {
                let v = evaluate_policy_raw(m, &pi, r.values()).unwrap();
                for h in 0..d.h {
                    for s in 0..d.s {
                        gap = gap.max(star.v(h, s) - v.v(h, s));
                    }
                }
            }
        }
        gap
    }

    #[test]
    fn identities() {
        let d = Dims::new(2, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mdp(&mut rng, d);
        let r = random_reward(&mut rng, d);
        assert_eq!(d_g(&r, &r).unwrap(), 0.0);
        assert_eq!(d_qstar(&r, &r, &m).unwrap(), 0.0);
        assert_eq!(d_vstar(&r, &r, &m, OPT_TOL).unwrap(), 0.0);
        let ones = RewardTable::new(d, vec![1.0; 8], Restriction::None).unwrap();
        let neg = RewardTable::new(d, vec![-1.0; 8], Restriction::None).unwrap();
        assert_eq!(d_g(&ones, &neg).unwrap(), 2.0);
    }

    #[test]
    fn one_step_metrics() {
        let d = Dims::new(1, 2, 1);
        let m = MdpR::new(d, vec![1.0, 1.0], false).unwrap();
        let r = RewardTable::new(d, vec![0.8, -0.2], Restriction::None).unwrap();
        let r2 = RewardTable::new(d, vec![0.1, 0.5], Restriction::None).unwrap();
        assert!((d_qstar(&r, &r2, &m).unwrap() - d_g(&r, &r2).unwrap()).abs() < 1e-15);
        // r2 prefers a2; under r that loses 0.8 - (-0.2).
        assert!((d_vstar(&r, &r2, &m, OPT_TOL).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metric_chain_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let d = Dims::new(rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
            let m = random_mdp(&mut rng, d);
            let r = random_reward(&mut rng, d);
            let r2 = if trial % 3 == 0 {
                // Ties make the near-optimal sets non-trivial.
                let base: Vec<f64> = (0..d.s * d.a).map(|i| ((i % 2) as f64) * 0.5).collect();
                RewardTable::stationary(d, &base).unwrap()
            } else {
                random_reward(&mut rng, d)
            };
            let g = d_g(&r, &r2).unwrap();
            let q = d_qstar(&r, &r2, &m).unwrap();
            let v = d_vstar(&r, &r2, &m, OPT_TOL).unwrap();
            let oracle = brute_force_vstar(&m, &r, &r2);
            assert!((v - oracle).abs() < 1e-9, "dp {v} vs brute force {oracle}");
            let hf = d.h as f64;
            assert!(q <= hf * g + 1e-8);
            assert!(v <= 2.0 * hf * g + 1e-8);
            assert!(v <= 2.0 * hf * q + 1e-8);
        }
    }

    #[test]
    fn rho_identity_and_support_flip() {
        let d = Dims::new(2, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_mdp(&mut rng, d);
        let pi = PolicyTable::stationary(d, &[0, 1]).unwrap();
        assert_eq!(rho_g(&m, &pi, &m, &pi).unwrap().value, 0.0);
        // Differ in support only at stage index 1 (second stage): weight H - 1.
        let mut probs = pi.table().to_vec();
        probs[d.idx(1, 0, 1)] = 0.5;
        probs[d.idx(1, 0, 0)] = 0.5;
        let pi2 = PolicyTable::new(d, probs, false).unwrap();
        let rho = rho_g(&m, &pi, &m, &pi2).unwrap();
        assert_eq!(rho.value, 2.0);
        assert_eq!(rho.argmax, (1, 0, 1));
    }

    fn feasible_reward(rng: &mut ChaCha8Rng, m: &MdpR, pi: &PolicyTable) -> RewardTable {
        // Build from the explicit form with random magnitudes, then shrink into the box.
        let d = m.dims();
        let values: Vec<f64> = (0..=d.h)
            .flat_map(|h| {
                (0..d.s)
                    .map(|_| if h == d.h { 0.0 } else { rng.gen_range(-1.0..1.0) * (d.h - h) as f64 * 0.3 })
                    .collect::<Vec<_>>()
            })
            .collect();
        let adv: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let dec = RewardDecomposition { dims: d, adv, values };
        let raw = dec.reconstruct(m, pi, 1.0);
        let scale = raw.iter().fold(1.0, |acc: f64, x| acc.max(x.abs()));
        RewardTable::new(d, raw.iter().map(|x| x / scale).collect(), Restriction::None).unwrap()
    }

    #[test]
    fn decomposition_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = Dims::new(rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen_range(1..=4));
            let m = random_mdp(&mut rng, d);
            let acts: Vec<usize> = (0..d.s).map(|_| rng.gen_range(0..d.a)).collect();
            let pi = PolicyTable::stationary(d, &acts).unwrap();
            let r = feasible_reward(&mut rng, &m, &pi);
            assert!(is_feasible(&m, &pi, &r, 1e-12).unwrap().feasible);
            let dec = decompose_reward(&m, &pi, &r).unwrap();
            let back = dec.reconstruct(&m, &pi, 1.0);
            assert!(max_abs_diff(&back, r.values()) < 1e-9);
            for h in 0..d.h {
                for s in 0..d.s {
                    assert!(dec.v(h, s).abs() <= (d.h - h) as f64 + 1e-9);
                    for a in 0..d.a {
                        let x = dec.adv[d.idx(h, s, a)];
                        assert!(x >= 0.0 && x <= (d.h - h) as f64 + 1e-9);
                    }
                }
            }
        }
        let d = Dims::new(2, 2, 2);
        let m = random_mdp(&mut rng, d);
        let pi = PolicyTable::stationary(d, &[0, 0]).unwrap();
        let zero = decompose_reward(&m, &pi, &RewardTable::zeros(d)).unwrap();
        assert!(zero.adv.iter().chain(&zero.values).all(|&x| x == 0.0));
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let d = Dims::new(1, 2, 1);
        let m = MdpR::new(d, vec![1.0, 1.0], false).unwrap();
        let pi = PolicyTable::stationary(d, &[0]).unwrap();
        let r = RewardTable::new(d, vec![0.0, 0.5], Restriction::None).unwrap();
        match decompose_reward(&m, &pi, &r) {
            Err(IrlError::Infeasible { h: 0, s: 0, a: 1, advantage }) => {
                assert!((advantage - 0.5).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transport_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..100 {
            let d = Dims::new(rng.gen_range(2..=4), rng.gen_range(1..=3), rng.gen_range(1..=4));
            let m = random_mdp(&mut rng, d);
            let acts: Vec<usize> = (0..d.s).map(|_| rng.gen_range(0..d.a)).collect();
            let pi = PolicyTable::stationary(d, &acts).unwrap();
            let r = feasible_reward(&mut rng, &m, &pi);
            let same = transport_reward(&r, (&m, &pi), (&m, &pi)).unwrap();
            assert!(same.epsilon < 1e-12);
            assert!(max_abs_diff(same.reward.values(), r.values()) < 1e-9);

            // Mix toward a random kernel and sometimes flip a support.
            let other = random_mdp(&mut rng, d);
            let lam = rng.gen_range(0.0..0.3);
            let p2: Vec<f64> = m
                .table()
                .iter()
                .zip(other.table())
                .map(|(a, b)| (1.0 - lam) * a + lam * b)
                .collect();
            let m2 = MdpR::new(d, p2, false).unwrap();
            let pi2 = if trial % 4 == 0 && d.a > 1 {
                let acts2: Vec<usize> = acts.iter().map(|a| (a + 1) % d.a).collect();
                PolicyTable::stationary(d, &acts2).unwrap()
            } else {
                pi.clone()
            };
            let t = transport_reward(&r, (&m, &pi), (&m2, &pi2)).unwrap();
            let f = is_feasible(&m2, &pi2, &t.reward, 1e-8).unwrap();
            assert!(f.feasible, "violation {}", f.max_violation);
            assert!(t.reward.values().iter().all(|x| x.abs() <= 1.0));
            let dist = d_g(&r, &t.reward).unwrap();
            assert!(dist <= lipschitz_bound(t.epsilon) + 1e-9);
            let rho = rho_g(&m, &pi, &m2, &pi2).unwrap().value;
            assert!(t.epsilon <= rho + 1e-9);
            assert!(dist <= lipschitz_bound(rho) + 1e-9);
            // Unscaled reward keeps the target expert optimal.
            let adv = advantage_raw(&m2, &pi2, &t.unscaled).unwrap();
            assert!(adv.iter().all(|&x| x <= 1e-9));
        }
    }
}
