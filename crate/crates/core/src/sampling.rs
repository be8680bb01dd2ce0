//! Generative sampling oracle and maximum-likelihood empirical problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IrlError, Result};
use crate::mdp::{Dims, MdpR, PolicyTable};

fn cumulative(probs: &[f64], width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(probs.len());
    for row in probs.chunks(width) {
        let mut acc = 0.0;
        for &p in row {
            acc += p;
            out.push(acc);
        }
    }
    out
}

/// Inverse-CDF draw; zero-probability entries are never returned.
fn draw(cdf: &[f64], probs: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    for (i, &c) in cdf.iter().enumerate() {
        if target < c && probs[i] > 0.0 {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Answers `(s, a, h)` queries with a next state and an expert action.
#[derive(Debug, Clone)]
pub struct GenerativeOracle {
    mdp: MdpR,
    policy: PolicyTable,
    p_cdf: Vec<f64>,
    pi_cdf: Vec<f64>,
    rng: ChaCha8Rng,
    seed: u64,
    queries: u64,
}

impl GenerativeOracle {
    pub fn new(mdp: MdpR, policy: PolicyTable, seed: u64) -> Result<Self> {
        if mdp.dims() != policy.dims() {
            return Err(IrlError::Dimension("oracle MDP and policy dims differ".into()));
        }
        let d = mdp.dims();
        Ok(GenerativeOracle {
            p_cdf: cumulative(mdp.table(), d.s),
            pi_cdf: cumulative(policy.table(), d.a),
            mdp,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            queries: 0,
        })
    }

    pub fn dims(&self) -> Dims {
        self.mdp.dims()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn ground_truth(&self) -> (&MdpR, &PolicyTable) {
        (&self.mdp, &self.policy)
    }

    /// One draw `s' ~ p_h(.|s,a)` and `a_e ~ pi_h(.|s)`.
    pub fn query(&mut self, s: usize, a: usize, h: usize) -> Result<(usize, usize)> {
        let d = self.dims();
        if s >= d.s || a >= d.a || h >= d.h {
            return Err(IrlError::Invalid(format!(
                "query (s={s}, a={a}, h={h}) out of range for {d:?}"
            )));
        }
        let i = d.idx(h, s, a);
        let row = i * d.s..(i + 1) * d.s;
        let next = draw(&self.p_cdf[row.clone()], &self.mdp.table()[row], self.rng.gen());
        let j = d.idx(h, s, 0);
        let prow = j..j + d.a;
        let expert = draw(&self.pi_cdf[prow.clone()], &self.policy.table()[prow], self.rng.gen());
        self.queries += 1;
        Ok((next, expert))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub s: usize,
    pub a: usize,
    pub h: usize,
    pub next: usize,
    pub expert: usize,
}

/// Count tables of collected samples; tuples are kept only on request.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDataset {
    dims: Dims,
    /// `n_h(s,a,s')`, indexed `[h][s][a][s']`.
    pub transitions: Vec<u64>,
    /// `n_h(s,a)`.
    pub visits: Vec<u64>,
    /// `n_h(s)`.
    pub state_visits: Vec<u64>,
    /// `n^E_h(s,a)`: expert plays `a` when `s` is queried at stage `h`.
    pub expert: Vec<u64>,
    tuples: Option<Vec<Sample>>,
}

impl SampleDataset {
    pub fn new(dims: Dims) -> Self {
        SampleDataset {
            dims,
            transitions: vec![0; dims.len() * dims.s],
            visits: vec![0; dims.len()],
            state_visits: vec![0; dims.h * dims.s],
            expert: vec![0; dims.len()],
            tuples: None,
        }
    }

    /// Dataset that also retains raw tuples.
    pub fn with_tuples(dims: Dims) -> Self {
        SampleDataset {
            tuples: Some(Vec::new()),
            ..SampleDataset::new(dims)
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn tuples(&self) -> Option<&[Sample]> {
        self.tuples.as_deref()
    }

    pub fn record(&mut self, x: Sample) {
        let d = self.dims;
        let i = d.idx(x.h, x.s, x.a);
        self.transitions[i * d.s + x.next] += 1;
        self.visits[i] += 1;
        self.state_visits[x.h * d.s + x.s] += 1;
        self.expert[d.idx(x.h, x.s, x.expert)] += 1;
        if let Some(t) = self.tuples.as_mut() {
            t.push(x);
        }
    }

    /// Queries the oracle once at `(s, a, h)` and records the outcome.
    pub fn collect(&mut self, oracle: &mut GenerativeOracle, s: usize, a: usize, h: usize) -> Result<()> {
        let (next, expert) = oracle.query(s, a, h)?;
        self.record(Sample { s, a, h, next, expert });
        Ok(())
    }

    /// Adds another dataset's counts.
    pub fn merge(&mut self, other: &SampleDataset) -> Result<()> {
        if self.dims != other.dims {
            return Err(IrlError::Dimension("datasets have different dims".into()));
        }
        let add = |x: &mut Vec<u64>, y: &Vec<u64>| x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
        add(&mut self.transitions, &other.transitions);
        add(&mut self.visits, &other.visits);
        add(&mut self.state_visits, &other.state_visits);
        add(&mut self.expert, &other.expert);
        if let (Some(t), Some(o)) = (self.tuples.as_mut(), other.tuples.as_ref()) {
            t.extend_from_slice(o);
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.visits.iter().sum()
    }

    /// `n(s,a)` summed over stages.
    pub fn merged_visits(&self, s: usize, a: usize) -> u64 {
        (0..self.dims.h).map(|h| self.visits[self.dims.idx(h, s, a)]).sum()
    }

    /// `n(s)` summed over stages.
    pub fn merged_state_visits(&self, s: usize) -> u64 {
        (0..self.dims.h).map(|h| self.state_visits[h * self.dims.s + s]).sum()
    }

    /// CSV of `h,s,a,s_next,count` for non-zero counts (stages 1-based).
    pub fn transitions_csv(&self) -> String {
        let d = self.dims;
        let mut out = String::from("h,s,a,s_next,count\n");
        for i in 0..d.len() {
            let (h, s, a) = d.unflatten(i);
            for s2 in 0..d.s {
                let c = self.transitions[i * d.s + s2];
                if c > 0 {
                    out.push_str(&format!("{},{s},{a},{s2},{c}\n", h + 1));
                }
            }
        }
        out
    }

    /// CSV of `h,s,a_e,count` for non-zero counts (stages 1-based).
    pub fn expert_csv(&self) -> String {
        let d = self.dims;
        let mut out = String::from("h,s,a_e,count\n");
        for i in 0..d.len() {
            let (h, s, a) = d.unflatten(i);
            let c = self.expert[i];
            if c > 0 {
                out.push_str(&format!("{},{s},{a},{c}\n", h + 1));
            }
        }
        out
    }
}

/// Empirical kernel and expert policy; unvisited rows fall back to uniform.
/// With `homogeneous`, counts are pooled across stages first.
pub fn build_empirical(data: &SampleDataset, homogeneous: bool) -> Result<(MdpR, PolicyTable)> {
    let d = data.dims;
    let mut p = vec![0.0; d.len() * d.s];
    let mut pi = vec![0.0; d.len()];
    let mut pooled_t = vec![0u64; d.s * d.a * d.s];
    let mut pooled_v = vec![0u64; d.s * d.a];
    let mut pooled_e = vec![0u64; d.s * d.a];
    let mut pooled_sv = vec![0u64; d.s];
    if homogeneous {
        for h in 0..d.h {
            for s in 0..d.s {
                pooled_sv[s] += data.state_visits[h * d.s + s];
                for a in 0..d.a {
                    let i = d.idx(h, s, a);
                    pooled_v[s * d.a + a] += data.visits[i];
                    pooled_e[s * d.a + a] += data.expert[i];
                    for s2 in 0..d.s {
                        pooled_t[(s * d.a + a) * d.s + s2] += data.transitions[i * d.s + s2];
                    }
                }
            }
        }
    }
    for h in 0..d.h {
        for s in 0..d.s {
            let n_s = if homogeneous { pooled_sv[s] } else { data.state_visits[h * d.s + s] };
            for a in 0..d.a {
                let i = d.idx(h, s, a);
                let n_sa = if homogeneous { pooled_v[s * d.a + a] } else { data.visits[i] };
                for s2 in 0..d.s {
                    p[i * d.s + s2] = if n_sa == 0 {
                        1.0 / d.s as f64
                    } else {
                        let c = if homogeneous {
                            pooled_t[(s * d.a + a) * d.s + s2]
                        } else {
                            data.transitions[i * d.s + s2]
                        };
                        c as f64 / n_sa as f64
                    };
                }
                pi[i] = if n_s == 0 {
                    1.0 / d.a as f64
                } else {
                    let c = if homogeneous { pooled_e[s * d.a + a] } else { data.expert[i] };
                    c as f64 / n_s as f64
                };
            }
        }
    }
    normalize_rows(&mut p, d.s);
    normalize_rows(&mut pi, d.a);
    let m = MdpR::new(d, p, homogeneous)?;
    let policy = PolicyTable::new(d, pi, homogeneous)?;
    Ok((m, policy))
}

/// Folds rounding error into the largest entry so rows sum to one.
fn normalize_rows(x: &mut [f64], width: usize) {
    for row in x.chunks_mut(width) {
        let sum: f64 = row.iter().sum();
        if sum != 1.0 {
            let k = (0..row.len())
                .max_by(|&i, &j| row[i].total_cmp(&row[j]))
                .unwrap_or(0);
            row[k] += 1.0 - sum;
        }
    }
}
