//! Hausdorff distance between reward polytopes under the max-norm reward
//! distance.
//!
//! The directed distance `sup_{x in P} dist(x, Q)` is convex in `x`, so it is
//! attained at a vertex of `P`. Both sets are split into independent blocks
//! of coordinates (connected components of the row-coupling graph); under
//! the max norm the distance between products is the largest blockwise
//! distance, so only blocks need to fit the enumeration cap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};
use crate::polytope::{point_to_set_distance, RewardPolytope};
use crate::vertex::{effective_dimension, enumerate_vertices, DEFAULT_DIM_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact { dim_cap: usize },
    /// Maximizes over `samples` extreme points per block found by
    /// random-objective LPs.
    Randomized { samples: usize, seed: u64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Exact { dim_cap: DEFAULT_DIM_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    LowerBoundOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emptiness {
    NeitherEmpty,
    OneEmpty,
    BothEmpty,
}

/// One direction `sup_{x in from} dist(x, to)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Directed {
    pub value: f64,
    pub witness: Option<Vec<f64>>,
    pub nearest: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub value: f64,
    /// First argument to second.
    pub forward: Directed,
    /// Second argument to first.
    pub backward: Directed,
    pub exactness: Exactness,
    pub emptiness: Emptiness,
    pub blocks: usize,
    pub max_block_dim: usize,
}

/// Coordinate blocks that no row of either polytope couples.
pub fn coordinate_blocks(polys: &[&RewardPolytope]) -> Vec<Vec<usize>> {
    let n = polys.first().map_or(0, |p| p.dim());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for p in polys {
        for row in p.general_rows().iter().chain(p.equalities()) {
            let mut support = row.support();
            if let Some(first) = support.next() {
                let root = find(&mut parent, first);
                for j in support {
                    let r = find(&mut parent, j);
                    if r != root {
                        parent[r] = root;
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn directed_block(
    from: &RewardPolytope,
    to: &RewardPolytope,
    method: Method,
    block: usize,
) -> Result<(f64, Vec<f64>)> {
    let candidates: Vec<Vec<f64>> = match method {
        Method::Exact { dim_cap } => enumerate_vertices(from, dim_cap)?,
        Method::Randomized { samples, seed } => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (block as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut pts: Vec<Vec<f64>> = Vec::new();
            for _ in 0..samples.max(1) {
                let c: Vec<f64> = (0..from.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if let Some(v) = from.maximize(&c)? {
                    if !pts.iter().any(|p| crate::polytope::dist_inf(p, &v) <= 1e-9) {
                        pts.push(v);
                    }
                }
            }
            pts
        }
    };
    let dists: Vec<f64> = candidates
        .par_iter()
        .map(|v| point_to_set_distance(v, to).map(|d| d.distance))
        .collect::<Result<_>>()?;
    let mut best = (0.0, candidates.first().cloned().unwrap_or_default());
    for (d, v) in dists.into_iter().zip(candidates) {
        if d > best.0 {
            best = (d, v);
        }
    }
    Ok(best)
}

fn directed(
    from: &RewardPolytope,
    to: &RewardPolytope,
    blocks: &[Vec<usize>],
    method: Method,
) -> Result<Directed> {
    let mut value = 0.0;
    let mut best: Option<(usize, Vec<f64>)> = None;
    for (b, coords) in blocks.iter().enumerate() {
        let f = from.restrict(coords);
        let t = to.restrict(coords);
        if f.general_rows() == t.general_rows() && f.equalities() == t.equalities() {
            continue;
        }
        let (d, w) = directed_block(&f, &t, method, b)?;
        if d > value || best.is_none() {
            if d > value {
                value = d;
            }
            best = Some((b, w));
        }
    }
    // Embed the block witness in a full point of `from`.
    let base = from
        .feasible_point()?
        .ok_or_else(|| IrlError::Numerical("non-empty polytope lost its feasible point".into()))?;
    let mut witness = base;
    if let Some((b, w)) = best {
        for (&c, x) in blocks[b].iter().zip(w) {
            witness[c] = x;
        }
    }
    let nearest = point_to_set_distance(&witness, to)?.nearest;
    Ok(Directed {
        value,
        witness: Some(witness),
        nearest,
    })
}

/// Hausdorff distance `max(sup_P dist(., Q), sup_Q dist(., P))`.
pub fn hausdorff(p: &RewardPolytope, q: &RewardPolytope, method: Method) -> Result<HausdorffResult> {
    if p.dim() != q.dim() {
        return Err(IrlError::Dimension(format!(
            "polytopes live in dimensions {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    let exactness = match method {
        Method::Exact { .. } => Exactness::Exact,
        Method::Randomized { .. } => Exactness::LowerBoundOnly,
    };
    let (pe, qe) = (p.is_empty()?, q.is_empty()?);
    if pe || qe {
        let infinite = Directed {
            value: f64::INFINITY,
            witness: None,
            nearest: None,
        };
        let zero = Directed {
            value: 0.0,
            witness: None,
            nearest: None,
        };
        let (forward, backward, value, emptiness) = match (pe, qe) {
            (true, true) => (zero.clone(), zero, 0.0, Emptiness::BothEmpty),
            (false, true) => (infinite, zero, f64::INFINITY, Emptiness::OneEmpty),
            _ => (zero, infinite, f64::INFINITY, Emptiness::OneEmpty),
        };
        return Ok(HausdorffResult {
            value,
            forward,
            backward,
            exactness,
            emptiness,
            blocks: 0,
            max_block_dim: 0,
        });
    }
    let blocks = coordinate_blocks(&[p, q]);
    let max_block_dim = blocks
        .iter()
        .map(|c| effective_dimension(&p.restrict(c)).max(effective_dimension(&q.restrict(c))))
        .max()
        .unwrap_or(0);
    if let Method::Exact { dim_cap } = method {
        if max_block_dim > dim_cap {
            return Err(IrlError::DimensionCap {
                dim: max_block_dim,
                cap: dim_cap,
            });
        }
    }
    let forward = directed(p, q, &blocks, method)?;
    let backward = directed(q, p, &blocks, method)?;
    Ok(HausdorffResult {
        value: forward.value.max(backward.value),
        forward,
        backward,
        exactness,
        emptiness: Emptiness::NeitherEmpty,
        blocks: blocks.len(),
        max_block_dim,
    })
}
