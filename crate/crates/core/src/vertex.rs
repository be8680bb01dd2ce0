//! Vertex enumeration for bounded polytopes.
//!
//! Equalities are eliminated first by expressing pivot coordinates through
//! free ones, which keeps the box a box in the free coordinates. The vertex
//! set is then built by incremental cutting (double description): start
//! from the `2^k` corners of the box and intersect with one halfspace at a
//! time, creating new vertices on edges that cross the cutting hyperplane.
//! Two vertices span an edge iff their common active rows have rank `k - 1`.

use crate::error::{IrlError, Result};
use crate::polytope::{RewardPolytope, Row, COEFF_EPS};

pub const DEFAULT_DIM_CAP: usize = 12;
/// Deduplication and activity tolerance.
pub const VERTEX_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// Affine parametrization `x = origin + sum_j z_j * columns[j]` of the
/// solution set of the equality rows.
#[derive(Debug, Clone)]
pub struct AffineReduction {
    pub origin: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
    /// Coordinates of `x` that are free (equal to some `z_j`).
    pub free: Vec<usize>,
}

impl AffineReduction {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn lift(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (zj, col) in z.iter().zip(&self.columns) {
            if *zj != 0.0 {
                for (xi, ci) in x.iter_mut().zip(col) {
                    *xi += zj * ci;
                }
            }
        }
        x
    }

    /// Row `a . x <= b` rewritten over `z`.
    pub fn pull_back(&self, row: &Row) -> Row {
        let coeffs = self
            .columns
            .iter()
            .map(|col| row.coeffs.iter().zip(col).map(|(a, c)| a * c).sum())
            .collect();
        Row {
            coeffs,
            rhs: row.rhs - row.eval(&self.origin),
        }
    }
}

/// Reduced row echelon elimination of `rows . x = rhs`. `None` when the
/// system is inconsistent.
pub fn reduce_equalities(n: usize, rows: &[Row]) -> Option<AffineReduction> {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v = r.coeffs.clone();
            v.push(r.rhs);
            v
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        if rank == m.len() {
            break;
        }
        let (best, mag) = (rank..m.len())
            .map(|r| (r, m[r][col].abs()))
            .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= RANK_TOL {
            continue;
        }
        m.swap(rank, best);
        let inv = 1.0 / m[rank][col];
        m[rank].iter_mut().for_each(|x| *x *= inv);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0.0 {
                let f = row[col];
                row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= f * p);
                row[col] = 0.0;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if m[rank..].iter().any(|row| row[n].abs() > VERTEX_TOL) {
        return None;
    }
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut origin = vec![0.0; n];
    for (i, &c) in pivots.iter().enumerate() {
        origin[c] = m[i][n];
    }
    let columns = free
        .iter()
        .map(|&f| {
            let mut col = vec![0.0; n];
            col[f] = 1.0;
            for (i, &c) in pivots.iter().enumerate() {
                col[c] = -m[i][f];
            }
            col
        })
        .collect();
    Some(AffineReduction { origin, columns, free })
}

/// Ambient dimension minus the rank of the equality system.
pub fn effective_dimension(p: &RewardPolytope) -> usize {
    match reduce_equalities(p.dim(), p.equalities()) {
        Some(red) => red.dim(),
        None => 0,
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn or(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a |= b);
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

/// Rank of the selected rows, stopping early once `target` is reached.
fn rank_at_least(rows: &[Vec<f64>], selected: &Bits, k: usize, target: usize) -> bool {
    let mut m: Vec<Vec<f64>> = selected.ones().map(|i| rows[i].clone()).collect();
    let mut rank = 0;
    for col in 0..k {
        if rank >= target {
            return true;
        }
        let Some(best) = (rank..m.len())
            .filter(|&r| m[r][col].abs() > RANK_TOL)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
        else {
            continue;
        };
        m.swap(rank, best);
        let piv = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[col] / piv[col];
            if f != 0.0 {
                row.iter_mut().zip(&piv).for_each(|(x, p)| *x -= f * p);
            }
        }
        rank += 1;
    }
    rank >= target
}

struct Vertex {
    z: Vec<f64>,
    active: Bits,
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= VERTEX_TOL)
}

/// Vertices of `{z in [-1,1]^k : rows}` by incremental cutting.
fn cut_box(k: usize, rows: &[Row]) -> Vec<Vec<f64>> {
    let total = 2 * k + rows.len();
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(total);
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        normals.push(e.clone());
        e[j] = -1.0;
        normals.push(e);
    }
    normals.extend(rows.iter().map(|r| r.coeffs.clone()));

    let mut verts: Vec<Vertex> = (0..1usize << k)
        .map(|mask| {
            let mut active = Bits::new(total);
            let z = (0..k)
                .map(|j| {
                    if mask >> j & 1 == 1 {
                        active.set(2 * j);
                        1.0
                    } else {
                        active.set(2 * j + 1);
                        -1.0
                    }
                })
                .collect();
            Vertex { z, active }
        })
        .collect();

    for (offset, row) in rows.iter().enumerate() {
        let idx = 2 * k + offset;
        let slack: Vec<f64> = verts.iter().map(|v| row.eval(&v.z) - row.rhs).collect();
        let tol = VERTEX_TOL * (1.0 + row.rhs.abs());
        if slack.iter().all(|&s| s <= tol) {
            for (v, &s) in verts.iter_mut().zip(&slack) {
                if s >= -tol {
                    v.active.set(idx);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..verts.len()).filter(|&i| slack[i] > tol).collect();
        let minus: Vec<usize> = (0..verts.len()).filter(|&i| slack[i] < -tol).collect();
        let mut fresh: Vec<Vertex> = Vec::new();
        for &i in &plus {
            for &j in &minus {
                let common = verts[i].active.and(&verts[j].active);
                if k > 0 && common.count() + 1 < k {
                    continue;
                }
                if !rank_at_least(&normals, &common, k, k.saturating_sub(1)) {
                    continue;
                }
                let t = slack[i] / (slack[i] - slack[j]);
                let z: Vec<f64> = verts[i]
                    .z
                    .iter()
                    .zip(&verts[j].z)
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
                let mut active = common;
                active.set(idx);
                match fresh.iter_mut().find(|f| close(&f.z, &z)) {
                    Some(f) => f.active.or(&active),
                    None => fresh.push(Vertex { z, active }),
                }
            }
        }
        let mut kept: Vec<Vertex> = Vec::with_capacity(verts.len());
        for (mut v, s) in verts.into_iter().zip(slack) {
            if s > tol {
                continue;
            }
            if s >= -tol {
                v.active.set(idx);
            }
            kept.push(v);
        }
        kept.extend(fresh);
        verts = kept;
        if verts.is_empty() {
            break;
        }
    }
    verts.into_iter().map(|v| v.z).collect()
}

/// All extreme points, deduplicated within 1e-9. Refuses when the
/// effective dimension exceeds `dim_cap`.
pub fn enumerate_vertices(p: &RewardPolytope, dim_cap: usize) -> Result<Vec<Vec<f64>>> {
    let Some(red) = reduce_equalities(p.dim(), p.equalities()) else {
        return Ok(Vec::new());
    };
    let k = red.dim();
    if k > dim_cap {
        return Err(IrlError::DimensionCap { dim: k, cap: dim_cap });
    }
    // Free coordinates keep their own box rows; everything else is general.
    let mut is_free = vec![false; p.dim()];
    red.free.iter().for_each(|&f| is_free[f] = true);
    let mut rows = Vec::new();
    for (i, row) in p.inequalities().iter().enumerate() {
        if i < 2 * p.dim() && is_free[i / 2] {
            continue;
        }
        let reduced = red.pull_back(row);
        if reduced.coeffs.iter().all(|c| c.abs() < COEFF_EPS) {
            if reduced.rhs < -VERTEX_TOL {
                return Ok(Vec::new());
            }
            continue;
        }
        if !rows.contains(&reduced) {
            rows.push(reduced);
        }
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for z in cut_box(k, &rows) {
        let x = red.lift(&z);
        if !out.iter().any(|y| close(y, &x)) {
            out.push(x);
        }
    }
    Ok(out)
}
