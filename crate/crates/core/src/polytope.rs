//! Feasible reward sets as explicit polytopes over the flattened reward
//! vector, with emptiness and point-to-set distance via linear programming.

use serde::{Deserialize, Serialize};

use crate::error::{IrlError, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome, LP_TOL};
use crate::mdp::{Dims, MdpR, PolicyTable, Restriction};

/// Coefficients below this magnitude are treated as structural zeros.
pub const COEFF_EPS: f64 = 1e-12;

/// Linear functional `coeffs . x` compared against `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Row {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() < COEFF_EPS)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() >= COEFF_EPS)
            .map(|(i, _)| i)
    }
}

/// `{x : a_i . x <= b_i, e_j . x = f_j}`. The first `2n` inequality rows are
/// always the box `x_k <= 1`, `-x_k <= 1` in coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardPolytope {
    n: usize,
    dims: Option<Dims>,
    inequalities: Vec<Row>,
    equalities: Vec<Row>,
    restriction: Restriction,
    provenance: Option<(MdpR, PolicyTable)>,
}

fn unit(n: usize, i: usize, sign: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = sign;
    e
}

fn box_rows(n: usize) -> Vec<Row> {
    (0..n)
        .flat_map(|i| {
            [
                Row { coeffs: unit(n, i, 1.0), rhs: 1.0 },
                Row { coeffs: unit(n, i, -1.0), rhs: 1.0 },
            ]
        })
        .collect()
}

/// Rows of the linear map `r -> A^{pi}_h(s,a; r)`, indexed like rewards.
pub fn advantage_functionals(m: &MdpR, pi: &PolicyTable) -> Vec<Vec<f64>> {
    let d = m.dims();
    let n = d.len();
    let mut rows = vec![Vec::new(); n];
    // Value functionals of the next stage; V_H = 0.
    let mut v_next: Vec<Vec<f64>> = vec![vec![0.0; n]; d.s];
    for h in (0..d.h).rev() {
        let mut v_here = vec![vec![0.0; n]; d.s];
        for s in 0..d.s {
            let mut qs = Vec::with_capacity(d.a);
            for a in 0..d.a {
                let mut q = vec![0.0; n];
                q[d.idx(h, s, a)] = 1.0;
                for (s2, &p) in m.row(h, s, a).iter().enumerate() {
                    if p != 0.0 {
                        for (qi, vi) in q.iter_mut().zip(&v_next[s2]) {
                            *qi += p * vi;
                        }
                    }
                }
                qs.push(q);
            }
            for (a, q) in qs.iter().enumerate() {
                let w = pi.prob(h, s, a);
                if w != 0.0 {
                    for (vi, qi) in v_here[s].iter_mut().zip(q) {
                        *vi += w * qi;
                    }
                }
            }
            for (a, q) in qs.into_iter().enumerate() {
                rows[d.idx(h, s, a)] = q.iter().zip(&v_here[s]).map(|(x, y)| x - y).collect();
            }
        }
        v_next = v_here;
    }
    rows
}

impl RewardPolytope {
    /// Polytope containing only the box `[-1, 1]^n`.
    pub fn unit_box(n: usize) -> Self {
        RewardPolytope {
            n,
            dims: None,
            inequalities: box_rows(n),
            equalities: Vec::new(),
            restriction: Restriction::None,
            provenance: None,
        }
    }

    /// Box plus extra rows.
    pub fn from_rows(n: usize, inequalities: Vec<Row>, equalities: Vec<Row>) -> Result<Self> {
        if inequalities.iter().chain(&equalities).any(|r| r.coeffs.len() != n) {
            return Err(IrlError::Dimension("row length differs from ambient dimension".into()));
        }
        let mut p = RewardPolytope::unit_box(n);
        p.inequalities.extend(inequalities);
        p.equalities = equalities;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Option<Dims> {
        self.dims
    }

    /// All inequality rows, box first.
    pub fn inequalities(&self) -> &[Row] {
        &self.inequalities
    }

    /// Inequality rows other than the box.
    pub fn general_rows(&self) -> &[Row] {
        &self.inequalities[2 * self.n..]
    }

    pub fn equalities(&self) -> &[Row] {
        &self.equalities
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn provenance(&self) -> Option<&(MdpR, PolicyTable)> {
        self.provenance.as_ref()
    }

    /// Largest constraint violation at `x` (zero when inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ineq = self
            .inequalities
            .iter()
            .map(|r| r.eval(x) - r.rhs)
            .fold(0.0, f64::max);
        self.equalities
            .iter()
            .map(|r| (r.eval(x) - r.rhs).abs())
            .fold(ineq, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n && self.violation(x) <= tol
    }

    /// LP with variables `x` bounded by the box and every non-trivial row.
    /// Extra variables (appended after `x`) are unbounded above, zero below.
    fn lp(&self, extra: usize) -> Option<LinearProgram> {
        let n = self.n;
        let mut lp = LinearProgram::new(n + extra);
        for i in 0..n {
            lp.lower[i] = -1.0;
            lp.upper[i] = 1.0;
        }
        let pad = |c: &[f64]| {
            let mut v = c.to_vec();
            v.resize(n + extra, 0.0);
            v
        };
        for r in self.general_rows() {
            if r.is_zero() {
                if r.rhs < -LP_TOL {
                    return None;
                }
                continue;
            }
            lp.add(pad(&r.coeffs), Cmp::Le, r.rhs);
        }
        for r in &self.equalities {
            if r.is_zero() {
                if r.rhs.abs() > LP_TOL {
                    return None;
                }
                continue;
            }
            lp.add(pad(&r.coeffs), Cmp::Eq, r.rhs);
        }
        Some(lp)
    }

    /// Some point of the polytope, or `None` when empty.
    pub fn feasible_point(&self) -> Result<Option<Vec<f64>>> {
        let Some(lp) = self.lp(0) else {
            return Ok(None);
        };
        match lp.solve()? {
            LpOutcome::Optimal { x, .. } => Ok(Some(x)),
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded => Err(IrlError::Numerical("feasibility LP unbounded".into())),
        }
    }

    /// True iff no point satisfies all constraints (phase-one optimum above 1e-9).
    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.feasible_point()?.is_none())
    }

    /// Maximizer of `c . x`; a vertex whenever the polytope is non-empty.
    pub fn maximize(&self, c: &[f64]) -> Result<Option<Vec<f64>>> {
        let Some(mut lp) = self.lp(0) else {
            return Ok(None);
        };
        lp.objective = c.iter().map(|x| -x).collect();
        match lp.solve()? {
            LpOutcome::Optimal { x, .. } => Ok(Some(x)),
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded => Err(IrlError::Numerical("bounded LP reported unbounded".into())),
        }
    }

    /// Sub-polytope over `coords`. Rows must not couple `coords` with other
    /// coordinates; rows living entirely outside are dropped.
    pub fn restrict(&self, coords: &[usize]) -> RewardPolytope {
        let k = coords.len();
        let mut pos = vec![usize::MAX; self.n];
        for (j, &c) in coords.iter().enumerate() {
            pos[c] = j;
        }
        let project = |rows: &[Row]| -> Vec<Row> {
            rows.iter()
                .filter(|r| r.support().any(|i| pos[i] != usize::MAX))
                .map(|r| {
                    debug_assert!(r.support().all(|i| pos[i] != usize::MAX));
                    Row {
                        coeffs: coords.iter().map(|&c| r.coeffs[c]).collect(),
                        rhs: r.rhs,
                    }
                })
                .collect()
        };
        let mut out = RewardPolytope::unit_box(k);
        out.inequalities.extend(project(self.general_rows()));
        out.equalities = project(&self.equalities);
        out.restriction = self.restriction.clone();
        // Identically-zero rows have empty support and would vanish above.
        for r in self.general_rows().iter().filter(|r| r.is_zero() && r.rhs < 0.0) {
            out.inequalities.push(Row { coeffs: vec![0.0; k], rhs: r.rhs });
        }
        for r in self.equalities.iter().filter(|r| r.is_zero() && r.rhs != 0.0) {
            out.equalities.push(Row { coeffs: vec![0.0; k], rhs: r.rhs });
        }
        out
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            dimension: self.n,
            rows: self.inequalities.iter().map(|r| r.coeffs.clone()).collect(),
            offsets: self.inequalities.iter().map(|r| r.rhs).collect(),
            equalities: self.equalities.iter().map(|r| r.coeffs.clone()).collect(),
            equality_offsets: self.equalities.iter().map(|r| r.rhs).collect(),
            restriction: self.restriction.tag().to_string(),
            beta: self.restriction.beta().map(|b| b.to_vec()),
        }
    }
}

/// Polytope dump: `rows . x <= offsets`, `equalities . x = equality_offsets`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dimension: usize,
    pub rows: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub equalities: Vec<Vec<f64>>,
    pub equality_offsets: Vec<f64>,
    pub restriction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// Feasible reward set of `(m, pi_e)` under a restriction.
pub fn build_polytope(m: &MdpR, pi_e: &PolicyTable, restriction: Restriction) -> Result<RewardPolytope> {
    let d = m.dims();
    if pi_e.dims() != d {
        return Err(IrlError::Dimension("policy and MDP dims differ".into()));
    }
    let n = d.len();
    if let Restriction::BetaMargin(_) = &restriction {
        if !pi_e.is_deterministic() {
            return Err(IrlError::Invalid(
                "beta-margin restriction requires a deterministic expert".into(),
            ));
        }
        restriction.check_margins(d)?;
    }
    let mut ineq = box_rows(n);
    for (i, coeffs) in advantage_functionals(m, pi_e).into_iter().enumerate() {
        let (h, s, a) = d.unflatten(i);
        let rhs = if pi_e.supports(h, s, a) {
            0.0
        } else {
            -restriction.margin(d, h, s)
        };
        ineq.push(Row { coeffs, rhs });
    }
    let mut eq = Vec::new();
    match &restriction {
        Restriction::StateOnly => {
            for h in 0..d.h {
                for s in 0..d.s {
                    for a in 1..d.a {
                        let mut c = vec![0.0; n];
                        c[d.idx(h, s, a)] = 1.0;
                        c[d.idx(h, s, 0)] = -1.0;
                        eq.push(Row { coeffs: c, rhs: 0.0 });
                    }
                }
            }
        }
        Restriction::TimeHomogeneous => {
            for h in 1..d.h {
                for s in 0..d.s {
                    for a in 0..d.a {
                        let mut c = vec![0.0; n];
                        c[d.idx(h, s, a)] = 1.0;
                        c[d.idx(0, s, a)] = -1.0;
                        eq.push(Row { coeffs: c, rhs: 0.0 });
                    }
                }
            }
        }
        _ => {}
    }
    Ok(RewardPolytope {
        n,
        dims: Some(d),
        inequalities: ineq,
        equalities: eq,
        restriction,
        provenance: Some((m.clone(), pi_e.clone())),
    })
}

/// Point-to-set distance under the max norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDistance {
    /// `+inf` when the set is empty.
    pub distance: f64,
    pub nearest: Option<Vec<f64>>,
    pub empty: bool,
}

/// `min t` subject to `|x_i - y_i| <= t`, `y` in the polytope.
pub fn point_to_set_distance(x: &[f64], p: &RewardPolytope) -> Result<PointDistance> {
    let n = p.dim();
    if x.len() != n {
        return Err(IrlError::Dimension(format!(
            "point has {} coordinates, polytope {n}",
            x.len()
        )));
    }
    let empty = PointDistance {
        distance: f64::INFINITY,
        nearest: None,
        empty: true,
    };
    let Some(mut lp) = p.lp(1) else {
        return Ok(empty);
    };
    lp.objective[n] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        let mut up = vec![0.0; n + 1];
        up[i] = 1.0;
        up[n] = -1.0;
        lp.add(up, Cmp::Le, xi);
        let mut down = vec![0.0; n + 1];
        down[i] = -1.0;
        down[n] = -1.0;
        lp.add(down, Cmp::Le, -xi);
    }
    match lp.solve()? {
        LpOutcome::Optimal { x: mut y, .. } => {
            y.truncate(n);
            Ok(PointDistance {
                distance: dist_inf(x, &y),
                nearest: Some(y),
                empty: false,
            })
        }
        LpOutcome::Infeasible { .. } => Ok(empty),
        LpOutcome::Unbounded => Err(IrlError::Numerical("distance LP unbounded".into())),
    }
}

pub fn dist_inf(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
