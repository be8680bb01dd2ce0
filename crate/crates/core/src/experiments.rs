//! Experiment drivers shared by the command-line front end and the
//! acceptance checks: random problem generators, property suites, PAC cells,
//! scaling sweeps and bound tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{d_g, d_qstar, d_vstar, lipschitz_bound, rho_g, OPT_TOL};
use crate::concentration::{
    balanced_sign_vectors, good_event_check, kl_categorical, l1, perturbed_uniform, support_detection_bound,
};
use crate::error::{IrlError, Result};
use crate::hausdorff::{hausdorff, Exactness, Method};
use crate::mdp::{Dims, MdpR, PolicyTable, Restriction, RewardTable};
use crate::polytope::build_polytope;
use crate::sampling::GenerativeOracle;
use crate::usirl::{lower_bound_policy, lower_bound_tau, run_us_irl, upper_bound_tau, ConfidenceConfig, Variant};
use crate::vertex::{effective_dimension, DEFAULT_DIM_CAP};

/// Salt separating instance randomness from oracle randomness.
const INSTANCE_SALT: u64 = 0x5EED_1A57_0000_0001;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector; with `sparse`, each entry is zeroed with
/// probability 1/3 (one entry always survives).
pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize, sparse: bool) -> Vec<f64> {
    let keep = rng.gen_range(0..k);
    let mut w: Vec<f64> = (0..k)
        .map(|i| {
            if sparse && i != keep && rng.gen_bool(1.0 / 3.0) {
                0.0
            } else {
                rng.gen_range(0.05..1.0)
            }
        })
        .collect();
    let t: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= t);
    let head: f64 = w[..k - 1].iter().sum();
    if w[k - 1] > 0.0 || head < 1.0 {
        w[k - 1] = (1.0 - head).max(0.0);
    }
    w
}

pub fn random_mdp(rng: &mut ChaCha8Rng, d: Dims, homogeneous: bool) -> Result<MdpR> {
    if homogeneous {
        let mut kernel = Vec::with_capacity(d.s * d.a * d.s);
        for _ in 0..d.s * d.a {
            kernel.extend(random_distribution(rng, d.s, true));
        }
        return MdpR::homogeneous(d, &kernel);
    }
    let mut p = Vec::with_capacity(d.len() * d.s);
    for _ in 0..d.len() {
        p.extend(random_distribution(rng, d.s, true));
    }
    MdpR::new(d, p, false)
}

pub fn random_deterministic_policy(rng: &mut ChaCha8Rng, d: Dims) -> Result<PolicyTable> {
    let actions: Vec<Vec<usize>> = (0..d.h).map(|_| (0..d.s).map(|_| rng.gen_range(0..d.a)).collect()).collect();
    PolicyTable::deterministic(d, &actions)
}

/// Random expert whose positive probabilities are all at least `pi_min`
/// and at least one state-stage pair mixes two actions (when possible).
pub fn random_stochastic_policy(rng: &mut ChaCha8Rng, d: Dims, pi_min: f64) -> Result<PolicyTable> {
    let max_support = ((1.0 / pi_min).floor() as usize).clamp(1, d.a);
    let mut probs = vec![0.0; d.len()];
    for h in 0..d.h {
        for s in 0..d.s {
            let k = rng.gen_range(1..=max_support);
            let mut actions: Vec<usize> = (0..d.a).collect();
            for i in 0..k {
                let j = rng.gen_range(i..d.a);
                actions.swap(i, j);
            }
            // Each supported action gets pi_min plus a share of the rest.
            let slack = 1.0 - pi_min * k as f64;
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
            let t: f64 = w.iter().sum::<f64>().max(1e-12);
            for (i, &a) in actions[..k].iter().enumerate() {
                probs[d.idx(h, s, a)] = pi_min + slack * w[i] / t;
            }
        }
    }
    if max_support >= 2 {
        // Force one mixed pair so the policy term matters.
        let (h, s) = (rng.gen_range(0..d.h), rng.gen_range(0..d.s));
        for a in 0..d.a {
            probs[d.idx(h, s, a)] = 0.0;
        }
        let a0 = rng.gen_range(0..d.a);
        let a1 = (a0 + 1 + rng.gen_range(0..d.a - 1)) % d.a;
        probs[d.idx(h, s, a0)] = 1.0 - pi_min;
        probs[d.idx(h, s, a1)] = pi_min;
    }
    PolicyTable::new(d, probs, false)
}

pub fn random_reward(rng: &mut ChaCha8Rng, d: Dims) -> Result<RewardTable> {
    RewardTable::new(d, (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(), Restriction::None)
}

/// Mixes every kernel row with a random row using weight up to `scale`.
pub fn perturb_mdp(rng: &mut ChaCha8Rng, m: &MdpR, scale: f64) -> Result<MdpR> {
    let d = m.dims();
    let mut p = Vec::with_capacity(d.len() * d.s);
    for i in 0..d.len() {
        let (h, s, a) = d.unflatten(i);
        let lambda = rng.gen_range(0.0..=scale);
        let q = random_distribution(rng, d.s, true);
        p.extend(m.row(h, s, a).iter().zip(&q).map(|(x, y)| (1.0 - lambda) * x + lambda * y));
    }
    for row in p.chunks_mut(d.s) {
        let t: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= t);
    }
    MdpR::new(d, p, false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// One random perturbed pair of problems with at most 12 reward coordinates.
pub fn random_problem_pair(rng: &mut ChaCha8Rng) -> Result<((MdpR, PolicyTable), (MdpR, PolicyTable))> {
    const SHAPES: [(usize, usize, usize); 5] = [(2, 2, 2), (3, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 1)];
    let (s, a, h) = SHAPES[rng.gen_range(0..SHAPES.len())];
    let d = Dims::new(s, a, h);
    let m = random_mdp(rng, d, false)?;
    let pi = if rng.gen_bool(0.3) {
        random_stochastic_policy(rng, d, 0.3)?
    } else {
        random_deterministic_policy(rng, d)?
    };
    let scale = [0.02, 0.1, 0.3, 1.0][rng.gen_range(0..4)];
    let m2 = perturb_mdp(rng, &m, scale)?;
    let pi2 = if rng.gen_bool(0.25) {
        random_deterministic_policy(rng, d)?
    } else {
        pi.clone()
    };
    Ok(((m, pi), (m2, pi2)))
}

/// Exact Hausdorff distance against the Lipschitz bound on random pairs.
pub fn lipschitz_suite(pairs: usize, seed: u64) -> Result<SuiteReport> {
    let results: Vec<Result<(f64, f64, usize)>> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed.wrapping_add(i as u64));
            let ((m, pi), (m2, pi2)) = random_problem_pair(&mut rng)?;
            let p = build_polytope(&m, &pi, Restriction::None)?;
            let q = build_polytope(&m2, &pi2, Restriction::None)?;
            let dim = effective_dimension(&p).max(effective_dimension(&q));
            let h = hausdorff(&p, &q, Method::default())?;
            let rho = rho_g(&m, &pi, &m2, &pi2)?.value;
            Ok((h.value, lipschitz_bound(rho), dim))
        })
        .collect();
    let mut ok = 0;
    let mut worst_slack = f64::INFINITY;
    let mut max_dim = 0;
    for r in &results {
        let (h, bound, dim) = r.clone()?;
        max_dim = max_dim.max(dim);
        worst_slack = worst_slack.min(bound - h);
        if h <= bound + 1e-6 {
            ok += 1;
        }
    }
    Ok(SuiteReport {
        suite: "lipschitz".into(),
        seed,
        checks: vec![
            check(
                "hausdorff_within_lipschitz_bound",
                ok == pairs,
                format!("{ok}/{pairs} pairs, smallest slack {worst_slack:.3e}"),
            ),
            check(
                "effective_dimension_within_cap",
                max_dim <= DEFAULT_DIM_CAP,
                format!("largest effective dimension {max_dim}"),
            ),
        ],
    })
}

/// `d_Q* <= H d_G`, `d_V* <= 2H d_G` and `d_V* <= 2H d_Q*` on random triples.
pub fn metrics_suite(triples: usize, seed: u64) -> Result<SuiteReport> {
    let mut counts = [0usize; 3];
    let mut rng = rng_for(seed);
    for _ in 0..triples {
        let d = Dims::new(rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen_range(1..=4));
        let m = random_mdp(&mut rng, d, false)?;
        let r = random_reward(&mut rng, d)?;
        // Half the time compare with a small perturbation of `r`.
        let r2 = if rng.gen_bool(0.5) {
            let noise = rng.gen_range(0.0..0.2);
            let v: Vec<f64> = r
                .values()
                .iter()
                .map(|x| (x + rng.gen_range(-noise..=noise)).clamp(-1.0, 1.0))
                .collect();
            RewardTable::new(d, v, Restriction::None)?
        } else {
            random_reward(&mut rng, d)?
        };
        let h = d.h as f64;
        let g = d_g(&r, &r2)?;
        let q = d_qstar(&r, &r2, &m)?;
        let v = d_vstar(&r, &r2, &m, OPT_TOL)?;
        counts[0] += (q <= h * g + 1e-8) as usize;
        counts[1] += (v <= 2.0 * h * g + 1e-8) as usize;
        counts[2] += (v <= 2.0 * h * q + 1e-8) as usize;
    }
    let names = ["qstar_le_h_dg", "vstar_le_2h_dg", "vstar_le_2h_qstar"];
    Ok(SuiteReport {
        suite: "metrics".into(),
        seed,
        checks: names
            .iter()
            .zip(counts)
            .map(|(n, c)| check(n, c == triples, format!("{c}/{triples}")))
            .collect(),
    })
}

/// KL bound for perturbed-uniform pairs, anytime good event frequency,
/// Pinsker's inequality and the support-detection threshold.
pub fn concentration_suite(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    let mut all = true;
    for d in [2usize, 4, 8] {
        for eps in [0.1, 0.25, 0.5] {
            for v in balanced_sign_vectors(d) {
                let (p, q) = perturbed_uniform(&v, eps);
                let a = kl_categorical(&p, &q)?;
                let b = kl_categorical(&q, &p)?;
                worst = worst.max(a.max(b) / (2.0 * eps * eps));
                all &= a <= 2.0 * eps * eps && b <= 2.0 * eps * eps;
            }
        }
    }
    checks.push(check(
        "perturbed_uniform_kl",
        all,
        format!("largest KL / (2 eps^2) = {worst:.4}"),
    ));

    let p = [0.2, 0.3, 0.5];
    let rate = good_event_check(&p, 50, 0.1, 2000, seed, 1.0)?;
    checks.push(check("good_event_rate", rate <= 0.1, format!("failure rate {rate:.4} at n=50, delta=0.1")));

    let mut rng = rng_for(seed ^ 0xABCD);
    let mut pinsker_ok = 0;
    for _ in 0..1000 {
        let k = rng.gen_range(2..=6);
        let p = random_distribution(&mut rng, k, false);
        let q = random_distribution(&mut rng, k, false);
        if l1(&p, &q) <= (2.0 * kl_categorical(&p, &q)?).sqrt() + 1e-12 {
            pinsker_ok += 1;
        }
    }
    checks.push(check("pinsker", pinsker_ok == 1000, format!("{pinsker_ok}/1000 pairs")));

    // Empirical detection frequency at the threshold sample size.
    let (pi_min, delta) = (0.3, 0.1);
    let n = (1..).find(|&n| support_detection_bound(n, pi_min, delta)).unwrap_or(1);
    let trials = 20000;
    let mut missed = 0;
    for _ in 0..trials {
        if (0..n).all(|_| !rng.gen_bool(pi_min)) {
            missed += 1;
        }
    }
    let miss_rate = missed as f64 / trials as f64;
    checks.push(check(
        "support_detection",
        miss_rate <= delta + 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt(),
        format!("n = {n}, miss rate {miss_rate:.4}"),
    ));
    Ok(SuiteReport {
        suite: "concentration".into(),
        seed,
        checks,
    })
}

/// Hausdorff estimate of a run; exact when every block fits the cap, else a
/// bracket from random extreme points and the Lipschitz bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffEstimate {
    pub exact: bool,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HausdorffMode {
    Skip,
    /// Exact when it fits, nothing otherwise.
    ExactOnly,
    /// Exact when it fits, bracket otherwise.
    ExactOrBracket,
}

pub fn estimate_hausdorff(
    (m, pi): (&MdpR, &PolicyTable),
    (m2, pi2): (&MdpR, &PolicyTable),
    mode: HausdorffMode,
    seed: u64,
) -> Result<Option<HausdorffEstimate>> {
    if mode == HausdorffMode::Skip {
        return Ok(None);
    }
    let p = build_polytope(m, pi, Restriction::None)?;
    let q = build_polytope(m2, pi2, Restriction::None)?;
    match hausdorff(&p, &q, Method::default()) {
        Ok(h) => Ok(Some(HausdorffEstimate {
            exact: h.exactness == Exactness::Exact,
            lower: h.value,
            upper: h.value,
        })),
        Err(IrlError::DimensionCap { .. }) if mode == HausdorffMode::ExactOrBracket => {
            let lo = hausdorff(&p, &q, Method::Randomized { samples: 16, seed })?;
            let rho = rho_g(m, pi, m2, pi2)?.value;
            Ok(Some(HausdorffEstimate {
                exact: false,
                lower: lo.value,
                upper: lipschitz_bound(rho).max(lo.value),
            }))
        }
        Err(IrlError::DimensionCap { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// One grid cell of a PAC sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSpec {
    pub dims: Dims,
    pub epsilon: f64,
    pub delta: f64,
    pub variant: Variant,
    pub pi_min: Option<f64>,
    pub max_samples: u64,
}

impl CellSpec {
    pub fn config(&self) -> ConfidenceConfig {
        ConfidenceConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            variant: self.variant,
            pi_min: self.pi_min,
            max_samples: self.max_samples,
        }
    }
}

/// Source of the ground-truth problem for each run.
#[derive(Debug, Clone)]
pub enum ProblemSource {
    /// Fresh random problem per seed; deterministic expert for known-policy
    /// variants, `pi_min`-stochastic otherwise.
    Random,
    Fixed(MdpR, PolicyTable),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub spec: CellSpec,
    pub seed: u64,
    pub tau: u64,
    pub rounds: u64,
    pub eps_tau: f64,
    /// Largest confidence one round before the stop.
    pub eps_before: f64,
    pub capped: bool,
    pub hausdorff: Option<HausdorffEstimate>,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn tau_within_bound(&self) -> bool {
        self.error.is_none() && (self.tau as f64) <= self.upper_bound
    }

    /// The run certainly failed the accuracy target, or could not be shown
    /// to meet it.
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.capped || self.hausdorff.is_none_or(|h| h.upper > self.spec.epsilon)
    }
}

pub fn problem_for(spec: &CellSpec, source: &ProblemSource, seed: u64) -> Result<(MdpR, PolicyTable)> {
    match source {
        ProblemSource::Fixed(m, pi) => Ok((m.clone(), pi.clone())),
        ProblemSource::Random => {
            let mut rng = rng_for(seed ^ INSTANCE_SALT);
            let m = random_mdp(&mut rng, spec.dims, spec.variant.homogeneous())?;
            let pi = if spec.variant.known_policy() {
                random_deterministic_policy(&mut rng, spec.dims)?
            } else {
                random_stochastic_policy(&mut rng, spec.dims, spec.pi_min.unwrap_or(1.0))?
            };
            Ok((m, pi))
        }
    }
}

fn run_one(spec: &CellSpec, source: &ProblemSource, seed: u64, mode: HausdorffMode) -> Result<RunRecord> {
    let (m, pi) = problem_for(spec, source, seed)?;
    let upper_bound = upper_bound_tau(spec.dims, spec.epsilon, spec.delta, spec.variant, spec.pi_min)?;
    let lower_bound = lower_bound_tau(spec.dims, spec.epsilon, spec.delta, spec.variant, spec.pi_min)?.value;
    let mut oracle = GenerativeOracle::new(m.clone(), pi.clone(), seed)?;
    let trace = run_us_irl(&mut oracle, &spec.config())?;
    let (m_hat, pi_hat) = trace.empirical_tables()?;
    let hausdorff = estimate_hausdorff((&m, &pi), (&m_hat, &pi_hat), mode, seed)?;
    let n = trace.eps_rounds.len();
    Ok(RunRecord {
        spec: spec.clone(),
        seed,
        tau: trace.tau,
        rounds: trace.rounds,
        eps_tau: trace.final_eps(),
        eps_before: if n >= 2 { trace.eps_rounds[n - 2] } else { f64::INFINITY },
        capped: trace.capped,
        hausdorff,
        upper_bound,
        lower_bound,
        error: None,
    })
}

/// Runs every seed of a cell in parallel; failures are kept in the record.
pub fn run_cell(spec: &CellSpec, source: &ProblemSource, seeds: &[u64], mode: HausdorffMode) -> Vec<RunRecord> {
    let mut out: Vec<RunRecord> = seeds
        .par_iter()
        .map(|&seed| {
            run_one(spec, source, seed, mode).unwrap_or_else(|e| RunRecord {
                spec: spec.clone(),
                seed,
                tau: 0,
                rounds: 0,
                eps_tau: f64::NAN,
                eps_before: f64::NAN,
                capped: false,
                hausdorff: None,
                upper_bound: f64::NAN,
                lower_bound: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect();
    out.sort_by_key(|r| r.seed);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub runs: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    /// `delta + 3 sqrt(delta (1 - delta) / runs)`.
    pub allowed_failure: f64,
    pub tau_within_bound: usize,
    pub exact_hausdorff_runs: usize,
    pub mean_tau: f64,
}

pub fn summarize(records: &[RunRecord]) -> CellSummary {
    let runs = records.len();
    let delta = records.first().map_or(0.0, |r| r.spec.delta);
    let failures = records.iter().filter(|r| r.failed()).count();
    CellSummary {
        runs,
        failures,
        failure_fraction: failures as f64 / runs.max(1) as f64,
        allowed_failure: delta + 3.0 * (delta * (1.0 - delta) / runs.max(1) as f64).sqrt(),
        tau_within_bound: records.iter().filter(|r| r.tau_within_bound()).count(),
        exact_hausdorff_runs: records.iter().filter(|r| r.hausdorff.is_some_and(|h| h.exact)).count(),
        mean_tau: records.iter().map(|r| r.tau as f64).sum::<f64>() / runs.max(1) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    S,
    A,
    H,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Axis::S),
            "A" | "a" => Ok(Axis::A),
            "H" | "h" => Ok(Axis::H),
            other => Err(IrlError::Invalid(format!("unknown axis `{other}`"))),
        }
    }

    pub fn apply(self, d: Dims, v: usize) -> Dims {
        match self {
            Axis::S => Dims::new(v, d.a, d.h),
            Axis::A => Dims::new(d.s, v, d.h),
            Axis::H => Dims::new(d.s, d.a, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub value: usize,
    pub mean_tau: f64,
    pub taus: Vec<u64>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Mean stopping time along one axis and the fitted log-log slope.
pub fn scaling(axis: Axis, values: &[usize], base: &CellSpec, seeds: &[u64]) -> Result<(Vec<ScalingPoint>, f64)> {
    if values.len() < 4 {
        return Err(IrlError::Invalid("scaling needs at least 4 grid points".into()));
    }
    let mut points = Vec::new();
    for &v in values {
        let spec = CellSpec {
            dims: axis.apply(base.dims, v),
            ..base.clone()
        };
        let records = run_cell(&spec, &ProblemSource::Random, seeds, HausdorffMode::Skip);
        if let Some(e) = records.iter().find_map(|r| r.error.clone()) {
            return Err(IrlError::Numerical(format!("scaling run failed at {v}: {e}")));
        }
        if records.iter().any(|r| r.capped) {
            return Err(IrlError::Numerical(format!("scaling run hit the sample cap at {v}")));
        }
        let taus: Vec<u64> = records.iter().map(|r| r.tau).collect();
        let mean_tau = taus.iter().map(|&t| t as f64).sum::<f64>() / taus.len() as f64;
        points.push(ScalingPoint { value: v, mean_tau, taus });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.value as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_tau).collect();
    Ok((points, loglog_slope(&xs, &ys)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub bound: String,
    pub value: f64,
    /// Only meaningful for lower bounds.
    pub in_range: bool,
}

/// Every upper and lower bound available for the inputs; policy bounds
/// appear only with `pi_min`.
pub fn bounds_table(dims: Dims, epsilon: f64, delta: f64, pi_min: Option<f64>) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for v in Variant::ALL {
        if !v.known_policy() && pi_min.is_none() {
            continue;
        }
        rows.push(BoundRow {
            bound: format!("upper/{}", v.tag()),
            value: upper_bound_tau(dims, epsilon, delta, v, pi_min)?,
            in_range: true,
        });
    }
    for (name, hom) in [("lower/inhomogeneous", false), ("lower/homogeneous", true)] {
        let b = crate::usirl::lower_bound_transitions(dims, epsilon, delta, hom);
        rows.push(BoundRow {
            bound: name.into(),
            value: b.value,
            in_range: b.in_range,
        });
    }
    if let Some(p) = pi_min {
        for (name, hom) in [("lower-policy/inhomogeneous", false), ("lower-policy/homogeneous", true)] {
            let b = lower_bound_policy(dims, epsilon, delta, p, hom);
            rows.push(BoundRow {
                bound: name.into(),
                value: b.value,
                in_range: b.in_range,
            });
        }
    }
    Ok(rows)
}
