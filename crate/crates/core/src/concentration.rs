//! KL divergence between categorical distributions and the concentration
//! checks built on it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IrlError, Result};

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(IrlError::Distribution {
            context: what.into(),
            detail: format!("not a probability vector (sum {sum})"),
        });
    }
    Ok(())
}

/// `sum p_i log(p_i / q_i)` with `0 log 0 = 0`; `+inf` when `p` puts mass
/// where `q` has none.
pub fn kl_categorical(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(IrlError::Dimension(format!("kl over {} vs {} outcomes", p.len(), q.len())));
    }
    check_distribution(p, "kl first argument")?;
    check_distribution(q, "kl second argument")?;
    let mut kl = 0.0;
    for (&x, &y) in p.iter().zip(q) {
        if x == 0.0 {
            continue;
        }
        if y == 0.0 {
            return Ok(f64::INFINITY);
        }
        kl += x * (x / y).ln();
    }
    Ok(kl.max(0.0))
}

pub fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum()
}

/// Anytime deviation threshold `log(1/delta) + (D-1) log(e (1 + n/(D-1)))`.
pub fn kl_deviation_threshold(n: f64, delta: f64, outcomes: usize) -> f64 {
    let k = outcomes.saturating_sub(1) as f64;
    let tail = if k == 0.0 { 0.0 } else { k * (std::f64::consts::E * (1.0 + n / k)).ln() };
    (1.0 / delta).ln() + tail
}

/// Monte Carlo frequency of `n KL(p_n, p) > scale * threshold(n, delta)`
/// over `trials` empirical distributions of `n` draws from `p`.
pub fn good_event_check(p: &[f64], n: usize, delta: f64, trials: usize, seed: u64, scale: f64) -> Result<f64> {
    check_distribution(p, "good-event distribution")?;
    if trials == 0 || n == 0 {
        return Err(IrlError::Invalid("good_event_check needs n >= 1 and trials >= 1".into()));
    }
    let cdf: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let threshold = scale * kl_deviation_threshold(n as f64, delta, p.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; p.len()];
    let mut failures = 0usize;
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>() * cdf[cdf.len() - 1];
            let i = cdf
                .iter()
                .position(|&c| u < c)
                .unwrap_or(p.len() - 1);
            counts[i] += 1;
        }
        let phat: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        if n as f64 * kl_categorical(&phat, p)? > threshold {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

/// Sample count after which an action of probability at least `pi_min` has
/// been observed with probability `1 - delta`.
pub fn support_detection_threshold(pi_min: f64, delta: f64) -> f64 {
    if pi_min >= 1.0 || delta >= 1.0 {
        return 1.0;
    }
    (1.0_f64).max((1.0 / delta).ln() / (1.0 / (1.0 - pi_min)).ln())
}

pub fn support_detection_bound(n: u64, pi_min: f64, delta: f64) -> bool {
    n as f64 >= support_detection_threshold(pi_min, delta) - 1e-12
}

/// Pair `((1 + eps v_i) / D, 1 / D)` for a sign vector `v`.
pub fn perturbed_uniform(v: &[i8], eps: f64) -> (Vec<f64>, Vec<f64>) {
    let d = v.len() as f64;
    let p = v.iter().map(|&x| (1.0 + eps * x as f64) / d).collect();
    (p, vec![1.0 / d; v.len()])
}

/// Every balanced `{-1, 1}` vector of length `d` (even `d`).
pub fn balanced_sign_vectors(d: usize) -> Vec<Vec<i8>> {
    assert!(d.is_multiple_of(2) && d <= 24, "balanced vectors need small even length");
    (0u32..(1u32 << d))
        .filter(|m| m.count_ones() as usize == d / 2)
        .map(|m| (0..d).map(|j| if m >> j & 1 == 1 { 1 } else { -1 }).collect())
        .collect()
}
