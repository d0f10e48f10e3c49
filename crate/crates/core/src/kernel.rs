//! Outcome statistics of a single window: the squared Dirichlet kernel,
//! seeded multinomial sampling, and top-two extraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binary::{PhaseValue, FRACTION_BITS};
use crate::error::{AwqpeError, Result};

/// Default bound on the kernel window width (2^24 outcomes).
pub const MAX_KERNEL_WINDOW_BITS: u32 = 24;

/// Scale used by the infinite-shot backend to turn probabilities into counts.
pub const INFINITE_SHOT_SCALE: f64 = 2147483648.0; // 2^31

#[derive(Clone, Debug, PartialEq)]
pub struct WindowOutcomeDistribution {
    m: u32,
    probs: Vec<f64>,
}

impl WindowOutcomeDistribution {
    /// Wraps a probability vector of length `2^m`. Entries are validated,
    /// normalization is the caller's contract.
    pub fn new(m: u32, probs: Vec<f64>) -> Result<Self> {
        if m == 0 || m > 31 || probs.len() != 1usize << m {
            return Err(AwqpeError::LengthMismatch(format!(
                "{} probabilities for a {m}-qubit window",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(AwqpeError::Config("probability outside [0, 1]".into()));
        }
        Ok(WindowOutcomeDistribution { m, probs })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, j: u64) -> f64 {
        self.probs[j as usize]
    }

    /// Most likely outcome, lowest index on ties.
    pub fn argmax(&self) -> u64 {
        let mut best = 0;
        for (j, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = j;
            }
        }
        best as u64
    }

    pub fn max_abs_diff(&self, other: &WindowOutcomeDistribution) -> f64 {
        assert_eq!(self.m, other.m, "distributions over different windows");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Histogram of measured outcomes for one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    m: u32,
    counts: Vec<u64>,
    total: u64,
}

impl ShotCounts {
    pub fn new(m: u32, counts: Vec<u64>) -> Result<Self> {
        if m == 0 || m > 31 || counts.len() != 1usize << m {
            return Err(AwqpeError::LengthMismatch(format!(
                "{} counts for a {m}-qubit window",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(ShotCounts { m, counts, total })
    }

    /// Builds counts from `(outcome, count)` pairs; unspecified outcomes are zero.
    pub fn from_pairs(m: u32, pairs: &[(u64, u64)]) -> Result<Self> {
        let mut counts = vec![0u64; 1usize << m.min(31)];
        for &(j, c) in pairs {
            let slot = counts.get_mut(j as usize).ok_or(AwqpeError::ValueOutOfRange {
                value: j,
                bits: m,
            })?;
            *slot += c;
        }
        ShotCounts::new(m, counts)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, j: u64) -> u64 {
        self.counts.get(j as usize).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    /// The `k` largest counts, descending, ties by ascending outcome; zero
    /// counts are omitted.
    pub fn top(&self, k: usize) -> Vec<(u64, u64)> {
        let mut nonzero: Vec<(u64, u64)> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| (j as u64, c))
            .collect();
        nonzero.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        nonzero.truncate(k);
        nonzero
    }
}

/// Squared Dirichlet kernel for a window of `m` qubits at fractional phase `delta`.
pub fn dirichlet_pmf(delta: PhaseValue, m: u32) -> Result<WindowOutcomeDistribution> {
    dirichlet_pmf_bounded(delta, m, MAX_KERNEL_WINDOW_BITS)
}

/// [`dirichlet_pmf`] with an explicit bound on `m`.
pub fn dirichlet_pmf_bounded(
    delta: PhaseValue,
    m: u32,
    max_m: u32,
) -> Result<WindowOutcomeDistribution> {
    if m == 0 || m > max_m || m > 31 {
        return Err(AwqpeError::WindowTooLarge { m, max: max_m });
    }
    let size = 1u64 << m;
    // 2^m * delta = t + r with integer t and r in [0, 1), split exactly
    let raw = delta.raw();
    let t = (raw >> (FRACTION_BITS - m)) as u64;
    let r = PhaseValue::from_raw(raw << m).to_f64();
    let half = (size / 2) as i64;
    let scale = (size as f64).powi(2);
    // sin(2^m pi theta_j) = +-sin(pi r) for every j
    let numer = (std::f64::consts::PI * r).sin().powi(2);

    let probs = (0..size)
        .map(|j| {
            if r == 0.0 {
                return if j == t { 1.0 } else { 0.0 };
            }
            // theta_j * 2^m = d + r, reduced into (-2^(m-1), 2^(m-1)]
            let mut d = (t.wrapping_sub(j) & (size - 1)) as i64;
            if d >= half {
                d -= size as i64;
            }
            let theta = (d as f64 + r) / size as f64;
            let denom = (std::f64::consts::PI * theta).sin().powi(2);
            (numer / (scale * denom)).min(1.0)
        })
        .collect();
    Ok(WindowOutcomeDistribution { m, probs })
}

/// The two most frequent outcomes, ties broken toward the lowest index.
pub fn top_two(counts: &ShotCounts) -> (u64, u64) {
    let c = &counts.counts;
    let mut t1 = 0usize;
    for j in 1..c.len() {
        if c[j] > c[t1] {
            t1 = j;
        }
    }
    let mut t2 = if t1 == 0 { 1 } else { 0 };
    for j in 0..c.len() {
        if j != t1 && c[j] > c[t2] {
            t2 = j;
        }
    }
    (t1 as u64, t2 as u64)
}

/// Like [`top_two`] but picks uniformly among tied candidates.
pub fn top_two_random<R: Rng + ?Sized>(counts: &ShotCounts, rng: &mut R) -> (u64, u64) {
    let c = &counts.counts;
    let pick = |exclude: Option<usize>, rng: &mut R| {
        let best = c
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != exclude)
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0);
        let tied: Vec<usize> = (0..c.len())
            .filter(|&j| Some(j) != exclude && c[j] == best)
            .collect();
        tied[rng.gen_range(0..tied.len())]
    };
    let t1 = pick(None, rng);
    let t2 = pick(Some(t1), rng);
    (t1 as u64, t2 as u64)
}

/// Draws `n_shots` outcomes from `dist` with a ChaCha8 stream seeded by `seed`.
///
/// Uses inverse-CDF lookup on a running sum, so only IEEE additions and
/// comparisons touch the draws and counts are identical on every platform.
pub fn sample(dist: &WindowOutcomeDistribution, n_shots: u64, seed: u64) -> ShotCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(dist, n_shots, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(
    dist: &WindowOutcomeDistribution,
    n_shots: u64,
    rng: &mut R,
) -> ShotCounts {
    let mut cumulative = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for &p in &dist.probs {
        acc += p;
        cumulative.push(acc);
    }
    // a draw past the rounded total lands on the last outcome with mass
    let last = dist.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; dist.probs.len()];
    for _ in 0..n_shots {
        let u: f64 = rng.gen();
        let j = cumulative.partition_point(|&c| c <= u).min(last);
        counts[j] += 1;
    }
    ShotCounts {
        m: dist.m,
        counts,
        total: n_shots,
    }
}

/// Deterministic stand-in for infinitely many shots: `round(p * 2^31)`.
/// Equal probabilities give equal counts.
pub fn infinite_shot_counts(dist: &WindowOutcomeDistribution) -> ShotCounts {
    let counts: Vec<u64> = dist
        .probs
        .iter()
        .map(|&p| (p * INFINITE_SHOT_SCALE).round() as u64)
        .collect();
    let total = counts.iter().sum();
    ShotCounts {
        m: dist.m,
        counts,
        total,
    }
}
