//! Hoeffding-based shot budgets for a single window.

use std::f64::consts::PI;

use crate::error::{AwqpeError, Result};

/// Lower bound on the peak probability of the kernel, `4 / pi^2`.
pub fn peak_probability_floor() -> f64 {
    4.0 / (PI * PI)
}

/// Upper bound on any outcome at least 1.5 steps from `2^m delta`,
/// `1 / (1.5 pi)^2`.
pub fn non_adjacent_ceiling() -> f64 {
    1.0 / (1.5 * PI).powi(2)
}

/// Exact ceiling for outcomes at least 1.5 steps away in an `m`-qubit
/// window, `1 / (4^m sin^2(1.5 pi / 2^m))`. It tends to
/// [`non_adjacent_ceiling`] from above as `m` grows (0.073 at `m = 2`).
pub fn non_adjacent_ceiling_exact(m: u32) -> Result<f64> {
    if !(2..=62).contains(&m) {
        return Err(AwqpeError::BoundParam(format!("window size {m} not in 2..=62")));
    }
    let size = (1u64 << m) as f64;
    Ok(1.0 / (size * size * (1.5 * PI / size).sin().powi(2)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub delta_r: f64,
    pub epsilon: f64,
    pub p1: f64,
    pub delta_p_min: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            epsilon1: 0.01,
            epsilon2: 0.01,
            delta_r: 0.05,
            epsilon: 0.9,
            p1: peak_probability_floor(),
            delta_p_min: peak_probability_floor() - non_adjacent_ceiling(),
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(AwqpeError::BoundParam(format!("{name} = {v} not in (0, 1)")))
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        open_unit("epsilon1", self.epsilon1)?;
        open_unit("epsilon2", self.epsilon2)?;
        open_unit("delta_r", self.delta_r)?;
        open_unit("epsilon", self.epsilon)?;
        open_unit("p1", self.p1)?;
        open_unit("delta_p_min", self.delta_p_min)
    }

    /// `2 / delta_p_min^2`, about 15.41 with the default gap.
    pub fn top_outcome_constant(&self) -> f64 {
        2.0 / self.delta_p_min.powi(2)
    }

    /// Shots so the observed top outcome is `T1` or `T2` with probability
    /// at least `1 - epsilon1`:
    /// `ceil((2 / delta_p_min^2) * ln((2^m - 2) / epsilon1))`.
    pub fn shots_for_top_outcome(&self, m: u32) -> Result<u64> {
        if !(2..=62).contains(&m) {
            return Err(AwqpeError::BoundParam(format!(
                "window size {m}: need 2^m - 2 > 0"
            )));
        }
        self.shots_for_competitors((1u64 << m) - 2)
    }

    /// The top-outcome budget for an arbitrary number of non-adjacent
    /// competitors (`2^m - 2` for a window).
    pub fn shots_for_competitors(&self, competitors: u64) -> Result<u64> {
        if competitors == 0 {
            return Err(AwqpeError::BoundParam("no competing outcomes".into()));
        }
        open_unit("epsilon1", self.epsilon1)?;
        open_unit("delta_p_min", self.delta_p_min)?;
        let n = self.top_outcome_constant() * (competitors as f64 / self.epsilon1).ln();
        Ok(n.max(0.0).ceil() as u64)
    }

    /// Shots so the ambiguity decision is right with probability at least
    /// `1 - epsilon2` when the true ratio is `delta_r` away from `epsilon`:
    /// `ceil((1 + eps)^2 / (2 p1^2 delta_r^2) * ln(1 / epsilon2))`.
    pub fn shots_for_ambiguity(&self) -> Result<u64> {
        shots_for_ambiguity(self.epsilon, self.delta_r, self.p1, self.epsilon2)
    }
}

/// [`BoundParams::shots_for_top_outcome`] with the default gap.
pub fn shots_for_top_outcome(m: u32, epsilon1: f64) -> Result<u64> {
    BoundParams {
        epsilon1,
        ..BoundParams::default()
    }
    .shots_for_top_outcome(m)
}

pub fn shots_for_ambiguity(epsilon: f64, delta_r: f64, p1: f64, epsilon2: f64) -> Result<u64> {
    open_unit("epsilon", epsilon)?;
    if delta_r.is_nan() || delta_r <= 0.0 {
        return Err(AwqpeError::BoundParam(format!("delta_r = {delta_r} must be positive")));
    }
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(AwqpeError::BoundParam(format!("p1 = {p1} not in (0, 1]")));
    }
    if !(epsilon2 > 0.0 && epsilon2 <= 1.0) {
        return Err(AwqpeError::BoundParam(format!("epsilon2 = {epsilon2} not in (0, 1]")));
    }
    let n = (1.0 + epsilon).powi(2) / (2.0 * p1 * p1 * delta_r * delta_r) * (1.0 / epsilon2).ln();
    Ok(n.max(0.0).ceil() as u64)
}

/// Hoeffding bound on one wrong outcome out-counting the peak:
/// `exp(-N gap^2 / 2)`.
pub fn pair_error_bound(n_shots: u64, gap: f64) -> Result<f64> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(AwqpeError::BoundParam(format!("gap = {gap} not in (0, 1]")));
    }
    Ok((-(n_shots as f64) * gap * gap / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_about_15_41() {
        let p = BoundParams::default();
        assert!((p.top_outcome_constant() - 15.41).abs() < 0.01, "{}", p.top_outcome_constant());
        assert!(p.delta_p_min >= 0.36);
        assert!((peak_probability_floor() - 0.405).abs() < 1e-3);
        assert!((non_adjacent_ceiling() - 0.045).abs() < 1e-3);
    }

    #[test]
    fn exact_ceiling_approaches_the_limit() {
        assert!((non_adjacent_ceiling_exact(2).unwrap() - 0.0732).abs() < 1e-4);
        let mut prev = f64::INFINITY;
        for m in 2..16 {
            let c = non_adjacent_ceiling_exact(m).unwrap();
            assert!(c > non_adjacent_ceiling() && c < prev);
            prev = c;
        }
        assert!((non_adjacent_ceiling_exact(30).unwrap() - non_adjacent_ceiling()).abs() < 1e-12);
        assert!(non_adjacent_ceiling_exact(1).is_err());
    }

    #[test]
    fn top_outcome_examples() {
        assert_eq!(shots_for_top_outcome(3, 0.01).unwrap(), 99);
        assert_eq!(shots_for_top_outcome(2, 0.05).unwrap(), 57);
        assert!(shots_for_top_outcome(1, 0.01).is_err());
        assert!(shots_for_top_outcome(3, 0.0).is_err());
    }

    #[test]
    fn doubling_competitors_adds_a_constant() {
        let p = BoundParams::default();
        for m in 2..40 {
            let c = (1u64 << m) - 2;
            let a = p.shots_for_competitors(c).unwrap();
            let b = p.shots_for_competitors(2 * c).unwrap();
            assert!(b >= a);
            assert!((b - a) as f64 <= 15.42 * 2f64.ln() + 1.0, "m={m}: {a} -> {b}");
        }
        for m in 2..30 {
            assert!(shots_for_top_outcome(m + 1, 0.01).unwrap() > shots_for_top_outcome(m, 0.01).unwrap());
        }
    }

    #[test]
    fn ambiguity_examples() {
        // (1.9^2 / (2 (4/pi^2)^2 0.05^2)) ln 100 = 20242.4...
        assert_eq!(shots_for_ambiguity(0.9, 0.05, peak_probability_floor(), 0.01).unwrap(), 20243);
        assert_eq!(shots_for_ambiguity(0.9, 0.05, peak_probability_floor(), 1.0).unwrap(), 0);
        let a = shots_for_ambiguity(0.9, 0.05, 0.5, 0.01).unwrap();
        let b = shots_for_ambiguity(0.9, 0.10, 0.5, 0.01).unwrap();
        assert!((a as f64 / 4.0 - b as f64).abs() <= 1.0);
        assert!(shots_for_ambiguity(0.9, 0.0, 0.5, 0.01).is_err());
        assert!(shots_for_ambiguity(0.9, 0.05, 0.0, 0.01).is_err());
        assert_eq!(BoundParams::default().shots_for_ambiguity().unwrap(), 20243);
    }

    #[test]
    fn pair_bound_examples() {
        assert_eq!(pair_error_bound(0, 0.36).unwrap(), 1.0);
        let v = pair_error_bound(100, 0.36).unwrap();
        assert!((v - 1.534e-3).abs() < 1e-6, "{v}");
        let mut prev = 1.0;
        for n in 1..200 {
            let v = pair_error_bound(n, 0.36).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(pair_error_bound(10, 0.0).is_err());
    }
}
