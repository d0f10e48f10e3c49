//! Experiment campaigns: single cases, the reference table, exhaustive
//! dyadic grids, Monte Carlo runs, oracle and shot-bound checks, and the
//! perturbation cross-check.
//!
//! A case succeeds when the final bits equal the best `n_total`-bit
//! approximation of the true phase (numerators compared mod `2^n`, so a
//! phase just below 1 rounding to 0 counts).

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::{best_approx, window_fraction, BitString, PhaseValue, FRACTION_BITS};
use crate::bounds::BoundParams;
use crate::constants;
use crate::error::{AwqpeError, Result};
use crate::estimator::{estimate_raw, mix64, Backend, EstimationConfig, RawEstimate};
use crate::kernel::{dirichlet_pmf, sample, top_two};
use crate::resolution::{resolve, ResolvedEstimate};
use crate::statevector::{window_distribution_exact, UnitaryModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub block: usize,
    pub t1: String,
    pub t2: String,
    pub ratio: f64,
    pub flag_amb: bool,
    pub adjacent: bool,
    /// Up to five `(outcome bits, count)` pairs, most frequent first.
    pub top5: Vec<(String, u64)>,
}

/// One estimation run with everything needed to replay it.
///
/// Fields are append-only: records written by older versions stay readable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub phi_true: String,
    /// First `n_total` bits of the binary expansion of the true phase.
    pub phi_true_bits: String,
    /// Best `n_total`-bit approximation of the true phase.
    pub expected_bits: String,
    pub m_list: Vec<u32>,
    pub shots: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub backend: Backend,
    pub raw_bits: String,
    pub flags: Vec<bool>,
    pub last_idx: Option<usize>,
    pub est_bits: String,
    pub est_decimal: String,
    pub success: bool,
    /// Some window's residual fraction is exactly 1/2.
    pub window_tie: bool,
    pub windows: Vec<WindowSummary>,
    /// Shift used by a confirming rerun after a special chunk, if any.
    #[serde(default)]
    pub rerun_shift: Option<String>,
    /// Final bits of the rerun on the shifted phase.
    #[serde(default)]
    pub rerun_est_bits: Option<String>,
}

impl CaseReport {
    fn build(phi: PhaseValue, cfg: &EstimationConfig, raw: &RawEstimate, resolved: &ResolvedEstimate) -> Self {
        let n = cfg.n_total();
        let expected = BitString::new(best_approx(phi, n), n).expect("n validated");
        let truncated = BitString::new((phi.raw() >> (FRACTION_BITS - n)) as u64, n).expect("n validated");
        let windows = raw
            .windows
            .iter()
            .map(|w| {
                let bits = |j: u64| format!("{:0width$b}", j, width = w.width as usize);
                WindowSummary {
                    block: w.block,
                    t1: bits(w.t1),
                    t2: bits(w.t2),
                    ratio: w.ratio,
                    flag_amb: w.flag_amb,
                    adjacent: w.adjacent,
                    top5: w.counts.top(5).into_iter().map(|(j, c)| (bits(j), c)).collect(),
                }
            })
            .collect();
        CaseReport {
            phi_true: phi.to_decimal_string(),
            phi_true_bits: truncated.to_string(),
            expected_bits: expected.to_string(),
            m_list: cfg.m_list.clone(),
            shots: cfg.shots,
            epsilon: cfg.epsilon,
            seed: cfg.seed,
            backend: cfg.backend,
            raw_bits: raw.raw_bits.to_string(),
            flags: raw.flags.clone(),
            last_idx: resolved.last_idx,
            est_bits: resolved.est_bits.to_string(),
            est_decimal: format!("{:?}", resolved.value.to_f64()),
            success: resolved.est_bits == expected,
            window_tie: has_window_tie(phi, &cfg.m_list),
            windows,
            rerun_shift: None,
            rerun_est_bits: None,
        }
    }

    /// The phase this case was run on.
    pub fn phase(&self) -> Result<PhaseValue> {
        PhaseValue::parse(&self.phi_true)
    }

    /// The configuration this case was run with.
    pub fn config(&self) -> EstimationConfig {
        EstimationConfig::new(self.m_list.clone())
            .with_shots(self.shots)
            .with_epsilon(self.epsilon)
            .with_seed(self.seed)
            .with_backend(self.backend)
    }

    /// One line of JSON.
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("case reports serialize")
    }
}

/// True when some window boundary sees a residual fraction of exactly 1/2.
pub fn has_window_tie(phi: PhaseValue, m_list: &[u32]) -> bool {
    let half = PhaseValue::from_raw(1u128 << (FRACTION_BITS - 1));
    m_list
        .iter()
        .scan(0u32, |end, &m| {
            *end += m;
            Some(*end)
        })
        .any(|end| window_fraction(phi, end).map(|r| r == half).unwrap_or(false))
}

/// Estimator, then resolution, then the success check.
pub fn run_case(model: &UnitaryModel, cfg: &EstimationConfig) -> Result<CaseReport> {
    let (raw, resolved) = estimate(model, cfg)?;
    Ok(CaseReport::build(model.eigenphase(), cfg, &raw, &resolved))
}

/// Shift that moves the residual at the special chunk's left boundary from
/// about 1/2 to about 3/4: `2^-(k_j + 2)` for chunk `j` starting at bit `k_j`.
pub fn special_chunk_shift(m_list: &[u32], last_idx: usize) -> Result<PhaseValue> {
    if last_idx == 0 || last_idx > m_list.len() {
        return Err(AwqpeError::Config(format!("special chunk {last_idx} out of range")));
    }
    let k: u32 = m_list[..last_idx - 1].iter().sum();
    PhaseValue::from_dyadic(1, k + 2)
}

/// Like [`run_case`], but when a special chunk is reported the phase is
/// estimated again with [`special_chunk_shift`] applied and the shift is
/// subtracted from that estimate. The rerun result is kept only if it
/// reports no special chunk itself.
pub fn run_case_confirmed(model: &UnitaryModel, cfg: &EstimationConfig) -> Result<CaseReport> {
    let (raw, resolved) = estimate(model, cfg)?;
    let mut report = CaseReport::build(model.eigenphase(), cfg, &raw, &resolved);
    let Some(idx) = resolved.last_idx else {
        return Ok(report);
    };
    let shift = special_chunk_shift(&cfg.m_list, idx)?;
    let (_, second) = estimate(&model.shifted(shift), &cfg.clone().with_seed(mix64(cfg.seed)))?;
    report.rerun_shift = Some(shift.to_decimal_string());
    report.rerun_est_bits = Some(second.est_bits.to_string());
    if second.last_idx.is_none() {
        let n = cfg.n_total();
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let unshifted = second.est_bits.value().wrapping_sub(best_approx(shift, n)) & mask;
        let bits = BitString::new(unshifted, n)?;
        report.success = bits.to_string() == report.expected_bits;
        report.est_decimal = format!("{:?}", bits.to_dyadic().to_f64());
        report.est_bits = bits.to_string();
    }
    Ok(report)
}

/// Raw and resolved estimates for one configuration.
pub fn estimate(model: &UnitaryModel, cfg: &EstimationConfig) -> Result<(RawEstimate, ResolvedEstimate)> {
    let raw = estimate_raw(model, cfg)?;
    let resolved = resolve(&raw.raw_bits, &cfg.m_list, &raw.flags)?;
    Ok((raw, resolved))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub label: String,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Cases with an exact 1/2 window residual.
    pub tie_cases: u64,
    pub tie_successes: u64,
    /// Tie cases off by one unit in the last place with a special chunk found.
    pub tie_special_chunk: u64,
    /// Failed cases, sorted by phase.
    pub failures: Vec<CaseReport>,
    pub wall_time_s: f64,
}

impl CampaignSummary {
    pub fn from_cases(label: impl Into<String>, seed: u64, cases: &[CaseReport], wall_time_s: f64) -> Self {
        let trials = cases.len() as u64;
        let successes = cases.iter().filter(|c| c.success).count() as u64;
        let ties: Vec<&CaseReport> = cases.iter().filter(|c| c.window_tie).collect();
        let mut failures: Vec<CaseReport> = cases.iter().filter(|c| !c.success).cloned().collect();
        failures.sort_by_key(|c| c.phase().map(|p| p.raw()).unwrap_or(0));
        CampaignSummary {
            label: label.into(),
            seed,
            trials,
            successes,
            success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            tie_cases: ties.len() as u64,
            tie_successes: ties.iter().filter(|c| c.success).count() as u64,
            tie_special_chunk: ties
                .iter()
                .filter(|c| !c.success && c.last_idx.is_some() && off_by_one_ulp(c))
                .count() as u64,
            failures,
            wall_time_s,
        }
    }

    /// Successes among cases without a window tie.
    pub fn clean_successes(&self) -> u64 {
        self.successes - self.tie_successes
    }

    pub fn clean_cases(&self) -> u64 {
        self.trials - self.tie_cases
    }
}

fn off_by_one_ulp(c: &CaseReport) -> bool {
    let (Ok(a), Ok(b)) = (c.est_bits.parse::<BitString>(), c.expected_bits.parse::<BitString>()) else {
        return false;
    };
    let modulus_mask = if a.len() == 64 { u64::MAX } else { (1u64 << a.len()) - 1 };
    let d = a.value().wrapping_sub(b.value()) & modulus_mask;
    d == 1 || d == modulus_mask
}

/// Writes one JSON record per case, newline-terminated.
pub fn write_records<W: Write>(cases: &[CaseReport], mut out: W) -> std::io::Result<()> {
    for c in cases {
        writeln!(out, "{}", c.to_record())?;
    }
    Ok(())
}

/// Compositions of `n` into ordered parts of at least `min_part`.
pub fn compositions(n: u32, min_part: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, min_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in min_part.max(1)..=rest {
            prefix.push(part);
            go(rest - part, min_part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = vec![];
    if n > 0 {
        go(n, min_part, &mut vec![], &mut out);
    }
    out
}

/// Every phase `I / 2^n`, once per window list, on the infinite-shot
/// backend. One summary per window list.
pub fn exhaustive_grid(n: u32, m_lists: &[Vec<u32>]) -> Result<Vec<CampaignSummary>> {
    if n == 0 || n > 14 {
        return Err(AwqpeError::Config(format!("grid precision {n} not in 1..=14")));
    }
    m_lists
        .iter()
        .map(|m_list| {
            let cfg = EstimationConfig::new(m_list.clone()).with_backend(Backend::InfiniteShot);
            if cfg.n_total() != n {
                return Err(AwqpeError::Config(format!("{m_list:?} does not sum to {n}")));
            }
            cfg.validate()?;
            let start = Instant::now();
            let cases = (0..1u64 << n)
                .into_par_iter()
                .map(|i| {
                    let phi = PhaseValue::from_dyadic(i, n)?;
                    run_case(&UnitaryModel::diagonal(phi), &cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CampaignSummary::from_cases(
                format!("grid n={n} m={m_list:?}"),
                cfg.seed,
                &cases,
                start.elapsed().as_secs_f64(),
            ))
        })
        .collect()
}

/// Seed of Monte Carlo trial `index`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(index))
}

/// Uniform random phases, one case per trial, in trial order. Trial `t`
/// draws its phase from `trial_seed(cfg.seed, t)` and runs with that seed.
/// With `confirm`, special-chunk cases go through [`run_case_confirmed`].
pub fn monte_carlo_cases(trials: u64, cfg: &EstimationConfig, confirm: bool) -> Result<Vec<CaseReport>> {
    cfg.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.seed, t);
            let phi = PhaseValue::from_raw(ChaCha8Rng::seed_from_u64(seed).gen());
            let model = UnitaryModel::diagonal(phi);
            let cfg = cfg.clone().with_seed(seed);
            if confirm {
                run_case_confirmed(&model, &cfg)
            } else {
                run_case(&model, &cfg)
            }
        })
        .collect()
}

pub fn monte_carlo(trials: u64, n: u32, cfg: &EstimationConfig, confirm: bool) -> Result<CampaignSummary> {
    if trials == 0 {
        return Err(AwqpeError::Config("need at least one trial".into()));
    }
    if cfg.n_total() != n {
        return Err(AwqpeError::Config(format!("{:?} does not sum to {n}", cfg.m_list)));
    }
    let start = Instant::now();
    let cases = monte_carlo_cases(trials, cfg, confirm)?;
    Ok(CampaignSummary::from_cases(
        format!("monte-carlo n={n} m={:?}{}", cfg.m_list, if confirm { " confirmed" } else { "" }),
        cfg.seed,
        &cases,
        start.elapsed().as_secs_f64(),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationVerdict {
    pub phi: String,
    pub delta_phi: String,
    pub est: String,
    pub est_shifted: String,
    pub last_idx: Option<usize>,
    pub last_idx_shifted: Option<usize>,
    /// `est_shifted - est` mod 1.
    pub observed_shift: f64,
    /// Circle distance between the observed and intended shift.
    pub distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Estimates `phi` and `phi + delta_phi` and checks the estimates differ by
/// `delta_phi` within two units in the last place.
pub fn perturbation_check(
    model: &UnitaryModel,
    delta_phi: PhaseValue,
    cfg: &EstimationConfig,
) -> Result<PerturbationVerdict> {
    let (_, first) = estimate(model, cfg)?;
    let shifted = model.shifted(delta_phi);
    let (_, second) = estimate(&shifted, &cfg.clone().with_seed(mix64(cfg.seed)))?;
    let observed = second.value.to_phase().wrapping_sub(first.value.to_phase());
    let distance = observed.circle_distance(delta_phi);
    let tolerance = 2f64.powi(1 - cfg.n_total() as i32);
    Ok(PerturbationVerdict {
        phi: model.eigenphase().to_decimal_string(),
        delta_phi: delta_phi.to_decimal_string(),
        est: first.est_bits.to_string(),
        est_shifted: second.est_bits.to_string(),
        last_idx: first.last_idx,
        last_idx_shifted: second.last_idx,
        observed_shift: observed.to_f64(),
        distance,
        tolerance,
        pass: distance <= tolerance,
    })
}

/// A row of the reference results table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub case: usize,
    pub input: &'static str,
    pub phi: PhaseValue,
    pub m_list: Vec<u32>,
    pub raw_bits: &'static str,
    pub final_bits: &'static str,
    pub final_decimal: &'static str,
}

/// The five published reference cases.
pub fn table1_rows() -> Vec<TableRow> {
    vec![
        TableRow {
            case: 1,
            input: "phi=0.3, m=[2, 2]",
            phi: PhaseValue::parse("0.3").expect("literal"),
            m_list: vec![2, 2],
            raw_bits: "0101",
            final_bits: "0101",
            final_decimal: "0.3125",
        },
        TableRow {
            case: 2,
            input: "phi=pi/6, m=[3, 2, 2, 3]",
            phi: constants::pi_over_6(),
            m_list: vec![3, 2, 2, 3],
            raw_bits: "1000111000",
            final_bits: "1000011000",
            final_decimal: "0.5234375",
        },
        TableRow {
            case: 3,
            input: "phi=0.671875, m=[4, 4]",
            phi: PhaseValue::parse("0.671875").expect("literal"),
            m_list: vec![4, 4],
            raw_bits: "10111100",
            final_bits: "10101100",
            final_decimal: "0.671875",
        },
        TableRow {
            case: 4,
            input: "phi=1/sqrt2, m=[3, 3, 3, 3, 3, 3, 3, 3, 3, 3]",
            phi: constants::inv_sqrt2(),
            m_list: vec![3; 10],
            raw_bits: "110101010000010100110011010101",
            final_bits: "101101010000010011110011001101",
            final_decimal: "0.7071067811921239",
        },
        TableRow {
            case: 5,
            input: "phi=sin(pi/12), m=[5, 6, 7, 4]",
            phi: constants::sin_pi_over_12(),
            m_list: vec![5, 6, 7, 4],
            raw_bits: "0100001001000010001110",
            final_bits: "0100001001000001111110",
            final_decimal: "0.2588191032409668",
        },
    ]
}

/// Runs every reference row with the given shots, threshold, backend and seed.
pub fn run_table1(base: &EstimationConfig) -> Result<Vec<(TableRow, CaseReport)>> {
    table1_rows()
        .into_iter()
        .map(|row| {
            let cfg = EstimationConfig {
                m_list: row.m_list.clone(),
                ..base.clone()
            };
            let report = run_case(&UnitaryModel::diagonal(row.phi), &cfg)?;
            Ok((row, report))
        })
        .collect()
}

/// CSV in the reference table's column order.
pub fn table1_csv(rows: &[(TableRow, CaseReport)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "Test Case",
        "Input Parameters",
        "Raw Binary Estimate",
        "Final Binary Estimate",
        "Final Decimal Estimate",
    ])
    .expect("in-memory write");
    for (row, rep) in rows {
        w.write_record([
            row.case.to_string().as_str(),
            row.input,
            &rep.raw_bits,
            &rep.est_bits,
            &rep.est_decimal,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
}

/// The detailed single-phase example: 0.8203125 with windows [3, 2, 3].
pub fn walkthrough_config(seed: u64) -> (UnitaryModel, EstimationConfig) {
    (
        UnitaryModel::diagonal(PhaseValue::parse("0.8203125").expect("literal")),
        EstimationConfig::new(vec![3, 2, 3]).with_seed(seed),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub phases: usize,
    pub comparisons: usize,
    pub max_distance: f64,
    pub worst_phi: String,
    pub worst_m: u32,
    pub worst_k: u32,
}

/// Max-norm distance between kernel and simulated window distributions for
/// `phases` random phases, every `m` in `2..=m_max` and `k` in `0..=k_max`.
pub fn oracle_check(phases: usize, m_max: u32, k_max: u32, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phis: Vec<PhaseValue> = (0..phases).map(|_| PhaseValue::from_raw(rng.gen())).collect();
    let grid: Vec<(PhaseValue, u32, u32)> = phis
        .iter()
        .flat_map(|&phi| (2..=m_max).flat_map(move |m| (0..=k_max).map(move |k| (phi, m, k))))
        .collect();
    let results = grid
        .par_iter()
        .map(|&(phi, m, k)| {
            let model = UnitaryModel::diagonal(phi);
            let exact = window_distribution_exact(&model, m, k)?;
            let kernel = dirichlet_pmf(window_fraction(phi, k)?, m)?;
            Ok((exact.max_abs_diff(&kernel), phi, m, k))
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_distance, phi, m, k) = results
        .iter()
        .copied()
        .fold((0.0, PhaseValue::ZERO, 0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(OracleReport {
        phases,
        comparisons: results.len(),
        max_distance,
        worst_phi: phi.to_decimal_string(),
        worst_m: m,
        worst_k: k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub m: u32,
    pub epsilon1: f64,
    pub shots: u64,
    pub trials: u64,
    /// Trials whose observed top outcome was neither `T1` nor `T2`.
    pub misses: u64,
    pub miss_rate: f64,
}

/// Samples `trials` random window phases at the shot budget for `epsilon1`
/// and counts top-outcome misses outside `{T1, T2}`.
pub fn validate_top_outcome_bound(m: u32, epsilon1: f64, trials: u64, seed: u64) -> Result<BoundCheck> {
    let params = BoundParams {
        epsilon1,
        ..BoundParams::default()
    };
    let shots = params.shots_for_top_outcome(m)?;
    let size = 1u64 << m;
    let misses = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            let delta = PhaseValue::from_raw(ChaCha8Rng::seed_from_u64(s).gen());
            let dist = dirichlet_pmf(delta, m)?;
            let true_t1 = best_approx(delta, m);
            let (lo, hi) = ((true_t1 + size - 1) % size, (true_t1 + 1) % size);
            let true_t2 = if dist.prob(hi) >= dist.prob(lo) { hi } else { lo };
            let (t1, _) = top_two(&sample(&dist, shots, mix64(s)));
            Ok(u64::from(t1 != true_t1 && t1 != true_t2))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    Ok(BoundCheck {
        m,
        epsilon1,
        shots,
        trials,
        misses,
        miss_rate: misses as f64 / trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase(s: &str) -> PhaseValue {
        PhaseValue::parse(s).unwrap()
    }

    #[test]
    fn walkthrough_case() {
        let (model, cfg) = walkthrough_config(11);
        let r = run_case(&model, &cfg).unwrap();
        assert_eq!(r.raw_bits, "11110010");
        assert_eq!(r.est_bits, "11010010");
        assert_eq!(r.est_decimal, "0.8203125");
        assert!(r.success);
        assert_eq!(r.windows[2].top5, vec![("010".to_string(), 10240)]);
    }

    #[test]
    fn table_row_three_and_zero() {
        let r = run_case(
            &UnitaryModel::diagonal(phase("0.671875")),
            &EstimationConfig::new(vec![4, 4]).with_seed(1),
        )
        .unwrap();
        assert_eq!(r.est_decimal, "0.671875");
        let r = run_case(
            &UnitaryModel::diagonal(PhaseValue::ZERO),
            &EstimationConfig::new(vec![2, 2]).with_seed(1),
        )
        .unwrap();
        assert_eq!(r.est_bits, "0000");
        assert_eq!(r.est_decimal, "0.0");
        assert!(r.success);
    }

    #[test]
    fn near_one_rounds_to_zero_and_succeeds() {
        let r = run_case(
            &UnitaryModel::diagonal(phase("0.999999")),
            &EstimationConfig::new(vec![3, 3]).with_backend(Backend::InfiniteShot),
        )
        .unwrap();
        assert_eq!(r.expected_bits, "000000");
        assert!(r.success, "{r:?}");
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(8, 2).len(), 13);
        assert_eq!(compositions(12, 2).len(), 89);
        assert_eq!(compositions(5, 1).len(), 16);
        assert!(compositions(8, 2).iter().all(|c| c.iter().sum::<u32>() == 8));
    }

    #[test]
    fn small_grids() {
        let s = &exhaustive_grid(6, &[vec![2, 2, 2]]).unwrap()[0];
        assert_eq!(s.trials, 64);
        assert_eq!(s.clean_successes(), s.clean_cases());
        let s = &exhaustive_grid(2, &[vec![2]]).unwrap()[0];
        assert_eq!((s.trials, s.successes), (4, 4));
        assert!(exhaustive_grid(6, &[vec![2, 2]]).is_err());
    }

    #[test]
    fn tie_detection() {
        // 0.6875 = 0.1011: residual after 3 bits is exactly 1/2
        assert!(has_window_tie(phase("0.6875"), &[3, 4]));
        assert!(!has_window_tie(phase("0.8203125"), &[3, 2, 3]));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_replayable() {
        let cfg = EstimationConfig::new(vec![3, 3]).with_seed(77).with_shots(500);
        let a = monte_carlo_cases(20, &cfg, false).unwrap();
        let b = monte_carlo_cases(20, &cfg, false).unwrap();
        assert_eq!(a, b);
        let replay = run_case(&UnitaryModel::diagonal(a[7].phase().unwrap()), &a[7].config()).unwrap();
        assert_eq!(replay, a[7]);
        let one = monte_carlo_cases(1, &cfg, false).unwrap();
        assert_eq!(one[0], a[0]);
    }

    #[test]
    fn perturbation_examples() {
        let cfg = EstimationConfig::new(vec![3, 2, 3]).with_seed(3);
        let model = UnitaryModel::diagonal(phase("0.8203125"));
        assert!(perturbation_check(&model, phase("1/64"), &cfg).unwrap().pass);
        let v = perturbation_check(&model, PhaseValue::ZERO, &cfg).unwrap();
        assert!(v.pass);
        assert_eq!(v.distance, 0.0);
    }

    #[test]
    fn perturbation_clears_special_chunk() {
        let cfg = EstimationConfig::new(vec![3, 3]).with_seed(8);
        let model = UnitaryModel::diagonal(phase("0.6875"));
        let v = perturbation_check(&model, phase("3/256"), &cfg).unwrap();
        assert_eq!(v.last_idx, Some(2));
        assert_eq!(v.last_idx_shifted, None);
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn confirmed_run_undoes_a_suppressed_borrow() {
        // 2^12 phi = 291.52: the final window reads 1000 and the literal rule
        // suppresses the borrow into chunk 3, leaving it one too high
        let model = UnitaryModel::diagonal(phase("29152/409600"));
        let cfg = EstimationConfig::new(vec![4, 4, 4, 4]).with_backend(Backend::InfiniteShot);
        let plain = run_case(&model, &cfg).unwrap();
        assert_eq!(plain.expected_bits, "0001001000111000");
        assert_eq!(plain.last_idx, Some(4));
        assert_eq!(plain.est_bits, "0001001001001000");
        let confirmed = run_case_confirmed(&model, &cfg).unwrap();
        assert_eq!(confirmed.rerun_shift.as_deref(), Some("0.00006103515625"));
        assert_eq!(confirmed.est_bits, "0001001000111000");
        assert!(confirmed.success);
        assert_eq!(special_chunk_shift(&[4, 4, 4, 4], 1).unwrap(), phase("0.25"));
    }

    #[test]
    fn table_csv_header() {
        let rows = run_table1(&EstimationConfig::new(vec![2]).with_backend(Backend::InfiniteShot)).unwrap();
        let csv = table1_csv(&rows);
        assert!(csv.starts_with(
            "Test Case,Input Parameters,Raw Binary Estimate,Final Binary Estimate,Final Decimal Estimate\n"
        ));
        for (row, rep) in &rows {
            assert_eq!(rep.raw_bits, row.raw_bits, "case {}", row.case);
            assert_eq!(rep.est_bits, row.final_bits, "case {}", row.case);
            assert_eq!(rep.est_decimal, row.final_decimal, "case {}", row.case);
        }
    }

    #[test]
    fn records_are_json_lines() {
        let (model, cfg) = walkthrough_config(1);
        let r = run_case(&model, &cfg).unwrap();
        let mut buf = vec![];
        write_records(&[r.clone(), r.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: CaseReport = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
