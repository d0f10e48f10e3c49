//! The windowed estimation loop: one circuit per block, top-two extraction,
//! ambiguity detection and chunk selection.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::{cyclic_min, window_fraction, BitString, MAX_TOTAL_BITS};
use crate::error::{AwqpeError, Result};
use crate::kernel::{self, dirichlet_pmf, infinite_shot_counts, top_two, top_two_random, ShotCounts};
use crate::statevector::{window_distribution_exact, UnitaryModel};

pub const DEFAULT_SHOTS: u64 = 10240;
pub const DEFAULT_EPSILON: f64 = 0.9;

/// How a window's outcome counts are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Multinomial draws from the squared Dirichlet kernel.
    #[default]
    KernelSampling,
    /// Multinomial draws from the simulated circuit's exact distribution.
    StatevectorSampling,
    /// Kernel probabilities scaled to counts; no sampling noise.
    InfiniteShot,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::KernelSampling => "kernel-sampling",
            Backend::StatevectorSampling => "statevector-sampling",
            Backend::InfiniteShot => "infinite-shot",
        })
    }
}

impl FromStr for Backend {
    type Err = AwqpeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernel" | "kernel-sampling" => Ok(Backend::KernelSampling),
            "statevector" | "statevector-sampling" => Ok(Backend::StatevectorSampling),
            "infinite" | "infinite-shot" => Ok(Backend::InfiniteShot),
            other => Err(AwqpeError::Config(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub m_list: Vec<u32>,
    pub shots: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub backend: Backend,
    pub tie_break: TieBreak,
}

impl EstimationConfig {
    pub fn new(m_list: Vec<u32>) -> Self {
        EstimationConfig {
            m_list,
            shots: DEFAULT_SHOTS,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            backend: Backend::default(),
            tie_break: TieBreak::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn n_total(&self) -> u32 {
        self.m_list.iter().sum()
    }

    /// Start bit of each block: `k_i = m_1 + ... + m_(i-1)`.
    pub fn start_bits(&self) -> Vec<u32> {
        self.m_list
            .iter()
            .scan(0, |k, &m| {
                let start = *k;
                *k += m;
                Some(start)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() {
            return Err(AwqpeError::Config("empty window list".into()));
        }
        if let Some(m) = self.m_list.iter().find(|&&m| m < 2) {
            return Err(AwqpeError::Config(format!("window size {m} < 2")));
        }
        if self.n_total() > MAX_TOTAL_BITS {
            return Err(AwqpeError::Config(format!(
                "{} total bits exceeds {MAX_TOTAL_BITS}",
                self.n_total()
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(AwqpeError::Config(format!(
                "epsilon {} not in (0, 1)",
                self.epsilon
            )));
        }
        if self.shots == 0 {
            return Err(AwqpeError::Config("shots must be positive".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of block `index` (0-based): `mix64(master ^ mix64(index))`.
pub fn block_seed(master: u64, index: usize) -> u64 {
    mix64(master ^ mix64(index as u64))
}

/// Diagnostics and selected chunk of one window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowRecord {
    /// 1-based block index.
    pub block: usize,
    pub start_bit: u32,
    pub width: u32,
    pub counts: ShotCounts,
    pub t1: u64,
    pub t2: u64,
    pub ratio: f64,
    pub flag_amb: bool,
    /// Whether `t1` and `t2` are neighbours on the outcome circle.
    pub adjacent: bool,
    pub chunk: BitString,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawEstimate {
    pub raw_bits: BitString,
    pub flags: Vec<bool>,
    pub windows: Vec<WindowRecord>,
}

/// Executes the window that starts at bit `k` with `m` control qubits.
pub fn run_window(
    model: &UnitaryModel,
    k: u32,
    m: u32,
    cfg: &EstimationConfig,
    block_seed: u64,
) -> Result<ShotCounts> {
    match cfg.backend {
        Backend::KernelSampling => {
            let dist = dirichlet_pmf(window_fraction(model.eigenphase(), k)?, m)?;
            Ok(kernel::sample(&dist, cfg.shots, block_seed))
        }
        Backend::StatevectorSampling => {
            let dist = window_distribution_exact(model, m, k)?;
            Ok(kernel::sample(&dist, cfg.shots, block_seed))
        }
        Backend::InfiniteShot => {
            let dist = dirichlet_pmf(window_fraction(model.eigenphase(), k)?, m)?;
            Ok(infinite_shot_counts(&dist))
        }
    }
}

fn choose(counts: &ShotCounts, t1: u64, t2: u64, epsilon: f64, is_final_block: bool) -> (BitString, bool, f64) {
    let c1 = counts.get(t1);
    let ratio = if c1 == 0 {
        0.0
    } else {
        counts.get(t2) as f64 / c1 as f64
    };
    let flag = ratio > epsilon;
    let value = if flag && !is_final_block {
        cyclic_min(t1, t2, 1u64 << counts.m()).expect("top-two outcomes are distinct and in range")
    } else {
        t1
    };
    let chunk = BitString::new(value, counts.m()).expect("outcome fits the window");
    (chunk, flag, ratio)
}

/// Picks the chunk for one window. The flag is set when `C(t2)/C(t1)`
/// exceeds `epsilon`; a flagged non-final window takes the cyclic minimum
/// of the top two outcomes, otherwise the chunk is `t1`.
pub fn select_chunk(counts: &ShotCounts, epsilon: f64, is_final_block: bool) -> (BitString, bool) {
    let (t1, t2) = top_two(counts);
    let (chunk, flag, _) = choose(counts, t1, t2, epsilon, is_final_block);
    (chunk, flag)
}

/// Runs block `index` (0-based) of the estimation on its own.
pub fn estimate_block(model: &UnitaryModel, cfg: &EstimationConfig, index: usize) -> Result<WindowRecord> {
    let m = *cfg
        .m_list
        .get(index)
        .ok_or_else(|| AwqpeError::Config(format!("no block {index}")))?;
    let k: u32 = cfg.m_list[..index].iter().sum();
    let seed = block_seed(cfg.seed, index);
    let counts = run_window(model, k, m, cfg, seed)?;
    let (t1, t2) = match cfg.tie_break {
        TieBreak::LowestIndex => top_two(&counts),
        TieBreak::Random => top_two_random(&counts, &mut ChaCha8Rng::seed_from_u64(mix64(seed))),
    };
    let is_final = index + 1 == cfg.m_list.len();
    let (chunk, flag_amb, ratio) = choose(&counts, t1, t2, cfg.epsilon, is_final);
    let size = 1u64 << m;
    let adjacent = (t1 + 1) % size == t2 || (t2 + 1) % size == t1;
    Ok(WindowRecord {
        block: index + 1,
        start_bit: k,
        width: m,
        counts,
        t1,
        t2,
        ratio,
        flag_amb,
        adjacent,
        chunk,
    })
}

/// Runs every block (in parallel; results are schedule-independent) and
/// concatenates the chunks in block order.
pub fn estimate_raw(model: &UnitaryModel, cfg: &EstimationConfig) -> Result<RawEstimate> {
    cfg.validate()?;
    let windows = (0..cfg.m_list.len())
        .into_par_iter()
        .map(|i| estimate_block(model, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let raw_bits = BitString::concat_all(windows.iter().map(|w| &w.chunk))?;
    let flags = windows.iter().map(|w| w.flag_amb).collect();
    Ok(RawEstimate {
        raw_bits,
        flags,
        windows,
    })
}
