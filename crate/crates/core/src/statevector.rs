//! Exact statevector simulation of window circuits.
//!
//! Qubit convention: the state index is `target * 2^m + control`, so control
//! qubit `p` is the `p`-th least significant index bit and the target
//! register sits above the control register. A measured control register
//! reads as the integer `sum_p bit_p * 2^p`.
//!
//! The inverse QFT is decomposed as `floor(m/2)` swaps reversing qubit
//! order, then for each qubit `i = 0..m` the controlled phases
//! `CP(-pi / 2^(i-j))` from every lower qubit `j < i`, followed by `H(i)`.
//! That is `m` Hadamards, `m(m-1)/2` controlled rotations and `floor(m/2)`
//! swaps, the same counts the resource report uses.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use num_complex::Complex64;

use crate::binary::{window_fraction, PhaseValue};
use crate::error::{AwqpeError, Result};
use crate::kernel::WindowOutcomeDistribution;

/// Largest simulated register (control plus target qubits).
pub const MAX_SIM_QUBITS: u32 = 26;

const UNITARITY_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

/// The operator whose eigenphase is estimated.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryModel {
    /// `diag(1, e^{2 pi i phi})` on one qubit, prepared in `|1>`.
    Diagonal { eigenphase: PhaseValue },
    /// A dense `2^n_t x 2^n_t` unitary (row-major) with a supplied eigenstate.
    Dense {
        target_qubits: u32,
        matrix: Vec<Complex64>,
        eigenstate: Vec<Complex64>,
        eigenphase: PhaseValue,
    },
}

impl UnitaryModel {
    pub fn diagonal(eigenphase: PhaseValue) -> Self {
        UnitaryModel::Diagonal { eigenphase }
    }

    /// Validates and builds a dense model.
    pub fn dense(
        target_qubits: u32,
        matrix: Vec<Complex64>,
        eigenstate: Vec<Complex64>,
        eigenphase: PhaseValue,
    ) -> Result<Self> {
        let model = UnitaryModel::Dense {
            target_qubits,
            matrix,
            eigenstate,
            eigenphase,
        };
        model.validate()?;
        Ok(model)
    }

    /// The single-qubit phase gate `diag(1, e^{2 pi i phi})` as a dense model.
    pub fn dense_phase_gate(phi: PhaseValue) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let matrix = vec![one, zero, zero, Complex64::from_polar(1.0, 2.0 * PI * phi.to_f64())];
        UnitaryModel::Dense {
            target_qubits: 1,
            matrix,
            eigenstate: vec![zero, one],
            eigenphase: phi,
        }
    }

    pub fn eigenphase(&self) -> PhaseValue {
        match self {
            UnitaryModel::Diagonal { eigenphase } | UnitaryModel::Dense { eigenphase, .. } => {
                *eigenphase
            }
        }
    }

    pub fn target_qubits(&self) -> u32 {
        match self {
            UnitaryModel::Diagonal { .. } => 1,
            UnitaryModel::Dense { target_qubits, .. } => *target_qubits,
        }
    }

    /// Same operator with every eigenvalue multiplied by `e^{2 pi i shift}`.
    pub fn shifted(&self, shift: PhaseValue) -> Self {
        match self {
            UnitaryModel::Diagonal { eigenphase } => UnitaryModel::Diagonal {
                eigenphase: eigenphase.wrapping_add(shift),
            },
            UnitaryModel::Dense {
                target_qubits,
                matrix,
                eigenstate,
                eigenphase,
            } => {
                let factor = Complex64::from_polar(1.0, 2.0 * PI * shift.to_f64());
                UnitaryModel::Dense {
                    target_qubits: *target_qubits,
                    matrix: matrix.iter().map(|z| z * factor).collect(),
                    eigenstate: eigenstate.clone(),
                    eigenphase: eigenphase.wrapping_add(shift),
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let UnitaryModel::Dense {
            target_qubits,
            matrix,
            eigenstate,
            eigenphase,
        } = self
        else {
            return Ok(());
        };
        if *target_qubits == 0 || *target_qubits >= MAX_SIM_QUBITS {
            return Err(AwqpeError::InvalidModel(format!(
                "{target_qubits} target qubits"
            )));
        }
        let d = 1usize << target_qubits;
        if matrix.len() != d * d || eigenstate.len() != d {
            return Err(AwqpeError::InvalidModel(format!(
                "expected a {d}x{d} matrix and a length-{d} eigenstate"
            )));
        }
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|r| matrix[r * d + i].conj() * matrix[r * d + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).norm());
            }
        }
        if worst > UNITARITY_TOL {
            return Err(AwqpeError::InvalidModel(format!(
                "not unitary: max |U^dag U - I| = {worst:e}"
            )));
        }
        let norm: f64 = eigenstate.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(AwqpeError::InvalidModel(format!(
                "eigenstate norm {norm} is not 1"
            )));
        }
        let lambda = Complex64::from_polar(1.0, 2.0 * PI * eigenphase.to_f64());
        let residual: f64 = mat_vec(matrix, eigenstate)
            .iter()
            .zip(eigenstate)
            .map(|(uv, v)| (uv - lambda * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > EIGEN_TOL {
            return Err(AwqpeError::InvalidModel(format!(
                "|U v - e^(2 pi i phi) v| = {residual:e}"
            )));
        }
        Ok(())
    }

    /// Reads a dense model from text; see [`parse_model`] for the format.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| AwqpeError::ModelFile {
            line: 0,
            msg: e.to_string(),
        })?;
        parse_model(&text)
    }
}

fn mat_vec(matrix: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    (0..d)
        .map(|i| (0..d).map(|j| matrix[i * d + j] * v[j]).sum())
        .collect()
}

fn mat_mul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

/// Parses the dense model text format:
///
/// ```text
/// # lines starting with '#' and blank lines are ignored
/// d                      # dimension, a power of two
/// re im re im ...        # d rows, each with d complex entries
/// re im                  # d eigenstate amplitudes, one per line
/// eigenphase 0.8203125   # optional; otherwise arg(<v|U|v>) / 2pi
/// ```
pub fn parse_model(text: &str) -> Result<UnitaryModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let err = |line: usize, msg: &str| AwqpeError::ModelFile {
        line,
        msg: msg.to_string(),
    };
    let parse_floats = |line: usize, l: &str| -> Result<Vec<f64>> {
        l.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, &format!("bad number `{t}`"))))
            .collect()
    };

    let (line, first) = lines.next().ok_or_else(|| err(0, "empty model file"))?;
    let d: usize = first
        .parse()
        .map_err(|_| err(line, "first line must be the dimension"))?;
    if d < 2 || !d.is_power_of_two() {
        return Err(err(line, "dimension must be a power of two >= 2"));
    }
    let target_qubits = d.trailing_zeros();

    let mut matrix = Vec::with_capacity(d * d);
    for row in 0..d {
        let (line, l) = lines
            .next()
            .ok_or_else(|| err(0, &format!("missing matrix row {row}")))?;
        let vals = parse_floats(line, l)?;
        if vals.len() != 2 * d {
            return Err(err(line, &format!("expected {} numbers, found {}", 2 * d, vals.len())));
        }
        matrix.extend(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])));
    }
    let mut eigenstate = Vec::with_capacity(d);
    for i in 0..d {
        let (line, l) = lines
            .next()
            .ok_or_else(|| err(0, &format!("missing eigenstate amplitude {i}")))?;
        let vals = parse_floats(line, l)?;
        if vals.len() != 2 {
            return Err(err(line, "eigenstate amplitude needs `re im`"));
        }
        eigenstate.push(Complex64::new(vals[0], vals[1]));
    }
    let eigenphase = match lines.next() {
        Some((line, l)) => {
            let value = l
                .strip_prefix("eigenphase")
                .ok_or_else(|| err(line, "expected `eigenphase <value>`"))?;
            let phase = PhaseValue::parse(value).map_err(|e| err(line, &e.to_string()))?;
            if let Some((line, _)) = lines.next() {
                return Err(err(line, "trailing content"));
            }
            phase
        }
        None => {
            let lambda: Complex64 = mat_vec(&matrix, &eigenstate)
                .iter()
                .zip(&eigenstate)
                .map(|(uv, v)| v.conj() * uv)
                .sum();
            let turns = lambda.arg() / (2.0 * PI);
            let turns = if turns < 0.0 { turns + 1.0 } else { turns };
            PhaseValue::from_f64(if turns >= 1.0 { 0.0 } else { turns })?
        }
    };
    UnitaryModel::dense(target_qubits, matrix, eigenstate, eigenphase)
}

/// Amplitudes of a control register of `m` qubits above which sits a target register.
#[derive(Clone, Debug)]
pub struct StateVector {
    control_qubits: u32,
    target_qubits: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on the controls, `target` on the target register.
    pub fn new(control_qubits: u32, target: &[Complex64]) -> Result<Self> {
        let target_qubits = target.len().trailing_zeros();
        if !target.len().is_power_of_two() || target_qubits == 0 {
            return Err(AwqpeError::InvalidModel("target length must be 2^n_t".into()));
        }
        let qubits = control_qubits + target_qubits;
        if qubits > MAX_SIM_QUBITS {
            return Err(AwqpeError::DimensionTooLarge {
                qubits,
                max: MAX_SIM_QUBITS,
            });
        }
        let stride = 1usize << control_qubits;
        let mut amps = vec![Complex64::new(0.0, 0.0); stride << target_qubits];
        for (t, &a) in target.iter().enumerate() {
            amps[t * stride] = a;
        }
        Ok(StateVector {
            control_qubits,
            target_qubits,
            amps,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_norm(&self) {
        debug_assert!(
            (self.norm() - 1.0).abs() <= 1e-12,
            "norm drifted to {}",
            self.norm()
        );
    }

    pub fn hadamard(&mut self, q: u32) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        self.check_norm();
    }

    /// Multiplies by `e^{i angle}` every amplitude with both bits set.
    pub fn controlled_phase(&mut self, a: u32, b: u32, angle: f64) {
        let mask = (1usize << a) | (1usize << b);
        let factor = Complex64::from_polar(1.0, angle);
        for (i, z) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *z *= factor;
            }
        }
        self.check_norm();
    }

    pub fn swap(&mut self, a: u32, b: u32) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ba) | bb);
            }
        }
        self.check_norm();
    }

    /// Applies the dense target operator `matrix` where control `p` is set.
    pub fn controlled_unitary(&mut self, p: u32, matrix: &[Complex64]) {
        let stride = 1usize << self.control_qubits;
        let d = 1usize << self.target_qubits;
        debug_assert_eq!(matrix.len(), d * d);
        let mut slice = vec![Complex64::new(0.0, 0.0); d];
        for c in (0..stride).filter(|c| c & (1 << p) != 0) {
            for (t, s) in slice.iter_mut().enumerate() {
                *s = self.amps[t * stride + c];
            }
            for t in 0..d {
                self.amps[t * stride + c] = (0..d).map(|j| matrix[t * d + j] * slice[j]).sum();
            }
        }
        self.check_norm();
    }

    pub fn inverse_qft(&mut self) {
        let m = self.control_qubits;
        for i in 0..m / 2 {
            self.swap(i, m - 1 - i);
        }
        for i in 0..m {
            for j in 0..i {
                self.controlled_phase(j, i, -PI / (1u64 << (i - j)) as f64);
            }
            self.hadamard(i);
        }
    }

    /// Probability of each control-register outcome, target traced out.
    pub fn control_marginal(&self) -> Vec<f64> {
        let stride = 1usize << self.control_qubits;
        let mut probs = vec![0.0; stride];
        for (i, z) in self.amps.iter().enumerate() {
            probs[i & (stride - 1)] += z.norm_sqr();
        }
        probs
    }
}

/// Runs the window circuit (H on every control, controlled `U^(2^(k+p))`
/// on control `p`, inverse QFT) and returns the exact control distribution.
pub fn window_distribution_exact(
    model: &UnitaryModel,
    m: u32,
    k: u32,
) -> Result<WindowOutcomeDistribution> {
    if m == 0 {
        return Err(AwqpeError::Config("window needs at least one qubit".into()));
    }
    model.validate()?;
    let qubits = m + model.target_qubits();
    if qubits > MAX_SIM_QUBITS {
        return Err(AwqpeError::DimensionTooLarge {
            qubits,
            max: MAX_SIM_QUBITS,
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut state = match model {
        UnitaryModel::Diagonal { .. } => StateVector::new(m, &[zero, one])?,
        UnitaryModel::Dense { eigenstate, .. } => StateVector::new(m, eigenstate)?,
    };
    for p in 0..m {
        state.hadamard(p);
    }
    match model {
        UnitaryModel::Diagonal { eigenphase } => {
            for p in 0..m {
                // exact dyadic power: phase frac(2^(k+p) phi)
                let turns = window_fraction(*eigenphase, k + p)?.to_f64();
                state.controlled_phase(p, m, 2.0 * PI * turns);
            }
        }
        UnitaryModel::Dense {
            target_qubits,
            matrix,
            ..
        } => {
            let d = 1usize << target_qubits;
            let mut power = matrix.clone();
            for _ in 0..k {
                power = mat_mul(&power, &power, d);
            }
            for p in 0..m {
                if p > 0 {
                    power = mat_mul(&power, &power, d);
                }
                state.controlled_unitary(p, &power);
            }
        }
    }
    state.inverse_qft();
    WindowOutcomeDistribution::new(m, state.control_marginal())
}

/// Textbook QPE with `n` control qubits: the `k = 0` window of width `n`.
pub fn standard_qpe_distribution(model: &UnitaryModel, n: u32) -> Result<WindowOutcomeDistribution> {
    window_distribution_exact(model, n, 0)
}
