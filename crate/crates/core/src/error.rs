use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AwqpeError {
    #[error("bit width {0} out of range (1..={max})", max = crate::binary::MAX_TOTAL_BITS)]
    BitWidth(u32),

    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: u32 },

    #[error("shift by {shift} bits exceeds the guard-bit budget of {budget} bits")]
    PrecisionExhausted { shift: u32, budget: u32 },

    #[error("phase {0} is outside [0, 1)")]
    PhaseOutOfRange(String),

    #[error("could not parse phase `{0}`")]
    PhaseParse(String),

    #[error("could not parse bit string `{0}`")]
    BitParse(String),

    #[error("cyclic minimum needs distinct in-range arguments, got a={a}, b={b}, n={n}")]
    CyclicMin { a: u64, b: u64, n: u64 },

    #[error("fractional chunk is exactly one half (b_k = 2^(k-1)); rounding direction is ambiguous")]
    AmbiguousHalf,

    #[error("window of {m} qubits exceeds the configured bound of {max}")]
    WindowTooLarge { m: u32, max: u32 },

    #[error("simulation needs {qubits} qubits, bound is {max}")]
    DimensionTooLarge { qubits: u32, max: u32 },

    #[error("invalid unitary model: {0}")]
    InvalidModel(String),

    #[error("model file line {line}: {msg}")]
    ModelFile { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid bound parameter: {0}")]
    BoundParam(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, AwqpeError>;
