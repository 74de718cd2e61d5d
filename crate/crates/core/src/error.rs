use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter s = {s} lies within the guard band of a singular point ({singular_at})")]
    SingularParameter { s: f64, singular_at: f64 },

    #[error("kh = {kh} is within tolerance of {multiple}·π")]
    NearNyquist { kh: f64, multiple: i64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at node {index} (x = {x})")]
    NonFiniteSample { index: usize, x: f64 },

    #[error("fine grid (n = {fine}) does not nest the coarse grid (n = {coarse})")]
    NonNestedGrids { fine: usize, coarse: usize },

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("source is resonant with the particular solution (k = {k})")]
    ResonantSource { k: f64 },

    #[error("sin(kL) vanishes within tolerance (kL = {kl})")]
    ResonantWavenumber { kl: f64 },

    #[error("wavenumber k = {k} coincides with sine mode {mode}")]
    ModalResonance { k: f64, mode: usize },

    #[error("frequency xi = {xi} is resonant with k = {k}")]
    NearResonantFrequency { xi: f64, k: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for the wavenumber guards (Nyquist band edges and resonances),
    /// as opposed to malformed input or solver breakdown.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::SingularParameter { .. }
                | Error::NearNyquist { .. }
                | Error::ResonantSource { .. }
                | Error::ResonantWavenumber { .. }
                | Error::ModalResonance { .. }
                | Error::NearResonantFrequency { .. }
        )
    }
}
