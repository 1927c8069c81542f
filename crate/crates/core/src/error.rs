use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode cutoff must be at least 2, got {0}")]
    InvalidCutoff(usize),

    #[error("cutoff {got} too small: at least {required} is needed")]
    CutoffTooSmall { required: usize, got: usize },

    #[error("generator is not Hermitian: max |H - H^dagger| = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("Fock index {m} does not fit in cutoff {cutoff}")]
    FockOutOfRange { m: usize, cutoff: usize },

    #[error(
        "tail mass {tail:.3e} beyond cutoff {cutoff} exceeds 1e-10; try --b-cutoff {suggested}"
    )]
    TailMass {
        tail: f64,
        cutoff: usize,
        suggested: usize,
    },

    #[error("Kerr phase {delta} is a multiple of 2pi; the large-N expansion is singular there")]
    ExcludedRegime { delta: f64 },

    #[error("Kerr phase per stage is 0 mod 2pi (kappa*n*m = {delta}); there is no oscillation")]
    NoOscillation { delta: f64 },

    #[error("invalid stage parameters: {0}")]
    InvalidParams(String),

    #[error("probability {leakage:.3e} leaked outside a-mode levels {{0, {n}}} at stage {stage}")]
    Leakage { leakage: f64, n: usize, stage: usize },

    #[error("bad probe spec `{input}`: {reason} (expected fock:M | coherent:RE[,IM] | squeezed:EPS,ALPHA | squeezed:EPS_RE,EPS_IM,ALPHA_RE,ALPHA_IM | custom:@FILE)")]
    ProbeSyntax { input: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
}
