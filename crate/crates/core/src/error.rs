use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("combination weight {0} is outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("modulus evaluated outside its domain (r = {r}, eps = {eps})")]
    ModulusDomain { r: f64, eps: f64 },
    #[error("modulus is not nonincreasing in r; wrap it with the monotone envelope first")]
    NonMonotoneModulus,
    #[error("modulus has no eta-tilde factorization")]
    MissingEtaTilde,
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-finite coordinates at iteration step {step}")]
    NonFinite { step: usize },
    #[error("witness scan for n = {n} exceeded {cutoff} terms (the series may converge)")]
    WitnessCutoff { n: u64, cutoff: u64 },
    #[error("bound too large to evaluate: {0}")]
    TooLarge(String),
}

pub type Result<T> = core::result::Result<T, Error>;
