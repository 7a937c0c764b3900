use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime >= 3")]
    NotOddPrime(u64),
    #[error("extension degree {0} outside supported range 1..=6")]
    DegreeOutOfRange(u32),
    #[error("insufficient field degree: {n}-th roots of unity need {n} | l^k - 1 for some k <= {max}")]
    InsufficientFieldDegree { n: u64, max: u32 },
    #[error("zero has no multiplicative order")]
    ZeroOrder,
    #[error("matrix is not a symplectic similitude")]
    NotSimilitude,
    #[error("matrix is a similitude with multiplier {0} but not symplectic")]
    NotSymplectic(u64),
    #[error("characteristic polynomial violates the reciprocal identity")]
    NotReciprocal,
    #[error("census supports l in {{3, 5}}, or l = 7 with the big flag; got {0}")]
    CensusUnsupported(u64),
    #[error("closed form covers l >= 7; l in {{3, 5}} needs the small-l override, got {0}")]
    ClosedFormUnsupported(u64),
    #[error("distribution method unsupported for l = {0}")]
    MethodUnsupported(u64),
    #[error("enumerated class probabilities do not sum to 1 for l = {0}")]
    MassLeak(u64),
    #[error("order {order} escapes the bucket partition for l = {ell}")]
    BucketEscape { order: u64, ell: u64 },
    #[error("non-invertible k: coefficient recurrence divides by k = {k}, which l = {ell} divides")]
    NonInvertibleK { k: u32, ell: u64 },
    #[error("tuple enumeration size {0} exceeds the safety cap")]
    EnumerationTooLarge(u128),
    #[error("r = {r} shares a factor with l = {ell}; strip the l-part first")]
    RNotCoprime { r: u64, ell: u64 },
    #[error("q must be nonzero mod l")]
    ZeroMultiplier,
    #[error("curve generation exceeded {0} rejection retries")]
    CurveRetries(u32),
    #[error("point counts are inconsistent: {0}")]
    NonIntegral(String),
    #[error("Weil bound violated: {0}")]
    WeilViolation(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("unsupported genus {0} (supported: 1, 2, 3)")]
    BadGenus(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
