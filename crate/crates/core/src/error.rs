use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `a - b` with `b > a`.
    NegativeDifference,
    /// A log-domain value does not fit in an `f64`.
    Overflow {
        exponent: f64,
    },
    /// Inverse requested at zero, where no finite log-argument exists.
    BelowDomain,
    InvalidArgument(&'static str),
    NotLogPiecewise,
    /// The requested conjugate slope is not reached below the range cap.
    ConjugateRangeExhausted {
        slope_log2: f64,
        cap_log2: f64,
    },
    /// Placing interval `(i, j)` needs an exponent above `k_cap`.
    KCapExhausted {
        i: usize,
        j: usize,
        k_cap: u32,
    },
    IntervalNotGenerated {
        i: usize,
        j: usize,
    },
    /// The disjoint family does not fit in `[0, 1]`; `index` is the first
    /// offending member.
    FamilyDoesNotFit {
        index: usize,
    },
    /// More sets requested than the measure space can hold.
    GrowthOutOfRange {
        log2_m: u32,
    },
    OverlappingGroups {
        atom: usize,
    },
    WeightsNotNormalized {
        sum: f64,
    },
    /// The eq8 probe found the growth condition satisfied, so there is no
    /// witness constant to stress.
    NoWitness,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeDifference => f.write_str("negative result is not representable"),
            Error::Overflow { exponent } => {
                write!(f, "value 2^{exponent} is outside the linear f64 range")
            }
            Error::BelowDomain => f.write_str("inverse of zero is below the domain"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NotLogPiecewise => f.write_str("operation requires a log-piecewise spec"),
            Error::ConjugateRangeExhausted { slope_log2, cap_log2 } => {
                write!(f, "conjugate range exhausted: slope 2^{slope_log2} not reached below 2^{cap_log2}")
            }
            Error::KCapExhausted { i, j, k_cap } => {
                write!(f, "k_cap exhausted placing interval ({i}, {j}) with k_cap = {k_cap}")
            }
            Error::IntervalNotGenerated { i, j } => {
                write!(f, "interval ({i}, {j}) was not generated")
            }
            Error::FamilyDoesNotFit { index } => {
                write!(f, "family does not fit in [0,1] (member {index})")
            }
            Error::GrowthOutOfRange { log2_m } => {
                write!(f, "2^{log2_m} sets do not fit at this scale")
            }
            Error::OverlappingGroups { atom } => {
                write!(f, "partition groups overlap at atom {atom}")
            }
            Error::WeightsNotNormalized { sum } => {
                write!(f, "convex weights sum to {sum}, expected 1")
            }
            Error::NoWitness => f.write_str("growth condition holds; no witness constant"),
        }
    }
}

impl core::error::Error for Error {}
