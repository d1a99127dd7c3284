use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "LD coefficient {delta} is infeasible: {bound} bound is {limit} (feasible range [{min}, {max}])"
    )]
    InfeasibleLd {
        delta: f64,
        bound: &'static str,
        limit: f64,
        min: f64,
        max: f64,
    },

    #[error("degenerate prevalence {0}: the model must give 0 < P(case) < 1")]
    DegeneratePrevalence(f64),

    #[error("invalid allele counts: {0}")]
    InvalidCounts(String),

    /// A sample allele frequency is 0 or 1, so the asymptotic statistics are undefined.
    #[error("degenerate allele table: a sample allele frequency is 0 or 1")]
    Degenerate,

    /// No M1 (or no M2) alleles anywhere in the sample.
    #[error("monomorphic marker")]
    Monomorphic,

    #[error("case allele frequency is zero, effect ratio undefined")]
    UndefinedRatio,

    #[error("statistic is not finite: {0}")]
    NonFinite(f64),

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
