use thiserror::Error;

/// Errors raised by the number-theoretic and series routines.
///
/// Everything except [`Error::Inconsistent`] and [`Error::Counterexample`] is a
/// domain error: the caller asked for something outside the operation's
/// contract. The remaining two signal that an internal cross-check failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} out of range; must satisfy 1 <= m < 2^63")]
    ModulusOutOfRange(u64),

    #[error("{value} and {modulus} are not coprime (gcd = {gcd})")]
    NotCoprime { value: i64, modulus: u64, gcd: u64 },

    #[error("the valuation of 0 is infinite")]
    ZeroValuation,

    #[error("jacobi symbol requires an odd positive modulus, got {0}")]
    InvalidJacobiModulus(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{r} is not distinguished with respect to ({s},{t})")]
    NotDistinguished { s: i64, t: i64, r: u64 },

    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is singular")]
    Singular,

    #[error("not a fixed point: coefficient at {residue} differs from coefficient at {image}")]
    NotFixed { residue: u64, image: u64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("{0}")]
    Domain(String),

    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),

    #[error("counterexample found: {0}")]
    Counterexample(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid input rather than a failed internal check.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Inconsistent(_) | Error::Counterexample(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
