use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The orbit left the domain of the map applied at `step`.
    #[error("orbit escapes the domain at step {step}")]
    DomainEscape { step: usize },
    #[error("word {word} is not forward admissible at 1; its interval is empty")]
    EmptyInterval { word: String },
    #[error("enumeration exceeded the node budget of {budget}")]
    ResourceLimit { budget: u64 },
    #[error("iteration did not terminate within {cap} steps")]
    NonTerminating { cap: usize },
    #[error("points are closer than the bisection tolerance; ratio undefined")]
    DegenerateDenominator,
    #[error("word {word} has no parabolic fixed point")]
    NotParabolic { word: String },
    #[error("word {word} has no fixed point")]
    NoFixedPoint { word: String },
    #[error("(f0^{k})' at the parabolic point is {derivative}, not below 1")]
    ZeroPaddingTooShort { k: usize, derivative: f64 },
    #[error("word {word} does not carry a hyperbolic pair of fixed points")]
    NotHyperbolicPair { word: String },
    #[error("fiber points are not ordered pointwise; monotone coupling unavailable")]
    CouplingHypothesisViolated,
    #[error("subshifts share every window up to length {checked}")]
    NotDisjoint { checked: usize },
    #[error("subshift contains 0^Z (0^{checked} still allowed)")]
    ContainsZeroSequence { checked: usize },
    #[error("word {word} does not cross the point a = {a}")]
    CrossingViolated { word: String, a: f64 },
    #[error("IFS is not contracting: sup of derivatives {sup}")]
    NoContraction { sup: f64 },
    #[error("no exit case applies to the base map on [0,1]")]
    NoExitCase,
    #[error("diagonal gap does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
