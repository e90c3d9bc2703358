use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("closure exceeded the cap of {cap} elements")]
    ClosureExceedsCap { cap: usize },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("class functions live on different groups")]
    GroupMismatch,

    #[error("map is not an injective homomorphism into the supergroup")]
    NotASubgroup,

    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("class function is not a character: {0}")]
    NotACharacter(String),

    #[error("operation requires the hyperbolic hermitian form")]
    RequiresHyperbolicForm,

    #[error("unsupported group parameters: {0}")]
    Unsupported(String),

    #[error("no nontrivial quadratic character exists for q = {q}")]
    NoQuadraticCharacter { q: u64 },

    #[error("every cuspidal irreducible is fixed by the quadratic twist")]
    NoSuitableRho,

    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("lattice chain violated: {0}")]
    ChainViolation(String),

    #[error("matrix does not stabilize the lattice: {0}")]
    NotInStabilizer(String),

    #[error("element does not have norm one")]
    NotNormOne,

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("structure check failed: {0}")]
    StructureFailed(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("cannot parse group spec {0:?}")]
    SpecParse(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
