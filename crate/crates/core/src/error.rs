use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("malformed index pair ({0}, {1}): indices must be distinct labels in 1..=4")]
    MalformedPair(usize, usize),
    #[error("zero generator at position {0}")]
    ZeroGenerator(usize),
    #[error("zonotope needs at least one generator")]
    NoGenerators,
    #[error("not full-dimensional")]
    NotFullDimensional,
    #[error("generator limit exceeded: {0} generators, at most {1} supported")]
    GeneratorLimitExceeded(usize, usize),
    #[error("hull construction failed: {0}")]
    Hull(String),
    #[error("degenerate tetrahedron")]
    DegenerateTetrahedron,
    #[error("invalid tetrahedron: {0}")]
    InvalidTetrahedron(String),
    #[error("negative beta weight {0}")]
    NegativeBeta(f64),
    #[error("empty body: all beta weights are zero")]
    EmptyBody,
    #[error("nonpositive budget {0}")]
    NonpositiveBudget(f64),
    #[error("not centered: vertex sum has norm {0:e}")]
    NotCentered(f64),
    #[error("zero-width body")]
    ZeroWidth,
    #[error("tetrahedron not obtuse-centered: isotropic β would be negative")]
    NotObtuseCentered,
    #[error("target width must be positive, got {0}")]
    NonpositiveWidth(f64),
    #[error("bound chain inapplicable: some γ_ij is negative")]
    BoundChainInapplicable,
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("no feasible start")]
    NoFeasibleStart,
}
