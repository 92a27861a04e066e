use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("triangle inequality violated on points ({a}, {b}, {c}): d({a},{c}) = {dac} > d({a},{b}) + d({b},{c}) = {sum}")]
    TriangleInequality {
        a: usize,
        b: usize,
        c: usize,
        dac: f64,
        sum: f64,
    },

    #[error("distance matrix asymmetric at ({a}, {b}): {dab} vs {dba}")]
    AsymmetricDistance { a: usize, b: usize, dab: f64, dba: f64 },

    #[error("distance between distinct points ({a}, {b}) is not positive: {value}")]
    NonpositiveDistance { a: usize, b: usize, value: f64 },

    #[error("nonzero diagonal entry at point {index}: {value}")]
    NonzeroDiagonal { index: usize, value: f64 },

    #[error("mass of point {index} is not strictly positive: {value}")]
    NonpositiveMass { index: usize, value: f64 },

    #[error("base point {index} is not a member point (space has {len} points)")]
    BasePointOutOfRange { index: usize, len: usize },

    #[error("subset is empty where a nonempty set is required")]
    EmptySubset,

    #[error("obstacle has zero diameter (single point); pass an explicit radius cap to use the single-point convention where the upper bound on the radius is omitted")]
    SinglePointObstacle,

    #[error("truncation level {requested} is below the level {required} at which the nets become stationary; boundary points would be lost")]
    DepthTooSmall { requested: usize, required: usize },

    #[error("mass exponent must be positive, got beta = {beta}")]
    BetaNonpositive { beta: f64 },

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("field must vanish on the zero set but has value {value} at index {index}")]
    NonzeroOnZeroSet { index: usize, value: f64 },

    #[error("no free variables: the zero set covers every node")]
    NoFreeNodes,

    #[error("degenerate quotient: the constraint form has no positive weight on any free node")]
    DegenerateLhs,

    #[error("too many free nodes for exhaustive oracle: {n} (limit {limit})")]
    TooManyFreeNodes { n: usize, limit: usize },

    #[error("delta = {delta} is below the measured regularizability threshold delta_star = {delta_star}")]
    DeltaBelowStar { delta: f64, delta_star: f64 },

    #[error("not enough scale pairs for a slope fit: {found} usable pairs, need at least {needed}")]
    TooFewScalePairs { found: usize, needed: usize },

    #[error("capacity obstacle is not contained in the closed core ball")]
    ObstacleOutsideBall,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("malformed space description: {0}")]
    SpaceFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
