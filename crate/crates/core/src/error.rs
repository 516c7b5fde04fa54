use thiserror::Error;

use crate::projection::KernelFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate triangle: twice the area {twice_area:e} is below tolerance for edge scale {edge:e}")]
    DegenerateTriangle { twice_area: f64, edge: f64 },

    #[error("non-finite vertex coordinate")]
    NonFiniteVertex,

    #[error("triangle planes are not parallel (|n_x·n_y| = {cos:.17})")]
    NotParallel { cos: f64 },

    #[error("ambiguous contact: a vertex matches more than one vertex of the other triangle")]
    AmbiguousContact,

    #[error("gap pattern ({0:e}, {1:e}, {2:e}, {3:e}) is not an admissible case")]
    InvalidGapPattern(f64, f64, f64, f64),

    #[error("no primitive boundary function for d={d}, family {family:?}, case #{case}")]
    InadmissibleCombination { d: usize, family: KernelFamily, case: u8 },

    #[error("primitive boundary function argument must be positive, got {0:e}")]
    NonPositiveP(f64),

    #[error("edge-edge integral H_{i}{j} diverges: collinear edges overlap")]
    DivergentEdgeIntegral { i: usize, j: usize },

    #[error("quadrature did not reach tolerance: value {value:e}, error estimate {error:e}")]
    ToleranceNotReached { value: f64, error: f64 },
}
