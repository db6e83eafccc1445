use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("deformation parameter q must be finite and positive, got {0}")]
    InvalidDeformation(f64),

    #[error("spin label must be a non-negative half-integer, got {0}")]
    InvalidSpin(f64),

    #[error("spin {twice_j}/2 has dimension {dim}, above the cap of {cap}")]
    DimensionCap { twice_j: u32, dim: usize, cap: usize },

    #[error("matrix is not diagonal (off-diagonal magnitude {0:e})")]
    NotDiagonal(f64),

    #[error("Möbius expansion diverges: |c/a| = {ratio} must be < 1")]
    ExpansionDivergent { ratio: f64 },

    #[error("group element is not pseudo-unitary (deviation {0:e})")]
    NotPseudoUnitary(f64),

    #[error("at mesh node {node}: {source}")]
    AtNode {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("operands live on different spaces: {0}")]
    SpaceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dense backend too large: {0}")]
    DenseTooLarge(String),
}

impl Error {
    pub(crate) fn at_node(node: usize, source: Error) -> Self {
        Error::AtNode {
            node,
            source: Box::new(source),
        }
    }
}
