use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LcaError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("object is not compactly generated")]
    NotCompactlyGenerated,
    #[error("target of the first map ({0}) differs from source of the second ({1})")]
    SourceTargetMismatch(String, String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("block ({0}) violates the Hom-table: {1}")]
    InvalidBlock(String, String),
    #[error("not an automorphism")]
    NotAnAutomorphism,
    #[error("sequence is not exact")]
    NotExact,
    #[error("ladder does not commute")]
    NotCommutative,
    #[error("not a filtration: {0}")]
    NotAFiltration(String),
    #[error("prime {0} divides the argument but is not among the places")]
    SupportNotCovered(u64),
    #[error("the decision procedure does not cover this morphism")]
    Undecidable,
    #[error("degree {0} exceeds the cap {1} (set LCAKIT_MAX_DEGREE to raise it)")]
    DegreeTooLarge(usize, usize),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("diagram does not commute: {0}")]
    DiagramNotCommutative(String),
    #[error("row or column not exact: {0}")]
    RowOrColumnNotExact(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
}

impl LcaError {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        LcaError::Parse { line, col, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, LcaError>;
