use thiserror::Error;

/// Failure to specialize `q` at a rational point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at q = {at}")]
    Pole { at: String },
    #[error("cannot evaluate negative powers of q at q = 0")]
    ZeroPoint,
}

/// Errors from the coefficient-expression parser and matrix file reader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at offset {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("trailing input at offset {pos}")]
    Trailing { pos: usize },
    #[error("division by zero in expression")]
    DivisionByZero,
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("slot position {pos} out of range for arity {arity}")]
    Position { pos: usize, arity: usize },
    #[error("operator shape mismatch: {0}")]
    Shape(String),
    #[error("invalid trace slots {slots:?} for arity {arity}")]
    Slot { slots: Vec<usize>, arity: usize },
    #[error("operator is not invertible")]
    NotInvertible,
    #[error("F is not closed: the (a,c)-reshuffled matrix is singular (rank {rank} of {size})")]
    NotClosed { rank: usize, size: usize },
    #[error("R is not even Hecke within height bound {nmax}: {reason}")]
    NotEvenHecke { nmax: usize, reason: String },
    #[error("q-number {k}_q vanishes")]
    QNumberZero { k: usize },
    #[error("matrix D is not invertible")]
    DNotInvertible,
    #[error("unknown R-matrix family {0:?}")]
    UnknownFamily(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
