use thiserror::Error;

/// A half-open byte range into a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PropError {
    #[error("proposition `{0}` is already declared")]
    DuplicateProp(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("proposition `{0}` belongs to an abstract definition and cannot be assumed")]
    AbstractProp(String),
}

/// Errors raised by the trusted kernel.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("not a type: {0}")]
    NotAType(String),
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    TypeMismatch { expected: String, found: String },
    #[error("proposition `{0}` is not true in this context")]
    PropNotTrue(String),
    #[error("boundary mismatch for in: `{lhs}` is not equal to `{rhs}` under the boundary proposition")]
    BoundaryMismatch { lhs: String, rhs: String },
    #[error("unbound variable")]
    UnboundVariable,
    #[error("unknown constant `{0}`")]
    UnknownConst(String),
    #[error("constant `{0}` is already declared")]
    DuplicateConst(String),
    #[error("ill-typed declaration `{name}`: {reason}")]
    IllTypedDecl { name: String, reason: String },
    #[error("cannot synthesize a type for this term")]
    CannotInfer,
    #[error("internal error: unstable neutral survived to readback")]
    UnstableLeak,
    #[error(transparent)]
    Prop(#[from] PropError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("lexical error: {msg}")]
    Lex { msg: String, span: Span },
    #[error("parse error: expected {expected}")]
    Parse { expected: String, span: Span },
    #[error("duplicate definition `{name}`")]
    DuplicateDef { name: String, span: Span },
}

impl SurfaceError {
    pub fn span(&self) -> Span {
        match self {
            SurfaceError::Lex { span, .. }
            | SurfaceError::Parse { span, .. }
            | SurfaceError::DuplicateDef { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ElabError {
    #[error("unbound name `{name}`")]
    UnboundName { name: String, span: Span },
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    ConvMismatch {
        expected: String,
        found: String,
        span: Span,
    },
    #[error("`{name}` does not name an unfoldable definition")]
    UnknownUnfoldTarget { name: String, span: Span },
    #[error("`{name}` is abstract and cannot be unfolded")]
    AbstractUnfoldTarget { name: String, span: Span },
    #[error("a definition cannot be both an abbreviation and abstract")]
    AbbrvAbstractConflict { span: Span },
    #[error("duplicate definition `{name}`")]
    DuplicateDef { name: String, span: Span },
    #[error("{err}")]
    Kernel { err: TypeError, span: Span },
    #[error("cannot synthesize a type here; add an annotation")]
    CannotInfer { span: Span },
    #[error("`U` has no code in the universe")]
    UniverseInUniverse { span: Span },
}

impl ElabError {
    pub fn span(&self) -> Span {
        match self {
            ElabError::UnboundName { span, .. }
            | ElabError::ConvMismatch { span, .. }
            | ElabError::UnknownUnfoldTarget { span, .. }
            | ElabError::AbstractUnfoldTarget { span, .. }
            | ElabError::AbbrvAbstractConflict { span }
            | ElabError::DuplicateDef { span, .. }
            | ElabError::Kernel { span, .. }
            | ElabError::CannotInfer { span }
            | ElabError::UniverseInUniverse { span } => *span,
        }
    }

    /// Stable diagnostic code for CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            ElabError::UnboundName { .. } => "unbound-name",
            ElabError::ConvMismatch { .. } => "conv-mismatch",
            ElabError::UnknownUnfoldTarget { .. } => "unknown-unfold-target",
            ElabError::AbstractUnfoldTarget { .. } => "abstract-unfold-target",
            ElabError::AbbrvAbstractConflict { .. } => "abbrv-abstract-conflict",
            ElabError::DuplicateDef { .. } => "duplicate-def",
            ElabError::Kernel { .. } => "kernel",
            ElabError::CannotInfer { .. } => "cannot-infer",
            ElabError::UniverseInUniverse { .. } => "universe-in-universe",
        }
    }
}
