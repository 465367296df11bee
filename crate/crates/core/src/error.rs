use crate::syntax::{Name, Universe};

/// Failures of inference and global-declaration checking.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("size constraints of `{0}` are unsatisfiable")]
    Unsat(Name),
    #[error("`{left}` is not a subtype of `{right}`")]
    NotSubtype { left: String, right: String },
    #[error("`{left}` and `{right}` are not convertible")]
    NotConvertible { left: String, right: String },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("`{term}` has type `{ty}`, which is not a function type")]
    NotFunction { term: String, ty: String },
    #[error("expected an inductive type, found `{0}`")]
    NotInductive(String),
    #[error("{0}")]
    Arity(String),
    #[error("expected a sort, found `{0}`")]
    NotSort(String),
    #[error("cannot eliminate `{ind}` from {from} into {to}")]
    Elim { ind: Name, from: Universe, to: Universe },
    #[error("no valid recursive argument for `{0}`")]
    NoRecArg(Name),
    #[error("return type of `{0}` is not coinductive")]
    NotCoinductive(Name),
    #[error("`{0}` is already defined")]
    Duplicate(Name),
    #[error("cannot split `{ty}` into {n} arguments")]
    Decompose { ty: String, n: usize },
    #[error("cannot infer the type of binder `{0}`")]
    Hole(Name),
    #[error("invalid inductive declaration: {0}")]
    IndDecl(String),
    #[error("declared type `{declared}` and inferred type `{inferred}` differ in shape")]
    Mismatch { declared: String, inferred: String },
}

impl TypeError {
    pub fn code(&self) -> &'static str {
        match self {
            TypeError::Unsat(_) => "E-UNSAT",
            TypeError::NotSubtype { .. } => "E-NOTSUBTYPE",
            TypeError::NotConvertible { .. } => "E-NOTCONV",
            TypeError::Unbound(_) => "E-UNBOUND",
            TypeError::NotFunction { .. } => "E-NOTFUNC",
            TypeError::NotInductive(_) => "E-NOTIND",
            TypeError::Arity(_) => "E-ARITY",
            TypeError::NotSort(_) => "E-NOTSORT",
            TypeError::Elim { .. } => "E-ELIM",
            TypeError::NoRecArg(_) => "E-NORECARG",
            TypeError::NotCoinductive(_) => "E-NOTCOIND",
            TypeError::Duplicate(_) => "E-DUP",
            TypeError::Decompose { .. } => "E-DECOMPOSE",
            TypeError::Hole(_) => "E-HOLE",
            TypeError::IndDecl(_) => "E-INDDECL",
            TypeError::Mismatch { .. } => "E-MISMATCH",
        }
    }
}

/// A [`TypeError`] together with the innermost (co)fixpoint it arose in.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind}")]
pub struct Error {
    pub kind: TypeError,
    pub fixpoint: Option<Name>,
    /// For unsatisfiable size constraints, the set that failed, in dump format.
    pub constraints: Option<String>,
}

impl From<TypeError> for Error {
    fn from(kind: TypeError) -> Error {
        Error { kind, fixpoint: None, constraints: None }
    }
}

impl Error {
    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}
