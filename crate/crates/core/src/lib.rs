pub mod error;
pub mod frontend;
pub mod infer;
pub mod reduce;
pub mod solver;
pub mod subtype;
pub mod syntax;
