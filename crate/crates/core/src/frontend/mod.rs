//! Surface language: parsing, elaboration, the prelude and the driver.

pub mod ast;
pub mod diag;
pub mod driver;
pub mod lexer;
pub mod parser;
pub mod resolve;

pub use diag::{Diagnostic, Severity};
pub use driver::{Outcome, Session, Status};
pub use parser::{parse, parse_term};
