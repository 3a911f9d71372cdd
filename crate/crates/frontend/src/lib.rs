//! Surface language: lexer, parser, elaborator and the command-line driver.

pub mod ast;
pub mod cli;
pub mod elab;
pub mod lexer;
pub mod parser;

pub use elab::{Config, ElabError, Global, Mode, Outcome, Session};
pub use parser::{parse, ParseError};
