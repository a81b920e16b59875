//! Tokens, syntax tree, parser and printer for `.cop` source.

pub mod ast;
mod parser;
mod pretty;
mod token;

pub use parser::{parse, parse_expression, ParseError};
pub use pretty::{pretty_expr, pretty_print};
pub use token::{is_keyword, tokenize, LexError, Token, TokenKind, KEYWORDS};
