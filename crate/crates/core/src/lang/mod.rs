//! The contract language: tokens, syntax trees, parsing, printing, type
//! checking, lints and a reference stream interpreter.

pub mod ast;
pub mod interp;
pub mod lexer;
pub mod lint;
pub mod parser;
pub mod pretty;
pub mod types;

pub use ast::{Expr, ExprKind, Path, SourceFile, Statement};
pub use interp::{eval_at, EvalError, Streams, TraceStreams};
pub use lexer::{tokenize, Token, TokenKind};
pub use lint::{check_pre_guards, lint_linearity};
pub use parser::{parse_expr, parse_expr_str, parse_file, ParseError};
pub use pretty::{expr_to_string, file_to_string};
pub use types::{typecheck, typecheck_as, TypeEnv};
