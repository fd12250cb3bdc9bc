//! Tokenizer for system description files and contract expressions.
//!
//! Lexing never fails: characters that do not start a token become
//! [`TokenKind::Error`] tokens so the parser can report them with a position.

use std::fmt;

use num_bigint::BigInt;

use crate::diag::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Component,
    Implementation,
    End,
    In,
    Out,
    Assume,
    Guarantee,
    Assert,
    Lemma,
    Eq,
    Node,
    Returns,
    Var,
    Let,
    Tel,
    Record,
    Const,
    Subcomponents,
    Connections,
    Bool,
    Int,
    Real,
    True,
    False,
    Not,
    And,
    Or,
    If,
    Then,
    Else,
    Pre,
    Floor,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match s {
            "component" => Component,
            "implementation" => Implementation,
            "end" => End,
            "in" => In,
            "out" => Out,
            "assume" => Assume,
            "guarantee" => Guarantee,
            "assert" => Assert,
            "lemma" => Lemma,
            "eq" => Eq,
            "node" => Node,
            "returns" => Returns,
            "var" => Var,
            "let" => Let,
            "tel" => Tel,
            "record" => Record,
            "const" => Const,
            "subcomponents" => Subcomponents,
            "connections" => Connections,
            "bool" => Bool,
            "int" => Int,
            "real" => Real,
            "true" => True,
            "false" => False,
            "not" => Not,
            "and" => And,
            "or" => Or,
            "if" => If,
            "then" => Then,
            "else" => Else,
            "pre" => Pre,
            "floor" => Floor,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Component => "component",
            Implementation => "implementation",
            End => "end",
            In => "in",
            Out => "out",
            Assume => "assume",
            Guarantee => "guarantee",
            Assert => "assert",
            Lemma => "lemma",
            Eq => "eq",
            Node => "node",
            Returns => "returns",
            Var => "var",
            Let => "let",
            Tel => "tel",
            Record => "record",
            Const => "const",
            Subcomponents => "subcomponents",
            Connections => "connections",
            Bool => "bool",
            Int => "int",
            Real => "real",
            True => "true",
            False => "false",
            Not => "not",
            And => "and",
            Or => "or",
            If => "if",
            Then => "then",
            Else => "else",
            Pre => "pre",
            Floor => "floor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Int(BigInt),
    /// Decimal literal, kept as written so it can be parsed exactly.
    Real(String),
    Str(String),
    Ident(String),
    Kw(Keyword),
    Arrow,
    Implies,
    Assign,
    Le,
    Ge,
    Ne,
    Lt,
    Gt,
    Equal,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    Dot,
    Error(String),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Int(v) => write!(f, "INT({v})"),
            Real(v) => write!(f, "REAL({v})"),
            Str(s) => write!(f, "STR({s:?})"),
            Ident(s) => write!(f, "ID({s})"),
            Kw(k) => f.write_str(&k.as_str().to_ascii_uppercase()),
            Arrow => f.write_str("ARROW"),
            Implies => f.write_str("IMPLIES"),
            Assign => f.write_str("ASSIGN"),
            Le => f.write_str("LE"),
            Ge => f.write_str("GE"),
            Ne => f.write_str("NE"),
            Lt => f.write_str("LT"),
            Gt => f.write_str("GT"),
            Equal => f.write_str("EQ"),
            Plus => f.write_str("PLUS"),
            Minus => f.write_str("MINUS"),
            Star => f.write_str("STAR"),
            Slash => f.write_str("DIV"),
            LParen => f.write_str("LPAREN"),
            RParen => f.write_str("RPAREN"),
            LBrace => f.write_str("LBRACE"),
            RBrace => f.write_str("RBRACE"),
            Semi => f.write_str("SEMI"),
            Colon => f.write_str("COLON"),
            Comma => f.write_str("COMMA"),
            Dot => f.write_str("DOT"),
            Error(s) => write!(f, "ERROR({s})"),
        }
    }
}

impl TokenKind {
    /// Surface syntax of the token, used in "expected ..." messages.
    pub fn describe(&self) -> String {
        use TokenKind::*;
        match self {
            Int(v) => v.to_string(),
            Real(v) => v.clone(),
            Str(s) => format!("\"{s}\""),
            Ident(s) => s.clone(),
            Kw(k) => k.as_str().to_string(),
            Arrow => "->".into(),
            Implies => "=>".into(),
            Assign => ":=".into(),
            Le => "<=".into(),
            Ge => ">=".into(),
            Ne => "<>".into(),
            Lt => "<".into(),
            Gt => ">".into(),
            Equal => "=".into(),
            Plus => "+".into(),
            Minus => "-".into(),
            Star => "*".into(),
            Slash => "/".into(),
            LParen => "(".into(),
            RParen => ")".into(),
            LBrace => "{".into(),
            RBrace => "}".into(),
            Semi => ";".into(),
            Colon => ":".into(),
            Comma => ",".into(),
            Dot => ".".into(),
            Error(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub fn tokenize(source: &str) -> Vec<Token> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        // `--` line comment
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let kind = match Keyword::from_ident(&word) {
                Some(k) => TokenKind::Kw(k),
                None => TokenKind::Ident(word),
            };
            out.push(Token { kind, span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let is_real = i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit();
            if is_real {
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token { kind: TokenKind::Real(text), span });
            } else {
                let text: String = chars[start..i].iter().collect();
                let value: BigInt = text.parse().expect("digits parse as an integer");
                out.push(Token { kind: TokenKind::Int(value), span });
            }
            continue;
        }
        if c == '"' {
            bump!();
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump!();
            }
            let text: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '"' {
                bump!();
                out.push(Token { kind: TokenKind::Str(text), span });
            } else {
                out.push(Token {
                    kind: TokenKind::Error(format!("unterminated string \"{text}")),
                    span,
                });
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (kind, len) = match (c, next) {
            ('-', Some('>')) => (TokenKind::Arrow, 2),
            ('=', Some('>')) => (TokenKind::Implies, 2),
            (':', Some('=')) => (TokenKind::Assign, 2),
            ('<', Some('=')) => (TokenKind::Le, 2),
            ('>', Some('=')) => (TokenKind::Ge, 2),
            ('<', Some('>')) => (TokenKind::Ne, 2),
            ('<', _) => (TokenKind::Lt, 1),
            ('>', _) => (TokenKind::Gt, 1),
            ('=', _) => (TokenKind::Equal, 1),
            ('+', _) => (TokenKind::Plus, 1),
            ('-', _) => (TokenKind::Minus, 1),
            ('*', _) => (TokenKind::Star, 1),
            ('/', _) => (TokenKind::Slash, 1),
            ('(', _) => (TokenKind::LParen, 1),
            (')', _) => (TokenKind::RParen, 1),
            ('{', _) => (TokenKind::LBrace, 1),
            ('}', _) => (TokenKind::RBrace, 1),
            (';', _) => (TokenKind::Semi, 1),
            (':', _) => (TokenKind::Colon, 1),
            (',', _) => (TokenKind::Comma, 1),
            ('.', _) => (TokenKind::Dot, 1),
            (other, _) => (TokenKind::Error(other.to_string()), 1),
        };
        for _ in 0..len {
            bump!();
        }
        out.push(Token { kind, span });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> String {
        tokenize(src)
            .iter()
            .map(|t| t.kind.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }

    #[test]
    fn arrow_example() {
        assert_eq!(
            kinds("0 -> pre(count) + 1"),
            "INT(0), ARROW, PRE, LPAREN, ID(count), RPAREN, PLUS, INT(1)"
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  -- only a comment\n").is_empty());
    }

    #[test]
    fn integer_division() {
        assert_eq!(kinds("4/3"), "INT(4), DIV, INT(3)");
    }

    #[test]
    fn spans_and_error_tokens() {
        let toks = tokenize("a\n  b # c");
        assert_eq!(toks[1].span, Span::new(2, 3));
        assert_eq!(toks[2].kind, TokenKind::Error("#".into()));
        assert_eq!(toks[2].span, Span::new(2, 5));
        assert_eq!(toks.len(), 4);
    }

    #[test]
    fn reals_and_dotted_paths() {
        assert_eq!(kinds("3.1415"), "REAL(3.1415)");
        assert_eq!(kinds("fcc1.act"), "ID(fcc1), DOT, ID(act)");
        assert_eq!(kinds("a<>b<=c"), "ID(a), NE, ID(b), LE, ID(c)");
    }
}
