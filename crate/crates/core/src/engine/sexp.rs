//! S-expressions as printed by SMT-LIB solvers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::value::{parse_decimal, Type, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            Sexp::Atom(_) => None,
        }
    }
}

/// Length of the first complete s-expression in `text`, if it holds one.
/// Leading whitespace is included in the length.
pub fn complete_prefix(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    if i == bytes.len() {
        return None;
    }
    let mut depth = 0usize;
    let mut started_list = false;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                depth += 1;
                started_list = true;
            }
            b')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            b'"' => {
                i += 1;
                loop {
                    if i >= bytes.len() {
                        return None;
                    }
                    if bytes[i] == b'"' {
                        if bytes.get(i + 1) == Some(&b'"') {
                            i += 2;
                            continue;
                        }
                        break;
                    }
                    i += 1;
                }
                if !started_list {
                    return Some(i + 1);
                }
            }
            b'|' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'|' {
                    i += 1;
                }
                if i >= bytes.len() {
                    return None;
                }
                if !started_list {
                    return Some(i + 1);
                }
            }
            c if c.is_ascii_whitespace() && !started_list => return Some(i),
            _ => {}
        }
        i += 1;
    }
    None
}

/// Parses every s-expression in `text`.
pub fn parse(text: &str) -> Result<Vec<Sexp>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Vec::new();
    loop {
        skip_ws(&chars, &mut pos);
        if pos >= chars.len() {
            return Ok(out);
        }
        out.push(parse_one(&chars, &mut pos)?);
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() {
        if chars[*pos].is_whitespace() {
            *pos += 1;
        } else if chars[*pos] == ';' {
            while *pos < chars.len() && chars[*pos] != '\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

fn parse_one(chars: &[char], pos: &mut usize) -> Result<Sexp, String> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        None => Err("unexpected end of input".into()),
        Some('(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    None => return Err("unbalanced parenthesis".into()),
                    Some(')') => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    _ => items.push(parse_one(chars, pos)?),
                }
            }
        }
        Some(')') => Err("unexpected ')'".into()),
        Some('"') => {
            let start = *pos;
            *pos += 1;
            loop {
                match chars.get(*pos) {
                    None => return Err("unterminated string".into()),
                    Some('"') if chars.get(*pos + 1) == Some(&'"') => *pos += 2,
                    Some('"') => {
                        *pos += 1;
                        break;
                    }
                    _ => *pos += 1,
                }
            }
            Ok(Sexp::Atom(chars[start..*pos].iter().collect()))
        }
        Some('|') => {
            let start = *pos;
            *pos += 1;
            while chars.get(*pos).is_some_and(|c| *c != '|') {
                *pos += 1;
            }
            if chars.get(*pos).is_none() {
                return Err("unterminated quoted symbol".into());
            }
            *pos += 1;
            Ok(Sexp::Atom(chars[start..*pos].iter().collect()))
        }
        Some(_) => {
            let start = *pos;
            while chars
                .get(*pos)
                .is_some_and(|c| !c.is_whitespace() && *c != '(' && *c != ')' && *c != ';')
            {
                *pos += 1;
            }
            Ok(Sexp::Atom(chars[start..*pos].iter().collect()))
        }
    }
}

fn rational(s: &Sexp) -> Option<BigRational> {
    match s {
        Sexp::Atom(a) => parse_decimal(a),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => rational(x).map(|r| -r),
            [Sexp::Atom(op), x, y] if op == "/" => {
                let (x, y) = (rational(x)?, rational(y)?);
                if y == BigRational::from_integer(BigInt::from(0)) {
                    None
                } else {
                    Some(x / y)
                }
            }
            [Sexp::Atom(op), x] if op == "to_real" => rational(x),
            _ => None,
        },
    }
}

/// Converts a model value of sort `ty` into an exact value.
pub fn to_value(s: &Sexp, ty: &Type) -> Option<Value> {
    match ty {
        Type::Bool => match s.atom()? {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        Type::Int => {
            let r = rational(s)?;
            r.is_integer().then(|| Value::Int(r.to_integer()))
        }
        Type::Real => rational(s).map(Value::Real),
        Type::Record(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_model_replies() {
        let xs = parse("((|x@0| (- 5)) (|y@0| (/ 4.0 3.0)) (b true)) ; done").unwrap();
        assert_eq!(xs.len(), 1);
        let pairs = xs[0].list().unwrap();
        assert_eq!(pairs[0].list().unwrap()[0], Sexp::Atom("|x@0|".into()));
        assert_eq!(to_value(&pairs[0].list().unwrap()[1], &Type::Int), Some(Value::int(-5)));
        assert_eq!(to_value(&pairs[1].list().unwrap()[1], &Type::Real), Some(Value::real(4, 3)));
        assert_eq!(to_value(&pairs[2].list().unwrap()[1], &Type::Bool), Some(Value::Bool(true)));
    }

    #[test]
    fn negative_reals_and_decimals() {
        let s = &parse("(- (/ 1.0 2.0))").unwrap()[0];
        assert_eq!(to_value(s, &Type::Real), Some(Value::real(-1, 2)));
        assert_eq!(to_value(&Sexp::Atom("2.5".into()), &Type::Real), Some(Value::real(5, 2)));
        assert_eq!(to_value(&Sexp::Atom("2.5".into()), &Type::Int), None);
    }

    #[test]
    fn prefixes() {
        assert_eq!(complete_prefix("success\n"), Some(7));
        assert_eq!(complete_prefix("((x 1)\n"), None);
        assert_eq!(complete_prefix("  ((x 1))\nmore"), Some(9));
        assert_eq!(complete_prefix("(error \"a (b\")"), Some(14));
        assert_eq!(complete_prefix(""), None);
    }

    #[test]
    fn errors() {
        assert!(parse("(a").is_err());
        assert!(parse(")").is_err());
        assert!(parse("\"open").is_err());
    }
}
