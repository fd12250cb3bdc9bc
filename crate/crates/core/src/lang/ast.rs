//! Abstract syntax for contract expressions, statements and file items.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::diag::Span;
use crate::value::Type;

/// Dotted identifier such as `fcc1.act` or `quad.v1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<String>);

impl Path {
    pub fn single(name: &str) -> Path {
        Path(vec![name.to_string()])
    }

    pub fn parse(dotted: &str) -> Path {
        Path(dotted.split('.').map(str::to_string).collect())
    }

    pub fn joined(&self) -> String {
        self.0.join(".")
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.joined())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "=>",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_relation(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    Id(Path),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Pre(Box<Expr>),
    /// `init -> rest`: the left operand on the first step, the right after.
    Arrow(Box<Expr>, Box<Expr>),
    Floor(Box<Expr>),
    ToReal(Box<Expr>),
    RecordUpdate {
        base: Box<Expr>,
        field: String,
        value: Box<Expr>,
    },
    Call {
        node: Path,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    /// Filled in by the type checker.
    pub ty: Option<Type>,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span, ty: None }
    }

    pub fn typed(kind: ExprKind, span: Span, ty: Type) -> Expr {
        Expr {
            kind,
            span,
            ty: Some(ty),
        }
    }

    pub fn boolean(b: bool) -> Expr {
        Expr::typed(ExprKind::Bool(b), Span::default(), Type::Bool)
    }

    /// Pre-order traversal over all subexpressions (including `self`).
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        self.for_each_child(|c| c.walk(f));
    }

    pub fn for_each_child<'a>(&'a self, mut f: impl FnMut(&'a Expr)) {
        match &self.kind {
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Real(_) | ExprKind::Id(_) => {}
            ExprKind::Unary(_, e)
            | ExprKind::Pre(e)
            | ExprKind::Floor(e)
            | ExprKind::ToReal(e) => f(e),
            ExprKind::Binary(_, a, b) | ExprKind::Arrow(a, b) => {
                f(a);
                f(b);
            }
            ExprKind::Ite(c, a, b) => {
                f(c);
                f(a);
                f(b);
            }
            ExprKind::RecordUpdate { base, value, .. } => {
                f(base);
                f(value);
            }
            ExprKind::Call { args, .. } => args.iter().for_each(f),
        }
    }

    /// Rebuilds the expression with every identifier path rewritten.
    pub fn map_ids(&self, f: &dyn Fn(&Path) -> Path) -> Expr {
        let kind = match &self.kind {
            ExprKind::Id(p) => ExprKind::Id(f(p)),
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Real(_) => self.kind.clone(),
            ExprKind::Unary(op, e) => ExprKind::Unary(*op, Box::new(e.map_ids(f))),
            ExprKind::Binary(op, a, b) => {
                ExprKind::Binary(*op, Box::new(a.map_ids(f)), Box::new(b.map_ids(f)))
            }
            ExprKind::Ite(c, a, b) => ExprKind::Ite(
                Box::new(c.map_ids(f)),
                Box::new(a.map_ids(f)),
                Box::new(b.map_ids(f)),
            ),
            ExprKind::Pre(e) => ExprKind::Pre(Box::new(e.map_ids(f))),
            ExprKind::Arrow(a, b) => ExprKind::Arrow(Box::new(a.map_ids(f)), Box::new(b.map_ids(f))),
            ExprKind::Floor(e) => ExprKind::Floor(Box::new(e.map_ids(f))),
            ExprKind::ToReal(e) => ExprKind::ToReal(Box::new(e.map_ids(f))),
            ExprKind::RecordUpdate { base, field, value } => ExprKind::RecordUpdate {
                base: Box::new(base.map_ids(f)),
                field: field.clone(),
                value: Box::new(value.map_ids(f)),
            },
            ExprKind::Call { node, args } => ExprKind::Call {
                node: node.clone(),
                args: args.iter().map(|a| a.map_ids(f)).collect(),
            },
        };
        Expr {
            kind,
            span: self.span,
            ty: self.ty.clone(),
        }
    }

    /// Identifier paths referenced by the expression.
    pub fn free_ids(&self) -> Vec<&Path> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Id(p) = &e.kind {
                out.push(p);
            }
        });
        out
    }

    /// Identifier paths read at the current step (not underneath `pre`).
    pub fn current_ids(&self) -> Vec<&Path> {
        fn go<'a>(e: &'a Expr, out: &mut Vec<&'a Path>) {
            match &e.kind {
                ExprKind::Id(p) => out.push(p),
                ExprKind::Pre(_) => {}
                _ => e.for_each_child(|c| go(c, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Names of nodes called anywhere in the expression.
    pub fn called_nodes(&self) -> Vec<&Path> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Call { node, .. } = &e.kind {
                out.push(node);
            }
        });
        out
    }
}

/// Syntactic type as written in declarations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeName {
    Bool,
    Int,
    Real,
    Named(String),
}

impl std::fmt::Display for TypeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypeName::Bool => f.write_str("bool"),
            TypeName::Int => f.write_str("int"),
            TypeName::Real => f.write_str("real"),
            TypeName::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeName,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeEquation {
    pub lhs: Vec<String>,
    pub rhs: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDef {
    pub name: String,
    pub inputs: Vec<Param>,
    pub outputs: Vec<Param>,
    pub locals: Vec<Param>,
    pub equations: Vec<NodeEquation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Assume { label: String, expr: Expr, span: Span },
    Guarantee { label: String, expr: Expr, span: Span },
    Assert { expr: Expr, span: Span },
    Lemma { label: String, expr: Expr, span: Span },
    /// `eq a : int, b : real [= e];` without a definition the variables are
    /// constrained only by the surrounding contract.
    Eq { vars: Vec<Param>, def: Option<Expr>, span: Span },
    Node(NodeDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub dir: Direction,
    pub ty: TypeName,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: String,
    pub ports: Vec<PortDecl>,
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcomponentDecl {
    pub name: String,
    /// `FCC` (contract only) or `FCC.impl`.
    pub classifier: Path,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionDecl {
    pub src: Path,
    pub dst: Path,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplDecl {
    /// Full name, e.g. `FCC.impl`.
    pub name: Path,
    pub subcomponents: Vec<SubcomponentDecl>,
    pub connections: Vec<ConnectionDecl>,
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordDecl {
    pub name: String,
    pub fields: Vec<Param>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub ty: TypeName,
    pub value: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Record(RecordDecl),
    Const(ConstDecl),
    Node(NodeDef),
    Component(ComponentDecl),
    Implementation(ImplDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}
