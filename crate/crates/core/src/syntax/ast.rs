//! Abstract syntax tree.

use std::fmt;
use std::sync::Arc;

/// Source position. Equality ignores positions so trees compare structurally.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub concepts: Vec<ConceptDecl>,
    pub functions: Vec<Arc<MethodDecl>>,
    pub statics: Vec<VarDecl>,
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptDecl {
    pub name: String,
    pub parent: Option<String>,
    /// `None` when the block is absent, which denotes the empty class.
    pub reference: Option<Vec<Member>>,
    pub object: Option<Vec<Member>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(VarDecl),
    Method(Arc<MethodDecl>),
}

impl Member {
    pub fn name(&self) -> &str {
        match self {
            Member::Field(f) => &f.name,
            Member::Method(m) => &m.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub ret: TypeRef,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeName {
    Void,
    Double,
    Boolean,
    Str,
    Map,
    /// The primitive handle type.
    Root,
    Concept(String),
}

/// Context part of `Ctx : Type name`.
#[derive(Debug, Clone, PartialEq)]
pub enum ContextRef {
    /// Written as an identifier; analysis decides between concept and variable.
    Unresolved(String),
    Concept(String),
    Variable(String),
}

impl ContextRef {
    pub fn name(&self) -> &str {
        match self {
            ContextRef::Unresolved(n) | ContextRef::Concept(n) | ContextRef::Variable(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    pub context: Option<ContextRef>,
    pub name: TypeName,
}

impl TypeRef {
    pub fn plain(name: TypeName) -> Self {
        TypeRef { context: None, name }
    }

    pub fn concept(&self) -> Option<&str> {
        match &self.name {
            TypeName::Concept(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl(VarDecl),
    /// `Type name.method(args);`
    DeclCreate { decl: VarDecl, method: String, args: Vec<Expr> },
    Expr(Expr),
    Assign { target: Expr, value: Expr },
    Return(Option<Expr>),
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>> },
    ContextBlock { context: Expr, body: Vec<Stmt> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Print,
    Length,
    Instanceof,
    Contextof,
    Conceptof,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "print" => Builtin::Print,
            "length" => Builtin::Length,
            "instanceof" => Builtin::Instanceof,
            "contextof" => Builtin::Contextof,
            "conceptof" => Builtin::Conceptof,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Print => "print",
            Builtin::Length => "length",
            Builtin::Instanceof => "instanceof",
            Builtin::Contextof => "contextof",
            Builtin::Conceptof => "conceptof",
        }
    }

    /// Builtins whose result is a concept.
    pub fn yields_concept(self) -> bool {
        matches!(self, Builtin::Instanceof | Builtin::Contextof | Builtin::Conceptof)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Str(String),
    Bool(bool),
    Null,
    Var(String),
    /// A concept used as a value; produced by the parser for `Root` and by analysis otherwise.
    ConceptName(String),
    This,
    Super,
    Sub,
    Field { receiver: Box<Expr>, name: String },
    MethodCall { receiver: Box<Expr>, name: String, args: Vec<Expr> },
    /// `.name(args)`: the object method of the current reference.
    DualCall { name: String, args: Vec<Expr> },
    /// Unqualified `name(args)`.
    Call { name: String, args: Vec<Expr> },
    New { concept: String, args: Vec<Expr> },
    Builtin { func: Builtin, args: Vec<Expr> },
    /// Unclassified `a : b`; analysis rewrites it.
    ColonForm { left: Box<Expr>, right: Box<Expr> },
    /// `:x` inside a context block.
    BlockConcat(Box<Expr>),
    LeftCast { concept: Box<Expr>, operand: Box<Expr> },
    RightCast { operand: Box<Expr>, concept: Box<Expr> },
    Concat { left: Box<Expr>, right: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
}
