//! Recursive-descent parser.

use std::sync::Arc;

use thiserror::Error;

use super::ast::*;
use super::token::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: String,
}

pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser::new(tokens);
    let mut program = Program::default();
    while !p.at_end() {
        if p.peek_keyword("concept") {
            program.concepts.push(p.concept()?);
        } else if p.peek_keyword("static") {
            p.pos += 1;
            program.statics.push(p.var_decl()?);
        } else if p.decl_start(p.pos).is_some_and(|after| p.punct_at(after + 1, "(")) {
            program.functions.push(Arc::new(p.method()?));
        } else {
            program.statements.push(p.statement()?);
        }
    }
    Ok(program)
}

/// Parses a complete token list as one expression.
pub fn parse_expression(tokens: &[Token]) -> Result<Expr, ParseError> {
    let mut p = Parser::new(tokens);
    let expr = p.expr()?;
    if !p.at_end() {
        return Err(p.error(&["end of input"]));
    }
    Ok(expr)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn tok(&self, at: usize) -> Option<&'a Token> {
        self.tokens.get(at)
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tok(self.pos)
    }

    fn punct_at(&self, at: usize, text: &str) -> bool {
        self.tok(at).is_some_and(|t| t.is_punct(text))
    }

    fn peek_punct(&self, text: &str) -> bool {
        self.punct_at(self.pos, text)
    }

    fn peek_keyword(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(text))
    }

    fn ident_at(&self, at: usize) -> bool {
        self.tok(at).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn span(&self) -> Span {
        match self.peek().or_else(|| self.tokens.last()) {
            Some(t) => Span::new(t.line, t.column),
            None => Span::new(1, 1),
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (line, column, found) = match self.peek() {
            Some(t) => (t.line, t.column, format!("`{}`", t.text)),
            None => match self.tokens.last() {
                Some(t) => (t.line, t.column + t.text.chars().count() as u32, "end of input".into()),
                None => (1, 1, "end of input".into()),
            },
        };
        ParseError { line, column, expected: expected.iter().map(|s| s.to_string()).collect(), found }
    }

    fn expect_punct(&mut self, text: &str) -> Result<(), ParseError> {
        if self.peek_punct(text) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("`{text}`")]))
        }
    }

    fn expect_keyword(&mut self, text: &str) -> Result<(), ParseError> {
        if self.peek_keyword(text) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("`{text}`")]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// If a type reference followed by an identifier starts at `at`, returns
    /// the index of that identifier.
    fn decl_start(&self, at: usize) -> Option<usize> {
        let t = self.tok(at)?;
        let after = match t.kind {
            TokenKind::Keyword if ["void", "double", "boolean", "String"].contains(&t.text.as_str()) => {
                at + 1
            }
            TokenKind::Keyword if t.text == "Root" => self.type_end(at),
            TokenKind::Identifier => self.type_end(at),
            _ => return None,
        };
        self.ident_at(after).then_some(after)
    }

    fn type_end(&self, at: usize) -> usize {
        if self.punct_at(at + 1, ":") && self.ident_at(at + 2) && self.ident_at(at + 3) {
            at + 3
        } else {
            at + 1
        }
    }

    fn type_ref(&mut self) -> Result<TypeRef, ParseError> {
        let Some(t) = self.peek() else { return Err(self.error(&["type"])) };
        let simple = match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "void") => Some(TypeName::Void),
            (TokenKind::Keyword, "double") => Some(TypeName::Double),
            (TokenKind::Keyword, "boolean") => Some(TypeName::Boolean),
            (TokenKind::Keyword, "String") => Some(TypeName::Str),
            _ => None,
        };
        if let Some(name) = simple {
            self.pos += 1;
            return Ok(TypeRef::plain(name));
        }
        let is_root = t.is_keyword("Root");
        if !is_root && t.kind != TokenKind::Identifier {
            return Err(self.error(&["type"]));
        }
        self.pos += 1;
        if self.peek_punct(":") && self.ident_at(self.pos + 1) && self.ident_at(self.pos + 2) {
            self.pos += 1;
            let context = if is_root {
                ContextRef::Concept("Root".into())
            } else {
                ContextRef::Unresolved(t.text.clone())
            };
            let name = self.ident()?;
            return Ok(TypeRef { context: Some(context), name: named_type(name) });
        }
        Ok(TypeRef::plain(if is_root { TypeName::Root } else { named_type(t.text.clone()) }))
    }

    fn concept(&mut self) -> Result<ConceptDecl, ParseError> {
        let span = self.span();
        self.expect_keyword("concept")?;
        let name = self.ident()?;
        let parent = if self.peek_keyword("in") {
            self.pos += 1;
            Some(self.ident()?)
        } else {
            None
        };
        let mut reference = None;
        let mut object = None;
        if self.peek_keyword("reference") {
            self.pos += 1;
            reference = Some(self.class_block()?);
        }
        if self.peek_keyword("object") {
            self.pos += 1;
            object = Some(self.class_block()?);
        }
        Ok(ConceptDecl { name, parent, reference, object, span })
    }

    fn class_block(&mut self) -> Result<Vec<Member>, ParseError> {
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.peek_punct("}") {
            if self.at_end() {
                return Err(self.error(&["member", "`}`"]));
            }
            match self.decl_start(self.pos) {
                Some(after) if self.punct_at(after + 1, "(") => {
                    members.push(Member::Method(Arc::new(self.method()?)))
                }
                Some(_) => members.push(Member::Field(self.var_decl()?)),
                None => return Err(self.error(&["member", "`}`"])),
            }
        }
        self.pos += 1;
        Ok(members)
    }

    fn method(&mut self) -> Result<MethodDecl, ParseError> {
        let span = self.span();
        let ret = self.type_ref()?;
        let name = self.ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.peek_punct(")") {
            loop {
                let ty = self.type_ref()?;
                let name = self.ident()?;
                params.push(Param { ty, name });
                if !self.peek_punct(",") {
                    break;
                }
                self.pos += 1;
            }
        }
        self.expect_punct(")")?;
        let body = self.stmt_block()?;
        Ok(MethodDecl { ret, name, params, body, span })
    }

    fn var_decl(&mut self) -> Result<VarDecl, ParseError> {
        let span = self.span();
        let ty = self.type_ref()?;
        let name = self.ident()?;
        let init = if self.peek_punct("=") {
            self.pos += 1;
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        Ok(VarDecl { ty, name, init, span })
    }

    fn stmt_block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.peek_punct("}") {
            if self.at_end() {
                return Err(self.error(&["statement", "`}`"]));
            }
            body.push(self.statement()?);
        }
        self.pos += 1;
        Ok(body)
    }

    /// A braced block, or a single statement as in `if (c) return x;`.
    fn branch(&mut self) -> Result<Vec<Stmt>, ParseError> {
        if self.peek_punct("{") {
            self.stmt_block()
        } else {
            Ok(vec![self.statement()?])
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let span = self.span();
        if self.peek_keyword("if") {
            self.pos += 1;
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_body = self.branch()?;
            let else_body = if self.peek_keyword("else") {
                self.pos += 1;
                Some(self.branch()?)
            } else {
                None
            };
            return Ok(Stmt { kind: StmtKind::If { cond, then_body, else_body }, span });
        }
        if self.peek_keyword("return") {
            self.pos += 1;
            let value = if self.peek_punct(";") { None } else { Some(self.expr()?) };
            self.expect_punct(";")?;
            return Ok(Stmt { kind: StmtKind::Return(value), span });
        }
        if let Some(after) = self.decl_start(self.pos) {
            if self.punct_at(after + 1, ".") {
                let ty = self.type_ref()?;
                let name = self.ident()?;
                self.expect_punct(".")?;
                let method = self.ident()?;
                let args = self.args()?;
                self.expect_punct(";")?;
                let decl = VarDecl { ty, name, init: None, span };
                return Ok(Stmt { kind: StmtKind::DeclCreate { decl, method, args }, span });
            }
            return Ok(Stmt { kind: StmtKind::VarDecl(self.var_decl()?), span });
        }
        let expr = self.expr()?;
        if self.peek_punct(":") && self.punct_at(self.pos + 1, "{") {
            self.pos += 1;
            let body = self.stmt_block()?;
            return Ok(Stmt { kind: StmtKind::ContextBlock { context: expr, body }, span });
        }
        if self.peek_punct("=") {
            if !matches!(expr.kind, ExprKind::Var(_) | ExprKind::Field { .. }) {
                return Err(self.error(&["`;`"]));
            }
            self.pos += 1;
            let value = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt { kind: StmtKind::Assign { target: expr, value }, span });
        }
        self.expect_punct(";")?;
        Ok(Stmt { kind: StmtKind::Expr(expr), span })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.peek_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.peek_punct(",") {
                    break;
                }
                self.pos += 1;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let t = self.peek().filter(|t| t.kind == TokenKind::Punct)?;
        Some(match t.text.as_str() {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            ">" => BinaryOp::Gt,
            "<=" => BinaryOp::Le,
            ">=" => BinaryOp::Ge,
            "&&" => BinaryOp::And,
            "||" => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op().filter(|op| op.precedence() >= min_prec) {
            let span = self.span();
            self.pos += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let op = if self.peek_punct("-") {
            UnaryOp::Neg
        } else if self.peek_punct("!") {
            UnaryOp::Not
        } else {
            return self.postfix();
        };
        self.pos += 1;
        let operand = self.unary()?;
        Ok(Expr::new(ExprKind::Unary { op, operand: Box::new(operand) }, span))
    }

    /// Member access and colon forms, applied left to right.
    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut expr = self.primary()?;
        loop {
            let span = self.span();
            if self.peek_punct(":") && !self.punct_at(self.pos + 1, "{") {
                self.pos += 1;
                let right = self.primary()?;
                expr = Expr::new(
                    ExprKind::ColonForm { left: Box::new(expr), right: Box::new(right) },
                    span,
                );
            } else if self.peek_punct(".") {
                self.pos += 1;
                let name = self.ident()?;
                let receiver = Box::new(expr);
                expr = if self.peek_punct("(") {
                    let args = self.args()?;
                    Expr::new(ExprKind::MethodCall { receiver, name, args }, span)
                } else {
                    Expr::new(ExprKind::Field { receiver, name }, span)
                };
            } else {
                return Ok(expr);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let Some(t) = self.peek() else { return Err(self.error(&["expression"])) };
        let kind = match t.kind {
            TokenKind::Number => {
                self.pos += 1;
                ExprKind::Number(t.text.parse().map_err(|_| self.error(&["number"]))?)
            }
            TokenKind::Str => {
                self.pos += 1;
                ExprKind::Str(t.text[1..t.text.len() - 1].to_string())
            }
            TokenKind::Keyword => {
                self.pos += 1;
                match t.text.as_str() {
                    "true" => ExprKind::Bool(true),
                    "false" => ExprKind::Bool(false),
                    "null" => ExprKind::Null,
                    "this" => ExprKind::This,
                    "super" => ExprKind::Super,
                    "sub" => ExprKind::Sub,
                    "Root" => ExprKind::ConceptName("Root".into()),
                    "new" => {
                        let concept = self.ident()?;
                        let args = self.args()?;
                        ExprKind::New { concept, args }
                    }
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(&["expression"]));
                    }
                }
            }
            TokenKind::Identifier => {
                self.pos += 1;
                if self.peek_punct("(") {
                    let args = self.args()?;
                    match Builtin::from_name(&t.text) {
                        Some(func) => ExprKind::Builtin { func, args },
                        None => ExprKind::Call { name: t.text.clone(), args },
                    }
                } else {
                    ExprKind::Var(t.text.clone())
                }
            }
            TokenKind::Punct => match t.text.as_str() {
                "(" => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    self.expect_punct(")")?;
                    return Ok(inner);
                }
                "." => {
                    self.pos += 1;
                    let name = self.ident()?;
                    let args = self.args()?;
                    ExprKind::DualCall { name, args }
                }
                ":" => {
                    self.pos += 1;
                    ExprKind::BlockConcat(Box::new(self.primary()?))
                }
                _ => return Err(self.error(&["expression"])),
            },
        };
        Ok(Expr::new(kind, span))
    }
}

fn named_type(name: String) -> TypeName {
    if name == "Map" {
        TypeName::Map
    } else {
        TypeName::Concept(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::token::tokenize;

    fn program(src: &str) -> Program {
        parse(&tokenize(src).unwrap()).unwrap()
    }

    fn expr(src: &str) -> ExprKind {
        parse_expression(&tokenize(src).unwrap()).unwrap().kind
    }

    fn var(name: &str) -> Box<Expr> {
        Box::new(Expr::new(ExprKind::Var(name.into()), Span::default()))
    }

    #[test]
    fn account_concept() {
        let p = program(
            "concept Account reference { String accNo; } object { double balance; }",
        );
        assert_eq!(p.concepts.len(), 1);
        let c = &p.concepts[0];
        assert_eq!(c.name, "Account");
        assert_eq!(c.parent, None);
        assert_eq!(c.reference.as_ref().unwrap().len(), 1);
        assert_eq!(c.object.as_ref().unwrap()[0].name(), "balance");
    }

    #[test]
    fn parent_clause() {
        let p = program("concept SavingsAccount in Account reference{} object{}");
        assert_eq!(p.concepts[0].parent.as_deref(), Some("Account"));
        assert_eq!(p.concepts[0].reference, Some(vec![]));
    }

    #[test]
    fn missing_expression() {
        let err = parse(&tokenize("double x = ;").unwrap()).unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        assert_eq!(err.expected, vec!["expression"]);
    }

    #[test]
    fn method_call_expression() {
        assert_eq!(
            expr("account.getBalance()"),
            ExprKind::MethodCall { receiver: var("account"), name: "getBalance".into(), args: vec![] }
        );
    }

    #[test]
    fn dual_call_expression() {
        assert_eq!(expr(".getBalance()"), ExprKind::DualCall { name: "getBalance".into(), args: vec![] });
    }

    #[test]
    fn root_colon_form() {
        let root = Box::new(Expr::new(ExprKind::ConceptName("Root".into()), Span::default()));
        assert_eq!(
            expr("Root : savingsAccount"),
            ExprKind::ColonForm { left: root, right: var("savingsAccount") }
        );
    }

    #[test]
    fn colon_binds_tighter_than_member_access() {
        let ExprKind::MethodCall { receiver, name, .. } = expr("mainAccount : subAccount.someMethod()")
        else {
            panic!()
        };
        assert_eq!(name, "someMethod");
        assert!(matches!(receiver.kind, ExprKind::ColonForm { .. }));
    }

    #[test]
    fn statement_forms() {
        let p = program(
            "Account account.create();\n\
             mainAccount : SavingsAccount s;\n\
             account : { double b = balance; :s.isEmpty(); }\n\
             x = y;\n\
             if (sub == null) return balance; else return sub.getBalance();",
        );
        let kinds: Vec<_> = p.statements.iter().map(|s| &s.kind).collect();
        assert!(matches!(kinds[0], StmtKind::DeclCreate { method, .. } if method == "create"));
        let StmtKind::VarDecl(d) = kinds[1] else { panic!() };
        assert_eq!(d.ty.context, Some(ContextRef::Unresolved("mainAccount".into())));
        assert!(matches!(kinds[2], StmtKind::ContextBlock { body, .. } if body.len() == 2));
        assert!(matches!(kinds[3], StmtKind::Assign { .. }));
        assert!(matches!(kinds[4], StmtKind::If { else_body: Some(_), .. }));
    }

    #[test]
    fn functions_and_statics() {
        let p = program("static Map map = new Map();\nString getUniqueNo() { return \"A\"; }\nprint(1);");
        assert_eq!(p.statics.len(), 1);
        assert_eq!(p.statics[0].ty.name, TypeName::Map);
        assert_eq!(p.functions[0].name, "getUniqueNo");
        assert_eq!(p.statements.len(), 1);
    }

    #[test]
    fn precedence() {
        let ExprKind::Binary { op, rhs, .. } = expr("a || b && c == d + e * f") else { panic!() };
        assert_eq!(op, BinaryOp::Or);
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::And, .. }));
    }

    #[test]
    fn multiple_parents_rejected() {
        assert!(parse(&tokenize("concept C in A, B").unwrap()).is_err());
    }

    #[test]
    fn assignment_target_must_be_place() {
        assert!(parse(&tokenize("f() = 1;").unwrap()).is_err());
    }
}
