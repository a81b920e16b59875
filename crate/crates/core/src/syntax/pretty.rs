//! Source printer; its output parses back to an equal tree.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let mut p = Printer::default();
    for s in &program.statics {
        p.line("static ");
        p.var_decl(s);
    }
    for c in &program.concepts {
        p.concept(c);
    }
    for f in &program.functions {
        p.line("");
        p.method(f);
    }
    for s in &program.statements {
        p.stmt(s);
    }
    p.out
}

pub fn pretty_expr(expr: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(expr, 0);
    p.out
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

const POSTFIX: u8 = 8;
const PRIMARY: u8 = 9;

impl Printer {
    fn line(&mut self, text: &str) {
        if !self.out.is_empty() && !self.out.ends_with('\n') {
            self.out.push('\n');
        }
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
    }

    fn concept(&mut self, c: &ConceptDecl) {
        self.line(&format!("concept {}", c.name));
        if let Some(parent) = &c.parent {
            write!(self.out, " in {parent}").unwrap();
        }
        for (kw, block) in [("reference", &c.reference), ("object", &c.object)] {
            if let Some(members) = block {
                self.indent += 1;
                self.line(&format!("{kw} {{"));
                self.indent += 1;
                for m in members {
                    match m {
                        Member::Field(f) => {
                            self.line("");
                            self.var_decl(f);
                        }
                        Member::Method(m) => {
                            self.line("");
                            self.method(m);
                        }
                    }
                }
                self.indent -= 1;
                self.line("}");
                self.indent -= 1;
            }
        }
    }

    fn type_ref(&mut self, ty: &TypeRef) {
        if let Some(ctx) = &ty.context {
            write!(self.out, "{} : ", ctx.name()).unwrap();
        }
        let name = match &ty.name {
            TypeName::Void => "void",
            TypeName::Double => "double",
            TypeName::Boolean => "boolean",
            TypeName::Str => "String",
            TypeName::Map => "Map",
            TypeName::Root => "Root",
            TypeName::Concept(c) => c,
        };
        self.out.push_str(name);
    }

    fn var_decl(&mut self, d: &VarDecl) {
        self.type_ref(&d.ty);
        write!(self.out, " {}", d.name).unwrap();
        if let Some(init) = &d.init {
            self.out.push_str(" = ");
            self.expr(init, 0);
        }
        self.out.push(';');
    }

    fn method(&mut self, m: &MethodDecl) {
        self.type_ref(&m.ret);
        write!(self.out, " {}(", m.name).unwrap();
        for (i, p) in m.params.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.type_ref(&p.ty);
            write!(self.out, " {}", p.name).unwrap();
        }
        self.out.push_str(") ");
        self.block(&m.body);
    }

    fn block(&mut self, body: &[Stmt]) {
        self.out.push('{');
        self.indent += 1;
        for s in body {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn stmt(&mut self, s: &Stmt) {
        self.line("");
        match &s.kind {
            StmtKind::VarDecl(d) => self.var_decl(d),
            StmtKind::DeclCreate { decl, method, args } => {
                self.type_ref(&decl.ty);
                write!(self.out, " {}.{method}", decl.name).unwrap();
                self.args(args);
                self.out.push(';');
            }
            StmtKind::Expr(e) => {
                self.expr(e, 0);
                self.out.push(';');
            }
            StmtKind::Assign { target, value } => {
                self.expr(target, 0);
                self.out.push_str(" = ");
                self.expr(value, 0);
                self.out.push(';');
            }
            StmtKind::Return(value) => {
                self.out.push_str("return");
                if let Some(v) = value {
                    self.out.push(' ');
                    self.expr(v, 0);
                }
                self.out.push(';');
            }
            StmtKind::If { cond, then_body, else_body } => {
                self.out.push_str("if (");
                self.expr(cond, 0);
                self.out.push_str(") ");
                self.block(then_body);
                if let Some(e) = else_body {
                    self.out.push_str(" else ");
                    self.block(e);
                }
            }
            StmtKind::ContextBlock { context, body } => {
                self.expr(context, 0);
                self.out.push_str(" : ");
                self.block(body);
            }
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a, 0);
        }
        self.out.push(')');
    }

    fn expr(&mut self, e: &Expr, min_prec: u8) {
        let prec = expr_precedence(e);
        if prec < min_prec {
            self.out.push('(');
            self.expr(e, 0);
            self.out.push(')');
            return;
        }
        match &e.kind {
            ExprKind::Number(n) => write!(self.out, "{n}").unwrap(),
            ExprKind::Str(s) => write!(self.out, "\"{s}\"").unwrap(),
            ExprKind::Bool(b) => write!(self.out, "{b}").unwrap(),
            ExprKind::Null => self.out.push_str("null"),
            ExprKind::Var(n) | ExprKind::ConceptName(n) => self.out.push_str(n),
            ExprKind::This => self.out.push_str("this"),
            ExprKind::Super => self.out.push_str("super"),
            ExprKind::Sub => self.out.push_str("sub"),
            ExprKind::Field { receiver, name } => {
                self.expr(receiver, POSTFIX);
                write!(self.out, ".{name}").unwrap();
            }
            ExprKind::MethodCall { receiver, name, args } => {
                self.expr(receiver, POSTFIX);
                write!(self.out, ".{name}").unwrap();
                self.args(args);
            }
            ExprKind::DualCall { name, args } => {
                write!(self.out, ".{name}").unwrap();
                self.args(args);
            }
            ExprKind::Call { name, args } => {
                self.out.push_str(name);
                self.args(args);
            }
            ExprKind::New { concept, args } => {
                write!(self.out, "new {concept}").unwrap();
                self.args(args);
            }
            ExprKind::Builtin { func, args } => {
                self.out.push_str(func.name());
                self.args(args);
            }
            ExprKind::ColonForm { left, right }
            | ExprKind::Concat { left, right }
            | ExprKind::LeftCast { concept: left, operand: right }
            | ExprKind::RightCast { operand: left, concept: right } => {
                self.expr(left, POSTFIX);
                self.out.push_str(" : ");
                self.expr(right, PRIMARY);
            }
            ExprKind::BlockConcat(inner) => {
                self.out.push(':');
                self.expr(inner, PRIMARY);
            }
            ExprKind::Unary { op, operand } => {
                self.out.push(if *op == UnaryOp::Neg { '-' } else { '!' });
                self.expr(operand, 7);
            }
            ExprKind::Binary { op, lhs, rhs } => {
                self.expr(lhs, op.precedence());
                write!(self.out, " {} ", op.symbol()).unwrap();
                self.expr(rhs, op.precedence() + 1);
            }
        }
    }
}

fn expr_precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => 7,
        ExprKind::Field { .. }
        | ExprKind::MethodCall { .. }
        | ExprKind::ColonForm { .. }
        | ExprKind::Concat { .. }
        | ExprKind::LeftCast { .. }
        | ExprKind::RightCast { .. } => POSTFIX,
        _ => PRIMARY,
    }
}
