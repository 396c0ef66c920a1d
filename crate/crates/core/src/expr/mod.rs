//! Expression DSL for metric components, potentials and vector fields.
//!
//! The grammar is documented in `docs/dsl.md`. Expressions are parsed against
//! a list of coordinate names; every identifier must resolve at parse time.
//! Evaluation yields a [`Jet`] so derivatives come for free.

mod parse;

use std::fmt;

use thiserror::Error;

use crate::jet::{Jet, JetError, Unary, DEFAULT_ORDER};

/// Byte range in the source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("'{name}' at offset {offset} takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }

    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{source} in expression bytes {}..{} at point {point:?}", span.start, span.end)]
    Jet {
        source: JetError,
        span: Span,
        point: Vec<f64>,
    },
    #[error("expression uses {needed} coordinates but the point has {given}")]
    Dimension { needed: usize, given: usize },
    #[error("'{name}' is not bound in this context")]
    Unbound { name: String, span: Span },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn unary(self) -> Unary {
        match self {
            Func::Sin => Unary::Sin,
            Func::Cos => Unary::Cos,
            Func::Exp => Unary::Exp,
            Func::Log => Unary::Log,
            Func::Sqrt => Unary::Sqrt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(f64),
    Var {
        index: usize,
        name: String,
    },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    /// A name supplied by the evaluation context, optionally applied to
    /// field names (integrand extension, e.g. `ric(gradf, gradf)`).
    Bound {
        name: String,
        args: Vec<String>,
    },
}

/// Parsed expression. Equality compares structure and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    node: Node,
    span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.node, &other.node) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var { index: a, name: na }, Node::Var { index: b, name: nb }) => {
                a == b && na == nb
            }
            (Node::Neg(a), Node::Neg(b)) => a == b,
            (Node::Binary(o1, a1, b1), Node::Binary(o2, a2, b2)) => {
                o1 == o2 && a1 == a2 && b1 == b2
            }
            (Node::Call(f1, a1), Node::Call(f2, a2)) => f1 == f2 && a1 == a2,
            (Node::Bound { name: n1, args: a1 }, Node::Bound { name: n2, args: a2 }) => {
                n1 == n2 && a1 == a2
            }
            _ => false,
        }
    }
}

/// Names an expression may reference besides coordinates and `pi`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Scope<'a> {
    pub coords: &'a [String],
    pub scalars: &'a [&'a str],
    pub calls: &'a [(&'a str, usize)],
}

/// Supplies values for [`Node::Bound`] names during value evaluation.
pub trait Bindings {
    fn value(&self, name: &str, args: &[String]) -> Option<f64>;
}

struct NoBindings;

impl Bindings for NoBindings {
    fn value(&self, _: &str, _: &[String]) -> Option<f64> {
        None
    }
}

impl Expr {
    fn new(node: Node, span: Span) -> Self {
        Expr { node, span }
    }

    fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        let span = Span::new(lhs.span.start, rhs.span.end);
        Expr::new(Node::Binary(op, Box::new(lhs), Box::new(rhs)), span)
    }

    /// Parses `src` with the given coordinate names in scope.
    pub fn parse<S: AsRef<str>>(src: &str, coord_names: &[S]) -> Result<Expr, ParseError> {
        let coords: Vec<String> = coord_names.iter().map(|s| s.as_ref().to_string()).collect();
        let scope = Scope {
            coords: &coords,
            ..Scope::default()
        };
        parse::Parser::parse(src, &scope)
    }

    pub fn parse_in(src: &str, scope: &Scope<'_>) -> Result<Expr, ParseError> {
        parse::Parser::parse(src, scope)
    }

    pub fn constant(value: f64) -> Expr {
        Expr::new(Node::Const(value), Span::default())
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn span(&self) -> Span {
        self.span
    }

    /// Largest coordinate index referenced, plus one.
    pub fn arity(&self) -> usize {
        match &self.node {
            Node::Const(_) | Node::Bound { .. } => 0,
            Node::Var { index, .. } => index + 1,
            Node::Neg(a) | Node::Call(_, a) => a.arity(),
            Node::Binary(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// `true` when no coordinate or bound name appears.
    pub fn is_constant(&self) -> bool {
        match &self.node {
            Node::Const(_) => true,
            Node::Var { .. } | Node::Bound { .. } => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Jet of the expression at `x`, order 3.
    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet, EvalError> {
        self.eval_jet_order(x, DEFAULT_ORDER)
    }

    pub fn eval_jet_order(&self, x: &[f64], order: usize) -> Result<Jet, EvalError> {
        if self.arity() > x.len() {
            return Err(EvalError::Dimension {
                needed: self.arity(),
                given: x.len(),
            });
        }
        self.jet(x, order)
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet, EvalError> {
        let wrap = |source: JetError| EvalError::Jet {
            source,
            span: self.span,
            point: x.to_vec(),
        };
        match &self.node {
            Node::Const(v) => Ok(Jet::constant_with_order(x.len(), order, *v)),
            Node::Var { index, .. } => Jet::seed_with_order(x, *index, order).map_err(wrap),
            Node::Neg(a) => Ok(-a.jet(x, order)?),
            Node::Call(f, a) => a.jet(x, order)?.apply(f.unary()).map_err(wrap),
            Node::Binary(op, a, b) => {
                let lhs = a.jet(x, order)?;
                let rhs = b.jet(x, order)?;
                match op {
                    BinOp::Add => Ok(lhs + rhs),
                    BinOp::Sub => Ok(lhs - rhs),
                    BinOp::Mul => Ok(lhs * rhs),
                    BinOp::Div => lhs.checked_div(&rhs).map_err(wrap),
                    BinOp::Pow if rhs.is_constant() => lhs.powf(rhs.value()).map_err(wrap),
                    BinOp::Pow => {
                        let log = lhs.apply(Unary::Log).map_err(wrap)?;
                        (log * rhs).apply(Unary::Exp).map_err(wrap)
                    }
                }
            }
            Node::Bound { name, .. } => Err(EvalError::Unbound {
                name: name.clone(),
                span: self.span,
            }),
        }
    }

    /// Plain value at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.eval_with(x, &NoBindings)
    }

    /// Value at `x`, resolving bound names through `bindings`.
    pub fn eval_with(&self, x: &[f64], bindings: &dyn Bindings) -> Result<f64, EvalError> {
        if self.arity() > x.len() {
            return Err(EvalError::Dimension {
                needed: self.arity(),
                given: x.len(),
            });
        }
        self.value(x, bindings)
    }

    fn value(&self, x: &[f64], bindings: &dyn Bindings) -> Result<f64, EvalError> {
        let fail = |source: JetError| EvalError::Jet {
            source,
            span: self.span,
            point: x.to_vec(),
        };
        Ok(match &self.node {
            Node::Const(v) => *v,
            Node::Var { index, .. } => x[*index],
            Node::Neg(a) => -a.value(x, bindings)?,
            Node::Call(f, a) => {
                let v = a.value(x, bindings)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log if v <= 0.0 => {
                        return Err(fail(JetError::Domain {
                            op: "log",
                            value: v,
                        }))
                    }
                    Func::Log => v.ln(),
                    Func::Sqrt if v < 0.0 => {
                        return Err(fail(JetError::Domain {
                            op: "sqrt",
                            value: v,
                        }))
                    }
                    Func::Sqrt => v.sqrt(),
                }
            }
            Node::Binary(op, a, b) => {
                let l = a.value(x, bindings)?;
                let r = b.value(x, bindings)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div if r == 0.0 => return Err(fail(JetError::DivisionByZero)),
                    BinOp::Div => l / r,
                    BinOp::Pow if r.fract() == 0.0 && r.abs() <= 64.0 => l.powi(r as i32),
                    BinOp::Pow if l <= 0.0 => {
                        return Err(fail(JetError::Domain {
                            op: "pow",
                            value: l,
                        }))
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
            Node::Bound { name, args } => {
                bindings
                    .value(name, args)
                    .ok_or_else(|| EvalError::Unbound {
                        name: name.clone(),
                        span: self.span,
                    })?
            }
        })
    }

    fn precedence(&self) -> u8 {
        match &self.node {
            Node::Binary(op, ..) => op.precedence(),
            Node::Neg(_) => 3,
            Node::Const(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Const(v) if *v < 0.0 => write!(f, "-{}", -v),
            Node::Const(v) => write!(f, "{v}"),
            Node::Var { name, .. } => f.write_str(name),
            Node::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Binary(BinOp::Pow, a, b) => {
                write_wrapped(f, a, a.precedence() <= 4)?;
                f.write_str("^")?;
                write_wrapped(f, b, b.precedence() < 3)
            }
            Node::Binary(op, a, b) => {
                let p = op.precedence();
                write_wrapped(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_wrapped(f, b, b.precedence() <= p)
            }
            Node::Bound { name, args } if args.is_empty() => f.write_str(name),
            Node::Bound { name, args } => write!(f, "{name}({})", args.join(", ")),
        }
    }
}
