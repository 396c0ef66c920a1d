use super::{BinOp, Expr, Func, Node, ParseError, Scope, Span};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let frac_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == frac_start {
                    return Err(ParseError::syntax(i, "expected digits after decimal point"));
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                let exp_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == exp_start {
                    return Err(ParseError::syntax(i, "expected exponent digits"));
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::syntax(start, "malformed number"))?;
            if !value.is_finite() {
                return Err(ParseError::syntax(start, "numeric literal out of range"));
            }
            out.push(Token {
                tok: Tok::Num(value),
                span: Span::new(start, i),
            });
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: Span::new(start, i),
            });
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::syntax(
                start,
                format!("unexpected character '{ch}'"),
            ));
        }
    }
    out.push(Token {
        tok: Tok::End,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}

pub(super) struct Parser<'s> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'s Scope<'s>,
}

impl<'s> Parser<'s> {
    pub(super) fn parse(src: &str, scope: &'s Scope<'s>) -> Result<Expr, ParseError> {
        if src.trim().is_empty() {
            return Err(ParseError::syntax(src.len(), "empty expression"));
        }
        let mut p = Parser {
            tokens: lex(src)?,
            pos: 0,
            scope,
        };
        let e = p.expr()?;
        let t = p.peek();
        if t.tok != Tok::End {
            return Err(ParseError::syntax(
                t.span.start,
                "unexpected trailing input",
            ));
        }
        Ok(e)
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok != tok {
            return Err(ParseError::syntax(t.span.start, format!("expected {what}")));
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            let start = self.next().span.start;
            let inner = self.unary()?;
            let span = Span::new(start, inner.span.end);
            return Ok(Expr::new(Node::Neg(Box::new(inner)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(Expr::new(Node::Const(v), t.span)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.call(name, t.span)
                } else {
                    self.identifier(name, t.span)
                }
            }
            Tok::End => Err(ParseError::syntax(t.span.start, "unexpected end of input")),
            _ => Err(ParseError::syntax(t.span.start, "expected a value")),
        }
    }

    fn identifier(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        if let Some(index) = self.scope.coords.iter().position(|c| *c == name) {
            return Ok(Expr::new(Node::Var { index, name }, span));
        }
        if name == "pi" {
            return Ok(Expr::new(Node::Const(std::f64::consts::PI), span));
        }
        if self.scope.scalars.contains(&name.as_str()) {
            return Ok(Expr::new(
                Node::Bound {
                    name,
                    args: Vec::new(),
                },
                span,
            ));
        }
        if Func::from_name(&name).is_some() {
            return Err(ParseError::syntax(
                span.end,
                format!("function '{name}' requires parentheses"),
            ));
        }
        Err(ParseError::UnknownIdentifier {
            name,
            offset: span.start,
        })
    }

    fn call(&mut self, name: String, name_span: Span) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        if let Some(func) = Func::from_name(&name) {
            let mut args = vec![self.expr()?];
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.expr()?);
            }
            let close = self.expect(Tok::RParen, "')'")?;
            if args.len() != 1 {
                return Err(ParseError::Arity {
                    name,
                    expected: 1,
                    found: args.len(),
                    offset: name_span.start,
                });
            }
            let arg = args.pop().expect("one argument");
            return Ok(Expr::new(
                Node::Call(func, Box::new(arg)),
                Span::new(name_span.start, close.span.end),
            ));
        }
        let Some(&(_, arity)) = self.scope.calls.iter().find(|(n, _)| *n == name) else {
            return Err(ParseError::UnknownIdentifier {
                name,
                offset: name_span.start,
            });
        };
        // Bound calls take field names, not expressions.
        let mut args = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let t = self.next();
                match t.tok {
                    Tok::Ident(arg) => args.push(arg),
                    _ => {
                        return Err(ParseError::syntax(t.span.start, "expected a field name"));
                    }
                }
                if self.peek().tok != Tok::Comma {
                    break;
                }
                self.next();
            }
        }
        let close = self.expect(Tok::RParen, "')'")?;
        if args.len() != arity {
            return Err(ParseError::Arity {
                name,
                expected: arity,
                found: args.len(),
                offset: name_span.start,
            });
        }
        Ok(Expr::new(
            Node::Bound { name, args },
            Span::new(name_span.start, close.span.end),
        ))
    }
}
