use super::lexer::{lex, Tok, Token};
use super::{BinFn, BinOp, Expr, ExprKind, Span, UnaryFn, Var};
use crate::error::{Error, Result};

/// Nesting limit for the recursive parser, so adversarial input cannot blow
/// the stack.
const MAX_DEPTH: usize = 256;

pub fn parse_expr(source: &str) -> Result<Expr> {
    let tokens = lex(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end_offset: source.len(),
        depth: 0,
    };
    let expr = p.additive()?;
    if let Some(tok) = p.peek() {
        return Err(Error::Parse {
            offset: tok.start,
            expected: "end of input".to_string(),
        });
    }
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.start).unwrap_or(self.end_offset)
    }

    fn expect(&mut self, want: Tok, desc: &str) -> Result<Token> {
        match self.peek() {
            Some(t) if t.tok == want => Ok(self.bump().unwrap()),
            _ => Err(Error::Parse {
                offset: self.here(),
                expected: desc.to_string(),
            }),
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::Parse {
                offset: self.here(),
                expected: "a shallower expression (nesting limit exceeded)".to_string(),
            });
        }
        Ok(())
    }

    fn additive(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.multiplicative()?;
        while let Some(t) = self.peek() {
            let op = match t.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        while let Some(t) = self.peek() {
            let op = match t.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.power()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    /// `^` is right-associative and its base is a unary production, so
    /// `-2^2 = (-2)^2` (unary minus binds tighter than the tower).
    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
            self.bump();
            let exponent = self.power()?;
            return Ok(binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if let Some(t) = self.peek() {
            if t.tok == Tok::Minus {
                let start = t.start;
                self.bump();
                let inner = self.unary()?;
                let span = Span {
                    start,
                    end: inner.span.end,
                };
                Expr {
                    kind: ExprKind::Neg(Box::new(inner)),
                    span,
                }
            } else {
                self.atom()?
            }
        } else {
            return Err(Error::Parse {
                offset: self.end_offset,
                expected: "expression".to_string(),
            });
        };
        self.depth -= 1;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = match self.bump() {
            Some(t) => t,
            None => {
                return Err(Error::Parse {
                    offset: self.end_offset,
                    expected: "expression".to_string(),
                })
            }
        };
        match t.tok {
            Tok::Num(v) => Ok(Expr {
                kind: ExprKind::Const(v),
                span: Span {
                    start: t.start,
                    end: t.end,
                },
            }),
            Tok::LParen => {
                let inner = self.additive()?;
                let close = self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: Span {
                        start: t.start,
                        end: close.end,
                    },
                })
            }
            Tok::Ident(name) => self.ident(name, t.start, t.end),
            _ => Err(Error::Parse {
                offset: t.start,
                expected: "expression".to_string(),
            }),
        }
    }

    fn ident(&mut self, name: String, start: usize, end: usize) -> Result<Expr> {
        let called = matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen));
        if called {
            self.bump();
            if let Some(f) = UnaryFn::from_name(&name) {
                let arg = self.additive()?;
                let close = self.expect(Tok::RParen, "closing parenthesis")?;
                return Ok(Expr {
                    kind: ExprKind::Call1 {
                        f,
                        arg: Box::new(arg),
                    },
                    span: Span {
                        start,
                        end: close.end,
                    },
                });
            }
            if let Some(f) = BinFn::from_name(&name) {
                let lhs = self.additive()?;
                self.expect(Tok::Comma, "comma between arguments")?;
                let rhs = self.additive()?;
                let close = self.expect(Tok::RParen, "closing parenthesis")?;
                return Ok(Expr {
                    kind: ExprKind::Call2 {
                        f,
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    },
                    span: Span {
                        start,
                        end: close.end,
                    },
                });
            }
            return Err(Error::Parse {
                offset: start,
                expected: format!(
                    "a function name (exp, log, sqrt, sin, cos, abs, min, max, pow; found {name:?})"
                ),
            });
        }
        match Var::from_name(&name) {
            Some(v) => Ok(Expr {
                kind: ExprKind::Variable(v),
                span: Span { start, end },
            }),
            None => Err(Error::Parse {
                offset: start,
                expected: format!("a variable (t, s, tau, x; found {name:?})"),
            }),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = Span {
        start: lhs.span.start,
        end: rhs.span.end,
    };
    Expr {
        kind: ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        },
        span,
    }
}
