//! Expression mini-language.
//!
//! Scenario files describe every coefficient function as text in a small
//! arithmetic language over the variables `t`, `s`, `tau`, `x` with the
//! functions `exp`, `log`, `sqrt`, `sin`, `cos`, `abs`, `min`, `max`, `pow`.
//! The grammar is hand-written recursive descent (precedence climbing), kept
//! deliberately small so it can be audited line by line:
//!
//! ```plain
//! additive       := multiplicative (('+' | '-') multiplicative)*
//! multiplicative := power (('*' | '/') power)*
//! power          := unary ('^' power)?          right-associative
//! unary          := '-' unary | atom
//! atom           := number | variable | name '(' args ')' | '(' additive ')'
//! ```
//!
//! Unary minus binds tighter than `^`, so `-2^2` is `(-2)^2 = 4`.
//! Parsing and evaluation are pure; both are safe to call concurrently.

mod eval;
mod lexer;
mod parser;

pub use eval::{eval_expr, Bindings};
pub use parser::parse_expr;

/// The four variables the mini-language knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T = 0,
    S = 1,
    Tau = 2,
    X = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::S, Var::Tau, Var::X];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
            Var::Tau => "tau",
            Var::X => "x",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "t" => Some(Var::T),
            "s" => Some(Var::S),
            "tau" => Some(Var::Tau),
            "x" => Some(Var::X),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Abs,
}

impl UnaryFn {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Self::Exp),
            "log" => Some(Self::Log),
            "sqrt" => Some(Self::Sqrt),
            "sin" => Some(Self::Sin),
            "cos" => Some(Self::Cos),
            "abs" => Some(Self::Abs),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinFn {
    Min,
    Max,
    Pow,
}

impl BinFn {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "min" => Some(Self::Min),
            "max" => Some(Self::Max),
            "pow" => Some(Self::Pow),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Min => "min",
            Self::Max => "max",
            Self::Pow => "pow",
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
            BinOp::Pow => 3,
        }
    }
}

/// Byte range of a node in the original source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(f64),
    Variable(Var),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call1 {
        f: UnaryFn,
        arg: Box<Expr>,
    },
    Call2 {
        f: BinFn,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

/// Which of the four variables an expression mentions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VarSet {
    present: [bool; 4],
}

impl VarSet {
    pub fn contains(&self, v: Var) -> bool {
        self.present[v as usize]
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|p| **p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL.into_iter().filter(|v| self.contains(*v))
    }

    fn insert(&mut self, v: Var) {
        self.present[v as usize] = true;
    }
}

impl Expr {
    pub fn variables(&self) -> VarSet {
        let mut set = VarSet::default();
        self.collect_vars(&mut set);
        set
    }

    fn collect_vars(&self, set: &mut VarSet) {
        match &self.kind {
            ExprKind::Const(_) => {}
            ExprKind::Variable(v) => set.insert(*v),
            ExprKind::Neg(e) => e.collect_vars(set),
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Call2 { lhs, rhs, .. } => {
                lhs.collect_vars(set);
                rhs.collect_vars(set);
            }
            ExprKind::Call1 { arg, .. } => arg.collect_vars(set),
        }
    }

    /// Structural comparison ignoring spans; constants compare by bit pattern.
    pub fn structurally_equal(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Const(a), ExprKind::Const(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Variable(a), ExprKind::Variable(b)) => a == b,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a.structurally_equal(b),
            (
                ExprKind::Binary { op, lhs, rhs },
                ExprKind::Binary {
                    op: op2,
                    lhs: l2,
                    rhs: r2,
                },
            ) => op == op2 && lhs.structurally_equal(l2) && rhs.structurally_equal(r2),
            (
                ExprKind::Call1 { f, arg },
                ExprKind::Call1 { f: f2, arg: arg2 },
            ) => f == f2 && arg.structurally_equal(arg2),
            (
                ExprKind::Call2 { f, lhs, rhs },
                ExprKind::Call2 {
                    f: f2,
                    lhs: l2,
                    rhs: r2,
                },
            ) => f == f2 && lhs.structurally_equal(l2) && rhs.structurally_equal(r2),
            _ => false,
        }
    }

    /// Deep copy with one variable renamed. Used to lift a univariate
    /// expression into a bivariate slot (for example a kernel coefficient
    /// written in `t` reused as the second argument `tau`).
    pub fn rename_var(&self, from: Var, to: Var) -> Expr {
        let kind = match &self.kind {
            ExprKind::Const(v) => ExprKind::Const(*v),
            ExprKind::Variable(v) => ExprKind::Variable(if *v == from { to } else { *v }),
            ExprKind::Neg(e) => ExprKind::Neg(Box::new(e.rename_var(from, to))),
            ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
                op: *op,
                lhs: Box::new(lhs.rename_var(from, to)),
                rhs: Box::new(rhs.rename_var(from, to)),
            },
            ExprKind::Call1 { f, arg } => ExprKind::Call1 {
                f: *f,
                arg: Box::new(arg.rename_var(from, to)),
            },
            ExprKind::Call2 { f, lhs, rhs } => ExprKind::Call2 {
                f: *f,
                lhs: Box::new(lhs.rename_var(from, to)),
                rhs: Box::new(rhs.rename_var(from, to)),
            },
        };
        Expr {
            kind,
            span: self.span,
        }
    }

    /// Minimal-parenthesis rendering that reparses to a structurally
    /// identical AST.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.render(&mut out);
        out
    }

    fn level(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Neg(_) => 4,
            _ => 5,
        }
    }

    fn render(&self, out: &mut String) {
        match &self.kind {
            ExprKind::Const(v) => {
                out.push_str(&format!("{v}"));
            }
            ExprKind::Variable(v) => out.push_str(v.name()),
            ExprKind::Neg(e) => {
                out.push('-');
                // operand must be unary-level or tighter
                render_child(e, out, 4);
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    // base is a unary production; exponent chains to the right
                    render_child(lhs, out, 4);
                    out.push('^');
                    render_child(rhs, out, p);
                } else {
                    render_child(lhs, out, p);
                    out.push_str(op.symbol());
                    // left-associative grammar, so an equal-level right child
                    // needs parentheses to survive the round trip
                    render_child(rhs, out, p + 1);
                }
            }
            ExprKind::Call1 { f, arg } => {
                out.push_str(f.name());
                out.push('(');
                arg.render(out);
                out.push(')');
            }
            ExprKind::Call2 { f, lhs, rhs } => {
                out.push_str(f.name());
                out.push('(');
                lhs.render(out);
                out.push_str(", ");
                rhs.render(out);
                out.push(')');
            }
        }
    }
}

fn render_child(child: &Expr, out: &mut String, min_level: u8) {
    if child.level() < min_level {
        out.push('(');
        child.render(out);
        out.push(')');
    } else {
        child.render(out);
    }
}
