use super::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Ge,
    Le,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Le => "'<='".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Token plus its 1-based character position.
type Spanned = (Tok, usize);

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            i += 1;
            continue;
        }
        if c == '>' || c == '<' {
            if chars.get(i + 1) == Some(&'=') {
                out.push((if c == '>' { Tok::Ge } else { Tok::Le }, pos));
                i += 2;
                continue;
            }
            return Err(syntax(pos, format!("unexpected '{c}', expected '{c}='")));
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut integer = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integer = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value: f64 = literal
                .parse()
                .map_err(|_| syntax(pos, format!("malformed number `{literal}`")))?;
            out.push((Tok::Num { value, integer }, pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        return Err(syntax(pos, format!("unexpected character '{c}'")));
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        syntax(
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num {
                value,
                integer: true,
            } if value <= i32::MAX as f64 => {
                self.bump();
                let n = value as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Num(value))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.unexpected(&format!("'(' after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.close_paren()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            _ => Err(self.unexpected("number, symbol, function call or '('")),
        }
    }

    fn close_paren(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("')'"))
        }
    }
}

/// Parse a single expression. Positions in errors are 1-based character
/// offsets; end of input is reported as `len + 1`.
pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Ge,
    Le,
    Eq,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Ge => ">=",
            Comparison::Le => "<=",
            Comparison::Eq => "=",
        }
    }
}

/// `lhs cmp rhs`, as written.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintExpr {
    pub lhs: Expr,
    pub cmp: Comparison,
    pub rhs: Expr,
    pub source: String,
}

impl ConstraintExpr {
    /// `lhs - rhs` (for `>=` / `=`) or `rhs - lhs` (for `<=`), which the
    /// constraint requires to be nonnegative (or zero).
    pub fn normalized(&self) -> Expr {
        match self.cmp {
            Comparison::Ge | Comparison::Eq => {
                Expr::Sub(Box::new(self.lhs.clone()), Box::new(self.rhs.clone()))
            }
            Comparison::Le => Expr::Sub(Box::new(self.rhs.clone()), Box::new(self.lhs.clone())),
        }
    }
}

/// Parse `expr cmp expr` with `cmp` one of `>=`, `<=`, `=`.
pub fn parse_constraint(text: &str) -> Result<ConstraintExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let lhs = p.expr()?;
    let cmp = match p.peek() {
        Tok::Ge => Comparison::Ge,
        Tok::Le => Comparison::Le,
        Tok::Eq => Comparison::Eq,
        _ => return Err(p.unexpected("'>=', '<=' or '='")),
    };
    p.bump();
    let rhs = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(ConstraintExpr {
        lhs,
        cmp,
        rhs,
        source: text.trim().to_string(),
    })
}
