//! Arithmetic expressions in `x` and `y` for exponent fields.
//!
//! Grammar (juxtaposition multiplies, so `3pi x` is `3 * pi * x`):
//!
//! ```text
//! sum     = product (("+" | "-") product)*
//! product = unary (("*" | "/") unary | unary)*
//! unary   = ("-" | "+") unary | power
//! power   = atom ("^" unary)?
//! atom    = number | "x" | "y" | "pi" | ("sin" | "cos") "(" sum ")" | "(" sum ")"
//! ```
//!
//! `π`, `×` and `−` are accepted as aliases.

use std::f64::consts::PI;
use std::fmt;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
}

impl Node {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval(x, y),
            Node::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Node::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Node::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Node::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Node::Pow(a, b) => {
                let e = b.eval(x, y);
                let base = a.eval(x, y);
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Node::Sin(a) => a.eval(x, y).sin(),
            Node::Cos(a) => a.eval(x, y).cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    X,
    Y,
    Pi,
    Sin,
    Cos,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, CliError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' | '−' => Some(Token::Minus),
            '*' | '×' | '·' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            'π' => Some(Token::Pi),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((pos, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // exponent part, only when followed by digits so that `2e` is not eaten
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = if i < chars.len() { chars[i].0 } else { src.len() };
            let text = &src[pos..end];
            let v: f64 = text.parse().map_err(|_| expr_error(src, pos, format!("bad number '{text}'")))?;
            out.push((pos, Token::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphabetic() {
                i += 1;
            }
            let end = if i < chars.len() { chars[i].0 } else { src.len() };
            let word = &src[chars[start].0..end];
            let t = match word {
                "x" => Token::X,
                "y" => Token::Y,
                "pi" => Token::Pi,
                "sin" => Token::Sin,
                "cos" => Token::Cos,
                _ => return Err(expr_error(src, pos, format!("unknown name '{word}'"))),
            };
            out.push((pos, t));
        } else {
            return Err(expr_error(src, pos, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn expr_error(src: &str, pos: usize, message: String) -> CliError {
    CliError::Expression { source_text: src.to_string(), position: pos, message }
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.at).map(|t| t.1)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.at).map_or(self.src.len(), |t| t.0)
    }

    fn fail<T>(&self, message: &str) -> Result<T, CliError> {
        Err(expr_error(self.src, self.position(), message.to_string()))
    }

    fn sum(&mut self) -> Result<Node, CliError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.at += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(Token::Minus) => {
                    self.at += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Node, CliError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.at += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.at += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Num(_) | Token::X | Token::Y | Token::Pi | Token::Sin | Token::Cos | Token::Open) => {
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, CliError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.at += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, CliError> {
        let base = self.atom()?;
        if self.peek() == Some(Token::Caret) {
            self.at += 1;
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, CliError> {
        let Some(t) = self.peek() else {
            return self.fail("unexpected end of expression");
        };
        self.at += 1;
        match t {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::X => Ok(Node::X),
            Token::Y => Ok(Node::Y),
            Token::Pi => Ok(Node::Num(PI)),
            Token::Sin | Token::Cos => {
                if self.peek() != Some(Token::Open) {
                    return self.fail("expected '(' after function name");
                }
                let arg = Box::new(self.atom()?);
                Ok(if t == Token::Sin { Node::Sin(arg) } else { Node::Cos(arg) })
            }
            Token::Open => {
                let inner = self.sum()?;
                if self.peek() != Some(Token::Close) {
                    return self.fail("expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            _ => {
                self.at -= 1;
                self.fail("expected a number, variable, function or '('")
            }
        }
    }
}

/// A parsed expression in `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    text: String,
    root: Node,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(expr_error(text, 0, "empty expression".into()));
        }
        let mut parser = Parser { src: text, tokens, at: 0 };
        let root = parser.sum()?;
        if parser.at != parser.tokens.len() {
            return parser.fail("unexpected trailing input");
        }
        Ok(Expr { text: text.trim().to_string(), root })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.root.eval(x, y)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// `Some(v)` when the expression mentions neither `x` nor `y`.
    pub fn constant_value(&self) -> Option<f64> {
        fn free(n: &Node) -> bool {
            match n {
                Node::Num(_) => true,
                Node::X | Node::Y => false,
                Node::Neg(a) | Node::Sin(a) | Node::Cos(a) => free(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                    free(a) && free(b)
                }
            }
        }
        free(&self.root).then(|| self.root.eval(0.0, 0.0))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
