//! Arithmetic in the sequence index `n`: `+ - * / ^`, parentheses, numeric
//! literals. `×`, `·` and `−` are accepted as aliases.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    N,
    Neg(Box<Ast>),
    Bin(Op, Box<Ast>, Box<Ast>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at offset {offset} in `{source_text}`")]
pub struct ExprError {
    pub source_text: String,
    pub offset: usize,
    pub message: String,
}

impl Ast {
    pub fn eval(&self, n: f64) -> f64 {
        match self {
            Ast::Num(v) => *v,
            Ast::N => n,
            Ast::Neg(a) => -a.eval(n),
            Ast::Bin(op, a, b) => {
                let (a, b) = (a.eval(n), b.eval(n));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(v) => write!(f, "{v}"),
            Ast::N => write!(f, "n"),
            Ast::Neg(a) => write!(f, "(-{a})"),
            Ast::Bin(op, a, b) => {
                let c = match op {
                    Op::Add => '+',
                    Op::Sub => '-',
                    Op::Mul => '*',
                    Op::Div => '/',
                    Op::Pow => '^',
                };
                write!(f, "({a}{c}{b})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    N,
    Op(char),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let err = |offset, message: &str| ExprError { source_text: src.to_string(), offset, message: message.to_string() };
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                // Exponent part: e or E, optional sign, digits.
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
                let end = chars.get(i).map_or(src.len(), |c| c.0);
                let text = &src[chars[start].0..end];
                let v = text.parse::<f64>().map_err(|_| err(pos, "malformed number"))?;
                out.push((pos, Tok::Num(v)));
            }
            'n' => {
                out.push((pos, Tok::N));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((pos, Tok::Op(c)));
                i += 1;
            }
            '−' => {
                out.push((pos, Tok::Op('-')));
                i += 1;
            }
            '×' | '·' => {
                out.push((pos, Tok::Op('*')));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            _ => return Err(err(pos, &format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ExprError {
        let offset = self.toks.get(self.pos).map_or(self.src.len(), |t| t.0);
        ExprError { source_text: self.src.to_string(), offset, message: message.to_string() }
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Ast::Bin(if c == '+' { Op::Add } else { Op::Sub }, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Bin(if c == '*' { Op::Mul } else { Op::Div }, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Ast::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        let tok = self.toks.get(self.pos).map(|t| t.1.clone());
        match tok {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Ast::Num(v))
            }
            Some(Tok::N) => {
                self.pos += 1;
                Ok(Ast::N)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.toks.get(self.pos).map(|t| &t.1) != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.err("expected a number, `n` or `(`")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

pub fn parse(src: &str) -> Result<Ast, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, n: f64) -> f64 {
        parse(s).unwrap().eval(n)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1+1/n", 4.0), 1.25);
        assert_eq!(ev("2*3+4", 0.0), 10.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-n^2", 3.0), -9.0);
        assert_eq!(ev("(1+n)*(1-n)", 2.0), -3.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("n^-1", 4.0), 0.25);
    }

    #[test]
    fn literals_and_aliases() {
        assert_eq!(ev("1e-3*n", 2.0), 2e-3);
        assert_eq!(ev("2.5E+1", 0.0), 25.0);
        assert_eq!(ev("1 − 2×n", 3.0), -5.0);
        assert_eq!(ev("3·n", 2.0), 6.0);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("1 + x").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(parse("(1+n").unwrap_err().message, "expected `)`");
        assert!(parse("").is_err());
        assert!(parse("1 2").is_err());
        assert!(parse("1..2").is_err());
    }
}
