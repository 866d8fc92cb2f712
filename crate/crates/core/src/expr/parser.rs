use num_rational::BigRational;

use super::{BinOp, Expr, Func, NodeVar, ParseError, Span};
use crate::lattice::Offset;
use crate::scalar::parse_rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Int(i64),
    Op(char),
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, span) = lx.next()?;
            let done = tok == Tok::Eof;
            out.push((tok, span));
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(Tok, Span), ParseError> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().unwrap().len_utf8();
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, Span::new(start, start)));
        };
        if c.is_ascii_digit() || (c == '.' && self.src[start + 1..].starts_with(|d: char| d.is_ascii_digit())) {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while self.peek().is_some_and(|d| d.is_ascii_alphanumeric() || d == '_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), Span::new(start, self.pos)));
        }
        if "+-*/^()[],;=".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), Span::new(start, self.pos)));
        }
        Err(ParseError::new(
            format!("unexpected character `{c}`"),
            Span::new(start, start + c.len_utf8()),
            self.src,
        ))
    }

    fn number(&mut self, start: usize) -> Result<(Tok, Span), ParseError> {
        let digits = |lx: &mut Lexer| {
            while lx.peek().is_some_and(|d| d.is_ascii_digit()) {
                lx.pos += 1;
            }
        };
        digits(self);
        let mut integral = true;
        if self.peek() == Some('.') {
            integral = false;
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|d| d.is_ascii_digit()) {
                integral = false;
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        let span = Span::new(start, self.pos);
        let value = parse_rational(text).map_err(|_| ParseError::new(format!("malformed number `{text}`"), span, self.src))?;
        if integral {
            if let Ok(i) = text.parse::<i64>() {
                return Ok((Tok::Int(i), span));
            }
        }
        Ok((Tok::Num(value), span))
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser { src, toks: Lexer::tokens(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(msg, self.span(), self.src)
    }

    fn expect(&mut self, c: char) -> Result<Span, ParseError> {
        if *self.peek() == Tok::Op(c) {
            Ok(self.bump().1)
        } else {
            Err(self.error(format!("expected `{c}`, found {}", describe(self.peek()))))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Num(r) => Ok(Expr::Number(r)),
            Tok::Int(i) => Ok(Expr::Number(BigRational::from_integer(i.into()))),
            Tok::Op('(') => {
                let e = self.expression()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, span),
            other => Err(ParseError::new(format!("expected an operand, found {}", describe(&other)), span, self.src)),
        }
    }

    fn identifier(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        let func = match name.as_str() {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        };
        if let Some(f) = func {
            if *self.peek() != Tok::Op('(') {
                return Err(self.error(format!("`{name}` must be followed by `(`")));
            }
            self.bump();
            let arg = self.expression()?;
            self.expect(')')?;
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        let var = match name.as_str() {
            "x" => Some(NodeVar::X),
            "t" => Some(NodeVar::T),
            "u" => Some(NodeVar::U),
            _ => None,
        };
        match var {
            Some(v) => {
                if self.eat('[') {
                    let ds = self.signed_int()?;
                    self.expect(',')?;
                    let dt = self.signed_int()?;
                    self.expect(']')?;
                    Ok(Expr::Node(v, Offset::new(ds, dt)))
                } else {
                    Ok(Expr::Node(v, Offset::new(0, 0)))
                }
            }
            None => {
                if *self.peek() == Tok::Op('[') {
                    return Err(self.error(format!("only x, t and u can be shifted, not `{name}`")));
                }
                Ok(Expr::Param(name, span))
            }
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        match self.bump() {
            (Tok::Int(i), _) => Ok(if neg { -i } else { i }),
            (other, span) => Err(ParseError::new(
                format!("expected an integer shift, found {}", describe(&other)),
                span,
                self.src,
            )),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => Err(self.error(format!("unexpected {} after expression", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(_) | Tok::Int(_) => "a number".into(),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a single expression (a characteristic or a scalar formula).
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    if *p.peek() == Tok::Eof {
        return Err(p.error("empty expression"));
    }
    let e = p.expression()?;
    p.finish()?;
    Ok(e)
}

/// Coefficients of a point vector field; absent components are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFieldSource {
    pub xi_x: Expr,
    pub xi_t: Expr,
    pub phi: Expr,
}

/// Parses `xi_x = ...; xi_t = ...; phi = ...` (any subset, any order).
///
/// Point fields are local, so shifted references such as `u[1,0]` are rejected.
pub fn parse_point_field(src: &str) -> Result<PointFieldSource, ParseError> {
    let mut p = Parser::new(src)?;
    let zero = || Expr::Number(BigRational::from_integer(0.into()));
    let mut slots: [Option<Expr>; 3] = [None, None, None];
    loop {
        if *p.peek() == Tok::Eof {
            break;
        }
        let (tok, span) = p.bump();
        let slot = match &tok {
            Tok::Ident(n) if n == "xi_x" => 0,
            Tok::Ident(n) if n == "xi_t" => 1,
            Tok::Ident(n) if n == "phi" => 2,
            other => {
                return Err(ParseError::new(
                    format!("expected `xi_x`, `xi_t` or `phi`, found {}", describe(other)),
                    span,
                    src,
                ))
            }
        };
        if slots[slot].is_some() {
            return Err(ParseError::new("component assigned twice", span, src));
        }
        p.expect('=')?;
        let start = p.span().start;
        let e = p.expression()?;
        if let Some((_, o)) = e.node_refs().into_iter().find(|(_, o)| *o != Offset::new(0, 0)) {
            return Err(ParseError::new(
                format!("point field coefficients are local; shifted reference {o} is not allowed"),
                Span::new(start, p.span().start),
                src,
            ));
        }
        slots[slot] = Some(e);
        if !p.eat(';') {
            p.finish()?;
            break;
        }
    }
    if slots.iter().all(Option::is_none) {
        return Err(ParseError::new("empty point field", Span::new(0, src.len()), src));
    }
    let [a, b, c] = slots;
    Ok(PointFieldSource { xi_x: a.unwrap_or_else(zero), xi_t: b.unwrap_or_else(zero), phi: c.unwrap_or_else(zero) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_spans() {
        let e = parse_expression("u + * 2").unwrap_err();
        assert_eq!(e.span, Span::new(4, 5));
        let e = parse_expression("u[1,]").unwrap_err();
        assert_eq!(e.span, Span::new(4, 5));
        let e = parse_expression("sigma_x[1,0]").unwrap_err();
        assert!(e.message.contains("only x, t and u"));
        let e = parse_expression("(u + 1").unwrap_err();
        assert_eq!(e.span, Span::new(6, 6));
        let e = parse_expression("u $ 2").unwrap_err();
        assert_eq!(e.span, Span::new(2, 3));
        let e = parse_expression("u 2").unwrap_err();
        assert!(e.message.contains("after expression"));
        assert!(parse_expression("   ").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_expression("1.5e-1").unwrap(), Expr::Number(crate::scalar::rat(3, 20)));
        assert_eq!(parse_expression(".25").unwrap(), Expr::Number(crate::scalar::rat(1, 4)));
        // `2e` is the number 2 followed by the parameter `e`.
        assert!(parse_expression("2e").is_err());
    }

    #[test]
    fn point_fields() {
        let pf = parse_point_field("xi_x = x; xi_t = 2*t").unwrap();
        assert_eq!(pf.phi, Expr::Number(BigRational::from_integer(0.into())));
        assert!(matches!(pf.xi_x, Expr::Node(NodeVar::X, _)));
        let e = parse_point_field("phi = u[1,0]").unwrap_err();
        assert!(e.message.contains("local"));
        assert!(parse_point_field("phi = u; phi = x").is_err());
        assert!(parse_point_field("psi = u").is_err());
        assert!(parse_point_field("phi = u;").is_ok());
    }
}
