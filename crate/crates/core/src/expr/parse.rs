//! Recursive-descent parser.
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary minus, `^`.
//! `^` is right-associative and its exponent may carry its own unary minus,
//! so `-t^2` is `-(t^2)` and `2^-1` is `2^(-1)`.

use super::{BinaryOp, Expr, ExprError, UnaryOp, Var};

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser { src: text, pos: 0 };
    let expr = parser.expression()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expression(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinaryOp::Add
            } else if self.eat('-') {
                BinaryOp::Sub
            } else {
                return Ok(left);
            };
            let right = self.term()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinaryOp::Mul
            } else if self.eat('/') {
                BinaryOp::Div
            } else {
                return Ok(left);
            };
            let right = self.unary()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            let child = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, child));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expression()?;
                if !self.eat(')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |end: &mut usize| {
            let from = *end;
            while *end < bytes.len() && bytes[*end].is_ascii_digit() {
                *end += 1;
            }
            *end - from
        };
        let mut mantissa_digits = digits(&mut end);
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            mantissa_digits += digits(&mut end);
        }
        if mantissa_digits == 0 {
            return Err(self.syntax("malformed number"));
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp_end = end + 1;
            if exp_end < bytes.len() && (bytes[exp_end] == b'+' || bytes[exp_end] == b'-') {
                exp_end += 1;
            }
            if digits(&mut exp_end) == 0 {
                self.pos = exp_end;
                return Err(self.syntax("malformed exponent"));
            }
            end = exp_end;
        }
        let literal = &self.src[start..end];
        let value: f64 = literal.parse().map_err(|_| self.syntax("malformed number"))?;
        if !value.is_finite() {
            return Err(self.syntax("numeric literal out of range"));
        }
        self.pos = end;
        Ok(Expr::Constant(value))
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        let name = &self.src[start..start + len];
        self.pos += len;
        match name {
            "t" => Ok(Expr::Variable(Var::T)),
            "s" => Ok(Expr::Variable(Var::S)),
            "pi" => Ok(Expr::Pi),
            _ => match UnaryOp::from_function_name(name) {
                Some(op) => {
                    if !self.eat('(') {
                        return Err(self.syntax("expected `(` after function name"));
                    }
                    let arg = self.expression()?;
                    if !self.eat(')') {
                        return Err(self.syntax("expected `)`"));
                    }
                    Ok(Expr::unary(op, arg))
                }
                None => Err(ExprError::UnknownIdentifier {
                    name: name.to_owned(),
                    offset: start,
                }),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Expr {
        Expr::Constant(v)
    }
    fn t() -> Expr {
        Expr::Variable(Var::T)
    }
    fn s() -> Expr {
        Expr::Variable(Var::S)
    }

    #[test]
    fn left_associative_sum() {
        let e = parse("1 + t - s").unwrap();
        let expected = Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Add, c(1.0), t()), s());
        assert_eq!(e, expected);
    }

    #[test]
    fn right_associative_power() {
        let e = parse("t^4/108 - 25*t^3/81").unwrap();
        let first = Expr::binary(BinaryOp::Div, Expr::binary(BinaryOp::Pow, t(), c(4.0)), c(108.0));
        let second = Expr::binary(
            BinaryOp::Div,
            Expr::binary(BinaryOp::Mul, c(25.0), Expr::binary(BinaryOp::Pow, t(), c(3.0))),
            c(81.0),
        );
        assert_eq!(e, Expr::binary(BinaryOp::Sub, first, second));

        let tower = parse("2^3^2").unwrap();
        assert_eq!(tower.eval(0.0, 0.0).unwrap(), 512.0);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse("-t^2").unwrap().eval(3.0, 0.0).unwrap(), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(parse("-2*-3").unwrap().eval(0.0, 0.0).unwrap(), 6.0);
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e2").unwrap(), c(150.0));
        assert_eq!(parse("2E-3").unwrap(), c(0.002));
        assert_eq!(parse(".5").unwrap(), c(0.5));
        assert!(parse("1e").is_err());
        assert!(parse("1e999").is_err());
    }

    #[test]
    fn incomplete_input_reports_offset() {
        assert_eq!(
            parse("2 *"),
            Err(ExprError::Syntax {
                offset: 3,
                message: "unexpected end of input".into()
            })
        );
        assert!(matches!(parse("(t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("t t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("sin t"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn unknown_identifiers_rejected() {
        for (text, name, offset) in [
            ("x + 1", "x", 0),
            ("t * tan(s)", "tan", 4),
            ("2*pie", "pie", 2),
            ("log(t)", "log", 0),
        ] {
            assert_eq!(
                parse(text),
                Err(ExprError::UnknownIdentifier {
                    name: name.into(),
                    offset
                })
            );
        }
    }

    #[test]
    fn functions_and_constants() {
        let e = parse("sqrt(t) + cos(pi*s) - exp(ln(2))").unwrap();
        let v = e.eval(4.0, 1.0).unwrap();
        assert!((v - (2.0 - 1.0 - 2.0)).abs() < 1e-15);
    }
}
