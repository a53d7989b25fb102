//! Recursive-descent parser for the sequence grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*        division by constants only
//! unary   := '-' unary | primary
//! primary := number | 'n' | 'k' | 'log' | 'loglog' | '(' expr ')'
//!          | 'poly(' const ')' | 'exp(' const ')' | 'exp(' expr ')'
//!          | 'log(' expr ')' | 'pow(' expr ',' const ')'
//!          | 'max(' expr ',' expr ')' | 'cycle([' consts '])'
//!          | 'table([' consts ']' (',' 'tail' '=' expr)? ')'
//! ```
//!
//! `k` is an alias for `n`, for grade functions. `exp(c)` with a bare
//! constant is `e^{cn}`; write `exp((c))` for the constant `e^c`.

use num_rational::BigRational;
use num_traits::Zero;

use super::Seq;
use crate::error::{KdiamError, Result};
use crate::real::parse_rational;

pub fn parse(text: &str) -> Result<Seq> {
    let mut p = Parser { src: text, pos: 0 };
    let s = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(s)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> KdiamError {
        KdiamError::Parse {
            location: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Seq> {
        let mut parts = vec![self.term()?];
        loop {
            if self.eat('+') {
                parts.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                parts.push(Seq::scale(BigRational::from_integer((-1).into()), t));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Seq::sum(parts)
        })
    }

    fn term(&mut self) -> Result<Seq> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.peek() == Some('/') {
                let at = self.pos;
                self.pos += 1;
                match self.unary()? {
                    Seq::Const(c) if !c.is_zero() => factors.push(Seq::Const(c.recip())),
                    _ => {
                        self.pos = at;
                        return Err(self.error("division is only allowed by a nonzero constant"));
                    }
                }
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Seq::product(factors)
        })
    }

    fn unary(&mut self) -> Result<Seq> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Seq::scale(BigRational::from_integer((-1).into()), inner));
        }
        self.primary()
    }

    fn constant(&mut self) -> Result<BigRational> {
        let at = self.pos;
        match self.expr()? {
            Seq::Const(c) => Ok(c),
            _ => {
                self.pos = at;
                Err(self.error("expected a rational constant"))
            }
        }
    }

    fn constants(&mut self) -> Result<Vec<BigRational>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.constant()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn number(&mut self) -> Result<BigRational> {
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.rest()[..i];
        let v = parse_rational(text).map_err(|_| self.error("malformed number"))?;
        self.pos += i;
        Ok(v)
    }

    fn ident(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn primary(&mut self) -> Result<Seq> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.error("unexpected end of input")),
        };
        if c.is_ascii_digit() || c == '.' {
            return Ok(Seq::Const(self.number()?));
        }
        if c == '(' {
            self.pos += 1;
            let s = self.expr()?;
            self.expect(')')?;
            return Ok(s);
        }
        if !c.is_ascii_alphabetic() {
            return Err(self.error(&format!("unexpected character '{c}'")));
        }
        let at = self.pos;
        let name = self.ident();
        match name {
            "n" | "k" => Ok(Seq::identity()),
            "loglog" => Ok(Seq::LogLog),
            "log" => {
                if self.eat('(') {
                    let inner = self.expr()?;
                    self.expect(')')?;
                    Ok(Seq::log_of(inner))
                } else {
                    Ok(Seq::Log)
                }
            }
            "poly" => {
                self.expect('(')?;
                let s = self.constant()?;
                self.expect(')')?;
                Ok(Seq::poly(s))
            }
            "exp" => {
                self.expect('(')?;
                let wrapped = self.peek() == Some('(');
                let inner = self.expr()?;
                self.expect(')')?;
                match inner {
                    Seq::Const(c) if !wrapped => Ok(Seq::exp_linear(c)),
                    other => Ok(Seq::exp(other)),
                }
            }
            "pow" => {
                self.expect('(')?;
                let base = self.expr()?;
                self.expect(',')?;
                let e = self.constant()?;
                self.expect(')')?;
                Ok(Seq::pow(base, e))
            }
            "max" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(Seq::max(a, b))
            }
            "cycle" => {
                self.expect('(')?;
                let vs = self.constants()?;
                self.expect(')')?;
                if vs.is_empty() {
                    self.pos = at;
                    return Err(self.error("cycle needs at least one value"));
                }
                Ok(Seq::Cycle(vs))
            }
            "table" => {
                self.expect('(')?;
                let prefix = self.constants()?;
                let tail = if self.eat(',') {
                    self.skip_ws();
                    if self.ident() != "tail" {
                        return Err(self.error("expected 'tail='"));
                    }
                    self.expect('=')?;
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(')')?;
                if prefix.is_empty() && tail.is_none() {
                    self.pos = at;
                    return Err(self.error("empty table"));
                }
                Ok(Seq::table(prefix, tail))
            }
            other => {
                self.pos = at;
                Err(self.error(&format!("unknown name '{other}'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("poly(1)").unwrap(), Seq::identity());
        assert_eq!(parse("log").unwrap(), Seq::Log);
        assert_eq!(parse("exp(2)").unwrap(), Seq::ExpLinear(r("2")));
        assert_eq!(
            parse("1/2*poly(1)").unwrap(),
            Seq::scale(r("1/2"), Seq::identity())
        );
        assert_eq!(
            parse("max(log, poly(1/2))").unwrap(),
            Seq::max(Seq::Log, Seq::poly(r("1/2")))
        );
        let t = parse("table([1, 2.5], tail=2*n)").unwrap();
        assert_eq!(t.eval(1).unwrap().to_f64(), 2.5);
        assert_eq!(t.eval(4).unwrap().to_f64(), 8.0);
    }

    #[test]
    fn exp_of_constant_needs_parentheses() {
        assert_eq!(parse("exp(3)").unwrap(), Seq::ExpLinear(r("3")));
        assert_eq!(
            parse("exp((3))").unwrap(),
            Seq::Exp(Box::new(Seq::Const(r("3"))))
        );
        assert_eq!(parse("exp(2*n)").unwrap(), Seq::ExpLinear(r("2")));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("poly(1) + foo") {
            Err(KdiamError::Parse { location, .. }) => assert_eq!(location, 10),
            other => panic!("{other:?}"),
        }
        assert!(parse("n / n").is_err());
        assert!(parse("poly(n)").is_err());
        assert!(parse("").is_err());
        assert!(parse("(n").is_err());
    }

    fn leaf() -> impl Strategy<Value = Seq> {
        let q = (-6i64..7, 1i64..5).prop_map(|(a, b)| BigRational::new(a.into(), b.into()));
        prop_oneof![
            q.clone().prop_map(Seq::Const),
            q.clone().prop_map(Seq::poly),
            Just(Seq::Log),
            Just(Seq::LogLog),
            q.prop_map(Seq::exp_linear),
        ]
    }

    fn tree() -> impl Strategy<Value = Seq> {
        let q = (-6i64..7, 1i64..5).prop_map(|(a, b)| BigRational::new(a.into(), b.into()));
        leaf().prop_recursive(3, 16, 3, move |inner| {
            prop_oneof![
                (q.clone(), inner.clone()).prop_map(|(c, s)| Seq::scale(c, s)),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Seq::sum),
                prop::collection::vec(inner.clone(), 2..3).prop_map(Seq::product),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Seq::max(a, b)),
                inner.clone().prop_map(Seq::exp),
                inner.clone().prop_map(Seq::log_of),
                (inner.clone(), q.clone()).prop_map(|(s, e)| Seq::pow(s, e)),
                (prop::collection::vec(q.clone(), 1..4), inner)
                    .prop_map(|(p, t)| Seq::table(p, Some(t))),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(s in tree()) {
            let text = s.to_string();
            let back = parse(&text).unwrap();
            prop_assert_eq!(back, s, "text was {}", text);
        }
    }
}
