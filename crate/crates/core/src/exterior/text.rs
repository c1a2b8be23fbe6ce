//! Canonical text for polynomials and forms, and a parser that reads it back.
//!
//! Forms are written as signed terms `coeff*name∧name`; polynomial
//! coefficients with more than one term are parenthesised. The parser
//! accepts the same syntax plus arbitrary nesting: `*` and `∧` are both the
//! exterior product, `^` raises a 0-form to an integer power, `/` divides by
//! a nonzero constant.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::coframe::Coframe;
use super::form::ExteriorForm;
use super::poly::Poly;
use super::rational::{format_rational, Rational};
use super::Error;

pub fn render_form(form: &ExteriorForm, cf: &Coframe) -> String {
    if form.degree() == 0 {
        return form.as_scalar().map(|p| p.to_string()).unwrap_or_default();
    }
    if form.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (key, p)) in form.terms().enumerate() {
        let names: Vec<&str> = key.iter().map(|&i| cf.name(i as usize)).collect();
        let names = names.join("∧");
        let (neg, body) = if let Some(c) = p.constant_value() {
            let mag = c.abs();
            let body = if mag.is_one() {
                names
            } else {
                format!("{}*{names}", format_rational(&mag))
            };
            (c.is_negative(), body)
        } else if p.len() == 1 {
            let (m, c) = p.leading().expect("one term");
            let mag = c.abs();
            let body = if mag.is_one() {
                format!("{m}*{names}")
            } else {
                format!("{}*{m}*{names}", format_rational(&mag))
            };
            (c.is_negative(), body)
        } else {
            (false, format!("({p})*{names}"))
        };
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, Error> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '∧' => {
                out.push(Tok::Wedge);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push(Tok::Num(lit.parse().map_err(|_| Error::Parse(lit.clone()))?));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    cf: &'a Coframe,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ExteriorForm, Error> {
        let mut acc: Option<ExteriorForm> = None;
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    false
                }
                Some(Tok::Minus) => {
                    self.bump();
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            let t = if neg { t.neg() } else { t };
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        acc.ok_or_else(|| Error::Parse("empty expression".into()))
    }

    fn term(&mut self) -> Result<ExteriorForm, Error> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) | Some(Tok::Wedge) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.wedge(&rhs)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    let c = rhs
                        .as_scalar()
                        .ok()
                        .and_then(|p| p.constant_value())
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| Error::Parse("division by a non-constant or zero".into()))?;
                    acc = acc.scale_rat(&(Rational::one() / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ExteriorForm, Error> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExteriorForm, Error> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let Some(Tok::Num(n)) = self.bump() else {
                return Err(Error::Parse("exponent must be a nonnegative integer".into()));
            };
            let e: u32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
            let p = base
                .as_scalar()
                .map_err(|_| Error::Parse("only 0-forms can be raised to a power".into()))?;
            return Ok(ExteriorForm::scalar(self.cf.tag(), p.pow(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExteriorForm, Error> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(ExteriorForm::scalar(self.cf.tag(), Poly::constant(Rational::from_integer(n)))),
            Some(Tok::Ident(name)) => {
                if self.cf.contains(&name) {
                    self.cf.form(&name)
                } else {
                    Ok(ExteriorForm::scalar(self.cf.tag(), Poly::var(&name)))
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_form(text: &str, cf: &Coframe) -> Result<ExteriorForm, Error> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, cf };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {text:?}")));
    }
    Ok(f)
}

pub fn parse_poly(text: &str) -> Result<Poly, Error> {
    let empty: [&str; 0] = [];
    let cf = Coframe::closed(&empty)?;
    parse_form(text, &cf)?.as_scalar()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip() {
        for s in ["0", "-1/2", "a1*b3 - 2*b4^2 + 7", "x^2*y - 3/4*y"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(parse_poly("(a+1)*(a-1)").unwrap().to_string(), "a^2 - 1");
    }

    #[test]
    fn form_render_and_parse() {
        let cf = Coframe::closed(&["A1", "A2", "w1"]).unwrap();
        let f = cf.parse("-w1∧A1 + (a1 - b2)*A1∧A2 - 3*b1*A2∧w1").unwrap();
        let s = cf.render(&f);
        assert_eq!(s, "(a1 - b2)*A1∧A2 + A1∧w1 - 3*b1*A2∧w1");
        assert_eq!(cf.parse(&s).unwrap(), f);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("a +").is_err());
        assert!(parse_poly("a $ b").is_err());
        assert!(parse_poly("a / b").is_err());
    }
}
