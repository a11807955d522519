//! Recursive-descent expression parser.
//!
//! Grammar (UTF-8, ASCII identifiers):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' unary)*          -- exponent must be a rational constant
//! primary  := number | '(' expr ')' | name args? | name jet-suffix
//! args     := '(' expr (',' expr)* ')'
//! number   := digits
//! jet-suffix := '_' (letters | '{' dir (',' dir)* '}')
//! ```
//!
//! `Diff(u, x, t)` builds the jet coordinate `u_{xt}`, `Int(g, u)` the formal
//! antiderivative.  Rational constants arise from division, e.g. `1/2`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Expr, ElemFn, SymbolTable};
use crate::error::{Error, Result};

/// What a bare name resolves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolKind {
    /// Independent variable, parameter, or other plain symbol.
    Symbol,
    /// Dependent variable; jet subscripts attach to it.
    Dependent,
    /// Opaque function of the given arity.
    Opaque(usize),
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    table: &'a dyn SymbolTable,
}

pub(crate) fn parse(text: &str, table: &dyn SymbolTable) -> Result<Expr> {
    let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0, table };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && (self.bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = Expr::div(acc, rhs).map_err(|_| self.err("division by zero"))?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exp_expr = self.unary()?;
            let q = constant_rational(&exp_expr).ok_or_else(|| Error::Parse {
                offset: at,
                msg: "exponent must be a rational constant".to_string(),
            })?;
            return Ok(Expr::powq(base, q));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            _ => Err(self.err("expected a number, name, or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits = &self.src[start..self.pos];
        self.skip_ws();
        let n: BigInt = digits.parse().map_err(|_| self.err("invalid integer"))?;
        Ok(Expr::Rat(BigRational::from_integer(n)))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn name(&mut self) -> Result<Expr> {
        let at = self.pos;
        let name = self.ident();

        // Formal-derivative subscript on an opaque function: F_{1,2}(a, b).
        if self.peek() == Some(b'_') && matches!(self.table.classify(&name), Some(SymbolKind::Opaque(_))) {
            self.pos += 1;
            let slots = self.deriv_slots()?;
            self.skip_ws();
            let args = self.call_args()?;
            self.check_arity(&name, args.len(), at)?;
            return Ok(Expr::opaque_deriv(&name, args, slots));
        }

        // Jet subscript on a dependent variable: u_x, u_{xt}, u_{x,t}.
        if self.peek() == Some(b'_') {
            if !matches!(self.table.classify(&name), Some(SymbolKind::Dependent)) {
                return Err(Error::UnknownSymbol(format!("{name}_..: `{name}` is not a dependent variable")));
            }
            self.pos += 1;
            let dirs = self.jet_dirs()?;
            self.skip_ws();
            return Ok(Expr::jet(&name, dirs));
        }

        self.skip_ws();
        if self.peek() == Some(b'(') {
            // Built-in call forms first.
            match name.as_str() {
                "Diff" => {
                    let args = self.raw_args()?;
                    return self.build_diff(args, at);
                }
                "Int" => {
                    let args = self.call_args()?;
                    if args.len() != 2 {
                        return Err(Error::Parse { offset: at, msg: "Int takes (integrand, var)".into() });
                    }
                    let mut it = args.into_iter();
                    let g = it.next().unwrap();
                    let v = it.next().unwrap();
                    if !matches!(v, Expr::Sym(_) | Expr::Jet { .. }) {
                        return Err(Error::Parse { offset: at, msg: "Int variable must be a symbol or jet coordinate".into() });
                    }
                    return Ok(Expr::antideriv(g, v));
                }
                _ => {}
            }
            if let Some(f) = ElemFn::from_name(&name) {
                let args = self.call_args()?;
                if args.len() != f.arity() {
                    return Err(Error::Parse {
                        offset: at,
                        msg: format!("{} takes {} argument(s)", f.name(), f.arity()),
                    });
                }
                return Ok(Expr::Elem(f, args));
            }
            match self.table.classify(&name) {
                Some(SymbolKind::Opaque(_)) => {
                    let args = self.call_args()?;
                    self.check_arity(&name, args.len(), at)?;
                    Ok(Expr::opaque(&name, args))
                }
                _ => Err(Error::UnknownSymbol(format!("unknown function `{name}`"))),
            }
        } else {
            match self.table.classify(&name) {
                Some(SymbolKind::Symbol) => Ok(Expr::sym(&name)),
                Some(SymbolKind::Dependent) => Ok(Expr::var(&name)),
                Some(SymbolKind::Opaque(_)) => {
                    Err(Error::UnknownSymbol(format!("opaque function `{name}` needs arguments")))
                }
                None => Err(Error::UnknownSymbol(name)),
            }
        }
    }

    fn check_arity(&self, name: &str, got: usize, at: usize) -> Result<()> {
        if let Some(SymbolKind::Opaque(arity)) = self.table.classify(name) {
            if got != arity {
                return Err(Error::Parse {
                    offset: at,
                    msg: format!("`{name}` takes {arity} argument(s), got {got}"),
                });
            }
        }
        Ok(())
    }

    fn call_args(&mut self) -> Result<Vec<Expr>> {
        self.raw_args()
    }

    fn raw_args(&mut self) -> Result<Vec<Expr>> {
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(args)
    }

    fn build_diff(&mut self, args: Vec<Expr>, at: usize) -> Result<Expr> {
        if args.len() < 2 {
            return Err(Error::Parse { offset: at, msg: "Diff takes (dep, dir, ...)".into() });
        }
        let (head, dirs) = args.split_first().unwrap();
        let var = match head {
            Expr::Jet { var, index } if index.is_empty() => var.clone(),
            _ => {
                return Err(Error::Parse {
                    offset: at,
                    msg: "first argument of Diff must be a dependent variable".into(),
                })
            }
        };
        let known = self.table.directions();
        let mut names = Vec::new();
        for d in dirs {
            match d {
                Expr::Sym(s) if known.contains(s) => names.push(s.clone()),
                _ => {
                    return Err(Error::Parse {
                        offset: at,
                        msg: "Diff directions must be independent variables".into(),
                    })
                }
            }
        }
        Ok(Expr::jet(&var, names))
    }

    /// Directions after `_`: either a run of letters (single-char directions)
    /// or `{ ... }` with optional commas.
    fn jet_dirs(&mut self) -> Result<Vec<String>> {
        let known = self.table.directions();
        if self.eat(b'{') {
            let mut dirs = Vec::new();
            loop {
                let d = self.ident();
                if d.is_empty() {
                    return Err(self.err("expected a direction name"));
                }
                self.split_push(&d, &known, &mut dirs)?;
                self.skip_ws();
                if self.eat(b',') {
                    continue;
                }
                self.expect(b'}')?;
                break;
            }
            Ok(dirs)
        } else {
            let d = self.ident();
            if d.is_empty() {
                return Err(self.err("expected a direction name after `_`"));
            }
            let mut dirs = Vec::new();
            self.split_push(&d, &known, &mut dirs)?;
            Ok(dirs)
        }
    }

    /// A bare suffix like `xt` is a sequence of single-char directions when
    /// all letters are directions; otherwise it must name one direction.
    fn split_push(&self, s: &str, known: &[String], out: &mut Vec<String>) -> Result<()> {
        if known.iter().any(|k| k == s) {
            out.push(s.to_string());
            return Ok(());
        }
        let chars: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        if chars.iter().all(|c| known.iter().any(|k| k == c)) {
            out.extend(chars);
            return Ok(());
        }
        Err(Error::UnknownSymbol(format!("unknown direction `{s}`")))
    }

    fn deriv_slots(&mut self) -> Result<Vec<usize>> {
        self.expect(b'{')?;
        let mut slots = Vec::new();
        loop {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a slot number"));
            }
            let n: usize = self.src[start..self.pos]
                .parse()
                .map_err(|_| self.err("invalid slot number"))?;
            if n == 0 {
                return Err(self.err("slots are 1-based"));
            }
            slots.push(n - 1);
            self.skip_ws();
            if self.eat(b',') {
                continue;
            }
            self.expect(b'}')?;
            break;
        }
        Ok(slots)
    }
}

fn constant_rational(e: &Expr) -> Option<BigRational> {
    match e.normalize() {
        Expr::Rat(q) => Some(q),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetContext;

    fn ctx() -> JetContext {
        JetContext::builder()
            .independent(["x", "t"])
            .dependent(["u", "v"])
            .opaque("F", 1)
            .opaque("G", 1)
            .build()
            .unwrap()
    }

    #[test]
    fn basic_forms() {
        let c = ctx();
        let e = Expr::parse("u_t + u*u_x", &c).unwrap();
        let expected = Expr::add(
            Expr::jet("u", ["t"]),
            Expr::mul(Expr::var("u"), Expr::jet("u", ["x"])),
        );
        assert!(Expr::equivalent(&e, &expected));

        let e = Expr::parse("(1/2)*v^2", &c).unwrap();
        let expected = Expr::mul(Expr::rat(1, 2), Expr::powi(Expr::var("v"), 2));
        assert!(Expr::equivalent(&e, &expected));

        let e = Expr::parse("F(u)*u_x + G(u)", &c).unwrap();
        let expected = Expr::add(
            Expr::mul(
                Expr::opaque("F", vec![Expr::var("u")]),
                Expr::jet("u", ["x"]),
            ),
            Expr::opaque("G", vec![Expr::var("u")]),
        );
        assert!(Expr::equivalent(&e, &expected));
    }

    #[test]
    fn jet_subscripts() {
        let c = ctx();
        assert_eq!(
            Expr::parse("u_{xt}", &c).unwrap(),
            Expr::jet("u", ["x", "t"])
        );
        assert_eq!(
            Expr::parse("u_{x,t}", &c).unwrap(),
            Expr::parse("Diff(u,t,x)", &c).unwrap()
        );
    }

    #[test]
    fn errors_carry_position() {
        let c = ctx();
        match Expr::parse("u_t + ) v", &c) {
            Err(Error::Parse { offset, .. }) => assert!(offset >= 6),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            Expr::parse("u + q", &c),
            Err(Error::UnknownSymbol(_))
        ));
    }
}
