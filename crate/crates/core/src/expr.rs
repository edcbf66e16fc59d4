//! Text syntax for classes.
//!
//! ```text
//! expr    := term { "+" term }
//! term    := [int "*"] factor { "*" factor } | int
//! factor  := segment | atom | cycle | "(" expr ")"
//! segment := "[" int "," int "]"
//! cycle   := "C(" atom ")"
//! atom    := NAME | "nu^" int [ "*" NAME ]
//! ```
//!
//! `+` is direct sum and `*` is the semisimple tensor product. A bare integer
//! `n` is `n` copies of the trivial atom, so `0` is the zero class.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::deligne_algebra::{Core, DeligneClass, Indec};
use crate::error::{Error, Result};
use crate::weil_model::{AtomId, WeilModel};

pub fn parse_class(model: &WeilModel, text: &str) -> Result<DeligneClass> {
    let mut p = Parser { model, src: text.as_bytes(), pos: 0 };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(x)
}

/// Parses a single atom name such as `nu^1*t1`.
pub fn parse_atom(model: &WeilModel, text: &str) -> Result<AtomId> {
    let mut p = Parser { model, src: text.as_bytes(), pos: 0 };
    let a = p.atom()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(a)
}

pub fn format_indec(model: &WeilModel, i: &Indec) -> String {
    match i.core {
        Core::Atom(a) if i.len == 1 => model.name(a).to_string(),
        Core::Atom(a) => match model.nu_power(a) {
            Some(k) => format!("[{},{}]", k, k + i.len as usize - 1),
            None => format!("[0,{}]*{}", i.len - 1, model.name(a)),
        },
        Core::Cycle(z) if i.len == 1 => format!("C({})", model.name(z)),
        Core::Cycle(z) => format!("[0,{}]*C({})", i.len - 1, model.name(z)),
    }
}

pub fn format_class(model: &WeilModel, x: &DeligneClass) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.parts()
        .map(|(i, n)| {
            let s = format_indec(model, i);
            if n == 1 {
                s
            } else {
                format!("{n}*{s}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Signed sum with every coefficient written out: `2*[0,1] - 1*nu^1`.
pub fn format_linear<'a>(
    model: &WeilModel,
    terms: impl IntoIterator<Item = (&'a Indec, &'a BigInt)>,
) -> String {
    let mut out = String::new();
    for (i, c) in terms {
        if c.is_zero() {
            continue;
        }
        let body = format!("{}*{}", c.abs(), format_indec(model, i));
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

struct Parser<'a> {
    model: &'a WeilModel,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.src[self.pos..].iter().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        self.pos += digits;
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        let ok_first = |c: u8| c.is_ascii_alphabetic() || c == b'_';
        if !self.src.get(self.pos).copied().is_some_and(ok_first) {
            return Err(self.error("expected an atom name"));
        }
        self.pos += 1;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn expr(&mut self) -> Result<DeligneClass> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc.direct_sum(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DeligneClass> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = acc.tensor(&f, self.model)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DeligneClass> {
        match self.peek() {
            // n copies of the trivial atom
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let n = u64::try_from(self.int()?)
                    .map_err(|_| Error::Parse { pos: start, msg: "multiplicity out of range".into() })?;
                Ok(DeligneClass::single(Indec::atom(1, self.model.trivial())).scale(n))
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.int()?;
                self.expect(b',')?;
                let b = self.int()?;
                self.expect(b']')?;
                if b < a {
                    return Err(self.error("empty segment"));
                }
                let len = u32::try_from(b - a + 1).map_err(|_| self.error("segment too long"))?;
                Ok(DeligneClass::single(Indec::segment(self.model, a, len, self.model.trivial())))
            }
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(b')')?;
                Ok(x)
            }
            _ if self.starts_with("C(") => {
                self.pos += 2;
                let a = self.atom()?;
                self.expect(b')')?;
                Ok(DeligneClass::single(Indec::cycle(self.model, 1, a)))
            }
            Some(_) => Ok(DeligneClass::single(Indec::atom(1, self.atom()?))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn atom(&mut self) -> Result<AtomId> {
        if self.starts_with("nu^") {
            self.pos += 3;
            let j = self.int()?;
            let save = self.pos;
            if self.eat(b'*')
                && self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == b'_')
                && !self.starts_with("C(")
                && !self.starts_with("nu^")
            {
                let name = self.ident()?.to_string();
                let full = format!("nu^{j}*{name}");
                if let Ok(a) = self.model.atom_by_name(&full) {
                    return Ok(a);
                }
                let base = self.model.atom_by_name(&name)?;
                return Ok(self.model.twist_pow(base, j));
            }
            self.pos = save;
            return Ok(self.model.twist_pow(self.model.trivial(), j));
        }
        let model = self.model;
        let name = self.ident()?;
        model.atom_by_name(name)
    }
}
