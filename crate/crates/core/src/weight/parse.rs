//! Recursive-descent parser for the weight mini-language:
//!
//! ```text
//! spec := pow(<num>) | expinv(<num>,<+|->) | scale(<num>,<spec>)
//!       | prod(<spec>,<spec>) | table(<csv-path>)
//! ```

use super::{Family, Sign, Table};
use crate::error::{Error, Result};

pub fn parse_family(text: &str) -> Result<Family> {
    let mut p = Parser { src: text, pos: 0 };
    let family = p.spec()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    family.validate().map_err(|e| match e {
        Error::Spec(msg) => Error::Parse { pos: 0, msg },
        other => other,
    })?;
    Ok(family)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a weight name (pow, expinv, scale, prod, table)"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(rest.len());
        let text = &rest[..len];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(format!("expected a number, found '{text}'")))?;
        self.pos += len;
        Ok(value)
    }

    fn sign(&mut self) -> Result<Sign> {
        self.skip_ws();
        let sign = match self.rest().chars().next() {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return Err(self.error("expected '+' or '-'")),
        };
        self.pos += 1;
        Ok(sign)
    }

    fn spec(&mut self) -> Result<Family> {
        let start = self.pos;
        let name = self.ident()?;
        self.expect('(')?;
        let family = match name {
            "pow" => Family::power(self.number()?),
            "expinv" => {
                let alpha = self.number()?;
                self.expect(',')?;
                Family::exp_inv_power(self.sign()?, alpha)
            }
            "scale" => {
                let c = self.number()?;
                self.expect(',')?;
                Family::scale(c, self.spec()?)
            }
            "prod" => {
                let l = self.spec()?;
                self.expect(',')?;
                Family::product(l, self.spec()?)
            }
            "table" => {
                self.skip_ws();
                let rest = self.rest();
                let len = rest.find(')').ok_or_else(|| self.error("unterminated table path"))?;
                let path = rest[..len].trim();
                if path.is_empty() {
                    return Err(self.error("empty table path"));
                }
                let table = Table::from_csv(path).map_err(|e| Error::Parse {
                    pos: self.pos,
                    msg: e.to_string(),
                })?;
                self.pos += len;
                Family::Table(table)
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unknown weight '{other}'"),
                })
            }
        };
        self.expect(')')?;
        Ok(family)
    }
}

/// Renders a parse error with a caret under the offending position.
pub fn annotate(text: &str, pos: usize) -> String {
    let pos = pos.min(text.len());
    format!("  {text}\n  {}^", " ".repeat(text[..pos].chars().count()))
}
