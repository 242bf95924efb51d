//! Text grammar for polynomials in `z` and `u`:
//!
//! ```text
//! poly  := ('+'|'-')? term (('+'|'-') term)*
//! term  := coeff? ('*'? atom)*        (non-empty)
//! atom  := 'z' ('^' int)? | 'u' ('^' nat)?
//! coeff := nat ('/' nat)?
//! ```
//!
//! Whitespace is insignificant.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{BiLaurentPoly, ZUMonomial};
use crate::linalg::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {position}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(c) => format!("'{}'", c as char),
        };
        ParseError {
            position: self.pos,
            expected: expected.iter().map(ToString::to_string).collect(),
            found,
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Some(s.parse().expect("digit string"))
    }

    fn small_nat(&mut self, what: &str) -> Result<u32, ParseError> {
        let at = self.pos;
        let n = self.nat().ok_or_else(|| self.error(&[what]))?;
        u32::try_from(n).map_err(|_| ParseError {
            position: at,
            expected: vec![format!("{what} below 2^32")],
            found: "oversized exponent".into(),
        })
    }
}

pub(super) fn parse_poly(text: &str) -> Result<BiLaurentPoly, ParseError> {
    let mut cur = Cursor {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut out = BiLaurentPoly::zero();
    let mut negative = if cur.eat(b'-') {
        true
    } else {
        cur.eat(b'+');
        false
    };
    loop {
        let (m, c) = term(&mut cur)?;
        out.add_term(m, if negative { -c } else { c });
        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.pos += 1;
                negative = false;
            }
            Some(b'-') => {
                cur.pos += 1;
                negative = true;
            }
            Some(_) => return Err(cur.error(&["'+'", "'-'", "end of input"])),
        }
    }
    Ok(out)
}

fn term(cur: &mut Cursor) -> Result<(ZUMonomial, Rat), ParseError> {
    let mut coeff = Rat::from_integer(BigInt::from(1));
    let mut seen = false;
    let at = cur.pos;
    if let Some(n) = cur.nat() {
        seen = true;
        coeff = if cur.eat(b'/') {
            let d = cur.nat().ok_or_else(|| cur.error(&["denominator"]))?;
            if d.is_zero() {
                return Err(ParseError {
                    position: at,
                    expected: vec!["nonzero denominator".into()],
                    found: "0".into(),
                });
            }
            Rat::new(n, d)
        } else {
            Rat::from_integer(n)
        };
    }
    let mut mono = ZUMonomial::new(0, 0);
    loop {
        let star = seen && cur.eat(b'*');
        match cur.peek() {
            Some(b'z') => {
                cur.pos += 1;
                let k = if cur.eat(b'^') {
                    let neg = cur.eat(b'-');
                    let e = i64::from(cur.small_nat("integer exponent")?);
                    if neg {
                        -e
                    } else {
                        e
                    }
                } else {
                    1
                };
                mono.k += k;
            }
            Some(b'u') => {
                cur.pos += 1;
                let i = if cur.eat(b'^') {
                    cur.small_nat("non-negative exponent")?
                } else {
                    1
                };
                mono.i += i;
            }
            _ if star => return Err(cur.error(&["'z'", "'u'"])),
            _ if !seen => return Err(cur.error(&["coefficient", "'z'", "'u'"])),
            _ => break,
        }
        seen = true;
    }
    Ok((mono, coeff))
}
