//! Laurent-polynomial expressions in `z` and `w` with complex literals.
//!
//! Supported: `+ - * / ^`, parentheses, decimal and scientific literals, an
//! `i` suffix for imaginary parts (`1.5+2i`, `0.3i`). Division only by a
//! constant or a power of z; `w` powers must stay non-negative. Anything
//! richer has to arrive as a series file.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Monomial map: (z power, w power) -> coefficient.
pub type PolyMap = BTreeMap<(i32, usize), Complex64>;

const MAX_EXPANDED_POWER: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(Complex64),
    Z,
    W,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        match c {
            ' ' | '\t' | '\n' | '\r' => pos += 1,
            '+' => {
                out.push(Token::Plus);
                pos += 1;
            }
            '-' => {
                out.push(Token::Minus);
                pos += 1;
            }
            '*' => {
                out.push(Token::Star);
                pos += 1;
            }
            '/' => {
                out.push(Token::Slash);
                pos += 1;
            }
            '^' => {
                out.push(Token::Caret);
                pos += 1;
            }
            '(' => {
                out.push(Token::LParen);
                pos += 1;
            }
            ')' => {
                out.push(Token::RParen);
                pos += 1;
            }
            'z' => {
                out.push(Token::Z);
                pos += 1;
            }
            'w' => {
                out.push(Token::W);
                pos += 1;
            }
            'i' => {
                out.push(Token::Num(Complex64::new(0.0, 1.0)));
                pos += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = pos;
                while pos < chars.len() && (chars[pos].is_ascii_digit() || chars[pos] == '.') {
                    pos += 1;
                }
                if pos < chars.len() && (chars[pos] == 'e' || chars[pos] == 'E') {
                    let mut ahead = pos + 1;
                    if ahead < chars.len() && (chars[ahead] == '+' || chars[ahead] == '-') {
                        ahead += 1;
                    }
                    if ahead < chars.len() && chars[ahead].is_ascii_digit() {
                        pos = ahead;
                        while pos < chars.len() && chars[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let text: String = chars[start..pos].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| format!("bad number `{text}` at offset {start}"))?;
                if pos < chars.len() && chars[pos] == 'i' {
                    pos += 1;
                    out.push(Token::Num(Complex64::new(0.0, value)));
                } else {
                    out.push(Token::Num(Complex64::new(value, 0.0)));
                }
            }
            other => return Err(format!("unexpected character `{other}` at offset {pos}")),
        }
    }
    Ok(out)
}

fn add_term(poly: &mut PolyMap, key: (i32, usize), value: Complex64) {
    let slot = poly.entry(key).or_insert(Complex64::ZERO);
    *slot += value;
    if *slot == Complex64::ZERO {
        poly.remove(&key);
    }
}

fn add(mut a: PolyMap, b: &PolyMap) -> PolyMap {
    for (&key, &value) in b {
        add_term(&mut a, key, value);
    }
    a
}

fn negate(mut a: PolyMap) -> PolyMap {
    for value in a.values_mut() {
        *value = -*value;
    }
    a
}

fn mul(a: &PolyMap, b: &PolyMap) -> Result<PolyMap, String> {
    let mut out = PolyMap::new();
    for (&(ja, ka), &ca) in a {
        for (&(jb, kb), &cb) in b {
            add_term(&mut out, (ja + jb, ka + kb), ca * cb);
        }
    }
    Ok(out)
}

/// Division by a single term with no w part: constants and powers of z.
fn div(a: &PolyMap, b: &PolyMap) -> Result<PolyMap, String> {
    if b.len() != 1 {
        return Err("can only divide by a constant or a power of z".into());
    }
    let (&(jb, kb), &cb) = b.iter().next().unwrap();
    if kb != 0 {
        return Err("cannot divide by an expression involving w".into());
    }
    if cb == Complex64::ZERO {
        return Err("division by zero".into());
    }
    let mut out = PolyMap::new();
    for (&(j, k), &c) in a {
        add_term(&mut out, (j - jb, k), c / cb);
    }
    Ok(out)
}

fn pow(base: &PolyMap, exp: i64) -> Result<PolyMap, String> {
    if base.len() == 1 {
        let (&(j, k), &c) = base.iter().next().unwrap();
        let wk = k as i64 * exp;
        if wk < 0 {
            return Err("a power of w cannot be negative".into());
        }
        let zj = j as i64 * exp;
        if zj.unsigned_abs() > i32::MAX as u64 {
            return Err(format!("exponent {exp} overflows the z index"));
        }
        let ce = if exp >= 0 {
            c.powu(exp as u32)
        } else {
            c.powi(exp as i32)
        };
        let mut out = PolyMap::new();
        add_term(&mut out, (zj as i32, wk as usize), ce);
        return Ok(out);
    }
    if exp < 0 {
        return Err("negative powers only apply to single terms".into());
    }
    if exp > MAX_EXPANDED_POWER {
        return Err(format!("power {exp} is too large to expand"));
    }
    let mut out = PolyMap::new();
    add_term(&mut out, (0, 0), Complex64::ONE);
    for _ in 0..exp {
        out = mul(&out, base)?;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<PolyMap, String> {
        let mut negated = false;
        match self.peek() {
            Some(Token::Minus) => {
                negated = true;
                self.pos += 1;
            }
            Some(Token::Plus) => {
                self.pos += 1;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negated {
            acc = negate(acc);
        }
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = add(acc, &rhs);
                }
                Token::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = add(acc, &negate(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyMap, String> {
        let mut acc = self.power()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Star => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    acc = mul(&acc, &rhs)?;
                }
                Token::Slash => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    acc = div(&acc, &rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<PolyMap, String> {
        let base = self.atom()?;
        if self.peek() != Some(Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let mut sign = 1i64;
        if self.peek() == Some(Token::Minus) {
            sign = -1;
            self.pos += 1;
        }
        match self.bump() {
            Some(Token::Num(c)) if c.im == 0.0 && c.re.fract() == 0.0 => {
                pow(&base, sign * c.re as i64)
            }
            other => Err(format!("expected an integer exponent, got {other:?}")),
        }
    }

    fn atom(&mut self) -> Result<PolyMap, String> {
        match self.bump() {
            Some(Token::Num(c)) => {
                let mut out = PolyMap::new();
                add_term(&mut out, (0, 0), c);
                Ok(out)
            }
            Some(Token::Z) => {
                let mut out = PolyMap::new();
                add_term(&mut out, (1, 0), Complex64::ONE);
                Ok(out)
            }
            Some(Token::W) => {
                let mut out = PolyMap::new();
                add_term(&mut out, (0, 1), Complex64::ONE);
                Ok(out)
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err("unclosed parenthesis".into()),
                }
            }
            other => Err(format!("expected a value, got {other:?}")),
        }
    }
}

pub fn parse_poly(src: &str) -> Result<PolyMap, String> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut parser = Parser { tokens, pos: 0 };
    let poly = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(format!(
            "trailing tokens starting at {:?}",
            parser.tokens[parser.pos]
        ));
    }
    Ok(poly)
}
