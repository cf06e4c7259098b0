//! Reader and canonical printer for the scale-spec text format:
//!
//! ```text
//! union(interval(0,1), points(2, 3.5), geometric(q=0.5, c=1), harmonic(c=1, offset=2))
//! ```
//!
//! A single piece may be written without the `union(...)` wrapper.
//! Whitespace is insignificant. An `offset=` argument shifts any piece kind;
//! `first=` selects the starting index of a harmonic cluster.

use super::fmt_float;
use crate::error::{Error, Result};
use crate::scale::{Piece, TimeScale};

pub fn parse_scale(text: &str) -> Result<TimeScale> {
    let mut p = Reader { bytes: text.as_bytes(), pos: 0 };
    let mut pieces = Vec::new();
    p.skip_ws();
    if p.looking_at("union") {
        p.pos += 5;
        p.expect(b'(')?;
        loop {
            pieces.push(p.piece()?);
            if !p.eat(b',') {
                break;
            }
        }
        p.expect(b')')?;
    } else {
        pieces.push(p.piece()?);
    }
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.err("end of input"));
    }
    TimeScale::new(pieces)
}

pub fn print_scale(scale: &TimeScale) -> String {
    let parts: Vec<String> = scale.pieces().iter().map(print_piece).collect();
    if parts.len() == 1 {
        parts.into_iter().next().expect("nonempty")
    } else {
        format!("union({})", parts.join(", "))
    }
}

fn print_piece(p: &Piece) -> String {
    match p {
        Piece::Interval { lo, hi } => format!("interval({}, {})", fmt_float(*lo), fmt_float(*hi)),
        Piece::Points(v) => {
            let items: Vec<String> = v.iter().map(|x| fmt_float(*x)).collect();
            format!("points({})", items.join(", "))
        }
        Piece::Geometric { q, c, offset } => {
            let mut s = format!("geometric(q={}, c={}", fmt_float(*q), fmt_float(*c));
            if *offset != 0.0 {
                s.push_str(&format!(", offset={}", fmt_float(*offset)));
            }
            s.push(')');
            s
        }
        Piece::Harmonic { c, offset, first } => {
            let mut s = format!("harmonic(c={}", fmt_float(*c));
            if *offset != 0.0 {
                s.push_str(&format!(", offset={}", fmt_float(*offset)));
            }
            if *first > 1 {
                s.push_str(&format!(", first={first}"));
            }
            s.push(')');
            s
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

#[derive(Default)]
struct Args {
    positional: Vec<f64>,
    named: Vec<(String, f64)>,
}

impl Args {
    fn named(&self, key: &str) -> Option<f64> {
        self.named.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn check_keys(&self, allowed: &[&str], at: usize) -> Result<()> {
        for (k, _) in &self.named {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Syntax {
                    position: at,
                    expected: format!("one of the arguments {allowed:?}, not `{k}`"),
                });
            }
        }
        Ok(())
    }
}

impl<'a> Reader<'a> {
    fn err(&self, expected: &str) -> Error {
        Error::Syntax { position: self.pos + 1, expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn looking_at(&mut self, word: &str) -> bool {
        self.skip_ws();
        self.bytes[self.pos..].starts_with(word.as_bytes())
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(self.err(&format!("`{}`", byte as char)))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 32) == b'e' {
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| Error::Syntax { position: start + 1, expected: "a number".into() })
    }

    fn args(&mut self) -> Result<Args> {
        let mut out = Args::default();
        self.expect(b'(')?;
        if self.eat(b')') {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            if self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphabetic())
            {
                let key = self.ident();
                self.expect(b'=')?;
                let v = self.number()?;
                out.named.push((key, v));
            } else {
                out.positional.push(self.number()?);
            }
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn piece(&mut self) -> Result<Piece> {
        self.skip_ws();
        let at = self.pos + 1;
        let name = self.ident();
        let args = self.args()?;
        let offset = args.named("offset").unwrap_or(0.0);
        match name.as_str() {
            "interval" => {
                args.check_keys(&["offset"], at)?;
                if args.positional.len() != 2 {
                    return Err(Error::Syntax {
                        position: at,
                        expected: "interval(lo, hi)".into(),
                    });
                }
                Ok(Piece::interval(args.positional[0] + offset, args.positional[1] + offset))
            }
            "points" => {
                args.check_keys(&["offset"], at)?;
                if args.positional.is_empty() {
                    return Err(Error::Syntax {
                        position: at,
                        expected: "points(x1, ...)".into(),
                    });
                }
                Ok(Piece::points(args.positional.iter().map(|x| x + offset).collect()))
            }
            "geometric" => {
                args.check_keys(&["q", "c", "offset"], at)?;
                let q = args.named("q").ok_or_else(|| Error::Syntax {
                    position: at,
                    expected: "geometric(q=..., c=...)".into(),
                })?;
                let c = args.named("c").ok_or_else(|| Error::Syntax {
                    position: at,
                    expected: "geometric(q=..., c=...)".into(),
                })?;
                Ok(Piece::geometric_at(q, c, offset))
            }
            "harmonic" => {
                args.check_keys(&["c", "offset", "first"], at)?;
                let c = args.named("c").ok_or_else(|| Error::Syntax {
                    position: at,
                    expected: "harmonic(c=...)".into(),
                })?;
                let first = args.named("first").unwrap_or(1.0);
                if first < 1.0 || first.fract() != 0.0 {
                    return Err(Error::Syntax {
                        position: at,
                        expected: "an integer first >= 1".into(),
                    });
                }
                Ok(Piece::Harmonic { c, offset, first: first as u64 })
            }
            other => Err(Error::Syntax {
                position: at,
                expected: format!(
                    "a piece kind (interval, points, geometric, harmonic), not `{other}`"
                ),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_spec() {
        let t = parse_scale(
            "union(interval(0,1), points(2, 3.5), geometric(q=0.5, c=1, offset=5), harmonic(c=1, offset=8))",
        )
        .unwrap();
        assert_eq!(t.pieces().len(), 4);
    }

    #[test]
    fn single_piece_without_union() {
        let t = parse_scale("interval(0, 1)").unwrap();
        assert_eq!(t.pieces(), &[Piece::Interval { lo: 0.0, hi: 1.0 }]);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_scale("union(points(0,1,2),interval(3,4))").unwrap();
        let b = parse_scale(" union ( points ( 0 , 1 , 2 ) , interval ( 3 , 4 ) ) ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn print_parse_roundtrip() {
        for text in [
            "union(interval(0, 1), points(2, 3.5))",
            "geometric(q=0.5, c=1)",
            "union(points(-1, 0), harmonic(c=1), interval(2, 3))",
            "harmonic(c=2, offset=-1, first=3)",
        ] {
            let t = parse_scale(text).unwrap();
            let printed = t.to_spec_string();
            assert_eq!(parse_scale(&printed).unwrap(), t, "{text} -> {printed}");
        }
    }

    #[test]
    fn printer_emits_sorted_canonical_pieces() {
        let t = parse_scale("union(points(5), interval(0,1), points(3))").unwrap();
        assert_eq!(t.to_spec_string(), "union(interval(0, 1), points(3, 5))");
    }

    #[test]
    fn offset_applies_to_all_kinds() {
        let t = parse_scale("union(interval(0,1,offset=10), points(0, 1, offset=20))").unwrap();
        assert_eq!(t.min(), 10.0);
        assert_eq!(t.max(), 21.0);
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(parse_scale("interval(0)").is_err());
        assert!(parse_scale("geometric(q=1.5, c=1)").is_err());
        assert!(parse_scale("blob(1,2)").is_err());
        assert!(parse_scale("points(1,2,3) trailing").is_err());
    }
}
