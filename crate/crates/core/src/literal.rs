//! Plain-text series literals.
//!
//! ```text
//! analytic 2
//! 1 0
//! 0.5 0
//! 0 -0.25
//! ```
//!
//! The header names the kind and the truncation order `K`. An analytic literal
//! lists `c_0..c_K`; a meromorphic literal lists the tail `a_1..a_K`. Each
//! line holds `re im`. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};
use crate::series::{AnalyticSeries, MeromorphicSeries};

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesLiteral<T: Scalar> {
    Analytic(AnalyticSeries<T>),
    Meromorphic(MeromorphicSeries<T>),
}

pub fn parse_literal<T: Scalar>(text: &str) -> Result<SeriesLiteral<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
    let mut words = header.split_whitespace();
    let kind = words.next().unwrap_or_default();
    let order: usize = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| Error::Parse { line: hline, msg: format!("bad header '{header}'") })?;
    if words.next().is_some() {
        return Err(Error::Parse { line: hline, msg: format!("trailing tokens in header '{header}'") });
    }
    let expected = match kind {
        "analytic" => order + 1,
        "meromorphic" => order,
        _ => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("unknown series kind '{kind}'"),
            })
        }
    };

    let mut coeffs: Vec<Cx<T>> = Vec::with_capacity(expected);
    for (line, body) in lines {
        let parts: Vec<&str> = body.split_whitespace().collect();
        let [re, im] = parts[..] else {
            return Err(Error::Parse { line, msg: format!("expected 're im', got '{body}'") });
        };
        let parse = |w: &str| {
            w.parse::<f64>()
                .map_err(|e| Error::Parse { line, msg: format!("'{w}': {e}") })
        };
        coeffs.push(Complex::new(T::lit(parse(re)?), T::lit(parse(im)?)));
    }
    if coeffs.len() != expected {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header promises {expected} coefficient line(s), found {}", coeffs.len()),
        });
    }
    match kind {
        "analytic" => Ok(SeriesLiteral::Analytic(AnalyticSeries::new(coeffs, T::one())?)),
        _ => Ok(SeriesLiteral::Meromorphic(MeromorphicSeries::new(coeffs)?)),
    }
}

fn push_coeffs<T: Scalar>(out: &mut String, coeffs: &[Cx<T>]) {
    for c in coeffs {
        let _ = writeln!(out, "{:e} {:e}", c.re.as_f64(), c.im.as_f64());
    }
}

pub fn format_analytic<T: Scalar>(s: &AnalyticSeries<T>) -> String {
    let mut out = format!("analytic {}\n", s.order());
    push_coeffs(&mut out, s.coeffs());
    out
}

pub fn format_meromorphic<T: Scalar>(f: &MeromorphicSeries<T>) -> String {
    let mut out = format!("meromorphic {}\n", f.order());
    push_coeffs(&mut out, f.tail());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_both_kinds() {
        let a: SeriesLiteral<f64> = parse_literal("analytic 1\n1 0\n0.5 -2\n").unwrap();
        match a {
            SeriesLiteral::Analytic(s) => {
                assert_eq!(s.order(), 1);
                assert_eq!(s.coeff(1), Complex::new(0.5, -2.0));
            }
            _ => panic!("wrong kind"),
        }
        let m: SeriesLiteral<f64> =
            parse_literal("# comment\nmeromorphic 2\n\n0.1 0\n0 0.2\n").unwrap();
        match m {
            SeriesLiteral::Meromorphic(f) => assert_eq!(f.coeff(2), Complex::new(0.0, 0.2)),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_literal::<f64>("").is_err());
        assert!(parse_literal::<f64>("laurent 1\n1 0\n1 0\n").is_err());
        assert!(parse_literal::<f64>("analytic 2\n1 0\n1 0\n").is_err());
        assert!(parse_literal::<f64>("analytic 1\n1 0\n1\n").is_err());
        assert!(parse_literal::<f64>("analytic 1\n1 0\nx 0\n").is_err());
        assert!(parse_literal::<f64>("meromorphic 1\nNaN 0\n").is_err());
    }

    proptest! {
        #[test]
        fn analytic_text_round_trip(v in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..20)) {
            let s = AnalyticSeries::new(v.iter().map(|&(r, i)| Complex::new(r, i)).collect(), 1.0).unwrap();
            let text = format_analytic(&s);
            prop_assert_eq!(parse_literal::<f64>(&text).unwrap(), SeriesLiteral::Analytic(s));
        }
    }
}
