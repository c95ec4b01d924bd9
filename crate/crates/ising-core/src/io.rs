//! Plain-text interchange format for Ising models.
//!
//! ```text
//! # optional comments
//! vars 8
//! offset 1.5
//! h 0 -1
//! J 0 4 -0.75
//! ```
//!
//! `vars` must come first; `h` lines are sorted by index and `J` lines by
//! `(i, j)` with `i < j` so output is canonical. Values are written with the
//! shortest decimal representation that parses back to the identical float,
//! which keeps round-trips exact.

use std::fmt::Display;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::{IsingError, IsingModel, Scalar};

/// Serialize a model in canonical line order.
pub fn write_ising<T: Scalar>(model: &IsingModel<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", model.num_vars());
    let _ = writeln!(out, "offset {}", model.offset());
    for (i, v) in model.linear() {
        let _ = writeln!(out, "h {} {}", i, v);
    }
    for (i, j, v) in model.quadratic() {
        let _ = writeln!(out, "J {} {} {}", i, j, v);
    }
    out
}

/// Parse the interchange format from a string. `path` is only used in error
/// messages.
pub fn parse_ising<T>(text: &str, path: &str) -> Result<IsingModel<T>, IsingError>
where
    T: Scalar + FromStr,
    <T as FromStr>::Err: Display,
{
    let err = |line: usize, msg: String| IsingError::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut model: Option<IsingModel<T>> = None;
    let mut seen_offset = false;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        let rest: Vec<&str> = tok.collect();
        let parse_u32 = |s: &str| {
            s.parse::<u32>()
                .map_err(|e| err(lineno, format!("bad index {s:?}: {e}")))
        };
        let parse_val = |s: &str| {
            s.parse::<T>()
                .map_err(|e| err(lineno, format!("bad value {s:?}: {e}")))
        };
        match head {
            "vars" => {
                if model.is_some() {
                    return Err(err(lineno, "duplicate vars line".to_string()));
                }
                if rest.len() != 1 {
                    return Err(err(lineno, "expected: vars N".to_string()));
                }
                let n = rest[0]
                    .parse::<usize>()
                    .map_err(|e| err(lineno, format!("bad count {:?}: {e}", rest[0])))?;
                model = Some(IsingModel::new(n));
            }
            "offset" => {
                let m = model
                    .as_mut()
                    .ok_or_else(|| err(lineno, "offset before vars".to_string()))?;
                if seen_offset {
                    return Err(err(lineno, "duplicate offset line".to_string()));
                }
                if rest.len() != 1 {
                    return Err(err(lineno, "expected: offset V".to_string()));
                }
                m.set_offset(parse_val(rest[0])?);
                seen_offset = true;
            }
            "h" => {
                let m = model
                    .as_mut()
                    .ok_or_else(|| err(lineno, "h before vars".to_string()))?;
                if rest.len() != 2 {
                    return Err(err(lineno, "expected: h I V".to_string()));
                }
                let i = parse_u32(rest[0])?;
                if m.h(i) != T::zero() {
                    return Err(err(lineno, format!("duplicate h {i}")));
                }
                m.set_h(i, parse_val(rest[1])?)
                    .map_err(|e| err(lineno, e.to_string()))?;
            }
            "J" => {
                let m = model
                    .as_mut()
                    .ok_or_else(|| err(lineno, "J before vars".to_string()))?;
                if rest.len() != 3 {
                    return Err(err(lineno, "expected: J I J V".to_string()));
                }
                let i = parse_u32(rest[0])?;
                let j = parse_u32(rest[1])?;
                if i >= j {
                    return Err(err(lineno, format!("J indices must satisfy i < j, got {i} {j}")));
                }
                if m.j(i, j) != T::zero() {
                    return Err(err(lineno, format!("duplicate J {i} {j}")));
                }
                m.set_j(i, j, parse_val(rest[2])?)
                    .map_err(|e| err(lineno, e.to_string()))?;
            }
            other => {
                return Err(err(lineno, format!("unknown directive {other:?}")));
            }
        }
    }
    model.ok_or_else(|| err(0, "missing vars line".to_string()))
}

/// Read a model from a file.
pub fn read_ising<T>(path: &Path) -> Result<IsingModel<T>, IsingError>
where
    T: Scalar + FromStr,
    <T as FromStr>::Err: Display,
{
    let text = std::fs::read_to_string(path).map_err(|source| IsingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_ising(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_canonical_form() {
        let mut m = IsingModel::<f64>::new(5);
        m.set_offset(1.5);
        m.set_j(4, 0, -0.75).unwrap();
        m.set_h(3, -1.0).unwrap();
        m.set_h(0, 2.0).unwrap();
        let text = write_ising(&m);
        assert_eq!(text, "vars 5\noffset 1.5\nh 0 2\nh 3 -1\nJ 0 4 -0.75\n");
    }

    #[test]
    fn parse_roundtrip_with_comments() {
        let text = "# model\nvars 3\noffset 0.1  # trailing\n\nh 1 -0.25\nJ 0 2 1\n";
        let m: IsingModel<f64> = parse_ising(text, "t").unwrap();
        assert_eq!(m.num_vars(), 3);
        assert_eq!(m.offset(), 0.1);
        assert_eq!(m.h(1), -0.25);
        assert_eq!(m.j(0, 2), 1.0);
        let m2 = parse_ising::<f64>(&write_ising(&m), "t2").unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "vars 2\nh 5 1.0\n";
        match parse_ising::<f64>(bad, "f") {
            Err(IsingError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_ising::<f64>("h 0 1\n", "f").is_err());
        assert!(parse_ising::<f64>("vars 2\nJ 1 0 1\n", "f").is_err());
        assert!(parse_ising::<f64>("vars 2\nwat 1\n", "f").is_err());
    }

    #[test]
    fn shortest_float_repr_roundtrips_exactly() {
        let mut m = IsingModel::<f64>::new(2);
        // Values with no short decimal representation.
        m.set_h(0, 1.0 / 3.0).unwrap();
        m.set_h(1, -2.0f64.sqrt()).unwrap();
        m.set_j(0, 1, 0.1 + 0.2).unwrap();
        m.set_offset(f64::MIN_POSITIVE);
        let m2 = parse_ising::<f64>(&write_ising(&m), "t").unwrap();
        assert_eq!(m, m2);
    }
}
