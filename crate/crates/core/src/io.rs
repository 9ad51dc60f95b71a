//! Text and JSON formats for design pairs.
//!
//! The text format is one header block followed by two grids:
//!
//! ```text
//! kind: arpa
//! params: 4 3 2
//! first:
//! 0 1 2 3 x2
//! 0 1 0 2
//! second:
//! 0 1 2 2 x2
//! ```
//!
//! Rows are space separated symbols with an optional `x<m>` multiplicity.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::designs::{DesignArray, DesignPair, PairKind, Params, Symbol, Word};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses one grid row, returning the word and its multiplicity.
pub fn parse_row(text: &str, line: usize) -> Result<(Word, u64)> {
    let mut symbols = Vec::new();
    let mut mult = 1;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    for (i, t) in tokens.iter().enumerate() {
        if let Some(m) = t.strip_prefix('x') {
            if i + 1 != tokens.len() {
                return Err(parse_err(line, "multiplicity must be the last token"));
            }
            mult = m.parse().map_err(|_| parse_err(line, format!("bad multiplicity {t:?}")))?;
        } else {
            symbols.push(
                t.parse::<Symbol>()
                    .map_err(|_| parse_err(line, format!("bad symbol {t:?}")))?,
            );
        }
    }
    Ok((Word::new(symbols), mult))
}

/// Reads a bare grid into an array with the given shape.
pub fn parse_grid(text: &str, columns: usize, alphabet: usize) -> Result<DesignArray> {
    let mut a = DesignArray::new(columns, alphabet);
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (w, m) = parse_row(l, i + 1)?;
        a.add(w, m).map_err(|e| parse_err(i + 1, e.to_string()))?;
    }
    Ok(a)
}

pub fn parse_pair_text(text: &str) -> Result<DesignPair> {
    let mut kind = None;
    let mut params = None;
    let mut section = 0;
    let mut rows: [Vec<(usize, Word, u64)>; 2] = [Vec::new(), Vec::new()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(v) = l.strip_prefix("kind:") {
            kind = Some(v.trim().parse::<PairKind>().map_err(|e| parse_err(line, e))?);
        } else if let Some(v) = l.strip_prefix("params:") {
            let n: Vec<usize> = v
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad parameter {t:?}"))))
                .collect::<Result<_>>()?;
            let [s, b, k] = n[..] else {
                return Err(parse_err(line, "params needs three numbers"));
            };
            params = Some(Params::new(s, b, k));
        } else if l == "first:" {
            section = 1;
        } else if l == "second:" {
            section = 2;
        } else if section == 0 {
            return Err(parse_err(line, "row before a first: or second: header"));
        } else {
            let (w, m) = parse_row(l, line)?;
            rows[section - 1].push((line, w, m));
        }
    }
    let kind = kind.ok_or_else(|| parse_err(0, "missing kind: line"))?;
    let params = params.ok_or_else(|| parse_err(0, "missing params: line"))?;
    let alphabet = match kind {
        PairKind::Arpa => params.size,
        PairKind::Cpa => 2,
    };
    let build = |rs: &[(usize, Word, u64)]| -> Result<DesignArray> {
        let mut a = DesignArray::new(params.size, alphabet);
        for (line, w, m) in rs {
            a.add(w.clone(), *m).map_err(|e| parse_err(*line, e.to_string()))?;
        }
        Ok(a)
    };
    DesignPair::new(kind, params, build(&rows[0])?, build(&rows[1])?)
}

/// Rows in display order: most matches first, then lexicographic.
pub fn display_rows(a: &DesignArray) -> Vec<(&Word, u64)> {
    let mut v: Vec<(&Word, u64)> = a.iter().collect();
    v.sort_by(|(x, _), (y, _)| {
        let (wx, wy) = (x.matches().weight(), y.matches().weight());
        wy.cmp(&wx).then_with(|| x.cmp(y))
    });
    v
}

fn boolean_display_rows(a: &DesignArray) -> Vec<(&Word, u64)> {
    let mut v: Vec<(&Word, u64)> = a.iter().collect();
    v.sort_by(|(x, _), (y, _)| y.weight().cmp(&x.weight()).then_with(|| x.cmp(y)));
    v
}

pub fn write_grid(a: &DesignArray, boolean: bool) -> String {
    let rows = if boolean { boolean_display_rows(a) } else { display_rows(a) };
    let mut s = String::new();
    for (w, m) in rows {
        if m == 1 {
            let _ = writeln!(s, "{w}");
        } else {
            let _ = writeln!(s, "{w} x{m}");
        }
    }
    s
}

pub fn write_pair_text(pair: &DesignPair) -> String {
    let p = pair.params;
    let boolean = pair.kind == PairKind::Cpa;
    format!(
        "kind: {}\nparams: {} {} {}\nfirst:\n{}second:\n{}",
        pair.kind,
        p.size,
        p.budget,
        p.strength,
        write_grid(&pair.first, boolean),
        write_grid(&pair.second, boolean)
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RowJson {
    row: Vec<Symbol>,
    mult: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PairJson {
    kind: PairKind,
    params: BTreeMap<String, usize>,
    first: Vec<RowJson>,
    second: Vec<RowJson>,
}

fn param_keys(kind: PairKind) -> [&'static str; 3] {
    match kind {
        PairKind::Arpa => ["q", "p", "k"],
        PairKind::Cpa => ["nu", "d", "k"],
    }
}

pub fn pair_to_json(pair: &DesignPair) -> serde_json::Value {
    let [a, b, c] = param_keys(pair.kind);
    let rows = |arr: &DesignArray| -> Vec<RowJson> {
        arr.iter().map(|(w, m)| RowJson { row: w.symbols().to_vec(), mult: m }).collect()
    };
    let j = PairJson {
        kind: pair.kind,
        params: BTreeMap::from([
            (a.to_string(), pair.params.size),
            (b.to_string(), pair.params.budget),
            (c.to_string(), pair.params.strength),
        ]),
        first: rows(&pair.first),
        second: rows(&pair.second),
    };
    serde_json::to_value(j).expect("pair serializes")
}

pub fn pair_from_json_value(v: serde_json::Value) -> Result<DesignPair> {
    let j: PairJson = serde_json::from_value(v)?;
    let keys = param_keys(j.kind);
    let get = |k: &str| {
        j.params.get(k).copied().ok_or_else(|| {
            Error::Shape(format!("{} pair params need keys {keys:?}, missing {k:?}", j.kind))
        })
    };
    let params = Params::new(get(keys[0])?, get(keys[1])?, get(keys[2])?);
    let alphabet = match j.kind {
        PairKind::Arpa => params.size,
        PairKind::Cpa => 2,
    };
    let build = |rs: &[RowJson]| {
        DesignArray::from_rows(
            params.size,
            alphabet,
            rs.iter().map(|r| (Word::new(r.row.clone()), r.mult)),
        )
    };
    DesignPair::new(j.kind, params, build(&j.first)?, build(&j.second)?)
}

pub fn pair_from_json(text: &str) -> Result<DesignPair> {
    pair_from_json_value(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn text_round_trip() {
        for p in fixtures::all() {
            let back = parse_pair_text(&write_pair_text(&p.pair)).unwrap();
            assert_eq!(back, p.pair, "{}", p.name);
        }
    }

    #[test]
    fn json_round_trip() {
        for p in fixtures::all() {
            let v = pair_to_json(&p.pair);
            assert_eq!(pair_from_json_value(v).unwrap(), p.pair, "{}", p.name);
        }
    }

    #[test]
    fn json_uses_kind_specific_keys() {
        let v = pair_to_json(&fixtures::sample_cpa_4_3_2());
        assert_eq!(v["params"]["nu"], 4);
        assert_eq!(v["params"]["d"], 3);
        let v = pair_to_json(&fixtures::sample_arpa_4_3_2());
        assert_eq!(v["params"]["q"], 4);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_pair_text("kind: cpa\nparams: 2 1 1\nfirst:\n1 1\n1 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e}");
        assert!(parse_pair_text("kind: cpa\nparams: 2 1 1\n1 1\n").is_err());
        assert!(parse_pair_text("kind: cpa\nparams: 2 1 1\nfirst:\n1 2\nsecond:\n0 0\n").is_err());
    }

    #[test]
    fn grid_rows_with_multiplicity() {
        let a = parse_grid("1 1\n0 1 x3\n# note\n", 2, 2).unwrap();
        assert_eq!(a.row_count(), 4);
        assert_eq!(a.multiplicity(&Word::new(vec![0, 1])), 3);
    }
}
