//! Matrix input formats and JSON rendering of results.
//!
//! Three input forms are accepted and parse to the same matrix:
//!
//! ```text
//! 2 2            {"rows": [[1, 1], [1, 0]]}            [[1, 1], [1, 0]]
//! 1 1
//! 1 0
//! ```
//!
//! Integers are arbitrary precision in every form. JSON output renders them
//! as plain JSON numbers with all digits, never as floats.

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::linalg::{AbelianGroup, IntMatrix};
use crate::shift::Word;

/// Parses any of the accepted matrix forms, detected by the first
/// non-blank character.
pub fn parse_matrix(input: &str) -> Result<IntMatrix> {
    let trimmed = input.trim_start();
    match trimmed.chars().next() {
        None => Err(Error::Parse("empty matrix input".into())),
        Some('{') | Some('[') => parse_json_matrix(trimmed),
        Some(_) => parse_text_matrix(input),
    }
}

/// `rows cols` header, then `rows` lines of `cols` integers. Blank lines and
/// `#` comments are ignored.
pub fn parse_text_matrix(input: &str) -> Result<IntMatrix> {
    let mut lines = input
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing 'rows cols' header".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad header '{header}', expected 'rows cols'")))?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse(format!(
            "bad header '{header}', expected 'rows cols'"
        )));
    };
    let mut data = Vec::with_capacity(rows);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            return Err(Error::Parse(format!("more than the declared {rows} rows")));
        }
        let row: Vec<BigInt> = line
            .split_whitespace()
            .map(parse_int)
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "row {} has {} entries, header declares {cols}",
                i + 1,
                row.len()
            )));
        }
        data.push(row);
    }
    if data.len() != rows {
        return Err(Error::Parse(format!(
            "header declares {rows} rows, found {}",
            data.len()
        )));
    }
    IntMatrix::new(rows, cols, data.into_iter().flatten().collect())
}

/// `{"rows": [[...], ...]}` or a bare `[[...], ...]`.
pub fn parse_json_matrix(input: &str) -> Result<IntMatrix> {
    let value: Value =
        serde_json::from_str(input).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let rows = match &value {
        Value::Object(map) => map
            .get("rows")
            .ok_or_else(|| Error::Parse("JSON object has no \"rows\" field".into()))?,
        other => other,
    };
    let rows = rows
        .as_array()
        .ok_or_else(|| Error::Parse("\"rows\" must be an array of arrays".into()))?;
    let mut data = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {} is not an array", i + 1)))?;
        let entries = row
            .iter()
            .map(|v| match v {
                Value::Number(n) => parse_int(&n.to_string()),
                other => Err(Error::Parse(format!("entry {other} is not an integer"))),
            })
            .collect::<Result<Vec<_>>>()?;
        data.push(entries);
    }
    let n_rows = data.len();
    let n_cols = data.first().map_or(0, Vec::len);
    if let Some(i) = data.iter().position(|r| r.len() != n_cols) {
        return Err(Error::Parse(format!(
            "row {} has {} entries, row 1 has {n_cols}",
            i + 1,
            data[i].len()
        )));
    }
    IntMatrix::new(n_rows, n_cols, data.into_iter().flatten().collect())
}

fn parse_int(token: &str) -> Result<BigInt> {
    token
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("'{token}' is not an integer")))
}

/// Parses a word as symbols separated by whitespace, `.` or `,`. A symbol is
/// either one of `labels` or a 1-based index.
pub fn parse_word(input: &str, labels: &[String]) -> Result<Word> {
    let symbols = input
        .split(|c: char| c.is_whitespace() || c == '.' || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            if let Some(i) = labels.iter().position(|l| l == t) {
                return Ok(i);
            }
            match t.parse::<usize>() {
                Ok(i) if (1..=labels.len()).contains(&i) => Ok(i - 1),
                _ => Err(Error::Parse(format!(
                    "unknown symbol '{t}' (expected a label or an index in 1..={})",
                    labels.len()
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if symbols.is_empty() {
        return Err(Error::Parse(format!("empty word '{input}'")));
    }
    Ok(Word(symbols))
}

/// An integer as a JSON number carrying every digit.
pub fn int_json(n: &BigInt) -> Value {
    let number: Number = n
        .to_string()
        .parse()
        .expect("decimal integers are valid JSON numbers");
    Value::Number(number)
}

pub fn ints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| ints_json(r)).collect())
}

/// `{"free_rank", "order", "structure", "torsion"}`; `order` is null for
/// infinite groups.
pub fn group_json(g: &AbelianGroup) -> Value {
    json!({
        "torsion": ints_json(g.torsion()),
        "free_rank": g.free_rank(),
        "order": g.order().as_ref().map_or(Value::Null, int_json),
        "structure": g.to_string(),
    })
}

/// Builds a JSON object from key-value pairs. Keys come out sorted.
pub fn object<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Value)>) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.into(), v))
            .collect::<Map<_, _>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imat;

    #[test]
    fn three_forms_agree() {
        let text = "2 2\n1 1\n1 0\n";
        let json = r#"{"rows": [[1, 1], [1, 0]]}"#;
        let inline = "[[1,1],[1,0]]";
        let expected = imat![[1, 1], [1, 0]];
        assert_eq!(parse_matrix(text).unwrap(), expected);
        assert_eq!(parse_matrix(json).unwrap(), expected);
        assert_eq!(parse_matrix(inline).unwrap(), expected);
    }

    #[test]
    fn text_with_comments_and_rectangular_shape() {
        let text = "# C\n1 3\n\n1 2 3  # row one\n";
        assert_eq!(parse_matrix(text).unwrap(), imat![[1, 2, 3]]);
    }

    #[test]
    fn big_entries_round_trip() {
        let big = "123456789012345678901234567890";
        let m = parse_matrix(&format!("[[{big}, -{big}]]")).unwrap();
        assert_eq!(m.get(0, 0).to_string(), big);
        let rendered = serde_json::to_string(&matrix_json(&m)).unwrap();
        assert_eq!(rendered, format!("[[{big},-{big}]]"));
        assert_eq!(parse_matrix(&rendered).unwrap(), m);
    }

    #[test]
    fn shape_errors() {
        for bad in [
            "2 2\n1 1\n",
            "2 2\n1 1\n1 0\n1 1\n",
            "2 2\n1 1 1\n1 0\n",
            "2\n1 1\n",
            "x y\n",
            "[[1, 2], [3]]",
            "[[1.5]]",
            r#"{"cols": []}"#,
            "2 2\n1 a\n1 0\n",
            "",
        ] {
            assert!(matches!(parse_matrix(bad), Err(Error::Parse(_))), "{bad:?}");
        }
    }

    #[test]
    fn words_by_label_or_index() {
        let labels: Vec<String> = ["e11", "e12", "e21"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(parse_word("e21", &labels).unwrap(), Word(vec![2]));
        assert_eq!(parse_word("e12 e21", &labels).unwrap(), Word(vec![1, 2]));
        assert_eq!(parse_word("1.3", &labels).unwrap(), Word(vec![0, 2]));
        assert!(parse_word("4", &labels).is_err());
        assert!(parse_word("e22", &labels).is_err());
        assert!(parse_word("", &labels).is_err());
    }

    #[test]
    fn group_rendering() {
        let g = AbelianGroup::from_orders(&[BigInt::from(2), BigInt::from(3)]);
        let v = group_json(&g);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"free_rank":0,"order":6,"structure":"Z/6","torsion":[6]}"#
        );
    }
}
