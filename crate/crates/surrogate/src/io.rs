//! Machine format for weight and context matrices: a header line
//! `SURR v1 <kind> d=<d> n=<n>`, then per level a `level <i>` line and
//! `n^2` rows of full-precision reals.

use ndarray::Array2;

use crate::{Result, SurrogateError};

pub fn write_matrices(kind: &str, n: usize, levels: &[Array2<f64>]) -> String {
    let mut out = format!("SURR v1 {kind} d={} n={n}\n", levels.len());
    for (i, m) in levels.iter().enumerate() {
        out.push_str(&format!("level {}\n", i + 1));
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> SurrogateError {
    SurrogateError::Parse { line, message: message.into() }
}

/// Returns `(kind, n, levels)`.
pub fn parse_matrices(text: &str) -> Result<(String, usize, Vec<Array2<f64>>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 5 || tok[0] != "SURR" || tok[1] != "v1" {
        return Err(err(1, "expected \"SURR v1 <kind> d=<d> n=<n>\""));
    }
    let field = |t: &str, key: &str| -> Result<usize> {
        t.strip_prefix(key).and_then(|v| v.parse().ok()).ok_or_else(|| err(1, format!("bad field {t:?}")))
    };
    let d = field(tok[3], "d=")?;
    let n = field(tok[4], "n=")?;
    let size = n * n;
    let mut levels = Vec::with_capacity(d);
    for i in 0..d {
        let (li, l) = lines.next().ok_or_else(|| err(0, format!("missing level {}", i + 1)))?;
        if l.trim() != format!("level {}", i + 1) {
            return Err(err(li + 1, format!("expected \"level {}\"", i + 1)));
        }
        let mut data = Vec::with_capacity(size * size);
        for _ in 0..size {
            let (li, row) = lines.next().ok_or_else(|| err(0, "truncated matrix"))?;
            let vals = row
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|_| err(li + 1, format!("not a number: {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != size {
                return Err(err(li + 1, format!("{} entries, expected {size}", vals.len())));
            }
            data.extend(vals);
        }
        levels.push(Array2::from_shape_vec((size, size), data).expect("shape checked"));
    }
    Ok((tok[2].to_string(), n, levels))
}
