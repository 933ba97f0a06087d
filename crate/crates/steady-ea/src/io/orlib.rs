//! Set covering instances in the OR-Library layout: `m n`, then the `n`
//! column costs, then for each row a count followed by that many one-based
//! column indices.

use super::ParseError;
use crate::problems::ScpInstance;

pub fn parse_orlib_scp(text: &str) -> Result<ScpInstance, ParseError> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| -> Result<f64, ParseError> {
        let tok = tokens
            .next()
            .ok_or_else(|| ParseError::Truncated(what.to_string()))?;
        tok.parse()
            .map_err(|_| ParseError::BadToken(format!("{what}: '{tok}'")))
    };
    let rows = next("row count")? as usize;
    let cols = next("column count")? as usize;
    let mut costs = Vec::with_capacity(cols);
    for j in 0..cols {
        costs.push(next(&format!("cost of column {j}"))?);
    }
    let mut row_cover = Vec::with_capacity(rows);
    for r in 0..rows {
        let k = next(&format!("cover count of row {r}"))? as usize;
        if k == 0 {
            return Err(ParseError::EmptyRow { row: r });
        }
        let mut cover = Vec::with_capacity(k);
        for _ in 0..k {
            let one_based = next(&format!("cover column of row {r}"))? as i64;
            if one_based < 1 || one_based as usize > cols {
                return Err(ParseError::ColumnOutOfRange {
                    row: r,
                    column: one_based,
                    n_cols: cols,
                });
            }
            cover.push((one_based - 1) as u32);
        }
        row_cover.push(cover);
    }
    if let Some(extra) = tokens.next() {
        return Err(ParseError::TrailingGarbage(extra.to_string()));
    }
    ScpInstance::new(rows, cols, costs, row_cover)
        .map_err(|e| ParseError::BadToken(e.to_string()))
}

pub fn write_orlib_scp(instance: &ScpInstance) -> String {
    let mut out = format!("{} {}\n", instance.rows(), instance.cols());
    let costs: Vec<String> = instance
        .costs()
        .iter()
        .map(|c| super::csv::format_g6(*c))
        .collect();
    out.push_str(&costs.join(" "));
    out.push('\n');
    for r in 0..instance.rows() {
        let cover = instance.row_cover(r);
        let cols: Vec<String> = cover.iter().map(|c| (c + 1).to_string()).collect();
        out.push_str(&format!("{} {}\n", cover.len(), cols.join(" ")));
    }
    out
}
