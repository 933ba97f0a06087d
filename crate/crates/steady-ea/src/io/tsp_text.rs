//! Plain-text TSP distance matrices: city count on the first line, then an
//! n-by-n block of space-separated reals.

use super::ParseError;
use crate::problems::TspInstance;

pub fn parse_tsp_matrix(text: &str) -> Result<TspInstance, ParseError> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| ParseError::Truncated("city count".to_string()))?
        .parse()
        .map_err(|_| ParseError::BadToken("city count".to_string()))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let tok = tokens
                .next()
                .ok_or_else(|| ParseError::Truncated(format!("distance [{i}][{j}]")))?;
            row.push(
                tok.parse()
                    .map_err(|_| ParseError::BadToken(format!("distance [{i}][{j}]: '{tok}'")))?,
            );
        }
        rows.push(row);
    }
    if let Some(extra) = tokens.next() {
        return Err(ParseError::TrailingGarbage(extra.to_string()));
    }
    TspInstance::from_matrix(rows).map_err(|e| ParseError::BadToken(e.to_string()))
}

pub fn write_tsp_matrix(instance: &TspInstance) -> String {
    let n = instance.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| instance.distance(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
