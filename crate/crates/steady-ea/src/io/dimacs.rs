//! DIMACS CNF reading and writing.
//!
//! Comment lines start with `c`; the header is `p cnf <nvars> <nclauses>`;
//! clauses are zero-terminated literal runs. A `%` token ends the body (the
//! trailer convention of the common benchmark archives). Strict parsing
//! requires the clause count and the maximum referenced variable to match the
//! header exactly; the lenient variant takes the clauses as found.

use super::ParseError;
use crate::problems::CnfFormula;

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
    parse(text, true)
}

pub fn parse_dimacs_lenient(text: &str) -> Result<CnfFormula, ParseError> {
    parse(text, false)
}

fn parse(text: &str, strict: bool) -> Result<CnfFormula, ParseError> {
    let mut tokens = text
        .lines()
        .filter(|line| !line.trim_start().starts_with('c'))
        .flat_map(|line| line.split_whitespace())
        .take_while(|&tok| tok != "%");

    match tokens.next() {
        Some("p") => {}
        _ => return Err(ParseError::MissingHeader),
    }
    match tokens.next() {
        Some("cnf") => {}
        other => {
            return Err(ParseError::BadHeader(format!(
                "expected 'cnf', got {other:?}"
            )))
        }
    }
    let n_vars: usize = next_number(&mut tokens, "variable count")?;
    let n_clauses: usize = next_number(&mut tokens, "clause count")?;

    let mut clauses: Vec<Vec<i32>> = Vec::with_capacity(n_clauses);
    let mut clause: Vec<i32> = Vec::new();
    let mut max_var = 0usize;
    for tok in tokens {
        let lit: i32 = tok
            .parse()
            .map_err(|_| ParseError::BadToken(tok.to_string()))?;
        if lit == 0 {
            if clause.is_empty() {
                return Err(ParseError::EmptyClause {
                    index: clauses.len(),
                });
            }
            clauses.push(std::mem::take(&mut clause));
        } else {
            let var = lit.unsigned_abs() as usize;
            if strict && var > n_vars {
                return Err(ParseError::LiteralOutOfRange {
                    literal: lit,
                    n_vars,
                });
            }
            max_var = max_var.max(var);
            clause.push(lit);
        }
    }
    if !clause.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }
    if strict {
        if clauses.len() != n_clauses {
            return Err(ParseError::ClauseCountMismatch {
                header: n_clauses,
                actual: clauses.len(),
            });
        }
        if max_var != n_vars {
            return Err(ParseError::MaxVariableMismatch {
                header: n_vars,
                actual: max_var,
            });
        }
    }
    let n_vars = n_vars.max(max_var);
    CnfFormula::new(n_vars, clauses).map_err(|e| ParseError::BadToken(e.to_string()))
}

fn next_number<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<usize, ParseError> {
    let tok = tokens
        .next()
        .ok_or_else(|| ParseError::BadHeader(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| ParseError::BadHeader(format!("bad {what}: '{tok}'")))
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "p cnf {} {}\n",
        formula.n_vars,
        formula.clauses.len()
    ));
    for clause in &formula.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}
