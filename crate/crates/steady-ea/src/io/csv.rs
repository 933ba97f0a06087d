//! CSV emission for run records, histograms, and diversity traces.
//!
//! Reals carry 6 significant digits. Field order matches the record structs
//! exactly and rows are written in the order given.

use std::io::{self, Write};

use crate::diversity::HistogramRecord;
use crate::engine::RunRecord;
use crate::experiment::TraceRow;

pub const RUN_CSV_HEADER: &str =
    "problem,selection,deletion,tour_k,capacity,pc,pm,seed,cycles,generations,best_fitness,best_raw,t_target";

pub const HISTOGRAM_CSV_HEADER: &str = "bin_low,bin_high,count";

/// best_fitness in a trace is the best-so-far value, not the instantaneous
/// population maximum.
pub const TRACE_CSV_HEADER: &str =
    "generation,best_fitness_so_far,total_diversity,total_sampled,highfit_diversity";

/// Formats with 6 significant digits, plain decimal for moderate exponents
/// and scientific otherwise.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("std formats with an exponent");
    let exp: i32 = exponent.parse().unwrap();
    if (-4..=8).contains(&exp) {
        // shift the 6 significant digits around the decimal point
        let neg = mantissa.starts_with('-');
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if exp >= 0 {
            let split = (exp + 1) as usize;
            if split >= digits.len() {
                out.push_str(&digits);
                for _ in digits.len()..split {
                    out.push('0');
                }
            } else {
                out.push_str(&digits[..split]);
                let frac = digits[split..].trim_end_matches('0');
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
        out
    } else {
        let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{trimmed}e{exp}")
    }
}

fn run_row(r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.problem,
        r.selection,
        r.deletion,
        r.tournament_k.map_or(String::new(), |k| k.to_string()),
        r.capacity,
        format_g6(r.crossover_probability),
        format_g6(r.mutation_probability),
        r.seed,
        r.cycles,
        format_g6(r.generations),
        format_g6(r.best_fitness),
        format_g6(r.best_raw),
        r.t_target.map_or(String::new(), |t| t.to_string()),
    )
}

pub fn write_run_csv(records: &[RunRecord], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{RUN_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", run_row(r))?;
    }
    Ok(())
}

/// Reads back what [`write_run_csv`] wrote; real fields round to the 6
/// significant digits of the file.
pub fn parse_run_csv(text: &str) -> Result<Vec<RunRecord>, super::ParseError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RUN_CSV_HEADER => {}
        _ => return Err(super::ParseError::MissingHeader),
    }
    let mut records = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(super::ParseError::BadToken(format!(
                "expected 13 fields, got {}",
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64, super::ParseError> {
            fields[i]
                .parse()
                .map_err(|_| super::ParseError::BadToken(fields[i].to_string()))
        };
        records.push(RunRecord {
            problem: fields[0].to_string(),
            selection: fields[1].to_string(),
            deletion: fields[2].to_string(),
            tournament_k: if fields[3].is_empty() {
                None
            } else {
                Some(num(3)? as usize)
            },
            capacity: num(4)? as usize,
            crossover_probability: num(5)?,
            mutation_probability: num(6)?,
            seed: num(7)? as u64,
            cycles: num(8)? as u64,
            generations: num(9)?,
            best_fitness: num(10)?,
            best_raw: num(11)?,
            t_target: if fields[12].is_empty() {
                None
            } else {
                Some(num(12)? as u64)
            },
        });
    }
    Ok(records)
}

pub fn write_histogram_csv(records: &[HistogramRecord], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{HISTOGRAM_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{}",
            format_g6(r.bin_low),
            format_g6(r.bin_high),
            r.count
        )?;
    }
    Ok(())
}

pub fn write_trace_csv(rows: &[TraceRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_g6(r.generation),
            format_g6(r.best_fitness),
            r.total_diversity.map_or(String::new(), format_g6),
            r.total_sampled.map_or(String::new(), |s| (s as u8).to_string()),
            r.highfit_diversity.map_or(String::new(), format_g6),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_g6(0.0), "0");
        assert_eq!(format_g6(645.0), "645");
        assert_eq!(format_g6(0.25), "0.25");
        assert_eq!(format_g6(1.0 / 3.0), "0.333333");
        assert_eq!(format_g6(1.0 / 7.0), "0.142857");
        assert_eq!(format_g6(-1.0 / 7.0), "-0.142857");
        assert_eq!(format_g6(3.2e11), "3.2e11");
        assert_eq!(format_g6(1.23456789e-7), "1.23457e-7");
        assert_eq!(format_g6(123456789.0), "123457000");
        assert_eq!(format_g6(0.0001), "0.0001");
    }

    #[test]
    fn g6_round_trips_to_relative_1e_minus_5() {
        let values = [
            1.0,
            -2.5,
            0.577350,
            1234.5678,
            9.9999e-9,
            7.77e17,
            0.000123456,
        ];
        for &v in &values {
            let parsed: f64 = format_g6(v).parse().unwrap();
            assert!(
                ((parsed - v) / v).abs() < 1e-5,
                "{v} -> {} -> {parsed}",
                format_g6(v)
            );
        }
    }

    #[test]
    fn run_csv_round_trips() {
        let records = vec![
            RunRecord {
                problem: "deceptive:2:0.1".to_string(),
                selection: "fuss".to_string(),
                deletion: "random".to_string(),
                tournament_k: None,
                capacity: 1000,
                crossover_probability: 0.25,
                mutation_probability: 0.5,
                seed: 42,
                cycles: 123456,
                generations: 123.456,
                best_fitness: 4.0,
                best_raw: 4.0,
                t_target: Some(9876),
            },
            RunRecord {
                problem: "tsp:20".to_string(),
                selection: "tour:12".to_string(),
                deletion: "fuds".to_string(),
                tournament_k: Some(12),
                capacity: 250,
                crossover_probability: 0.5,
                mutation_probability: 0.5,
                seed: 7,
                cycles: 55000,
                generations: 220.0,
                best_fitness: 0.31415926,
                best_raw: 3.1831,
                t_target: None,
            },
        ];
        let mut buf = Vec::new();
        write_run_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let parsed = parse_run_csv(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].problem, records[0].problem);
        assert_eq!(parsed[0].t_target, records[0].t_target);
        assert_eq!(parsed[1].tournament_k, Some(12));
        for (a, b) in parsed.iter().zip(&records) {
            assert!(((a.best_fitness - b.best_fitness) / b.best_fitness).abs() < 1e-5);
        }
    }

    #[test]
    fn empty_record_list_writes_header_only() {
        let mut buf = Vec::new();
        write_run_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{RUN_CSV_HEADER}\n"));
    }

    #[test]
    fn histogram_rows_in_given_order() {
        let hist = vec![
            HistogramRecord {
                bin_low: 0.0,
                bin_high: 0.5,
                count: 3,
            },
            HistogramRecord {
                bin_low: 0.5,
                bin_high: 1.0,
                count: 7,
            },
        ];
        let mut buf = Vec::new();
        write_histogram_csv(&hist, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "bin_low,bin_high,count\n0,0.5,3\n0.5,1,7\n");
    }
}
