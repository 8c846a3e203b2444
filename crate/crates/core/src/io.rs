//! CSV plumbing shared by the library and the command-line front-end.
//! Metadata travels as leading `# key: value` lines; readers skip them.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::response::{ComplexResponse, FrequencyGrid};

/// Prefixes `body` with `# key: value` lines in the given order.
pub fn with_header(meta: &[(&str, String)], body: &str) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        // keep each entry on one line
        let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
    }
    out.push_str(body);
    out
}

/// `# key: value` metadata from the top of a file.
pub fn read_header(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| {
            let (k, v) = l.trim_start_matches('#').split_once(':')?;
            Some((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Data rows split on commas, with the metadata and the column-name line
/// removed. Each row carries its 1-based line number.
pub fn data_rows(text: &str, context: &str) -> Result<(Vec<String>, Vec<(usize, Vec<String>)>)> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        match &header {
            None => header = Some(cols),
            Some(h) => {
                if cols.len() != h.len() {
                    return Err(Error::Parse {
                        context: format!("{context} line {}", n + 1),
                        msg: format!("expected {} columns, got {}", h.len(), cols.len()),
                    });
                }
                rows.push((n + 1, cols));
            }
        }
    }
    let header = header.ok_or_else(|| Error::Parse {
        context: context.to_string(),
        msg: "missing column header".into(),
    })?;
    Ok((header, rows))
}

fn column(header: &[String], name: &str, context: &str) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
        context: context.to_string(),
        msg: format!("missing column {name}"),
    })
}

fn number(s: &str, line: usize, context: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| Error::Parse {
        context: format!("{context} line {line}"),
        msg: format!("{s:?}: {e}"),
    })
}

/// Reads a complex response from the `f_Hz`, `Re*` and `Im*` columns
/// named by `re` and `im` (e.g. `ReH`/`ImH`, `ReZeq`/`ImZeq`).
pub fn parse_response_columns(text: &str, re: &str, im: &str, context: &str) -> Result<ComplexResponse> {
    let (header, rows) = data_rows(text, context)?;
    let (cf, cr, ci) = (
        column(&header, "f_Hz", context)?,
        column(&header, re, context)?,
        column(&header, im, context)?,
    );
    let mut f = Vec::with_capacity(rows.len());
    let mut v = Vec::with_capacity(rows.len());
    for (n, cols) in &rows {
        f.push(number(&cols[cf], *n, context)?);
        v.push(Complex64::new(number(&cols[cr], *n, context)?, number(&cols[ci], *n, context)?));
    }
    let grid = FrequencyGrid::new(f).map_err(|e| Error::Parse {
        context: context.to_string(),
        msg: e.to_string(),
    })?;
    ComplexResponse::new(grid, v)
}

pub fn parse_response_csv(text: &str, context: &str) -> Result<ComplexResponse> {
    parse_response_columns(text, "ReH", "ImH", context)
}

pub const REPLICATES_HEADER: &str = "replicate,f_Hz,ReH,ImH";

/// Long-format replicate table, one row per (replicate, frequency).
pub fn replicates_csv(reps: &[ComplexResponse]) -> String {
    let mut out = format!("{REPLICATES_HEADER}\n");
    for (r, h) in reps.iter().enumerate() {
        for (f, v) in h.freqs().iter().zip(&h.values) {
            let _ = writeln!(out, "{r},{f},{:e},{:e}", v.re, v.im);
        }
    }
    out
}

pub fn parse_replicates_csv(text: &str, context: &str) -> Result<Vec<ComplexResponse>> {
    let (header, rows) = data_rows(text, context)?;
    let (cr, cf, cre, cim) = (
        column(&header, "replicate", context)?,
        column(&header, "f_Hz", context)?,
        column(&header, "ReH", context)?,
        column(&header, "ImH", context)?,
    );
    let mut groups: Vec<(Vec<f64>, Vec<Complex64>)> = Vec::new();
    for (n, cols) in &rows {
        let r = cols[cr].parse::<usize>().map_err(|e| Error::Parse {
            context: format!("{context} line {n}"),
            msg: e.to_string(),
        })?;
        if r > groups.len() {
            return Err(Error::Parse {
                context: format!("{context} line {n}"),
                msg: format!("replicate {r} out of order"),
            });
        }
        if r == groups.len() {
            groups.push((Vec::new(), Vec::new()));
        }
        groups[r].0.push(number(&cols[cf], *n, context)?);
        groups[r]
            .1
            .push(Complex64::new(number(&cols[cre], *n, context)?, number(&cols[cim], *n, context)?));
    }
    if groups.is_empty() {
        return Err(Error::Parse {
            context: context.to_string(),
            msg: "no replicate rows".into(),
        });
    }
    groups
        .into_iter()
        .map(|(f, v)| {
            let grid = FrequencyGrid::new(f).map_err(|e| Error::Parse {
                context: context.to_string(),
                msg: e.to_string(),
            })?;
            ComplexResponse::new(grid, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(n: usize, k: f64) -> ComplexResponse {
        ComplexResponse::from_fn(FrequencyGrid::linear(1e3, 2e3, n).unwrap(), |f| Complex64::new(k * f, -1e-7 / f))
    }

    #[test]
    fn header_round_trip() {
        let text = with_header(&[("seed", "7".into()), ("grid", "lin:1:2:3".into())], "a,b\n1,2\n");
        assert_eq!(
            read_header(&text),
            vec![("seed".to_string(), "7".to_string()), ("grid".to_string(), "lin:1:2:3".to_string())]
        );
        let (h, rows) = data_rows(&text, "t").unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn response_round_trip_is_exact() {
        let h = resp(7, 0.37);
        let text = with_header(&[("x", "y".into())], &crate::sounding::response_csv(&h));
        assert_eq!(parse_response_csv(&text, "t").unwrap(), h);
    }

    #[test]
    fn replicates_round_trip() {
        let reps = vec![resp(5, 1.0), resp(5, 2.0), resp(5, 3.0)];
        assert_eq!(parse_replicates_csv(&replicates_csv(&reps), "t").unwrap(), reps);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_response_csv("f_Hz,ReH,ImH\n1,2,3\n2,x,3\n", "file.csv").unwrap_err();
        assert!(err.to_string().contains("file.csv line 3"), "{err}");
        assert!(parse_response_csv("f_Hz,ReH\n1,2\n", "t").is_err());
        assert!(parse_response_csv("", "t").is_err());
        assert!(parse_replicates_csv("replicate,f_Hz,ReH,ImH\n1,1,1,1\n", "t").is_err());
    }
}
