//! Plain-text instance files.
//!
//! ```text
//! # comment
//! 3
//! 1.0 1
//! 2.5 0.5
//! 4 2
//! ```
//!
//! The first content line is the sensor count `N`, followed by `N` lines of
//! `position data`. The single line `regular N Q` stands for `x_i = i`,
//! `Q_i = Q`.

use std::fmt::Write as _;

use minergy::NetworkInstance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn number(line: usize, what: &str, token: &str) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(line, format!("{what} {token:?} is not a finite number")),
    }
}

fn count(line: usize, token: &str) -> Result<usize, ParseError> {
    match token.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => err(line, format!("sensor count {token:?} must be a positive integer")),
    }
}

pub fn parse(text: &str) -> Result<NetworkInstance, ParseError> {
    let mut lines = text.lines().enumerate().filter_map(|(idx, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((idx + 1, content))
    });
    let Some((line, header)) = lines.next() else {
        return err(text.lines().count().max(1), "empty instance file");
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let inst = match fields.as_slice() {
        ["regular", n, q] => {
            let n = count(line, n)?;
            let q = number(line, "data volume", q)?;
            if q <= 0.0 {
                return err(line, format!("data volume {q} must be positive"));
            }
            NetworkInstance::regular(n, q).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?
        }
        [n] => {
            let n = count(line, n)?;
            let mut positions = Vec::with_capacity(n);
            let mut data = Vec::with_capacity(n);
            let mut last_line = line;
            for idx in 0..n {
                let Some((line, content)) = lines.next() else {
                    return err(last_line, format!("expected {n} sensor lines, found {idx}"));
                };
                last_line = line;
                let fields: Vec<&str> = content.split_whitespace().collect();
                let [x, q] = fields.as_slice() else {
                    return err(line, format!("expected \"position data\", found {content:?}"));
                };
                let x = number(line, "position", x)?;
                let q = number(line, "data volume", q)?;
                let prev = positions.last().copied().unwrap_or(0.0);
                if x <= prev {
                    return err(line, format!("position {x} must be greater than {prev}; positions must ascend"));
                }
                if q <= 0.0 {
                    return err(line, format!("data volume {q} must be positive"));
                }
                positions.push(x);
                data.push(q);
            }
            NetworkInstance::new(positions, data).map_err(|e| ParseError {
                line: last_line,
                message: e.to_string(),
            })?
        }
        _ => return err(line, format!("expected a sensor count or \"regular N Q\", found {header:?}")),
    };
    if let Some((line, content)) = lines.next() {
        return err(line, format!("unexpected content after the last sensor: {content:?}"));
    }
    Ok(inst)
}

/// Writes every sensor explicitly with shortest round-trip decimals.
pub fn serialize(inst: &NetworkInstance) -> String {
    let mut out = String::new();
    writeln!(out, "{}", inst.len()).unwrap();
    for (x, q) in inst.positions().iter().zip(inst.data_volumes()) {
        writeln!(out, "{x} {q}").unwrap();
    }
    out
}
