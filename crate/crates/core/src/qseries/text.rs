//! Line-oriented text form:
//!
//! ```text
//! #qseries offset=-1 trunc=3 modulus=none
//! -1 1
//! 0 0
//! 1 -2
//! 2 5
//! ```
//!
//! Extra `#` comment lines after the header are ignored by the parser.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;

use super::QSeries;
use crate::error::{Error, Result};

impl QSeries {
    pub fn header_line(&self) -> String {
        format!(
            "#qseries offset={} trunc={} modulus={}",
            self.offset(),
            self.trunc(),
            self.modulus()
                .map_or_else(|| "none".to_string(), ToString::to_string)
        )
    }

    /// Body lines `n <coefficient>`, one per exponent in the window.
    pub fn body_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 8);
        for (i, c) in self.coeffs().iter().enumerate() {
            let _ = writeln!(out, "{} {}", self.offset() + i as i64, c);
        }
        out
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.header_line(), self.body_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let (offset, trunc, modulus) = parse_header(header)?;
        if trunc < offset {
            return Err(Error::Parse(format!("trunc {trunc} below offset {offset}")));
        }
        let mut coeffs = Vec::with_capacity((trunc - offset) as usize);
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (n, c) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("malformed line {line:?}")))?;
            let n: i64 = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {line:?}")))?;
            let expected = offset + coeffs.len() as i64;
            if n != expected {
                return Err(Error::Parse(format!("expected exponent {expected}, found {n}")));
            }
            let c = BigInt::from_str(c.trim())
                .map_err(|_| Error::Parse(format!("bad coefficient in {line:?}")))?;
            coeffs.push(c);
        }
        let found = offset + coeffs.len() as i64;
        if found != trunc {
            return Err(Error::Parse(format!(
                "header declares trunc={trunc} but data ends at {found}"
            )));
        }
        let series = QSeries::from_coeffs(offset, coeffs);
        match modulus {
            None => Ok(series),
            Some(m) => {
                if series.coeffs().iter().any(|c| c.sign() == num_bigint::Sign::Minus || *c >= m) {
                    return Err(Error::Parse(format!("coefficient outside [0, {m})")));
                }
                series.reduce_mod(&m)
            }
        }
    }
}

fn parse_header(line: &str) -> Result<(i64, i64, Option<BigInt>)> {
    let rest = line
        .strip_prefix("#qseries")
        .ok_or_else(|| Error::Parse(format!("missing #qseries header: {line:?}")))?;
    let (mut offset, mut trunc, mut modulus) = (None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed header field {field:?}")))?;
        let bad = || Error::Parse(format!("bad header value {field:?}"));
        match key {
            "offset" => offset = Some(value.parse::<i64>().map_err(|_| bad())?),
            "trunc" => trunc = Some(value.parse::<i64>().map_err(|_| bad())?),
            "modulus" => {
                modulus = Some(if value == "none" {
                    None
                } else {
                    Some(BigInt::from_str(value).map_err(|_| bad())?)
                })
            }
            _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
        }
    }
    match (offset, trunc, modulus) {
        (Some(o), Some(t), Some(m)) => Ok((o, t, m)),
        _ => Err(Error::Parse("header needs offset, trunc and modulus".into())),
    }
}
