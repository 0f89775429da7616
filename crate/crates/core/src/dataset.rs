//! Observation sets: text parsing and the embedded guinea-pig survival data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Survival times in days of 72 guinea pigs infected with virulent tubercle
/// bacilli (Bjerkedal, 1960).
pub const BJERKEDAL: [f64; 72] = [
    12.0, 15.0, 22.0, 24.0, 24.0, 32.0, 32.0, 33.0, 34.0, 38.0, 38.0, 43.0, 44.0, 48.0, 52.0,
    53.0, 54.0, 54.0, 55.0, 56.0, 57.0, 58.0, 58.0, 59.0, 60.0, 60.0, 60.0, 60.0, 61.0, 62.0,
    63.0, 65.0, 65.0, 67.0, 68.0, 70.0, 70.0, 72.0, 73.0, 75.0, 76.0, 76.0, 81.0, 83.0, 84.0,
    85.0, 87.0, 91.0, 95.0, 96.0, 98.0, 99.0, 109.0, 110.0, 121.0, 127.0, 129.0, 131.0, 143.0,
    146.0, 146.0, 175.0, 175.0, 211.0, 233.0, 258.0, 258.0, 263.0, 297.0, 341.0, 341.0, 376.0,
];

/// An ordered list of finite observations with a provenance label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    label: String,
}

impl Dataset {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "observation {} is not finite ({})",
                i + 1,
                values[i]
            )));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Errors unless every observation is strictly positive.
    pub fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            None => Ok(()),
            Some(i) => Err(Error::Data(format!(
                "observation {} = {} is not positive",
                i + 1,
                self.values[i]
            ))),
        }
    }
}

/// The embedded guinea-pig survival data.
pub fn bjerkedal() -> Dataset {
    Dataset::new(BJERKEDAL.to_vec(), "bjerkedal").expect("fixture is valid")
}

/// Parses numbers separated by any mix of whitespace and commas. Lines whose
/// first non-blank character is `#` are skipped.
pub fn parse_dataset(text: &str, label: impl Into<String>) -> Result<Dataset> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut start = None;
        // sentinel separator flushes the final token
        for (col, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            let sep = ch.is_whitespace() || ch == ',';
            match (sep, start) {
                (false, None) => start = Some(col),
                (true, Some(s)) => {
                    let token = &line[s..col];
                    let value: f64 = token.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        column: line[..s].chars().count() + 1,
                        token: token.to_string(),
                    })?;
                    if !value.is_finite() {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            column: line[..s].chars().count() + 1,
                            token: token.to_string(),
                        });
                    }
                    values.push(value);
                    start = None;
                }
                _ => {}
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Data("input contains no observations".into()));
    }
    Dataset::new(values, label)
}
