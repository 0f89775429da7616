//! Penalised-likelihood criteria and the model-comparison table.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::competitors::{competitor_fit, CompetitorKind};
use crate::mle::FitResult;

/// AIC, CAIC, BIC and HQIC for one fitted model. Natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub aic: f64,
    /// `None` when `n ≤ k + 1`.
    pub caic: Option<f64>,
    pub bic: f64,
    pub hqic: f64,
}

pub fn criteria(neg2loglik: f64, k: usize, n: usize) -> Criteria {
    let (kf, nf) = (k as f64, n as f64);
    let caic = (n > k + 1).then(|| neg2loglik + 2.0 * kf * nf / (nf - kf - 1.0));
    Criteria {
        aic: neg2loglik + 2.0 * kf,
        caic,
        bic: neg2loglik + kf * nf.ln(),
        hqic: neg2loglik + 2.0 * kf * nf.ln().ln(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Neg2LogLik,
    Aic,
    Caic,
    Bic,
    Hqic,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [Self::Neg2LogLik, Self::Aic, Self::Caic, Self::Bic, Self::Hqic];
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Neg2LogLik => "-2logL",
            Self::Aic => "AIC",
            Self::Caic => "CAIC",
            Self::Bic => "BIC",
            Self::Hqic => "HQIC",
        })
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: CompetitorKind,
    pub k: usize,
    /// `NaN` when the fit failed.
    pub neg2loglik: f64,
    pub aic: f64,
    pub caic: Option<f64>,
    pub bic: f64,
    pub hqic: f64,
    pub converged: bool,
    /// The model's density is known not to normalise.
    pub quarantined: bool,
    /// Smallest AIC among eligible rows.
    pub best: bool,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

impl ComparisonRow {
    /// Rows that may be designated best.
    pub fn eligible(&self) -> bool {
        self.converged && !self.quarantined && self.neg2loglik.is_finite()
    }

    pub fn value(&self, c: Criterion) -> Option<f64> {
        let v = match c {
            Criterion::Neg2LogLik => Some(self.neg2loglik),
            Criterion::Aic => Some(self.aic),
            Criterion::Caic => self.caic,
            Criterion::Bic => Some(self.bic),
            Criterion::Hqic => Some(self.hqic),
        };
        v.filter(|x| x.is_finite())
    }
}

/// Index of the eligible row minimising `c`; ties go to the earlier row.
pub fn best_by(rows: &[ComparisonRow], c: Criterion) -> Option<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| r.eligible())
        .filter_map(|(i, r)| r.value(c).map(|v| (i, v)))
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

fn row(kind: CompetitorKind, n: usize, fit: crate::Result<FitResult>) -> ComparisonRow {
    let k = kind.k();
    match fit {
        Ok(f) => {
            let c = criteria(f.neg2loglik, k, n);
            ComparisonRow {
                model: kind,
                k,
                neg2loglik: f.neg2loglik,
                aic: c.aic,
                caic: c.caic,
                bic: c.bic,
                hqic: c.hqic,
                converged: f.converged,
                quarantined: kind.quarantined(),
                best: false,
                fit: Some(f),
                error: None,
            }
        }
        Err(e) => ComparisonRow {
            model: kind,
            k,
            neg2loglik: f64::NAN,
            aic: f64::NAN,
            caic: None,
            bic: f64::NAN,
            hqic: f64::NAN,
            converged: false,
            quarantined: kind.quarantined(),
            best: false,
            fit: None,
            error: Some(e.to_string()),
        },
    }
}

/// Fits every requested model (in parallel), computes the criteria and
/// returns rows sorted by AIC, then by parameter count, then by model order.
/// Failed fits are kept as flagged rows at the end.
pub fn compare(data: &[f64], models: &[CompetitorKind], n_starts: usize, seed: u64) -> Vec<ComparisonRow> {
    let n = data.len();
    let mut rows: Vec<ComparisonRow> = models
        .par_iter()
        .map(|&kind| row(kind, n, competitor_fit(kind, data, n_starts, seed)))
        .collect();
    sort_rows(&mut rows);
    rows
}

/// Orders rows by AIC, parameter count and model order, and marks the best.
pub fn sort_rows(rows: &mut [ComparisonRow]) {
    rows.sort_by(|x, y| {
        let key = |r: &ComparisonRow| if r.aic.is_finite() { r.aic } else { f64::INFINITY };
        key(x)
            .total_cmp(&key(y))
            .then(x.k.cmp(&y.k))
            .then(x.model.cmp(&y.model))
    });
    for r in rows.iter_mut() {
        r.best = false;
    }
    if let Some(i) = best_by(rows, Criterion::Aic) {
        rows[i].best = true;
    }
}
