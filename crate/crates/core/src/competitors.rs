//! Rival Weibull-generated models used in the survival-data comparison.
//!
//! Every model is parameterised as `(α, β, a, b, c)` truncated to its own
//! parameter count, with the Weibull core `t = α x^β`. Densities are
//! evaluated in log space throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::baselines::{log1mexp, Baseline, BaselineKind};
use crate::error::{Error, Result};
use crate::llg::LogLindleyG;
use crate::mle::{fit_model, plotting_positions, weibull_plot, FitResult, LikelihoodModel, LlgModel};
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Largest exponent evaluated by the Gompertz-type factor before the
/// density is treated as zero.
const GW_EXP_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompetitorKind {
    Llw,
    Tw,
    Gw,
    Low,
    Liw,
    Olw,
    Ww,
    Mow,
    Mcw,
    Kw,
    Bw,
    Weibull,
}

impl CompetitorKind {
    /// All models in the order of the comparison table.
    pub const ALL: [CompetitorKind; 12] = [
        Self::Llw,
        Self::Tw,
        Self::Gw,
        Self::Low,
        Self::Liw,
        Self::Olw,
        Self::Ww,
        Self::Mow,
        Self::Mcw,
        Self::Kw,
        Self::Bw,
        Self::Weibull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Llw => "llw",
            Self::Tw => "tw",
            Self::Gw => "gw",
            Self::Low => "low",
            Self::Liw => "liw",
            Self::Olw => "olw",
            Self::Ww => "ww",
            Self::Mow => "mow",
            Self::Mcw => "mcw",
            Self::Kw => "kw",
            Self::Bw => "bw",
            Self::Weibull => "weibull",
        }
    }

    /// Number of free parameters.
    pub fn k(self) -> usize {
        match self {
            Self::Weibull => 2,
            Self::Liw | Self::Olw | Self::Mow => 3,
            Self::Mcw => 5,
            _ => 4,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        &["alpha", "beta", "a", "b", "c"][..self.k()]
    }

    /// Models whose density as written does not integrate to one. Their fitted
    /// likelihoods are not comparable and they are never reported as best.
    pub fn quarantined(self) -> bool {
        matches!(self, Self::Gw)
    }

    /// Whether the model contains the plain Weibull as a special case.
    pub fn nests_weibull(self) -> bool {
        matches!(self, Self::Mow | Self::Kw | Self::Bw | Self::Mcw | Self::Tw | Self::Weibull)
    }
}

impl fmt::Display for CompetitorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompetitorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or(Error::Unknown {
                what: "model",
                name: s.to_string(),
            })
    }
}

/// A competitor model with validated parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitorModel {
    kind: CompetitorKind,
    params: Vec<f64>,
}

impl CompetitorModel {
    pub fn new(kind: CompetitorKind, params: &[f64]) -> Result<Self> {
        if params.len() != kind.k() {
            return Err(Error::InvalidParameter {
                name: "params",
                value: params.len() as f64,
                reason: "wrong number of parameters for this model",
            });
        }
        for (name, &v) in kind.param_names().iter().zip(params) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if kind == CompetitorKind::Mcw && !ln_beta(params[2] / params[4], params[3]).is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: params[2],
                reason: "Beta(a/c, b) is not finite",
            });
        }
        Ok(Self {
            kind,
            params: params.to_vec(),
        })
    }

    pub fn kind(&self) -> CompetitorKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        log_pdf_unchecked(self.kind, &self.params, x)
    }
}

/// Log-density of `m` at `x`; `−∞` for `x ≤ 0`.
pub fn competitor_log_pdf(m: &CompetitorModel, x: f64) -> f64 {
    m.log_pdf(x)
}

/// `ln(1 − e^y)` for `y < 0`.
fn ln_one_minus_exp(y: f64) -> f64 {
    log1mexp(-y)
}

fn log_pdf_unchecked(kind: CompetitorKind, p: &[f64], x: f64) -> f64 {
    if !(x > 0.0) || x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let (alpha, beta) = (p[0], p[1]);
    let lx = x.ln();
    let t = alpha * (beta * lx).exp();
    // log G and log g of the Weibull core
    let lg_cdf = log1mexp(t);
    let lg_pdf = (alpha * beta).ln() + (beta - 1.0) * lx - t;
    let v = match kind {
        CompetitorKind::Weibull => lg_pdf,
        CompetitorKind::Llw => {
            let base = Baseline::Weibull { alpha, beta };
            match LogLindleyG::new(p[2], p[3], base) {
                Ok(d) => d.log_pdf(x),
                Err(_) => f64::NEG_INFINITY,
            }
        }
        CompetitorKind::Tw => {
            let (a, b) = (p[2], p[3]);
            let gb = (b * lg_cdf).exp();
            (2.0 * a * b).ln()
                + lg_pdf
                + (a * b - 1.0) * lg_cdf
                + ln_one_minus_exp(b * lg_cdf)
                + (a - 1.0) * (1.0 - gb).ln_1p()
        }
        CompetitorKind::Gw => {
            let (a, b) = (p[2], p[3]);
            let e = b * t;
            if e > GW_EXP_CAP {
                f64::NEG_INFINITY
            } else {
                (a * alpha * beta).ln() + (beta - 1.0) * lx + (1.0 + b) * t - (a / b) * e.exp_m1()
            }
        }
        CompetitorKind::Low => {
            let (a, b) = (p[2], p[3]);
            a.ln() + a * b.ln() + (alpha * beta).ln() + (beta - 1.0) * lx - (a + 1.0) * (b + t).ln()
        }
        CompetitorKind::Liw => {
            let a = p[2];
            2.0 * a.ln() - a.ln_1p() + (alpha * beta).ln() + (beta - 1.0) * lx - a * t + t.ln_1p()
        }
        CompetitorKind::Olw => {
            let a = p[2];
            2.0 * a.ln() - a.ln_1p() + (alpha * beta).ln() + (beta - 1.0) * lx + 2.0 * t
                - a * t.exp_m1()
        }
        CompetitorKind::Ww => {
            let (a, b) = (p[2], p[3]);
            let m = -lg_cdf;
            (a * b).ln() + lg_pdf - lg_cdf + (b - 1.0) * m.ln() - a * m.powf(b)
        }
        CompetitorKind::Mow => {
            let a = p[2];
            // 1 − (1 − a) e^{−t} = (1 − e^{−t}) + a e^{−t}
            let denom = -(-t).exp_m1() + a * (-t).exp();
            a.ln() + lg_pdf - 2.0 * denom.ln()
        }
        CompetitorKind::Mcw => {
            let (a, b, c) = (p[2], p[3], p[4]);
            c.ln() - ln_beta(a / c, b) + lg_pdf + (a - 1.0) * lg_cdf + (b - 1.0) * ln_one_minus_exp(c * lg_cdf)
        }
        CompetitorKind::Kw => {
            let (a, b) = (p[2], p[3]);
            (a * b).ln() + lg_pdf + (a - 1.0) * lg_cdf + (b - 1.0) * ln_one_minus_exp(a * lg_cdf)
        }
        CompetitorKind::Bw => {
            let (a, b) = (p[2], p[3]);
            -ln_beta(a, b) + (alpha * beta).ln() + (beta - 1.0) * lx - b * t + (a - 1.0) * lg_cdf
        }
    };
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

// Stirling-series remainder of ln Γ(x) for x ≥ 10.
fn ln_gamma_correction(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let x2 = 1.0 / (x * x);
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * x2 + c;
    }
    acc / x
}

/// `ln B(p, q)` without the cancellation of three large log-gamma values.
pub fn ln_beta(p: f64, q: f64) -> f64 {
    if !(p > 0.0 && q > 0.0) {
        return f64::NAN;
    }
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    let s = p + q;
    const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
    if p >= 10.0 {
        let corr = ln_gamma_correction(p) + ln_gamma_correction(q) - ln_gamma_correction(s);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / s).ln() + q * (-p / s).ln_1p()
    } else if q >= 10.0 {
        let corr = ln_gamma_correction(q) - ln_gamma_correction(s);
        ln_gamma(p) + corr + p - p * s.ln() + (q - 0.5) * (-p / s).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(s)
    }
}

/// Likelihood wrapper used by the fitting harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompetitorLikelihood {
    pub kind: CompetitorKind,
}

impl CompetitorLikelihood {
    /// Profile fit of `(α, β)` with the shape parameters held fixed.
    fn refine_core(&self, start: Vec<f64>, data: &[f64]) -> Vec<f64> {
        let extras = start[2..].to_vec();
        let f = |c: &[f64]| {
            let mut p = vec![c[0].exp(), c[1].exp()];
            p.extend_from_slice(&extras);
            -self.loglik(&p, data)
        };
        let opts = NelderMeadOptions {
            x_tol: 1e-6,
            f_tol: 1e-8,
            max_evals: 2000,
            restarts: 1,
            ..Default::default()
        };
        let m = nelder_mead(f, &[start[0].ln(), start[1].ln()], &opts);
        if m.value.is_finite() {
            let mut p = vec![m.x[0].exp(), m.x[1].exp()];
            p.extend(extras);
            p
        } else {
            start
        }
    }
}

impl LikelihoodModel for CompetitorLikelihood {
    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn param_names(&self) -> Vec<&'static str> {
        self.kind.param_names().to_vec()
    }

    fn positive(&self) -> Vec<bool> {
        vec![true; self.kind.k()]
    }

    fn loglik(&self, params: &[f64], data: &[f64]) -> f64 {
        if params.len() != self.kind.k() || params.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return f64::NEG_INFINITY;
        }
        let mut s = 0.0;
        for &x in data {
            s += log_pdf_unchecked(self.kind, params, x);
            if s == f64::NEG_INFINITY {
                break;
            }
        }
        if s.is_nan() || s == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            s
        }
    }

    fn validate_data(&self, data: &[f64]) -> Result<()> {
        match data.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            None => Ok(()),
            Some(x) => Err(Error::Data(format!(
                "model {} needs positive observations, found {x}",
                self.kind
            ))),
        }
    }

    fn initial_points(&self, data: &[f64]) -> Vec<Vec<f64>> {
        if self.kind == CompetitorKind::Llw {
            // reorder (a, b, α, β) to (α, β, a, b)
            return LlgModel::new(BaselineKind::Weibull)
                .initial_points(data)
                .into_iter()
                .map(|p| vec![p[2], p[3], p[0], p[1]])
                .collect();
        }
        let (xs, ps) = plotting_positions(data);
        let (alpha, beta) = weibull_plot(&xs, &ps).unwrap_or((1.0, 1.0));
        let grid: Vec<Vec<f64>> = match self.kind.k() {
            2 => vec![vec![]],
            3 => [0.01, 0.1, 0.5, 1.0, 5.0, 50.0].iter().map(|&a| vec![a]).collect(),
            4 => {
                let mut g = Vec::new();
                for a in [0.5, 1.0, 5.0, 15.0] {
                    for b in [0.1, 0.5, 2.0] {
                        g.push(vec![a, b]);
                    }
                }
                g
            }
            _ => {
                let mut g = Vec::new();
                for a in [0.5, 1.0, 5.0, 15.0] {
                    for b in [0.1, 0.5, 2.0] {
                        g.push(vec![a, b, 1.0]);
                    }
                }
                g
            }
        };
        grid.into_iter()
            .map(|extras| {
                let mut p = vec![alpha, beta];
                p.extend(extras);
                self.refine_core(p, data)
            })
            .collect()
    }
}

/// Maximum-likelihood fit of a competitor model.
pub fn competitor_fit(kind: CompetitorKind, data: &[f64], n_starts: usize, seed: u64) -> Result<FitResult> {
    fit_model(&CompetitorLikelihood { kind }, data, n_starts, seed)
}
