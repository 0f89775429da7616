//! Parent distributions `G(x; θ)` that the generator is applied to.
//!
//! Every baseline exposes its cdf/pdf in linear and log form, a quantile
//! function, the first two spatial derivatives of the pdf (used by the shape
//! analysis) and the parameter derivatives of `log g` and `G` (used by the
//! analytic score).

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Which family a baseline belongs to, independent of parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Uniform,
    Normal,
    Weibull,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [Self::Uniform, Self::Normal, Self::Weibull];

    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Normal => "normal",
            Self::Weibull => "weibull",
        }
    }

    /// Parameter names in the order used by [`Baseline::params`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Uniform => &[],
            Self::Normal => &["mu", "sigma"],
            Self::Weibull => &["alpha", "beta"],
        }
    }

    /// `true` for parameters constrained to be strictly positive.
    pub fn param_positive(self) -> &'static [bool] {
        match self {
            Self::Uniform => &[],
            Self::Normal => &[false, true],
            Self::Weibull => &[true, true],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    /// Builds a baseline from a parameter slice ordered as [`Self::param_names`].
    pub fn with_params(self, theta: &[f64]) -> Result<Baseline> {
        if theta.len() != self.n_params() {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta.len() as f64,
                reason: "wrong number of baseline parameters",
            });
        }
        match self {
            Self::Uniform => Ok(Baseline::Uniform01),
            Self::Normal => Baseline::normal(theta[0], theta[1]),
            Self::Weibull => Baseline::weibull(theta[0], theta[1]),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniform01" => Ok(Self::Uniform),
            "normal" => Ok(Self::Normal),
            "weibull" => Ok(Self::Weibull),
            _ => Err(Error::Unknown {
                what: "baseline",
                name: s.to_string(),
            }),
        }
    }
}

/// A parent distribution with validated parameters.
///
/// Weibull uses the rate parameterisation `G(x) = 1 − exp(−α x^β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Baseline {
    Uniform01,
    Normal { mu: f64, sigma: f64 },
    Weibull { alpha: f64, beta: f64 },
}

impl Baseline {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Self::Normal {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn weibull(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self::Weibull {
            alpha: positive("alpha", alpha)?,
            beta: positive("beta", beta)?,
        })
    }

    pub fn kind(&self) -> BaselineKind {
        match self {
            Self::Uniform01 => BaselineKind::Uniform,
            Self::Normal { .. } => BaselineKind::Normal,
            Self::Weibull { .. } => BaselineKind::Weibull,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Uniform01 => vec![],
            Self::Normal { mu, sigma } => vec![mu, sigma],
            Self::Weibull { alpha, beta } => vec![alpha, beta],
        }
    }

    /// Open support interval `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Uniform01 => (0.0, 1.0),
            Self::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Weibull { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x > lo && x < hi
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform01 => x.clamp(0.0, 1.0),
            Self::Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            Self::Weibull { alpha, beta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-alpha * x.powf(beta)).exp_m1()
                }
            }
        }
    }

    /// `log G(x)`, accurate deep into the lower tail.
    pub fn log_cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform01 => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else if x >= 1.0 {
                    0.0
                } else {
                    x.ln()
                }
            }
            Self::Normal { mu, sigma } => std_normal_log_cdf((x - mu) / sigma),
            Self::Weibull { alpha, beta } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    log1mexp(alpha * x.powf(beta))
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.log_pdf(x).exp(),
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - LN_SQRT_2PI - sigma.ln()
            }
            Self::Weibull { alpha, beta } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return match beta {
                        b if b == 1.0 => alpha.ln(),
                        b if b < 1.0 => f64::INFINITY,
                        _ => f64::NEG_INFINITY,
                    };
                }
                alpha.ln() + beta.ln() + (beta - 1.0) * x.ln() - alpha * x.powf(beta)
            }
        }
    }

    /// Inverse cdf on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                value: u,
                domain: "(0, 1)",
            });
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform01 => u,
            Self::Normal { mu, sigma } => mu + sigma * std_normal_quantile(u),
            Self::Weibull { alpha, beta } => (-(-u).ln_1p() / alpha).powf(1.0 / beta),
        }
    }

    /// Quantile at `u = exp(log_u)`, keeping precision when `u` is tiny or
    /// close to one.
    pub(crate) fn quantile_from_log(&self, log_u: f64) -> f64 {
        match *self {
            Self::Weibull { alpha, beta } => {
                // -log(1 - u) with u = exp(log_u)
                let t = -log1mexp(-log_u);
                (t / alpha).powf(1.0 / beta)
            }
            _ => self.quantile_unchecked(log_u.exp()),
        }
    }

    /// `g'(x) / g(x)`.
    pub fn dlog_pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform01 => 0.0,
            Self::Normal { mu, sigma } => -(x - mu) / (sigma * sigma),
            Self::Weibull { alpha, beta } => {
                let t = alpha * x.powf(beta);
                ((beta - 1.0) - beta * t) / x
            }
        }
    }

    /// `g''(x) / g(x)`.
    pub fn d2pdf_over_pdf(&self, x: f64) -> f64 {
        let d1 = self.dlog_pdf(x);
        let d2log = match *self {
            Self::Uniform01 => 0.0,
            Self::Normal { sigma, .. } => -1.0 / (sigma * sigma),
            Self::Weibull { alpha, beta } => {
                let t = alpha * x.powf(beta);
                -((beta - 1.0) + beta * (beta - 1.0) * t) / (x * x)
            }
        };
        d2log + d1 * d1
    }

    /// `∂ log g(x; θ) / ∂θⱼ` for each baseline parameter.
    pub fn dlog_pdf_dtheta(&self, x: f64) -> Vec<f64> {
        match *self {
            Self::Uniform01 => vec![],
            Self::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                vec![z / sigma, (z * z - 1.0) / sigma]
            }
            Self::Weibull { alpha, beta } => {
                let lx = x.ln();
                let t = alpha * x.powf(beta);
                vec![(1.0 - t) / alpha, 1.0 / beta + lx - t * lx]
            }
        }
    }

    /// `(∂G(x; θ)/∂θⱼ) / G(x; θ)` for each baseline parameter.
    pub fn dcdf_dtheta_over_cdf(&self, x: f64) -> Vec<f64> {
        match *self {
            Self::Uniform01 => vec![],
            Self::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                let ratio = (self.log_pdf(x) - self.log_cdf(x)).exp();
                vec![-ratio, -z * ratio]
            }
            Self::Weibull { alpha, beta } => {
                let t = alpha * x.powf(beta);
                // e^{-t} / (1 - e^{-t}) = 1 / expm1(t)
                let s = t / t.exp_m1();
                vec![s / alpha, s * x.ln()]
            }
        }
    }
}

/// `log(1 − e^{−t})` for `t > 0`, switching forms at `t = log 2`.
pub(crate) fn log1mexp(t: f64) -> f64 {
    if t <= 0.0 {
        f64::NEG_INFINITY
    } else if t < LN_2 {
        (-(-t).exp_m1()).ln()
    } else {
        (-(-t).exp()).ln_1p()
    }
}

pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// `log Φ(z)`, with an asymptotic expansion once `Φ` would underflow.
pub fn std_normal_log_cdf(z: f64) -> f64 {
    if z > -30.0 {
        let p = std_normal_cdf(z);
        if p > 0.5 {
            (-std_normal_cdf(-z)).ln_1p()
        } else {
            p.ln()
        }
    } else {
        // Mills ratio series: Φ(z) ≈ φ(z)/|z| · (1 − 1/z² + 3/z⁴ − 15/z⁶)
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - LN_SQRT_2PI - (-z).ln() + series.ln()
    }
}

/// Inverse standard normal cdf: Acklam's rational approximation followed by
/// one Halley correction against the erfc-based cdf.
pub fn std_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // Halley refinement; the residual is taken on the smaller tail.
    let e = if x <= 0.0 {
        std_normal_cdf(x) - p
    } else {
        (1.0 - p) - std_normal_cdf(-x)
    };
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}
