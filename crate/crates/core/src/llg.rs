//! The Log-Lindley generated distribution over an arbitrary baseline.
//!
//! With baseline cdf `G` and pdf `g`, the generated law has
//!
//! ```text
//! F(x) = [1 + ab − a·log G(x)] · G(x)^a / (1 + ab)
//! f(x) = a² g(x) [b − log G(x)] G(x)^(a−1) / (1 + ab)
//! ```
//!
//! and its quantile function is available in closed form through the lower
//! branch of the Lambert W function, which makes inverse-transform sampling
//! exact.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::Baseline;
use crate::error::{non_negative, positive, Error, Result};
use crate::lambert_w::w_minus1_from_log;

/// Lower clamp applied to `log G` so that sub-representable tails stay finite.
pub const LOG_G_FLOOR: f64 = -690.775_527_898_213_7; // ln(1e-300)

/// Generator shapes `(a, b)` together with the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlgParams {
    pub a: f64,
    pub b: f64,
    pub baseline: Baseline,
}

impl LlgParams {
    pub fn new(a: f64, b: f64, baseline: Baseline) -> Result<Self> {
        Ok(Self {
            a: positive("a", a)?,
            b: non_negative("b", b)?,
            baseline,
        })
    }
}

/// A fully specified LL-G distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLindleyG {
    params: LlgParams,
}

impl LogLindleyG {
    pub fn new(a: f64, b: f64, baseline: Baseline) -> Result<Self> {
        Ok(Self {
            params: LlgParams::new(a, b, baseline)?,
        })
    }

    pub fn from_params(params: LlgParams) -> Result<Self> {
        Self::new(params.a, params.b, params.baseline)
    }

    /// LL-Weibull with baseline `G(x) = 1 − exp(−α x^β)`.
    pub fn weibull(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, Baseline::weibull(alpha, beta)?)
    }

    pub fn params(&self) -> &LlgParams {
        &self.params
    }

    pub fn a(&self) -> f64 {
        self.params.a
    }

    pub fn b(&self) -> f64 {
        self.params.b
    }

    pub fn baseline(&self) -> &Baseline {
        &self.params.baseline
    }

    pub fn support(&self) -> (f64, f64) {
        self.params.baseline.support()
    }

    fn one_plus_ab(&self) -> f64 {
        1.0 + self.params.a * self.params.b
    }

    /// Clamped `log G(x)`; `None` at or below the lower support end.
    fn log_g(&self, x: f64) -> Option<f64> {
        let lg = self.params.baseline.log_cdf(x);
        if lg == f64::NEG_INFINITY {
            None
        } else {
            Some(lg.clamp(LOG_G_FLOOR, 0.0))
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let Some(lg) = self.log_g(x) else {
            return 0.0;
        };
        let (a, c) = (self.params.a, self.one_plus_ab());
        if lg == 0.0 {
            return 1.0;
        }
        ((a * lg).exp() * (c - a * lg) / c).min(1.0)
    }

    /// `1 − F(x)` without cancellation near the upper support end.
    pub fn survival(&self, x: f64) -> f64 {
        let Some(lg) = self.log_g(x) else {
            return 1.0;
        };
        let (a, b, c) = (self.params.a, self.params.b, self.one_plus_ab());
        let y = a * lg;
        // (1 + ab)(1 − e^y) + y e^y = −ab·expm1(y) + [1 − (1 − y) e^y]
        let tail = if y > -0.5 {
            // 1 − (1 − y)e^y = Σ_{n≥2} (n − 1) yⁿ / n!
            let mut term = 1.0;
            let mut sum = 0.0;
            for n in 1..40u32 {
                term *= y / n as f64;
                if n >= 2 {
                    sum += (n as f64 - 1.0) * term;
                }
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            sum
        } else {
            1.0 - (1.0 - y) * y.exp()
        };
        ((-a * b * y.exp_m1() + tail) / c).clamp(0.0, 1.0)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let base = &self.params.baseline;
        if !base.in_support(x) {
            return f64::NEG_INFINITY;
        }
        let Some(lg) = self.log_g(x) else {
            return f64::NEG_INFINITY;
        };
        let (a, b) = (self.params.a, self.params.b);
        2.0 * a.ln() - self.one_plus_ab().ln()
            + base.log_pdf(x)
            + (b - lg).ln()
            + (a - 1.0) * lg
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `f(x) / (1 − F(x))`. Fails where the survival function vanishes.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.survival(x);
        if s <= 0.0 {
            return Err(Error::Domain {
                value: x,
                domain: "points with F(x) < 1 (hazard undefined at the support end)",
            });
        }
        Ok((self.log_pdf(x) - s.ln()).exp())
    }

    /// Argument `z = −(1 + ab)·u·e^{−(1+ab)}` passed to `W₋₁` by the quantile
    /// function at probability `u`. Underflows to `−0` for large `ab`; see
    /// [`Self::lambert_log_argument`].
    pub fn lambert_argument(&self, u: f64) -> f64 {
        let c = self.one_plus_ab();
        -c * u * (-c).exp()
    }

    /// `ln(−z)` for the `W₋₁` argument at probability `u`.
    pub fn lambert_log_argument(&self, u: f64) -> f64 {
        let c = self.one_plus_ab();
        (c.ln() + u.ln() - c).min(-1.0)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                value: u,
                domain: "(0, 1)",
            });
        }
        let (a, c) = (self.params.a, self.one_plus_ab());
        let w = w_minus1_from_log(self.lambert_log_argument(u))?;
        // log G = (1 + ab)/a + W/a
        let log_g = ((c + w) / a).min(0.0);
        Ok(self.params.baseline.quantile_from_log(log_g))
    }

    /// Inverse-transform sample of size `n`; identical seeds give identical output.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(u)
                    .expect("Open01 draws lie strictly inside (0, 1)")
            })
            .collect()
    }
}
