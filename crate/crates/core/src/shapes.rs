//! Critical points of the LL-G density and hazard rate.
//!
//! Density critical points solve
//! `g'/g − g/(G[b − log G]) + (a − 1) g/G = 0`, the derivative of `log f`.
//! Hazard critical points solve `d/dx log h = 0`, where
//! `d/dx log h = d/dx log f + f/(1 − F)`.
//!
//! Roots are bracketed by sign changes on a quantile-spaced grid and refined
//! by bisection. Density roots are classified by `λ(x)`, the derivative of the
//! density equation; hazard roots by a centred difference of `d/dx log h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llg::LogLindleyG;

pub const DEFAULT_GRID: usize = 2048;
/// Probability range scanned for sign changes.
pub const QUANTILE_RANGE: (f64, f64) = (1e-6, 1.0 - 1e-6);
/// `|classifier| ≤ INFLEXION_TOL` reports an inflexion.
pub const INFLEXION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Inflexion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSource {
    Density,
    Hazard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub kind: CriticalKind,
    pub source: CurveSource,
    /// Second-order quantity whose sign decided `kind`.
    pub classifier_value: f64,
    /// Left-hand side of the defining equation at `x`.
    pub residual: f64,
}

struct Pieces {
    g: f64,
    dlog_g: f64,
    d2g_over_g: f64,
    big_g: f64,
    ell: f64,
}

fn pieces(d: &LogLindleyG, x: f64) -> Result<Pieces> {
    let base = d.baseline();
    if !base.in_support(x) {
        return Err(Error::Domain {
            value: x,
            domain: "open support interval",
        });
    }
    let big_g = base.cdf(x);
    let ell = d.b() - base.log_cdf(x);
    if big_g <= 0.0 || ell <= 0.0 || !ell.is_finite() {
        return Err(Error::Domain {
            value: x,
            domain: "points with G(x)·(b − log G(x)) > 0",
        });
    }
    Ok(Pieces {
        g: base.pdf(x),
        dlog_g: base.dlog_pdf(x),
        d2g_over_g: base.d2pdf_over_pdf(x),
        big_g,
        ell,
    })
}

/// Left-hand side of the density critical-point equation (`d/dx log f`).
pub fn density_equation(d: &LogLindleyG, x: f64) -> Result<f64> {
    let p = pieces(d, x)?;
    let r = p.g / p.big_g;
    Ok(p.dlog_g - r / p.ell + (d.a() - 1.0) * r)
}

/// `λ(x)`, the derivative of [`density_equation`]:
///
/// ```text
/// λ = (g g'' − g'²)/g² + (a−1)(g'G − g²)/G² − [g'G L − g²(L − 1)] / (G² L²),   L = b − log G
/// ```
pub fn lambda_classifier(d: &LogLindleyG, x: f64) -> Result<f64> {
    let p = pieces(d, x)?;
    let dlog2 = p.d2g_over_g - p.dlog_g * p.dlog_g;
    let r = p.g / p.big_g;
    // g'/G = (g'/g)(g/G)
    let gp_over_g_big = p.dlog_g * r;
    let second = (d.a() - 1.0) * (gp_over_g_big - r * r);
    let third = (gp_over_g_big * p.ell - r * r * (p.ell - 1.0)) / (p.ell * p.ell);
    Ok(dlog2 + second - third)
}

/// The classifier with the third term's numerator written as
/// `g'G L² − g²(L² − 1)` over `G² L³`, a commonly quoted form.
/// It is not the derivative of the density equation; kept to quantify the
/// difference.
pub fn lambda_classifier_literal(d: &LogLindleyG, x: f64) -> Result<f64> {
    let p = pieces(d, x)?;
    let dlog2 = p.d2g_over_g - p.dlog_g * p.dlog_g;
    let r = p.g / p.big_g;
    let gp_over_g_big = p.dlog_g * r;
    let second = (d.a() - 1.0) * (gp_over_g_big - r * r);
    let l2 = p.ell * p.ell;
    let third = (gp_over_g_big * l2 - r * r * (l2 - 1.0)) / (l2 * p.ell);
    Ok(dlog2 + second - third)
}

/// `d/dx log h(x)`, the hazard critical-point equation.
pub fn hazard_equation(d: &LogLindleyG, x: f64) -> Result<f64> {
    let dens = density_equation(d, x)?;
    let s = d.survival(x);
    if s <= 0.0 {
        return Err(Error::Domain {
            value: x,
            domain: "points with F(x) < 1",
        });
    }
    Ok(dens + (d.log_pdf(x) - s.ln()).exp())
}

/// The hazard equation in its commonly quoted arrangement:
/// `g'/g − g/(G L) + (a−1) g/G − [g G^{a−1} + a G^{a−1}(1 + aL)²] / ([1 + ab − (1 + aL)G^a](1 + aL))`.
pub fn hazard_equation_literal(d: &LogLindleyG, x: f64) -> Result<f64> {
    let p = pieces(d, x)?;
    let (a, b) = (d.a(), d.b());
    let dens = density_equation(d, x)?;
    let ga1 = p.big_g.powf(a - 1.0);
    let one_al = 1.0 + a * p.ell;
    let num = p.g * ga1 + a * ga1 * one_al * one_al;
    let den = (1.0 + a * b - one_al * p.big_g.powf(a)) * one_al;
    Ok(dens - num / den)
}

fn grid(d: &LogLindleyG, grid_n: usize) -> Vec<f64> {
    let (lo, hi) = QUANTILE_RANGE;
    let n = grid_n.max(2);
    let mut xs: Vec<f64> = (0..n)
        .filter_map(|i| d.quantile(lo + (hi - lo) * i as f64 / (n - 1) as f64).ok())
        .collect();
    xs.dedup();
    xs
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let mut f_lo = f_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1e-300) {
            break;
        }
    }
    // pick the endpoint with the smaller residual
    let (fl, fh) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(if fl <= fh { lo } else { hi })
}

fn roots<F: Fn(f64) -> Result<f64>>(f: F, xs: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let values: Vec<Option<f64>> = xs.iter().map(|&x| f(x).ok().filter(|v| v.is_finite())).collect();
    for i in 0..xs.len().saturating_sub(1) {
        let (Some(a), Some(b)) = (values[i], values[i + 1]) else {
            continue;
        };
        if a == 0.0 {
            out.push(xs[i]);
        } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
            out.push(bisect(&f, xs[i], xs[i + 1], a)?);
        }
    }
    Ok(out)
}

fn classify(value: f64) -> CriticalKind {
    if value.abs() <= INFLEXION_TOL {
        CriticalKind::Inflexion
    } else if value < 0.0 {
        CriticalKind::Maximum
    } else {
        CriticalKind::Minimum
    }
}

/// Critical points of the density over the central support.
pub fn pdf_critical_points(d: &LogLindleyG, grid_n: usize) -> Result<Vec<CriticalPoint>> {
    let xs = grid(d, grid_n);
    roots(|x| density_equation(d, x), &xs)?
        .into_iter()
        .map(|x| {
            let lam = lambda_classifier(d, x)?;
            Ok(CriticalPoint {
                x,
                kind: classify(lam),
                source: CurveSource::Density,
                classifier_value: lam,
                residual: density_equation(d, x)?,
            })
        })
        .collect()
}

/// Critical points of the hazard rate over the central support.
pub fn hazard_critical_points(d: &LogLindleyG, grid_n: usize) -> Result<Vec<CriticalPoint>> {
    let xs = grid(d, grid_n);
    roots(|x| hazard_equation(d, x), &xs)?
        .into_iter()
        .map(|x| {
            let step = 1e-5 * x.abs().max(1e-8);
            let curvature = (hazard_equation(d, x + step)? - hazard_equation(d, x - step)?) / (2.0 * step);
            Ok(CriticalPoint {
                x,
                kind: classify(curvature),
                source: CurveSource::Hazard,
                classifier_value: curvature,
                residual: hazard_equation(d, x)?,
            })
        })
        .collect()
}
