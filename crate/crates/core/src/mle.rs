//! Maximum-likelihood estimation: LL-G log-likelihood and score, multi-start
//! Nelder–Mead fitting, observed information and standard errors.
//!
//! The fitting harness is generic over [`LikelihoodModel`], so rival models
//! (see [`crate::competitors`]) reuse the same optimizer and inference code.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{Baseline, BaselineKind};
use crate::error::{Error, Result};
use crate::llg::{LogLindleyG, LOG_G_FLOOR};
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Default number of optimizer starts.
pub const DEFAULT_STARTS: usize = 12;

/// Generator shape grids the starts cycle through.
const A_GRID: [f64; 4] = [0.5, 1.0, 5.0, 15.0];
const B_GRID: [f64; 3] = [0.01, 0.5, 2.0];

/// A parametric family that can be fitted by maximum likelihood.
pub trait LikelihoodModel: Sync {
    /// Short identifier used in reports.
    fn name(&self) -> String;

    fn param_names(&self) -> Vec<&'static str>;

    /// Per-parameter constraint: `true` means strictly positive (optimized on
    /// the log scale), `false` means unconstrained.
    fn positive(&self) -> Vec<bool>;

    /// `Σ log f(xᵢ; params)`; `−∞` where the likelihood vanishes or the
    /// parameters are invalid.
    fn loglik(&self, params: &[f64], data: &[f64]) -> f64;

    fn validate_data(&self, data: &[f64]) -> Result<()>;

    /// Heuristic starting points; start `i` uses entry `i mod len`.
    fn initial_points(&self, data: &[f64]) -> Vec<Vec<f64>>;

    fn n_params(&self) -> usize {
        self.param_names().len()
    }
}

/// Maps constrained parameters to unconstrained optimizer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamTransform {
    positive: Vec<bool>,
}

impl ParamTransform {
    pub fn new(positive: Vec<bool>) -> Self {
        Self { positive }
    }

    pub fn forward(&self, params: &[f64]) -> Vec<f64> {
        params
            .iter()
            .zip(&self.positive)
            .map(|(&p, &pos)| if pos { p.ln() } else { p })
            .collect()
    }

    pub fn backward(&self, coords: &[f64]) -> Vec<f64> {
        coords
            .iter()
            .zip(&self.positive)
            .map(|(&c, &pos)| if pos { c.exp() } else { c })
            .collect()
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    pub param_names: Vec<String>,
    pub estimates: Vec<f64>,
    pub neg2loglik: f64,
    /// `None` where the inverse information gives no usable variance.
    pub std_errors: Vec<Option<f64>>,
    /// The information matrix was not positive definite and a pseudo-inverse
    /// was used.
    pub pseudo_inverse: bool,
    /// Ratio of extreme eigenvalue magnitudes of the observed information.
    pub hessian_condition: f64,
    pub converged: bool,
    pub n_evals: usize,
    pub starts_used: usize,
    pub n: usize,
}

impl FitResult {
    pub fn k(&self) -> usize {
        self.estimates.len()
    }

    pub fn loglik(&self) -> f64 {
        -0.5 * self.neg2loglik
    }
}

/// Standard errors together with how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct StdErrors {
    pub values: Vec<Option<f64>>,
    pub pseudo_inverse: bool,
    pub condition: f64,
}

// ---------------------------------------------------------------------------
// LL-G likelihood

/// LL-G model over a baseline family; parameters are `(a, b, θ…)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LlgModel {
    pub kind: BaselineKind,
}

impl LlgModel {
    pub fn new(kind: BaselineKind) -> Self {
        Self { kind }
    }

    fn baseline(&self, params: &[f64]) -> Option<Baseline> {
        if params.len() != 2 + self.kind.n_params() {
            return None;
        }
        self.kind.with_params(&params[2..]).ok()
    }
}

struct Terms {
    log_g: f64,
    log_cdf: f64,
}

fn terms(base: &Baseline, x: f64) -> Option<Terms> {
    if !base.in_support(x) {
        return None;
    }
    let log_cdf = base.log_cdf(x).clamp(LOG_G_FLOOR, 0.0);
    Some(Terms {
        log_g: base.log_pdf(x),
        log_cdf,
    })
}

fn valid_shapes(a: f64, b: f64) -> bool {
    a.is_finite() && a > 0.0 && b.is_finite() && b >= 0.0
}

fn llg_loglik_with_sign(params: &[f64], kind: BaselineKind, data: &[f64], sign: f64) -> f64 {
    let model = LlgModel::new(kind);
    let Some(base) = model.baseline(params) else {
        return f64::NEG_INFINITY;
    };
    let (a, b) = (params[0], params[1]);
    if !valid_shapes(a, b) {
        return f64::NEG_INFINITY;
    }
    let n = data.len() as f64;
    let mut s_log_g = 0.0;
    let mut s_log_cdf = 0.0;
    let mut s_log_l = 0.0;
    for &x in data {
        let Some(t) = terms(&base, x) else {
            return f64::NEG_INFINITY;
        };
        let l = b - t.log_cdf;
        if l <= 0.0 {
            return f64::NEG_INFINITY;
        }
        s_log_g += t.log_g;
        s_log_cdf += t.log_cdf;
        s_log_l += l.ln();
    }
    let v = 2.0 * n * a.ln() + sign * n * (a * b).ln_1p() + s_log_g + (a - 1.0) * s_log_cdf + s_log_l;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// LL-G log-likelihood
///
/// ```text
/// ℓ = 2n log a − n log(1+ab) + Σ log g + (a−1) Σ log G + Σ log(b − log G)
/// ```
///
/// at `params = (a, b, θ…)`. Returns `−∞` rather than an error when any
/// factor of the likelihood is non-positive.
pub fn loglik(params: &[f64], kind: BaselineKind, data: &[f64]) -> f64 {
    llg_loglik_with_sign(params, kind, data, -1.0)
}

/// The same expression with `+n log(1+ab)`, i.e. disagreeing with the
/// likelihood product it is meant to be the logarithm of. Kept only to
/// demonstrate that it does not reproduce fitted values.
pub fn loglik_plus_sign(params: &[f64], kind: BaselineKind, data: &[f64]) -> f64 {
    llg_loglik_with_sign(params, kind, data, 1.0)
}

/// Analytic gradient of [`loglik`] with respect to `(a, b, θ…)`.
pub fn score(params: &[f64], kind: BaselineKind, data: &[f64]) -> Result<Vec<f64>> {
    let base = LlgModel::new(kind)
        .baseline(params)
        .ok_or_else(|| Error::Fit(format!("invalid parameters {params:?}")))?;
    let (a, b) = (params[0], params[1]);
    LogLindleyG::new(a, b, base)?;
    let n = data.len() as f64;
    let p = kind.n_params();
    let c = 1.0 + a * b;
    let mut ua = 2.0 * n / a - n * b / c;
    let mut ub = -n * a / c;
    let mut ut = vec![0.0; p];
    for &x in data {
        let t = terms(&base, x).ok_or(Error::Domain {
            value: x,
            domain: "baseline support",
        })?;
        let l = b - t.log_cdf;
        if l <= 0.0 {
            return Err(Error::Domain {
                value: x,
                domain: "points with b − log G(x) > 0",
            });
        }
        ua += t.log_cdf;
        ub += 1.0 / l;
        let dlg = base.dlog_pdf_dtheta(x);
        let dcg = base.dcdf_dtheta_over_cdf(x);
        for j in 0..p {
            ut[j] += dlg[j] + (a - 1.0) * dcg[j] - dcg[j] / l;
        }
    }
    let mut out = vec![ua, ub];
    out.extend(ut);
    Ok(out)
}

/// Analytic second derivatives of [`loglik`] involving the generator shapes:
/// the `(a, b)` block `[[U_aa, U_ab], [U_ab, U_bb]]` and the mixed rows
/// `U_aθ`, `U_bθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeHessian {
    pub aa: f64,
    pub ab: f64,
    pub bb: f64,
    pub a_theta: Vec<f64>,
    pub b_theta: Vec<f64>,
}

pub fn shape_hessian(params: &[f64], kind: BaselineKind, data: &[f64]) -> Result<ShapeHessian> {
    let base = LlgModel::new(kind)
        .baseline(params)
        .ok_or_else(|| Error::Fit(format!("invalid parameters {params:?}")))?;
    let (a, b) = (params[0], params[1]);
    let n = data.len() as f64;
    let c2 = (1.0 + a * b).powi(2);
    let p = kind.n_params();
    let mut s_inv_l2 = 0.0;
    let mut a_theta = vec![0.0; p];
    let mut b_theta = vec![0.0; p];
    for &x in data {
        let t = terms(&base, x).ok_or(Error::Domain {
            value: x,
            domain: "baseline support",
        })?;
        let l = b - t.log_cdf;
        s_inv_l2 += 1.0 / (l * l);
        let dcg = base.dcdf_dtheta_over_cdf(x);
        for j in 0..p {
            a_theta[j] += dcg[j];
            b_theta[j] += dcg[j] / (l * l);
        }
    }
    Ok(ShapeHessian {
        aa: -2.0 * n / (a * a) + n * b * b / c2,
        ab: -n / c2,
        bb: n * a * a / c2 - s_inv_l2,
        a_theta,
        b_theta,
    })
}

/// Weibull-plot regression `ln(−ln(1 − v)) = ln α + β ln x`.
pub(crate) fn weibull_plot(xs: &[f64], vs: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(vs)
        .filter(|(x, v)| **x > 0.0 && **v > 0.0 && **v < 1.0)
        .map(|(x, v)| (x.ln(), (-(-v).ln_1p()).ln()))
        .collect();
    let (slope, intercept) = linear_fit(&pts)?;
    (slope > 0.0 && intercept.is_finite()).then(|| (intercept.exp(), slope))
}

fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Median-rank plotting positions of the sorted data.
pub(crate) fn plotting_positions(data: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let ps = (0..xs.len()).map(|i| (i as f64 + 0.7) / (n + 0.4)).collect();
    (xs, ps)
}

impl LlgModel {
    /// Baseline parameters whose cdf best matches the empirical baseline
    /// levels implied by shapes `(a, b)`: the probabilities `pᵢ` are pulled
    /// back through the generator with a uniform parent, then the baseline
    /// is fitted to those levels by a probability-plot regression.
    fn theta_seed(&self, a: f64, b: f64, xs: &[f64], ps: &[f64]) -> Option<Vec<f64>> {
        let gen = LogLindleyG::new(a, b, Baseline::Uniform01).ok()?;
        let vs: Vec<f64> = ps.iter().map(|&p| gen.quantile(p).unwrap_or(p)).collect();
        match self.kind {
            BaselineKind::Uniform => Some(vec![]),
            BaselineKind::Weibull => weibull_plot(xs, &vs).map(|(al, be)| vec![al, be]),
            BaselineKind::Normal => {
                let pts: Vec<(f64, f64)> = vs
                    .iter()
                    .zip(xs)
                    .filter(|(v, _)| **v > 0.0 && **v < 1.0)
                    .map(|(v, x)| (crate::baselines::std_normal_quantile(*v), *x))
                    .collect();
                let (sigma, mu) = linear_fit(&pts)?;
                (sigma > 0.0).then(|| vec![mu, sigma])
            }
        }
    }
}

impl LikelihoodModel for LlgModel {
    fn name(&self) -> String {
        format!("ll-{}", self.kind.name())
    }

    fn param_names(&self) -> Vec<&'static str> {
        let mut v = vec!["a", "b"];
        v.extend_from_slice(self.kind.param_names());
        v
    }

    fn positive(&self) -> Vec<bool> {
        let mut v = vec![true, true];
        v.extend_from_slice(self.kind.param_positive());
        v
    }

    fn loglik(&self, params: &[f64], data: &[f64]) -> f64 {
        loglik(params, self.kind, data)
    }

    fn validate_data(&self, data: &[f64]) -> Result<()> {
        let probe = self.kind.with_params(match self.kind {
            BaselineKind::Uniform => &[],
            _ => &[1.0, 1.0],
        })?;
        match data.iter().find(|&&x| !probe.in_support(x)) {
            None => Ok(()),
            Some(x) => Err(Error::Data(format!(
                "observation {x} lies outside the {} baseline support",
                self.kind
            ))),
        }
    }

    fn initial_points(&self, data: &[f64]) -> Vec<Vec<f64>> {
        let (xs, ps) = plotting_positions(data);
        let mut out = Vec::new();
        for &a in &A_GRID {
            for &b in &B_GRID {
                let theta = self.theta_seed(a, b, &xs, &ps).unwrap_or_else(|| match self.kind {
                    BaselineKind::Uniform => vec![],
                    BaselineKind::Normal => {
                        let m = data.iter().sum::<f64>() / data.len() as f64;
                        let sd = (data.iter().map(|x| (x - m).powi(2)).sum::<f64>()
                            / data.len() as f64)
                            .sqrt()
                            .max(1e-3);
                        vec![m, sd]
                    }
                    BaselineKind::Weibull => vec![1.0, 1.0],
                });
                let mut p = vec![a, b];
                p.extend(theta);
                out.push(p);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Generic fitting harness

struct StartOutcome {
    coords: Vec<f64>,
    value: f64,
    converged: bool,
    evals: usize,
}

/// Fits `model` by multi-start Nelder–Mead on the transformed coordinates.
///
/// Starts run in parallel, each with its own random stream derived from
/// `seed`; the merge keeps the best converged start (ties go to the lowest
/// start index), so results do not depend on scheduling.
pub fn fit_model<M: LikelihoodModel + ?Sized>(
    model: &M,
    data: &[f64],
    n_starts: usize,
    seed: u64,
) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::Data("cannot fit an empty dataset".into()));
    }
    model.validate_data(data)?;
    let n_starts = n_starts.max(1);
    let transform = ParamTransform::new(model.positive());
    let seeds = model.initial_points(data);
    if seeds.is_empty() {
        return Err(Error::Fit("model provided no starting points".into()));
    }
    let objective = |coords: &[f64]| {
        let p = transform.backward(coords);
        -model.loglik(&p, data)
    };
    let opts = NelderMeadOptions::default();

    let outcomes: Vec<StartOutcome> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut x0 = transform.forward(&seeds[i % seeds.len()]);
            // the first pass over the seeds is exact; later passes are jittered
            if i >= seeds.len() {
                for c in x0.iter_mut() {
                    *c += rng.random_range(-0.5..0.5);
                }
            }
            let m = nelder_mead(objective, &x0, &opts);
            StartOutcome {
                coords: m.x,
                value: m.value,
                converged: m.converged,
                evals: m.evals,
            }
        })
        .collect();

    let n_evals = outcomes.iter().map(|o| o.evals).sum();
    let pick = |require_converged: bool| {
        outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.value.is_finite() && (o.converged || !require_converged))
            .fold(None::<(usize, &StartOutcome)>, |best, (i, o)| match best {
                Some((_, b)) if b.value <= o.value => best,
                _ => Some((i, o)),
            })
    };
    let (best, converged) = match pick(true) {
        Some((_, o)) => (o, true),
        None => match pick(false) {
            Some((_, o)) => (o, false),
            None => {
                return Err(Error::Fit(format!(
                    "all {n_starts} starts diverged for model {} ({n_evals} evaluations)",
                    model.name()
                )))
            }
        },
    };

    let estimates = transform.backward(&best.coords);
    let neg2loglik = -2.0 * model.loglik(&estimates, data);
    if !neg2loglik.is_finite() {
        return Err(Error::Fit(format!(
            "likelihood of model {} is unbounded: the search ran to {estimates:?} \
             where -2 log L = {neg2loglik}",
            model.name()
        )));
    }
    let info = observed_information_generic(model, &estimates, data);
    let se = standard_errors(&info);
    Ok(FitResult {
        model: model.name(),
        param_names: model.param_names().iter().map(|s| s.to_string()).collect(),
        estimates,
        neg2loglik,
        std_errors: se.values,
        pseudo_inverse: se.pseudo_inverse,
        hessian_condition: se.condition,
        converged,
        n_evals,
        starts_used: n_starts,
        n: data.len(),
    })
}

/// Fits an LL-G model with the given baseline family.
pub fn fit(data: &[f64], kind: BaselineKind, n_starts: usize, seed: u64) -> Result<FitResult> {
    fit_model(&LlgModel::new(kind), data, n_starts, seed)
}

/// Relative step used by the numeric Hessian.
const HESSIAN_STEP: f64 = 1e-4;

/// Numeric Hessian of `−ℓ` in the original parameter coordinates.
///
/// Centered second differences with a step of `1e−4·|ξⱼ|` per coordinate
/// (`1e−4` if `ξⱼ = 0`).
pub fn observed_information_generic<M: LikelihoodModel + ?Sized>(
    model: &M,
    params: &[f64],
    data: &[f64],
) -> Vec<Vec<f64>> {
    let k = params.len();
    let f = |p: &[f64]| -model.loglik(p, data);
    let h: Vec<f64> = params
        .iter()
        .map(|&p| if p == 0.0 { HESSIAN_STEP } else { HESSIAN_STEP * p.abs() })
        .collect();
    let at = |d: &[(usize, f64)]| {
        let mut p = params.to_vec();
        for &(j, s) in d {
            p[j] += s * h[j];
        }
        f(&p)
    };
    let f0 = f(params);
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        out[i][i] = (at(&[(i, 1.0)]) - 2.0 * f0 + at(&[(i, -1.0)])) / (h[i] * h[i]);
        for j in 0..i {
            let v = (at(&[(i, 1.0), (j, 1.0)]) - at(&[(i, 1.0), (j, -1.0)])
                - at(&[(i, -1.0), (j, 1.0)])
                + at(&[(i, -1.0), (j, -1.0)]))
                / (4.0 * h[i] * h[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Observed information of the LL-G likelihood.
pub fn observed_information(params: &[f64], kind: BaselineKind, data: &[f64]) -> Vec<Vec<f64>> {
    observed_information_generic(&LlgModel::new(kind), params, data)
}

/// Square roots of the diagonal of the inverse information. Falls back to an
/// eigenvalue pseudo-inverse when the matrix is not positive definite.
pub fn standard_errors(info: &[Vec<f64>]) -> StdErrors {
    let k = info.len();
    if k == 0 {
        return StdErrors {
            values: vec![],
            pseudo_inverse: false,
            condition: 1.0,
        };
    }
    if info.iter().flatten().any(|v| !v.is_finite()) {
        return StdErrors {
            values: vec![None; k],
            pseudo_inverse: true,
            condition: f64::INFINITY,
        };
    }
    let m = DMatrix::from_fn(k, k, |i, j| 0.5 * (info[i][j] + info[j][i]));
    let eig = SymmetricEigen::new(m.clone());
    let abs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };

    let (inverse, pseudo) = match m.clone().cholesky() {
        Some(ch) => (ch.inverse(), false),
        None => {
            let tol = max * 1e-12 * k as f64;
            let inv_vals = eig
                .eigenvalues
                .map(|v| if v > tol { 1.0 / v } else { 0.0 });
            let q = &eig.eigenvectors;
            (q * DMatrix::from_diagonal(&inv_vals) * q.transpose(), true)
        }
    };
    let values = (0..k)
        .map(|i| {
            let v = inverse[(i, i)];
            (v.is_finite() && v > 0.0).then(|| v.sqrt())
        })
        .collect();
    StdErrors {
        values,
        pseudo_inverse: pseudo,
        condition,
    }
}
