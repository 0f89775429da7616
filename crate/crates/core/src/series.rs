//! Linear representation of the LL-G density as a mixture of exp-G
//! densities, and the moments, moment generating function and order
//! statistics that follow from it.
//!
//! With `h_{i+1}(x) = (i+1) g(x) G(x)^i`,
//!
//! ```text
//! f(x) = Σᵢ wᵢ h_{i+1}(x)
//! wᵢ   = a² / ((1+ab)(i+1)) Σ_{k=i}^{K} (−1)^{k+i} C(k,i) Bₖ
//! Bₖ   = b·C(a−1,k) + Σ_{j=0}^{J} Σ_{l=0}^{j+1} (−1)^l/(j+1) C(j+1,l) C(a+l−1,k)
//! ```
//!
//! The inner `l`-sum telescopes to `(−1)^{j+1} C(a−1, k−j−1)` (zero for
//! `k ≤ j`), which is how `Bₖ` is evaluated here. The weights themselves are
//! alternating with magnitudes up to roughly `2^K`, so every sum that
//! involves them runs in big-integer fixed point.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::baselines::Baseline;
use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::llg::LogLindleyG;
use crate::quadrature::gauss_legendre;

/// Default truncation of both the outer (`K`) and inner (`J`) sums.
pub const DEFAULT_TRUNCATION: usize = 80;

/// Largest `|Σ wᵢ − 1|` accepted by [`moment`] and [`mgf`].
pub const TAIL_LIMIT: f64 = 1e-2;

const PANEL_POINTS: usize = 24;

/// Truncated exp-G mixture weights `w₀..w_K`.
#[derive(Debug, Clone)]
pub struct ExpGWeights {
    a: f64,
    b: f64,
    k_max: usize,
    j_max: usize,
    fx: Fixed,
    exact: Vec<BigInt>,
    w: Vec<f64>,
    sum: f64,
}

impl ExpGWeights {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// The weights rounded to double precision.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `Σ wᵢ`, accumulated exactly before rounding.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// Tail diagnostic `|Σ wᵢ − 1|`.
    pub fn tail(&self) -> f64 {
        (self.sum - 1.0).abs()
    }

    /// `Σ wᵢ h_{i+1}(x)` for the given baseline.
    pub fn reconstruct(&self, baseline: &Baseline, x: f64) -> f64 {
        let g = baseline.pdf(x);
        if g == 0.0 {
            return 0.0;
        }
        let big_g = self.fx.from_f64(baseline.cdf(x));
        // Horner in G over (i+1)·wᵢ
        let mut acc = BigInt::zero();
        for (i, w) in self.exact.iter().enumerate().rev() {
            acc = self.fx.mul(&acc, &big_g) + w * BigInt::from(i + 1);
        }
        g * self.fx.to_f64(&acc)
    }

    /// `Σ wᵢ Mᵢ` for a vector of exp-G expectations held in fixed point.
    fn combine(&self, m: &[BigInt]) -> f64 {
        let total = self
            .exact
            .iter()
            .zip(m)
            .fold(BigInt::zero(), |acc, (w, mi)| acc + self.fx.mul(w, mi));
        self.fx.to_f64(&total)
    }

    fn check_tail(&self) -> Result<()> {
        if self.tail() > TAIL_LIMIT {
            Err(Error::SeriesTail { tail: self.tail() })
        } else {
            Ok(())
        }
    }
}

/// Computes the truncated weights `w₀..w_K`.
pub fn expg_weights(a: f64, b: f64, k_max: usize, j_max: usize) -> Result<ExpGWeights> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "must be finite and strictly positive",
        });
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "must be finite and non-negative",
        });
    }
    if k_max < 1 || j_max < 1 {
        return Err(Error::InvalidParameter {
            name: "truncation",
            value: k_max.min(j_max) as f64,
            reason: "K and J must both be at least 1",
        });
    }
    let fx = Fixed::new(k_max as u64 + 128);
    let fa = fx.from_f64(a);
    let fb = fx.from_f64(b);

    // C(a−1, n), n = 0..=K, by the product recurrence
    let mut binom_am1 = Vec::with_capacity(k_max + 1);
    binom_am1.push(fx.one());
    for n in 1..=k_max {
        let factor = &fa - fx.int(n as i64);
        let next = fx.mul(&binom_am1[n - 1], &factor) / BigInt::from(n);
        binom_am1.push(next);
    }

    let mut big_b = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut s = fx.mul(&fb, &binom_am1[k]);
        for m in 1..=k.min(j_max + 1) {
            let term = &binom_am1[k - m] / BigInt::from(m);
            if m % 2 == 1 {
                s -= term;
            } else {
                s += term;
            }
        }
        big_b.push(s);
    }

    let prefactor = fx.from_f64(a * a / (1.0 + a * b));
    // Pascal rows: binom[k] holds C(k, 0..=k)
    let mut row: Vec<BigInt> = vec![BigInt::from(1)];
    let mut column_sums = vec![BigInt::zero(); k_max + 1];
    for (k, bk) in big_b.iter().enumerate() {
        if k > 0 {
            let mut next = Vec::with_capacity(k + 1);
            next.push(BigInt::from(1));
            for i in 1..k {
                next.push(&row[i - 1] + &row[i]);
            }
            next.push(BigInt::from(1));
            row = next;
        }
        for (i, c) in row.iter().enumerate() {
            let term = c * bk;
            if (k + i) % 2 == 1 {
                column_sums[i] -= term;
            } else {
                column_sums[i] += term;
            }
        }
    }
    let exact: Vec<BigInt> = column_sums
        .iter()
        .enumerate()
        .map(|(i, s)| fx.mul(&prefactor, s) / BigInt::from(i + 1))
        .collect();
    let w = exact.iter().map(|v| fx.to_f64(v)).collect();
    let sum = fx.to_f64(&exact.iter().fold(BigInt::zero(), |acc, v| acc + v));
    Ok(ExpGWeights {
        a,
        b,
        k_max,
        j_max,
        fx,
        exact,
        w,
        sum,
    })
}

/// Composite Gauss–Legendre rule on `(0, 1)` with panels graded
/// geometrically towards both ends.
fn unit_rule() -> (Vec<f64>, Vec<f64>) {
    let mut edges = Vec::new();
    for m in (1..=45).rev() {
        edges.push(0.5f64.powi(m));
    }
    edges.push(0.5);
    for m in 2..=52 {
        edges.push(1.0 - 0.5f64.powi(m));
    }
    let (gx, gw) = gauss_legendre(PANEL_POINTS);
    let mut nodes = Vec::with_capacity(edges.len() * PANEL_POINTS);
    let mut weights = Vec::with_capacity(edges.len() * PANEL_POINTS);
    for e in edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(c + h * x);
            weights.push(h * w);
        }
    }
    (nodes, weights)
}

/// `E[φ(Y_{i+1})]` for `i = 0..=K`, where `Y_{i+1} ~ exp-G(i+1)`, in fixed
/// point. Uses `E[φ(Y)] = ∫₀¹ φ(Q_G(u^{1/(i+1)})) du = ∫₀¹ φ(Q_G(v)) (i+1) vⁱ dv`
/// on one rule shared by every `i`.
fn expg_expectations<F: Fn(f64) -> f64>(baseline: &Baseline, phi: F, k_max: usize, fx: &Fixed) -> Result<Vec<BigInt>> {
    let (nodes, weights) = unit_rule();
    let mut acc = vec![BigInt::zero(); k_max + 1];
    for (v, w) in nodes.iter().zip(&weights) {
        let value = w * phi(baseline.quantile_unchecked(*v));
        if !value.is_finite() {
            return Err(Error::Domain {
                value: *v,
                domain: "quantiles with a finite integrand (moment does not exist)",
            });
        }
        if value == 0.0 {
            continue;
        }
        let fv = fx.from_f64(*v);
        let mut power = fx.from_f64(value);
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += &power * BigInt::from(i + 1);
            power = fx.mul(&power, &fv);
            if power.is_zero() {
                break;
            }
        }
    }
    Ok(acc)
}

/// Moments `E[Y_{i+1}^r]` of the exp-G components, rounded to `f64`.
pub fn expg_moments(baseline: &Baseline, r: u32, k_max: usize) -> Result<Vec<f64>> {
    let fx = Fixed::new(k_max as u64 + 128);
    let m = expg_expectations(baseline, |q| q.powi(r as i32), k_max, &fx)?;
    Ok(m.iter().map(|v| fx.to_f64(v)).collect())
}

/// `E[X^r] = Σ wᵢ E[Y_{i+1}^r]`.
pub fn moment(d: &LogLindleyG, r: u32, k_max: usize, j_max: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: 0.0,
            reason: "moment order must be positive",
        });
    }
    let w = expg_weights(d.a(), d.b(), k_max, j_max)?;
    w.check_tail()?;
    let m = expg_expectations(d.baseline(), |q| q.powi(r as i32), k_max, &w.fx)?;
    Ok(w.combine(&m))
}

/// `M(t) = Σ wᵢ E[exp(t Y_{i+1})]`.
pub fn mgf(d: &LogLindleyG, t: f64, k_max: usize, j_max: usize) -> Result<f64> {
    let w = expg_weights(d.a(), d.b(), k_max, j_max)?;
    w.check_tail()?;
    let m = expg_expectations(d.baseline(), |q| (t * q).exp(), k_max, &w.fx)?;
    Ok(w.combine(&m))
}

/// Density of the `k`-th order statistic of an i.i.d. sample of size `n`:
///
/// `f_{k,n}(x) = n! / ((n−k)!(k−1)!) Σ_{j=0}^{n−k} C(n−k, j) (−1)^j f(x) F(x)^{k+j−1}`.
pub fn order_stat_pdf(d: &LogLindleyG, k: usize, n: usize, x: f64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::Domain {
            value: k as f64,
            domain: "order statistic index 1 <= k <= n",
        });
    }
    let f = d.pdf(x);
    if f == 0.0 {
        return Ok(0.0);
    }
    let big_f = d.cdf(x);
    // n!/((n−k)!(k−1)!) = k·C(n, k)
    let lead = k as f64 * binomial(n, k);
    let m = n - k;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binomial(m, j) * big_f.powi((k + j - 1) as i32);
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok((lead * f * (sum + comp)).max(0.0))
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    /// Generalised binomial in plain floating point.
    fn binom_real(p: f64, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, j| acc * (p - j as f64) / (j + 1) as f64)
    }

    /// Direct evaluation of the weight formula including the `l`-sum, in
    /// double precision. Only trustworthy for small truncations.
    fn naive_weights(a: f64, b: f64, k_max: usize, j_max: usize) -> Vec<f64> {
        let big_b: Vec<f64> = (0..=k_max)
            .map(|k| {
                let mut s = b * binom_real(a - 1.0, k);
                for j in 0..=j_max {
                    for l in 0..=j + 1 {
                        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign / (j + 1) as f64
                            * binomial(j + 1, l)
                            * binom_real(a + l as f64 - 1.0, k);
                    }
                }
                s
            })
            .collect();
        (0..=k_max)
            .map(|i| {
                let s: f64 = (i..=k_max)
                    .map(|k| {
                        let sign = if (k + i) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(k, i) * big_b[k]
                    })
                    .sum();
                a * a / ((1.0 + a * b) * (i + 1) as f64) * s
            })
            .collect()
    }

    #[test]
    fn telescoped_form_matches_double_sum() {
        for &(a, b) in &[(2.5, 0.5), (0.7, 1.2), (1.0, 1.0)] {
            let k = 8;
            let fast = expg_weights(a, b, k, k).unwrap();
            let slow = naive_weights(a, b, k, k);
            for (x, y) in fast.weights().iter().zip(&slow) {
                assert!((x - y).abs() < 1e-8 * y.abs().max(1.0), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn reconstruction_weibull_baseline() {
        let d = LogLindleyG::weibull(1.0, 1.0, 2.5, 0.5).unwrap();
        let w = expg_weights(2.5, 0.5, 80, 80).unwrap();
        assert!(w.tail() < 1e-4, "tail {}", w.tail());
        for i in 0..20 {
            let u = 0.05 + 0.9 * i as f64 / 19.0;
            let x = d.baseline().quantile(u).unwrap();
            let err = (w.reconstruct(d.baseline(), x) - d.pdf(x)).abs();
            assert!(err < 1e-4, "x={x} err={err}");
        }
    }

    #[test]
    fn reconstruction_improves_with_truncation() {
        let d = LogLindleyG::weibull(1.0, 1.0, 2.5, 0.5).unwrap();
        let xs: Vec<f64> = (0..20)
            .map(|i| d.baseline().quantile(0.05 + 0.9 * i as f64 / 19.0).unwrap())
            .collect();
        let worst = |k: usize| {
            let w = expg_weights(2.5, 0.5, k, k).unwrap();
            xs.iter()
                .map(|&x| (w.reconstruct(d.baseline(), x) - d.pdf(x)).abs())
                .fold(0.0, f64::max)
        };
        let (e20, e40, e80) = (worst(20), worst(40), worst(80));
        assert!(e20 > e40 && e40 > e80, "{e20} {e40} {e80}");
    }

    #[test]
    fn integer_shape_collapses_binomials() {
        // a = 1: C(0, k) = 0 for k ≥ 1
        let w = expg_weights(1.0, 1.0, 80, 80).unwrap();
        let d = LogLindleyG::weibull(1.0, 1.0, 1.0, 1.0).unwrap();
        for &u in &[0.2, 0.4, 0.6, 0.8, 0.95] {
            let x = d.baseline().quantile(u).unwrap();
            assert!((w.reconstruct(d.baseline(), x) - d.pdf(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn uniform_first_moment() {
        // a = 1, b = 0 truncates −log G's series: 1 − Σw = 1/(K+1), so the
        // default K = 80 trips the tail check and K = 200 does not.
        let d = LogLindleyG::new(1.0, 0.0, Baseline::Uniform01).unwrap();
        assert!(matches!(moment(&d, 1, 80, 80), Err(Error::SeriesTail { .. })));
        let m = moment(&d, 1, 200, 200).unwrap();
        assert!((m - 0.25).abs() < 1e-4, "{m}");
    }

    #[test]
    fn uniform_mgf_matches_quadrature() {
        // ∫₀¹ eˣ (−ln x) dx; truncation error is about 1/K here
        let d = LogLindleyG::new(1.0, 0.0, Baseline::Uniform01).unwrap();
        let oracle = integrate(|x: f64| -x.exp() * x.ln(), 0.0, 1.0, 1e-13, 1e-13).value;
        let m = mgf(&d, 1.0, 1000, 1000).unwrap();
        assert_relative_eq!(m, oracle, max_relative = 1e-3);
    }

    #[test]
    fn uniform_moments_match_closed_form() {
        for &a in &[1.0, 2.0, 3.5] {
            for &b in &[0.0, 0.5, 2.0] {
                let d = LogLindleyG::new(a, b, Baseline::Uniform01).unwrap();
                for r in 1..=3u32 {
                    let rf = r as f64;
                    let exact = a * a * (1.0 + b * (a + rf)) / ((1.0 + a * b) * (a + rf).powi(2));
                    let m = moment(&d, r, 200, 200).unwrap();
                    assert!((m - exact).abs() < 1e-4, "a={a} b={b} r={r}: {m} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn second_moment_weibull_baseline() {
        let d = LogLindleyG::weibull(1.0, 1.0, 2.0, 1.0).unwrap();
        let oracle = integrate(|x| x * x * d.pdf(x), 0.0, f64::INFINITY, 1e-12, 1e-12).value;
        let m = moment(&d, 2, 80, 80).unwrap();
        assert_relative_eq!(m, oracle, max_relative = 1e-3);
    }

    #[test]
    fn expg_moments_of_uniform_are_exact() {
        // E[Y^r] for Y ~ exp-G(i+1) with G uniform is (i+1)/(i+1+r)
        let m = expg_moments(&Baseline::Uniform01, 2, 30).unwrap();
        for (i, v) in m.iter().enumerate() {
            let i = i as f64;
            assert_relative_eq!(*v, (i + 1.0) / (i + 3.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let d = LogLindleyG::weibull(1.0, 1.0, 2.5, 0.5).unwrap();
        assert!((mgf(&d, 0.0, 80, 80).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn mgf_increasing_for_positive_support() {
        let d = LogLindleyG::weibull(1.0, 2.0, 2.5, 0.5).unwrap();
        assert!(mgf(&d, 0.1, 80, 80).unwrap() < mgf(&d, 0.2, 80, 80).unwrap());
    }

    #[test]
    fn tail_diagnostic_rejects_short_truncation() {
        let d = LogLindleyG::new(0.3, 0.0, Baseline::Uniform01).unwrap();
        let w = expg_weights(0.3, 0.0, 5, 5).unwrap();
        assert!(w.tail() > TAIL_LIMIT);
        assert!(matches!(moment(&d, 1, 5, 5), Err(Error::SeriesTail { .. })));
    }

    #[test]
    fn order_statistic_special_cases() {
        let d = LogLindleyG::weibull(0.5, 1.3, 2.0, 0.4).unwrap();
        for &x in &[0.1, 0.8, 2.0, 5.0] {
            assert_eq!(order_stat_pdf(&d, 1, 1, x).unwrap(), d.pdf(x));
            let min2 = 2.0 * d.pdf(x) * (1.0 - d.cdf(x));
            assert_relative_eq!(order_stat_pdf(&d, 1, 2, x).unwrap(), min2, max_relative = 1e-12);
        }
        assert!(order_stat_pdf(&d, 0, 3, 1.0).is_err());
        assert!(order_stat_pdf(&d, 4, 3, 1.0).is_err());
    }

    #[test]
    fn order_statistic_densities_sum_to_n_f() {
        let d = LogLindleyG::weibull(0.5, 1.3, 2.0, 0.4).unwrap();
        for n in [1usize, 4, 9] {
            for &x in &[0.2, 1.0, 3.0] {
                let total: f64 = (1..=n).map(|k| order_stat_pdf(&d, k, n, x).unwrap()).sum();
                assert!((total - n as f64 * d.pdf(x)).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn order_statistic_density_integrates_to_one() {
        let d = LogLindleyG::weibull(0.5, 1.3, 2.0, 0.4).unwrap();
        let r = integrate(|x| order_stat_pdf(&d, 3, 5, x).unwrap(), 0.0, f64::INFINITY, 1e-12, 1e-12);
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }
}
