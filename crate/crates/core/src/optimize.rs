//! Derivative-free minimisation by the Nelder–Mead simplex method.

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Converged once the simplex diameter is below this…
    pub x_tol: f64,
    /// …and the spread of function values is below this.
    pub f_tol: f64,
    pub max_evals: usize,
    /// Number of times the simplex is rebuilt around the best vertex after
    /// converging, to guard against premature collapse.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            x_tol: 1e-9,
            f_tol: 1e-10,
            max_evals: 40_000,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best function value after each iteration.
    pub trace: Vec<f64>,
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&i, &j| self.values[i].total_cmp(&self.values[j]));
        self.points = idx.iter().map(|&i| self.points[i].clone()).collect();
        self.values = idx.iter().map(|&i| self.values[i]).collect();
    }

    fn diameter(&self) -> f64 {
        let best = &self.points[0];
        self.points[1..]
            .iter()
            .map(|p| p.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    fn spread(&self) -> f64 {
        self.values[self.values.len() - 1] - self.values[0]
    }
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimises `f` from `x0`. Non-finite values are treated as `+∞`, so `f`
/// may signal infeasible points by returning `∞` or NaN.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        clean(f(x))
    };
    let mut trace = Vec::new();
    let mut iterations = 0usize;

    let mut best_x = x0.to_vec();
    let mut best_v = eval(x0, &mut evals);
    let mut converged = false;

    for round in 0..=opts.restarts {
        let step = opts.initial_step * 0.5f64.powi(round as i32);
        let mut simplex = Simplex {
            points: vec![best_x.clone()],
            values: vec![best_v],
        };
        for i in 0..n {
            let mut p = best_x.clone();
            p[i] += step;
            let v = eval(&p, &mut evals);
            simplex.points.push(p);
            simplex.values.push(v);
        }
        simplex.sort();
        let start_v = best_v;
        converged = false;

        while evals < opts.max_evals {
            if simplex.diameter() < opts.x_tol && simplex.spread() < opts.f_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let worst = n;
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex.points[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex.points[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < simplex.values[0] {
                let xe = along(2.0);
                let fe = eval(&xe, &mut evals);
                if fe < fr {
                    simplex.points[worst] = xe;
                    simplex.values[worst] = fe;
                } else {
                    simplex.points[worst] = xr;
                    simplex.values[worst] = fr;
                }
            } else if fr < simplex.values[n - 1] {
                simplex.points[worst] = xr;
                simplex.values[worst] = fr;
            } else {
                let (xc, fc) = if fr < simplex.values[worst] {
                    let xc = along(0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < simplex.values[worst].min(fr) {
                    simplex.points[worst] = xc;
                    simplex.values[worst] = fc;
                } else {
                    let best = simplex.points[0].clone();
                    for i in 1..=n {
                        let p: Vec<f64> = simplex.points[i]
                            .iter()
                            .zip(&best)
                            .map(|(x, b)| b + 0.5 * (x - b))
                            .collect();
                        simplex.values[i] = eval(&p, &mut evals);
                        simplex.points[i] = p;
                    }
                }
            }
            simplex.sort();
            trace.push(simplex.values[0]);
        }

        best_x = simplex.points[0].clone();
        best_v = simplex.values[0];
        if evals >= opts.max_evals {
            break;
        }
        // a restart that no longer moves the optimum ends the search
        if round > 0 && (start_v - best_v).abs() <= opts.f_tol {
            break;
        }
    }

    Minimum {
        x: best_x,
        value: best_v,
        evals,
        iterations,
        converged,
        trace,
    }
}
