//! Subcommand implementations. Each returns the full stdout text.

use serde_json::{json, Map, Value};

use loglindley::competitors::{competitor_fit, CompetitorKind, CompetitorModel};
use loglindley::selection::{best_by, criteria, Criterion};
use loglindley::{mle, series, shapes, BaselineKind, FitResult, LogLindleyG};

use crate::format::{num, opt, table};
use crate::params;
use crate::{DistArgs, Failure, FitArgs};

fn named(names: &[String], values: impl Iterator<Item = Value>) -> Value {
    Value::Object(names.iter().cloned().zip(values).collect::<Map<_, _>>())
}

fn fit_json(r: &FitResult, baseline: Option<BaselineKind>) -> Value {
    let c = criteria(r.neg2loglik, r.k(), r.n);
    let mut v = json!({
        "model": r.model,
        "n": r.n,
        "k": r.k(),
        "estimates": named(&r.param_names, r.estimates.iter().map(|&x| json!(x))),
        "std_errors": named(&r.param_names, r.std_errors.iter().map(|&x| json!(x))),
        "neg2loglik": r.neg2loglik,
        "aic": c.aic,
        "caic": c.caic,
        "bic": c.bic,
        "hqic": c.hqic,
        "converged": r.converged,
        "pseudo_inverse": r.pseudo_inverse,
        "hessian_condition": r.hessian_condition,
        "n_evals": r.n_evals,
        "starts_used": r.starts_used,
    });
    if let Some(b) = baseline {
        v["baseline"] = json!(b.name());
    }
    v
}

pub fn fit(args: &FitArgs, model: &str, baseline: &str) -> Result<String, Failure> {
    let kind = params::model_kind(model)?;
    let base = params::baseline_kind(baseline)?;
    let data = params::dataset(&args.data)?;
    let result = if kind == CompetitorKind::Llw && base != BaselineKind::Weibull {
        mle::fit(data.values(), base, args.starts, args.seed)?
    } else {
        competitor_fit(kind, data.values(), args.starts, args.seed)?
    };
    let baseline = (kind == CompetitorKind::Llw).then_some(base);
    if args.json {
        return Ok(format!("{}\n", fit_json(&result, baseline)));
    }
    let mut out = format!("model {}", result.model);
    if let Some(b) = baseline {
        out.push_str(&format!(" (baseline {b})"));
    }
    out.push_str(&format!("  data {}  n = {}\n\n", data.label(), result.n));
    let rows: Vec<Vec<String>> = result
        .param_names
        .iter()
        .zip(result.estimates.iter().zip(&result.std_errors))
        .map(|(n, (e, s))| vec![n.clone(), num(*e), opt(*s)])
        .collect();
    out.push_str(&table(&["parameter", "estimate", "std.error"], &rows));
    let c = criteria(result.neg2loglik, result.k(), result.n);
    out.push('\n');
    out.push_str(&table(
        &["-2logL", "AIC", "CAIC", "BIC", "HQIC"],
        &[vec![num(result.neg2loglik), num(c.aic), opt(c.caic), num(c.bic), num(c.hqic)]],
    ));
    out.push_str(&format!(
        "\nconverged {}  evaluations {}  starts {}  information condition {}{}\n",
        result.converged,
        result.n_evals,
        result.starts_used,
        num(result.hessian_condition),
        if result.pseudo_inverse {
            "  (information not positive definite: pseudo-inverse standard errors)"
        } else {
            ""
        }
    ));
    Ok(out)
}

pub fn compare(args: &FitArgs, models: &str) -> Result<String, Failure> {
    let models = params::models(models)?;
    let data = params::dataset(&args.data)?;
    let rows = loglindley::compare(data.values(), &models, args.starts, args.seed);
    if rows.iter().all(|r| r.fit.is_none()) {
        let msgs: Vec<String> = rows.iter().filter_map(|r| r.error.clone()).collect();
        return Err(Failure {
            code: crate::EXIT_FIT,
            message: msgs.join("; "),
        });
    }
    if args.json {
        let mut out = String::new();
        for r in &rows {
            let estimates = r
                .fit
                .as_ref()
                .map(|f| named(&f.param_names, f.estimates.iter().map(|&x| json!(x))));
            let v = json!({
                "model": r.model.name(),
                "k": r.k,
                "neg2loglik": r.neg2loglik,
                "aic": r.aic,
                "caic": r.caic,
                "bic": r.bic,
                "hqic": r.hqic,
                "converged": r.converged,
                "quarantined": r.quarantined,
                "best": r.best,
                "estimates": estimates,
                "error": r.error,
            });
            out.push_str(&format!("{v}\n"));
        }
        return Ok(out);
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let status = match (&r.error, r.quarantined, r.converged) {
                (Some(_), _, _) => "failed",
                (None, true, _) => "quarantined",
                (None, false, false) => "not converged",
                _ => "ok",
            };
            vec![
                r.model.name().to_string(),
                r.k.to_string(),
                num(r.neg2loglik),
                num(r.aic),
                opt(r.caic),
                num(r.bic),
                num(r.hqic),
                if r.best { "*".into() } else { String::new() },
                status.into(),
            ]
        })
        .collect();
    let mut out = format!("data {}  n = {}\n\n", data.label(), data.n());
    out.push_str(&table(
        &["model", "k", "-2logL", "AIC", "CAIC", "BIC", "HQIC", "best", "status"],
        &body,
    ));
    out.push('\n');
    for c in Criterion::ALL {
        let name = best_by(&rows, c).map(|i| rows[i].model.name()).unwrap_or("none");
        out.push_str(&format!("best by {c}: {name}\n"));
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("warning: {}: {}", r.model, r.error.as_deref().unwrap_or(""));
    }
    Ok(out)
}

fn require_llw(dist: &DistArgs, command: &str) -> Result<LogLindleyG, Failure> {
    if params::model_kind(&dist.model)? != CompetitorKind::Llw {
        return Err(Failure::usage(format!(
            "{command} is only available for the llw model"
        )));
    }
    params::llg(&dist.baseline, &dist.params)
}

fn single(dist: &DistArgs, what: &str, at: f64, value: f64) -> String {
    if dist.json {
        format!(
            "{}\n",
            json!({"model": dist.model, "function": what, "at": at, "value": value})
        )
    } else {
        format!("{}\n", num(value))
    }
}

pub fn sample(dist: &DistArgs, n: usize, seed: u64) -> Result<String, Failure> {
    let d = require_llw(dist, "sample")?;
    let mut out = String::new();
    for x in d.sample(n, seed) {
        out.push_str(&format!("{x}\n"));
    }
    Ok(out)
}

pub fn quantile(dist: &DistArgs, u: f64) -> Result<String, Failure> {
    let d = require_llw(dist, "quantile")?;
    Ok(single(dist, "quantile", u, d.quantile(u)?))
}

pub fn cdf(dist: &DistArgs, x: f64) -> Result<String, Failure> {
    let d = require_llw(dist, "cdf")?;
    Ok(single(dist, "cdf", x, d.cdf(x)))
}

pub fn pdf(dist: &DistArgs, x: f64) -> Result<String, Failure> {
    let kind = params::model_kind(&dist.model)?;
    let value = if kind == CompetitorKind::Llw {
        params::llg(&dist.baseline, &dist.params)?.pdf(x)
    } else {
        let assign = params::parse_assignments(&dist.params)?;
        let p = params::take(&assign, kind.param_names())?;
        CompetitorModel::new(kind, &p)?.log_pdf(x).exp()
    };
    Ok(single(dist, "pdf", x, value))
}

pub fn shape(dist: &DistArgs, grid: usize) -> Result<String, Failure> {
    let d = require_llw(dist, "shape")?;
    let mut points = shapes::pdf_critical_points(&d, grid)?;
    points.extend(shapes::hazard_critical_points(&d, grid)?);
    if dist.json {
        let mut out = String::new();
        for p in &points {
            out.push_str(&format!("{}\n", serde_json::to_value(p).expect("serialisable")));
        }
        return Ok(out);
    }
    if points.is_empty() {
        return Ok("no critical points found on the scanned range\n".into());
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                format!("{:?}", p.source).to_lowercase(),
                format!("{:?}", p.kind).to_lowercase(),
                num(p.x),
                num(p.classifier_value),
                format!("{:.3e}", p.residual),
            ]
        })
        .collect();
    Ok(table(&["curve", "kind", "x", "classifier", "residual"], &rows))
}

pub fn moments(dist: &DistArgs, kmax: usize) -> Result<String, Failure> {
    let d = require_llw(dist, "moments")?;
    let w = series::expg_weights(d.a(), d.b(), kmax, kmax)?;
    let tail = w.tail();
    let values: Vec<Result<f64, String>> = (1..=4u32)
        .map(|r| series::moment(&d, r, kmax, kmax).map_err(|e| e.to_string()))
        .collect();
    if dist.json {
        let m: Vec<Value> = values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Ok(x) => json!({"r": i + 1, "value": x}),
                Err(e) => json!({"r": i + 1, "value": null, "error": e}),
            })
            .collect();
        return Ok(format!(
            "{}\n",
            json!({"kmax": kmax, "weight_sum": w.sum(), "tail": tail, "tail_limit": series::TAIL_LIMIT, "moments": m})
        ));
    }
    let rows: Vec<Vec<String>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vec![
                (i + 1).to_string(),
                v.as_ref().map(|x| num(*x)).unwrap_or_else(|_| "NA".into()),
            ]
        })
        .collect();
    let mut out = table(&["r", "E[X^r]"], &rows);
    out.push_str(&format!(
        "\ntruncation K = J = {kmax}  |1 - sum(w)| = {tail:.3e} (limit {:.0e}){}\n",
        series::TAIL_LIMIT,
        if tail > series::TAIL_LIMIT {
            "  series not converged: increase --kmax"
        } else {
            ""
        }
    ));
    Ok(out)
}
