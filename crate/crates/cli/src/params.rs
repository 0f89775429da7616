//! Parsing of `--params`, `--models` and `--data` values.

use std::io::Read;

use loglindley::{bjerkedal, parse_dataset, BaselineKind, CompetitorKind, Dataset, LogLindleyG};

use crate::Failure;

/// Splits `a=1,b=2` into ordered `(name, value)` pairs.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, f64)>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("expected name=value, got {item:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("parameter {name} has a non-numeric value {value:?}")))?;
            Ok((name.trim().to_ascii_lowercase(), v))
        })
        .collect()
}

/// Looks up `names` in the assignments, in that order, rejecting extras.
pub fn take(assign: &[(String, f64)], names: &[&str]) -> Result<Vec<f64>, Failure> {
    if let Some((extra, _)) = assign.iter().find(|(n, _)| !names.contains(&n.as_str())) {
        return Err(Failure::usage(format!(
            "unknown parameter {extra:?}; expected {}",
            names.join(", ")
        )));
    }
    names
        .iter()
        .map(|name| {
            assign
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Failure::usage(format!("missing parameter {name}")))
        })
        .collect()
}

pub fn baseline_kind(name: &str) -> Result<BaselineKind, Failure> {
    name.parse::<BaselineKind>().map_err(Failure::from)
}

pub fn model_kind(name: &str) -> Result<CompetitorKind, Failure> {
    name.parse::<CompetitorKind>().map_err(Failure::from)
}

/// The LL-G distribution described by `--baseline` and `--params`.
pub fn llg(baseline: &str, params: &str) -> Result<LogLindleyG, Failure> {
    let kind = baseline_kind(baseline)?;
    let mut names = vec!["a", "b"];
    names.extend_from_slice(kind.param_names());
    let v = take(&parse_assignments(params)?, &names)?;
    let base = kind.with_params(&v[2..])?;
    Ok(LogLindleyG::new(v[0], v[1], base)?)
}

pub fn models(list: &str) -> Result<Vec<CompetitorKind>, Failure> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(CompetitorKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let k = model_kind(name)?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    if out.is_empty() {
        return Err(Failure::usage("no models requested"));
    }
    Ok(out)
}

pub fn dataset(source: &str) -> Result<Dataset, Failure> {
    if source.eq_ignore_ascii_case("bjerkedal") {
        return Ok(bjerkedal());
    }
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| data_failure(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(source).map_err(|e| data_failure(format!("cannot read {source}: {e}")))?
    };
    Ok(parse_dataset(&text, source)?)
}

fn data_failure(message: String) -> Failure {
    Failure {
        code: crate::EXIT_DATA,
        message,
    }
}
