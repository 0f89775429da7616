//! Human-readable number and table formatting.

/// Six decimal places; values too small or too large for that to be
/// meaningful switch to six significant digits in scientific notation.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NA".into() } else { format!("{v}") };
    }
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e9).contains(&a) {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NA".into())
}

/// Right-aligned columns under a header, first column left-aligned.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate().take(cols) {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i == 0 {
                s.push_str(&format!("{c:<w$}", w = width[i]));
            } else {
                s.push_str(&format!("{c:>w$}", w = width[i]));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(num(779.74715932), "779.747159");
        assert_eq!(num(0.0), "0.000000");
        assert_eq!(num(0.000142204), "1.422040e-4");
        assert_eq!(num(f64::NAN), "NA");
        assert_eq!(opt(None), "NA");
    }

    #[test]
    fn aligned_table() {
        let t = table(&["m", "v"], &[vec!["llw".into(), "1.0".into()], vec!["x".into(), "10.25".into()]]);
        assert_eq!(t, "m        v\nllw    1.0\nx    10.25\n");
    }
}
