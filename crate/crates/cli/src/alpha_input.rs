use anyhow::{anyhow, bail, Context};
use rotstate_core::{AlphaVector, Surd};

/// Parses α components from `--alpha` or a file.
///
/// JSON input (`{"n": .., "alpha": [..]}`) is taken as a full vector. Plain
/// text is a comma or whitespace separated list; when every entry is a
/// rational or radical expression the vector is exact, otherwise all entries
/// are read as floats.
pub fn parse(text: &str, n: Option<usize>, reduced: bool) -> anyhow::Result<AlphaVector> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        if reduced {
            bail!("--reduced does not apply to JSON input");
        }
        return serde_json::from_str(trimmed).context("parsing JSON α-vector");
    }
    let parts: Vec<&str> = trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        bail!("no α components given");
    }
    let dim = if reduced { parts.len() + 1 } else { parts.len() };
    if let Some(n) = n {
        if n != dim {
            let want = if reduced { n.saturating_sub(1) } else { n };
            bail!("expected {want} components for N = {n}, got {}", parts.len());
        }
    }
    let exact: Option<Vec<Surd>> = parts
        .iter()
        .map(|p| if looks_exact(p) { p.parse::<Surd>().ok() } else { None })
        .collect();
    let alpha = match exact {
        Some(ex) if reduced => AlphaVector::from_reduced_exact(dim, &ex)?,
        Some(ex) => AlphaVector::from_exact(ex)?,
        None => {
            let vals = parts
                .iter()
                .map(|p| p.parse::<f64>().map_err(|_| anyhow!("cannot parse α component {p:?}")))
                .collect::<anyhow::Result<Vec<f64>>>()?;
            if reduced {
                AlphaVector::from_reduced_f64(dim, &vals)?
            } else {
                AlphaVector::from_f64(vals)?
            }
        }
    };
    Ok(alpha)
}

fn looks_exact(s: &str) -> bool {
    !s.contains(['.', 'e', 'E']) || s.contains("sqrt")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_float_inputs() {
        let a = parse("2/3,0,0", Some(4), true).unwrap();
        assert!(a.is_exact());
        assert!(a.is_state());
        let b = parse("0.5 0.5", None, false).unwrap();
        assert!(!b.is_exact());
        let c = parse("1, sqrt(3)/3", None, false).unwrap();
        assert!(c.is_exact());
        assert!(parse("1,2,3", Some(4), false).is_err());
        assert!(parse("abc,1", None, false).is_err());
        let j = parse(r#"{"n": 2, "alpha": [1, 0.5773502691896258]}"#, None, false).unwrap();
        assert_eq!(j.n(), 2);
    }
}
