//! Parsers for list-valued arguments.

use anyhow::{bail, Context, Result};

/// Parses `start:stop:step` into the points `start + i * step` up to and
/// including `stop`. Points are rounded to 12 decimals so that `0:1:0.05`
/// yields `0.35` rather than `0.35000000000000003`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        bail!("grid `{spec}` must look like start:stop:step");
    };
    let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}` in grid `{spec}`"));
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        bail!("grid `{spec}` needs start <= stop and a positive step");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Parses `degree:fraction,...` into check-degree edge fractions.
pub fn parse_degree_fractions(spec: &str) -> Result<Vec<(usize, f64)>> {
    spec.split(',')
        .map(|item| {
            let (d, w) = item
                .split_once(':')
                .with_context(|| format!("`{item}` must look like degree:fraction"))?;
            let d: usize = d.trim().parse().with_context(|| format!("bad degree `{d}`"))?;
            let w: f64 = w.trim().parse().with_context(|| format!("bad fraction `{w}`"))?;
            Ok((d, w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_rounded_range() {
        let g = parse_range("0:1:0.05").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[7], 0.35);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(parse_range("0.5:0.5:0.1").unwrap(), vec![0.5]);
    }

    #[test]
    fn rejects_bad_ranges() {
        for bad in ["0:1", "1:0:0.1", "0:1:0", "a:1:0.1"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn degree_fractions() {
        assert_eq!(parse_degree_fractions("3:0.5,5:0.5").unwrap(), vec![(3, 0.5), (5, 0.5)]);
        assert!(parse_degree_fractions("3-0.5").is_err());
    }
}
