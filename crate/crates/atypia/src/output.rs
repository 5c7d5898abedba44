//! Row output: CSV with a fixed, documented column order, or a JSON array of
//! row objects, plus a JSON sidecar carrying the run config and fit metadata.
//! Numbers are printed with 17 significant digits so reruns are
//! byte-comparable and round-trip through f64 exactly.

use std::io::Write;

use crate::config::{Format, RunConfig};
use crate::experiments::{
    CoherenceRow, CompareRow, ConcentrationRow, EstimatePoint, FitResult,
};

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:.16e}")
    }
}

pub const ESTIMATE_HEADER: &str = "n,p_hat,stderr,log_p,N,method,ess,seed";
pub const COHERENCE_HEADER: &str = "n,p_hat,stderr,log_p,N,method,ess,seed,p_exact";
pub const CONCENTRATION_HEADER: &str = "n,outside_mass,ratio,hits";
pub const COMPARE_HEADER: &str = "param,exact,levy,ratio";

fn estimate_fields(p: &EstimatePoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        p.n,
        fmt_f64(p.p_hat),
        fmt_f64(p.stderr),
        fmt_f64(p.log_p),
        p.n_samples,
        p.method,
        p.ess.map(fmt_f64).unwrap_or_default(),
        p.seed
    )
}

pub fn write_estimate_csv(w: &mut dyn Write, points: &[EstimatePoint]) -> std::io::Result<()> {
    writeln!(w, "{ESTIMATE_HEADER}")?;
    for p in points {
        writeln!(w, "{}", estimate_fields(p))?;
    }
    Ok(())
}

pub fn write_coherence_csv(
    w: &mut dyn Write,
    points: &[EstimatePoint],
    rows: &[CoherenceRow],
) -> std::io::Result<()> {
    writeln!(w, "{COHERENCE_HEADER}")?;
    for (p, r) in points.iter().zip(rows) {
        writeln!(w, "{},{}", estimate_fields(p), fmt_f64(r.p_exact))?;
    }
    Ok(())
}

pub fn write_concentration_csv(
    w: &mut dyn Write,
    rows: &[ConcentrationRow],
) -> std::io::Result<()> {
    writeln!(w, "{CONCENTRATION_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.n,
            fmt_f64(r.outside_mass),
            fmt_f64(r.ratio),
            r.hits
        )?;
    }
    Ok(())
}

pub fn write_compare_csv(w: &mut dyn Write, rows: &[CompareRow]) -> std::io::Result<()> {
    writeln!(w, "{COMPARE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(r.param),
            fmt_f64(r.exact),
            fmt_f64(r.levy),
            fmt_f64(r.ratio)
        )?;
    }
    Ok(())
}

/// Metadata written next to the row data: the full run description plus any
/// fit summary, so a run is reproducible from its outputs alone.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Sidecar<'a> {
    pub config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<&'a FitResult>,
}

pub fn write_sidecar(w: &mut dyn Write, sidecar: &Sidecar) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, sidecar)?;
    writeln!(w)
}

/// Rows as a pretty-printed JSON array (the `--format json` alternative).
pub fn write_json_rows<T: serde::Serialize>(w: &mut dyn Write, rows: &[T]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, rows)?;
    writeln!(w)
}

/// Emit estimate rows in the requested format.
pub fn write_estimate_rows(
    w: &mut dyn Write,
    format: Format,
    points: &[EstimatePoint],
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_estimate_csv(w, points),
        Format::Json => write_json_rows(w, points),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Method;

    fn point() -> EstimatePoint {
        EstimatePoint {
            n: 20,
            p_hat: 0.125,
            stderr: 0.003,
            log_p: 0.125f64.ln(),
            n_samples: 1000,
            method: Method::Tilted,
            ess: Some(512.5),
            seed: 42,
        }
    }

    #[test]
    fn fmt_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::NEG_INFINITY] {
            let s = fmt_f64(x);
            if x.is_finite() {
                assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            } else {
                assert_eq!(s, "-inf");
            }
        }
    }

    #[test]
    fn estimate_csv_shape() {
        let mut buf = Vec::new();
        write_estimate_csv(&mut buf, &[point()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), ESTIMATE_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 8);
        assert!(row.starts_with("20,1.25"));
        assert!(row.contains(",tilted,"));
        assert!(row.ends_with(",42"));
    }

    #[test]
    fn naive_ess_column_empty() {
        let mut p = point();
        p.method = Method::Naive;
        p.ess = None;
        let mut buf = Vec::new();
        write_estimate_csv(&mut buf, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[6], "");
    }

    #[test]
    fn deterministic_bytes() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_estimate_csv(&mut a, &[point()]).unwrap();
        write_estimate_csv(&mut b, &[point()]).unwrap();
        assert_eq!(a, b);
    }
}
