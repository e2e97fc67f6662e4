//! Point clouds and report output.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::verify::VerificationReport;

/// Plain decimal with 17 significant digits; scientific notation only for
/// very small or very large magnitudes. Parsing the text gives back the
/// same `f64`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        format!("{v:.16e}")
    }
}

pub fn to_csv(points: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format_value(*v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Rows of comma-separated numbers; blank lines, `#` comments and a
/// non-numeric first line (a header) are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => out.push(r),
            Err(_) if out.is_empty() && i == 0 => continue,
            Err(e) => return Err(Error::InvalidInput(format!("line {}: {e}", i + 1))),
        }
    }
    if let Some(r) = out.iter().find(|r| r.len() != out[0].len()) {
        return Err(Error::dim("csv row", out[0].len(), r.len()));
    }
    Ok(out)
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Markdown => "md",
        }
    }
}

pub fn render_report(r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("reports serialize") + "\n",
        Format::Markdown => r.to_markdown(),
        Format::Csv => {
            let mut s = String::from("field,value\n");
            s.push_str(&format!("check,{}\npassed,{}\nsamples,{}\nseed,{}\n", r.check, r.passed, r.samples, r.seed));
            s.push_str(&format!("worst_violation,{}\n", format_value(r.worst_violation)));
            if let Some(g) = r.coverage_gap {
                s.push_str(&format!("coverage_gap,{}\n", format_value(g)));
            }
            if let Some(w) = r.winding {
                s.push_str(&format!("winding,{w}\n"));
            }
            for (k, v) in &r.details {
                s.push_str(&format!("{k},{}\n", format_value(*v)));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_with_seventeen_digits() {
        for v in [1.0 / 3.0, -2.5e-7, 12345.678901234567, 1e300, 0.1 + 0.2, -0.0, 7.0] {
            let s = format_value(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_value(0.5), "0.50000000000000000");
    }

    #[test]
    fn csv_skips_header_and_comments() {
        let pts = parse_csv("x,y\n# note\n1,2\n\n3.5,-4\n").unwrap();
        assert_eq!(pts, vec![vec![1.0, 2.0], vec![3.5, -4.0]]);
        assert!(parse_csv("1,2\n3\n").is_err());
    }
}
