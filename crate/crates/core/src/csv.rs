//! Plot-ready boundary tables.
//!
//! One file per boundary, header `lambda_p,lambda_s_max,label,source,uncertain`,
//! rows ascending in `lambda_p`, numbers with six decimals. Parsing a file
//! gives back the boundary quantised to those six decimals.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::boundary::{RegionBoundary, RegionLabel, Source};
use crate::error::{Error, Result};
use crate::sweep::ComparisonReport;

pub const HEADER: &str = "lambda_p,lambda_s_max,label,source,uncertain";

/// Rounds to the six decimals the CSV carries.
pub fn quantize(v: f64) -> f64 {
    format!("{v:.6}").parse().expect("formatted float parses")
}

pub fn quantized(b: &RegionBoundary) -> RegionBoundary {
    RegionBoundary {
        lambda_p_grid: b.lambda_p_grid.iter().copied().map(quantize).collect(),
        lambda_s_max: b.lambda_s_max.iter().copied().map(quantize).collect(),
        ..b.clone()
    }
}

pub fn write_boundary<W: Write>(b: &RegionBoundary, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    let mut rows: Vec<usize> = (0..b.len()).collect();
    rows.sort_by(|&i, &j| b.lambda_p_grid[i].total_cmp(&b.lambda_p_grid[j]));
    for i in rows {
        writeln!(
            out,
            "{:.6},{:.6},{},{},{}",
            b.lambda_p_grid[i], b.lambda_s_max[i], b.label, b.source, b.uncertain[i]
        )?;
    }
    Ok(())
}

pub fn boundary_to_string(b: &RegionBoundary) -> String {
    let mut buf = Vec::new();
    write_boundary(b, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Parses one boundary file. A header-only file has no rows to take the
/// label and source from, so those are returned as `None`.
pub fn parse_boundary(text: &str) -> Result<Option<RegionBoundary>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => return Err(Error::Csv(format!("expected header `{HEADER}`, found {other:?}"))),
    }
    let mut meta: Option<(RegionLabel, Source)> = None;
    let (mut lp, mut ls, mut unc) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = n + 2;
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [p, s, label, source, u] = fields[..] else {
            return Err(Error::Csv(format!("row {row}: expected 5 fields, found {}", fields.len())));
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Csv(format!("row {row}: `{v}` is not a number")))
        };
        let label = RegionLabel::parse(label).ok_or_else(|| Error::Csv(format!("row {row}: unknown label `{label}`")))?;
        let source = Source::parse(source).ok_or_else(|| Error::Csv(format!("row {row}: unknown source `{source}`")))?;
        match meta {
            None => meta = Some((label, source)),
            Some(m) if m != (label, source) => {
                return Err(Error::Csv(format!("row {row}: label/source differ from the first row")))
            }
            Some(_) => {}
        }
        lp.push(num(p)?);
        ls.push(num(s)?);
        unc.push(match u {
            "true" => true,
            "false" => false,
            _ => return Err(Error::Csv(format!("row {row}: `{u}` is not a boolean"))),
        });
    }
    let Some((label, source)) = meta else { return Ok(None) };
    RegionBoundary::new(label, source, lp, ls, unc)
        .map(Some)
        .map_err(|e| Error::Csv(e.to_string()))
}

/// File name for one boundary of a report.
pub fn file_name(report: &ComparisonReport, tag: &str, source: Source) -> String {
    format!("{}_{tag}_{source}.csv", report.name)
}

/// Writes every boundary of `report` into `dir`, creating it if needed.
pub fn emit_boundary_csv(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    report
        .boundaries
        .iter()
        .map(|b| {
            let path = dir.join(file_name(report, &b.tag, b.boundary.source));
            fs::write(&path, boundary_to_string(&b.boundary)).map_err(io(&path))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RegionBoundary {
        RegionBoundary::new(
            RegionLabel::NonCooperative,
            Source::Simulated,
            vec![0.0, 0.1, 0.35000000000000003],
            vec![0.56, 0.123456789, 0.0],
            vec![false, false, true],
        )
        .unwrap()
    }

    #[test]
    fn sorted_six_decimals() {
        let text = boundary_to_string(&sample());
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], HEADER);
        assert_eq!(lines[1], "0.000000,0.560000,noncoop,simulated,false");
        assert_eq!(lines[2], "0.100000,0.123457,noncoop,simulated,false");
        assert_eq!(lines[3], "0.350000,0.000000,noncoop,simulated,true");
    }

    #[test]
    fn round_trip() {
        let b = sample();
        let parsed = parse_boundary(&boundary_to_string(&b)).unwrap().unwrap();
        assert_eq!(parsed, quantized(&b));
        assert_eq!(parse_boundary(&boundary_to_string(&parsed)).unwrap().unwrap(), parsed);
    }

    #[test]
    fn header_only() {
        let empty = RegionBoundary::new(RegionLabel::Union, Source::Analytic, vec![], vec![], vec![]).unwrap();
        assert_eq!(boundary_to_string(&empty), format!("{HEADER}\n"));
        assert_eq!(parse_boundary(&format!("{HEADER}\n")).unwrap(), None);
    }

    #[test]
    fn malformed() {
        assert!(parse_boundary("a,b\n").is_err());
        assert!(parse_boundary(&format!("{HEADER}\n0.1,0.2,union,analytic\n")).is_err());
        assert!(parse_boundary(&format!("{HEADER}\n0.1,0.2,union,analytic,maybe\n")).is_err());
        assert!(parse_boundary(&format!("{HEADER}\n0.1,0.2,r9,analytic,true\n")).is_err());
    }
}
