use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::SweepResult;

/// Writes the header row and one row per grid point: the grid columns in
/// sweep order, then `estimate, ci_lo, ci_hi, trials, theory`. An absent
/// theory value is an empty cell.
pub fn emit_csv<W: Write>(result: &SweepResult, dest: W) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::Config("sweep result has no rows".into()));
    }
    let mut w = csv::Writer::from_writer(dest);
    let header: Vec<&str> = result
        .columns
        .iter()
        .copied()
        .chain(["estimate", "ci_lo", "ci_hi", "trials", "theory"])
        .collect();
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec: Vec<String> = row.params.iter().map(|p| p.to_string()).collect();
        rec.push(row.estimate.to_string());
        rec.push(row.ci_lo.to_string());
        rec.push(row.ci_hi.to_string());
        rec.push(row.trials.to_string());
        rec.push(row.theory.map(|t| t.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    emit_csv(result, file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{SweepKind, SweepRow};

    fn sample() -> SweepResult {
        SweepResult {
            kind: SweepKind::DetectionVsR,
            columns: vec!["p", "r", "metric"],
            rows: vec![
                SweepRow {
                    params: vec![1.0.into(), 5usize.into(), "detection".into()],
                    estimate: 0.96875,
                    ci_lo: 0.9,
                    ci_hi: 1.0,
                    trials: 100,
                    theory: Some(0.96875),
                },
                SweepRow {
                    params: vec![0.5.into(), 2usize.into(), "detection".into()],
                    estimate: 0.25,
                    ci_lo: 0.2,
                    ci_hi: 0.3,
                    trials: 100,
                    theory: None,
                },
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        emit_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,r,metric,estimate,ci_lo,ci_hi,trials,theory");
        assert_eq!(lines[1], "1,5,detection,0.96875,0.9,1,100,0.96875");
        assert_eq!(lines[2], "0.5,2,detection,0.25,0.2,0.3,100,");
    }

    #[test]
    fn empty_result_rejected() {
        let mut res = sample();
        res.rows.clear();
        assert!(emit_csv(&res, Vec::new()).is_err());
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        assert!(matches!(write_csv_file(&sample(), bad), Err(Error::Io(_))));
    }
}
