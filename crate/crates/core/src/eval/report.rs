//! CSV reports: one header row, comma separated, LF line endings.
//!
//! Timing columns are optional so that reports of seeded runs can be compared
//! byte for byte.

use std::io::Write;

use super::ablation::AblationRow;
use super::repeatability::RepeatabilityReport;
use super::runtime::RuntimeStats;
use crate::error::Result;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// One row per trial followed by an `all` row with the aggregate.
pub fn write_repeatability_csv<W: Write>(
    out: W,
    detector: &str,
    report: &RepeatabilityReport,
    with_timing: bool,
) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec![
        "detector",
        "trial",
        "total_keypoints",
        "query_keypoints",
        "repeatable_keypoints",
        "relative_repeatability",
        "epsilon",
        "sigma",
    ];
    if with_timing {
        header.push("detect_time_seconds");
    }
    w.write_record(&header)?;
    for t in &report.trials {
        let mut row = vec![
            detector.to_string(),
            t.trial.to_string(),
            t.total_keypoints.to_string(),
            t.query_keypoints.to_string(),
            t.repeatable_keypoints.to_string(),
            t.relative_repeatability.to_string(),
            report.epsilon.to_string(),
            report.sigma.to_string(),
        ];
        if with_timing {
            row.push(t.detect_time_seconds.to_string());
        }
        w.write_record(&row)?;
    }
    let query: usize = report.trials.iter().map(|t| t.query_keypoints).sum();
    let mut row = vec![
        detector.to_string(),
        "all".to_string(),
        report.total_keypoints.to_string(),
        query.to_string(),
        report.repeatable_keypoints.to_string(),
        report.relative_repeatability.to_string(),
        report.epsilon.to_string(),
        report.sigma.to_string(),
    ];
    if with_timing {
        row.push(report.detect_time_seconds.to_string());
    }
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

pub fn write_ablation_csv<W: Write>(out: W, rows: &[AblationRow], with_timing: bool) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec!["t_g", "t_c", "keypoint_count", "repeatability", "epsilon", "sigma"];
    if with_timing {
        header.push("runtime_seconds");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![
            r.t_g.to_string(),
            r.t_c.to_string(),
            r.keypoint_count.to_string(),
            r.repeatability.to_string(),
            r.epsilon.to_string(),
            r.sigma.to_string(),
        ];
        if with_timing {
            row.push(r.runtime_seconds.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per sample, then `mean`, `median` and `min` rows.
pub fn write_runtime_csv<W: Write>(out: W, detector: &str, points: usize, stats: &RuntimeStats) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["detector", "points", "sample", "seconds"])?;
    for (i, s) in stats.samples.iter().enumerate() {
        w.write_record([detector.to_string(), points.to_string(), i.to_string(), s.to_string()])?;
    }
    for (name, v) in [("mean", stats.mean), ("median", stats.median), ("min", stats.min)] {
        w.write_record([detector.to_string(), points.to_string(), name.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ablation_csv_layout() {
        let rows = vec![AblationRow {
            t_g: 0.1,
            t_c: 0.5,
            keypoint_count: 12,
            repeatability: 0.75,
            runtime_seconds: 0.01,
            epsilon: 0.02,
            sigma: 0.0,
        }];
        let mut out = Vec::new();
        write_ablation_csv(&mut out, &rows, false).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "t_g,t_c,keypoint_count,repeatability,epsilon,sigma\n0.1,0.5,12,0.75,0.02,0\n"
        );
    }
}
