//! CSV output. Column sets:
//!
//! * metrics: `labeled,unlabeled,mode,category,metric,value` with
//!   `metric` one of `tokens`, `correct`, `accuracy`, `error`;
//! * time course: `labeled,unlabeled,mode,category,bin_start,bin_end,error`
//!   (`bin_start` inclusive, `bin_end` exclusive, zero-based occurrence
//!   indices);
//! * sample stats:
//!   `labeled,unlabeled,mode,category,trials,fraction,seed,mean_error,std_error`.
//!
//! Rates carry six decimals. Categories without tokens have empty rate
//! fields.

use std::io::Write;

use super::{Condition, MetricsReport, SampleStats, TimeCourse};
use crate::error::Result;

fn rate(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn condition_fields(c: &Condition) -> [&str; 3] {
    [&c.labeled, &c.unlabeled, c.mode_label()]
}

pub fn write_metrics_csv<W: Write>(out: W, reports: &[MetricsReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["labeled", "unlabeled", "mode", "category", "metric", "value"])?;
    for report in reports {
        let [l, u, m] = condition_fields(&report.condition);
        for (category, count) in report.iter() {
            let label = category.label();
            w.write_record([l, u, m, label, "tokens", &count.tokens.to_string()])?;
            w.write_record([l, u, m, label, "correct", &count.correct.to_string()])?;
            w.write_record([l, u, m, label, "accuracy", &rate(count.accuracy())])?;
            w.write_record([l, u, m, label, "error", &rate(count.error())])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_time_course_csv<W: Write>(out: W, courses: &[(Condition, TimeCourse)]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "labeled", "unlabeled", "mode", "category", "bin_start", "bin_end", "error",
    ])?;
    for (condition, course) in courses {
        let [l, u, m] = condition_fields(condition);
        for (category, bins) in &course.curves {
            for bin in bins {
                w.write_record([
                    l,
                    u,
                    m,
                    category.label(),
                    &bin.start.to_string(),
                    &bin.end.to_string(),
                    &rate(Some(bin.error())),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sample_stats_csv<W: Write>(out: W, stats: &[SampleStats]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "labeled",
        "unlabeled",
        "mode",
        "category",
        "trials",
        "fraction",
        "seed",
        "mean_error",
        "std_error",
    ])?;
    for s in stats {
        let [l, u, m] = condition_fields(&s.condition);
        for (category, cs) in &s.categories {
            w.write_record([
                l,
                u,
                m,
                category.label(),
                &s.trials.to_string(),
                &s.fraction.to_string(),
                &s.seed.to_string(),
                &rate(cs.map(|c| c.mean)),
                &rate(cs.map(|c| c.std)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptation::Mode;
    use crate::eval::{score, Overlap, TokenCategory};

    #[test]
    fn metrics_csv_layout() {
        let cats = vec![
            TokenCategory {
                overlap: Overlap::Known,
                unseen: false,
                unknown: false,
            };
            2
        ];
        let report = score(&["A", "B"], &["A", "A"], &cats)
            .unwrap()
            .with_condition(Condition::new("l:big", "u:0", Mode::Online));
        let mut out = Vec::new();
        write_metrics_csv(&mut out, &[report]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "labeled,unlabeled,mode,category,metric,value");
        assert_eq!(lines[1], "l:big,u:0,online,ALL,tokens,2");
        assert_eq!(lines[3], "l:big,u:0,online,ALL,accuracy,0.500000");
        assert!(text.contains("l:big,u:0,online,OOV,accuracy,\n"));
        assert!(!text.contains('\r'));
    }
}
