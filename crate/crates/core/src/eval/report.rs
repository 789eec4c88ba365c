use std::fmt::Write;

use super::{EvalReport, SamplePrediction};
use crate::dataset::ClassIndexMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    /// Confusion matrix with a header row and a leading column of class names.
    Csv,
    /// Aligned plain-text table for terminals.
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "table" | "text" => Ok(Self::Table),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn export_report(report: &EvalReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Csv => csv_matrix(report).into_bytes(),
        ReportFormat::Table => table(report).into_bytes(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_matrix(report: &EvalReport) -> String {
    let names = report.classes().names();
    let mut out = String::from("true\\predicted");
    for n in names {
        out.push(',');
        out.push_str(&csv_field(n));
    }
    out.push('\n');
    for (i, n) in names.iter().enumerate() {
        out.push_str(&csv_field(n));
        for c in report.confusion.row(i) {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn table(report: &EvalReport) -> String {
    let names = report.classes().names();
    let cm = &report.confusion;
    let label_w = names.iter().map(|n| n.len()).max().unwrap_or(0).max(5);
    let cell_w = names
        .iter()
        .map(|n| n.len())
        .chain((0..cm.n_classes()).flat_map(|i| cm.row(i).iter().map(|c| c.to_string().len())))
        .max()
        .unwrap_or(1)
        .max(8);
    let mut out = String::new();
    writeln!(
        out,
        "accuracy {:.4} ({}/{})",
        report.overall_accuracy, report.correct, report.sample_count
    )
    .unwrap();
    write!(out, "{:<label_w$}", "true").unwrap();
    for n in names {
        write!(out, " {n:>cell_w$}").unwrap();
    }
    writeln!(out, " {:>cell_w$}", "class_acc").unwrap();
    for (i, n) in names.iter().enumerate() {
        write!(out, "{n:<label_w$}").unwrap();
        for c in cm.row(i) {
            write!(out, " {c:>cell_w$}").unwrap();
        }
        match report.per_class_accuracy[i] {
            Some(a) => writeln!(out, " {:>cell_w$}", format!("{a:.4}")).unwrap(),
            None => writeln!(out, " {:>cell_w$}", "n/a").unwrap(),
        }
    }
    out
}

/// `path,true_label,<class_0>,...` with one row per prediction.
pub fn export_probabilities(classes: &ClassIndexMap, predictions: &[SamplePrediction]) -> Vec<u8> {
    let mut out = String::from("path,true_label");
    for n in classes.names() {
        out.push(',');
        out.push_str(&csv_field(n));
    }
    out.push('\n');
    for p in predictions {
        out.push_str(&csv_field(&p.path));
        out.push(',');
        out.push_str(&csv_field(classes.name(p.label).unwrap_or_default()));
        for v in &p.probabilities {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out.into_bytes()
}
