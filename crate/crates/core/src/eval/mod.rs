//! Confusion matrices, accuracy reports and their export formats.

mod report;

pub use report::{export_probabilities, export_report, ReportFormat};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Batch, ClassIndexMap, DatasetError};
use crate::model::{argmax, Checkpoint, ModelError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("class map {found:?} does not match the checkpoint's {expected:?}")]
    ClassMapMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("the test set is empty")]
    EmptyTestSet,
    #[error("prediction {prediction} or label {label} is out of range for {n_classes} classes")]
    IndexOutOfRange {
        label: usize,
        prediction: usize,
        n_classes: usize,
    },
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Counts indexed by (true class, predicted class).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: ClassIndexMap,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: ClassIndexMap) -> Self {
        let n = classes.len();
        Self {
            classes,
            counts: vec![0; n * n],
        }
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(classes: ClassIndexMap, rows: &[Vec<u64>]) -> Result<Self, EvalError> {
        let n = classes.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(EvalError::MalformedReport(format!(
                "confusion matrix must be {n}x{n}"
            )));
        }
        Ok(Self {
            classes,
            counts: rows.concat(),
        })
    }

    pub fn record(&mut self, truth: usize, prediction: usize) -> Result<(), EvalError> {
        let n = self.n_classes();
        if truth >= n || prediction >= n {
            return Err(EvalError::IndexOutOfRange {
                label: truth,
                prediction,
                n_classes: n,
            });
        }
        self.counts[truth * n + prediction] += 1;
        Ok(())
    }

    pub fn classes(&self) -> &ClassIndexMap {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, truth: usize, prediction: usize) -> u64 {
        self.counts[truth * self.n_classes() + prediction]
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        let n = self.n_classes();
        &self.counts[truth * n..(truth + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.n_classes())
            .map(|i| self.row(i).to_vec())
            .collect()
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        self.row(truth).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.get(i, i)).sum()
    }
}

/// Summary of one evaluation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `correct / sample_count`, correctly rounded.
    pub overall_accuracy: f64,
    /// Row-normalized diagonal; `None` for classes with no test samples.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub confusion: ConfusionMatrix,
    pub sample_count: u64,
    /// Trace of the confusion matrix.
    pub correct: u64,
}

impl EvalReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self, EvalError> {
        let total = confusion.total();
        if total == 0 {
            return Err(EvalError::EmptyTestSet);
        }
        let correct = confusion.trace();
        let per_class_accuracy = (0..confusion.n_classes())
            .map(|i| match confusion.row_sum(i) {
                0 => None,
                n => Some(confusion.get(i, i) as f64 / n as f64),
            })
            .collect();
        Ok(Self {
            overall_accuracy: correct as f64 / total as f64,
            per_class_accuracy,
            confusion,
            sample_count: total,
            correct,
        })
    }

    pub fn classes(&self) -> &ClassIndexMap {
        self.confusion.classes()
    }

    pub fn to_json(&self) -> String {
        let doc = ReportJson {
            accuracy: self.overall_accuracy,
            sample_count: self.sample_count,
            classes: self.classes().names().to_vec(),
            per_class_accuracy: self.per_class_accuracy.clone(),
            confusion: self.confusion.rows(),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    /// Rebuilds a report from [`EvalReport::to_json`] output, checking that
    /// the stored figures agree with the matrix.
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let doc: ReportJson =
            serde_json::from_str(text).map_err(|e| EvalError::MalformedReport(e.to_string()))?;
        let classes = ClassIndexMap::from_names(&doc.classes);
        if classes.names() != doc.classes.as_slice() {
            return Err(EvalError::MalformedReport(
                "class names must be sorted and unique".into(),
            ));
        }
        let report = Self::from_confusion(ConfusionMatrix::from_rows(classes, &doc.confusion)?)?;
        if report.sample_count != doc.sample_count
            || report.overall_accuracy != doc.accuracy
            || report.per_class_accuracy != doc.per_class_accuracy
        {
            return Err(EvalError::MalformedReport(
                "summary figures disagree with the confusion matrix".into(),
            ));
        }
        Ok(report)
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    accuracy: f64,
    sample_count: u64,
    classes: Vec<String>,
    per_class_accuracy: Vec<Option<f64>>,
    confusion: Vec<Vec<u64>>,
}

/// One scored test item.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePrediction {
    pub path: String,
    pub label: usize,
    pub predicted: usize,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    /// In test-set order.
    pub predictions: Vec<SamplePrediction>,
}

/// Tallies pre-computed predictions.
pub fn evaluate_predictions(
    classes: &ClassIndexMap,
    truths: &[usize],
    predictions: &[usize],
) -> Result<EvalReport, EvalError> {
    let mut cm = ConfusionMatrix::new(classes.clone());
    for (&t, &p) in truths.iter().zip(predictions) {
        cm.record(t, p)?;
    }
    EvalReport::from_confusion(cm)
}

/// Scores every test batch with the checkpoint. Ties in the argmax go to the
/// lowest class index.
pub fn evaluate<I>(
    checkpoint: &Checkpoint,
    batches: I,
    class_map: &ClassIndexMap,
) -> Result<Evaluation, EvalError>
where
    I: IntoIterator<Item = Result<Batch, DatasetError>>,
{
    if class_map.fingerprint() != checkpoint.classes.fingerprint() {
        return Err(EvalError::ClassMapMismatch {
            expected: checkpoint.classes.names().to_vec(),
            found: class_map.names().to_vec(),
        });
    }
    let net = checkpoint.network()?;
    let mut cm = ConfusionMatrix::new(class_map.clone());
    let mut predictions = Vec::new();
    for batch in batches {
        let batch = batch?;
        let out = net.forward(&batch.images, batch.len())?;
        for (i, (&label, path)) in batch.labels.iter().zip(&batch.paths).enumerate() {
            let row = out.probabilities_row(i);
            let predicted = argmax(&out.logits[i * out.n_classes..(i + 1) * out.n_classes]);
            cm.record(label, predicted)?;
            predictions.push(SamplePrediction {
                path: path.clone(),
                label,
                predicted,
                probabilities: row.to_vec(),
            });
        }
    }
    Ok(Evaluation {
        report: EvalReport::from_confusion(cm)?,
        predictions,
    })
}
