use crate::data::LabelVector;
use crate::error::{Error, Result};

/// Pooled (micro-averaged) counts and scores over all instances and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub true_positive_total: usize,
    pub predicted_positive_total: usize,
    pub actual_positive_total: usize,
    pub train_seconds: f64,
    pub predict_seconds: f64,
}

/// `2 TP / (|predicted| + |actual|)` summed over every instance.
///
/// When neither predictions nor truth contain a positive, every score is 1.
/// Precision with no predicted positives (recall with no actual positives)
/// is 0 unless the other side is empty too.
pub fn micro_f1(predictions: &[LabelVector], truth: &[LabelVector]) -> Result<EvalReport> {
    if predictions.len() != truth.len() {
        return Err(Error::Alignment(format!(
            "{} predictions for {} truth rows",
            predictions.len(),
            truth.len()
        )));
    }
    let (mut tp, mut predicted, mut actual) = (0usize, 0usize, 0usize);
    for (i, (h, y)) in predictions.iter().zip(truth).enumerate() {
        if h.len() != y.len() {
            return Err(Error::Alignment(format!(
                "row {}: {} predicted labels vs {} true labels",
                i + 1,
                h.len(),
                y.len()
            )));
        }
        for (&p, &t) in h.bits().iter().zip(y.bits()) {
            tp += usize::from(p && t);
            predicted += usize::from(p);
            actual += usize::from(t);
        }
    }
    let ratio = |num: usize, den: usize, other: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else if other == 0 {
            1.0
        } else {
            0.0
        }
    };
    let denom = predicted + actual;
    Ok(EvalReport {
        micro_precision: ratio(tp, predicted, actual),
        micro_recall: ratio(tp, actual, predicted),
        micro_f1: if denom > 0 {
            2.0 * tp as f64 / denom as f64
        } else {
            1.0
        },
        true_positive_total: tp,
        predicted_positive_total: predicted,
        actual_positive_total: actual,
        train_seconds: 0.0,
        predict_seconds: 0.0,
    })
}
