//! Gold label derivation, inter-annotator agreement, and judge evaluation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AgreementError {
    #[error("expected exactly 3 labels, got {0}")]
    WrongArity(usize),
    #[error("annotators share no items")]
    EmptyOverlap,
    #[error("items have differing annotation counts ({0})")]
    UnevenDesign(String),
    #[error("input lengths differ or are zero ({predicted} predicted vs {gold} gold)")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("duplicate annotation for item {item} by {annotator}")]
    DuplicateAnnotation { item: String, annotator: String },
}

/// One annotator's binary answer for one item.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub item_id: String,
    pub annotator_id: String,
    pub label: bool,
}

/// Pairwise and pooled agreement over an annotation set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AgreementReport {
    /// Cohen's kappa per annotator pair, keyed `"<a>|<b>"` with a < b,
    /// computed over the items both annotated.
    pub pairwise_cohen: BTreeMap<String, f64>,
    /// Number of shared items behind each pairwise kappa.
    pub items_per_pair: BTreeMap<String, usize>,
    pub fleiss: f64,
}

/// Binary classification metrics with "revision" as the positive class.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub confusion: Confusion,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimal_threshold: Option<f64>,
    /// Set when a zero denominator forced the metric to 0 instead of NaN.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Majority vote over exactly three labels.
pub fn majority_vote(labels: &[bool]) -> Result<bool, AgreementError> {
    if labels.len() != 3 {
        return Err(AgreementError::WrongArity(labels.len()));
    }
    Ok(labels.iter().filter(|l| **l).count() >= 2)
}

/// Cohen's kappa between two aligned label vectors:
/// `(p_o - p_e) / (1 - p_e)` with marginal-product chance agreement.
/// Degenerate chance agreement of 1 only occurs with perfect observed
/// agreement and is reported as 1.0.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64, AgreementError> {
    if a.is_empty() && b.is_empty() {
        return Err(AgreementError::EmptyOverlap);
    }
    if a.len() != b.len() {
        return Err(AgreementError::LengthMismatch {
            predicted: a.len(),
            gold: b.len(),
        });
    }
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let a_true = a.iter().filter(|x| **x).count() as f64 / n;
    let b_true = b.iter().filter(|x| **x).count() as f64 / n;
    let expected = a_true * b_true + (1.0 - a_true) * (1.0 - b_true);
    if (1.0 - expected).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// Fleiss' kappa over the item-by-category count matrix. Rater identity is
/// never used by the formula, which is what makes a partially overlapping
/// rater pool a valid design: only the fixed number of annotations per item
/// matters.
pub fn fleiss_kappa(records: &[AnnotationRecord]) -> Result<f64, AgreementError> {
    let per_item = group_by_item(records)?;
    if per_item.is_empty() {
        return Err(AgreementError::UnevenDesign("no items".into()));
    }
    let n = per_item.values().next().unwrap().len();
    if n < 2 {
        return Err(AgreementError::UnevenDesign(format!(
            "{n} annotation(s) per item; need at least 2"
        )));
    }
    if let Some((item, labels)) = per_item.iter().find(|(_, l)| l.len() != n) {
        return Err(AgreementError::UnevenDesign(format!(
            "item {item} has {} annotations, others have {n}",
            labels.len()
        )));
    }

    let items = per_item.len() as f64;
    let n_f = n as f64;
    let mut sum_p_i = 0.0;
    let mut total_true = 0usize;
    for labels in per_item.values() {
        let yes = labels.iter().filter(|l| **l).count();
        let no = n - yes;
        sum_p_i += ((yes * yes + no * no) as f64 - n_f) / (n_f * (n_f - 1.0));
        total_true += yes;
    }
    let p_bar = sum_p_i / items;
    let p_true = total_true as f64 / (items * n_f);
    let p_e = p_true * p_true + (1.0 - p_true) * (1.0 - p_true);
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

fn group_by_item(
    records: &[AnnotationRecord],
) -> Result<BTreeMap<&str, Vec<bool>>, AgreementError> {
    let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut per_item: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
    for r in records {
        if !seen.insert((r.item_id.as_str(), r.annotator_id.as_str())) {
            return Err(AgreementError::DuplicateAnnotation {
                item: r.item_id.clone(),
                annotator: r.annotator_id.clone(),
            });
        }
        per_item.entry(&r.item_id).or_default().push(r.label);
    }
    Ok(per_item)
}

/// Gold labels by majority vote; every item must carry exactly 3 annotations.
pub fn derive_gold(records: &[AnnotationRecord]) -> Result<BTreeMap<String, bool>, AgreementError> {
    let per_item = group_by_item(records)?;
    let mut gold = BTreeMap::new();
    for (item, labels) in per_item {
        gold.insert(item.to_string(), majority_vote(&labels)?);
    }
    Ok(gold)
}

/// Pairwise Cohen's kappa over each annotator pair's shared items, plus
/// Fleiss' kappa over the pool.
pub fn agreement_report(records: &[AnnotationRecord]) -> Result<AgreementReport, AgreementError> {
    // item -> annotator -> label
    let mut by_item: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    let mut annotators: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        let slot = by_item.entry(&r.item_id).or_default();
        if slot.insert(&r.annotator_id, r.label).is_some() {
            return Err(AgreementError::DuplicateAnnotation {
                item: r.item_id.clone(),
                annotator: r.annotator_id.clone(),
            });
        }
        annotators.insert(&r.annotator_id);
    }

    let mut pairwise = BTreeMap::new();
    let mut counts = BTreeMap::new();
    let annotators: Vec<&str> = annotators.into_iter().collect();
    for (i, a) in annotators.iter().enumerate() {
        for b in &annotators[i + 1..] {
            let mut va = Vec::new();
            let mut vb = Vec::new();
            for labels in by_item.values() {
                if let (Some(&la), Some(&lb)) = (labels.get(a), labels.get(b)) {
                    va.push(la);
                    vb.push(lb);
                }
            }
            if va.is_empty() {
                continue;
            }
            let key = format!("{a}|{b}");
            pairwise.insert(key.clone(), cohen_kappa(&va, &vb)?);
            counts.insert(key, va.len());
        }
    }

    Ok(AgreementReport {
        pairwise_cohen: pairwise,
        items_per_pair: counts,
        fleiss: fleiss_kappa(records)?,
    })
}

/// Standard binary metrics against gold labels.
pub fn classification_metrics(
    predicted: &[bool],
    gold: &[bool],
) -> Result<EvalReport, AgreementError> {
    if predicted.is_empty() || predicted.len() != gold.len() {
        return Err(AgreementError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    let mut confusion = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&p, &g) in predicted.iter().zip(gold) {
        match (p, g) {
            (true, true) => confusion.tp += 1,
            (true, false) => confusion.fp += 1,
            (false, false) => confusion.tn += 1,
            (false, true) => confusion.fn_ += 1,
        }
    }
    let total = predicted.len() as f64;
    let precision_denominator = confusion.tp + confusion.fp;
    let recall_denominator = confusion.tp + confusion.fn_;
    Ok(EvalReport {
        accuracy: (confusion.tp + confusion.tn) as f64 / total,
        precision: if precision_denominator == 0 {
            0.0
        } else {
            confusion.tp as f64 / precision_denominator as f64
        },
        recall: if recall_denominator == 0 {
            0.0
        } else {
            confusion.tp as f64 / recall_denominator as f64
        },
        confusion,
        optimal_threshold: None,
        precision_undefined: precision_denominator == 0,
        recall_undefined: recall_denominator == 0,
    })
}

/// A-posteriori threshold selection: candidates are the midpoints of
/// adjacent sorted unique scores plus one sentinel below the minimum and one
/// above the maximum. Returns the candidate maximizing accuracy of
/// `score > threshold`; ties go to the lowest threshold, which keeps recall
/// high.
pub fn optimize_threshold(
    scores: &[f64],
    gold: &[bool],
) -> Result<(f64, EvalReport), AgreementError> {
    if scores.is_empty() || scores.len() != gold.len() {
        return Err(AgreementError::LengthMismatch {
            predicted: scores.len(),
            gold: gold.len(),
        });
    }
    let mut unique: Vec<f64> = scores.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();

    let mut candidates = Vec::with_capacity(unique.len() + 1);
    candidates.push(unique[0] - 1.0);
    candidates.extend(unique.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    candidates.push(unique[unique.len() - 1] + 1.0);

    let mut best: Option<(f64, EvalReport)> = None;
    for threshold in candidates {
        let predicted: Vec<bool> = scores.iter().map(|s| *s > threshold).collect();
        let report = classification_metrics(&predicted, gold)?;
        // Candidates are ascending, so strict improvement keeps the lowest
        // threshold on ties.
        if best
            .as_ref()
            .is_none_or(|(_, b)| report.accuracy > b.accuracy)
        {
            best = Some((threshold, report));
        }
    }
    let (threshold, mut report) = best.expect("at least one candidate threshold");
    report.optimal_threshold = Some(threshold);
    Ok((threshold, report))
}
