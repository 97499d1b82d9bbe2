//! HC-threshold feature selection and the LDA–HCT classifier.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::hc::{self, PValueSeries};
use crate::numerics::{clamp_pvalue, phi};

/// Default `α₀` for feature selection.
pub const DEFAULT_ALPHA0: f64 = 0.10;

/// Samples in rows, features in columns, labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    data: DMatrix<f64>,
    labels: Vec<i8>,
    feature_names: Vec<String>,
}

impl LabeledMatrix {
    pub fn new(data: DMatrix<f64>, labels: Vec<i8>, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != data.nrows() {
            return Err(invalid!("{} labels for {} rows", labels.len(), data.nrows()));
        }
        if feature_names.len() != data.ncols() {
            return Err(invalid!("{} feature names for {} columns", feature_names.len(), data.ncols()));
        }
        if let Some(k) = labels.iter().position(|&y| y != 1 && y != -1) {
            return Err(invalid!("label {} in row {} is not -1 or +1", labels[k], k + 1));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            let (row, col) = (k % data.nrows(), k / data.nrows());
            return Err(invalid!("non-finite entry at row {}, column {}", row + 1, col + 1));
        }
        Ok(Self { data, labels, feature_names })
    }

    /// Builds a matrix with generated feature names `f1, f2, …`.
    pub fn unnamed(data: DMatrix<f64>, labels: Vec<i8>) -> Result<Self> {
        let names = (1..=data.ncols()).map(|j| alloc::format!("f{j}")).collect();
        Self::new(data, labels, names)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    /// `(#{+1}, #{−1})`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (pos, self.labels.len() - pos)
    }

    /// Same data with every label negated.
    pub fn swap_labels(&self) -> Self {
        Self {
            data: self.data.clone(),
            labels: self.labels.iter().map(|&y| -y).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub(crate) fn with_data(&self, data: DMatrix<f64>) -> Self {
        Self { data, labels: self.labels.clone(), feature_names: self.feature_names.clone() }
    }
}

/// Raw t-like scores and their standardized form `Z = (z* − mean)/sd`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    pub raw: Vec<f64>,
    pub standardized: Vec<f64>,
    pub mean_shift: f64,
    pub sd_scale: f64,
}

impl ZScores {
    /// Standardizes `raw` by its sample mean and `(p−1)`-denominator sd.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        let p = raw.len();
        if p < 2 {
            return Err(invalid!("standardization needs at least two scores"));
        }
        let mean = raw.iter().sum::<f64>() / p as f64;
        let var = raw.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (p - 1) as f64;
        let sd = libm::sqrt(var);
        if !(sd > 0.0) {
            return Err(invalid!("all raw scores are equal; cannot standardize"));
        }
        let standardized = raw.iter().map(|z| (z - mean) / sd).collect();
        Ok(Self { raw, standardized, mean_shift: mean, sd_scale: sd })
    }

    /// Two-sided P-values `P(|N(0,1)| ≥ |Z_j|)` in feature order.
    pub fn two_sided_pvalues(&self) -> Vec<f64> {
        self.standardized.iter().map(|&z| two_sided(z)).collect()
    }
}

#[inline]
pub(crate) fn two_sided(z: f64) -> f64 {
    clamp_pvalue(2.0 * phi(-z.abs()))
}

/// Per-feature class means and pooled standard deviation.
struct FeatureStats {
    overall_mean: f64,
    pooled_sd: f64,
    raw_z: f64,
}

fn feature_stats(
    column: impl Iterator<Item = f64> + Clone,
    labels: &[i8],
    n_pos: usize,
    n_neg: usize,
) -> Option<FeatureStats> {
    let (mut sum_pos, mut sum_neg) = (0.0, 0.0);
    for (x, &y) in column.clone().zip(labels) {
        if y == 1 {
            sum_pos += x;
        } else {
            sum_neg += x;
        }
    }
    let mean_pos = sum_pos / n_pos as f64;
    let mean_neg = sum_neg / n_neg as f64;
    let mut ss = 0.0;
    for (x, &y) in column.zip(labels) {
        let d = if y == 1 { x - mean_pos } else { x - mean_neg };
        ss += d * d;
    }
    let var = ss / (n_pos + n_neg - 2) as f64;
    if !(var > 0.0) {
        return None;
    }
    let sd = libm::sqrt(var);
    let scale = libm::sqrt(1.0 / n_pos as f64 + 1.0 / n_neg as f64);
    Some(FeatureStats {
        overall_mean: (sum_pos + sum_neg) / (n_pos + n_neg) as f64,
        pooled_sd: sd,
        raw_z: (mean_pos - mean_neg) / (sd * scale),
    })
}

fn check_classes(train: &LabeledMatrix) -> Result<(usize, usize)> {
    let (n_pos, n_neg) = train.class_counts();
    if n_pos < 2 || n_neg < 2 {
        return Err(invalid!("each class needs at least two samples, got {n_pos} (+1) and {n_neg} (-1)"));
    }
    Ok((n_pos, n_neg))
}

fn all_feature_stats(train: &LabeledMatrix) -> Result<Vec<FeatureStats>> {
    let (n_pos, n_neg) = check_classes(train)?;
    train
        .data
        .column_iter()
        .enumerate()
        .map(|(j, col)| {
            feature_stats(col.iter().copied(), &train.labels, n_pos, n_neg).ok_or(Error::ZeroVariance { index: j })
        })
        .collect()
}

/// Two-class t-like scores `z*_j` (class +1 minus class −1) and their
/// standardized form.
pub fn feature_zscores(train: &LabeledMatrix) -> Result<ZScores> {
    let stats = all_feature_stats(train)?;
    ZScores::from_raw(stats.iter().map(|s| s.raw_z).collect())
}

/// Outcome of HC threshold selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcThreshold {
    pub threshold: f64,
    /// `î^HC`, 1-based.
    pub hct_index: usize,
    /// HC feature score at `î`; `None` when the fallback `î = 1` was used.
    pub hc_score: Option<f64>,
}

/// HC threshold: maximize the feature scores over `1 ≤ i ≤ ⌊α₀p⌋` and take
/// the `î`-th largest `|Z|`. Falls back to `î = 1` if no score is positive.
pub fn hct_threshold(z: &ZScores, alpha0: f64) -> Result<HcThreshold> {
    let p = z.standardized.len();
    if p < 2 {
        return Err(invalid!("threshold selection needs at least two features"));
    }
    let series = PValueSeries::new(z.two_sided_pvalues())?;
    let best = hc::hc_feature(&series, alpha0)?;
    let (hct_index, hc_score) = match best.argmax_index {
        Some(i) if best.score > 0.0 => (i, Some(best.score)),
        _ => (1, None),
    };
    let mut abs: Vec<f64> = z.standardized.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(HcThreshold { threshold: abs[hct_index - 1], hct_index, hc_score })
}

/// Trained LDA–HCT classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct HctModel {
    /// `sgn(Z_j)` on selected features, 0 elsewhere.
    pub weights: Vec<i8>,
    pub threshold: f64,
    pub hct_index: usize,
    pub hc_score: Option<f64>,
    pub feature_means: Vec<f64>,
    pub feature_sds: Vec<f64>,
    pub alpha0: f64,
}

impl HctModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w != 0).map(|(j, _)| j)
    }

    pub fn n_selected(&self) -> usize {
        self.selected().count()
    }

    /// True when ties at the threshold selected more than `hct_index` features.
    pub fn has_threshold_ties(&self) -> bool {
        self.n_selected() != self.hct_index
    }

    /// `lda(x) = Σ_j w_j (x_j − x̄_j)/s_j`.
    pub fn score(&self, sample: &[f64]) -> Result<f64> {
        if sample.len() != self.weights.len() {
            return Err(invalid!("sample has {} features, model expects {}", sample.len(), self.weights.len()));
        }
        Ok(self
            .selected()
            .map(|j| self.weights[j] as f64 * (sample[j] - self.feature_means[j]) / self.feature_sds[j])
            .sum())
    }

    /// Predicted label; a score of exactly 0 maps to +1.
    pub fn predict(&self, sample: &[f64]) -> Result<i8> {
        Ok(label_for(self.score(sample)?))
    }
}

#[inline]
fn label_for(score: f64) -> i8 {
    if score < 0.0 {
        -1
    } else {
        1
    }
}

/// Fits the classifier on training data only.
pub fn train(train: &LabeledMatrix, alpha0: f64) -> Result<HctModel> {
    let stats = all_feature_stats(train)?;
    let z = ZScores::from_raw(stats.iter().map(|s| s.raw_z).collect())?;
    let hct = hct_threshold(&z, alpha0)?;
    let weights = z
        .standardized
        .iter()
        .map(|&v| {
            if v.abs() >= hct.threshold {
                if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                }
            } else {
                0
            }
        })
        .collect();
    Ok(HctModel {
        weights,
        threshold: hct.threshold,
        hct_index: hct.hct_index,
        hc_score: hct.hc_score,
        feature_means: stats.iter().map(|s| s.overall_mean).collect(),
        feature_sds: stats.iter().map(|s| s.pooled_sd).collect(),
        alpha0,
    })
}

/// Convenience wrapper over [`HctModel::predict`].
pub fn predict(model: &HctModel, sample: &[f64]) -> Result<i8> {
    model.predict(sample)
}

/// Test-set performance.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub error_rate: f64,
    pub errors: usize,
    /// 1-based rows of misclassified samples.
    pub misclassified: Vec<usize>,
    pub predictions: Vec<i8>,
    /// Raw LDA scores of samples whose true label is +1.
    pub scores_pos: Vec<f64>,
    /// Raw LDA scores of samples whose true label is −1.
    pub scores_neg: Vec<f64>,
    /// Multiply raw scores by this (`1/√î`) for the normalized view.
    pub normalization: f64,
    /// Number of samples whose score was exactly zero.
    pub ties: usize,
}

pub fn evaluate(model: &HctModel, test: &LabeledMatrix) -> Result<Evaluation> {
    if test.n_features() != model.n_features() {
        return Err(invalid!("test data has {} features, model expects {}", test.n_features(), model.n_features()));
    }
    let mut out = Evaluation {
        error_rate: 0.0,
        errors: 0,
        misclassified: Vec::new(),
        predictions: Vec::with_capacity(test.n_samples()),
        scores_pos: Vec::new(),
        scores_neg: Vec::new(),
        normalization: 1.0 / libm::sqrt(model.hct_index as f64),
        ties: 0,
    };
    let mut row = alloc::vec![0.0; test.n_features()];
    for (i, &truth) in test.labels.iter().enumerate() {
        for (dst, src) in row.iter_mut().zip(test.data.row(i).iter()) {
            *dst = *src;
        }
        let s = model.score(&row)?;
        if s == 0.0 {
            out.ties += 1;
        }
        let pred = label_for(s);
        out.predictions.push(pred);
        if pred != truth {
            out.errors += 1;
            out.misclassified.push(i + 1);
        }
        if truth == 1 {
            out.scores_pos.push(s);
        } else {
            out.scores_neg.push(s);
        }
    }
    out.error_rate = out.errors as f64 / test.n_samples().max(1) as f64;
    Ok(out)
}

/// Benjamini–Hochberg selection on the two-sided feature P-values.
///
/// Returns the selected 0-based feature indices in ascending order.
pub fn fdr_feature_select(z: &ZScores, q: f64) -> Result<Vec<usize>> {
    let pvals = z.two_sided_pvalues();
    let k = hc::bh_fdr_select(&PValueSeries::new(pvals.clone())?, q)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..pvals.len()).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]).then(a.cmp(&b)));
    let cutoff = pvals[order[k - 1]];
    // every feature whose P-value does not exceed the k-th smallest
    Ok((0..pvals.len()).filter(|&j| pvals[j] <= cutoff).collect())
}
