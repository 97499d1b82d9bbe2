//! JSON persistence for trained HCT classifiers.
//!
//! Only the selected features are stored; the model file stays small even
//! for tens of thousands of features.

use std::fs;
use std::path::Path;

use hicrit_core::hct::HctModel;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    /// 0-based column index among the features.
    pub index: usize,
    pub name: String,
    pub sign: i8,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub n_features: usize,
    pub threshold: f64,
    pub hct_index: usize,
    pub hc_score: Option<f64>,
    pub alpha0: f64,
    pub features: Vec<SelectedFeature>,
}

impl ModelFile {
    pub fn from_model(model: &HctModel, names: &[String]) -> Self {
        let features = model
            .selected()
            .map(|j| SelectedFeature {
                index: j,
                name: names.get(j).cloned().unwrap_or_else(|| format!("f{}", j + 1)),
                sign: model.weights[j],
                mean: model.feature_means[j],
                sd: model.feature_sds[j],
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            n_features: model.n_features(),
            threshold: model.threshold,
            hct_index: model.hct_index,
            hc_score: model.hc_score,
            alpha0: model.alpha0,
            features,
        }
    }

    /// Rebuilds the dense model. Unselected features get weight 0, mean 0
    /// and sd 1; they do not enter the score.
    pub fn to_model(&self) -> Result<HctModel> {
        let bad = |msg: String| Error::validation("model", msg);
        if self.format_version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format_version {}", self.format_version)));
        }
        let p = self.n_features;
        let mut weights = vec![0i8; p];
        let mut means = vec![0.0; p];
        let mut sds = vec![1.0; p];
        for f in &self.features {
            if f.index >= p {
                return Err(bad(format!("feature index {} outside 0..{p}", f.index)));
            }
            if f.sign != 1 && f.sign != -1 {
                return Err(bad(format!("feature {} has sign {}", f.index, f.sign)));
            }
            if f.sd.is_nan() || f.sd <= 0.0 {
                return Err(bad(format!("feature {} has non-positive sd", f.index)));
            }
            weights[f.index] = f.sign;
            means[f.index] = f.mean;
            sds[f.index] = f.sd;
        }
        Ok(HctModel {
            weights,
            threshold: self.threshold,
            hct_index: self.hct_index,
            hc_score: self.hc_score,
            feature_means: means,
            feature_sds: sds,
            alpha0: self.alpha0,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
    }
}
