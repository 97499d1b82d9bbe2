//! Asymptotic Rare/Weak data, the sparse-mixture detection experiment and
//! permutation P-values for HC scores of labelled matrices.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calibrate::{empirical_quantile, Decision};
use crate::error::{invalid, Result};
use crate::exec::map_replicates;
use crate::hc::{self, HcVariant, PValueSeries};
use crate::hct::{feature_zscores, LabeledMatrix};
use crate::numerics::{clamp_pvalue, phi};
use crate::rng::{tags, RngSeed};

/// Rare/Weak calibration `ε = N^(−ϑ)`, `τ = √(2r·log N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArwParams {
    n: usize,
    vartheta: f64,
    r: f64,
}

impl ArwParams {
    pub fn new(n: usize, vartheta: f64, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid!("ARW needs N >= 2"));
        }
        if !(vartheta > 0.0 && vartheta < 1.0) {
            return Err(invalid!("vartheta must lie in (0, 1), got {vartheta}"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid!("r must be positive, got {r}"));
        }
        Ok(Self { n, vartheta, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn epsilon(&self) -> f64 {
        libm::pow(self.n as f64, -self.vartheta)
    }

    pub fn tau(&self) -> f64 {
        libm::sqrt(2.0 * self.r * libm::log(self.n as f64))
    }

    pub fn mixture(&self) -> MixtureSpec {
        MixtureSpec { n: self.n, epsilon: self.epsilon(), tau: self.tau() }
    }
}

/// Explicit `(N, ε, τ)` for `(1 − ε)N(0,1) + εN(τ,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    pub n: usize,
    pub epsilon: f64,
    pub tau: f64,
}

impl MixtureSpec {
    pub fn new(n: usize, epsilon: f64, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(invalid!("epsilon must lie in [0, 1], got {epsilon}"));
        }
        if !tau.is_finite() {
            return Err(invalid!("tau must be finite"));
        }
        Ok(Self { n, epsilon, tau })
    }

    pub fn null(n: usize) -> Self {
        Self { n, epsilon: 0.0, tau: 0.0 }
    }
}

/// Observations with the latent non-null flags.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSample {
    pub x: Vec<f64>,
    pub ground_truth: Vec<bool>,
}

impl MixtureSample {
    pub fn nonnull_count(&self) -> usize {
        self.ground_truth.iter().filter(|&&f| f).count()
    }
}

/// Draws `N` i.i.d. coordinates, each non-null with probability `ε`.
pub fn sample_mixture<R: Rng + ?Sized>(spec: &MixtureSpec, rng: &mut R) -> MixtureSample {
    let mut x = Vec::with_capacity(spec.n);
    let mut ground_truth = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let flag = spec.epsilon > 0.0 && rng.random::<f64>() < spec.epsilon;
        let z: f64 = StandardNormal.sample(rng);
        x.push(if flag { z + spec.tau } else { z });
        ground_truth.push(flag);
    }
    MixtureSample { x, ground_truth }
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(invalid!("observation {} is not finite", k + 1)),
        None => Ok(()),
    }
}

/// `π_i = 1 − Φ(x_i)`, sorted.
pub fn pvalues_one_sided(x: &[f64]) -> Result<PValueSeries> {
    check_finite(x)?;
    PValueSeries::new(x.iter().map(|&v| clamp_pvalue(phi(-v))).collect())
}

/// `π_i = 2(1 − Φ(|x_i|))`, sorted.
pub fn pvalues_two_sided(x: &[f64]) -> Result<PValueSeries> {
    check_finite(x)?;
    PValueSeries::new(x.iter().map(|&v| crate::hct::two_sided(v)).collect())
}

/// How the detection experiment picks its rejection threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalChoice {
    /// A precomputed critical value.
    Fixed(f64),
    /// The `(1−α)` quantile of the experiment's own null scores.
    FromNullScores,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    pub spec: MixtureSpec,
    pub reps: u64,
    pub alpha: f64,
    pub variant: HcVariant,
    pub alpha0: f64,
    pub critical: CriticalChoice,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSummary {
    /// Null scores in replicate order.
    pub null_scores: Vec<f64>,
    /// Alternative scores in replicate order.
    pub alt_scores: Vec<f64>,
    pub critical: f64,
    pub power: f64,
    pub size: f64,
}

impl DetectionSummary {
    /// Whether every alternative score exceeds every null score.
    pub fn separated(&self) -> bool {
        let max_null = self.null_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_alt = self.alt_scores.iter().copied().fold(f64::INFINITY, f64::min);
        min_alt > max_null
    }
}

/// Scores one simulated mixture.
pub fn mixture_score(spec: &MixtureSpec, variant: HcVariant, alpha0: f64, seed: RngSeed) -> Result<f64> {
    let sample = sample_mixture(spec, &mut seed.rng());
    let series = pvalues_one_sided(&sample.x)?;
    Ok(hc::score(&series, variant, alpha0)?.score)
}

fn rejection_rate(scores: &[f64], critical: f64) -> f64 {
    let hits = scores.iter().filter(|&&s| Decision::from_score(s, critical) == Decision::Reject).count();
    hits as f64 / scores.len() as f64
}

/// Runs `reps` null and `reps` alternative simulations and reports the
/// rejection rates at the chosen critical value.
pub fn detection_experiment(cfg: &DetectionConfig) -> Result<DetectionSummary> {
    if cfg.reps < 2 {
        return Err(invalid!("detection experiment needs reps >= 2"));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1)"));
    }
    MixtureSpec::new(cfg.spec.n, cfg.spec.epsilon, cfg.spec.tau)?;
    let null_spec = MixtureSpec::null(cfg.spec.n);
    let base = RngSeed::new(cfg.seed);
    let run = |spec: &MixtureSpec, tag| -> Result<Vec<f64>> {
        map_replicates(cfg.reps, |r| mixture_score(spec, cfg.variant, cfg.alpha0, base.substream(tag, r)))
            .into_iter()
            .collect()
    };
    let null_scores = run(&null_spec, tags::NULL)?;
    let alt_scores = run(&cfg.spec, tags::ALTERNATIVE)?;
    let critical = match cfg.critical {
        CriticalChoice::Fixed(c) => c,
        CriticalChoice::FromNullScores => {
            let mut sorted = null_scores.clone();
            sorted.sort_unstable_by(f64::total_cmp);
            empirical_quantile(&sorted, cfg.alpha)?
        }
    };
    Ok(DetectionSummary {
        power: rejection_rate(&alt_scores, critical),
        size: rejection_rate(&null_scores, critical),
        null_scores,
        alt_scores,
        critical,
    })
}

/// HC score of a labelled matrix: two-sided P-values of its standardized
/// Z-scores, scored with `variant`.
pub fn matrix_hc_score(matrix: &LabeledMatrix, variant: HcVariant, alpha0: f64) -> Result<f64> {
    let z = feature_zscores(matrix)?;
    let series = PValueSeries::new(z.two_sided_pvalues())?;
    Ok(hc::score(&series, variant, alpha0)?.score)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOutcome {
    pub pvalue: f64,
    pub observed: f64,
    /// Scores of the shuffled matrices in shuffle order.
    pub shuffle_scores: Vec<f64>,
}

/// Permutes the entries of every column independently.
pub fn shuffle_columns<R: Rng + ?Sized>(data: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let mut out = data.clone();
    for mut col in out.column_iter_mut() {
        col.as_mut_slice().shuffle(rng);
    }
    out
}

/// Add-one permutation P-value `(1 + #{shuffle ≥ observed}) / (1 + B)`.
pub fn permutation_pvalue(
    matrix: &LabeledMatrix,
    shuffles: u64,
    seed: u64,
    variant: HcVariant,
    alpha0: f64,
) -> Result<PermutationOutcome> {
    if shuffles < 1 {
        return Err(invalid!("need at least one shuffle"));
    }
    let observed = matrix_hc_score(matrix, variant, alpha0)?;
    let base = RngSeed::new(seed);
    let shuffle_scores = map_replicates(shuffles, |b| {
        let shuffled = shuffle_columns(matrix.data(), &mut base.substream(tags::SHUFFLE, b).rng());
        matrix_hc_score(&matrix.with_data(shuffled), variant, alpha0)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(PermutationOutcome {
        pvalue: permutation_pvalue_from_scores(observed, &shuffle_scores),
        observed,
        shuffle_scores,
    })
}

/// The add-one estimator applied to precomputed scores.
pub fn permutation_pvalue_from_scores(observed: f64, shuffle_scores: &[f64]) -> f64 {
    let exceed = shuffle_scores.iter().filter(|&&s| s >= observed).count();
    (1 + exceed) as f64 / (1 + shuffle_scores.len()) as f64
}
