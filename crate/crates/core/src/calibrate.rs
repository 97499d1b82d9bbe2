//! Critical values `h(N, α)`: the Gumbel closed form and seeded simulation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::exec::map_replicates;
use crate::hc::{self, HcVariant, PValueSeries};
use crate::rng::{tags, RngSeed, RNG_VERSION};

/// Gumbel approximation `h_G(N, α) = b_N⁻¹·[c_N − log log(1/(1−α))]`.
pub fn gumbel_critical(n: usize, alpha: f64) -> Result<f64> {
    if n < 16 {
        return Err(invalid!("Gumbel approximation needs N >= 16 (log log log N > 0), got {n}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1), got {alpha}"));
    }
    let ll = libm::log(libm::log(n as f64));
    let b = libm::sqrt(2.0 * ll);
    let c = 2.0 * ll + 0.5 * (libm::log(ll) - libm::log(4.0 * PI));
    Ok((c - libm::log(libm::log(1.0 / (1.0 - alpha)))) / b)
}

fn check_calibrated_variant(variant: HcVariant) -> Result<()> {
    match variant {
        HcVariant::Star | HcVariant::Plus => Ok(()),
        other => Err(invalid!("critical values are calibrated for star or plus, not {other}")),
    }
}

/// One simulated score: `n` uniform P-values scored with `variant`.
pub fn null_score(n: usize, variant: HcVariant, alpha0: f64, seed: RngSeed) -> Result<f64> {
    let mut rng = seed.rng();
    let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let series = PValueSeries::new(values)?;
    Ok(hc::score(&series, variant, alpha0)?.score)
}

/// Scores of `replicates` independent null series, sorted ascending.
///
/// Replicate `r` uses its own stream, so the result is the same for any
/// degree of parallelism.
pub fn simulate_null_scores(n: usize, variant: HcVariant, alpha0: f64, replicates: u64, seed: u64) -> Result<Vec<f64>> {
    // validate once up front so workers cannot fail on parameters
    hc::score(&PValueSeries::new(alloc::vec![0.5; n.max(1)])?, variant, alpha0)?;
    let base = RngSeed::new(seed);
    let mut scores = map_replicates(replicates, |r| null_score(n, variant, alpha0, base.substream(tags::NULL, r)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    scores.sort_unstable_by(f64::total_cmp);
    Ok(scores)
}

/// 1-based rank `⌈(1−α)·B⌉` of the empirical quantile.
pub fn quantile_rank(alpha: f64, replicates: usize) -> usize {
    let raw = (1.0 - alpha) * replicates as f64;
    let rank = libm::ceil(raw - 1e-9 * raw.max(1.0)) as usize;
    rank.clamp(1, replicates.max(1))
}

/// Empirical `(1−α)` quantile of ascending `sorted` scores.
pub fn empirical_quantile(sorted: &[f64], alpha: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(invalid!("no scores to take a quantile of"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(sorted[quantile_rank(alpha, sorted.len()) - 1])
}

/// A simulated critical value together with everything that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueEntry {
    pub n: usize,
    pub alpha: f64,
    pub variant: HcVariant,
    pub alpha0: f64,
    pub replicates: u64,
    pub seed: u64,
    pub rng_version: alloc::string::String,
    pub quantile: f64,
}

impl CriticalValueEntry {
    /// True when this entry answers a request for `(n, alpha, variant, alpha0)`
    /// backed by at least `min_replicates` simulations.
    pub fn matches(&self, n: usize, alpha: f64, variant: HcVariant, alpha0: f64, min_replicates: u64) -> bool {
        self.n == n
            && self.alpha == alpha
            && self.variant == variant
            && self.alpha0 == alpha0
            && self.replicates >= min_replicates
            && self.rng_version == RNG_VERSION
    }

    pub fn critical(&self) -> CriticalValue {
        CriticalValue { n: self.n, variant: self.variant, alpha0: self.alpha0, value: self.quantile }
    }
}

fn check_replicates(replicates: u64) -> Result<()> {
    if replicates < 100 {
        return Err(invalid!("need at least 100 replicates, got {replicates}"));
    }
    Ok(())
}

/// Simulated critical value `h(N, α)` for one level.
pub fn simulate_critical(
    n: usize,
    alpha: f64,
    variant: HcVariant,
    alpha0: f64,
    replicates: u64,
    seed: u64,
) -> Result<CriticalValueEntry> {
    let mut entries = simulate_critical_levels(n, &[alpha], variant, alpha0, replicates, seed)?;
    Ok(entries.remove(0))
}

/// Critical values for several levels from one shared simulation.
pub fn simulate_critical_levels(
    n: usize,
    alphas: &[f64],
    variant: HcVariant,
    alpha0: f64,
    replicates: u64,
    seed: u64,
) -> Result<Vec<CriticalValueEntry>> {
    check_calibrated_variant(variant)?;
    check_replicates(replicates)?;
    let scores = simulate_null_scores(n, variant, alpha0, replicates, seed)?;
    alphas
        .iter()
        .map(|&alpha| {
            Ok(CriticalValueEntry {
                n,
                alpha,
                variant,
                alpha0,
                replicates,
                seed,
                rng_version: RNG_VERSION.into(),
                quantile: empirical_quantile(&scores, alpha)?,
            })
        })
        .collect()
}

/// A threshold with the metadata needed to check it is applied correctly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub n: usize,
    pub variant: HcVariant,
    pub alpha0: f64,
    pub value: f64,
}

impl CriticalValue {
    pub fn gumbel(n: usize, alpha: f64, variant: HcVariant, alpha0: f64) -> Result<Self> {
        Ok(Self { n, variant, alpha0, value: gumbel_critical(n, alpha)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Reject,
    Retain,
}

impl Decision {
    /// Reject iff `score > critical`.
    pub fn from_score(score: f64, critical: f64) -> Self {
        if score > critical {
            Decision::Reject
        } else {
            Decision::Retain
        }
    }
}

/// Level-α HC test of `series` against a critical value computed for the
/// same `N` and variant.
pub fn level_alpha_test(series: &PValueSeries, critical: &CriticalValue) -> Result<(Decision, f64)> {
    if series.len() != critical.n {
        return Err(invalid!("critical value was computed for N = {}, series has N = {}", critical.n, series.len()));
    }
    check_calibrated_variant(critical.variant)?;
    let score = hc::score(series, critical.variant, critical.alpha0)?.score;
    Ok((Decision::from_score(score, critical.value), score))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gumbel_matches_table_brackets() {
        let cases = [(1000, 0.05, 3.00), (125_000, 0.001, 4.97), (1000, 0.01, 3.83)];
        for (n, a, want) in cases {
            let h = gumbel_critical(n, a).unwrap();
            assert!((h - want).abs() <= 0.01, "h_G({n}, {a}) = {h}");
        }
        assert!(gumbel_critical(15, 0.05).is_err());
        assert!(gumbel_critical(1000, 1.0).is_err());
    }

    #[test]
    fn quantile_rank_is_ceiling() {
        assert_eq!(quantile_rank(0.05, 100_000), 95_000);
        assert_eq!(quantile_rank(0.05, 100), 95);
        assert_eq!(quantile_rank(0.05, 101), 96);
        assert_eq!(quantile_rank(0.001, 1000), 999);
        let s: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&s, 0.05).unwrap(), 95.0);
    }

    #[test]
    fn decisions_use_strict_inequality() {
        let grid = PValueSeries::new((1..=100).map(|i| i as f64 / 100.0).collect()).unwrap();
        let crit = CriticalValue { n: 100, variant: HcVariant::Plus, alpha0: 0.5, value: 1.0 };
        assert_eq!(level_alpha_test(&grid, &crit).unwrap().0, Decision::Retain);
        assert_eq!(Decision::from_score(3.2, 3.2), Decision::Retain);
        assert_eq!(Decision::from_score(7.1, 3.2), Decision::Reject);
        let wrong_n = CriticalValue { n: 99, ..crit };
        assert!(level_alpha_test(&grid, &wrong_n).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = simulate_critical(200, 0.05, HcVariant::Plus, 0.5, 300, 11).unwrap();
        let b = simulate_critical(200, 0.05, HcVariant::Plus, 0.5, 300, 11).unwrap();
        assert_eq!(a.quantile.to_bits(), b.quantile.to_bits());
        let c = simulate_critical(200, 0.05, HcVariant::Plus, 0.5, 300, 12).unwrap();
        assert_ne!(a.quantile, c.quantile);
        assert!(simulate_critical(200, 0.05, HcVariant::Plus, 0.5, 99, 11).is_err());
        assert!(simulate_critical(200, 0.05, HcVariant::BerkJones, 0.5, 300, 11).is_err());
    }
}
