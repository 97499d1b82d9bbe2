//! The Higher Criticism family over sorted P-values.
//!
//! All index arguments and reported maximizers are 1-based: index `i` refers
//! to the `i`-th smallest P-value `π_(i)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::numerics::{clamp_pvalue, kl_unchecked};

/// Validated P-values sorted in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueSeries {
    values: Vec<f64>,
}

impl PValueSeries {
    /// Validates, clamps into `[1e-300, 1]` and sorts.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid!("P-value series is empty"));
        }
        for (k, v) in values.iter_mut().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(invalid!("P-value at position {} is {v}, outside [0, 1]", k + 1));
            }
            *v = clamp_pvalue(*v);
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Like [`PValueSeries::new`] but rejects unsorted input instead of sorting.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(invalid!("P-values are not ascending at position {}", k + 2));
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `π_(i)` for 1-based `i`.
    pub fn get(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|k| self.values.get(k).copied())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Which member of the HC family produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HcVariant {
    Star,
    Plus,
    Feature,
    BerkJones,
    Alr,
}

impl HcVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            HcVariant::Star => "star",
            HcVariant::Plus => "plus",
            HcVariant::Feature => "feature",
            HcVariant::BerkJones => "bj",
            HcVariant::Alr => "alr",
        }
    }
}

impl fmt::Display for HcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HcVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(HcVariant::Star),
            "plus" => Ok(HcVariant::Plus),
            "feature" => Ok(HcVariant::Feature),
            "bj" => Ok(HcVariant::BerkJones),
            "alr" => Ok(HcVariant::Alr),
            other => Err(invalid!("unknown HC variant `{other}`")),
        }
    }
}

/// Outcome of one HC-type statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct HcResult {
    pub score: f64,
    /// 1-based maximizing index; `None` for ALR or when no index qualified.
    pub argmax_index: Option<usize>,
    pub variant: HcVariant,
    pub alpha0: f64,
    /// Indices dropped from the maximum (infinite or undefined terms).
    pub excluded: usize,
}

impl HcResult {
    /// True when the restricted index range held no admissible index.
    pub fn is_empty_range(&self) -> bool {
        self.argmax_index.is_none() && self.variant != HcVariant::Alr
    }

    /// Single-line `key=value` rendering.
    pub fn to_record(&self) -> String {
        let argmax = match self.argmax_index {
            Some(i) => alloc::format!("{i}"),
            None => String::from("NA"),
        };
        alloc::format!(
            "variant={} score={} argmax={} alpha0={} excluded={}",
            self.variant,
            self.score,
            argmax,
            self.alpha0,
            self.excluded
        )
    }
}

/// `⌊α₀·N⌋`, tolerant of products such as `0.57 × 100 = 56.999…`.
pub fn index_bound(alpha0: f64, n: usize) -> usize {
    let raw = alpha0 * n as f64;
    let bound = libm::floor(raw + 1e-9 * raw.max(1.0)) as usize;
    bound.min(n)
}

fn check_alpha0(alpha0: f64, n: usize) -> Result<usize> {
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return Err(invalid!("alpha0 must lie in (0, 1], got {alpha0}"));
    }
    let bound = index_bound(alpha0, n);
    if bound < 1 {
        return Err(invalid!("empty index range: floor(alpha0 * N) = 0 for alpha0 = {alpha0}, N = {n}"));
    }
    Ok(bound)
}

/// Tukey's second-level statistic `HC_{N,α}` from a count of significant tests.
pub fn hc_at_level(n: usize, alpha: f64, count_significant: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid!("N must be positive"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid!("alpha must lie in (0, 1), got {alpha}"));
    }
    if count_significant > n {
        return Err(invalid!("count {count_significant} exceeds N = {n}"));
    }
    let nf = n as f64;
    Ok(libm::sqrt(nf) * (count_significant as f64 / nf - alpha) / libm::sqrt(alpha * (1.0 - alpha)))
}

#[inline]
fn component_raw(i: usize, n: usize, p: f64) -> Option<f64> {
    let frac = i as f64 / n as f64;
    let var = p * (1.0 - p);
    if var > 0.0 {
        Some(libm::sqrt(n as f64) * (frac - p) / libm::sqrt(var))
    } else if frac == p {
        Some(0.0)
    } else {
        None
    }
}

/// Component `HC_{N,i}`. `None` when `π_(i) = 1` but `i < N`.
pub fn hc_component(i: usize, series: &PValueSeries) -> Result<Option<f64>> {
    let p = series.get(i).ok_or_else(|| invalid!("index {i} outside 1..={}", series.len()))?;
    Ok(component_raw(i, series.len(), p))
}

/// Every component `HC_{N,i}`, `i = 1..=N`.
pub fn hc_components(series: &PValueSeries) -> Vec<Option<f64>> {
    let n = series.len();
    series.values.iter().enumerate().map(|(k, &p)| component_raw(k + 1, n, p)).collect()
}

/// Running maximum with smallest-index tie-breaking.
#[derive(Default)]
struct ArgMax {
    best: Option<(usize, f64)>,
    excluded: usize,
}

impl ArgMax {
    #[inline]
    fn offer(&mut self, i: usize, value: Option<f64>) {
        match value {
            Some(v) => match self.best {
                Some((_, b)) if v <= b => {}
                _ => self.best = Some((i, v)),
            },
            None => self.excluded += 1,
        }
    }

    fn finish(self, variant: HcVariant, alpha0: f64, empty_score: f64) -> HcResult {
        let (argmax_index, score) = match self.best {
            Some((i, v)) => (Some(i), v),
            None => (None, empty_score),
        };
        HcResult { score, argmax_index, variant, alpha0, excluded: self.excluded }
    }
}

/// `HC*_N`: maximum of the components over `1 ≤ i ≤ ⌊α₀N⌋`.
pub fn hc_star(series: &PValueSeries, alpha0: f64) -> Result<HcResult> {
    let n = series.len();
    let bound = check_alpha0(alpha0, n)?;
    let mut acc = ArgMax::default();
    for (k, &p) in series.values[..bound].iter().enumerate() {
        acc.offer(k + 1, component_raw(k + 1, n, p));
    }
    Ok(acc.finish(HcVariant::Star, alpha0, f64::NEG_INFINITY))
}

/// `HC⁺_N`: as [`hc_star`] but only over indices with `π_(i) > 1/N`.
///
/// When no index qualifies the score is `-∞` and `argmax_index` is `None`.
pub fn hc_plus(series: &PValueSeries, alpha0: f64) -> Result<HcResult> {
    let n = series.len();
    let bound = check_alpha0(alpha0, n)?;
    let floor = 1.0 / n as f64;
    let mut acc = ArgMax::default();
    for (k, &p) in series.values[..bound].iter().enumerate() {
        if p > floor {
            acc.offer(k + 1, component_raw(k + 1, n, p));
        }
    }
    Ok(acc.finish(HcVariant::Plus, alpha0, f64::NEG_INFINITY))
}

/// HC over the indices whose P-value lies in the band `[lower, upper]`.
///
/// With `lower = 1/N`, `upper = 1/2` this is the orthodox `OHC⁺_N` used on
/// correlation P-values.
pub fn hc_in_band(series: &PValueSeries, lower: f64, upper: f64) -> HcResult {
    let n = series.len();
    let mut acc = ArgMax::default();
    for (k, &p) in series.values.iter().enumerate() {
        if p >= lower && p <= upper {
            acc.offer(k + 1, component_raw(k + 1, n, p));
        }
    }
    acc.finish(HcVariant::Plus, 1.0, f64::NEG_INFINITY)
}

/// `OHC⁺_N` with the band `1/N ≤ π_(i) ≤ 1/2`.
pub fn hc_orthodox_plus(series: &PValueSeries) -> HcResult {
    hc_in_band(series, 1.0 / series.len() as f64, 0.5)
}

/// Feature-selection scores `HC(i; π_(i))` for `i = 1..=N−1`.
///
/// The denominator uses the null standard deviation `√((i/N)(1 − i/N))`
/// rather than `√(π_(i)(1 − π_(i)))`.
pub fn hc_feature_scores(series: &PValueSeries) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 {
        return Err(invalid!("feature scores need N >= 2"));
    }
    let nf = n as f64;
    let root_n = libm::sqrt(nf);
    Ok(series.values[..n - 1]
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let frac = (k + 1) as f64 / nf;
            root_n * (frac - p) / libm::sqrt(frac * (1.0 - frac))
        })
        .collect())
}

/// Maximum of [`hc_feature_scores`] over `1 ≤ i ≤ min(⌊α₀N⌋, N−1)`.
pub fn hc_feature(series: &PValueSeries, alpha0: f64) -> Result<HcResult> {
    let n = series.len();
    let bound = check_alpha0(alpha0, n)?.min(n.saturating_sub(1));
    let scores = hc_feature_scores(series)?;
    let mut acc = ArgMax::default();
    for (k, &s) in scores[..bound].iter().enumerate() {
        acc.offer(k + 1, Some(s));
    }
    Ok(acc.finish(HcVariant::Feature, alpha0, f64::NEG_INFINITY))
}

/// Berk–Jones: `max_i N·D(π_(i), i/N)`.
///
/// Infinite divergence terms are dropped and counted in `excluded`; the
/// maximum over an empty set is 0.
pub fn berk_jones(series: &PValueSeries) -> HcResult {
    let n = series.len();
    let nf = n as f64;
    let mut acc = ArgMax::default();
    for (k, &p) in series.values.iter().enumerate() {
        let d = kl_unchecked(p, (k + 1) as f64 / nf);
        acc.offer(k + 1, d.is_finite().then_some(nf * d));
    }
    acc.finish(HcVariant::BerkJones, 1.0, 0.0)
}

/// Average likelihood ratio, returned as `log(ALR)`.
///
/// `ALR = Σ_{i ≤ ⌊α₀N⌋} w_i·exp(N·max{D(π_(i), i/N), 0})`, with
/// `w_i = 1/(2i·log(N/3))`. Infinite terms are excluded.
pub fn avg_likelihood_ratio(series: &PValueSeries, alpha0: f64) -> Result<HcResult> {
    let n = series.len();
    if n <= 3 {
        return Err(invalid!("ALR needs N >= 4 so that log(N/3) > 0"));
    }
    let bound = check_alpha0(alpha0, n)?;
    let nf = n as f64;
    let log_norm = libm::log(2.0 * libm::log(nf / 3.0));
    let mut excluded = 0;
    let mut logs = Vec::with_capacity(bound);
    for (k, &p) in series.values[..bound].iter().enumerate() {
        let i = (k + 1) as f64;
        let d = kl_unchecked(p, i / nf);
        if d.is_finite() {
            logs.push(nf * d.max(0.0) - libm::log(i) - log_norm);
        } else {
            excluded += 1;
        }
    }
    let score = log_sum_exp(&logs);
    Ok(HcResult { score, argmax_index: None, variant: HcVariant::Alr, alpha0, excluded })
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + libm::log(xs.iter().map(|&x| libm::exp(x - m)).sum::<f64>())
}

/// Evaluates the chosen variant. `alpha0` is ignored by Berk–Jones.
pub fn score(series: &PValueSeries, variant: HcVariant, alpha0: f64) -> Result<HcResult> {
    match variant {
        HcVariant::Star => hc_star(series, alpha0),
        HcVariant::Plus => hc_plus(series, alpha0),
        HcVariant::Feature => hc_feature(series, alpha0),
        HcVariant::BerkJones => Ok(berk_jones(series)),
        HcVariant::Alr => avg_likelihood_ratio(series, alpha0),
    }
}

/// Inclusive 1-based index window for the goodness-of-fit maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexWindow {
    pub first: usize,
    pub last: usize,
}

impl IndexWindow {
    pub fn full(n: usize) -> Self {
        Self { first: 1, last: n }
    }

    /// Omits `i = 1` and `i > α₀N`.
    pub fn restricted(alpha0: f64, n: usize) -> Self {
        Self { first: 2, last: index_bound(alpha0, n) }
    }
}

fn check_window(window: IndexWindow, n: usize) -> Result<()> {
    if window.first < 1 || window.last > n || window.first > window.last {
        return Err(invalid!("index window {}..={} is empty or outside 1..={n}", window.first, window.last));
    }
    Ok(())
}

#[inline]
fn standardized_gap(a: f64, f0: f64) -> Option<f64> {
    let var = f0 * (1.0 - f0);
    (var > 0.0 && var.is_finite()).then(|| (a - f0).abs() / libm::sqrt(var))
}

/// Theoretically standardized goodness of fit `μ₁`.
///
/// Compares the empirical CDF of the P-values with `f0` on the grid `i/N`.
pub fn gof_theoretical<F>(series: &PValueSeries, f0: F, window: IndexWindow) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let n = series.len();
    check_window(window, n)?;
    let nf = n as f64;
    let values = series.values();
    let mut below = 0;
    let mut best = f64::NEG_INFINITY;
    for i in window.first..=window.last {
        let t = i as f64 / nf;
        while below < n && values[below] <= t {
            below += 1;
        }
        if let Some(g) = standardized_gap(below as f64 / nf, f0(t)) {
            best = best.max(g);
        }
    }
    Ok(libm::sqrt(nf) * best)
}

/// Empirically standardized goodness of fit `μ₂`.
pub fn gof_empirical<F>(series: &PValueSeries, f0: F, window: IndexWindow) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let n = series.len();
    check_window(window, n)?;
    let nf = n as f64;
    let best = (window.first..=window.last)
        .filter_map(|i| standardized_gap(i as f64 / nf, f0(series.values[i - 1])))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(libm::sqrt(nf) * best)
}

/// Benjamini–Hochberg: the largest `k` with `π_(k) ≤ q·k/N`, or 0.
pub fn bh_fdr_select(series: &PValueSeries, q: f64) -> Result<usize> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid!("FDR level q must lie in (0, 1), got {q}"));
    }
    let nf = series.len() as f64;
    Ok(series.values.iter().enumerate().rev().find(|&(k, &p)| p / ((k + 1) as f64 / nf) <= q).map_or(0, |(k, _)| k + 1))
}

/// BH ratios `r_k = π_(k)/(k/N)`.
pub fn bh_ratios(series: &PValueSeries) -> Vec<f64> {
    let nf = series.len() as f64;
    series.values.iter().enumerate().map(|(k, &p)| p / ((k + 1) as f64 / nf)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn series(v: &[f64]) -> PValueSeries {
        PValueSeries::new(v.to_vec()).unwrap()
    }

    fn grid(n: usize) -> PValueSeries {
        series(&(1..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn tukey_level_statistic() {
        let v = hc_at_level(250, 0.05, 11).unwrap();
        assert!(close(v, -0.435_285, 1e-5), "{v}");
        assert_eq!(hc_at_level(200, 0.05, 10).unwrap(), 0.0);
        assert!(close(hc_at_level(100, 0.5, 100).unwrap(), 10.0, 1e-12));
        assert!(hc_at_level(100, 0.0, 1).is_err());
        assert!(hc_at_level(100, 1.0, 1).is_err());
        assert!(hc_at_level(10, 0.5, 11).is_err());
    }

    #[test]
    fn components_match_direct_formula() {
        let s = series(&[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(hc_component(1, &s).unwrap(), Some(0.0));
        assert_eq!(hc_component(4, &s).unwrap(), Some(0.0));
        let s = series(&[0.1, 0.9]);
        let c1 = hc_component(1, &s).unwrap().unwrap();
        let c2 = hc_component(2, &s).unwrap().unwrap();
        assert!(close(c1, 2f64.sqrt() * 0.4 / 0.3, 1e-14));
        assert!(close(c1, 1.885_618_083_164_126_7, 1e-12));
        assert!(close(c2, 0.471_404_520_791_031_7, 1e-12));
        assert!(hc_component(3, &s).is_err());
        // π = 1 before the last index is excluded
        let s = series(&[0.2, 1.0, 1.0]);
        assert_eq!(hc_component(2, &s).unwrap(), None);
        assert_eq!(hc_component(3, &s).unwrap(), Some(0.0));
    }

    #[test]
    fn star_examples() {
        let r = hc_star(&series(&[0.1, 0.9]), 1.0).unwrap();
        assert!(close(r.score, 1.885_618_083_164_126_7, 1e-12));
        assert_eq!(r.argmax_index, Some(1));
        assert_eq!(hc_star(&grid(50), 0.5).unwrap().score, 0.0);
        let r = hc_star(&series(&[0.001, 0.5, 0.7, 0.9]), 0.5).unwrap();
        let want = 2.0 * 0.249 / (0.001f64 * 0.999).sqrt();
        assert!(close(r.score, want, 1e-12), "{}", r.score);
        assert!(close(r.score, 15.756_022_729_491_48, 1e-12));
        assert_eq!(r.argmax_index, Some(1));
        assert!(hc_star(&series(&[0.1, 0.9]), 0.4).is_err());
        assert!(hc_star(&series(&[0.1, 0.9]), 0.0).is_err());
    }

    #[test]
    fn star_ties_pick_smallest_index() {
        let r = hc_star(&grid(10), 1.0).unwrap();
        assert_eq!(r.argmax_index, Some(1));
    }

    #[test]
    fn plus_examples() {
        let s = series(&[0.4, 0.9]);
        assert_eq!(hc_plus(&s, 1.0).unwrap().score, hc_star(&s, 1.0).unwrap().score);
        let r = hc_plus(&series(&[0.2, 0.9]), 1.0).unwrap();
        assert!(close(r.score, 0.471_404_520_791_031_7, 1e-12));
        assert_eq!(r.argmax_index, Some(2));
        let r = hc_plus(&series(&[1e-9; 8]), 0.5).unwrap();
        assert!(r.is_empty_range());
        assert_eq!(r.score, f64::NEG_INFINITY);
    }

    #[test]
    fn feature_score_examples() {
        assert!(hc_feature_scores(&grid(20)).unwrap().iter().all(|&v| v == 0.0));
        let f = hc_feature_scores(&series(&[0.1, 0.9])).unwrap();
        assert_eq!(f.len(), 1);
        assert!(close(f[0], 1.131_370_849_898_476, 1e-12));
        let f = hc_feature_scores(&series(&[0.01, 0.2, 0.6, 0.9])).unwrap();
        assert!(close(f[0], 2.0 * 0.24 / (0.25f64 * 0.75).sqrt(), 1e-14));
        assert!(close(f[0], 1.108_512_516_844_081, 1e-12));
        assert!(hc_feature_scores(&series(&[0.3])).is_err());
    }

    #[test]
    fn berk_jones_examples() {
        assert_eq!(berk_jones(&grid(30)).score, 0.0);
        let r = berk_jones(&series(&[0.1, 0.9]));
        // 2·D(0.1, 0.5); the i = N term is infinite and dropped
        assert!(close(r.score, 0.736_128_414_336_994, 1e-12), "{}", r.score);
        assert_eq!(r.excluded, 1);
        let r = berk_jones(&series(&[0.25]));
        assert_eq!(r.score, 0.0);
        assert!(r.is_empty_range());
    }

    #[test]
    fn alr_examples() {
        let r = avg_likelihood_ratio(&grid(10), 0.5).unwrap();
        assert!(close(r.score, -0.053_137_575_816_286_72, 1e-13), "{}", r.score);
        // one tiny P-value: direct (non-log) summation as the oracle
        let mut v: Vec<f64> = (2..=10).map(|i| i as f64 / 10.0).collect();
        v.push(1e-6);
        let s = series(&v);
        let r = avg_likelihood_ratio(&s, 0.5).unwrap();
        let terms: Vec<f64> = (1..=5)
            .map(|i| {
                let d = kl_unchecked(s.values()[i - 1], i as f64 / 10.0).max(0.0);
                (10.0 * d).exp() / (2.0 * i as f64 * (10.0f64 / 3.0).ln())
            })
            .collect();
        assert!(close(r.score, terms.iter().sum::<f64>().ln(), 1e-13));
        assert!(terms[1..].iter().all(|&t| t < terms[0]));
        // α₀N = 1 keeps a single term
        let r = avg_likelihood_ratio(&grid(10), 0.1).unwrap();
        assert!(close(r.score, -(2.0 * (10.0f64 / 3.0).ln()).ln(), 1e-14));
        assert!(avg_likelihood_ratio(&grid(3), 1.0).is_err());
    }

    #[test]
    fn gof_examples() {
        let id = |x: f64| x;
        assert_eq!(gof_theoretical(&grid(10), id, IndexWindow::full(10)).unwrap(), 0.0);
        let s = series(&[0.01, 0.2, 0.6, 0.9]);
        let mu2 = gof_empirical(&s, id, IndexWindow { first: 2, last: 3 }).unwrap();
        assert!(close(mu2, 1.5, 1e-12));
        assert_eq!(IndexWindow::restricted(0.75, 4), IndexWindow { first: 2, last: 3 });
        // μ₂ with F0 = identity over the full range equals max |HC_{N,i}|
        let s = series(&[0.01, 0.2, 0.6, 0.95]);
        let mu2 = gof_empirical(&s, id, IndexWindow::full(4)).unwrap();
        let max_abs = hc_components(&s).into_iter().flatten().map(f64::abs).fold(0.0, f64::max);
        assert!(close(mu2, max_abs, 1e-12));
        assert!(gof_empirical(&s, id, IndexWindow { first: 3, last: 2 }).is_err());
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh_fdr_select(&series(&[1.0; 5]), 0.1).unwrap(), 0);
        let s = series(&[0.001, 0.02, 0.5, 0.9]);
        assert_eq!(bh_fdr_select(&s, 0.1).unwrap(), 2);
        let r = bh_ratios(&s);
        assert!(close(r[0], 0.004, 1e-15) && close(r[1], 0.04, 1e-15));
        assert_eq!(bh_fdr_select(&series(&[0.05]), 0.05).unwrap(), 1);
        assert!(bh_fdr_select(&s, 1.0).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(PValueSeries::new(vec![]).is_err());
        assert!(PValueSeries::new(vec![0.5, 1.5]).is_err());
        assert!(PValueSeries::new(vec![f64::NAN]).is_err());
        assert!(PValueSeries::from_sorted(vec![0.5, 0.2]).is_err());
        let s = PValueSeries::new(vec![0.0, 0.7, 0.3]).unwrap();
        assert_eq!(s.values(), &[1e-300, 0.3, 0.7]);
    }

    #[test]
    fn index_bound_is_floor() {
        assert_eq!(index_bound(0.57, 100), 57);
        assert_eq!(index_bound(0.5, 7), 3);
        assert_eq!(index_bound(1.0, 7), 7);
        assert_eq!(index_bound(0.1, 9), 0);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [HcVariant::Star, HcVariant::Plus, HcVariant::Feature, HcVariant::BerkJones, HcVariant::Alr] {
            assert_eq!(v.as_str().parse::<HcVariant>().unwrap(), v);
        }
        assert!("nope".parse::<HcVariant>().is_err());
    }
}
