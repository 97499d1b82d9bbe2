//! HC tests on covariance structure: clique detection from pairwise and
//! row-maximum correlations, and eigenHC for low-rank spikes.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::exec::map_replicates;
use crate::hc::{self, HcResult, PValueSeries};
use crate::numerics::{clamp_pvalue, student_t_cdf, student_t_sf, PVALUE_FLOOR};
use crate::rng::{tags, RngSeed};

/// Pairwise and row-maximum correlations of the columns of a data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSummary {
    /// `ρ_ij` for `i < j`, row-major over the upper triangle.
    pub pairwise: Vec<f64>,
    /// `ρ*_i = max_{j≠i} ρ_ij`.
    pub rowmax: Vec<f64>,
    pub n: usize,
    pub p: usize,
}

/// Correlations of the mean-centred columns of `x` (`n × p`).
pub fn correlation_summary(x: &DMatrix<f64>) -> Result<CorrelationSummary> {
    let (n, p) = x.shape();
    if n < 3 || p < 2 {
        return Err(invalid!("need n >= 3 samples and p >= 2 variables, got {n} x {p}"));
    }
    let mut centred = x.clone();
    for (j, mut col) in centred.column_iter_mut().enumerate() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid!("column {} is constant or non-finite", j + 1));
        }
        col.unscale_mut(norm);
    }
    let gram = centred.tr_mul(&centred);
    let mut pairwise = Vec::with_capacity(p * (p - 1) / 2);
    let mut rowmax = alloc::vec![f64::NEG_INFINITY; p];
    for i in 0..p {
        for j in (i + 1)..p {
            let r = gram[(i, j)].clamp(-1.0, 1.0);
            pairwise.push(r);
            rowmax[i] = rowmax[i].max(r);
            rowmax[j] = rowmax[j].max(r);
        }
    }
    Ok(CorrelationSummary { pairwise, rowmax, n, p })
}

/// Which tail of the correlation distribution counts as evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    TwoSided,
}

fn t_statistic(rho: f64, n: usize) -> f64 {
    libm::sqrt((n - 1) as f64) * rho / libm::sqrt(1.0 - rho * rho)
}

fn check_rho(rho: f64, n: usize) -> Result<()> {
    if n < 3 {
        return Err(invalid!("need n >= 3 samples, got {n}"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(invalid!("correlation {rho} outside [-1, 1]"));
    }
    Ok(())
}

/// `P(ρ_ij ≥ ρ) = P(t_{n−1} ≥ √(n−1)·ρ/√(1−ρ²))` for `n` zero-mean samples,
/// or the two-sided version `2·min(p, 1−p)`. `|ρ| = 1` is clamped.
pub fn pairwise_pvalue(rho: f64, n: usize, tail: Tail) -> Result<f64> {
    check_rho(rho, n)?;
    let df = (n - 1) as u64;
    let upper = if rho >= 1.0 {
        PVALUE_FLOOR
    } else if rho <= -1.0 {
        1.0
    } else {
        student_t_sf(t_statistic(rho, n), df)?
    };
    Ok(match tail {
        Tail::Upper => clamp_pvalue(upper),
        Tail::TwoSided => {
            let lower = if rho.abs() >= 1.0 { 1.0 - upper } else { student_t_cdf(t_statistic(rho, n), df)? };
            clamp_pvalue(2.0 * upper.min(lower))
        }
    })
}

/// `F_{p,n}(ρ*) = [P(t_{n−1} ≤ √(n−1)ρ*/√(1−ρ*²))]^{p−1}`.
pub fn rowmax_cdf(rho_star: f64, n: usize, p: usize) -> Result<f64> {
    check_rho(rho_star, n)?;
    if p < 2 {
        return Err(invalid!("row maximum needs p >= 2"));
    }
    if rho_star >= 1.0 {
        return Ok(1.0);
    }
    if rho_star <= -1.0 {
        return Ok(0.0);
    }
    let base = student_t_cdf(t_statistic(rho_star, n), (n - 1) as u64)?;
    Ok(libm::pow(base, (p - 1) as f64))
}

/// Upper-tail P-value `1 − F_{p,n}(ρ*)` for HC ingestion.
pub fn rowmax_pvalue(rho_star: f64, n: usize, p: usize) -> Result<f64> {
    check_rho(rho_star, n)?;
    if p < 2 {
        return Err(invalid!("row maximum needs p >= 2"));
    }
    if rho_star >= 1.0 {
        return Ok(PVALUE_FLOOR);
    }
    if rho_star <= -1.0 {
        return Ok(1.0);
    }
    let sf = student_t_sf(t_statistic(rho_star, n), (n - 1) as u64)?;
    // 1 − (1 − sf)^(p−1) without cancellation
    Ok(clamp_pvalue(-libm::expm1((p - 1) as f64 * libm::log1p(-sf))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueMode {
    Pairwise,
    RowMax,
}

/// The P-values a clique test feeds to HC, unsorted.
///
/// Centring consumes one degree of freedom, so the null laws are evaluated
/// with `n − 1` effective samples.
pub fn clique_pvalues(x: &DMatrix<f64>, mode: CliqueMode, tail: Tail) -> Result<Vec<f64>> {
    let summary = correlation_summary(x)?;
    let n_eff = summary.n - 1;
    match mode {
        CliqueMode::Pairwise => summary.pairwise.iter().map(|&r| pairwise_pvalue(r, n_eff, tail)).collect(),
        CliqueMode::RowMax => summary.rowmax.iter().map(|&r| rowmax_pvalue(r, n_eff, summary.p)).collect(),
    }
}

/// `OHC⁺` over the band `1/N ≤ π_(i) ≤ 1/2` of the clique P-values.
pub fn clique_test(x: &DMatrix<f64>, mode: CliqueMode, tail: Tail) -> Result<HcResult> {
    let series = PValueSeries::new(clique_pvalues(x, mode, tail)?)?;
    Ok(hc::hc_orthodox_plus(&series))
}

/// Identity except for a `k × k` leading block with off-diagonal `a`.
pub fn make_clique_sigma(p: usize, k: usize, a: f64) -> Result<DMatrix<f64>> {
    if k < 1 || k > p {
        return Err(invalid!("clique size k = {k} must satisfy 1 <= k <= p = {p}"));
    }
    if k >= 2 && !(a < 1.0 && 1.0 + (k - 1) as f64 * a > 0.0) {
        return Err(invalid!("a = {a} makes the clique block indefinite for k = {k}"));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else if i < k && j < k {
            a
        } else {
            0.0
        }
    }))
}

fn standard_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `n` rows drawn from `N(0, Σ)`.
pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, sigma: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let p = sigma.nrows();
    if sigma.ncols() != p {
        return Err(invalid!("covariance must be square"));
    }
    let chol = sigma.clone().cholesky().ok_or_else(|| invalid!("covariance is not positive definite"))?;
    let z = standard_normal_matrix(n, p, rng);
    Ok(z * chol.l().transpose())
}

/// Sorted (descending) nonzero eigenvalues of `S_n = X'X/n`.
pub fn sample_eigenvalues(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, p) = x.shape();
    // X'X and XX' share their nonzero spectrum; use the smaller Gram matrix
    let gram = if p <= n { x.tr_mul(x) } else { x * x.transpose() };
    let mut eig: Vec<f64> = (gram / n as f64).symmetric_eigenvalues().iter().copied().collect();
    eig.sort_unstable_by(|a, b| b.total_cmp(a));
    eig
}

/// Null means and standard deviations of the sorted eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenNullProfile {
    pub n: usize,
    pub p: usize,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub replicates: u64,
    pub seed: u64,
}

impl EigenNullProfile {
    pub fn new(n: usize, p: usize, means: Vec<f64>, sds: Vec<f64>, replicates: u64, seed: u64) -> Result<Self> {
        let m = n.min(p);
        if means.len() != m || sds.len() != m {
            return Err(invalid!("profile for {n} x {p} needs {m} ranks"));
        }
        if let Some(k) = sds.iter().position(|&s| !(s > 0.0)) {
            return Err(invalid!("profile sd at rank {} is not positive", k + 1));
        }
        Ok(Self { n, p, means, sds, replicates, seed })
    }
}

/// One null eigenvalue draw for `n × p` standard normal data.
pub fn null_eigenvalues(n: usize, p: usize, seed: RngSeed) -> Vec<f64> {
    sample_eigenvalues(&standard_normal_matrix(n, p, &mut seed.rng()))
}

/// Monte Carlo estimate of `E₀[λ_i]` and `SD₀(λ_i)`.
pub fn eigen_null_profile(n: usize, p: usize, replicates: u64, seed: u64) -> Result<EigenNullProfile> {
    if replicates < 100 {
        return Err(invalid!("need at least 100 replicates, got {replicates}"));
    }
    if n < 2 || p < 2 {
        return Err(invalid!("need n, p >= 2"));
    }
    let base = RngSeed::new(seed);
    let draws = map_replicates(replicates, |r| null_eigenvalues(n, p, base.substream(tags::PROFILE, r)));
    let m = n.min(p);
    let b = replicates as f64;
    let mut means = alloc::vec![0.0; m];
    for d in &draws {
        for (acc, v) in means.iter_mut().zip(d) {
            *acc += v;
        }
    }
    means.iter_mut().for_each(|v| *v /= b);
    let mut sds = alloc::vec![0.0; m];
    for d in &draws {
        for ((acc, v), mu) in sds.iter_mut().zip(d).zip(&means) {
            *acc += (v - mu) * (v - mu);
        }
    }
    sds.iter_mut().for_each(|v| *v = libm::sqrt(*v / (b - 1.0)));
    EigenNullProfile::new(n, p, means, sds, replicates, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenHcOutcome {
    /// `eigenHC_{n,i}` for every rank.
    pub components: Vec<f64>,
    pub score: f64,
    /// 1-based rank attaining the maximum.
    pub argmax_index: usize,
}

/// Standardized eigenvalue excesses and their maximum over `1 ≤ i ≤ ⌊α₀·min(n,p)⌋`.
pub fn eigen_hc_from_eigenvalues(eig: &[f64], profile: &EigenNullProfile, alpha0: f64) -> Result<EigenHcOutcome> {
    if eig.len() != profile.means.len() {
        return Err(invalid!("{} eigenvalues but the profile has {} ranks", eig.len(), profile.means.len()));
    }
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return Err(invalid!("alpha0 must lie in (0, 1]"));
    }
    let bound = hc::index_bound(alpha0, eig.len());
    if bound < 1 {
        return Err(invalid!("empty rank range for alpha0 = {alpha0}"));
    }
    let components: Vec<f64> =
        eig.iter().zip(profile.means.iter().zip(&profile.sds)).map(|(l, (mu, sd))| (l - mu) / sd).collect();
    let mut best = (1, components[0]);
    for (k, &c) in components[..bound].iter().enumerate().skip(1) {
        if c > best.1 {
            best = (k + 1, c);
        }
    }
    Ok(EigenHcOutcome { components, score: best.1, argmax_index: best.0 })
}

/// eigenHC test of `x` against a null profile of matching dimensions.
pub fn eigen_hc_test(x: &DMatrix<f64>, profile: &EigenNullProfile, alpha0: f64) -> Result<EigenHcOutcome> {
    let (n, p) = x.shape();
    if (n, p) != (profile.n, profile.p) {
        return Err(invalid!("data is {n} x {p} but the profile was built for {} x {}", profile.n, profile.p));
    }
    eigen_hc_from_eigenvalues(&sample_eigenvalues(x), profile, alpha0)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`).
pub fn haar_orthogonal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = standard_normal_matrix(p, p, rng).qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r_diag[j] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// `Σ = QΛQ'` with `Λ = diag(1+h (×rank), 1 (×(p−rank)))` and Haar `Q`.
pub fn make_spiked_sigma<R: Rng + ?Sized>(p: usize, rank: usize, h: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    if rank >= p {
        return Err(invalid!("spike rank {rank} must be below p = {p}"));
    }
    if !(h > -1.0) {
        return Err(invalid!("spike size h = {h} must exceed -1"));
    }
    let q = haar_orthogonal(p, rng);
    let lambda = DVector::from_fn(p, |i, _| if i < rank { 1.0 + h } else { 1.0 });
    let mut sigma = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    // symmetrize away rounding
    let t = sigma.transpose();
    sigma = (sigma + t) * 0.5;
    Ok(sigma)
}
