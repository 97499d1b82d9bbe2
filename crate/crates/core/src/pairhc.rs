//! Rank-based HC for a few correlated pairs among many independent pairs.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::hc::{HcResult, HcVariant};

/// Rank vectors of paired observations; each is a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPairs {
    ranks_x: Vec<usize>,
    ranks_y: Vec<usize>,
}

/// 1-based ranks; ties are ordered by original position.
pub fn ranks(values: &[f64]) -> Result<Vec<usize>> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(invalid!("value {} is not finite", k + 1));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = alloc::vec![0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank + 1;
    }
    Ok(out)
}

fn is_permutation(r: &[usize]) -> bool {
    let mut seen = alloc::vec![false; r.len()];
    r.iter().all(|&v| v >= 1 && v <= r.len() && !core::mem::replace(&mut seen[v - 1], true))
}

impl RankedPairs {
    pub fn from_ranks(ranks_x: Vec<usize>, ranks_y: Vec<usize>) -> Result<Self> {
        if ranks_x.len() != ranks_y.len() {
            return Err(invalid!("rank vectors differ in length"));
        }
        if !is_permutation(&ranks_x) || !is_permutation(&ranks_y) {
            return Err(invalid!("ranks must be permutations of 1..=n"));
        }
        Ok(Self { ranks_x, ranks_y })
    }

    pub fn from_values(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(invalid!("x has {} values, y has {}", x.len(), y.len()));
        }
        Ok(Self { ranks_x: ranks(x)?, ranks_y: ranks(y)? })
    }

    pub fn len(&self) -> usize {
        self.ranks_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks_x.is_empty()
    }

    pub fn ranks_x(&self) -> &[usize] {
        &self.ranks_x
    }

    pub fn ranks_y(&self) -> &[usize] {
        &self.ranks_y
    }
}

/// `S_k = #{i : min(r_i, s_i) ≥ k}` for `k = 1..=n` (index `k−1`).
pub fn corner_counts(pairs: &RankedPairs) -> Vec<usize> {
    let n = pairs.len();
    let mut hist = alloc::vec![0usize; n + 2];
    for (&r, &s) in pairs.ranks_x.iter().zip(&pairs.ranks_y) {
        hist[r.min(s)] += 1;
    }
    let mut out = alloc::vec![0; n];
    let mut acc = 0;
    for k in (1..=n).rev() {
        acc += hist[k];
        out[k - 1] = acc;
    }
    out
}

/// `pairHC_{n,k}` for `k = 1..=n`. `S_1 = n` for every input, so the `k = 1`
/// term carries no information and is reported as `None`; the `k = n` term is
/// 0/0 and defined as 0.
pub fn pair_hc_components(pairs: &RankedPairs) -> Result<Vec<Option<f64>>> {
    let n = pairs.len();
    if n < 2 {
        return Err(invalid!("pairHC needs n >= 2"));
    }
    let nf = n as f64;
    let root_n = libm::sqrt(nf);
    Ok(corner_counts(pairs)
        .iter()
        .enumerate()
        .map(|(idx, &s)| {
            let k = idx + 1;
            if k == 1 {
                return None;
            }
            if k == n {
                return Some(0.0);
            }
            let q = (1.0 - k as f64 / nf) * (1.0 - k as f64 / nf);
            let var = q * (1.0 - q);
            (var > 0.0).then(|| root_n * (s as f64 / nf - q) / libm::sqrt(var))
        })
        .collect())
}

/// `pairHC*_n`: maximum over `⌈(1−α₀)n⌉ ≤ k ≤ n−1`.
pub fn pair_hc_star(pairs: &RankedPairs, alpha0: f64) -> Result<HcResult> {
    let n = pairs.len();
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return Err(invalid!("alpha0 must lie in (0, 1]"));
    }
    let comps = pair_hc_components(pairs)?;
    let raw = (1.0 - alpha0) * n as f64;
    let first = (libm::ceil(raw - 1e-9 * raw.max(1.0)) as usize).max(2);
    let last = n - 1;
    if first > last {
        return Err(invalid!("empty range k in [{first}, {last}] for n = {n}, alpha0 = {alpha0}"));
    }
    let mut best: Option<(usize, f64)> = None;
    let mut excluded = 0;
    for k in first..=last {
        match comps[k - 1] {
            Some(v) if best.map_or(true, |(_, b)| v > b) => best = Some((k, v)),
            Some(_) => {}
            None => excluded += 1,
        }
    }
    let (argmax_index, score) = match best {
        Some((k, v)) => (Some(k), v),
        None => (None, f64::NEG_INFINITY),
    };
    Ok(HcResult { score, argmax_index, variant: HcVariant::Star, alpha0, excluded })
}

/// Which corner of the rank square to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    UpperRight,
    UpperLeft,
    LowerRight,
    LowerLeft,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::UpperRight, Corner::UpperLeft, Corner::LowerRight, Corner::LowerLeft];

    /// Signs applied to `(x, y)` so the corner becomes the upper-right one.
    pub fn signs(self) -> (f64, f64) {
        match self {
            Corner::UpperRight => (1.0, 1.0),
            Corner::UpperLeft => (-1.0, 1.0),
            Corner::LowerRight => (1.0, -1.0),
            Corner::LowerLeft => (-1.0, -1.0),
        }
    }
}

/// Ranks for the requested corner.
pub fn ranked_corner(x: &[f64], y: &[f64], corner: Corner) -> Result<RankedPairs> {
    let (sx, sy) = corner.signs();
    let xs: Vec<f64> = x.iter().map(|v| sx * v).collect();
    let ys: Vec<f64> = y.iter().map(|v| sy * v).collect();
    RankedPairs::from_values(&xs, &ys)
}

/// `(1 − ε)N(0, I₂) + εN(τ·1₂, Σ)` with unit variances and correlation `ρ`.
pub fn sample_bivariate_mixture<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    tau: f64,
    rho: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid!("epsilon must lie in [0, 1]"));
    }
    if !(rho.abs() < 1.0) {
        return Err(invalid!("|rho| must be below 1"));
    }
    let cross = libm::sqrt(1.0 - rho * rho);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let contaminated = epsilon > 0.0 && rng.random::<f64>() < epsilon;
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        if contaminated {
            x.push(tau + a);
            y.push(tau + rho * a + cross * b);
        } else {
            x.push(a);
            y.push(b);
        }
    }
    Ok((x, y))
}

/// A named `(ε, τ, ρ)` setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSetting {
    pub epsilon: f64,
    pub tau: f64,
    pub rho: f64,
}

/// The five simulation settings: the null and four sparse alternatives.
pub const PRESET_SETTINGS: [PairSetting; 5] = [
    PairSetting { epsilon: 0.0, tau: 0.0, rho: 0.0 },
    PairSetting { epsilon: 0.02, tau: 2.5, rho: 0.0 },
    PairSetting { epsilon: 0.02, tau: 2.0, rho: 0.5 },
    PairSetting { epsilon: 0.01, tau: 2.5, rho: 0.5 },
    PairSetting { epsilon: 0.01, tau: 3.0, rho: 0.25 },
];
