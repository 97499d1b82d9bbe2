//! On-disk caches for simulated critical values and eigenvalue null profiles.
//!
//! Both are small CSV files rewritten in full on every update: the new
//! content goes to a sibling temporary file which is then renamed over the
//! old one, so readers never observe a half-written cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hicrit_core::calibrate::{gumbel_critical, simulate_critical, CriticalValueEntry};
use hicrit_core::covtest::{eigen_null_profile, EigenNullProfile};
use hicrit_core::rng::RNG_VERSION;
use hicrit_core::HcVariant;

use crate::{Error, Result};

const CRITICAL_HEADER: [&str; 8] = ["N", "alpha", "variant", "alpha0", "replicates", "seed", "rng_version", "quantile"];
const PROFILE_HEADER: [&str; 8] = ["n", "p", "replicates", "seed", "rng_version", "rank", "mean", "sd"];

/// Default cache directory: `$HICRIT_CACHE` if set, else `.hicrit-cache`.
pub fn default_dir() -> PathBuf {
    std::env::var_os("HICRIT_CACHE").map_or_else(|| PathBuf::from(".hicrit-cache"), PathBuf::from)
}

pub fn default_critical_path() -> PathBuf {
    default_dir().join("critical_values.csv")
}

pub fn default_profile_path() -> PathBuf {
    default_dir().join("eigen_profiles.csv")
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(contents).and_then(|_| file.sync_all()).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn read_records(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?;
    let found = reader.headers().map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::validation(
            path.display().to_string(),
            format!("unexpected cache header, expected {}", header.join(",")),
        ));
    }
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?;
            Ok((r.position().map_or(0, |p| p.line()), r))
        })
        .collect()
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, rec: &csv::StringRecord, k: usize, name: &str) -> Result<T> {
    rec.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| {
        Error::validation(path.display().to_string(), format!("line {line}: bad or missing field '{name}'"))
    })
}

/// Simulated critical values keyed by `(N, α, variant, α₀, replicates, rng_version)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalCache {
    path: PathBuf,
    entries: Vec<CriticalValueEntry>,
}

impl CriticalCache {
    /// Loads the cache; a missing file is an empty cache.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let entries = read_records(&path, &CRITICAL_HEADER)?
            .into_iter()
            .map(|(line, r)| {
                Ok(CriticalValueEntry {
                    n: field(&path, line, &r, 0, "N")?,
                    alpha: field(&path, line, &r, 1, "alpha")?,
                    variant: field(&path, line, &r, 2, "variant")?,
                    alpha0: field(&path, line, &r, 3, "alpha0")?,
                    replicates: field(&path, line, &r, 4, "replicates")?,
                    seed: field(&path, line, &r, 5, "seed")?,
                    rng_version: field(&path, line, &r, 6, "rng_version")?,
                    quantile: field(&path, line, &r, 7, "quantile")?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[CriticalValueEntry] {
        &self.entries
    }

    /// The best-replicated entry matching the request exactly.
    pub fn lookup(
        &self,
        n: usize,
        alpha: f64,
        variant: HcVariant,
        alpha0: f64,
        min_replicates: u64,
    ) -> Option<&CriticalValueEntry> {
        self.entries
            .iter()
            .filter(|e| e.matches(n, alpha, variant, alpha0, min_replicates))
            .max_by_key(|e| e.replicates)
    }

    /// Adds an entry, replacing one with the same key.
    pub fn insert(&mut self, entry: CriticalValueEntry) {
        let same_key = |e: &CriticalValueEntry| {
            e.n == entry.n
                && e.alpha == entry.alpha
                && e.variant == entry.variant
                && e.alpha0 == entry.alpha0
                && e.replicates == entry.replicates
                && e.rng_version == entry.rng_version
        };
        match self.entries.iter_mut().find(|e| same_key(e)) {
            Some(slot) => *slot = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn save(&self) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::validation(self.path.display().to_string(), e.to_string());
        w.write_record(CRITICAL_HEADER).map_err(csv_err)?;
        for e in &self.entries {
            w.write_record([
                e.n.to_string(),
                e.alpha.to_string(),
                e.variant.to_string(),
                e.alpha0.to_string(),
                e.replicates.to_string(),
                e.seed.to_string(),
                e.rng_version.clone(),
                e.quantile.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::validation(self.path.display().to_string(), e.to_string()))?;
        write_atomic(&self.path, &bytes)
    }
}

/// How [`critical_value`] resolves a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CachePolicy {
    /// Only a cache hit is acceptable.
    CacheOnly,
    /// Simulate and store on a miss.
    SimulateIfMissing,
    /// Use the Gumbel approximation on a miss.
    GumbelFallback,
}

/// A critical value request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRequest {
    pub n: usize,
    pub alpha: f64,
    pub variant: HcVariant,
    pub alpha0: f64,
    /// Minimum replicates for a cache hit; also used when simulating.
    pub replicates: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalSource {
    Cache,
    Simulated,
    Gumbel,
}

impl CriticalSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalSource::Cache => "cache",
            CriticalSource::Simulated => "simulated",
            CriticalSource::Gumbel => "gumbel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedCritical {
    pub value: f64,
    pub source: CriticalSource,
}

/// Resolves `h(N, α)` from the cache, by simulation, or by the Gumbel
/// approximation, according to `policy`.
pub fn critical_value(
    cache: &mut CriticalCache,
    req: &CriticalRequest,
    policy: CachePolicy,
) -> Result<ResolvedCritical> {
    if let Some(hit) = cache.lookup(req.n, req.alpha, req.variant, req.alpha0, req.replicates) {
        return Ok(ResolvedCritical { value: hit.quantile, source: CriticalSource::Cache });
    }
    match policy {
        CachePolicy::CacheOnly => Err(Error::CacheMiss(format!(
            "no entry for N={} alpha={} variant={} alpha0={} with >= {} replicates in {}",
            req.n,
            req.alpha,
            req.variant,
            req.alpha0,
            req.replicates,
            cache.path().display()
        ))),
        CachePolicy::SimulateIfMissing => {
            let entry = simulate_critical(req.n, req.alpha, req.variant, req.alpha0, req.replicates, req.seed)?;
            let value = entry.quantile;
            cache.insert(entry);
            cache.save()?;
            Ok(ResolvedCritical { value, source: CriticalSource::Simulated })
        }
        CachePolicy::GumbelFallback => {
            Ok(ResolvedCritical { value: gumbel_critical(req.n, req.alpha)?, source: CriticalSource::Gumbel })
        }
    }
}

/// Eigenvalue null profiles keyed by `(n, p, replicates, rng_version)`.
// n, p, replicates, seed, means, sds while a profile is being read
type PendingProfile = (usize, usize, u64, u64, Vec<f64>, Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCache {
    path: PathBuf,
    profiles: Vec<EigenNullProfile>,
}

impl ProfileCache {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut profiles: Vec<EigenNullProfile> = Vec::new();
        let mut current: Option<PendingProfile> = None;
        let flush = |cur: Option<PendingProfile>, out: &mut Vec<EigenNullProfile>| -> Result<()> {
            if let Some((n, p, reps, seed, means, sds)) = cur {
                out.push(EigenNullProfile::new(n, p, means, sds, reps, seed)?);
            }
            Ok(())
        };
        for (line, r) in read_records(&path, &PROFILE_HEADER)? {
            let n: usize = field(&path, line, &r, 0, "n")?;
            let p: usize = field(&path, line, &r, 1, "p")?;
            let reps: u64 = field(&path, line, &r, 2, "replicates")?;
            let seed: u64 = field(&path, line, &r, 3, "seed")?;
            let version: String = field(&path, line, &r, 4, "rng_version")?;
            let rank: usize = field(&path, line, &r, 5, "rank")?;
            let mean: f64 = field(&path, line, &r, 6, "mean")?;
            let sd: f64 = field(&path, line, &r, 7, "sd")?;
            if version != RNG_VERSION {
                continue;
            }
            if rank == 1 {
                flush(current.take(), &mut profiles)?;
                current = Some((n, p, reps, seed, Vec::new(), Vec::new()));
            }
            match current.as_mut() {
                Some(cur) if cur.0 == n && cur.1 == p && cur.4.len() + 1 == rank => {
                    cur.4.push(mean);
                    cur.5.push(sd);
                }
                _ => {
                    return Err(Error::validation(
                        path.display().to_string(),
                        format!("line {line}: ranks out of order"),
                    ));
                }
            }
        }
        flush(current, &mut profiles)?;
        Ok(Self { path, profiles })
    }

    pub fn lookup(&self, n: usize, p: usize, replicates: u64) -> Option<&EigenNullProfile> {
        self.profiles.iter().find(|e| e.n == n && e.p == p && e.replicates == replicates)
    }

    pub fn insert(&mut self, profile: EigenNullProfile) {
        self.profiles.retain(|e| !(e.n == profile.n && e.p == profile.p && e.replicates == profile.replicates));
        self.profiles.push(profile);
    }

    pub fn save(&self) -> Result<()> {
        let mut out = PROFILE_HEADER.join(",");
        out.push('\n');
        for prof in &self.profiles {
            for (k, (m, s)) in prof.means.iter().zip(&prof.sds).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    prof.n,
                    prof.p,
                    prof.replicates,
                    prof.seed,
                    RNG_VERSION,
                    k + 1,
                    m,
                    s
                ));
            }
        }
        write_atomic(&self.path, out.as_bytes())
    }

    /// Cached profile, or a fresh simulation that is stored before returning.
    pub fn get_or_simulate(
        &mut self,
        n: usize,
        p: usize,
        replicates: u64,
        seed: u64,
    ) -> Result<(EigenNullProfile, bool)> {
        if let Some(hit) = self.lookup(n, p, replicates) {
            return Ok((hit.clone(), true));
        }
        let profile = eigen_null_profile(n, p, replicates, seed)?;
        self.insert(profile.clone());
        self.save()?;
        Ok((profile, false))
    }
}
