//! On-disk coefficient cache: one file per `(series, modulus)`, keeping the
//! longest expansion seen so far.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use frobcong::frobenius::SeriesSpec;
use frobcong::QSeries;
use sha2::{Digest, Sha256};

/// Coefficients recomputed on every load to catch stale files.
const SPOT_CHECK_TERMS: i64 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub spec: String,
    pub trunc: i64,
    pub modulus: Option<u64>,
    pub path: PathBuf,
    pub hash: String,
}

pub struct Cache {
    dir: PathBuf,
}

fn expand(spec: SeriesSpec, modulus: Option<u64>, trunc: i64) -> Result<QSeries> {
    let series = spec.expand(trunc)?;
    Ok(match modulus {
        Some(m) => series.reduce_mod_u64(m)?,
        None => series,
    })
}

fn digest(series: &QSeries) -> String {
    let mut hasher = Sha256::new();
    hasher.update(series.header_line().as_bytes());
    hasher.update(b"\n");
    hasher.update(series.body_text().as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: SeriesSpec, modulus: Option<u64>) -> PathBuf {
        let name = spec.to_string().replace(':', "-");
        let modulus = modulus.map_or_else(|| "none".to_string(), |m| m.to_string());
        self.dir.join(format!("{name}.mod-{modulus}.qseries"))
    }

    /// Reads and validates the cached file. `Ok(None)` when there is none.
    pub fn read(&self, spec: SeriesSpec, modulus: Option<u64>) -> Result<Option<(CacheEntry, QSeries)>> {
        let path = self.path_for(spec, modulus);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        let series = QSeries::from_text(&text).with_context(|| format!("parsing {}", path.display()))?;
        let meta = text
            .lines()
            .nth(1)
            .and_then(|l| l.strip_prefix("#spec="))
            .with_context(|| format!("{} has no #spec line", path.display()))?;
        let (stored_spec, stored_hash) = meta
            .split_once(" sha256=")
            .with_context(|| format!("{} has no hash", path.display()))?;
        if stored_spec != spec.to_string() {
            bail!("{} holds {stored_spec}, not {spec}", path.display());
        }
        let hash = digest(&series);
        if hash != stored_hash {
            bail!("{} fails its hash check", path.display());
        }
        if series.offset() != spec.offset() || series.modulus().map(ToString::to_string) != modulus.map(|m| m.to_string()) {
            bail!("{} has the wrong offset or modulus", path.display());
        }
        let check_trunc = (series.offset() + SPOT_CHECK_TERMS).min(series.trunc());
        let fresh = expand(spec, modulus, check_trunc)?;
        if let Some(n) = fresh.first_mismatch(&series) {
            bail!("{} disagrees with a fresh expansion at q^{n}", path.display());
        }
        let entry = CacheEntry {
            spec: spec.to_string(),
            trunc: series.trunc(),
            modulus,
            path,
            hash,
        };
        Ok(Some((entry, series)))
    }

    /// Writes through a temporary file in the cache directory, then renames.
    pub fn write(&self, spec: SeriesSpec, modulus: Option<u64>, series: &QSeries) -> Result<CacheEntry> {
        let path = self.path_for(spec, modulus);
        let hash = digest(series);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        write!(
            tmp,
            "{}\n#spec={spec} sha256={hash}\n{}",
            series.header_line(),
            series.body_text()
        )?;
        tmp.flush()?;
        tmp.persist(&path)
            .with_context(|| format!("replacing {}", path.display()))?;
        Ok(CacheEntry {
            spec: spec.to_string(),
            trunc: series.trunc(),
            modulus,
            path,
            hash,
        })
    }

    /// Returns the series through `q^(trunc-1)`, from disk when the cached
    /// window is long enough. Unreadable files are replaced and reported
    /// through `warn`.
    pub fn get(
        &self,
        spec: SeriesSpec,
        modulus: Option<u64>,
        trunc: i64,
        warn: &mut dyn FnMut(String),
    ) -> Result<QSeries> {
        let existing = match self.read(spec, modulus) {
            Ok(found) => found,
            Err(e) => {
                warn(format!("warning: discarding cache entry: {e:#}"));
                None
            }
        };
        if let Some((entry, series)) = &existing {
            if entry.trunc >= trunc {
                return Ok(series.truncate(trunc));
            }
        }
        let series = expand(spec, modulus, trunc)?;
        if let Err(e) = self.write(spec, modulus, &series) {
            warn(format!("warning: could not write cache entry: {e:#}"));
        }
        Ok(series)
    }
}
