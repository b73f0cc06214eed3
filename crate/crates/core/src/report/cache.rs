//! On-disk coefficient cache.
//!
//! A file is a text header followed by binary records:
//!
//! ```text
//! sato-tate-coefficients
//! format_version=1
//! label=a
//! n_max=17389
//! weight=2
//! bad_primes=11
//! factors=1^2,11^2
//!
//! <u64 LE count> then per a_n: <u32 LE byte length><two's-complement LE bytes>
//! ```
//!
//! The header ends at the first empty line. Files are keyed by
//! `(label, n_max)`; a header whose factors, weight or bad primes disagree with
//! the requested spec counts as a miss.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;

use crate::eta::{eta_product, CoefficientTable, EtaProductSpec};
use crate::{Error, Result};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "SATO_TATE_CACHE";
pub const CACHE_VERSION: u32 = 1;

const MAGIC: &str = "sato-tate-coefficients";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheHeader {
    pub version: u32,
    pub label: String,
    pub n_max: u64,
    pub weight: u32,
    pub bad_primes: Vec<u64>,
    pub factors: String,
}

impl CacheHeader {
    fn matches(&self, spec: &EtaProductSpec, n_max: u64) -> bool {
        self.version == CACHE_VERSION
            && self.n_max == n_max
            && self.weight == spec.weight()
            && self.bad_primes == spec.bad_primes()
            && self.factors == spec.factors_string()
    }
}

pub fn encode_table(spec: &EtaProductSpec, table: &CoefficientTable) -> Vec<u8> {
    let bad: Vec<String> = table.bad_primes().iter().map(u64::to_string).collect();
    let label: String = table
        .label()
        .chars()
        .map(|c| if c.is_control() { ' ' } else { c })
        .collect();
    let mut out = format!(
        "{MAGIC}\nformat_version={CACHE_VERSION}\nlabel={label}\nn_max={}\nweight={}\nbad_primes={}\nfactors={}\n\n",
        table.n_max(),
        table.weight(),
        bad.join(","),
        spec.factors_string(),
    )
    .into_bytes();
    out.extend_from_slice(&table.n_max().to_le_bytes());
    for n in 1..=table.n_max() {
        let bytes = table.get(n).to_signed_bytes_le();
        out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    out
}

pub fn decode_table(bytes: &[u8]) -> Result<(CacheHeader, CoefficientTable)> {
    let corrupt = |what: &str| Error::Cache(format!("corrupt cache file: {what}"));
    let split = bytes
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| corrupt("no header terminator"))?;
    let text = std::str::from_utf8(&bytes[..split]).map_err(|_| corrupt("header is not UTF-8"))?;
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("bad magic"));
    }
    let mut fields = std::collections::HashMap::new();
    for line in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| corrupt("malformed header line"))?;
        fields.insert(k, v);
    }
    let field = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| corrupt(&format!("missing `{k}`")))
    };
    let number = |k: &str| -> Result<u64> {
        field(k)?
            .parse()
            .map_err(|_| corrupt(&format!("bad `{k}`")))
    };
    let bad_primes = field("bad_primes")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| corrupt("bad `bad_primes`")))
        .collect::<Result<Vec<u64>>>()?;
    let header = CacheHeader {
        version: number("format_version")? as u32,
        label: field("label")?.to_string(),
        n_max: number("n_max")?,
        weight: number("weight")? as u32,
        bad_primes,
        factors: field("factors")?.to_string(),
    };
    if header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "unsupported format version {}",
            header.version
        )));
    }

    let mut body = &bytes[split + 2..];
    let mut take = |n: usize| -> Result<&[u8]> {
        if body.len() < n {
            return Err(corrupt("truncated body"));
        }
        let (head, rest) = body.split_at(n);
        body = rest;
        Ok(head)
    };
    let count = u64::from_le_bytes(take(8)?.try_into().unwrap());
    if count != header.n_max {
        return Err(corrupt("count does not match n_max"));
    }
    let mut values = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        values.push(BigInt::from_signed_bytes_le(take(len)?));
    }
    if !body.is_empty() {
        return Err(corrupt("trailing bytes"));
    }
    let table = CoefficientTable::from_values(
        header.label.clone(),
        header.weight,
        header.bad_primes.clone(),
        values,
    );
    Ok((header, table))
}

#[derive(Debug, Clone)]
pub struct CoefficientCache {
    dir: PathBuf,
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CoefficientCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, label: &str, n_max: u64) -> PathBuf {
        let safe: String = label
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        self.dir.join(format!("{safe}_{n_max}.coef"))
    }

    /// The cached table, or `None` when absent or keyed to a different spec.
    pub fn load(&self, spec: &EtaProductSpec, n_max: u64) -> Result<Option<CoefficientTable>> {
        let path = self.path_for(spec.label(), n_max);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let (header, table) = decode_table(&bytes)?;
        Ok(header.matches(spec, n_max).then_some(table))
    }

    pub fn store(&self, spec: &EtaProductSpec, table: &CoefficientTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(spec.label(), table.n_max());
        let tmp = path.with_extension("coef.tmp");
        fs::write(&tmp, encode_table(spec, table))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load_or_compute(
        &self,
        spec: &EtaProductSpec,
        n_max: u64,
    ) -> Result<(CoefficientTable, CacheStatus)> {
        if let Some(table) = self.load(spec, n_max)? {
            return Ok((table, CacheStatus::Hit));
        }
        let table = eta_product(spec, n_max)?;
        self.store(spec, &table)?;
        Ok((table, CacheStatus::Computed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn round_trip() {
        let spec = presets::eta_c();
        let table = eta_product(&spec, 300).unwrap();
        let bytes = encode_table(&spec, &table);
        assert!(
            bytes.starts_with(b"sato-tate-coefficients\nformat_version=1\nlabel=c\nn_max=300\n")
        );
        let (header, back) = decode_table(&bytes).unwrap();
        assert_eq!(back, table);
        assert_eq!(header.factors, "1^24");
        assert!(header.matches(&spec, 300));
        assert!(!header.matches(&spec, 301));
    }

    #[test]
    fn little_endian_records() {
        let spec = presets::eta_a();
        let table = eta_product(&spec, 2).unwrap();
        let bytes = encode_table(&spec, &table);
        let body = &bytes[bytes.windows(2).position(|w| w == b"\n\n").unwrap() + 2..];
        // count 2, then a_1 = 1 as [1], a_2 = -2 as [0xfe]
        assert_eq!(
            body,
            &[2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0xfe]
        );
    }

    #[test]
    fn corrupt_files_rejected() {
        let spec = presets::eta_a();
        let bytes = encode_table(&spec, &eta_product(&spec, 20).unwrap());
        assert!(decode_table(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_table(b"nonsense").is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_table(&extra).is_err());
    }

    #[test]
    fn load_or_compute_hits_second_time() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let spec = presets::eta_b();
        let (t1, s1) = cache.load_or_compute(&spec, 100).unwrap();
        let (t2, s2) = cache.load_or_compute(&spec, 100).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Computed, CacheStatus::Hit));
        assert_eq!(t1, t2);
        // same label, different factors -> miss
        let other =
            EtaProductSpec::new("b", presets::eta_a().factors().to_vec(), vec![11]).unwrap();
        assert_eq!(
            cache.load_or_compute(&other, 100).unwrap().1,
            CacheStatus::Computed
        );
    }
}
