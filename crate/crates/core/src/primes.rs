//! Prime tables up to a bound or up to the n-th prime.

use crate::{Error, Result};

/// Above this limit [`sieve`] switches to a segmented sieve.
pub const SEGMENT_THRESHOLD: u64 = 10_000_000;

const SEGMENT_LEN: u64 = 1 << 18;

/// All primes `p <= limit`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Inclusive upper bound X of the table.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `#{p <= X}`.
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// Primes up to and including `limit`.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    sieve_with_threshold(limit, SEGMENT_THRESHOLD)
}

/// Like [`sieve`], but segments once `limit` exceeds `threshold`.
pub fn sieve_with_threshold(limit: u64, threshold: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyRange(format!("no primes <= {limit}")));
    }
    let primes = if limit > threshold {
        segmented(limit)
    } else {
        plain(limit)
    };
    Ok(PrimeTable { primes, limit })
}

/// The first `n` primes; the table's limit is the n-th prime itself.
pub fn first_n_primes(n: usize) -> Result<PrimeTable> {
    if n == 0 {
        return Err(Error::EmptyRange("zero primes requested".into()));
    }
    let mut bound = nth_prime_upper_bound(n);
    loop {
        let mut table = sieve(bound)?;
        if table.primes.len() >= n {
            table.primes.truncate(n);
            table.limit = table.primes[n - 1];
            return Ok(table);
        }
        bound *= 2;
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

// Rosser's bound p_n < n (ln n + ln ln n) holds for n >= 6.
fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

fn plain(limit: u64) -> Vec<u64> {
    let len = limit as usize + 1;
    let mut composite = vec![false; len];
    let mut primes = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn segmented(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = plain(root);
    let mut primes: Vec<u64> = base.iter().copied().filter(|&p| p <= limit).collect();
    let mut low = root + 1;
    let mut composite = vec![false; SEGMENT_LEN as usize];
    while low <= limit {
        let high = (low + SEGMENT_LEN - 1).min(limit);
        let span = (high - low + 1) as usize;
        composite[..span].fill(false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let start = (p * p).max(low.div_ceil(p) * p);
            let mut m = start;
            while m <= high {
                composite[(m - low) as usize] = true;
                m += p;
            }
        }
        primes.extend(
            composite[..span]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| low + i as u64),
        );
        low = high + 1;
    }
    primes
}
