//! Prime tables from a sieve of Eratosthenes.

use once_cell::sync::Lazy;

/// Bound for the shared sieve; also the trial-division limit used by `factor`.
pub const SIEVE_LIMIT: u32 = 1_000_000;

static SMALL_PRIMES: Lazy<Vec<u32>> = Lazy::new(|| primes_up_to(SIEVE_LIMIT));

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u32) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes up to [`SIEVE_LIMIT`], computed once.
pub fn small_primes() -> &'static [u32] {
    &SMALL_PRIMES
}

/// The first `k` primes. The shared table covers 78498 primes; larger
/// requests sieve a fresh range sized by Rosser's upper bound.
pub fn nth_primes(k: usize) -> Vec<u64> {
    let table = small_primes();
    if k <= table.len() {
        return table[..k].iter().map(|&p| p as u64).collect();
    }
    let kf = k as f64;
    let bound = (kf * (kf.ln() + kf.ln().ln())).ceil() as u32 + 10;
    primes_up_to(bound)[..k].iter().map(|&p| p as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(nth_primes(1), vec![2]);
        assert_eq!(nth_primes(5), vec![2, 3, 5, 7, 11]);
        assert!(nth_primes(0).is_empty());
    }

    #[test]
    fn worst_case_window_endpoints() {
        let ps = nth_primes(472);
        assert_eq!(ps[31], 131);
        assert_eq!(ps[471], 3347);
    }

    #[test]
    fn prime_counting_checkpoints() {
        assert_eq!(small_primes().len(), 78_498);
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(*small_primes().last().unwrap(), 999_983);
    }

    #[test]
    fn beyond_shared_table() {
        let ps = nth_primes(100_000);
        assert_eq!(ps[99_999], 1_299_709);
    }
}
