//! Integer factorization: trial division, Miller–Rabin, Pollard rho (Brent).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::montgomery::Mont;
use super::primes::small_primes;
use super::{ArithError, FactoredInteger};

/// Witness bases; the first twelve make Miller–Rabin deterministic below 3.3·10^24.
const MR_BASES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];
const MR_DETERMINISTIC: usize = 12;

/// Effort limits for [`Factorizer`].
#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Trial division by every prime up to this bound (capped at the shared sieve).
    pub trial_limit: u32,
    /// Total Pollard-rho iterations allowed per input before giving up.
    pub rho_budget: u64,
    /// Miller–Rabin bases used above 2^64 in addition to the deterministic twelve.
    pub extra_mr_rounds: usize,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_limit: 1_000_000,
            rho_budget: 1 << 32,
            extra_mr_rounds: 8,
        }
    }
}

/// Probable-prime test (deterministic below 2^64; below 3.3·10^24 the
/// default twelve bases are also known to be exact).
pub fn is_prime(n: &BigUint) -> bool {
    is_prime_with(n, FactorConfig::default().extra_mr_rounds)
}

pub(crate) fn is_prime_with(n: &BigUint, extra_rounds: usize) -> bool {
    let rounds = (MR_DETERMINISTIC + extra_rounds).min(MR_BASES.len());
    if let Some(small) = n.to_u128() {
        if small < 2 {
            return false;
        }
        for &p in &MR_BASES {
            if small == p as u128 {
                return true;
            }
            if small % p as u128 == 0 {
                return false;
            }
        }
        if small < (1u128 << 127) {
            let bases = if small < (1u128 << 64) { MR_DETERMINISTIC } else { rounds };
            return miller_rabin_u128(small, &MR_BASES[..bases]);
        }
    }
    miller_rabin_big(n, &MR_BASES[..rounds])
}

fn miller_rabin_u128(n: u128, bases: &[u64]) -> bool {
    let mont = Mont::new(n);
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    'witness: for &a in bases {
        let mut x = mont.pow(mont.to_mont(a as u128), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint, bases: &[u64]) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in bases {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle search on `x -> x^2 + c`; returns a nontrivial divisor or `None`
/// when the walk collapses to `n` itself. `spent` accumulates iterations.
fn brent_u128(n: u128, c: u128, budget: u64, spent: &mut u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let mont = Mont::new(n);
    let c = mont.to_mont(c);
    let f = |y: u128| mont.add(mont.mul(y, y), c);
    let mut y = mont.to_mont(2);
    let mut x = y;
    let mut ys = y;
    let mut acc = mont.one();
    let mut g: u128 = 1;
    let mut r: u64 = 1;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                acc = mont.mul(acc, mont.sub(x, y));
            }
            g = acc.gcd(&n);
            k += steps;
        }
        *spent += r;
        if *spent > budget {
            return None;
        }
        r *= 2;
    }
    if g == n {
        // Backtrack one step at a time from the last checkpoint.
        g = 1;
        while g == 1 {
            ys = f(ys);
            g = mont.sub(x, ys).gcd(&n);
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn brent_big(n: &BigUint, c: u64, budget: u64, spent: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 64;
    let c = BigUint::from(c);
    let f = |y: &BigUint| (y * y + &c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { b - a };
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut ys = y.clone();
    let mut acc = one.clone();
    let mut g = one.clone();
    let mut r: u64 = 1;
    let mut x = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                acc = (acc * absdiff(&x, &y)) % n;
            }
            g = acc.gcd(n);
            k += steps;
        }
        *spent += r;
        if *spent > budget {
            return None;
        }
        r *= 2;
    }
    if &g == n {
        g = one.clone();
        while g == one {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

/// Returns the unfactored cofactor and the largest prime tried.
fn trial_divide_u128(mut rest: u128, limit: u32, counts: &mut BTreeMap<BigUint, u32>) -> (u128, u64) {
    let mut largest = 1u64;
    for &p in small_primes().iter().take_while(|&&p| p <= limit) {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        largest = p as u64;
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            counts.insert(BigUint::from(p), e);
        }
    }
    (rest, largest)
}

fn trial_divide_big(n: &BigUint, limit: u32, counts: &mut BTreeMap<BigUint, u32>) -> (BigUint, u64) {
    let mut rest = n.clone();
    let mut largest = 1u64;
    for &p in small_primes().iter().take_while(|&&p| p <= limit) {
        if let Some(small) = rest.to_u128() {
            // Primes already removed no longer divide `small`.
            let (r, l) = trial_divide_u128(small, limit, counts);
            return (BigUint::from(r), l.max(largest));
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        largest = p as u64;
        let mut e = 0;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            counts.insert(pb, e);
        }
    }
    (rest, largest)
}

/// Factorization engine with an optional shared on-disk cache.
#[derive(Debug, Default)]
pub struct Factorizer {
    pub config: FactorConfig,
    cache: Option<FactorCache>,
}

impl Factorizer {
    pub fn new(config: FactorConfig) -> Self {
        Factorizer { config, cache: None }
    }

    pub fn with_cache(mut self, cache: FactorCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn cache(&self) -> Option<&FactorCache> {
        self.cache.as_ref()
    }

    pub fn factor(&self, n: &BigUint) -> Result<FactoredInteger, ArithError> {
        if n.is_zero() {
            return Err(ArithError::Zero);
        }
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get(n) {
                return Ok(hit);
            }
        }
        let found = self.factor_uncached(n)?;
        if let Some(cache) = &self.cache {
            cache.insert(&found);
        }
        Ok(found)
    }

    fn factor_uncached(&self, n: &BigUint) -> Result<FactoredInteger, ArithError> {
        let mut counts: BTreeMap<BigUint, u32> = BTreeMap::new();
        let limit = self.config.trial_limit;
        let (rest, largest_tried) = match n.to_u128() {
            Some(small) => {
                let (rest, tried) = trial_divide_u128(small, limit, &mut counts);
                (BigUint::from(rest), tried)
            }
            None => trial_divide_big(n, limit, &mut counts),
        };
        if rest > BigUint::one() {
            let bound = BigUint::from(largest_tried + 1);
            if &bound * &bound > rest {
                *counts.entry(rest).or_default() += 1;
            } else {
                let mut spent = 0u64;
                self.split(rest, 1, &mut counts, &mut spent)?;
            }
        }
        let factors = counts.into_iter().collect();
        Ok(FactoredInteger::from_parts_unchecked(n.clone(), factors))
    }

    fn split(
        &self,
        n: BigUint,
        multiplicity: u32,
        out: &mut BTreeMap<BigUint, u32>,
        spent: &mut u64,
    ) -> Result<(), ArithError> {
        if n.is_one() {
            return Ok(());
        }
        if is_prime_with(&n, self.config.extra_mr_rounds) {
            *out.entry(n).or_default() += multiplicity;
            return Ok(());
        }
        if let Some((root, k)) = perfect_power(&n) {
            return self.split(root, multiplicity * k, out, spent);
        }
        let budget = self.config.rho_budget;
        let mut c = 1u64;
        let d = loop {
            let attempt = match n.to_u128() {
                Some(small) if small < (1u128 << 127) => {
                    brent_u128(small, c as u128, budget, spent).map(BigUint::from)
                }
                _ => brent_big(&n, c, budget, spent),
            };
            if let Some(d) = attempt {
                break d;
            }
            if *spent > budget {
                return Err(ArithError::BudgetExceeded { value: n.to_string() });
            }
            c += 1;
        };
        let other = &n / &d;
        self.split(d, multiplicity, out, spent)?;
        self.split(other, multiplicity, out, spent)
    }
}

/// Factorization with the default configuration and no cache.
pub fn factor(n: &BigUint) -> Result<FactoredInteger, ArithError> {
    Factorizer::default().factor(n)
}

pub fn factor_u128(n: u128) -> Result<FactoredInteger, ArithError> {
    factor(&BigUint::from(n))
}

/// JSON map from decimal integer to its factor list, e.g.
/// `{"2186": [["2", 1], ["1093", 1]]}`.
#[derive(Debug, Default)]
pub struct FactorCache {
    path: Option<PathBuf>,
    entries: Mutex<BTreeMap<String, Vec<(String, u32)>>>,
}

impl FactorCache {
    pub fn in_memory() -> Self {
        FactorCache::default()
    }

    /// Opens `path`; a missing file yields an empty cache bound to that path.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ArithError> {
        let path = path.as_ref().to_path_buf();
        let entries = if path.exists() {
            let text = fs::read_to_string(&path)?;
            serde_json::from_str(&text)?
        } else {
            BTreeMap::new()
        };
        Ok(FactorCache {
            path: Some(path),
            entries: Mutex::new(entries),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries are re-validated on lookup; a corrupt entry is treated as a miss.
    pub fn get(&self, n: &BigUint) -> Option<FactoredInteger> {
        let entries = self.entries.lock().unwrap();
        let raw = entries.get(&n.to_string())?;
        let mut factors = Vec::with_capacity(raw.len());
        for (p, e) in raw {
            factors.push((p.parse::<BigUint>().ok()?, *e));
        }
        FactoredInteger::from_factors(n.clone(), factors).ok()
    }

    pub fn insert(&self, f: &FactoredInteger) {
        let raw = f
            .factors()
            .iter()
            .map(|(p, e)| (p.to_string(), *e))
            .collect();
        self.entries
            .lock()
            .unwrap()
            .insert(f.value().to_string(), raw);
    }

    /// Writes to a sibling temporary file and renames it over the target.
    pub fn save(&self) -> Result<(), ArithError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let text = {
            let entries = self.entries.lock().unwrap();
            serde_json::to_string_pretty(&*entries)?
        };
        let mut tmp = path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(text.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
