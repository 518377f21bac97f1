//! Exact integer arithmetic: factorization, multiplicative functions,
//! prime sequences and exact rationals.

pub mod decimal;
mod factor;
mod montgomery;
mod primes;
mod rational;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use factor::{factor, factor_u128, is_prime, FactorCache, FactorConfig, Factorizer};
pub use primes::{nth_primes, primes_up_to, small_primes, SIEVE_LIMIT};
pub use rational::ExactRational;

/// `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factor_u128(q as u128).ok()?;
    match f.factors() {
        [(p, k)] => Some((p.to_u64()?, *k)),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("cannot factor zero")]
    Zero,
    #[error("factoring budget exceeded on cofactor {value}")]
    BudgetExceeded { value: String },
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Json(#[from] serde_json::Error),
}

/// A positive integer together with its complete prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "FactorList", try_from = "FactorList")]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

/// Wire form: `{"value": "12", "factors": [["2", 2], ["3", 1]]}`.
#[derive(Serialize, Deserialize)]
struct FactorList {
    value: String,
    factors: Vec<(String, u32)>,
}

impl From<FactoredInteger> for FactorList {
    fn from(f: FactoredInteger) -> Self {
        FactorList {
            value: f.value.to_string(),
            factors: f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        }
    }
}

impl TryFrom<FactorList> for FactoredInteger {
    type Error = ArithError;

    fn try_from(w: FactorList) -> Result<Self, ArithError> {
        let num = |s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| ArithError::InvalidFactorization(format!("{s:?} is not an integer")))
        };
        let factors = w
            .factors
            .iter()
            .map(|(p, e)| Ok((num(p)?, *e)))
            .collect::<Result<_, ArithError>>()?;
        FactoredInteger::from_factors(num(&w.value)?, factors)
    }
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Validates ordering, primality and the product before accepting `factors`.
    pub fn from_factors(value: BigUint, factors: Vec<(BigUint, u32)>) -> Result<Self, ArithError> {
        let mut product = BigUint::one();
        for (i, (p, e)) in factors.iter().enumerate() {
            if *e == 0 {
                return Err(ArithError::InvalidFactorization(format!("zero exponent on {p}")));
            }
            if i > 0 && factors[i - 1].0 >= *p {
                return Err(ArithError::InvalidFactorization("primes not increasing".into()));
            }
            if !is_prime(p) {
                return Err(ArithError::InvalidFactorization(format!("{p} is not prime")));
            }
            product *= p.pow(*e);
        }
        if product != value {
            return Err(ArithError::InvalidFactorization(format!(
                "factors multiply to {product}, not {value}"
            )));
        }
        Ok(FactoredInteger { value, factors })
    }

    pub(crate) fn from_parts_unchecked(value: BigUint, factors: Vec<(BigUint, u32)>) -> Self {
        debug_assert_eq!(
            factors.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e)),
            value
        );
        FactoredInteger { value, factors }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn recompose(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// `W`: the number of squarefree divisors, `2^omega`.
    pub fn squarefree_divisor_count(&self) -> BigUint {
        BigUint::one() << self.omega()
    }

    pub fn euler_phi(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, e)| {
            acc * p.pow(e - 1) * (p - 1u32)
        })
    }

    pub fn moebius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.omega() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> FactoredInteger {
        let factors: Vec<_> = self.factors.iter().map(|(p, _)| (p.clone(), 1)).collect();
        let value = factors.iter().fold(BigUint::one(), |acc, (p, _)| acc * p);
        FactoredInteger { value, factors }
    }

    /// All squarefree divisors, ascending by value.
    pub fn squarefree_divisors(&self) -> Vec<FactoredInteger> {
        let primes: Vec<&BigUint> = self.primes().collect();
        let mut out: Vec<FactoredInteger> = (0u64..(1u64 << primes.len()))
            .map(|mask| {
                let factors: Vec<(BigUint, u32)> = primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| ((*p).clone(), 1))
                    .collect();
                let value = factors.iter().fold(BigUint::one(), |acc, (p, _)| acc * p);
                FactoredInteger { value, factors }
            })
            .collect();
        out.sort_by(|a, b| a.value.cmp(&b.value));
        out
    }

    /// Factorization of a divisor `d` of `self`, read off from `self`'s primes.
    pub fn divisor(&self, d: &BigUint) -> Option<FactoredInteger> {
        if d.is_zero() || !(&self.value % d).is_zero() {
            return None;
        }
        let mut rest = d.clone();
        let mut factors = Vec::new();
        for (p, _) in &self.factors {
            let mut e = 0;
            while (&rest % p).is_zero() {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p.clone(), e));
            }
        }
        Some(FactoredInteger {
            value: d.clone(),
            factors,
        })
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fi(n: u64) -> FactoredInteger {
        factor(&BigUint::from(n)).unwrap()
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(split_prime_power(32), Some((2, 5)));
        assert_eq!(split_prime_power(19483), Some((19483, 1)));
        assert_eq!(split_prime_power(12), None);
        assert_eq!(split_prime_power(1), None);
    }

    #[test]
    fn unit_views() {
        let one = fi(1);
        assert_eq!(one.omega(), 0);
        assert_eq!(one.squarefree_divisor_count(), BigUint::one());
        assert_eq!(one.euler_phi(), BigUint::one());
        assert_eq!(one.moebius(), 1);
        assert_eq!(one.squarefree_divisors().len(), 1);
    }

    #[test]
    fn textbook_values() {
        assert_eq!(fi(12).euler_phi(), BigUint::from(4u32));
        assert_eq!(fi(12).moebius(), 0);
        assert_eq!(fi(30).moebius(), -1);
        let divs: Vec<u64> = fi(12)
            .squarefree_divisors()
            .iter()
            .map(|d| d.to_u64().unwrap())
            .collect();
        assert_eq!(divs, vec![1, 2, 3, 6]);
    }

    #[test]
    fn omega_and_w() {
        assert_eq!(fi(34_359_738_367).omega(), 4);
        assert_eq!(fi(34_359_738_367).squarefree_divisor_count(), BigUint::from(16u32));
        assert_eq!(fi(2186).omega(), 2);
        // Product of the first 31 primes has W = 2^31.
        let primorial: BigUint = nth_primes(31).into_iter().map(BigUint::from).product();
        assert_eq!(
            factor(&primorial).unwrap().squarefree_divisor_count(),
            BigUint::from(1u64 << 31)
        );
    }

    #[test]
    fn rejects_bad_factor_lists() {
        let v = BigUint::from(12u32);
        let bad = vec![(BigUint::from(4u32), 1), (BigUint::from(3u32), 1)];
        assert!(FactoredInteger::from_factors(v.clone(), bad).is_err());
        let wrong = vec![(BigUint::from(2u32), 1), (BigUint::from(3u32), 1)];
        assert!(FactoredInteger::from_factors(v, wrong).is_err());
    }

    /// Smallest-prime-factor sieve used as an independent oracle.
    fn spf_table(limit: usize) -> Vec<u32> {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    }

    #[test]
    fn agrees_with_sieve_oracle_up_to_a_million() {
        const LIMIT: usize = 1_000_000;
        let spf = spf_table(LIMIT);
        for n in 1..=LIMIT {
            let mut oracle: Vec<(u64, u32)> = Vec::new();
            let mut m = n;
            while m > 1 {
                let p = spf[m] as u64;
                let mut e = 0;
                while m as u64 % p == 0 {
                    m /= p as usize;
                    e += 1;
                }
                oracle.push((p, e));
            }
            let got = fi(n as u64);
            let got_pairs: Vec<(u64, u32)> =
                got.factors().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
            assert_eq!(got_pairs, oracle, "n = {n}");
            let phi: u64 = oracle.iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product();
            assert_eq!(got.euler_phi(), BigUint::from(phi));
            let mu = if oracle.iter().any(|&(_, e)| e > 1) {
                0
            } else if oracle.len() % 2 == 0 {
                1
            } else {
                -1
            };
            assert_eq!(got.moebius(), mu);
        }
    }

    proptest! {
        #[test]
        fn recomposes(n in 1u64..1_000_000_000_000) {
            let f = fi(n);
            prop_assert_eq!(f.recompose(), BigUint::from(n));
            prop_assert!(FactoredInteger::from_factors(f.value().clone(), f.factors().to_vec()).is_ok());
        }

        #[test]
        fn w_is_multiplicative_on_coprime_pairs(a in 1u64..5_000_000, b in 1u64..5_000_000) {
            prop_assume!(num_integer::gcd(a, b) == 1);
            let wa = fi(a).squarefree_divisor_count();
            let wb = fi(b).squarefree_divisor_count();
            prop_assert_eq!(fi(a * b).squarefree_divisor_count(), wa * wb);
        }

        #[test]
        fn squarefree_divisors_shape(n in 1u64..10_000_000) {
            let f = fi(n);
            let divs = f.squarefree_divisors();
            prop_assert_eq!(BigUint::from(divs.len()), f.squarefree_divisor_count());
            for d in &divs {
                prop_assert_eq!(f.value() % d.value(), BigUint::default());
                prop_assert!(d.is_squarefree());
            }
        }
    }
}
