//! Exact evaluation of the sufficient conditions for `(q, m) ∈ Q_n`: the
//! main inequality `q^(m/2-2) > (n+2)·W(q^m-1)^2`, its sieved form with
//! `δ`, `Δ`, the 473-prime threshold, worst-case prime windows and the
//! resulting search region.
//!
//! Everything here is integer or rational arithmetic; no floating point
//! enters a decision.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{decimal, nth_primes, ArithError, ExactRational, FactoredInteger, Factorizer};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("m = {m} is too small; the main condition needs m >= 5")]
    ExponentTooSmall { m: u32 },
    #[error("{l} does not divide {order}")]
    NotDivisor { l: String, order: String },
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("window a = {a}, b = {b} is empty or inverted")]
    BadWindow { a: usize, b: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `q^m - 1`.
pub fn group_order_value(q: u64, m: u32) -> BigUint {
    BigUint::from(q).pow(m) - 1u32
}

pub fn factor_group_order(
    q: u64,
    m: u32,
    factorizer: &Factorizer,
) -> Result<FactoredInteger, ArithError> {
    factorizer.factor(&group_order_value(q, m))
}

/// Both sides of the squared main inequality `q^(m-4)` vs `((n+2)·W^2)^2`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MainCheck {
    pub q: u64,
    pub m: u32,
    pub n: u32,
    #[serde(with = "decimal")]
    pub w: BigUint,
    #[serde(with = "decimal")]
    pub lhs: BigUint,
    #[serde(with = "decimal")]
    pub rhs: BigUint,
    pub passes: bool,
    pub equality: bool,
}

/// Strict: equality counts as failure.
pub fn main_condition(q: u64, m: u32, n: u32, w: &BigUint) -> Result<MainCheck, BoundsError> {
    if m < 5 {
        return Err(BoundsError::ExponentTooSmall { m });
    }
    let lhs = BigUint::from(q).pow(m - 4);
    let rhs = (BigUint::from(n + 2) * w * w).pow(2);
    let ord = lhs.cmp(&rhs);
    Ok(MainCheck {
        q,
        m,
        n,
        w: w.clone(),
        lhs,
        rhs,
        passes: ord == Ordering::Greater,
        equality: ord == Ordering::Equal,
    })
}

/// Outcome of the two exact comparisons behind the 473-prime threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma473Report {
    /// `2^4730 < p_1 ⋯ p_473`.
    pub holds_at_473: bool,
    /// `2^4720 >= p_1 ⋯ p_472`.
    pub fails_at_472: bool,
    pub primorial_473_bits: u64,
}

impl Lemma473Report {
    pub fn passes(&self) -> bool {
        self.holds_at_473 && self.fails_at_472
    }
}

/// `W(M) < M^(1/10)` for `M` the product of the first `k` primes, i.e.
/// `2^(10k) < primorial(k)`.
pub fn w_below_tenth_root_of_primorial(k: usize) -> bool {
    let primorial: BigUint = nth_primes(k).into_iter().map(BigUint::from).product();
    (BigUint::one() << (10 * k)) < primorial
}

pub fn lemma_473_boundary() -> Lemma473Report {
    let primorial: BigUint = nth_primes(473).into_iter().map(BigUint::from).product();
    Lemma473Report {
        holds_at_473: w_below_tenth_root_of_primorial(473),
        fails_at_472: !w_below_tenth_root_of_primorial(472),
        primorial_473_bits: primorial.bits(),
    }
}

/// `s`, `δ` and (when `δ > 0`) `Δ` for a choice of `l`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SieveParams {
    pub s: usize,
    #[serde(with = "decimal::vec")]
    pub sieved_primes: Vec<BigUint>,
    pub delta: ExactRational,
    pub big_delta: Option<ExactRational>,
}

/// `δ = 1 - 2·Σ 1/p_i` over the primes `p_i` outside `l`, `Δ = (2s-1)/δ + 2`.
pub fn delta_for_primes(primes: &[BigUint]) -> (ExactRational, Option<ExactRational>) {
    let two = ExactRational::from_integer(2);
    let sum = primes
        .iter()
        .fold(ExactRational::zero(), |acc, p| acc + ExactRational::recip_of(p));
    let delta = ExactRational::one() - &two * &sum;
    let big_delta = delta.is_positive().then(|| {
        let s = primes.len() as i64;
        ExactRational::from_integer(2 * s - 1) / delta.clone() + two.clone()
    });
    (delta, big_delta)
}

pub fn sieve_params(
    group_order: &FactoredInteger,
    l_radical: &FactoredInteger,
) -> Result<SieveParams, BoundsError> {
    if !l_radical.is_squarefree() {
        return Err(BoundsError::NotSquarefree(l_radical.value().to_string()));
    }
    if !(group_order.value() % l_radical.value()).is_zero() {
        return Err(BoundsError::NotDivisor {
            l: l_radical.value().to_string(),
            order: group_order.value().to_string(),
        });
    }
    let sieved: Vec<BigUint> = group_order
        .primes()
        .filter(|p| !(l_radical.value() % *p).is_zero())
        .cloned()
        .collect();
    let (delta, big_delta) = delta_for_primes(&sieved);
    Ok(SieveParams {
        s: sieved.len(),
        sieved_primes: sieved,
        delta,
        big_delta,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SieveCertificate {
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub l_radical: FactoredInteger,
    pub s: usize,
    pub delta: ExactRational,
    pub big_delta: Option<ExactRational>,
    pub passes: bool,
}

impl SieveCertificate {
    pub fn l(&self) -> &BigUint {
        self.l_radical.value()
    }
}

/// `q^(m/2-2) > (n+2)·Δ·W(l)^2`, compared as
/// `den^2 · q^(m-4) > (num·(n+2)·W(l)^2)^2` with `Δ = num/den`.
pub fn sieve_condition(q: u64, m: u32, n: u32, cert: &SieveCertificate) -> bool {
    let Some(big_delta) = &cert.big_delta else {
        return false;
    };
    if !cert.delta.is_positive() {
        return false;
    }
    let num = big_delta.numer().to_biguint().expect("Δ is positive");
    let den = big_delta.denom().to_biguint().expect("positive denominator");
    let w = cert.l_radical.squarefree_divisor_count();
    let rhs = (num * BigUint::from(n + 2) * &w * &w).pow(2);
    let qb = BigUint::from(q);
    if m >= 4 {
        &den * &den * qb.pow(m - 4) > rhs
    } else {
        &den * &den > rhs * qb.pow(4 - m)
    }
}

/// Evaluates one choice of `l` against `(q, m, n)`.
pub fn certificate(
    q: u64,
    m: u32,
    n: u32,
    group_order: &FactoredInteger,
    l_radical: &FactoredInteger,
) -> Result<SieveCertificate, BoundsError> {
    let params = sieve_params(group_order, l_radical)?;
    let mut cert = SieveCertificate {
        q,
        m,
        n,
        l_radical: l_radical.clone(),
        s: params.s,
        delta: params.delta,
        big_delta: params.big_delta,
        passes: false,
    };
    cert.passes = sieve_condition(q, m, n, &cert);
    Ok(cert)
}

/// Number of smallest primes of `q^m - 1` whose subsets are tried as `l`.
pub const CANDIDATE_PRIME_CAP: usize = 6;

/// Squarefree `l` built from the `min(ω, 6)` smallest primes of the group
/// order, ordered by `W(l)` and then by `l`.
pub fn candidate_radicals(group_order: &FactoredInteger) -> Vec<FactoredInteger> {
    let t = group_order.omega().min(CANDIDATE_PRIME_CAP);
    let primes: Vec<&BigUint> = group_order.primes().take(t).collect();
    let mut out: Vec<FactoredInteger> = (0u32..(1u32 << t))
        .map(|mask| {
            let factors: Vec<(BigUint, u32)> = (0..t)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (primes[i].clone(), 1))
                .collect();
            let value = factors.iter().fold(BigUint::one(), |acc, (p, _)| acc * p);
            FactoredInteger::from_factors(value, factors).expect("subset of a factorization")
        })
        .collect();
    out.sort_by(|a, b| a.omega().cmp(&b.omega()).then_with(|| a.value().cmp(b.value())));
    out
}

/// First passing certificate in candidate order, if any.
pub fn certificate_search(
    q: u64,
    m: u32,
    n: u32,
    group_order: &FactoredInteger,
) -> Option<SieveCertificate> {
    candidate_radicals(group_order)
        .iter()
        .map(|l| certificate(q, m, n, group_order, l).expect("candidates divide the order"))
        .find(|c| c.passes)
}

/// Worst-case `δ`, `Δ` when `a <= ω(q^m-1) <= b` and `l` keeps the `a`
/// smallest primes: the sieved primes are taken to be primes `a+1 ..= b`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WorstCaseRow {
    pub a: usize,
    pub b: usize,
    pub n: u32,
    #[serde(with = "decimal")]
    pub w_l: BigUint,
    pub delta_lower: ExactRational,
    pub big_delta_upper: Option<ExactRational>,
    /// `(n+2)·Δ·W(l)^2`, exact.
    pub bound: Option<ExactRational>,
    /// Ceiling of `bound`.
    #[serde(with = "decimal::option")]
    pub bound_value: Option<BigInt>,
}

impl WorstCaseRow {
    pub fn usable(&self) -> bool {
        self.delta_lower.is_positive()
    }
}

pub fn worst_case_row(a: usize, b: usize, n: u32) -> Result<WorstCaseRow, BoundsError> {
    if a == 0 || b < a {
        return Err(BoundsError::BadWindow { a, b });
    }
    let primes: Vec<BigUint> = nth_primes(b)[a..].iter().map(|&p| BigUint::from(p)).collect();
    let (delta, big_delta) = delta_for_primes(&primes);
    let w_l = BigUint::one() << a;
    let bound = big_delta.as_ref().map(|d| {
        let w2 = ExactRational::from_integer(BigInt::from(&w_l * &w_l));
        d * &(ExactRational::from_integer(n + 2) * w2)
    });
    let bound_value = bound.as_ref().map(ExactRational::ceil);
    Ok(WorstCaseRow {
        a,
        b,
        n,
        w_l,
        delta_lower: delta,
        big_delta_upper: big_delta,
        bound,
        bound_value,
    })
}

/// Windows used when `ω(q^m-1) <= 472`: the first one after the 473-prime step.
pub const OMEGA_WINDOW: (usize, usize) = (31, 472);

/// Refinement windows; the first five cover `m >= 7`, the last two `m >= 8`.
pub const REFINEMENT_WINDOWS: [(usize, usize); 7] =
    [(10, 61), (7, 29), (6, 23), (6, 22), (6, 21), (5, 19), (5, 18)];
const M7_GROUP_END: usize = 5;

pub fn table1_rows(n: u32) -> Vec<WorstCaseRow> {
    REFINEMENT_WINDOWS
        .iter()
        .map(|&(a, b)| worst_case_row(a, b, n).expect("fixed windows are valid"))
        .collect()
}

/// Search region left open by the worst-case bounds: for each `m`, every
/// prime power `q < q_limit` still needs an individual check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Cascade {
    pub n: u32,
    /// Integer bound applied for `m = 7` (ceiling of the last `m >= 7` row).
    #[serde(with = "decimal")]
    pub bound_m7: BigUint,
    /// Integer bound applied for every `m >= 8`.
    #[serde(with = "decimal")]
    pub bound_m8: BigUint,
    /// `(m, q_limit)`, ascending in `m`, only where `q_limit > 2`.
    pub limits: Vec<(u32, u64)>,
}

impl Cascade {
    pub fn limit_for(&self, m: u32) -> Option<u64> {
        self.limits.iter().find(|(mm, _)| *mm == m).map(|&(_, q)| q)
    }
}

/// For `m = 7` a pair escapes when `q^(3/2) > B7`, i.e. `q^3 > B7^2`.
/// For `m >= 8` the uniform bound `q^m > B8^4` is used (since `2m/(m-4) <= 4`).
pub fn threshold_cascade(n: u32) -> Cascade {
    let rows = table1_rows(n);
    let to_uint = |r: &WorstCaseRow| {
        r.bound_value
            .as_ref()
            .and_then(|v| v.to_biguint())
            .expect("refinement windows are usable")
    };
    let bound_m7 = to_uint(&rows[M7_GROUP_END - 1]);
    let bound_m8 = to_uint(&rows[rows.len() - 1]);
    let mut limits = Vec::new();
    let b7_sq = &bound_m7 * &bound_m7;
    limits.push((7, smallest_q_exceeding(|q| BigUint::from(q).pow(3) > b7_sq)));
    let b8_4 = bound_m8.pow(4);
    let mut m = 8u32;
    loop {
        let limit = smallest_q_exceeding(|q| BigUint::from(q).pow(m) > b8_4);
        if limit <= 2 {
            break;
        }
        limits.push((m, limit));
        m += 1;
    }
    Cascade {
        n,
        bound_m7,
        bound_m8,
        limits,
    }
}

/// Smallest `q >= 2` for which the monotone predicate holds.
fn smallest_q_exceeding(pred: impl Fn(u64) -> bool) -> u64 {
    let mut hi = 2u64;
    while !pred(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo < 2 {
        return hi;
    }
    // pred(lo) false, pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `(q, p, k)` with `q = p^k < limit`, ascending in `q`.
pub fn prime_powers_below(limit: u64) -> Vec<(u64, u64, u32)> {
    let primes = crate::arith::primes_up_to(limit.saturating_sub(1).min(u32::MAX as u64) as u32);
    let mut out = Vec::new();
    for p in primes {
        let p = p as u64;
        let mut q = p;
        let mut k = 1;
        while q < limit {
            out.push((q, p, k));
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
            k += 1;
        }
    }
    out.sort_unstable();
    out
}

/// A pair in the search region where the main condition fails.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScanEntry {
    pub q: u64,
    pub m: u32,
    pub omega: usize,
    pub equality: bool,
}

/// Checks every prime power under the cascade limits with the exact main
/// condition; returns the failures ordered by `(m, q)`.
pub fn scan_main_condition(
    cascade: &Cascade,
    factorizer: &Factorizer,
) -> Result<Vec<ScanEntry>, BoundsError> {
    let jobs: Vec<(u32, u64)> = cascade
        .limits
        .iter()
        .flat_map(|&(m, limit)| prime_powers_below(limit).into_iter().map(move |(q, _, _)| (m, q)))
        .collect();
    let results: Result<Vec<Option<ScanEntry>>, BoundsError> = jobs
        .par_iter()
        .map(|&(m, q)| {
            let order = factor_group_order(q, m, factorizer)?;
            let check = main_condition(q, m, cascade.n, &order.squarefree_divisor_count())?;
            Ok((!check.passes).then_some(ScanEntry {
                q,
                m,
                omega: order.omega(),
                equality: check.equality,
            }))
        })
        .collect();
    let mut out: Vec<ScanEntry> = results?.into_iter().flatten().collect();
    out.sort_by_key(|e| (e.m, e.q));
    Ok(out)
}

/// Margin by which a recomputed value must sit inside a printed bound.
pub const LISTED_TOLERANCE: &str = "0.000000001";

/// Recomputation of one printed certificate row `(q, m, l, s, δ>, Δ<)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ListedCheck {
    pub q: u64,
    pub m: u32,
    pub l: u64,
    pub certificate: SieveCertificate,
    pub listed_s: usize,
    pub s_matches: bool,
    /// `δ >= listed` and `δ - listed < 1e-9`.
    pub delta_ok: bool,
    /// `Δ <= listed` and `listed - Δ < 1e-9`.
    pub big_delta_ok: bool,
    pub delta_gap: ExactRational,
    pub big_delta_gap: Option<ExactRational>,
}

impl ListedCheck {
    pub fn all_ok(&self) -> bool {
        self.s_matches && self.delta_ok && self.big_delta_ok && self.certificate.passes
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_listed_certificate(
    q: u64,
    m: u32,
    n: u32,
    l: u64,
    listed_s: usize,
    listed_delta: &ExactRational,
    listed_big_delta: &ExactRational,
    factorizer: &Factorizer,
) -> Result<ListedCheck, BoundsError> {
    let order = factor_group_order(q, m, factorizer)?;
    let l_fact = order
        .divisor(&BigUint::from(l))
        .ok_or_else(|| BoundsError::NotDivisor {
            l: l.to_string(),
            order: order.value().to_string(),
        })?;
    let cert = certificate(q, m, n, &order, &l_fact)?;
    let tol: ExactRational = LISTED_TOLERANCE.parse().expect("constant parses");
    let delta_gap = &cert.delta - listed_delta;
    let delta_ok = !delta_gap.numer().is_negative() && delta_gap < tol;
    let big_delta_gap = cert.big_delta.as_ref().map(|d| listed_big_delta - d);
    let big_delta_ok = big_delta_gap
        .as_ref()
        .map(|g| !g.numer().is_negative() && *g < tol)
        .unwrap_or(false);
    Ok(ListedCheck {
        q,
        m,
        l,
        listed_s,
        s_matches: cert.s == listed_s,
        delta_ok,
        big_delta_ok,
        delta_gap,
        big_delta_gap,
        certificate: cert,
    })
}

pub fn u64_of(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_u128;

    fn fi(n: u128) -> FactoredInteger {
        factor_u128(n).unwrap()
    }

    fn rat(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn main_condition_rejects_small_m() {
        assert!(matches!(
            main_condition(2, 4, 2, &BigUint::one()),
            Err(BoundsError::ExponentTooSmall { m: 4 })
        ));
    }

    #[test]
    fn main_condition_32_7_fails() {
        let c = main_condition(32, 7, 2, &BigUint::from(16u32)).unwrap();
        assert_eq!(c.lhs, BigUint::from(32768u32));
        assert_eq!(c.rhs, BigUint::from(1_048_576u32));
        assert!(!c.passes && !c.equality);
    }

    #[test]
    fn main_condition_equality_is_failure() {
        // 4^16 - 1 = 3 · 5 · 17 · 257 · 65537 · ... has W = 2^ω.
        let order = fi(4u128.pow(16) - 1);
        let c = main_condition(4, 16, 2, &order.squarefree_divisor_count()).unwrap();
        assert!(c.equality);
        assert!(!c.passes);
    }

    #[test]
    fn sieve_params_32_7() {
        let order = fi((1 << 35) - 1);
        let p = sieve_params(&order, &FactoredInteger::one()).unwrap();
        assert_eq!(p.s, 4);
        assert!(p.delta > rat("0.8915505547") && p.delta < rat("0.8915505548"));
        let d = p.big_delta.unwrap();
        assert!(d < rat("9.8514897025") && d > rat("9.8514897024"));
    }

    #[test]
    fn sieve_params_full_radical() {
        let order = fi((1 << 35) - 1);
        let p = sieve_params(&order, &order.radical()).unwrap();
        assert_eq!(p.s, 0);
        assert_eq!(p.delta, ExactRational::one());
        assert_eq!(p.big_delta, Some(ExactRational::one()));
    }

    #[test]
    fn sieve_params_3_7() {
        let order = fi(2186);
        let p = sieve_params(&order, &fi(2)).unwrap();
        assert_eq!(p.s, 1);
        let delta = ExactRational::one()
            - ExactRational::new(BigInt::from(2), BigInt::from(1093));
        assert_eq!(p.delta, delta);
        assert_eq!(
            p.big_delta.unwrap(),
            ExactRational::one() / delta + ExactRational::from_integer(2)
        );
    }

    #[test]
    fn sieve_params_errors() {
        let order = fi(2186);
        assert!(matches!(sieve_params(&order, &fi(4)), Err(BoundsError::NotSquarefree(_))));
        assert!(matches!(sieve_params(&order, &fi(3)), Err(BoundsError::NotDivisor { .. })));
    }

    #[test]
    fn non_positive_delta_is_not_a_certificate() {
        // 2^4 - 1 = 3 · 5: δ = 1 - 2/3 - 2/5 < 0 for l = 1.
        let order = fi(15);
        let cert = certificate(2, 4, 2, &order, &FactoredInteger::one()).unwrap();
        assert!(!cert.delta.is_positive());
        assert!(cert.big_delta.is_none());
        assert!(!cert.passes);
    }

    #[test]
    fn sieve_certifies_32_7() {
        let order = fi((1 << 35) - 1);
        let cert = certificate_search(32, 7, 2, &order).unwrap();
        assert_eq!(cert.l(), &BigUint::one());
        assert_eq!(cert.s, 4);
    }

    #[test]
    fn sieve_cannot_rescue_2_7() {
        let order = fi(127);
        for l in candidate_radicals(&order) {
            assert!(!certificate(2, 7, 2, &order, &l).unwrap().passes);
        }
        assert!(certificate_search(2, 7, 2, &order).is_none());
    }

    #[test]
    fn full_radical_reduces_to_main_condition() {
        for (q, m) in [(32u64, 7u32), (4, 16), (101, 9), (3, 7), (2, 22)] {
            let order = fi((q as u128).pow(m) - 1);
            let cert = certificate(q, m, 2, &order, &order.radical()).unwrap();
            let main = main_condition(q, m, 2, &order.squarefree_divisor_count()).unwrap();
            assert_eq!(cert.passes, main.passes, "q={q} m={m}");
        }
    }

    #[test]
    fn candidate_order() {
        let order = fi(2u128.pow(36) - 1);
        let ls: Vec<u64> = candidate_radicals(&order)
            .iter()
            .map(|l| l.to_u64().unwrap())
            .collect();
        assert_eq!(ls.len(), 64);
        assert_eq!(&ls[..4], &[1, 3, 5, 7]);
    }

    #[test]
    fn enlarging_l_raises_delta() {
        let order = fi(4096u128.pow(7) - 1);
        let primes: Vec<BigUint> = order.primes().cloned().collect();
        let mut prev: Option<SieveParams> = None;
        for k in 0..=primes.len() {
            let factors: Vec<(BigUint, u32)> = primes[..k].iter().map(|p| (p.clone(), 1)).collect();
            let value = factors.iter().fold(BigUint::one(), |a, (p, _)| a * p);
            let l = FactoredInteger::from_factors(value, factors).unwrap();
            let cur = sieve_params(&order, &l).unwrap();
            if let Some(prev) = &prev {
                assert_eq!(cur.s + 1, prev.s);
                assert!(cur.delta > prev.delta);
                if let (Some(a), Some(b)) = (&cur.big_delta, &prev.big_delta) {
                    assert!(a < b);
                }
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn lemma_473_both_directions() {
        let r = lemma_473_boundary();
        assert!(r.holds_at_473);
        assert!(r.fails_at_472);
        // Three small primes: W = 8 exceeds 30^(1/10).
        assert!(!w_below_tenth_root_of_primorial(3));
    }

    #[test]
    fn omega_window_constants() {
        let row = worst_case_row(31, 472, 2).unwrap();
        assert!(row.delta_lower > rat("0.0008225"));
        assert!(row.delta_lower < rat("0.0008226"));
        let d = row.big_delta_upper.clone().unwrap();
        assert!(d < rat("1071081.2759510") && d > rat("1071081.2759505"));
        let bound = row.bound.unwrap();
        assert!(bound < rat("19758000000000000000000000"));
    }

    #[test]
    fn table1_first_and_last_rows() {
        let rows = table1_rows(2);
        assert_eq!(rows[0].delta_lower.to_decimal_truncated(7), "0.0479926");
        assert_eq!(rows[0].big_delta_upper.as_ref().unwrap().to_decimal_truncated(7), "2106.4882451");
        assert_eq!(rows[6].bound_value, Some(BigInt::from(969_830)));
        assert_eq!(rows[4].bound_value, Some(BigInt::from(2_749_163)));
    }

    #[test]
    fn bad_window() {
        assert!(worst_case_row(5, 4, 2).is_err());
        assert!(worst_case_row(0, 4, 2).is_err());
    }

    #[test]
    fn cascade_limits() {
        let c = threshold_cascade(2);
        let expect = [
            (7, 19625),
            (8, 985),
            (9, 458),
            (10, 249),
            (11, 151),
            (12, 99),
            (13, 70),
            (14, 52),
            (15, 40),
            (16, 32),
            (17, 26),
            (18, 22),
            (19, 19),
            (20, 16),
            (21, 14),
            (22, 13),
            (23, 11),
            (24, 10),
            (25, 10),
            (26, 9),
            (27, 8),
            (28, 8),
        ];
        for (m, q) in expect {
            assert_eq!(c.limit_for(m), Some(q), "m = {m}");
        }
        for m in 29..=34 {
            let l = c.limit_for(m).unwrap();
            assert!((6..=7).contains(&l), "m = {m}: {l}");
        }
        for m in 35..=39 {
            assert_eq!(c.limit_for(m), Some(5), "m = {m}");
        }
        for m in 40..=50 {
            assert!((4..=4).contains(&c.limit_for(m).unwrap()), "m = {m}");
        }
        for m in 51..=79 {
            assert_eq!(c.limit_for(m), Some(3), "m = {m}");
        }
        assert_eq!(c.limits.last().unwrap().0, 79);
    }

    #[test]
    fn prime_powers() {
        let qs: Vec<u64> = prime_powers_below(20).iter().map(|t| t.0).collect();
        assert_eq!(qs, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19]);
    }
}
