//! Brute-force ground truth over small fields: enumerate rational
//! functions, count qualifying `α` directly, resolve candidate
//! exceptions and cross-check the character-sum count.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{split_prime_power, ArithError, Factorizer};
use crate::bounds::{self, BoundsError, MainCheck, SieveCertificate};
use crate::characters::{CharError, Characters};
use crate::ff::{
    self, eval_rational, poly, BuildOptions, CtxDescription, Evaluation, FfError, FieldCtx, FieldElement,
    RationalFunction,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("n1 = n2 = 0 gives only constants")]
    Degenerate,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error(transparent)]
    Ff(#[from] FfError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Limits for brute force.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Budget {
    /// Largest field size for α-loops.
    pub alpha_limit: u64,
    /// Largest representative count for an exhaustive f-loop.
    pub f_limit: u128,
    /// Representatives drawn when the f-loop is sampled.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            alpha_limit: 1 << 20,
            f_limit: 10_000_000,
            samples: 1000,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

/// Monic irreducibles of degree `d`, with `[1]` standing in for degree 0.
fn monic_irreducibles(ctx: &FieldCtx, d: usize) -> Vec<Vec<FieldElement>> {
    if d == 0 {
        return vec![vec![FieldElement::ONE]];
    }
    ff::find_irreducibles(ctx, d, None).collect()
}

/// Number of monic irreducibles of degree `d` over a field of size `Q`,
/// `(1/d) Σ_{e|d} μ(e) Q^(d/e)`; 1 for `d = 0`.
pub fn irreducible_count(size: u64, d: usize) -> u128 {
    if d == 0 {
        return 1;
    }
    let q = size as i128;
    let mut total: i128 = 0;
    for e in 1..=d {
        if d % e != 0 {
            continue;
        }
        let mu = crate::arith::factor_u128(e as u128).map(|f| f.moebius()).unwrap_or(0) as i128;
        total += mu * q.pow((d / e) as u32);
    }
    (total / d as i128) as u128
}

/// `|R_{n₁,n₂}|` counted as representatives `c · P / Q`.
pub fn representative_count(ctx: &FieldCtx, n1: usize, n2: usize) -> u128 {
    let c = ctx.size() as u128 - 1;
    let (i1, i2) = (irreducible_count(ctx.size(), n1), irreducible_count(ctx.size(), n2));
    let same = if n1 == n2 { i1 } else { 0 };
    c * (i1 * i2 - same)
}

/// Exhaustive enumeration in `(c, P, Q)` order, or a seeded sample.
pub fn enumerate_r<'a>(
    ctx: &'a FieldCtx,
    n1: usize,
    n2: usize,
    mode: EnumMode,
) -> Result<Box<dyn Iterator<Item = RationalFunction> + 'a>, VerifyError> {
    if n1 + n2 == 0 {
        return Err(VerifyError::Degenerate);
    }
    match mode {
        EnumMode::Exhaustive => {
            let nums = monic_irreducibles(ctx, n1);
            let dens = monic_irreducibles(ctx, n2);
            let iter = (1..ctx.size()).flat_map(move |c| {
                let c = FieldElement::from_encoding_unchecked(c);
                let dens = dens.clone();
                nums.clone().into_iter().flat_map(move |p| {
                    let c = c;
                    dens.clone().into_iter().filter_map(move |q| {
                        if p == q {
                            return None;
                        }
                        Some(RationalFunction::new(ctx, c, p.clone(), q).expect("valid by construction"))
                    })
                })
            });
            Ok(Box::new(iter))
        }
        EnumMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<RationalFunction> = (0..count)
                .map(|_| random_function(ctx, n1, n2, &mut rng))
                .collect();
            Ok(Box::new(v.into_iter()))
        }
    }
}

fn random_irreducible(ctx: &FieldCtx, d: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    if d == 0 {
        return vec![FieldElement::ONE];
    }
    loop {
        let mut p: Vec<FieldElement> = (0..d)
            .map(|_| FieldElement::from_encoding_unchecked(rng.gen_range(0..ctx.size())))
            .collect();
        p.push(FieldElement::ONE);
        if poly::is_irreducible(ctx, &p) {
            return p;
        }
    }
}

/// A uniformly random representative of `R_{n₁,n₂}`.
pub fn random_function(ctx: &FieldCtx, n1: usize, n2: usize, rng: &mut ChaCha8Rng) -> RationalFunction {
    let c = FieldElement::from_encoding_unchecked(rng.gen_range(1..ctx.size()));
    loop {
        let p = random_irreducible(ctx, n1, rng);
        let q = random_irreducible(ctx, n2, rng);
        if p != q {
            return RationalFunction::new(ctx, c, p, q).expect("valid by construction");
        }
    }
}

/// Per-element lookups shared by every f-loop over one field.
pub struct VerifyTables<'a> {
    ctx: &'a FieldCtx,
    primitive: Vec<bool>,
    trace: Vec<u32>,
    inv_trace: Vec<u32>,
}

impl<'a> VerifyTables<'a> {
    pub fn new(ctx: &'a FieldCtx, budget: &Budget) -> Result<Self, VerifyError> {
        if ctx.size() > budget.alpha_limit {
            return Err(VerifyError::Budget(format!(
                "field of size {} exceeds the enumeration limit {}",
                ctx.size(),
                budget.alpha_limit
            )));
        }
        let mut primitive = vec![false; ctx.size() as usize];
        let mut inv_trace = vec![0u32; ctx.size() as usize];
        for a in ctx.elements().skip(1) {
            primitive[a.encoding() as usize] = ctx.is_primitive(a)?;
            inv_trace[a.encoding() as usize] = ctx.trace_value(ctx.inv(a).unwrap());
        }
        let trace = ctx.elements().map(|a| ctx.trace_value(a)).collect();
        Ok(VerifyTables {
            ctx,
            primitive,
            trace,
            inv_trace,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.ctx
    }

    pub fn is_primitive(&self, a: FieldElement) -> bool {
        self.primitive[a.encoding() as usize]
    }

    /// `(α, f(α))` for every `α ∉ S`.
    fn points<'b>(&'b self, f: &'b RationalFunction) -> impl Iterator<Item = (FieldElement, FieldElement)> + 'b {
        self.ctx.elements().skip(1).filter_map(move |a| match eval_rational(self.ctx, f, a) {
            Evaluation::Value(v) if !v.is_zero() => Some((a, v)),
            _ => None,
        })
    }

    /// `N_{f,a,b}(l₁, l₂)` by direct enumeration.
    pub fn brute_force_count(
        &self,
        f: &RationalFunction,
        a: u32,
        b: u32,
        l1: u64,
        l2: u64,
    ) -> Result<u64, VerifyError> {
        let n = self.ctx.size() - 1;
        for l in [l1, l2] {
            if l == 0 || n % l != 0 {
                return Err(FfError::NotDivisor { u: l, order: n }.into());
            }
        }
        let mut count = 0;
        for (alpha, v) in self.points(f) {
            let i = alpha.encoding() as usize;
            if self.trace[i] == a
                && self.inv_trace[i] == b
                && self.ctx.is_u_free(alpha, l1)?
                && self.ctx.is_u_free(v, l2)?
            {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Counts with `l₁ = l₂ = q^m - 1` for every trace pair in one pass.
    pub fn count_table(&self, f: &RationalFunction) -> CountTable {
        let q = self.ctx.q() as usize;
        let mut counts = vec![vec![0u64; q]; q];
        for (alpha, v) in self.points(f) {
            if self.is_primitive(alpha) && self.is_primitive(v) {
                let i = alpha.encoding() as usize;
                counts[self.trace[i] as usize][self.inv_trace[i] as usize] += 1;
            }
        }
        CountTable { f: f.clone(), counts }
    }

    /// `#{α ∉ S : α and f(α) primitive}`, independent of traces.
    pub fn primitive_pair_total(&self, f: &RationalFunction) -> u64 {
        self.points(f)
            .filter(|&(a, v)| self.is_primitive(a) && self.is_primitive(v))
            .count() as u64
    }
}

/// `counts[a][b] = N_{f,a,b}(q^m-1, q^m-1)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountTable {
    pub f: RationalFunction,
    pub counts: Vec<Vec<u64>>,
}

impl CountTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// First `(a, b)` with a zero count, scanning `a` then `b`.
    pub fn first_zero(&self) -> Option<(u32, u32)> {
        self.counts.iter().enumerate().find_map(|(a, row)| {
            row.iter().position(|&c| c == 0).map(|b| (a as u32, b as u32))
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    CertifiedMain,
    CertifiedSieve,
    ExceptionWitness,
    VerifiedExhaustive,
    VerifiedSampled,
    Undecided,
}

/// A concrete `(f, a, b)` with no qualifying `α`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Witness {
    pub f: RationalFunction,
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PairVerdict {
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub status: VerdictStatus,
    pub main: Option<MainCheck>,
    pub certificate: Option<SieveCertificate>,
    pub witness: Option<Witness>,
    pub ctx: Option<CtxDescription>,
    pub coverage: String,
}

/// `(n₁, n₂)` with `n₁ + n₂ = n`, ascending in `n₂`.
pub fn splits(n: u32) -> Vec<(usize, usize)> {
    (0..=n as usize).rev().map(|n1| (n1, n as usize - n1)).collect()
}

/// Main condition, then sieve, then brute force if the field is small.
pub fn resolve_pair(
    q: u64,
    m: u32,
    n: u32,
    budget: &Budget,
    factorizer: &Factorizer,
) -> Result<PairVerdict, VerifyError> {
    let (p, k) = split_prime_power(q).ok_or(VerifyError::NotPrimePower(q))?;
    let order = bounds::factor_group_order(q, m, factorizer)?;
    let mut verdict = PairVerdict {
        q,
        m,
        n,
        status: VerdictStatus::Undecided,
        main: None,
        certificate: None,
        witness: None,
        ctx: None,
        coverage: String::new(),
    };
    if let Ok(check) = bounds::main_condition(q, m, n, &order.squarefree_divisor_count()) {
        let passes = check.passes;
        verdict.main = Some(check);
        if passes {
            verdict.status = VerdictStatus::CertifiedMain;
            verdict.coverage = "main condition".into();
            return Ok(verdict);
        }
    }
    if let Some(cert) = bounds::certificate_search(q, m, n, &order) {
        verdict.status = VerdictStatus::CertifiedSieve;
        verdict.coverage = format!("sieve with l = {}", cert.l());
        verdict.certificate = Some(cert);
        return Ok(verdict);
    }
    let size = BigUint::from(q).pow(m);
    if size > BigUint::from(budget.alpha_limit) {
        verdict.coverage = format!("q^m = {size} exceeds the enumeration limit {}", budget.alpha_limit);
        return Ok(verdict);
    }
    let ctx = FieldCtx::build(p as u32, k, m, BuildOptions::default())?;
    verdict.ctx = Some(ctx.description());
    let tables = VerifyTables::new(&ctx, budget)?;
    let total: u128 = splits(n).iter().map(|&(a, b)| representative_count(&ctx, a, b)).sum();
    let outcome = if total <= budget.f_limit {
        search_exhaustive(&tables, n)
    } else {
        search_sampled(&tables, n, budget)
    };
    match outcome {
        Search::Witness(w) => {
            verdict.status = VerdictStatus::ExceptionWitness;
            verdict.coverage = format!("zero cell found at (a, b) = ({}, {})", w.a, w.b);
            verdict.witness = Some(w);
        }
        Search::AllPositive { checked, exhaustive } => {
            verdict.status = if exhaustive {
                VerdictStatus::VerifiedExhaustive
            } else {
                VerdictStatus::VerifiedSampled
            };
            verdict.coverage = if exhaustive {
                format!("exhaustive: all {checked} representatives, all {} trace pairs", q * q)
            } else {
                format!(
                    "sampled: {checked} of {total} representatives (seed {}), all {} trace pairs",
                    budget.seed,
                    q * q
                )
            };
        }
    }
    Ok(verdict)
}

enum Search {
    Witness(Witness),
    AllPositive { checked: u128, exhaustive: bool },
}

fn witness_of(tables: &VerifyTables<'_>, f: &RationalFunction) -> Option<Witness> {
    tables.count_table(f).first_zero().map(|(a, b)| Witness { f: f.clone(), a, b })
}

fn search_exhaustive(tables: &VerifyTables<'_>, n: u32) -> Search {
    let ctx = tables.ctx();
    let mut checked = 0u128;
    for (n1, n2) in splits(n) {
        if n1 + n2 == 0 {
            continue;
        }
        let nums = monic_irreducibles(ctx, n1);
        let dens = monic_irreducibles(ctx, n2);
        let per_c = nums.len() * dens.len();
        // Lowest index in (c, P, Q) order wins.
        let found = (0..(ctx.size() as usize - 1) * per_c)
            .into_par_iter()
            .find_map_first(|idx| {
                let c = FieldElement::from_encoding_unchecked(1 + (idx / per_c) as u64);
                let (i, j) = ((idx % per_c) / dens.len(), idx % dens.len());
                if nums[i] == dens[j] {
                    return None;
                }
                let f = RationalFunction::new(ctx, c, nums[i].clone(), dens[j].clone()).expect("valid");
                witness_of(tables, &f)
            });
        if let Some(w) = found {
            return Search::Witness(w);
        }
        checked += representative_count(ctx, n1, n2);
    }
    Search::AllPositive {
        checked,
        exhaustive: true,
    }
}

/// Draws cycle through the splits of `n` so each type gets a share.
fn search_sampled(tables: &VerifyTables<'_>, n: u32, budget: &Budget) -> Search {
    let ctx = tables.ctx();
    let parts: Vec<(usize, usize)> = splits(n).into_iter().filter(|&(a, b)| a + b > 0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let draws: Vec<RationalFunction> = (0..budget.samples)
        .map(|i| {
            let (n1, n2) = parts[i % parts.len()];
            random_function(ctx, n1, n2, &mut rng)
        })
        .collect();
    match draws.par_iter().find_map_first(|f| witness_of(tables, f)) {
        Some(w) => Search::Witness(w),
        None => Search::AllPositive {
            checked: draws.len() as u128,
            exhaustive: false,
        },
    }
}

/// One random comparison of the character-sum count against brute force.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrosscheckTrial {
    pub f: String,
    pub a: u32,
    pub b: u32,
    pub l1: u64,
    pub l2: u64,
    pub brute_force: u64,
    pub via_characters: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub ctx: CtxDescription,
    pub seed: u64,
    pub trials: Vec<CrosscheckTrial>,
    pub max_deviation: f64,
}

impl CrosscheckReport {
    /// Every trial within 0.5 and rounding to the brute-force count.
    pub fn passes(&self) -> bool {
        self.trials
            .iter()
            .all(|t| t.deviation < 0.5 && t.via_characters.round() as i64 == t.brute_force as i64)
    }
}

/// All divisors of `n` (`n` below `2^63`), ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = crate::arith::factor_u128(n as u128).expect("small integers factor");
    let mut out = vec![1u64];
    for (p, e) in f.factors() {
        let p = p.to_u64().unwrap();
        let len = out.len();
        let mut pk = 1;
        for _ in 0..*e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Random `(f, a, b, l₁, l₂)` with `f` of total degree 1 or 2.
pub fn crosscheck_identity(ctx: &FieldCtx, trials: usize, seed: u64) -> Result<CrosscheckReport, VerifyError> {
    let chars = Characters::new(ctx)?;
    let tables = VerifyTables::new(ctx, &Budget::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let divs = divisors(ctx.size() - 1);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let n = rng.gen_range(1..=2u32);
        let parts = splits(n);
        let (n1, n2) = parts[rng.gen_range(0..parts.len())];
        let f = random_function(ctx, n1, n2, &mut rng);
        let a = rng.gen_range(0..ctx.q());
        let b = rng.gen_range(0..ctx.q());
        let l1 = divs[rng.gen_range(0..divs.len())];
        let l2 = divs[rng.gen_range(0..divs.len())];
        let brute = tables.brute_force_count(&f, a, b, l1, l2)?;
        let via = chars.count_via_characters(&f, a, b, l1, l2)?;
        out.push(CrosscheckTrial {
            f: f.to_string(),
            a,
            b,
            l1,
            l2,
            brute_force: brute,
            via_characters: via,
            deviation: (via - brute as f64).abs(),
        });
    }
    let max_deviation = out.iter().map(|t| t.deviation).fold(0.0, f64::max);
    Ok(CrosscheckReport {
        ctx: ctx.description(),
        seed,
        trials: out,
        max_deviation,
    })
}

/// Replay record written beside JSON-lines output.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub budget: Budget,
    pub contexts: Vec<CtxDescription>,
}

/// One JSON document per line.
pub fn to_json_lines<T: Serialize>(items: &[T]) -> Result<String, serde_json::Error> {
    let mut s = String::new();
    for item in items {
        s.push_str(&serde_json::to_string(item)?);
        s.push('\n');
    }
    Ok(s)
}
