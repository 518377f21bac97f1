//! Finite fields `F_p ⊆ F_q ⊆ F_{q^m}` as a two-level polynomial tower.
//!
//! Defining polynomials are the lexicographically smallest monic
//! irreducibles, reading coefficients from the constant term upward and
//! ordering each coefficient by its canonical integer encoding. The
//! generator is the smallest primitive element under the same encoding.
//! Elements of `F_{q^m}` are packed into that encoding; [`FieldCtx::coeffs`]
//! recovers the coordinate vector.

mod ext;
pub mod poly;
mod rational;
mod subfield;

use thiserror::Error;

use crate::arith::{is_prime, ArithError};

pub use ext::{build_ctx, BuildOptions, CtxDescription, FieldCtx, FieldElement, DLOG_LIMIT, FIELD_LIMIT};
pub use rational::{eval_rational, find_irreducibles, Evaluation, RationalFunction};
pub use subfield::{SubField, SubFieldDescription, SUBFIELD_LIMIT};

#[derive(Debug, Error)]
pub enum FfError {
    #[error("{0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field too large: {0}")]
    TooLarge(String),
    #[error("not irreducible: {0}")]
    NotIrreducible(String),
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("{u} does not divide the group order {order}")]
    NotDivisor { u: u64, order: u64 },
    #[error("encoding {0} is outside the field")]
    NotInField(u64),
    #[error("invalid rational function: {0}")]
    InvalidRational(String),
    #[error("invalid context description: {0}")]
    Description(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Arithmetic needed by the generic polynomial routines.
pub trait FieldOps {
    type Elem: Copy + Eq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Number of elements.
    fn size(&self) -> u64;
    /// Element with canonical index `index < size()`.
    fn element(&self, index: u64) -> Self::Elem;
    fn index(&self, a: Self::Elem) -> u64;

    fn neg(&self, a: Self::Elem) -> Self::Elem {
        self.sub(self.zero(), a)
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
}

/// `F_p` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FfError> {
        if p >= 1 << 31 || !is_prime(&p.into()) {
            return Err(FfError::CompositeCharacteristic(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl FieldOps for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let (mut acc, mut b, mut e) = (1u64, a as u64, self.p as u64 - 2);
        let p = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        Some(acc as u32)
    }

    fn size(&self) -> u64 {
        self.p as u64
    }

    fn element(&self, index: u64) -> u32 {
        index as u32
    }

    fn index(&self, a: u32) -> u64 {
        a as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn f4_definition() {
        let ctx = build_ctx(2, 1, 2).unwrap();
        assert_eq!(ctx.modulus(), &[1, 1, 1]);
        assert_eq!(ctx.size(), 4);
        let g = ctx.generator();
        assert!(ctx.is_primitive(g).unwrap());
        assert!(ctx.is_primitive(ctx.mul(g, g)).unwrap());
        assert!(!ctx.is_primitive(FieldElement::ONE).unwrap());
        // Only the two generators are 3-free.
        let free: Vec<u64> = ctx
            .elements()
            .skip(1)
            .filter(|&a| ctx.is_u_free(a, 3).unwrap())
            .map(FieldElement::encoding)
            .collect();
        assert_eq!(free, vec![2, 3]);
    }

    #[test]
    fn f3_7_group_and_primitive_count() {
        let ctx = build_ctx(3, 1, 7).unwrap();
        assert_eq!(ctx.group_order().value(), &BigUint::from(2186u32));
        assert!(ctx.has_tables());
        let count = ctx
            .elements()
            .skip(1)
            .filter(|&a| ctx.is_primitive(a).unwrap())
            .count();
        assert_eq!(count, 1092);
        let g = ctx.generator();
        assert_eq!(ctx.order(g).unwrap(), 2186);
        assert!(ctx.elements().skip(1).take(g.encoding() as usize - 1).all(|a| !ctx.is_primitive(a).unwrap()));
    }

    #[test]
    fn f32_7_without_tables() {
        let ctx = build_ctx(2, 5, 7).unwrap();
        assert_eq!(ctx.q(), 32);
        assert!(!ctx.has_tables());
        assert_eq!(ctx.group_order().value(), &BigUint::from(34_359_738_367u64));
        let primes: Vec<String> = ctx.group_order().primes().map(|p| p.to_string()).collect();
        assert_eq!(primes, ["31", "71", "127", "122921"]);
        let g = ctx.generator();
        assert_eq!(ctx.order(g).unwrap(), 34_359_738_367);
        let a = ctx.element(123_456_789).unwrap();
        let b = ctx.element(987_654_321).unwrap();
        assert_eq!(ctx.trace_to_base(ctx.add(a, b)), ctx.add(ctx.trace_to_base(a), ctx.trace_to_base(b)));
        assert_eq!(ctx.trace_to_base(a), ctx.trace_by_frobenius(a));
        assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElement::ONE);
    }

    #[test]
    fn tables_invert_exp() {
        for (p, k, m) in [(2, 1, 8), (3, 2, 3), (5, 1, 4), (2, 3, 3)] {
            let ctx = build_ctx(p, k, m).unwrap();
            let n = ctx.size() - 1;
            for a in ctx.elements().skip(1) {
                let l = ctx.log(a).unwrap();
                assert!(l < n);
                assert_eq!(ctx.pow(ctx.generator(), l as u128), a);
            }
        }
    }

    #[test]
    fn tabled_and_untabled_agree() {
        let tabled = build_ctx(3, 2, 3).unwrap();
        let plain = FieldCtx::build(3, 2, 3, BuildOptions { dlog_limit: 0 }).unwrap();
        assert!(!plain.has_tables());
        assert_eq!(tabled.description(), plain.description());
        for a in tabled.elements().step_by(7) {
            for b in tabled.elements().step_by(11) {
                assert_eq!(tabled.mul(a, b), plain.mul(a, b));
                assert_eq!(tabled.add(a, b), plain.add(a, b));
                assert_eq!(tabled.sub(a, b), plain.sub(a, b));
            }
            if !a.is_zero() {
                assert_eq!(tabled.order(a).unwrap(), plain.order(a).unwrap());
                for u in [1, 2, 4, 7, 13, 26, 364, 728] {
                    assert_eq!(tabled.is_u_free(a, u).unwrap(), plain.is_u_free(a, u).unwrap());
                }
            }
        }
    }

    #[test]
    fn trace_of_zero_and_subfield() {
        let ctx = build_ctx(5, 2, 3).unwrap();
        assert_eq!(ctx.trace_to_base(FieldElement::ZERO), FieldElement::ZERO);
        let f = ctx.base();
        for c in 0..ctx.q() {
            let want = f.mul(f.from_int(ctx.m() as u64), c);
            assert_eq!(ctx.trace_value(ctx.embed(c)), want);
        }
    }

    /// Conjugates by repeated squaring-and-multiplying, independent of tables.
    fn frobenius_sum_oracle(ctx: &FieldCtx, a: FieldElement) -> FieldElement {
        let pow = |x: FieldElement, e: u64| {
            let (mut acc, mut b, mut e) = (FieldElement::ONE, x, e);
            while e > 0 {
                if e & 1 == 1 {
                    acc = ctx.mul(acc, b);
                }
                b = ctx.mul(b, b);
                e >>= 1;
            }
            acc
        };
        let mut acc = FieldElement::ZERO;
        let mut cur = a;
        for _ in 0..ctx.m() {
            acc = ctx.add(acc, cur);
            cur = pow(cur, ctx.q() as u64);
        }
        acc
    }

    #[test]
    fn trace_surjective_and_balanced() {
        for (p, k, m) in [(2, 1, 4), (2, 2, 3), (3, 1, 7), (3, 2, 2), (7, 1, 3), (2, 4, 4)] {
            let ctx = build_ctx(p, k, m).unwrap();
            let mut hits = vec![0u64; ctx.q() as usize];
            for a in ctx.elements() {
                hits[ctx.trace_value(a) as usize] += 1;
            }
            let each = (ctx.q() as u64).pow(m - 1);
            assert!(hits.iter().all(|&h| h == each), "p={p} k={k} m={m}");
        }
    }

    #[test]
    fn primitive_count_is_phi() {
        for (p, k, m) in [(2, 1, 6), (2, 2, 4), (5, 1, 3), (3, 3, 2), (2, 1, 11)] {
            let ctx = build_ctx(p, k, m).unwrap();
            let count = ctx.elements().skip(1).filter(|&a| ctx.is_primitive(a).unwrap()).count();
            assert_eq!(BigUint::from(count), ctx.group_order().euler_phi(), "p={p} k={k} m={m}");
            let n = ctx.size() - 1;
            for a in ctx.elements().skip(1) {
                assert_eq!(n % ctx.order(a).unwrap(), 0);
            }
            let u = n;
            for a in ctx.elements().skip(1) {
                assert_eq!(ctx.is_u_free(a, u).unwrap(), ctx.is_primitive(a).unwrap());
                assert!(ctx.is_u_free(a, 1).unwrap());
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(build_ctx(4, 1, 2), Err(FfError::CompositeCharacteristic(4))));
        assert!(matches!(build_ctx(2, 1, 0), Err(FfError::ZeroDegree)));
        assert!(matches!(build_ctx(2, 1, 70), Err(FfError::TooLarge(_))));
        let ctx = build_ctx(2, 1, 4).unwrap();
        assert!(matches!(ctx.is_primitive(FieldElement::ZERO), Err(FfError::ZeroElement)));
        assert!(matches!(ctx.is_u_free(FieldElement::ONE, 4), Err(FfError::NotDivisor { .. })));
        assert!(ctx.element(16).is_err());
    }

    #[test]
    fn description_roundtrip() {
        let ctx = build_ctx(3, 2, 3).unwrap();
        let json = serde_json::to_string(&ctx.description()).unwrap();
        let back: CtxDescription = serde_json::from_str(&json).unwrap();
        let again = FieldCtx::from_description(&back, BuildOptions::default()).unwrap();
        assert_eq!(again.description(), ctx.description());
        let mut bad = back.clone();
        bad.generator = 1;
        assert!(FieldCtx::from_description(&bad, BuildOptions::default()).is_err());
        let mut bad = back;
        bad.ext_poly = vec![0, 0, 0, 1];
        assert!(FieldCtx::from_description(&bad, BuildOptions::default()).is_err());
    }

    #[test]
    fn degree_two_count_over_f3_7() {
        use rayon::prelude::*;
        let ctx = build_ctx(3, 1, 7).unwrap();
        let q = ctx.size();
        // Split by constant term; c0 = 0 is always reducible.
        let count: usize = (1..q)
            .into_par_iter()
            .map(|c0| {
                (0..q)
                    .filter(|&c1| {
                        let p = [ctx.element(c0).unwrap(), ctx.element(c1).unwrap(), FieldElement::ONE];
                        poly::is_irreducible(&ctx, &p)
                    })
                    .count()
            })
            .sum();
        assert_eq!(count, 2_390_391);
    }

    proptest! {
        #[test]
        fn trace_linear_and_frobenius_invariant(a in 0u64..2187, b in 0u64..2187) {
            let ctx = F3_7.with(|c| c.clone());
            let (a, b) = (ctx.element(a).unwrap(), ctx.element(b).unwrap());
            prop_assert_eq!(ctx.trace_to_base(ctx.add(a, b)), ctx.add(ctx.trace_to_base(a), ctx.trace_to_base(b)));
            prop_assert_eq!(ctx.trace_to_base(ctx.frobenius(a)), ctx.trace_to_base(a));
            prop_assert_eq!(ctx.trace_to_base(a), frobenius_sum_oracle(&ctx, a));
        }

        #[test]
        fn u_free_multiplicative_on_coprime(a in 1u64..4096, i in 0usize..8, j in 0usize..8) {
            // 2^12 - 1 = 3^2 · 5 · 7 · 13
            let divisors = [1u64, 3, 5, 7, 9, 13, 35, 63];
            let (u, v) = (divisors[i], divisors[j]);
            prop_assume!(num_integer::gcd(u, v) == 1);
            let ctx = F2_12.with(|c| c.clone());
            let a = ctx.element(a).unwrap();
            prop_assert_eq!(
                ctx.is_u_free(a, u * v).unwrap(),
                ctx.is_u_free(a, u).unwrap() && ctx.is_u_free(a, v).unwrap()
            );
        }

        #[test]
        fn field_laws(a in 0u64..3125, b in 0u64..3125, c in 0u64..3125) {
            let ctx = F5_5.with(|c| c.clone());
            let (a, b, c) = (ctx.element(a).unwrap(), ctx.element(b).unwrap(), ctx.element(c).unwrap());
            prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
            prop_assert_eq!(ctx.sub(ctx.add(a, b), b), a);
            if !a.is_zero() {
                prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    thread_local! {
        static F3_7: FieldCtx = build_ctx(3, 1, 7).unwrap();
        static F2_12: FieldCtx = build_ctx(2, 1, 12).unwrap();
        static F5_5: FieldCtx = build_ctx(5, 1, 5).unwrap();
    }
}
