//! The base field `F_q = F_p[y]/(g)` with exp/log tables.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::poly::{self, Poly};
use super::{FfError, FieldOps, PrimeField};
use crate::arith::factor_u128;

/// Largest `q` for which base-field tables are built.
pub const SUBFIELD_LIMIT: u64 = 1 << 24;

/// `F_q` with elements encoded as `Σ c_i p^i`.
#[derive(Clone, Debug)]
pub struct SubField {
    p: u32,
    k: u32,
    q: u32,
    poly: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `log(1 + g^i)`, `NONE` when `1 + g^i = 0`. Only for odd `p`, `k > 1`.
    zech: Vec<u32>,
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SubFieldDescription {
    pub p: u32,
    pub k: u32,
    pub poly: Vec<u32>,
}

impl SubField {
    /// `F_{p^k}` defined by the lexicographically smallest monic irreducible.
    pub fn new(p: u32, k: u32) -> Result<Self, FfError> {
        let fp = PrimeField::new(p)?;
        check_size(p, k)?;
        let poly = poly::irreducibles(&fp, k as usize)
            .next()
            .expect("irreducibles exist in every degree");
        Self::with_poly(p, k, poly)
    }

    pub fn with_poly(p: u32, k: u32, poly: Vec<u32>) -> Result<Self, FfError> {
        let fp = PrimeField::new(p)?;
        check_size(p, k)?;
        if poly.len() != k as usize + 1
            || !poly::is_monic(&fp, &poly)
            || poly.iter().any(|&c| c >= p)
            || !poly::is_irreducible(&fp, &poly)
        {
            return Err(FfError::NotIrreducible(format!("{poly:?} over F_{p}")));
        }
        let q = p.pow(k);
        let encode = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &c| acc * p + c);
        let decode = |mut e: u32| -> Poly<u32> {
            let mut v = Vec::with_capacity(k as usize);
            for _ in 0..k {
                v.push(e % p);
                e /= p;
            }
            poly::trim(&fp, &mut v);
            v
        };
        let slow_mul = |a: u32, b: u32| encode(&poly::mul_mod(&fp, &decode(a), &decode(b), &poly));
        let group = factor_u128(q as u128 - 1).expect("small integers factor");
        let cofactors: Vec<u32> = group
            .primes()
            .map(|r| ((q - 1) as u64 / r.to_u64().unwrap()) as u32)
            .collect();
        let slow_pow = |a: u32, mut e: u32| {
            let (mut acc, mut b) = (1u32, a);
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let g = (1..q)
            .find(|&a| cofactors.iter().all(|&c| slow_pow(a, c) != 1))
            .expect("cyclic group has a generator");
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![NONE; q as usize];
        let mut cur = 1u32;
        for i in 0..q - 1 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = slow_mul(cur, g);
        }
        debug_assert_eq!(cur, 1);
        let mut field = SubField {
            p,
            k,
            q,
            poly,
            exp,
            log,
            zech: Vec::new(),
        };
        if p != 2 && k > 1 {
            field.zech = (0..q - 1)
                .map(|i| {
                    let s = field.digit_add(1, field.exp[i as usize]);
                    field.log[s as usize]
                })
                .collect();
        }
        Ok(field)
    }

    pub fn from_description(d: &SubFieldDescription) -> Result<Self, FfError> {
        Self::with_poly(d.p, d.k, d.poly.clone())
    }

    pub fn description(&self) -> SubFieldDescription {
        SubFieldDescription {
            p: self.p,
            k: self.k,
            poly: self.poly.clone(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    /// Discrete log to the table generator; `None` at zero.
    pub fn log(&self, a: u32) -> Option<u32> {
        let l = self.log[a as usize];
        (l != NONE).then_some(l)
    }

    pub fn exp(&self, i: u64) -> u32 {
        self.exp[(i % (self.q as u64 - 1)) as usize]
    }

    fn digit_add(&self, mut a: u32, mut b: u32) -> u32 {
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    /// Absolute trace `F_q → F_p`, as an integer in `0..p`.
    pub fn absolute_trace(&self, a: u32) -> u32 {
        let mut acc = 0u32;
        let mut cur = a;
        for _ in 0..self.k {
            acc = self.add(acc, cur);
            cur = self.pow(cur, self.p as u64);
        }
        debug_assert!(acc < self.p);
        acc
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.q as u64 - 1;
        self.exp((self.log[a as usize] as u64 * (e % n)) % n)
    }

    /// `c · 1` for an integer `c`, reduced mod `p`.
    pub fn from_int(&self, c: u64) -> u32 {
        (c % self.p as u64) as u32
    }
}

fn check_size(p: u32, k: u32) -> Result<(), FfError> {
    if k == 0 {
        return Err(FfError::ZeroDegree);
    }
    match (p as u64).checked_pow(k) {
        Some(q) if q <= SUBFIELD_LIMIT => Ok(()),
        _ => Err(FfError::TooLarge(format!("{p}^{k} exceeds the base-field limit"))),
    }
}

impl FieldOps for SubField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let (la, lb) = (self.log[a as usize], self.log[b as usize]);
        let n = self.q - 1;
        let d = if lb >= la { lb - la } else { lb + n - la };
        match self.zech[d as usize] {
            NONE => 0,
            z => self.exp[((la as u64 + z as u64) % n as u64) as usize],
        }
    }

    fn neg(&self, a: u32) -> u32 {
        if self.p == 2 || a == 0 {
            return a;
        }
        if self.k == 1 {
            return self.p - a;
        }
        // -1 = g^((q-1)/2) for odd q.
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + n / 2) % n) as usize]
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let n = self.q - 1;
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    fn size(&self) -> u64 {
        self.q as u64
    }

    fn element(&self, index: u64) -> u32 {
        index as u32
    }

    fn index(&self, a: u32) -> u64 {
        a as u64
    }
}
