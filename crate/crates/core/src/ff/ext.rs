//! `F_{q^m} = F_q[x]/(h)` over a tabled base field.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::poly;
use super::subfield::{SubField, SubFieldDescription};
use super::{FfError, FieldOps};
use crate::arith::{factor_u128, FactoredInteger};

/// Discrete-log tables are built only up to this many elements.
pub const DLOG_LIMIT: u64 = 1 << 22;
/// Elements are packed into a `u64`; larger fields are refused.
pub const FIELD_LIMIT: u64 = 1 << 62;

/// An element of `F_{q^m}` by its canonical encoding `Σ c_j q^j`, each
/// `c_j ∈ F_q` itself encoded as `Σ d_i p^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn encoding(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Callers must keep `encoding < q^m` for the context in use.
    pub fn from_encoding_unchecked(encoding: u64) -> Self {
        FieldElement(encoding)
    }
}

#[derive(Clone, Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `log(1 + g^i)` for odd `p`; `NONE` where `1 + g^i = 0`.
    zech: Vec<u32>,
}

const NONE: u32 = u32::MAX;

/// Replayable description of a context.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CtxDescription {
    pub p: u32,
    pub k: u32,
    pub m: u32,
    pub base_poly: Vec<u32>,
    /// Coefficients of the degree-`m` modulus over `F_q`, low degree first.
    pub ext_poly: Vec<u32>,
    pub generator: u64,
}

#[derive(Clone, Debug)]
pub struct FieldCtx {
    sub: SubField,
    m: u32,
    size: u64,
    modulus: Vec<u32>,
    generator: FieldElement,
    group_order: FactoredInteger,
    order_primes: Vec<u64>,
    trace_basis: Vec<u32>,
    tables: Option<Tables>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub dlog_limit: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            dlog_limit: DLOG_LIMIT,
        }
    }
}

pub fn build_ctx(p: u32, k: u32, m: u32) -> Result<FieldCtx, FfError> {
    FieldCtx::build(p, k, m, BuildOptions::default())
}

impl FieldCtx {
    pub fn build(p: u32, k: u32, m: u32, opts: BuildOptions) -> Result<Self, FfError> {
        let sub = SubField::new(p, k)?;
        if m == 0 {
            return Err(FfError::ZeroDegree);
        }
        check_size(sub.q(), m)?;
        let modulus = poly::irreducibles(&sub, m as usize)
            .next()
            .expect("irreducibles exist in every degree");
        Self::assemble(sub, m, modulus, None, opts)
    }

    pub fn from_description(d: &CtxDescription, opts: BuildOptions) -> Result<Self, FfError> {
        let sub = SubField::from_description(&SubFieldDescription {
            p: d.p,
            k: d.k,
            poly: d.base_poly.clone(),
        })?;
        if d.m == 0 {
            return Err(FfError::ZeroDegree);
        }
        check_size(sub.q(), d.m)?;
        if d.ext_poly.len() != d.m as usize + 1
            || d.ext_poly.iter().any(|&c| c >= sub.q())
            || !poly::is_monic(&sub, &d.ext_poly)
            || !poly::is_irreducible(&sub, &d.ext_poly)
        {
            return Err(FfError::NotIrreducible(format!("{:?} over F_{}", d.ext_poly, sub.q())));
        }
        Self::assemble(sub, d.m, d.ext_poly.clone(), Some(FieldElement(d.generator)), opts)
    }

    fn assemble(
        sub: SubField,
        m: u32,
        modulus: Vec<u32>,
        generator: Option<FieldElement>,
        opts: BuildOptions,
    ) -> Result<Self, FfError> {
        let size = (sub.q() as u64).pow(m);
        let group_order = factor_u128(size as u128 - 1)?;
        let order_primes: Vec<u64> = group_order.primes().map(|r| r.to_u64().unwrap()).collect();
        let mut ctx = FieldCtx {
            sub,
            m,
            size,
            modulus,
            generator: FieldElement::ONE,
            group_order,
            order_primes,
            trace_basis: Vec::new(),
            tables: None,
        };
        ctx.generator = match generator {
            Some(g) => {
                if g.0 >= size || g.is_zero() || !ctx.is_primitive(g)? {
                    return Err(FfError::Description(format!("generator {} is not primitive", g.0)));
                }
                g
            }
            None => (1..size)
                .map(FieldElement)
                .find(|&a| ctx.is_primitive(a).expect("nonzero"))
                .expect("cyclic group has a generator"),
        };
        ctx.trace_basis = (0..m)
            .map(|j| {
                let xj = ctx.from_coeffs(&unit(m, j as usize));
                let t = ctx.trace_by_frobenius(xj);
                assert!(t.0 < ctx.sub.q() as u64, "trace left the base field");
                t.0 as u32
            })
            .collect();
        if size <= opts.dlog_limit {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let n = (self.size - 1) as usize;
        let mul_g = self.mul_by_const_table(self.generator);
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![NONE; self.size as usize];
        let mut cur = FieldElement::ONE;
        for i in 0..n {
            exp.push(cur.0 as u32);
            log[cur.0 as usize] = i as u32;
            cur = self.apply_const_table(&mul_g, cur);
        }
        assert_eq!(cur, FieldElement::ONE, "generator order mismatch");
        let zech = if self.p() == 2 {
            Vec::new()
        } else {
            exp.iter()
                .map(|&e| log[self.add_slow(FieldElement::ONE, FieldElement(e as u64)).0 as usize])
                .collect()
        };
        Tables { exp, log, zech }
    }

    /// `T[j][c] = c · x^j · g` for multiplying by a fixed `g`.
    fn mul_by_const_table(&self, g: FieldElement) -> Vec<Vec<FieldElement>> {
        let q = self.sub.q();
        (0..self.m)
            .map(|j| {
                let base = self.mul_slow(g, self.from_coeffs(&unit(self.m, j as usize)));
                (0..q).map(|c| self.scale_slow(base, c)).collect()
            })
            .collect()
    }

    fn apply_const_table(&self, t: &[Vec<FieldElement>], a: FieldElement) -> FieldElement {
        let q = self.sub.q() as u64;
        let mut rest = a.0;
        let mut acc = FieldElement::ZERO;
        for row in t {
            let c = rest % q;
            rest /= q;
            if c != 0 {
                acc = self.add_slow(acc, row[c as usize]);
            }
        }
        acc
    }

    pub fn description(&self) -> CtxDescription {
        CtxDescription {
            p: self.p(),
            k: self.k(),
            m: self.m,
            base_poly: self.sub.poly().to_vec(),
            ext_poly: self.modulus.clone(),
            generator: self.generator.0,
        }
    }

    pub fn base(&self) -> &SubField {
        &self.sub
    }

    pub fn p(&self) -> u32 {
        self.sub.p()
    }

    pub fn k(&self) -> u32 {
        self.sub.k()
    }

    pub fn q(&self) -> u32 {
        self.sub.q()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `q^m`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Factorization of `q^m - 1`.
    pub fn group_order(&self) -> &FactoredInteger {
        &self.group_order
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn element(&self, encoding: u64) -> Result<FieldElement, FfError> {
        if encoding >= self.size {
            return Err(FfError::NotInField(encoding));
        }
        Ok(FieldElement(encoding))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size).map(FieldElement)
    }

    /// `c ∈ F_q` as a constant of `F_{q^m}`.
    pub fn embed(&self, c: u32) -> FieldElement {
        debug_assert!(c < self.sub.q());
        FieldElement(c as u64)
    }

    /// The base-field value of an element lying in `F_q`.
    pub fn as_base(&self, a: FieldElement) -> Option<u32> {
        (a.0 < self.sub.q() as u64).then_some(a.0 as u32)
    }

    /// Coordinates `(c_0, ..., c_{m-1})` in the polynomial basis.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let q = self.sub.q() as u64;
        let mut rest = a.0;
        (0..self.m)
            .map(|_| {
                let c = rest % q;
                rest /= q;
                c as u32
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> FieldElement {
        debug_assert!(c.len() <= self.m as usize);
        let q = self.sub.q() as u64;
        FieldElement(c.iter().rev().fold(0u64, |acc, &x| acc * q + x as u64))
    }

    /// The class of `x`.
    pub fn x(&self) -> FieldElement {
        if self.m == 1 {
            // x ≡ -c_0 when the modulus is x + c_0.
            return FieldElement(self.sub.neg(self.modulus[0]) as u64);
        }
        FieldElement(self.sub.q() as u64)
    }

    /// Digit-wise addition of the base-`p` encodings.
    fn add_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p() as u64;
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 || y > 0 {
            let d = x % p + y % p;
            out += if d >= p { d - p } else { d } * place;
            x /= p;
            y /= p;
            place = place.saturating_mul(p);
        }
        FieldElement(out)
    }

    fn scale_slow(&self, a: FieldElement, c: u32) -> FieldElement {
        let s: Vec<u32> = self.coeffs(a).iter().map(|&x| self.sub.mul(x, c)).collect();
        self.from_coeffs(&s)
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let m = self.m as usize;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let f = &self.sub;
        let mut t = vec![0u32; 2 * m - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                t[i + j] = f.add(t[i + j], f.mul(x, y));
            }
        }
        for i in (m..2 * m - 1).rev() {
            let c = t[i];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                t[i - m + j] = f.sub(t[i - m + j], f.mul(c, self.modulus[j]));
            }
        }
        self.from_coeffs(&t[..m])
    }

    fn pow_slow(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let (mut acc, mut b) = (FieldElement::ONE, a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_slow(b, b);
            }
        }
        acc
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p() == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let Some(t) = &self.tables else {
            return self.add_slow(a, b);
        };
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let n = (self.size - 1) as u32;
        let (la, lb) = (t.log[a.0 as usize], t.log[b.0 as usize]);
        let d = if lb >= la { lb - la } else { lb + n - la };
        match t.zech[d as usize] {
            NONE => FieldElement::ZERO,
            z => FieldElement(t.exp[((la as u64 + z as u64) % n as u64) as usize] as u64),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.p() as u64;
        if p == 2 || a.is_zero() {
            return a;
        }
        if let Some(t) = &self.tables {
            // -1 = g^((q^m - 1)/2) for odd characteristic.
            let n = self.size - 1;
            let l = (t.log[a.0 as usize] as u64 + n / 2) % n;
            return FieldElement(t.exp[l as usize] as u64);
        }
        let (mut x, mut out, mut place) = (a.0, 0u64, 1u64);
        while x > 0 {
            let d = x % p;
            out += if d == 0 { 0 } else { p - d } * place;
            x /= p;
            place = place.saturating_mul(p);
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let Some(t) = &self.tables else {
            return self.mul_slow(a, b);
        };
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let n = (self.size - 1) as u32;
        let s = t.log[a.0 as usize] + t.log[b.0 as usize];
        FieldElement(t.exp[(if s >= n { s - n } else { s }) as usize] as u64)
    }

    pub fn pow(&self, a: FieldElement, e: u128) -> FieldElement {
        if a.is_zero() {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let Some(t) = &self.tables else {
            return self.pow_slow(a, e);
        };
        let n = (self.size - 1) as u128;
        let l = (t.log[a.0 as usize] as u128 * (e % n)) % n;
        FieldElement(t.exp[l as usize] as u64)
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        Some(self.pow(a, self.size as u128 - 2))
    }

    /// `log_g(a)` when tables exist; `None` at zero or without tables.
    pub fn log(&self, a: FieldElement) -> Option<u64> {
        let t = self.tables.as_ref()?;
        let l = t.log[a.0 as usize];
        (l != NONE).then_some(l as u64)
    }

    pub fn exp(&self, i: u64) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.exp[(i % (self.size - 1)) as usize] as u64),
            None => self.pow(self.generator, i as u128),
        }
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.sub.q() as u128)
    }

    /// `Σ_{i<m} a^(q^i)` by repeated Frobenius.
    pub fn trace_by_frobenius(&self, a: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut cur = a;
        for _ in 0..self.m {
            acc = self.add_slow(acc, cur);
            cur = self.pow_slow(cur, self.sub.q() as u128);
        }
        acc
    }

    /// `Tr_{F_{q^m}/F_q}(a)` as a base-field value, via the traces of the
    /// basis monomials.
    pub fn trace_value(&self, a: FieldElement) -> u32 {
        let q = self.sub.q() as u64;
        let mut rest = a.0;
        let mut acc = 0u32;
        for &t in &self.trace_basis {
            let c = (rest % q) as u32;
            rest /= q;
            if c != 0 {
                acc = self.sub.add(acc, self.sub.mul(c, t));
            }
        }
        acc
    }

    /// Trace as a degree-0 element.
    pub fn trace_to_base(&self, a: FieldElement) -> FieldElement {
        self.embed(self.trace_value(a))
    }

    /// Multiplicative order by dividing out the primes of `q^m - 1`.
    pub fn order(&self, a: FieldElement) -> Result<u64, FfError> {
        if a.is_zero() {
            return Err(FfError::ZeroElement);
        }
        let n = self.size - 1;
        if let Some(l) = self.log(a) {
            return Ok(n / num_integer::gcd(n, l));
        }
        let mut ord = n;
        for (r, _) in self.group_order.factors() {
            let r = r.to_u64().unwrap();
            while ord % r == 0 && self.pow(a, (ord / r) as u128) == FieldElement::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    pub fn is_primitive(&self, a: FieldElement) -> Result<bool, FfError> {
        if a.is_zero() {
            return Err(FfError::ZeroElement);
        }
        let n = self.size - 1;
        if let Some(l) = self.log(a) {
            return Ok(num_integer::gcd(n, l) == 1);
        }
        Ok(self
            .order_primes
            .iter()
            .all(|&r| self.pow(a, (n / r) as u128) != FieldElement::ONE))
    }

    /// No prime `r | u` makes `a` an `r`-th power.
    pub fn is_u_free(&self, a: FieldElement, u: u64) -> Result<bool, FfError> {
        if a.is_zero() {
            return Err(FfError::ZeroElement);
        }
        let n = self.size - 1;
        if u == 0 || n % u != 0 {
            return Err(FfError::NotDivisor { u, order: n });
        }
        let log = self.log(a);
        Ok(self.order_primes.iter().filter(|&&r| u % r == 0).all(|&r| match log {
            Some(l) => l % r != 0,
            None => self.pow(a, (n / r) as u128) != FieldElement::ONE,
        }))
    }
}

fn unit(m: u32, j: usize) -> Vec<u32> {
    let mut v = vec![0u32; m as usize];
    v[j] = 1;
    v
}

fn check_size(q: u32, m: u32) -> Result<(), FfError> {
    match (q as u64).checked_pow(m) {
        Some(s) if s <= FIELD_LIMIT => Ok(()),
        _ => Err(FfError::TooLarge(format!("{q}^{m} exceeds the field limit"))),
    }
}

impl FieldOps for FieldCtx {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldCtx::add(self, a, b)
    }

    fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldCtx::sub(self, a, b)
    }

    fn neg(&self, a: FieldElement) -> FieldElement {
        FieldCtx::neg(self, a)
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldCtx::mul(self, a, b)
    }

    fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        FieldCtx::inv(self, a)
    }

    fn size(&self) -> u64 {
        self.size
    }

    fn element(&self, index: u64) -> FieldElement {
        FieldElement(index)
    }

    fn index(&self, a: FieldElement) -> u64 {
        a.0
    }
}
