//! Montgomery arithmetic modulo an odd `u128` below 2^127.
//!
//! All residues are kept in Montgomery form `x·R mod n` with `R = 2^128`.
//! The bound on `n` keeps every intermediate sum inside 256 bits.

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64 as u128, a >> 64);
    let (b0, b1) = (b as u64 as u128, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 as u64 as u128) + (p10 as u64 as u128);
    let lo = (p00 as u64 as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (lo, hi)
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mont {
    n: u128,
    n_neg_inv: u128,
    r2: u128,
    one: u128,
}

impl Mont {
    pub(crate) fn new(n: u128) -> Self {
        assert!(n % 2 == 1 && n > 1 && n < (1u128 << 127), "modulus out of range");
        // Newton iteration for n^{-1} mod 2^128.
        let mut inv: u128 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r1 = (u128::MAX % n + 1) % n;
        // R^2 mod n by doubling R mod n 128 times.
        let mut r2 = r1;
        for _ in 0..128 {
            r2 <<= 1;
            if r2 >= n {
                r2 -= n;
            }
        }
        Mont {
            n,
            n_neg_inv: inv.wrapping_neg(),
            r2,
            one: r1,
        }
    }

    #[inline]
    fn redc(&self, lo: u128, hi: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mlo, mhi) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(mlo);
        let t = hi + mhi + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        let (lo, hi) = mul_wide(a, b);
        self.redc(lo, hi)
    }

    #[inline]
    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.n - b
        }
    }

    #[inline]
    pub(crate) fn one(&self) -> u128 {
        self.one
    }

    pub(crate) fn to_mont(&self, x: u128) -> u128 {
        self.mul(x % self.n, self.r2)
    }

    #[cfg(test)]
    pub(crate) fn from_mont(&self, x: u128) -> u128 {
        self.redc(x, 0)
    }

    pub(crate) fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut acc = self.one;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}
