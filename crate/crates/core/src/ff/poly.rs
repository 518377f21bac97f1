//! Dense univariate polynomials over any [`FieldOps`] field.
//!
//! Coefficients are stored low degree first with no trailing zeros; the
//! zero polynomial is the empty vector.

use super::FieldOps;

pub type Poly<E> = Vec<E>;

pub fn trim<F: FieldOps>(f: &F, p: &mut Poly<F::Elem>) {
    while p.last().is_some_and(|&c| f.is_zero(c)) {
        p.pop();
    }
}

/// `None` for the zero polynomial.
pub fn degree<E>(p: &[E]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn is_monic<F: FieldOps>(f: &F, p: &[F::Elem]) -> bool {
    p.last().is_some_and(|&c| c == f.one())
}

/// The polynomial `x`.
pub fn x<F: FieldOps>(f: &F) -> Poly<F::Elem> {
    vec![f.zero(), f.one()]
}

pub fn add<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let mut out: Poly<F::Elem> = (0..n)
        .map(|i| {
            let ai = a.get(i).copied().unwrap_or(f.zero());
            let bi = b.get(i).copied().unwrap_or(f.zero());
            f.add(ai, bi)
        })
        .collect();
    trim(f, &mut out);
    out
}

pub fn sub<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let mut out: Poly<F::Elem> = (0..n)
        .map(|i| {
            let ai = a.get(i).copied().unwrap_or(f.zero());
            let bi = b.get(i).copied().unwrap_or(f.zero());
            f.sub(ai, bi)
        })
        .collect();
    trim(f, &mut out);
    out
}

pub fn scale<F: FieldOps>(f: &F, a: &[F::Elem], c: F::Elem) -> Poly<F::Elem> {
    let mut out: Poly<F::Elem> = a.iter().map(|&ai| f.mul(ai, c)).collect();
    trim(f, &mut out);
    out
}

pub fn mul<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if f.is_zero(ai) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    trim(f, &mut out);
    out
}

/// Quotient and remainder; panics on a zero divisor.
pub fn div_rem<F: FieldOps>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut r: Poly<F::Elem> = a.to_vec();
    trim(f, &mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut qt = vec![f.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        let c = f.mul(r[i], lead_inv);
        if f.is_zero(c) {
            continue;
        }
        qt[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i - db + j] = f.sub(r[i - db + j], f.mul(c, bj));
        }
    }
    r.truncate(db);
    trim(f, &mut r);
    trim(f, &mut qt);
    (qt, r)
}

pub fn rem<F: FieldOps>(f: &F, a: &[F::Elem], m: &[F::Elem]) -> Poly<F::Elem> {
    div_rem(f, a, m).1
}

pub fn mul_mod<F: FieldOps>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
    m: &[F::Elem],
) -> Poly<F::Elem> {
    rem(f, &mul(f, a, b), m)
}

pub fn pow_mod<F: FieldOps>(f: &F, base: &[F::Elem], mut e: u128, m: &[F::Elem]) -> Poly<F::Elem> {
    let mut result = rem(f, &[f.one()], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(f, &result, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = mul_mod(f, &b, &b, m);
        }
    }
    result
}

pub fn make_monic<F: FieldOps>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(&lead) => scale(f, a, f.inv(lead).expect("nonzero leading coefficient")),
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: FieldOps>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(f, &mut a);
    trim(f, &mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    make_monic(f, &a)
}

pub fn eval<F: FieldOps>(f: &F, p: &[F::Elem], x: F::Elem) -> F::Elem {
    p.iter().rev().fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
}

/// Rabin's test over a field of size `Q`: for degree at most 3 a poly is
/// irreducible iff it has no root, i.e. `gcd(x^Q - x, p) = 1`; otherwise
/// `x^(Q^d) ≡ x` and `gcd(x^(Q^(d/r)) - x, p) = 1` for each prime `r | d`.
pub fn is_irreducible<F: FieldOps>(f: &F, p: &[F::Elem]) -> bool {
    let Some(d) = degree(p) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if f.is_zero(p[0]) {
        return false;
    }
    let q = f.size() as u128;
    let xp = x(f);
    let frob = |h: &Poly<F::Elem>| pow_mod(f, h, q, p);
    let mut powers = Vec::with_capacity(d);
    let mut h = frob(&xp);
    powers.push(h.clone());
    let coprime_to = |h: &Poly<F::Elem>| gcd(f, &sub(f, h, &xp), p).len() == 1;
    if d <= 3 {
        return coprime_to(&h);
    }
    for _ in 1..d {
        h = frob(&h);
        powers.push(h.clone());
    }
    if sub(f, &powers[d - 1], &rem(f, &xp, p)).iter().any(|&c| !f.is_zero(c)) {
        return false;
    }
    prime_divisors(d)
        .into_iter()
        .all(|r| coprime_to(&powers[d / r - 1]))
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = 2;
    while r * r <= n {
        if n % r == 0 {
            out.push(r);
            while n % r == 0 {
                n /= r;
            }
        }
        r += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Monic polynomials of degree `d` in lexicographic order of
/// `(c_0, c_1, ..., c_{d-1})`, each coefficient ordered by its canonical
/// index. For `d >= 2` the block with `c_0 = 0` is skipped since every such
/// polynomial is divisible by `x`.
pub fn monic_candidates<F: FieldOps>(f: &F, d: usize) -> impl Iterator<Item = Poly<F::Elem>> + '_ {
    let q = f.size() as u128;
    let total = q.checked_pow(d as u32).expect("candidate space fits in u128");
    let start = if d >= 2 { total / q } else { 0 };
    (start..total).map(move |mut idx| {
        let mut coeffs = vec![f.zero(); d + 1];
        for i in (0..d).rev() {
            coeffs[i] = f.element((idx % q) as u64);
            idx /= q;
        }
        coeffs[d] = f.one();
        coeffs
    })
}

/// Monic irreducibles of degree `d` in the order of [`monic_candidates`].
pub fn irreducibles<F: FieldOps>(f: &F, d: usize) -> impl Iterator<Item = Poly<F::Elem>> + '_ {
    monic_candidates(f, d).filter(move |p| is_irreducible(f, p))
}

#[cfg(test)]
mod tests {
    use super::super::PrimeField;
    use super::*;

    #[test]
    fn division_identity() {
        let f = PrimeField::new(7).unwrap();
        let a = vec![3, 0, 5, 1, 6];
        let b = vec![2, 1, 4];
        let (q, r) = div_rem(&f, &a, &b);
        assert!(r.len() < b.len());
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = PrimeField::new(5).unwrap();
        let g = vec![1, 1]; // x + 1
        let a = mul(&f, &g, &[2, 0, 1]);
        let b = mul(&f, &g, &[3, 1]);
        assert_eq!(gcd(&f, &a, &b), g);
        assert_eq!(gcd(&f, &[1, 1], &[2, 1]), vec![1]);
    }

    #[test]
    fn irreducible_counts_over_f2() {
        // Necklace counts: 2, 1, 2, 3, 6, 9.
        let f = PrimeField::new(2).unwrap();
        let counts: Vec<usize> = (1..=6).map(|d| irreducibles(&f, d).count()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        assert_eq!(irreducibles(&f, 2).next().unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn irreducible_counts_over_f3() {
        let f = PrimeField::new(3).unwrap();
        let counts: Vec<usize> = (1..=5).map(|d| irreducibles(&f, d).count()).collect();
        assert_eq!(counts, vec![3, 3, 8, 18, 48]);
    }

    #[test]
    fn product_of_irreducibles_is_reducible() {
        let f = PrimeField::new(2).unwrap();
        // (x^2+x+1)^2 = x^4+x^2+1 has no roots but is reducible.
        assert!(!is_irreducible(&f, &[1, 0, 1, 0, 1]));
        assert!(is_irreducible(&f, &[1, 1, 0, 0, 1]));
    }
}
