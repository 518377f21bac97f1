//! Multiplicative and additive characters of `F_{q^m}`, the indicator
//! functions for `u`-free elements and prescribed traces, and the
//! character-sum expression for the number of qualifying `α`.
//!
//! Values are `Complex64` built from precomputed roots of unity. All
//! operations need the discrete-log tables of the field.

use num_complex::Complex64;
use num_integer::Integer;
use thiserror::Error;

use crate::ff::{eval_rational, Evaluation, FfError, FieldCtx, FieldElement, FieldOps, RationalFunction};

pub type ComplexVal = Complex64;

#[derive(Debug, Error)]
pub enum CharError {
    #[error("character sums need discrete-log tables (field of size {0} has none)")]
    NoTables(u64),
    #[error("{d} does not divide the group order {order}")]
    NotDivisor { d: u64, order: u64 },
    #[error("zero has no character value")]
    ZeroElement,
    #[error("{0} is not an element of the base field")]
    NotInBase(u32),
    #[error(transparent)]
    Ff(#[from] FfError),
}

/// `ε = 10⁻⁶ · summands`.
pub fn tolerance(summands: usize) -> f64 {
    1e-6 * summands.max(1) as f64
}

/// `χ(x) = exp(2πi · exponent · log(x) / (q^m - 1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultChar {
    exponent: u64,
    order: u64,
}

impl MultChar {
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}

/// Additive character `ψ_u(y) = ψ₀(u · y)` of `F_q` for a fixed `u ∈ F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AddChar {
    u: u32,
}

impl AddChar {
    pub fn u(&self) -> u32 {
        self.u
    }
}

/// Character machinery bound to one field.
pub struct Characters<'a> {
    ctx: &'a FieldCtx,
    n: u64,
    roots: Vec<Complex64>,
    /// `ψ₀(x)` for each `x ∈ F_q`.
    psi0: Vec<Complex64>,
}

fn unit_root(k: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

impl<'a> Characters<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Result<Self, CharError> {
        if !ctx.has_tables() {
            return Err(CharError::NoTables(ctx.size()));
        }
        let n = ctx.size() - 1;
        let roots = (0..n).map(|k| unit_root(k, n)).collect();
        let p = ctx.p() as u64;
        let psi0 = (0..ctx.q())
            .map(|x| unit_root(ctx.base().absolute_trace(x) as u64, p))
            .collect();
        Ok(Characters { ctx, n, roots, psi0 })
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.ctx
    }

    fn check_divisor(&self, d: u64) -> Result<(), CharError> {
        if d == 0 || self.n % d != 0 {
            return Err(CharError::NotDivisor { d, order: self.n });
        }
        Ok(())
    }

    pub fn trivial(&self) -> MultChar {
        MultChar { exponent: 0, order: 1 }
    }

    pub fn mult_char(&self, exponent: u64) -> MultChar {
        let e = exponent % self.n;
        MultChar {
            exponent: e,
            order: self.n / self.n.gcd(&e),
        }
    }

    /// The `φ(d)` characters of exact order `d`, ascending by exponent.
    pub fn all_chars_of_order(&self, d: u64) -> Result<Vec<MultChar>, CharError> {
        self.check_divisor(d)?;
        let step = self.n / d;
        Ok((0..d)
            .filter(|j| j.gcd(&d) == 1)
            .map(|j| MultChar {
                exponent: j * step,
                order: d,
            })
            .collect())
    }

    pub fn eval_mult(&self, chi: MultChar, x: FieldElement) -> Result<Complex64, CharError> {
        let l = self.ctx.log(x).ok_or(CharError::ZeroElement)?;
        Ok(self.roots[((chi.exponent as u128 * l as u128) % self.n as u128) as usize])
    }

    fn eval_mult_log(&self, chi: MultChar, l: u64) -> Complex64 {
        self.roots[((chi.exponent as u128 * l as u128) % self.n as u128) as usize]
    }

    /// `ψ₀(x) = exp(2πi · Tr_{F_q/F_p}(x) / p)`.
    pub fn psi0(&self, x: u32) -> Result<Complex64, CharError> {
        self.psi0.get(x as usize).copied().ok_or(CharError::NotInBase(x))
    }

    pub fn additive_chars(&self) -> Vec<AddChar> {
        (0..self.ctx.q()).map(|u| AddChar { u }).collect()
    }

    pub fn eval_add(&self, psi: AddChar, x: u32) -> Result<Complex64, CharError> {
        self.psi0(self.ctx.base().mul(psi.u, x))
    }

    /// `ψ̂₀(y) = ψ₀(Tr_{F_{q^m}/F_q}(y))`.
    pub fn psi_hat(&self, y: FieldElement) -> Complex64 {
        self.psi0[self.ctx.trace_value(y) as usize]
    }

    fn primes_of(&self, u: u64) -> Vec<u64> {
        self.ctx
            .group_order()
            .primes()
            .map(|p| u64::try_from(p).expect("group order fits u64"))
            .filter(|p| u % p == 0)
            .collect()
    }

    /// Squarefree divisors `d | u` paired with `μ(d)/φ(d)`.
    fn mobius_terms(&self, u: u64) -> Vec<(u64, f64)> {
        let primes = self.primes_of(u);
        (0u32..1 << primes.len())
            .map(|mask| {
                let (mut d, mut phi, mut sign) = (1u64, 1u64, 1.0);
                for (i, &p) in primes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        d *= p;
                        phi *= p - 1;
                        sign = -sign;
                    }
                }
                (d, sign / phi as f64)
            })
            .collect()
    }

    /// `θ(u) = φ(u)/u`.
    pub fn theta(&self, u: u64) -> f64 {
        self.primes_of(u).iter().map(|&p| 1.0 - 1.0 / p as f64).product()
    }

    /// `Σ_{χ of order d} χ(x)` for a nonzero `x` given by its log.
    fn order_sum_log(&self, d: u64, l: u64) -> Complex64 {
        let step = self.n / d;
        (0..d)
            .filter(|j| j.gcd(&d) == 1)
            .map(|j| self.eval_mult_log(MultChar { exponent: j * step, order: d }, l))
            .sum()
    }

    /// `ρ_u(α) = θ(u) Σ_{d|u} μ(d)/φ(d) Σ_{χ_d} χ_d(α)`.
    pub fn rho_u(&self, alpha: FieldElement, u: u64) -> Result<Complex64, CharError> {
        self.check_divisor(u)?;
        let l = self.ctx.log(alpha).ok_or(CharError::ZeroElement)?;
        let terms = self.mobius_terms(u);
        let sum: Complex64 = terms.iter().map(|&(d, c)| self.order_sum_log(d, l) * c).sum();
        Ok(sum * self.theta(u))
    }

    /// `τ_a(α) = (1/q) Σ_{ψ} ψ(Tr(α) - a)`.
    pub fn tau_a(&self, alpha: FieldElement, a: u32) -> Result<Complex64, CharError> {
        if a >= self.ctx.q() {
            return Err(CharError::NotInBase(a));
        }
        let f = self.ctx.base();
        let t = f.sub(self.ctx.trace_value(alpha), a);
        let sum: Complex64 = self
            .additive_chars()
            .into_iter()
            .map(|psi| self.eval_add(psi, t).expect("in base field"))
            .sum();
        Ok(sum / self.ctx.q() as f64)
    }

    /// Per-point data for `χ_{f,a,b}`: every `α ∉ S` with `f(α)` and the
    /// inner weight `Σ_{u,v} ψ₀(-au-bv) ψ̂₀(uα + vα⁻¹)`.
    pub fn kernel(&self, f: &RationalFunction, a: u32, b: u32) -> Result<Kernel, CharError> {
        let q = self.ctx.q();
        if a >= q {
            return Err(CharError::NotInBase(a));
        }
        if b >= q {
            return Err(CharError::NotInBase(b));
        }
        let ctx = self.ctx;
        let base = ctx.base();
        let mut points = Vec::new();
        for alpha in ctx.elements().skip(1) {
            let fa = match eval_rational(ctx, f, alpha) {
                Evaluation::Value(v) if !v.is_zero() => v,
                _ => continue,
            };
            let inv = ctx.inv(alpha).expect("nonzero");
            let mut w = Complex64::new(0.0, 0.0);
            for u in 0..q {
                for v in 0..q {
                    let phase = base.neg(base.add(base.mul(a, u), base.mul(b, v)));
                    let y = ctx.add(ctx.mul(ctx.embed(u), alpha), ctx.mul(ctx.embed(v), inv));
                    w += self.psi0[phase as usize] * self.psi_hat(y);
                }
            }
            points.push(KernelPoint {
                log_alpha: ctx.log(alpha).unwrap(),
                log_f: ctx.log(fa).unwrap(),
                weight: w,
            });
        }
        Ok(Kernel {
            excluded: ctx.size() as usize - points.len(),
            points,
        })
    }

    /// One `(u, v)` term of `χ_{f,a,b}(χ₁, χ₂)`, including its `ψ₀(-au-bv)` factor.
    #[allow(clippy::too_many_arguments)]
    pub fn chi_fab_term(
        &self,
        f: &RationalFunction,
        a: u32,
        b: u32,
        chi1: MultChar,
        chi2: MultChar,
        u: u32,
        v: u32,
    ) -> Result<Complex64, CharError> {
        let ctx = self.ctx;
        let base = ctx.base();
        for x in [a, b, u, v] {
            if x >= ctx.q() {
                return Err(CharError::NotInBase(x));
            }
        }
        let phase = self.psi0[base.neg(base.add(base.mul(a, u), base.mul(b, v))) as usize];
        let mut sum = Complex64::new(0.0, 0.0);
        for alpha in ctx.elements().skip(1) {
            let fa = match eval_rational(ctx, f, alpha) {
                Evaluation::Value(w) if !w.is_zero() => w,
                _ => continue,
            };
            let inv = ctx.inv(alpha).expect("nonzero");
            let y = ctx.add(ctx.mul(ctx.embed(u), alpha), ctx.mul(ctx.embed(v), inv));
            sum += self.eval_mult(chi1, alpha)? * self.eval_mult(chi2, fa)? * self.psi_hat(y);
        }
        Ok(sum * phase)
    }

    /// `χ_{f,a,b}(χ₁, χ₂)`.
    pub fn chi_fab(
        &self,
        f: &RationalFunction,
        a: u32,
        b: u32,
        chi1: MultChar,
        chi2: MultChar,
    ) -> Result<Complex64, CharError> {
        Ok(self.kernel(f, a, b)?.chi(self, chi1, chi2))
    }

    /// The count of `α` with `α` `l₁`-free, `f(α)` `l₂`-free, `Tr(α) = a`
    /// and `Tr(α⁻¹) = b`, via the character-sum expansion.
    pub fn count_via_characters(
        &self,
        f: &RationalFunction,
        a: u32,
        b: u32,
        l1: u64,
        l2: u64,
    ) -> Result<f64, CharError> {
        let kernel = self.kernel(f, a, b)?;
        self.count_with_kernel(&kernel, l1, l2)
    }

    pub fn count_with_kernel(&self, kernel: &Kernel, l1: u64, l2: u64) -> Result<f64, CharError> {
        self.check_divisor(l1)?;
        self.check_divisor(l2)?;
        let t1 = self.mobius_terms(l1);
        let t2 = self.mobius_terms(l2);
        // Σ over characters of each order, per point, then combine.
        let a_sums: Vec<Vec<Complex64>> = t1
            .iter()
            .map(|&(d, _)| kernel.points.iter().map(|p| self.order_sum_log(d, p.log_alpha)).collect())
            .collect();
        let b_sums: Vec<Vec<Complex64>> = t2
            .iter()
            .map(|&(d, _)| kernel.points.iter().map(|p| self.order_sum_log(d, p.log_f)).collect())
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, &(_, c1)) in t1.iter().enumerate() {
            for (j, &(_, c2)) in t2.iter().enumerate() {
                let s: Complex64 = kernel
                    .points
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p.weight * a_sums[i][k] * b_sums[j][k])
                    .sum();
                total += s * (c1 * c2);
            }
        }
        let q = self.ctx.q() as f64;
        let value = total * (self.theta(l1) * self.theta(l2) / (q * q));
        Ok(value.re)
    }
}

#[derive(Clone, Debug)]
pub struct KernelPoint {
    pub log_alpha: u64,
    pub log_f: u64,
    pub weight: Complex64,
}

#[derive(Clone, Debug)]
pub struct Kernel {
    pub points: Vec<KernelPoint>,
    /// `|S|`: zero together with the zeros and poles of `f`.
    pub excluded: usize,
}

impl Kernel {
    pub fn chi(&self, chars: &Characters<'_>, chi1: MultChar, chi2: MultChar) -> Complex64 {
        self.points
            .iter()
            .map(|p| chars.eval_mult_log(chi1, p.log_alpha) * chars.eval_mult_log(chi2, p.log_f) * p.weight)
            .sum()
    }
}
