//! Rational functions `f = c · P / Q` over `F_{q^m}` with `P`, `Q` monic,
//! irreducible (or 1) and coprime.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ext::{FieldCtx, FieldElement};
use super::poly::{self, Poly};
use super::FfError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFunction {
    scale: FieldElement,
    numerator: Poly<FieldElement>,
    denominator: Poly<FieldElement>,
}

/// Result of evaluating a rational function at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Value(FieldElement),
    Pole,
}

impl RationalFunction {
    /// `numerator` and `denominator` must each be monic and either `1` or
    /// irreducible, coprime, with total degree at least 1.
    pub fn new(
        ctx: &FieldCtx,
        scale: FieldElement,
        numerator: Poly<FieldElement>,
        denominator: Poly<FieldElement>,
    ) -> Result<Self, FfError> {
        if scale.is_zero() || scale.encoding() >= ctx.size() {
            return Err(FfError::InvalidRational("scale must be a nonzero field element".into()));
        }
        for (name, p) in [("numerator", &numerator), ("denominator", &denominator)] {
            if p.iter().any(|c| c.encoding() >= ctx.size()) {
                return Err(FfError::InvalidRational(format!("{name} has foreign coefficients")));
            }
            if !poly::is_monic(ctx, p) {
                return Err(FfError::InvalidRational(format!("{name} is not monic")));
            }
            if p.len() > 1 && !poly::is_irreducible(ctx, p) {
                return Err(FfError::InvalidRational(format!("{name} is reducible")));
            }
        }
        if numerator.len() + denominator.len() < 3 {
            return Err(FfError::InvalidRational("constant function".into()));
        }
        if poly::gcd(ctx, &numerator, &denominator).len() != 1 {
            return Err(FfError::InvalidRational("numerator and denominator share a factor".into()));
        }
        Ok(RationalFunction {
            scale,
            numerator,
            denominator,
        })
    }

    /// `c · P` with denominator 1.
    pub fn polynomial(ctx: &FieldCtx, scale: FieldElement, p: Poly<FieldElement>) -> Result<Self, FfError> {
        Self::new(ctx, scale, p, vec![FieldElement::ONE])
    }

    pub fn scale(&self) -> FieldElement {
        self.scale
    }

    pub fn numerator(&self) -> &[FieldElement] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[FieldElement] {
        &self.denominator
    }

    pub fn n1(&self) -> usize {
        self.numerator.len() - 1
    }

    pub fn n2(&self) -> usize {
        self.denominator.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.n1() + self.n2()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &[FieldElement]| -> String {
            let terms: Vec<String> = p.iter().map(|c| c.encoding().to_string()).collect();
            format!("[{}]", terms.join(","))
        };
        write!(
            f,
            "{}*{}/{}",
            self.scale.encoding(),
            show(&self.numerator),
            show(&self.denominator)
        )
    }
}

pub fn eval_rational(ctx: &FieldCtx, f: &RationalFunction, a: FieldElement) -> Evaluation {
    let den = poly::eval(ctx, &f.denominator, a);
    match ctx.inv(den) {
        None => Evaluation::Pole,
        Some(d) => {
            let num = poly::eval(ctx, &f.numerator, a);
            Evaluation::Value(ctx.mul(ctx.mul(f.scale, num), d))
        }
    }
}

/// Monic irreducibles of the given degree over `F_{q^m}` in lexicographic
/// coefficient order, optionally capped at `limit`.
pub fn find_irreducibles(
    ctx: &FieldCtx,
    degree: usize,
    limit: Option<usize>,
) -> impl Iterator<Item = Poly<FieldElement>> + '_ {
    poly::irreducibles(ctx, degree).take(limit.unwrap_or(usize::MAX))
}
