//! Certificates and exhaustive checks for primitive pairs `(α, f(α))` with
//! prescribed traces of `α` and `α⁻¹` over finite fields `F_{q^m}`.

pub mod arith;
pub mod bounds;
pub mod characters;
pub mod ff;
pub mod published;
pub mod verify;
