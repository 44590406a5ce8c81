//! Shuffle products of refined multiple Dedekind zeta values (MDZVs) over
//! imaginary quadratic fields.
//!
//! The crate has two halves that check each other:
//!
//! * a symbolic engine ([`shuffle`], [`symmetry`], [`formulas`]) that expands
//!   products of iterated integrals into integer combinations of refined
//!   MDZVs `ζ^ρ(e₁,…,e_k)`, optionally reduced modulo the Galois/cone-exchange
//!   symmetry group;
//! * a numeric verifier ([`numfield`], [`eval`]) that sums both sides of an
//!   identity over a finite, conjugation-closed set of cone elements. Shuffle
//!   identities hold exactly on such sets, so agreement is expected up to
//!   floating-point reassociation at any radius.

pub mod eval;
pub mod formulas;
pub mod numfield;
pub mod real;
pub mod shuffle;
pub mod symmetry;

pub use eval::{EvalContext, EvalError, EvalReport, Precision, SummationPolicy};
pub use formulas::{FormulaError, MdzvVariant, Notation};
pub use numfield::{FieldError, FieldSpec, RingElement, TruncationSet};
pub use shuffle::{Chain, Combination, Generator, Origin, RefinedTerm, ShuffleError, ShuffleWord};
pub use symmetry::{PairingStructure, PermError, Permutation};

/// Binomial coefficient `C(n, k)` in 128-bit arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
