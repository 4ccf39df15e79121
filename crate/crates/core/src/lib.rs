//! Numerical ε-expansion of scalar multi-loop Feynman integrals by iterated
//! sector decomposition, plus the algebra used to check the results:
//! shuffle and quasi-shuffle words, multiple polylogarithms, Z-sums and
//! Γ-function expansions.

pub mod decomp;
pub mod graphpoly;
pub mod hironaka;
pub mod mcint;
pub mod pipeline;
pub mod poly;
pub mod polylog;
pub mod rational;
pub mod words;
