//! Exact scalars, polynomials, surds over a quadratic branch and residues
//! at infinity.

pub mod bivariate;
pub mod poly;
pub mod ring;
pub mod roots;
pub mod scalar;
pub mod structured;
pub mod surd;

pub use poly::Poly;
pub use ring::{Differential, Field, Ring};
pub use roots::{algebraic_roots, real_roots, real_roots_q, AlgebraicRoot, Domain, RealRoot};
pub use scalar::{bits_for, parse_q, q_int, q_ratio, q_sign, q_to_f64, Float, Scalar, DEFAULT_DIGITS, Q};
pub use structured::{residue_at_infinity, residue_certified, StructuredRational};
pub use surd::Surd;

/// C(n, k) as a rational.
pub fn binom(n: u64, k: u64) -> Q {
    if k > n {
        return Q::ZERO;
    }
    let mut acc = Q::ONE;
    for i in 0..k {
        acc = acc * Q::from(n - i) / Q::from(i + 1);
    }
    acc
}

/// (2m−1)!! with (−1)!! = 1.
pub fn double_factorial_odd(m: u64) -> Q {
    let mut acc = Q::ONE;
    let mut k = 1;
    while k < 2 * m {
        acc *= Q::from(k);
        k += 2;
    }
    acc
}

pub fn factorial(n: u64) -> Q {
    (1..=n).fold(Q::ONE, |a, k| a * Q::from(k))
}
