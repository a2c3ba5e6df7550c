use std::fmt::Debug;

use crate::algebra::scalar::{Scalar, Q};
use crate::error::{Error, Result};

/// Commutative ring with unit. Values carry enough context to build their
/// own zero and one (polynomial rings need a coefficient prototype).
pub trait Ring: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scale(&self, q: &Q) -> Self;
    fn is_zero(&self) -> bool;

    /// Zero up to working precision; exact rings use `is_zero`.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_q_like(&self, q: &Q) -> Self {
        self.one_like().scale(q)
    }

    fn from_int_like(&self, n: i64) -> Self {
        self.from_q_like(&Q::from(n))
    }

    fn pow_u(&self, n: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

/// Ring with a derivation (d/dT, d/dx, ...).
pub trait Differential: Ring {
    fn deriv(&self) -> Self;

    fn deriv_n(&self, n: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.deriv();
        }
        out
    }
}

pub trait Field: Ring {
    fn inv(&self) -> Result<Self>;

    fn divide(&self, o: &Self) -> Result<Self> {
        Ok(self.times(&o.inv()?))
    }
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::ZERO
    }
    fn one_like(&self) -> Self {
        Q::ONE
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self.clone()
    }
    fn scale(&self, q: &Q) -> Self {
        self * q
    }
    fn is_zero(&self) -> bool {
        *self == Q::ZERO
    }
}

impl Field for Q {
    fn inv(&self) -> Result<Self> {
        if *self == Q::ZERO {
            return Err(Error::DivisionByZero("rational inverse".into()));
        }
        Ok(Q::ONE / self)
    }
}

impl Ring for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn one_like(&self) -> Self {
        Scalar::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, q: &Q) -> Self {
        self * &Scalar::Exact(q.clone())
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        match self {
            Scalar::Exact(q) => *q == Q::ZERO,
            Scalar::Approx { digits, .. } => {
                let tol = Scalar::Exact(Q::ONE / Q::from(10).pow((*digits / 2) as usize));
                self.abs() < tol
            }
        }
    }
}

impl Field for Scalar {
    fn inv(&self) -> Result<Self> {
        self.recip()
    }
}
