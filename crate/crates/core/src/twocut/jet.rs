use std::fmt;

use crate::algebra::ring::{Differential, Field, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::error::{Error, Result};

/// Length marker of jets that are exact polynomials in δT.
pub const EXACT: usize = usize::MAX;

/// Truncated Taylor series Σ c_i δT^i of a function of T around a base
/// point, valid for i < len. Derivatives shorten the valid range by one.
#[derive(Clone, Debug)]
pub struct Jet {
    c: Vec<Scalar>,
    len: usize,
}

impl Jet {
    pub fn new(mut c: Vec<Scalar>, len: usize) -> Self {
        if len != EXACT {
            c.truncate(len);
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Jet { c, len }
    }

    pub fn constant(v: Scalar) -> Self {
        Jet::new(vec![v], EXACT)
    }

    /// T = t0 + δT.
    pub fn variable(t0: Scalar) -> Self {
        Jet::new(vec![t0, Scalar::one()], EXACT)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn with_len(&self, len: usize) -> Jet {
        Jet::new(self.c.clone(), len.min(self.len))
    }

    /// Value at the base point.
    pub fn value(&self) -> Result<Scalar> {
        if self.len == 0 {
            return Err(Error::TruncationExceeded("jet value requested after all orders were consumed".into()));
        }
        Ok(self.coeff(0))
    }

    /// n-th T-derivative at the base point.
    pub fn derivative_at(&self, n: usize) -> Result<Scalar> {
        if n >= self.len {
            return Err(Error::TruncationExceeded(format!("derivative of order {} beyond jet length {}", n, self.len)));
        }
        let mut f = Q::ONE;
        for i in 2..=n {
            f *= Q::from(i as i64);
        }
        Ok(self.coeff(n).scale(&f))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Jet {
        Jet::new(self.c.iter().map(f).collect(), self.len)
    }

    fn stored(&self, len: usize) -> usize {
        if len == EXACT {
            self.c.len()
        } else {
            len
        }
    }
}

impl PartialEq for Jet {
    fn eq(&self, o: &Self) -> bool {
        let n = self.len.min(o.len);
        let n = self.stored(n).max(o.stored(n)).min(n);
        (0..n).all(|i| self.coeff(i) == o.coeff(i))
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        if self.len == EXACT {
            write!(f, "[{}]", parts.join(", "))
        } else {
            write!(f, "[{}; +O(d^{})]", parts.join(", "), self.len)
        }
    }
}

impl Ring for Jet {
    fn zero_like(&self) -> Self {
        Jet::new(Vec::new(), EXACT)
    }
    fn one_like(&self) -> Self {
        Jet::constant(Scalar::one())
    }
    fn plus(&self, o: &Self) -> Self {
        let len = self.len.min(o.len);
        let n = self.c.len().max(o.c.len());
        Jet::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect(), len)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        if (self.c.is_empty() && self.len == EXACT) || (o.c.is_empty() && o.len == EXACT) {
            return self.zero_like();
        }
        if self.c.is_empty() || o.c.is_empty() {
            return Jet::new(Vec::new(), self.len.min(o.len));
        }
        let len = self.len.min(o.len);
        let n = (self.c.len() + o.c.len() - 1).min(len);
        let mut c = vec![Scalar::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        Jet::new(c, len)
    }
    fn negate(&self) -> Self {
        self.map(|x| -x)
    }
    fn scale(&self, q: &Q) -> Self {
        self.map(|x| x.scale(q))
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.c.iter().all(|x| x.is_negligible())
    }
}

impl Differential for Jet {
    fn deriv(&self) -> Self {
        let len = if self.len == EXACT { EXACT } else { self.len.saturating_sub(1) };
        let c = self.c.iter().enumerate().skip(1).map(|(i, x)| x.scale(&Q::from(i as i64))).collect();
        Jet::new(c, len)
    }
}

impl Field for Jet {
    fn inv(&self) -> Result<Self> {
        let a0 = self.value()?;
        if a0.is_zero() {
            return Err(Error::DivisionByZero("jet with vanishing constant term".into()));
        }
        if self.c.len() <= 1 {
            return Ok(Jet::new(vec![a0.recip()?], self.len));
        }
        if self.len == EXACT {
            return Err(Error::TruncationExceeded("inverse of a non-constant exact jet needs a truncation".into()));
        }
        let inv0 = a0.recip()?;
        let mut out = vec![inv0.clone()];
        for k in 1..self.len {
            let mut acc = Scalar::zero();
            for j in 1..=k.min(self.c.len() - 1) {
                acc = &acc + &(&self.c[j] * &out[k - j]);
            }
            out.push(-&(&acc * &inv0));
        }
        Ok(Jet::new(out, self.len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn arithmetic_and_truncation() {
        let t = Jet::variable(q(1, 2));
        let x = t.times(&t).with_len(3);
        assert_eq!(x.coeffs(), &[q(1, 4), q(1, 1), q(1, 1)]);
        let d2 = x.deriv().deriv();
        assert_eq!(d2.len(), 1);
        assert_eq!(d2.value().unwrap(), q(2, 1));
        assert!(d2.deriv().value().is_err());
    }

    #[test]
    fn inverse_series() {
        // 1/(1 − δ) = Σ δ^i
        let x = Jet::new(vec![q(1, 1), q(-1, 1)], 5);
        let y = x.inv().unwrap();
        assert_eq!(y.coeffs(), vec![q(1, 1); 5].as_slice());
        assert_eq!(x.times(&y), x.one_like().with_len(5));
        assert_eq!(y.derivative_at(3).unwrap(), q(6, 1));
    }
}
