use std::collections::BTreeMap;

use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::error::{Error, Result};

/// Laurent polynomial Σ c_k ρ^k in the symbol ρ (standing for r_c).
/// Denominators are monomials in ρ, which covers every coefficient the
/// scaled expansions produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoFn {
    terms: BTreeMap<i32, Scalar>,
}

impl RhoFn {
    pub fn zero() -> Self {
        RhoFn { terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        RhoFn::monomial(c, 0)
    }

    pub fn q(c: Q) -> Self {
        RhoFn::constant(Scalar::Exact(c))
    }

    pub fn int(n: i64) -> Self {
        RhoFn::constant(Scalar::int(n))
    }

    pub fn rho() -> Self {
        RhoFn::monomial(Scalar::one(), 1)
    }

    pub fn monomial(c: Scalar, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        RhoFn { terms }
    }

    pub fn terms(&self) -> &BTreeMap<i32, Scalar> {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| *k == 0)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.terms.get(&0).cloned().unwrap_or_else(Scalar::zero))
        } else {
            None
        }
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(|c| c.is_exact())
    }

    /// Single-monomial values are units.
    pub fn inverse(&self) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::DivisionByZero(format!("inverse of non-monomial {}", self.render("rc"))));
        }
        let (k, c) = self.terms.iter().next().expect("one term");
        Ok(RhoFn::monomial(c.recip()?, -k))
    }

    /// Substitute a value for ρ.
    pub fn eval(&self, rho: &Scalar) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (k, c) in &self.terms {
            let p = if *k >= 0 {
                rho.pow(*k as u32)
            } else {
                if rho.is_zero() {
                    return Err(Error::DivisionByZero("rho = 0 in a negative power".into()));
                }
                rho.recip()?.pow((-k) as u32)
            };
            acc = &acc + &(c * &p);
        }
        Ok(acc)
    }

    /// Multiply every coefficient by the common denominator so the result
    /// has integer coefficients; returns the multiplier used.
    pub fn denominator_lcm(&self) -> Option<dashu::integer::UBig> {
        let mut l = dashu::integer::UBig::ONE;
        for c in self.terms.values() {
            let q = c.as_q()?;
            let d = q.denominator().clone();
            let g = dashu::base::Gcd::gcd(&l, &d);
            l = &l * &d / g;
        }
        Some(l)
    }

    pub fn render(&self, rho: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.terms.iter().rev() {
            let neg = c.sign() < 0;
            let a = c.abs();
            let mono = match k {
                0 => String::new(),
                1 => rho.to_string(),
                _ => format!("{}^{}", rho, k),
            };
            let body = if mono.is_empty() {
                a.to_string()
            } else if a == Scalar::one() {
                mono
            } else {
                format!("{}*{}", a, mono)
            };
            if parts.is_empty() {
                parts.push(if neg { format!("-{}", body) } else { body });
            } else {
                parts.push(format!("{} {}", if neg { "-" } else { "+" }, body));
            }
        }
        parts.join(" ")
    }
}

impl Ring for RhoFn {
    fn zero_like(&self) -> Self {
        RhoFn::zero()
    }
    fn one_like(&self) -> Self {
        RhoFn::int(1)
    }
    fn plus(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        for (k, c) in &o.terms {
            let e = t.entry(*k).or_insert_with(Scalar::zero);
            *e = &*e + c;
            if e.is_zero() {
                t.remove(k);
            }
        }
        RhoFn { terms: t }
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = RhoFn::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out = out.plus(&RhoFn::monomial(c1 * c2, k1 + k2));
            }
        }
        out
    }
    fn negate(&self) -> Self {
        RhoFn { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
    fn scale(&self, q: &Q) -> Self {
        let s = Scalar::Exact(q.clone());
        let mut out = RhoFn::zero();
        for (k, c) in &self.terms {
            out = out.plus(&RhoFn::monomial(c * &s, *k));
        }
        out
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.terms.values().all(|c| c.is_negligible())
    }
}

/// ρ is a constant of the x-derivation.
impl Differential for RhoFn {
    fn deriv(&self) -> Self {
        RhoFn::zero()
    }
}
