use dashu::base::Gcd;
use dashu::integer::{IBig, UBig};
use serde_json::{json, Value};

use crate::algebra::ring::Ring;
use crate::algebra::scalar::{Scalar, Q};
use crate::diffpoly::{DiffPoly, Names};
use crate::error::{Error, Result};

/// The ODE a + x·b = 0, affine in the independent variable x.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub a: DiffPoly,
    pub b: DiffPoly,
}

impl Relation {
    pub fn new(a: DiffPoly, b: DiffPoly) -> Self {
        Relation { a, b }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Relation {
        Relation { a: self.a.scale_scalar(c), b: self.b.scale_scalar(c) }
    }

    pub fn minus(&self, o: &Relation) -> Relation {
        Relation { a: self.a.minus(&o.a), b: self.b.minus(&o.b) }
    }

    pub fn subst_rho(&self, rho: &Scalar) -> Result<Relation> {
        Ok(Relation { a: self.a.subst_rho(rho)?, b: self.b.subst_rho(rho)? })
    }

    fn coefficients(&self) -> Vec<Scalar> {
        let mut out = Vec::new();
        for p in [&self.a, &self.b] {
            for c in p.terms().values() {
                match c.constant_value() {
                    Some(v) => out.push(v),
                    None => out.extend(c.terms().values().cloned()),
                }
            }
        }
        out
    }

    /// Leading coefficient: the largest monomial of a (highest derivative
    /// first), falling back to b.
    fn leading(&self) -> Option<Scalar> {
        let p = if self.a.is_zero() { &self.b } else { &self.a };
        let (_, c) = p.terms().iter().next_back()?;
        c.constant_value().or_else(|| c.terms().values().next_back().cloned())
    }

    /// Integer coefficients without common factor and a positive leading
    /// coefficient. Decimal coefficients are normalised to a unit leading
    /// coefficient instead. ρ must already be numeric for the integer form.
    pub fn canonical(&self) -> Result<Relation> {
        let coeffs = self.coefficients();
        let lead = self.leading().ok_or_else(|| Error::InvalidInput("empty relation".into()))?;
        if coeffs.iter().all(|c| c.is_exact()) {
            let mut den = UBig::ONE;
            for c in &coeffs {
                let d = c.to_q().denominator().clone();
                let g = (&den).gcd(&d);
                den = &den * &d / g;
            }
            let mut num = UBig::ZERO;
            for c in &coeffs {
                let v = c.to_q() * Q::from(den.clone());
                let n = dashu::base::UnsignedAbs::unsigned_abs(v.numerator().clone());
                num = if num == UBig::ZERO { n } else { (&num).gcd(&n) };
            }
            let mut f = Q::from_parts(IBig::from(den), num);
            if lead.sign() < 0 {
                f = -f;
            }
            Ok(self.scale_scalar(&Scalar::Exact(f)))
        } else {
            Ok(self.scale_scalar(&lead.recip()?))
        }
    }

    /// "a + x*(b) = 0" in the given names.
    pub fn render_with(&self, names: &Names) -> String {
        let mut s = if self.a.is_zero() { String::new() } else { self.a.render_with(names) };
        if !self.b.is_zero() {
            let b = self.b.render_with(names);
            let xb = if self.b.terms().len() == 1 && self.b.terms().keys().all(|m| m.is_one()) {
                let c = self.b.constant_term();
                let v = c.constant_value().unwrap_or_else(Scalar::one);
                if v == Scalar::one() {
                    "x".to_string()
                } else if v == -Scalar::one() {
                    "-x".to_string()
                } else {
                    format!("{}*x", v)
                }
            } else if self.b.terms().len() == 1 {
                match b.strip_prefix('-') {
                    Some(rest) => format!("-x*{}", rest),
                    None => format!("x*{}", b),
                }
            } else {
                format!("x*({})", b)
            };
            if s.is_empty() {
                s = xb;
            } else if let Some(rest) = xb.strip_prefix('-') {
                s = format!("{} - {}", s, rest);
            } else {
                s = format!("{} + {}", s, xb);
            }
        }
        if s.is_empty() {
            s = "0".into();
        }
        format!("{} = 0", s)
    }

    pub fn render(&self) -> String {
        self.render_with(&Names::default())
    }

    pub fn to_latex(&self, names: &Names) -> String {
        let a = if self.a.is_zero() { String::new() } else { self.a.to_latex(names) };
        let b = if self.b.is_zero() {
            String::new()
        } else {
            let inner = self.b.to_latex(names);
            let (neg, body) = match inner.strip_prefix('-') {
                Some(rest) => ("-", rest.trim_start().to_string()),
                None => ("", inner.clone()),
            };
            let single = self.b.terms().len() == 1;
            let xb = if single && body == "1" {
                "x".to_string()
            } else if single {
                format!("x\\,{}", body)
            } else {
                return format!("{}{}x\\left({}\\right) = 0", a, if a.is_empty() { "" } else { " + " }, inner);
            };
            format!("{}{}", neg, xb)
        };
        let body = match (a.is_empty(), b.is_empty()) {
            (true, true) => "0".to_string(),
            (false, true) => a,
            (true, false) => b,
            (false, false) => match b.strip_prefix('-') {
                Some(rest) => format!("{} - {}", a, rest),
                None => format!("{} + {}", a, b),
            },
        };
        format!("{} = 0", body)
    }

    pub fn to_json(&self) -> Value {
        json!({"a": self.a.to_json(), "b": self.b.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<Relation> {
        let bad = || Error::InvalidInput("relation JSON needs a and b".into());
        Ok(Relation {
            a: DiffPoly::from_json(v.get("a").ok_or_else(bad)?)?,
            b: DiffPoly::from_json(v.get("b").ok_or_else(bad)?)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_integer_form() {
        let u = DiffPoly::var(1);
        // −(1/3)u″ + u² − x/6 = 0  →  2u″ − 6u² + x = 0
        let a = DiffPoly::var_d(1, 2).scale(&(Q::from(-1) / Q::from(3))).plus(&u.times(&u));
        let r = Relation::new(a, DiffPoly::q(Q::from(-1) / Q::from(6)));
        let c = r.canonical().unwrap();
        let expect = Relation::new(
            DiffPoly::var_d(1, 2).scale(&Q::from(2)).minus(&u.times(&u).scale(&Q::from(6))),
            DiffPoly::int(1),
        );
        assert_eq!(c, expect);
        assert_eq!(Relation::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(c.render(), "2*u'' - 6*u^2 + x = 0");
    }
}
