//! Differential polynomials in one independent variable x.

mod relation;
mod rho;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

pub use relation::Relation;
pub use rho::RhoFn;

use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::error::{Error, Result};

/// Dependent variable id. Variable 1 is u (or 𝔞₁), k is 𝔞_k.
pub type Var = u32;

/// Product Π v_(o)^p, factors sorted by (var, order), powers positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn factor(v: Var, order: u32, power: u32) -> Self {
        if power == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, order, power)])
        }
    }

    pub fn factors(&self) -> &[(Var, u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Σ order·power.
    pub fn diff_order(&self) -> u32 {
        self.0.iter().map(|(_, o, p)| o * p).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, _, p)| p).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m: BTreeMap<(Var, u32), u32> = BTreeMap::new();
        for (v, ord, p) in self.0.iter().chain(o.0.iter()) {
            *m.entry((*v, *ord)).or_insert(0) += p;
        }
        Monomial(m.into_iter().map(|((v, ord), p)| (v, ord, p)).collect())
    }

    pub fn power_of(&self, v: Var, order: u32) -> u32 {
        self.0.iter().find(|(a, b, _)| *a == v && *b == order).map_or(0, |f| f.2)
    }

    /// Remove one power of v_(order); None if absent.
    fn without_one(&self, v: Var, order: u32) -> Option<Monomial> {
        let i = self.0.iter().position(|(a, b, _)| *a == v && *b == order)?;
        let mut f = self.0.clone();
        if f[i].2 == 1 {
            f.remove(i);
        } else {
            f[i].2 -= 1;
        }
        Some(Monomial(f))
    }

    /// Scaling weight when v_(o) carries weight w(v) + o.
    pub fn weight(&self, w: impl Fn(Var) -> i64) -> i64 {
        self.0.iter().map(|(v, o, p)| (w(*v) + *o as i64) * *p as i64).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.diff_order()
            .cmp(&o.diff_order())
            .then(self.degree().cmp(&o.degree()))
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Finite sum of monomials with ρ-Laurent coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, RhoFn>,
}

/// How variables and ρ print.
#[derive(Clone, Debug)]
pub struct Names {
    pub vars: Vec<String>,
    pub rho: String,
}

impl Default for Names {
    fn default() -> Self {
        Names { vars: vec!["u".into()], rho: "rc".into() }
    }
}

impl Names {
    pub fn var(&self, v: Var) -> String {
        match self.vars.get(v as usize - 1) {
            Some(s) => s.clone(),
            None => format!("u{}", v),
        }
    }

    /// 𝔞-style names: a1, a2, ...
    pub fn indexed(prefix: &str) -> Self {
        Names { vars: (1..=16).map(|k| format!("{}{}", prefix, k)).collect(), rho: "rc".into() }
    }
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: RhoFn) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        DiffPoly::constant(RhoFn::constant(c))
    }

    pub fn int(n: i64) -> Self {
        DiffPoly::scalar(Scalar::int(n))
    }

    pub fn q(c: Q) -> Self {
        DiffPoly::scalar(Scalar::Exact(c))
    }

    pub fn rho() -> Self {
        DiffPoly::constant(RhoFn::rho())
    }

    pub fn term(c: RhoFn, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        DiffPoly::var_d(v, 0)
    }

    /// v_(order).
    pub fn var_d(v: Var, order: u32) -> Self {
        DiffPoly::term(RhoFn::int(1), Monomial::factor(v, order, 1))
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, RhoFn> {
        &self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> RhoFn {
        self.terms.get(m).cloned().unwrap_or_else(RhoFn::zero)
    }

    pub fn constant_term(&self) -> RhoFn {
        self.coeff(&Monomial::one())
    }

    fn add_term(&mut self, m: Monomial, c: RhoFn) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(RhoFn::zero);
        *e = e.plus(&c);
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale_by(&self, c: &RhoFn) -> Self {
        let mut out = DiffPoly::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.times(c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        self.scale_by(&RhoFn::constant(c.clone()))
    }

    /// Dependent variables occurring.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|f| f.0)).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.vars().contains(&v)
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.0.iter().map(|f| f.1)).max().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(|c| c.is_exact())
    }

    /// Homogeneous component of the given degree in the dependent variables.
    pub fn homogeneous(&self, d: u32) -> DiffPoly {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect();
        DiffPoly { terms }
    }

    /// Total x-derivative.
    pub fn d_dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for &(v, o, p) in &m.0 {
                let rest = m.without_one(v, o).expect("factor present");
                let nm = rest.mul(&Monomial::factor(v, o + 1, 1));
                out.add_term(nm, c.scale(&Q::from(p)));
            }
        }
        out
    }

    pub fn d_dx_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.d_dx();
        }
        p
    }

    /// ∂p/∂v_(order).
    pub fn partial(&self, v: Var, order: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let p = m.power_of(v, order);
            if p > 0 {
                let rest = m.without_one(v, order).expect("factor present");
                out.add_term(rest, c.scale(&Q::from(p)));
            }
        }
        out
    }

    /// Variational derivative Σ_o (−D)^o ∂p/∂v_(o).
    pub fn euler(&self, v: Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for o in 0..=self.max_order() {
            let mut t = self.partial(v, o).d_dx_n(o);
            if o % 2 == 1 {
                t = t.negate();
            }
            out = out.plus(&t);
        }
        out
    }

    /// True when every variational derivative vanishes.
    pub fn is_total_derivative(&self) -> bool {
        self.constant_term().is_zero() && self.vars().iter().all(|v| self.euler(*v).is_zero())
    }

    /// Inverse of d/dx on total derivatives, with zero constant term.
    pub fn integrate_exact(&self) -> Result<DiffPoly> {
        if !self.is_total_derivative() {
            return Err(Error::NotTotalDerivative);
        }
        let mut q = DiffPoly::zero();
        let maxdeg = self.terms.keys().map(|m| m.degree()).max().unwrap_or(0);
        for d in 1..=maxdeg {
            let pd = self.homogeneous(d);
            if pd.is_zero() {
                continue;
            }
            let mut hd = DiffPoly::zero();
            for v in pd.vars() {
                for k in 1..=pd.max_order() {
                    let dk = pd.partial(v, k);
                    if dk.is_zero() {
                        continue;
                    }
                    for j in 0..k {
                        let mut t = dk.d_dx_n(k - j - 1);
                        if (k - j - 1) % 2 == 1 {
                            t = t.negate();
                        }
                        hd = hd.plus(&DiffPoly::var_d(v, j).times(&t));
                    }
                }
            }
            q = q.plus(&hd.scale(&(Q::ONE / Q::from(d))));
        }
        if q.d_dx() != *self {
            return Err(Error::NotTotalDerivative);
        }
        Ok(q)
    }

    /// Replace variables by differential polynomials (derivatives follow).
    pub fn substitute(&self, map: &BTreeMap<Var, DiffPoly>) -> DiffPoly {
        let mut cache: BTreeMap<(Var, u32), DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = DiffPoly::constant(c.clone());
            for &(v, o, p) in &m.0 {
                let base = match map.get(&v) {
                    Some(q) => cache.entry((v, o)).or_insert_with(|| q.d_dx_n(o)).clone(),
                    None => DiffPoly::var_d(v, o),
                };
                acc = acc.times(&base.pow_u(p));
            }
            out = out.plus(&acc);
        }
        out
    }

    /// Substitute a value for ρ.
    pub fn subst_rho(&self, rho: &Scalar) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), RhoFn::constant(c.eval(rho)?));
        }
        Ok(out)
    }

    /// Scalar substitutions for whole variables.
    pub fn substitute_scalars(&self, map: &BTreeMap<Var, Scalar>) -> DiffPoly {
        let m: BTreeMap<Var, DiffPoly> = map.iter().map(|(v, s)| (*v, DiffPoly::scalar(s.clone()))).collect();
        self.substitute(&m)
    }

    /// Write p = c·v + rest with c a unit coefficient and rest free of v;
    /// returns −rest/c, the value of v forced by p = 0.
    pub fn solve_linear(&self, v: Var) -> Result<DiffPoly> {
        let lin = Monomial::factor(v, 0, 1);
        let c = self.coeff(&lin);
        let rest = self.minus(&DiffPoly::term(c.clone(), lin));
        if c.is_zero() || rest.contains_var(v) {
            return Err(Error::InvalidInput(format!("not linear in variable {}", v)));
        }
        Ok(rest.scale_by(&c.inverse()?).negate())
    }

    /// Nonzero iff some coefficient is not negligible.
    pub fn is_negligible_poly(&self) -> bool {
        self.terms.values().all(|c| c.is_negligible())
    }

    /// Every monomial has weight equal to `w` under the given variable weights.
    pub fn is_isobaric(&self, var_weight: impl Fn(Var) -> i64 + Copy, rho_weight: i64, w: i64) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| c.terms().keys().all(|k| m.weight(var_weight) + rho_weight * *k as i64 == w))
    }

    pub fn render(&self) -> String {
        self.render_with(&Names::default())
    }

    /// Canonical text, highest monomial first.
    pub fn render_with(&self, names: &Names) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body) = render_term(c, m, names);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    pub fn to_latex(&self, names: &Names) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, cbody) = match c.constant_value() {
                Some(v) => (v.sign() < 0, latex_scalar(&v.abs())),
                None => (false, format!("\\left({}\\right)", latex_rho(c))),
            };
            let mono = latex_monomial(m, names);
            let body = match (cbody.as_str(), mono.is_empty()) {
                (_, true) => cbody.clone(),
                ("1", false) => mono,
                (_, false) => format!("{}\\,{}", cbody, mono),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// {coeff: {num: [...ascending ρ powers], den: k}, monomial: [[var, order, power]...]}.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let lo = c.terms().keys().next().copied().unwrap_or(0).min(0);
                let hi = c.terms().keys().next_back().copied().unwrap_or(0);
                let num: Vec<String> = (lo..=hi)
                    .map(|k| c.terms().get(&k).cloned().unwrap_or_else(Scalar::zero).to_string())
                    .collect();
                json!({
                    "coeff": {"num": num, "den": -lo},
                    "monomial": m.0.iter().map(|f| vec![f.0, f.1, f.2]).collect::<Vec<_>>(),
                })
            })
            .collect();
        Value::Array(terms)
    }

    pub fn from_json(v: &Value) -> Result<DiffPoly> {
        let bad = || Error::InvalidInput("malformed DiffPoly JSON".into());
        let mut out = DiffPoly::zero();
        for t in v.as_array().ok_or_else(bad)? {
            let den = t["coeff"]["den"].as_i64().ok_or_else(bad)? as i32;
            let mut c = RhoFn::zero();
            for (i, s) in t["coeff"]["num"].as_array().ok_or_else(bad)?.iter().enumerate() {
                let s: Scalar = serde_json::from_value(s.clone()).map_err(|_| bad())?;
                c = c.plus(&RhoFn::monomial(s, i as i32 - den));
            }
            let mut m = Monomial::one();
            for f in t["monomial"].as_array().ok_or_else(bad)? {
                let g = |i: usize| f[i].as_u64().map(|x| x as u32).ok_or_else(bad);
                m = m.mul(&Monomial::factor(g(0)?, g(1)?, g(2)?));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }
}

fn prime_suffix(o: u32) -> String {
    if o <= 3 {
        "'".repeat(o as usize)
    } else {
        format!("^({})", o)
    }
}

fn render_term(c: &RhoFn, m: &Monomial, names: &Names) -> (bool, String) {
    let mono: Vec<String> = m
        .0
        .iter()
        .map(|&(v, o, p)| {
            let base = format!("{}{}", names.var(v), prime_suffix(o));
            if p == 1 {
                base
            } else if o == 0 {
                format!("{}^{}", base, p)
            } else {
                format!("({})^{}", base, p)
            }
        })
        .collect();
    let mono = mono.join("*");
    let (neg, cs) = match c.constant_value() {
        Some(v) => (v.sign() < 0, v.abs().to_string()),
        None => {
            let r = c.render(&names.rho);
            if c.terms().len() == 1 {
                match r.strip_prefix('-') {
                    Some(t) => (true, t.to_string()),
                    None => (false, r),
                }
            } else {
                (false, format!("({})", r))
            }
        }
    };
    let body = if mono.is_empty() {
        cs
    } else if cs == "1" {
        mono
    } else {
        format!("{}*{}", cs, mono)
    };
    (neg, body)
}

fn latex_scalar(s: &Scalar) -> String {
    match s.as_q() {
        Some(q) if q.denominator() != &dashu::integer::UBig::ONE => {
            format!("\\frac{{{}}}{{{}}}", q.numerator(), q.denominator())
        }
        _ => s.to_string(),
    }
}

fn latex_rho(c: &RhoFn) -> String {
    let mut parts = Vec::new();
    for (k, v) in c.terms().iter().rev() {
        let mono = match k {
            0 => String::new(),
            1 => "r_c".to_string(),
            _ => format!("r_c^{{{}}}", k),
        };
        let a = latex_scalar(&v.abs());
        let body = if mono.is_empty() {
            a
        } else if a == "1" {
            mono
        } else {
            format!("{}{}", a, mono)
        };
        let sign = if v.sign() < 0 { "-" } else if parts.is_empty() { "" } else { "+" };
        parts.push(format!("{}{}", sign, body));
    }
    parts.join(" ")
}

fn latex_monomial(m: &Monomial, names: &Names) -> String {
    m.0.iter()
        .map(|&(v, o, p)| {
            let n = names.var(v);
            let base = match o {
                0 => n,
                1..=3 => format!("{}{}", n, "'".repeat(o as usize)),
                _ => format!("{}^{{({})}}", n, o),
            };
            if p == 1 {
                base
            } else if o == 0 {
                format!("{}^{{{}}}", base, p)
            } else {
                format!("\\left({}\\right)^{{{}}}", base, p)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl Ring for DiffPoly {
    fn zero_like(&self) -> Self {
        DiffPoly::zero()
    }
    fn one_like(&self) -> Self {
        DiffPoly::int(1)
    }
    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1.times(c2));
            }
        }
        out
    }
    fn negate(&self) -> Self {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negate())).collect() }
    }
    fn scale(&self, q: &Q) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(q));
        }
        out
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.is_negligible_poly()
    }
}

impl Differential for DiffPoly {
    fn deriv(&self) -> Self {
        self.d_dx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(o: u32) -> DiffPoly {
        DiffPoly::var_d(1, o)
    }

    #[test]
    fn leibniz() {
        assert_eq!(u(0).d_dx(), u(1));
        assert_eq!(u(0).times(&u(0)).d_dx(), u(0).times(&u(1)).scale(&Q::from(2)));
        let p = DiffPoly::rho().times(&u(2)).scale(&Q::from(2)).plus(&u(0).pow_u(2).scale(&Q::from(6)));
        let dp = DiffPoly::rho().times(&u(3)).scale(&Q::from(2)).plus(&u(0).times(&u(1)).scale(&Q::from(12)));
        assert_eq!(p.d_dx(), dp);
    }

    #[test]
    fn integrate_pi() {
        let dp = DiffPoly::rho().times(&u(3)).scale(&Q::from(2)).plus(&u(0).times(&u(1)).scale(&Q::from(12)));
        let p = DiffPoly::rho().times(&u(2)).scale(&Q::from(2)).plus(&u(0).pow_u(2).scale(&Q::from(6)));
        assert_eq!(dp.integrate_exact().unwrap(), p);
        assert_eq!(u(1).scale(&Q::from(2)).integrate_exact().unwrap(), u(0).scale(&Q::from(2)));
    }

    #[test]
    fn non_exact_detected() {
        let p = u(0).times(&u(2));
        assert_eq!(p.euler(1), u(2).scale(&Q::from(2)));
        assert_eq!(p.integrate_exact(), Err(Error::NotTotalDerivative));
    }

    #[test]
    fn substitution() {
        let p = u(2).scale(&crate::algebra::q_ratio(1, 2)).minus(&u(0).pow_u(3).scale_by(&RhoFn::monomial(Scalar::ratio(1, 4), -2)));
        let s = p.subst_rho(&Scalar::ratio(1, 2)).unwrap();
        assert_eq!(s, u(2).scale(&crate::algebra::q_ratio(1, 2)).minus(&u(0).pow_u(3)));
        let mut m = BTreeMap::new();
        m.insert(1, DiffPoly::var(2).pow_u(2));
        // u' with u = v² becomes 2 v v'
        assert_eq!(u(1).substitute(&m), DiffPoly::var(2).times(&DiffPoly::var_d(2, 1)).scale(&Q::from(2)));
    }

    #[test]
    fn rendering() {
        let p = DiffPoly::rho().times(&u(2)).scale(&Q::from(2)).plus(&u(0).pow_u(2).scale(&Q::from(6)));
        assert_eq!(p.render(), "2*rc*u'' + 6*u^2");
        let back = DiffPoly::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }
}
