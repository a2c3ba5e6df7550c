//! Elimination of the higher scaled coefficients from a ladder of
//! constraints, with x appearing explicitly.

use std::collections::BTreeMap;

use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::diffpoly::{DiffPoly, Monomial, Relation, Var};
use crate::error::{Error, Result};

/// Polynomial in x with differential-polynomial coefficients.
pub type XPoly = Poly<DiffPoly>;

pub fn from_relation(r: &Relation) -> XPoly {
    Poly::new(vec![r.a.clone(), r.b.clone()], DiffPoly::zero())
}

/// Total x-derivative: explicit x plus the dependent variables.
pub fn total_d(p: &XPoly) -> XPoly {
    p.derivative().plus(&p.map(DiffPoly::zero(), |c| c.d_dx()))
}

fn lift(c: DiffPoly) -> XPoly {
    Poly::constant(c)
}

/// Replace variables by x-dependent expressions, derivatives included.
pub fn substitute(p: &XPoly, map: &BTreeMap<Var, XPoly>) -> XPoly {
    if map.is_empty() {
        return p.clone();
    }
    let mut cache: BTreeMap<(Var, u32), XPoly> = BTreeMap::new();
    let mut deriv = |v: Var, o: u32| -> XPoly {
        if let Some(x) = cache.get(&(v, o)) {
            return x.clone();
        }
        let mut x = map[&v].clone();
        for _ in 0..o {
            x = total_d(&x);
        }
        cache.insert((v, o), x.clone());
        x
    };
    let x = Poly::x(&DiffPoly::int(1));
    let mut out = Poly::zero(DiffPoly::zero());
    let mut xpow = lift(DiffPoly::int(1));
    for c in p.coeffs() {
        for (m, k) in c.terms() {
            let mut acc = lift(DiffPoly::constant(k.clone()));
            for &(v, o, pw) in m.factors() {
                let base = if map.contains_key(&v) { deriv(v, o) } else { lift(DiffPoly::term(crate::diffpoly::RhoFn::int(1), Monomial::factor(v, o, 1))) };
                acc = acc.times(&base.pow_u(pw));
            }
            out = out.plus(&acc.times(&xpow));
        }
        xpow = xpow.times(&x);
    }
    out
}

fn vars_of(p: &XPoly) -> Vec<Var> {
    let mut v: Vec<Var> = p.coeffs().iter().flat_map(|c| c.vars()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn negligible(p: &XPoly) -> bool {
    p.coeffs().iter().all(|c| c.is_negligible_poly())
}

/// Solve p = 0 for variable v, which must enter only as a bare v with a
/// numeric coefficient.
fn solve_for(p: &XPoly, v: Var) -> Option<XPoly> {
    let lin = Monomial::factor(v, 0, 1);
    let c = p.coeff(0).coeff(&lin);
    let k = c.constant_value()?;
    if k.is_zero() {
        return None;
    }
    let rest = p.minus(&lift(DiffPoly::constant(c)).times(&lift(DiffPoly::var(v))));
    if rest.coeffs().iter().any(|q| q.contains_var(v)) {
        return None;
    }
    let inv = k.recip().ok()?;
    Some(rest.map(DiffPoly::zero(), |q| q.scale_scalar(&inv).negate()))
}

/// Process `equations` in order, eliminating the highest variable ≥ 2 of
/// each non-trivial one, and reduce `last` to an ODE a + x·b = 0 in
/// variable 1.
pub fn eliminate(equations: &[XPoly], last: &XPoly) -> Result<Relation> {
    let mut subs: BTreeMap<Var, XPoly> = BTreeMap::new();
    for (i, e) in equations.iter().enumerate() {
        let e = substitute(e, &subs);
        if negligible(&e) {
            continue;
        }
        let cand: Vec<Var> = vars_of(&e).into_iter().filter(|v| *v >= 2).rev().collect();
        let Some((v, sol)) = cand.iter().find_map(|&v| solve_for(&e, v).map(|s| (v, s))) else {
            return Err(Error::Mismatch(format!("constraint {} cannot be solved for a higher coefficient: {}", i + 1, render(&e))));
        };
        let one: BTreeMap<Var, XPoly> = [(v, sol.clone())].into_iter().collect();
        for s in subs.values_mut() {
            *s = substitute(s, &one);
        }
        subs.insert(v, sol);
    }
    let f = substitute(last, &subs);
    if vars_of(&f).iter().any(|v| *v >= 2) || f.degree() > 1 {
        return Err(Error::Mismatch(format!("final constraint does not close on the first coefficient: {}", render(&f))));
    }
    Ok(Relation::new(f.coeff(0), f.coeff(1)))
}

pub fn render(p: &XPoly) -> String {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("x^{}*({})", i, c.render()))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::Q;

    #[test]
    fn total_derivative_and_substitution() {
        let x = Poly::x(&DiffPoly::int(1));
        // 𝔞₂ = x·𝔞₁ ⟹ 𝔞₂′ = 𝔞₁ + x𝔞₁′
        let map: BTreeMap<Var, XPoly> = [(2, x.times(&lift(DiffPoly::var(1))))].into_iter().collect();
        let p = lift(DiffPoly::var_d(2, 1));
        let expect = lift(DiffPoly::var(1)).plus(&x.times(&lift(DiffPoly::var_d(1, 1))));
        assert_eq!(substitute(&p, &map), expect);
        // 𝔞₂ − x = 0, then 𝔞₂″ + 𝔞₁ = 0 closes to 𝔞₁ = 0
        let e1 = lift(DiffPoly::var(2)).minus(&x);
        let last = lift(DiffPoly::var_d(2, 2).plus(&DiffPoly::var(1)).scale(&Q::from(3)));
        let r = eliminate(&[e1], &last).unwrap();
        assert_eq!(r, Relation::new(DiffPoly::var(1).scale(&Q::from(3)), DiffPoly::zero()));
    }
}
