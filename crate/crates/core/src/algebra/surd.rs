use std::collections::BTreeMap;

use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::Q;
use crate::error::{Error, Result};

/// Element of R[λ, w, 1/w] modulo w² = λ² − Sλ + P, written uniquely as
/// Σ_n (A_n + λ B_n) w^{−n} with A_n, B_n in R.
#[derive(Clone, Debug)]
pub struct Surd<R: Ring> {
    s: R,
    p: R,
    terms: BTreeMap<i64, (R, R)>,
}

impl<R: Ring> PartialEq for Surd<R> {
    fn eq(&self, o: &Self) -> bool {
        self.minus(o).is_zero()
    }
}

/// Coefficients e_i of (1 − S u + P u²)^α, i < len.
pub fn branch_series<R: Ring>(s: &R, p: &R, alpha: &Q, len: usize) -> Vec<R> {
    let mut e: Vec<R> = Vec::with_capacity(len);
    if len == 0 {
        return e;
    }
    e.push(s.one_like());
    let f1 = s.negate();
    let f2 = p.clone();
    for i in 1..len {
        let mut acc = s.zero_like();
        let k1 = alpha - Q::from(i as i64 - 1);
        acc = acc.plus(&f1.times(&e[i - 1]).scale(&k1));
        if i >= 2 {
            let k2 = alpha * Q::from(2) - Q::from(i as i64 - 2);
            acc = acc.plus(&f2.times(&e[i - 2]).scale(&k2));
        }
        e.push(acc.scale(&(Q::ONE / Q::from(i as i64))));
    }
    e
}

impl<R: Ring> Surd<R> {
    pub fn zero(s: R, p: R) -> Self {
        Surd { s, p, terms: BTreeMap::new() }
    }

    pub fn branch(&self) -> (&R, &R) {
        (&self.s, &self.p)
    }

    fn proto(&self) -> R {
        self.s.zero_like()
    }

    /// (a + λ b) w^{−n}.
    pub fn term(s: R, p: R, n: i64, a: R, b: R) -> Self {
        let mut x = Surd::zero(s, p);
        x.add_term(n, a, b);
        x
    }

    pub fn constant(s: R, p: R, c: R) -> Self {
        let z = c.zero_like();
        Surd::term(s, p, 0, c, z)
    }

    pub fn lambda(s: R, p: R) -> Self {
        let z = s.zero_like();
        let o = s.one_like();
        Surd::term(s, p, 0, z, o)
    }

    /// w^{−n}.
    pub fn w_pow(s: R, p: R, n: i64) -> Self {
        let z = s.zero_like();
        let o = s.one_like();
        Surd::term(s, p, n, o, z)
    }

    pub fn with_branch(&self, terms: BTreeMap<i64, (R, R)>) -> Self {
        let mut x = Surd { s: self.s.clone(), p: self.p.clone(), terms };
        x.clean();
        x
    }

    fn clean(&mut self) {
        self.terms.retain(|_, (a, b)| !(a.is_zero() && b.is_zero()));
    }

    fn add_term(&mut self, n: i64, a: R, b: R) {
        let z = self.proto();
        let e = self.terms.entry(n).or_insert((z.clone(), z));
        e.0 = e.0.plus(&a);
        e.1 = e.1.plus(&b);
        if e.0.is_zero() && e.1.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, (R, R)> {
        &self.terms
    }

    /// p(λ) w^{−n}, reduced into the basis.
    pub fn from_poly(s: R, p: R, poly: &Poly<R>, n: i64) -> Self {
        let mut out = Surd::zero(s, p);
        out.add_poly(poly, n);
        out
    }

    fn add_poly(&mut self, poly: &Poly<R>, n: i64) {
        // divide by the monic λ² − Sλ + P
        let mut c: Vec<R> = poly.coeffs().to_vec();
        let mut shift = n;
        while !c.is_empty() {
            if c.len() <= 2 {
                let z = self.proto();
                let a = c.first().cloned().unwrap_or_else(|| z.clone());
                let b = c.get(1).cloned().unwrap_or(z);
                self.add_term(shift, a, b);
                break;
            }
            let d = c.len() - 1;
            let mut q = vec![self.proto(); d - 1];
            for k in (0..d - 1).rev() {
                let lead = c[k + 2].clone();
                q[k] = lead.clone();
                c[k + 1] = c[k + 1].plus(&lead.times(&self.s));
                c[k] = c[k].minus(&lead.times(&self.p));
                c[k + 2] = self.proto();
            }
            let z = self.proto();
            self.add_term(shift, c[0].clone(), c.get(1).cloned().unwrap_or(z));
            c = q;
            while c.last().is_some_and(|x| x.is_zero()) {
                c.pop();
            }
            shift -= 2;
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        let terms = self.terms.iter().map(|(n, (a, b))| (*n, (f(a), f(b)))).collect();
        self.with_branch(terms)
    }

    pub fn scale_by(&self, c: &R) -> Self {
        self.map_coeffs(|x| x.times(c))
    }

    /// Multiply by a polynomial in λ.
    pub fn times_poly(&self, q: &Poly<R>) -> Self {
        let mut out = Surd::zero(self.s.clone(), self.p.clone());
        for (n, (a, b)) in &self.terms {
            let pa = Poly::constant(a.clone()).plus(&Poly::monomial(b.clone(), 1));
            out.add_poly(&pa.times(q), *n);
        }
        out
    }

    /// Multiply by w^{−k}.
    pub fn times_w_pow(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(n, v)| (n + k, v.clone())).collect();
        self.with_branch(terms)
    }

    /// Laurent coefficients at λ = ∞ of every power λ^e with e >= lowest.
    pub fn laurent(&self, lowest: i64) -> BTreeMap<i64, R> {
        let mut out: BTreeMap<i64, R> = BTreeMap::new();
        for (n, (a, b)) in &self.terms {
            for (deg, c) in [(0i64, a), (1i64, b)] {
                if c.is_zero() {
                    continue;
                }
                // λ^deg w^{−n} = Σ_i e_i λ^{deg − n − i}
                let top = deg - n;
                if top < lowest {
                    continue;
                }
                let len = (top - lowest + 1) as usize;
                let alpha = Q::from_parts_signed((-n).into(), 2.into());
                let e = branch_series(&self.s, &self.p, &alpha, len);
                for (i, ei) in e.iter().enumerate() {
                    let k = top - i as i64;
                    let z = self.proto();
                    let slot = out.entry(k).or_insert(z);
                    *slot = slot.plus(&ei.times(c));
                }
                // non-negative even n with deg - n >= 0 are genuine polynomials;
                // the binomial series terminates for them automatically
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// ∮ dλ/(2πi) around all branch points: the λ^{−1} coefficient at infinity.
    pub fn residue(&self) -> R {
        self.laurent(-1).remove(&-1).unwrap_or_else(|| self.proto())
    }

    /// Polynomial part of the expansion at infinity.
    pub fn poly_part(&self) -> Poly<R> {
        let l = self.laurent(0);
        let deg = l.keys().next_back().copied().unwrap_or(-1);
        let v: Vec<R> = (0..=deg.max(-1)).map(|k| l.get(&k).cloned().unwrap_or_else(|| self.proto())).collect();
        Poly::new(v, self.proto())
    }

    /// Exact division by λ. For P ≠ 0 the numerator of each parity class
    /// must vanish at λ = 0.
    pub fn div_lambda(&self) -> Result<Self> {
        if self.p.is_zero() {
            // 1/λ = (λ − S)/w²
            let q = Poly::new(vec![self.s.negate(), self.s.one_like()], self.proto());
            return Ok(self.times_poly(&q).times_w_pow(2));
        }
        let mut out = Surd::zero(self.s.clone(), self.p.clone());
        let w2 = Poly::new(vec![self.p.clone(), self.s.negate(), self.s.one_like()], self.proto());
        for parity in [0i64, 1] {
            let ns: Vec<i64> = self.terms.keys().copied().filter(|n| n.rem_euclid(2) == parity).collect();
            let Some(&nmax) = ns.iter().max() else { continue };
            let mut num = Poly::zero(self.proto());
            for n in ns {
                let (a, b) = &self.terms[&n];
                let lin = Poly::new(vec![a.clone(), b.clone()], self.proto());
                num = num.plus(&lin.times(&w2.pow_u(((nmax - n) / 2) as u32)));
            }
            if !num.coeff(0).is_negligible() {
                return Err(Error::DivisionByZero("surd not divisible by λ".into()));
            }
            let quot = Poly::new(num.coeffs().iter().skip(1).cloned().collect(), self.proto());
            out.add_poly(&quot, nmax);
        }
        Ok(out)
    }

    /// Swap the branch data for another pair while keeping coefficients.
    pub fn rebranch(&self, s: R, p: R) -> Self {
        Surd { s, p, terms: self.terms.clone() }
    }
}

impl<R: Ring> Ring for Surd<R> {
    fn zero_like(&self) -> Self {
        Surd::zero(self.s.clone(), self.p.clone())
    }
    fn one_like(&self) -> Self {
        Surd::constant(self.s.clone(), self.p.clone(), self.s.one_like())
    }
    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (n, (a, b)) in &o.terms {
            out.add_term(*n, a.clone(), b.clone());
        }
        out
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = self.zero_like();
        for (n1, (a1, b1)) in &self.terms {
            for (n2, (a2, b2)) in &o.terms {
                let n = n1 + n2;
                let bb = b1.times(b2);
                let a = a1.times(a2).minus(&self.p.times(&bb));
                let b = a1.times(b2).plus(&a2.times(b1)).plus(&self.s.times(&bb));
                out.add_term(n, a, b);
                if !bb.is_zero() {
                    let z = self.proto();
                    out.add_term(n - 2, bb, z);
                }
            }
        }
        out
    }
    fn negate(&self) -> Self {
        self.map_coeffs(|x| x.negate())
    }
    fn scale(&self, q: &Q) -> Self {
        self.map_coeffs(|x| x.scale(q))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.terms.values().all(|(a, b)| a.is_negligible() && b.is_negligible())
    }
}

impl<R: Differential> Differential for Surd<R> {
    /// Derivation acting on coefficients and on the branch (S, P).
    fn deriv(&self) -> Self {
        let mut out = self.zero_like();
        let (ds, dp) = (self.s.deriv(), self.p.deriv());
        let branch_moves = !(ds.is_zero() && dp.is_zero());
        for (n, (a, b)) in &self.terms {
            out.add_term(*n, a.deriv(), b.deriv());
            if branch_moves && *n != 0 {
                // d(w^{−n}) = −(n/2) (P′ − λS′) w^{−n−2}
                let k = Q::from_parts_signed((-n).into(), 2.into());
                let lin = Surd::term(self.s.clone(), self.p.clone(), 0, dp.clone(), ds.negate());
                let base = Surd::term(self.s.clone(), self.p.clone(), n + 2, a.clone(), b.clone());
                out = out.plus(&base.times(&lin).scale(&k));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{q_int, q_ratio};

    fn br(r0: i64) -> (Q, Q) {
        (q_int(4 * r0), Q::ZERO)
    }

    #[test]
    fn lambda_over_w_residue() {
        // λ/w with σ=0, τ=4r0: residue 2 r0
        let (s, p) = br(3);
        let x = Surd::term(s, p, 1, Q::ZERO, Q::ONE);
        assert_eq!(x.residue(), q_int(6));
    }

    #[test]
    fn one_over_w_residue_is_one() {
        let s = q_ratio(7, 3);
        let p = q_ratio(5, 2);
        let x = Surd::w_pow(s, p, 1);
        assert_eq!(x.residue(), Q::ONE);
    }

    #[test]
    fn w_squared_is_polynomial() {
        let s = q_int(3);
        let p = q_int(2);
        let w = Surd::w_pow(s.clone(), p.clone(), -1);
        let w2 = w.times(&w);
        let expect = Surd::from_poly(s, p, &Poly::from_ints(&[2, -3, 1]), 0);
        assert_eq!(w2, expect);
    }

    #[test]
    fn division_by_lambda() {
        let s = q_int(5);
        let p = q_int(4);
        let l = Surd::lambda(s.clone(), p.clone());
        let x = Surd::term(s.clone(), p.clone(), 3, q_int(2), q_int(-7)).plus(&Surd::w_pow(s, p, -2));
        let y = x.times(&l).div_lambda().unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn division_by_lambda_degenerate_branch() {
        let (s, p) = br(1);
        let l = Surd::lambda(s.clone(), p.clone());
        let x = Surd::term(s, p, 1, q_int(1), q_int(2));
        assert_eq!(x.times(&l).div_lambda().unwrap(), x);
        assert_eq!(x.div_lambda().unwrap().times(&l), x);
    }

    #[test]
    fn brute_force_series_depth_six() {
        // λ/w = (1 − 4r u)^{−1/2} = Σ C(2i,i) r^i u^i
        let r = q_ratio(2, 5);
        let x = Surd::term(r.clone() * q_int(4), Q::ZERO, 1, Q::ZERO, Q::ONE);
        let l = x.laurent(-6);
        let mut c = Q::ONE;
        for i in 0..=6i64 {
            assert_eq!(l.get(&-i).cloned().unwrap_or(Q::ZERO), c.clone() * r.pow(i as usize));
            c = c * q_int(2 * (2 * i + 1)) / q_int(i + 1);
        }
    }
}
