use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::ring::{Differential, Field, Ring};
use crate::algebra::scalar::{render_q, Scalar, Q};
use crate::error::{Error, Result};

/// Dense univariate polynomial; `coeffs[i]` multiplies `x^i`. The zero
/// prototype lets the coefficient ring carry context (precision, nesting).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Poly<R> {
    coeffs: Vec<R>,
    zero: R,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl<R: Ring> Poly<R> {
    pub fn new(coeffs: Vec<R>, zero: R) -> Self {
        let mut p = Poly { coeffs, zero };
        p.trim();
        p
    }

    pub fn zero(zero: R) -> Self {
        Poly { coeffs: Vec::new(), zero }
    }

    pub fn constant(c: R) -> Self {
        let z = c.zero_like();
        Poly::new(vec![c], z)
    }

    pub fn monomial(c: R, n: usize) -> Self {
        let z = c.zero_like();
        let mut v = vec![z.clone(); n];
        v.push(c);
        Poly::new(v, z)
    }

    /// The indeterminate itself.
    pub fn x(proto: &R) -> Self {
        Poly::monomial(proto.one_like(), 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn leading(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn zero_coeff(&self) -> &R {
        &self.zero
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    /// Formal derivative with respect to the indeterminate.
    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Q::from(i as i64)))
            .collect();
        Poly::new(v, self.zero.clone())
    }

    pub fn derivative_n(&self, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    pub fn map<S: Ring>(&self, zero: S, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect(), zero)
    }

    pub fn scale_by(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.times(c)).collect(), self.zero.clone())
    }

    /// Multiply by x^n.
    pub fn shift(&self, n: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![self.zero.clone(); n];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v, self.zero.clone())
    }

    /// p(q(x)).
    pub fn compose(&self, q: &Poly<R>) -> Self {
        let mut acc = Poly::zero(self.zero.clone());
        for c in self.coeffs.iter().rev() {
            acc = acc.times(q).plus(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Drop every coefficient at index >= n.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect(), self.zero.clone())
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero_like(&self) -> Self {
        Poly::zero(self.zero.clone())
    }
    fn one_like(&self) -> Self {
        Poly::constant(self.zero.one_like())
    }
    fn plus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect();
        Poly::new(v, self.zero.clone())
    }
    fn minus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect();
        Poly::new(v, self.zero.clone())
    }
    fn times(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return self.zero_like();
        }
        let mut v = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].plus(&a.times(b));
            }
        }
        Poly::new(v, self.zero.clone())
    }
    fn negate(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.negate()).collect(), self.zero.clone())
    }
    fn scale(&self, q: &Q) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.scale(q)).collect(), self.zero.clone())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible())
    }
}

/// Coefficient-wise derivation (used for polynomials in λ whose
/// coefficients depend on T).
impl<R: Differential> Differential for Poly<R> {
    fn deriv(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.deriv()).collect(), self.zero.clone())
    }
}

impl<R: Field> Poly<R> {
    /// Euclidean division: self = q*d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Poly<R>) -> Result<(Poly<R>, Poly<R>)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero("polynomial division".into()));
        }
        let lc_inv = d.leading().inv()?;
        let dd = d.degree() as usize;
        let mut r = self.coeffs.clone();
        let nq = (self.degree() - d.degree() + 1).max(0) as usize;
        let mut q = vec![self.zero.clone(); nq];
        for k in (0..nq).rev() {
            let c = r[k + dd].times(&lc_inv);
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k + i] = r[k + i].minus(&c.times(dc));
                }
            }
            r[k + dd] = self.zero.clone();
            q[k] = c;
        }
        Ok((Poly::new(q, self.zero.clone()), Poly::new(r, self.zero.clone())))
    }

    pub fn monic(&self) -> Result<Poly<R>> {
        let l = self.leading().inv()?;
        Ok(self.scale_by(&l))
    }
}

impl Poly<Q> {
    pub fn from_q(v: Vec<Q>) -> Self {
        Poly::new(v, Q::ZERO)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Poly::from_q(v.iter().map(|&n| Q::from(n)).collect())
    }

    pub fn to_scalar(&self) -> Poly<Scalar> {
        self.map(Scalar::zero(), |c| Scalar::Exact(c.clone()))
    }

    pub fn eval_scalar(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Scalar::Exact(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::algebra::scalar::q_to_f64(c);
        }
        acc
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly<Q>) -> Poly<Q> {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic().expect("nonzero")
        }
    }

    /// Yun's square-free factorisation: returns (factor, multiplicity) with
    /// monic, pairwise coprime, nonconstant factors.
    pub fn squarefree(&self) -> Vec<(Poly<Q>, usize)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let f = self.monic().expect("nonzero");
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).expect("gcd divides").0;
        let mut c = fp.div_rem(&a0).expect("gcd divides").0;
        let mut d = c.minus(&b.derivative());
        let mut i = 1;
        while b.degree() >= 1 {
            let a = b.gcd(&d);
            if a.degree() >= 1 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).expect("gcd divides").0;
            c = d.div_rem(&a).expect("gcd divides").0;
            d = c.minus(&b.derivative());
            i += 1;
        }
        out
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm(&self) -> Vec<Poly<Q>> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            seq.push(r.negate());
        }
        seq
    }

    pub fn render(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Q::ZERO {
                continue;
            }
            let neg = crate::algebra::scalar::q_sign(c) < 0;
            let a = if neg { -c.clone() } else { c.clone() };
            let body = match i {
                0 => render_q(&a),
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{}^{}", var, i) };
                    if a == Q::ONE {
                        mono
                    } else {
                        format!("{}*{}", render_q(&a), mono)
                    }
                }
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

impl Poly<Scalar> {
    pub fn from_scalars(v: Vec<Scalar>) -> Self {
        Poly::new(v, Scalar::zero())
    }

    /// Exact rational image, if every coefficient is exact.
    pub fn to_exact(&self) -> Option<Poly<Q>> {
        let v: Option<Vec<Q>> = self.coeffs.iter().map(|c| c.as_q().cloned()).collect();
        v.map(Poly::from_q)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }

    pub fn render(&self, var: &str, digits: u32) -> String {
        if let Some(p) = self.to_exact() {
            return p.render(var);
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.render(digits);
            parts.push(match i {
                0 => s,
                1 => format!("({})*{}", s, var),
                _ => format!("({})*{}^{}", s, var, i),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for Poly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::q_ratio;

    #[test]
    fn trimmed_degree() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Poly::from_ints(&[0]).degree(), -1);
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(&[-1, 0, 0, 1]);
        let b = Poly::from_ints(&[-1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, Poly::from_ints(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn yun_multiplicities() {
        // (x-1)^2 (x+2)^3 x
        let l1 = Poly::from_ints(&[-1, 1]);
        let l2 = Poly::from_ints(&[2, 1]);
        let p = l1.pow_u(2).times(&l2.pow_u(3)).times(&Poly::from_ints(&[0, 1]));
        let sf = p.squarefree();
        let mults: Vec<usize> = sf.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
        assert_eq!(sf[1].0, l1);
        assert_eq!(sf[2].0, l2);
    }

    #[test]
    fn compose_and_eval() {
        let p = Poly::from_ints(&[1, 0, 1]);
        let q = Poly::from_ints(&[1, 1]);
        assert_eq!(p.compose(&q), Poly::from_ints(&[2, 2, 1]));
        assert_eq!(p.eval(&q_ratio(1, 2)), q_ratio(5, 4));
    }

    #[test]
    fn rendering() {
        let p = Poly::from_q(vec![q_ratio(-1, 2), Q::ZERO, Q::from(3)]);
        assert_eq!(p.render("r"), "3*r^2 - 1/2");
    }
}
