//! Polynomials in (σ, τ): outer index is the power of τ, inner of σ.

use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::algebra::scalar::{q_sign, q_to_f64, render_q, Scalar, Q};

pub type BiPoly = Poly<Poly<Q>>;

fn inner_zero() -> Poly<Q> {
    Poly::zero(Q::ZERO)
}

pub fn bi_zero() -> BiPoly {
    Poly::zero(inner_zero())
}

pub fn bi_const(c: Q) -> BiPoly {
    Poly::constant(Poly::constant(c))
}

pub fn bi_sigma() -> BiPoly {
    Poly::constant(Poly::x(&Q::ZERO))
}

pub fn bi_tau() -> BiPoly {
    Poly::x(&Poly::constant(Q::ONE))
}

/// Coefficient of σ^i τ^j.
pub fn bi_coeff(p: &BiPoly, i: usize, j: usize) -> Q {
    p.coeff(j).coeff(i)
}

pub fn d_sigma(p: &BiPoly) -> BiPoly {
    p.map(inner_zero(), |c| c.derivative())
}

pub fn d_tau(p: &BiPoly) -> BiPoly {
    p.derivative()
}

pub fn bi_eval_f64(p: &BiPoly, s: f64, t: f64) -> f64 {
    let mut acc = 0.0;
    for c in p.coeffs().iter().rev() {
        acc = acc * t + c.eval_f64(s);
    }
    acc
}

pub fn bi_eval_q(p: &BiPoly, s: &Q, t: &Q) -> Q {
    let mut acc = Q::ZERO;
    for c in p.coeffs().iter().rev() {
        acc = acc * t + c.eval(s);
    }
    acc
}

pub fn bi_eval_scalar(p: &BiPoly, s: &Scalar, t: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * t) + &c.eval_scalar(s);
    }
    acc
}

/// p(σ, τ) ↦ p(τ, σ).
pub fn bi_swap(p: &BiPoly) -> BiPoly {
    let mut out = bi_zero();
    for (j, c) in p.coeffs().iter().enumerate() {
        for (i, a) in c.coeffs().iter().enumerate() {
            let m = Poly::monomial(Poly::monomial(a.clone(), j), i);
            out = out.plus(&m);
        }
    }
    out
}

/// Restrict to σ = value, leaving a polynomial in τ.
pub fn bi_at_sigma(p: &BiPoly, s: &Q) -> Poly<Q> {
    Poly::from_q(p.coeffs().iter().map(|c| c.eval(s)).collect())
}

pub fn bi_render(p: &BiPoly) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut mons: Vec<(usize, usize, Q)> = Vec::new();
    for (j, c) in p.coeffs().iter().enumerate() {
        for (i, a) in c.coeffs().iter().enumerate() {
            if *a != Q::ZERO {
                mons.push((i, j, a.clone()));
            }
        }
    }
    mons.sort_by(|x, y| (y.0 + y.1).cmp(&(x.0 + x.1)).then(y.0.cmp(&x.0)));
    for (i, j, a) in mons {
        let neg = q_sign(&a) < 0;
        let abs = if neg { -a } else { a };
        let mut f = Vec::new();
        if abs != Q::ONE || (i == 0 && j == 0) {
            f.push(render_q(&abs));
        }
        for (e, v) in [(i, "s"), (j, "t")] {
            match e {
                0 => {}
                1 => f.push(v.to_string()),
                _ => f.push(format!("{}^{}", v, e)),
            }
        }
        let body = f.join("*");
        if parts.is_empty() {
            parts.push(if neg { format!("-{}", body) } else { body });
        } else {
            parts.push(format!("{} {}", if neg { "-" } else { "+" }, body));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// f64 value of an exact rational, re-exported for callers that only need
/// coarse seeds.
pub fn qf(q: &Q) -> f64 {
    q_to_f64(q)
}
