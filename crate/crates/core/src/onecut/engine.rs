//! Order-by-order solution of r(U + U₋)(U + U₊) = λ(U² − 1) with
//! U = U₀·P(z), z = 1/(λ − 4r₀), U₀² = 1 + 4r₀z.
//!
//! Dividing by U₀²/z gives
//!     z·r·(P + P₋)(P + P₊) − (1 + 4r₀z)P² + 1 = 0,
//! where P± is P shifted by ±ε in the slow variable. Shifting acts on a
//! coefficient q_j z^j through D(q)_j = q_j′ + r₀′(4j − 2)q_{j−1}.

use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::Q;
use crate::error::{Error, Result};

/// P_k (z-polynomials, P₀ = 1) and r_k.
#[derive(Clone, Debug)]
pub struct USeries<C: Ring> {
    pub p: Vec<Poly<C>>,
    pub r: Vec<C>,
}

fn shift_op<C: Differential>(q: &Poly<C>, r0p: &C) -> Poly<C> {
    let zero = r0p.zero_like();
    let n = q.coeffs().len();
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut c = if j < n { q.coeff(j).deriv() } else { zero.clone() };
        if j >= 1 && !r0p.is_zero() {
            let k = Q::from(4 * j as i64 - 2);
            c = c.plus(&q.coeff(j - 1).times(r0p).scale(&k));
        }
        out.push(c);
    }
    Poly::new(out, zero)
}

/// Shift ladders D^s P_k / s! built on demand.
struct Shifts<C: Ring> {
    r0p: C,
    table: Vec<Vec<Poly<C>>>,
}

impl<C: Differential> Shifts<C> {
    fn push(&mut self, p: Poly<C>) {
        self.table.push(vec![p]);
    }

    fn get(&mut self, k: usize, s: usize) -> Option<Poly<C>> {
        let row = self.table.get_mut(k)?;
        while row.len() <= s {
            let m = row.len();
            let next = shift_op(&row[m - 1], &self.r0p).scale(&(Q::ONE / Q::from(m as i64)));
            row.push(next);
        }
        Some(row[s].clone())
    }

    /// Order-n coefficient of P shifted by sign·ε; rows not yet pushed
    /// count as zero.
    fn shifted(&mut self, n: usize, sign: i32, zero: &Poly<C>) -> Poly<C> {
        let mut acc = zero.clone();
        let mut k = 0;
        while 2 * k <= n {
            let s = n - 2 * k;
            if let Some(t) = self.get(k, s) {
                acc = if sign < 0 && s % 2 == 1 { acc.minus(&t) } else { acc.plus(&t) };
            }
            k += 1;
        }
        acc
    }
}

/// Solve to order ε^{2K}. `solve_r(k, E⁰)` returns r_k from the order-2k
/// residual computed with P_k = r_k = 0; then P_k = (E⁰ + 4z·r_k)/2.
pub fn solve_u_series<C: Differential>(
    r0: &C,
    r0p: &C,
    k_max: usize,
    mut solve_r: impl FnMut(usize, &Poly<C>) -> Result<C>,
) -> Result<USeries<C>> {
    let zero = r0.zero_like();
    let pzero = Poly::zero(zero.clone());
    let one = Poly::constant(r0.one_like());
    let z = Poly::x(&zero);
    let lin = Poly::new(vec![r0.one_like(), r0.scale(&Q::from(4))], zero.clone());
    let mut shifts = Shifts { r0p: r0p.clone(), table: Vec::new() };
    shifts.push(one.clone());
    let mut p = vec![one.clone()];
    let mut r = vec![r0.clone()];
    let two = one.scale(&Q::from(2));
    let mut a = vec![two.clone()];
    let mut b = vec![two.clone()];
    let mut c = vec![two.times(&two)];
    let pn = |p: &Vec<Poly<C>>, n: usize| -> Option<Poly<C>> {
        if n.is_multiple_of(2) {
            p.get(n / 2).cloned()
        } else {
            None
        }
    };
    for n in 1..=2 * k_max {
        let own = pn(&p, n).unwrap_or_else(|| pzero.clone());
        a.push(own.plus(&shifts.shifted(n, -1, &pzero)));
        b.push(own.plus(&shifts.shifted(n, 1, &pzero)));
        let cn = conv(&a, &b, n, &pzero);
        let e0 = residual_at(n, &p, &r, &c, &cn, &z, &lin, &pzero);
        if n % 2 == 1 {
            if !e0.coeffs().iter().all(|x| x.is_negligible()) {
                return Err(Error::Mismatch(format!("odd order {} of the quadratic identity does not cancel", n)));
            }
            c.push(cn);
            continue;
        }
        let k = n / 2;
        if !e0.coeff(0).is_negligible() {
            return Err(Error::Mismatch(format!("order {}: constant term of U_k/U_0 nonzero", n)));
        }
        let rk = solve_r(k, &e0)?;
        let pk = e0.plus(&z.times(&Poly::constant(rk.scale(&Q::from(4))))).scale(&(Q::ONE / Q::from(2)));
        let pk = strip_constant(pk);
        r.push(rk);
        p.push(pk.clone());
        shifts.push(pk.clone());
        let twice = pk.scale(&Q::from(2));
        a[n] = a[n].plus(&twice);
        b[n] = b[n].plus(&twice);
        c.push(conv(&a, &b, n, &pzero));
    }
    Ok(USeries { p, r })
}

fn strip_constant<C: Ring>(p: Poly<C>) -> Poly<C> {
    let mut v = p.coeffs().to_vec();
    if !v.is_empty() {
        v[0] = v[0].zero_like();
    }
    Poly::new(v, p.zero_coeff().clone())
}

fn conv<C: Ring>(a: &[Poly<C>], b: &[Poly<C>], n: usize, zero: &Poly<C>) -> Poly<C> {
    let mut acc = zero.clone();
    for i in 0..=n {
        acc = acc.plus(&a[i].times(&b[n - i]));
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn residual_at<C: Ring>(
    n: usize,
    p: &[Poly<C>],
    r: &[C],
    c: &[Poly<C>],
    cn: &Poly<C>,
    z: &Poly<C>,
    lin: &Poly<C>,
    zero: &Poly<C>,
) -> Poly<C> {
    let mut left = zero.clone();
    let mut i = 0;
    while 2 * i <= n {
        if let Some(ri) = r.get(i) {
            let cm = if 2 * i == 0 { cn } else { &c[n - 2 * i] };
            left = left.plus(&cm.times(&Poly::constant(ri.clone())));
        }
        i += 1;
    }
    let left = z.times(&left);
    let mut sq = zero.clone();
    for i in 0..=n {
        if i % 2 == 0 && (n - i).is_multiple_of(2) {
            if let (Some(x), Some(y)) = (p.get(i / 2), p.get((n - i) / 2)) {
                sq = sq.plus(&x.times(y));
            }
        }
    }
    left.minus(&lin.times(&sq))
}

/// Direct re-evaluation of the quadratic identity from a finished series,
/// order by order up to ε^{2K}; used as a residual check.
pub fn quadratic_residual<C: Differential>(s: &USeries<C>, r0p: &C) -> Vec<Poly<C>> {
    let k_max = s.p.len() - 1;
    let nmax = 2 * k_max;
    let zero = s.r[0].zero_like();
    let pzero = Poly::zero(zero.clone());
    let z = Poly::x(&zero);
    let lin = Poly::new(vec![zero.one_like(), s.r[0].scale(&Q::from(4))], zero.clone());
    // P±[n] = Σ_k (±1)^s D^s P_k / s!, s = n − 2k
    let mut pm = vec![pzero.clone(); nmax + 1];
    let mut pp = vec![pzero.clone(); nmax + 1];
    for (k, pk) in s.p.iter().enumerate() {
        let mut d = pk.clone();
        let mut fact = Q::ONE;
        for sh in 0..=(nmax - 2 * k) {
            if sh > 0 {
                d = shift_op(&d, r0p);
                fact *= Q::from(sh as i64);
            }
            let t = d.scale(&(Q::ONE / fact.clone()));
            let n = 2 * k + sh;
            pp[n] = pp[n].plus(&t);
            pm[n] = if sh % 2 == 1 { pm[n].minus(&t) } else { pm[n].plus(&t) };
        }
    }
    let pser = |n: usize| if n.is_multiple_of(2) { s.p[n / 2].clone() } else { pzero.clone() };
    let a: Vec<Poly<C>> = (0..=nmax).map(|n| pser(n).plus(&pm[n])).collect();
    let b: Vec<Poly<C>> = (0..=nmax).map(|n| pser(n).plus(&pp[n])).collect();
    let mut out = Vec::new();
    for n in 0..=nmax {
        let mut acc = pzero.clone();
        for i in 0..=n / 2 {
            let cm = conv(&a, &b, n - 2 * i, &pzero);
            acc = acc.plus(&cm.times(&Poly::constant(s.r[i].clone())));
        }
        let mut sq = pzero.clone();
        for i in 0..=n {
            sq = sq.plus(&pser(i).times(&pser(n - i)));
        }
        let mut e = z.times(&acc).minus(&lin.times(&sq));
        if n == 0 {
            e = e.plus(&Poly::constant(zero.one_like()));
        }
        out.push(e);
    }
    out
}
