//! Regular two-cut expansions a(ε,T) = Σ a_k ε^{2k}, b(ε,T) = Σ b_k ε^{2k}
//! from the coupled system
//!     a (V + W₋)(V + W₊) = λ (V² − 1),   b (W + V₋)(W + V₊) = λ (W² − 1),
//! with V₀ = (λ + a₀ − b₀)/w, W₀ = (λ + b₀ − a₀)/w and
//! w² = λ² − 2(a₀+b₀)λ + (a₀−b₀)².
//!
//! Coefficients live in Jet: truncated Taylor series in δT around the
//! requested T, so every T-derivative needed by the shifts is available
//! numerically. At order 2k the unknowns enter through
//!     M (V_k, W_k) = (E⁰ + 4λ²/w² (a_k, b_k))/2,
//!     M⁻¹ = (1/(λw)) [[λ−s, 2a₀], [2b₀, λ−s]],  s = a₀ + b₀.

use serde_json::{json, Value};

use crate::algebra::bivariate::{bi_const, bi_sigma, bi_swap, bi_tau, d_sigma, d_tau, BiPoly};
use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Field, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::algebra::surd::Surd;
use crate::error::{Error, Result};
use crate::phase::{solve_two_cut, Potential};
use crate::twocut::jet::Jet;

pub type JSurd = Surd<Jet>;

/// W(a, b) = ∮V_λ (λ + a − b)/w as a polynomial in (a, b), stored in the
/// (σ, τ) slots of a BiPoly.
pub fn hodograph_ab(g: &Potential) -> BiPoly {
    let (a, b) = (bi_sigma(), bi_tau());
    let s = a.plus(&b).scale(&Q::from(2));
    let d = a.minus(&b);
    let p = d.times(&d);
    let vl: Poly<BiPoly> = g.v_lambda().map(bi_const(Q::ZERO), |c| bi_const(c.clone()));
    Surd::term(s, p, 1, d, bi_const(Q::ONE)).times_poly(&vl).residue()
}

pub fn bi_eval_jet(p: &BiPoly, a: &Jet, b: &Jet) -> Jet {
    let zero = a.zero_like();
    let mut acc = zero.clone();
    for c in p.coeffs().iter().rev() {
        let mut inner = zero.clone();
        for q in c.coeffs().iter().rev() {
            inner = inner.times(a).plus(&Jet::constant(Scalar::Exact(q.clone())));
        }
        acc = acc.times(b).plus(&inner);
    }
    acc
}

fn bi_eval(p: &BiPoly, a: &Scalar, b: &Scalar) -> Scalar {
    crate::algebra::bivariate::bi_eval_scalar(p, a, b)
}

/// Jets of (a₀(T), b₀(T)) of length `len` around T = t, from the base
/// solution by Newton steps with a frozen Jacobian (one order per step).
pub fn base_jets(g: &Potential, t: &Scalar, a0: &Scalar, b0: &Scalar, len: usize) -> Result<(Jet, Jet)> {
    let h = hodograph_ab(g);
    let hs = bi_swap(&h);
    let j = [
        [bi_eval(&d_sigma(&h), a0, b0), bi_eval(&d_tau(&h), a0, b0)],
        [bi_eval(&d_sigma(&hs), a0, b0), bi_eval(&d_tau(&hs), a0, b0)],
    ];
    let det = &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]);
    if det.is_negligible() {
        return Err(Error::SingularHodograph);
    }
    let inv = [
        [j[1][1].checked_div(&det)?, (-&j[0][1]).checked_div(&det)?],
        [(-&j[1][0]).checked_div(&det)?, j[0][0].checked_div(&det)?],
    ];
    let tj = Jet::variable(t.clone());
    let mut a = Jet::new(vec![a0.clone()], len);
    let mut b = Jet::new(vec![b0.clone()], len);
    for _ in 0..=len {
        let f1 = bi_eval_jet(&h, &a, &b).minus(&tj);
        let f2 = bi_eval_jet(&hs, &a, &b).minus(&tj);
        let sc = |x: &Jet, c: &Scalar| x.map(|v| v * c);
        let da = sc(&f1, &inv[0][0]).plus(&sc(&f2, &inv[0][1]));
        let db = sc(&f1, &inv[1][0]).plus(&sc(&f2, &inv[1][1]));
        a = a.minus(&da);
        b = b.minus(&db);
    }
    Ok((a, b))
}

/// D^s X / s! for s = 0, 1, …, built on demand.
struct Ladder {
    rows: Vec<Vec<JSurd>>,
}

impl Ladder {
    fn get(&mut self, k: usize, s: usize) -> JSurd {
        let row = &mut self.rows[k];
        while row.len() <= s {
            let m = row.len();
            let next = row[m - 1].deriv().scale(&(Q::ONE / Q::from(m as i64)));
            row.push(next);
        }
        row[s].clone()
    }
}

/// Order-n coefficient of X(T ± ε) where X = Σ X_k ε^{2k}; rows beyond
/// `known` count as zero.
fn shifted(l: &mut Ladder, known: usize, n: usize, sign: i32, zero: &JSurd) -> JSurd {
    let mut acc = zero.clone();
    let mut k = 0;
    while 2 * k <= n && k < known {
        let s = n - 2 * k;
        let t = l.get(k, s);
        acc = if sign < 0 && s % 2 == 1 { acc.minus(&t) } else { acc.plus(&t) };
        k += 1;
    }
    acc
}

#[derive(Clone, Debug)]
pub struct TwoCutExpansion {
    pub g: Potential,
    pub t: Scalar,
    pub ab0: (Scalar, Scalar),
    /// a_k, b_k as T-jets around t.
    pub a: Vec<Jet>,
    pub b: Vec<Jet>,
    /// V_k, W_k over the branch w² = λ² − 2(a₀+b₀)λ + (a₀−b₀)².
    pub v: Vec<JSurd>,
    pub w: Vec<JSurd>,
    pub k: usize,
    pub digits: u32,
}

/// Order-n coefficients of the two quadratic equations, using V_j, W_j,
/// a_j, b_j for j < `known` only.
#[allow(clippy::too_many_arguments)]
fn residual_pair(
    a: &[Jet],
    b: &[Jet],
    v: &[JSurd],
    w: &[JSurd],
    lv: &mut Ladder,
    lw: &mut Ladder,
    known: usize,
    n: usize,
    zero: &JSurd,
    lam: &JSurd,
) -> (JSurd, JSurd) {
    let pick = |x: &[JSurd], j: usize| if j.is_multiple_of(2) && j / 2 < known { x[j / 2].clone() } else { zero.clone() };
    let coef = |x: &[Jet], j: usize| if j.is_multiple_of(2) && j / 2 < known { Some(x[j / 2].clone()) } else { None };
    let mut out = Vec::new();
    for (own, cf, lo) in [(v, a, &mut *lw), (w, b, &mut *lv)] {
        let am: Vec<JSurd> = (0..=n).map(|j| pick(own, j).plus(&shifted(lo, known, j, -1, zero))).collect();
        let ap: Vec<JSurd> = (0..=n).map(|j| pick(own, j).plus(&shifted(lo, known, j, 1, zero))).collect();
        let mut e = zero.clone();
        for i in 0..=n {
            let Some(c) = coef(cf, i) else { continue };
            let mut conv = zero.clone();
            for j in 0..=(n - i) {
                conv = conv.plus(&am[j].times(&ap[n - i - j]));
            }
            e = e.plus(&conv.map_coeffs(|x| x.times(&c)));
        }
        let mut sq = zero.clone();
        for j in 0..=n {
            sq = sq.plus(&pick(own, j).times(&pick(own, n - j)));
        }
        let mut rhs = sq;
        if n == 0 {
            rhs = rhs.minus(&zero.one_like());
        }
        e = e.minus(&lam.times(&rhs));
        out.push(e);
    }
    let e2 = out.pop().expect("two equations");
    let e1 = out.pop().expect("two equations");
    (e1, e2)
}

/// Expansion to order ε^{2K} at T = t. `extra` additional T-derivatives
/// are kept on every coefficient beyond what the recursion consumes.
pub fn expand_two_cut_regular(g: &Potential, t: &Q, k_max: usize, digits: u32) -> Result<TwoCutExpansion> {
    let (a0, b0) = solve_two_cut(g, t, digits + 10)?;
    expand_two_cut_at(g, &Scalar::Exact(t.clone()), &a0, &b0, k_max, 2, digits)
}

pub fn expand_two_cut_at(
    g: &Potential,
    t: &Scalar,
    a0: &Scalar,
    b0: &Scalar,
    k_max: usize,
    extra: usize,
    digits: u32,
) -> Result<TwoCutExpansion> {
    let len = 2 * k_max + 1 + extra;
    let (ja, jb) = base_jets(g, t, a0, b0, len)?;
    let two = Q::from(2);
    let s_br = ja.plus(&jb).scale(&two);
    let d = ja.minus(&jb);
    let p_br = d.times(&d);
    let zero = JSurd::zero(s_br.clone(), p_br.clone());
    let one = Jet::constant(Scalar::one());
    let lam = JSurd::lambda(s_br.clone(), p_br.clone());
    let v0 = JSurd::term(s_br.clone(), p_br.clone(), 1, d.clone(), one.clone());
    let w0 = JSurd::term(s_br.clone(), p_br.clone(), 1, d.negate(), one.clone());
    let vl: Poly<Jet> = g.v_lambda().map(one.zero_like(), |c| Jet::constant(Scalar::Exact(c.clone())));
    let res = |x: &JSurd| x.times_poly(&vl).residue();

    // λ − s as a polynomial with jet coefficients, s = a₀ + b₀
    let s_half = ja.plus(&jb);
    let lam_minus_s = Poly::new(vec![s_half.negate(), one.clone()], one.zero_like());
    let unit_v_a = JSurd::term(s_br.clone(), p_br.clone(), 3, s_half.negate(), one.clone())
        .times_poly(&Poly::x(&one))
        .scale(&two);
    let unit_w_a = JSurd::term(s_br.clone(), p_br.clone(), 3, one.zero_like(), jb.scale(&Q::from(4)));
    let unit_v_b = JSurd::term(s_br.clone(), p_br.clone(), 3, one.zero_like(), ja.scale(&Q::from(4)));
    let unit_w_b = unit_v_a.clone();
    let m = [[res(&unit_v_a), res(&unit_v_b)], [res(&unit_w_a), res(&unit_w_b)]];
    let det = m[0][0].times(&m[1][1]).minus(&m[0][1].times(&m[1][0]));
    if det.value()?.is_negligible() {
        return Err(Error::SingularHodograph);
    }
    let det_inv = det.inv()?;

    let mut a = vec![ja.clone()];
    let mut b = vec![jb.clone()];
    let mut v = vec![v0.clone()];
    let mut w = vec![w0.clone()];
    let mut lv = Ladder { rows: vec![vec![v0]] };
    let mut lw = Ladder { rows: vec![vec![w0]] };
    for n in 1..=2 * k_max {
        let known = v.len();
        let (e1, e2) = residual_pair(&a, &b, &v, &w, &mut lv, &mut lw, known, n, &zero, &lam);
        if n % 2 == 1 {
            if !(e1.is_negligible() && e2.is_negligible()) {
                return Err(Error::Mismatch(format!("odd order {} of the two-cut system does not cancel", n)));
            }
            continue;
        }
        let half = Q::ONE / two.clone();
        let nv = e1.times_poly(&lam_minus_s).scale(&half).plus(&e2.map_coeffs(|x| x.times(&ja)));
        let nw = e1.map_coeffs(|x| x.times(&jb)).plus(&e2.times_poly(&lam_minus_s).scale(&half));
        let vk0 = nv.times_w_pow(1).div_lambda()?;
        let wk0 = nw.times_w_pow(1).div_lambda()?;
        let (rv, rw) = (res(&vk0), res(&wk0));
        let ak = rw.times(&m[0][1]).minus(&rv.times(&m[1][1])).times(&det_inv);
        let bk = rv.times(&m[1][0]).minus(&rw.times(&m[0][0])).times(&det_inv);
        let vk = vk0.plus(&unit_v_a.map_coeffs(|x| x.times(&ak))).plus(&unit_v_b.map_coeffs(|x| x.times(&bk)));
        let wk = wk0.plus(&unit_w_a.map_coeffs(|x| x.times(&ak))).plus(&unit_w_b.map_coeffs(|x| x.times(&bk)));
        a.push(ak);
        b.push(bk);
        lv.rows.push(vec![vk.clone()]);
        lw.rows.push(vec![wk.clone()]);
        v.push(vk);
        w.push(wk);
    }
    Ok(TwoCutExpansion {
        g: g.clone(),
        t: t.clone(),
        ab0: (a0.clone(), b0.clone()),
        a,
        b,
        v,
        w,
        k: k_max,
        digits,
    })
}

impl TwoCutExpansion {
    /// (a_k, b_k) at T.
    pub fn values(&self) -> Result<Vec<(Scalar, Scalar)>> {
        self.a.iter().zip(&self.b).map(|(x, y)| Ok((x.value()?, y.value()?))).collect()
    }

    /// n-th T-derivative of a_k (which = 0) or b_k (which = 1).
    pub fn derivative(&self, k: usize, which: usize, n: usize) -> Result<Scalar> {
        let j = if which == 0 { &self.a } else { &self.b };
        j.get(k)
            .ok_or_else(|| Error::TruncationExceeded(format!("order {} beyond K = {}", k, self.k)))?
            .derivative_at(n)
    }

    /// (R_{k,j}, S_{k,j}) of V_k = Σ_j (R_{k,j} + λS_{k,j})/w^{2j+1} at T.
    pub fn rs(&self, k: usize, j: usize) -> Result<(Scalar, Scalar)> {
        let n = 2 * j as i64 + 1;
        match self.v[k].terms().get(&n) {
            Some((r, s)) => Ok((r.value()?, s.value()?)),
            None => Ok((Scalar::zero(), Scalar::zero())),
        }
    }

    /// ∮V_λV_k − δ_{k0}T and ∮V_λW_k − δ_{k0}T at T.
    pub fn string_residuals(&self) -> Result<Vec<(Scalar, Scalar)>> {
        let zero = self.a[0].zero_like();
        let vl: Poly<Jet> = self.g.v_lambda().map(zero, |c| Jet::constant(Scalar::Exact(c.clone())));
        let mut out = Vec::new();
        for k in 0..=self.k {
            let mut rv = self.v[k].times_poly(&vl).residue().value()?;
            let mut rw = self.w[k].times_poly(&vl).residue().value()?;
            if k == 0 {
                rv = &rv - &self.t;
                rw = &rw - &self.t;
            }
            out.push((rv, rw));
        }
        Ok(out)
    }

    /// Direct re-evaluation of both quadratic equations at every order up
    /// to ε^{2K}, constant coefficients in λ and δT only.
    pub fn quadratic_residuals(&self) -> Result<Vec<Scalar>> {
        let (s, p) = self.v[0].branch();
        let zero = JSurd::zero(s.clone(), p.clone());
        let lam = JSurd::lambda(s.clone(), p.clone());
        let mut lv = Ladder { rows: self.v.iter().map(|x| vec![x.clone()]).collect() };
        let mut lw = Ladder { rows: self.w.iter().map(|x| vec![x.clone()]).collect() };
        let known = self.v.len();
        let mut out = Vec::new();
        for n in 0..=2 * self.k {
            let (e1, e2) = residual_pair(&self.a, &self.b, &self.v, &self.w, &mut lv, &mut lw, known, n, &zero, &lam);
            let mut worst = Scalar::zero();
            for e in [e1, e2] {
                for (x, y) in e.terms().values() {
                    for j in [x, y] {
                        if !j.is_empty() {
                            let c = j.value()?.abs();
                            if c > worst {
                                worst = c;
                            }
                        }
                    }
                }
            }
            out.push(worst);
        }
        Ok(out)
    }

    /// The partner expansion started from (b₀, a₀).
    pub fn swapped(&self) -> Result<TwoCutExpansion> {
        expand_two_cut_at(&self.g, &self.t, &self.ab0.1, &self.ab0.0, self.k, 2, self.digits)
    }

    pub fn to_json(&self, digits: u32) -> Result<Value> {
        let vals = self.values()?;
        Ok(json!({
            "T": self.t.render(digits),
            "a0": vals[0].0.render(digits),
            "b0": vals[0].1.render(digits),
            "K": self.k,
            "a": vals.iter().map(|x| x.0.render(digits)).collect::<Vec<_>>(),
            "b": vals.iter().map(|x| x.1.render(digits)).collect::<Vec<_>>(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::q_ratio;

    const DIGITS: u32 = 40;

    fn close(x: &Scalar, y: &Scalar, tol: f64) -> bool {
        (x - y).abs().to_f64() <= tol * (1.0 + y.abs().to_f64())
    }

    /// a₁, b₁ of the quartic from the closed forms in D = g₂² − 4Tg₄.
    fn quartic_oracle(g2: &Q, g4: &Q, t: &Q) -> [Scalar; 4] {
        let (g2s, g4s) = (Scalar::Exact(g2.clone()), Scalar::Exact(g4.clone()));
        let d = Scalar::Exact(g2 * g2 - Q::from(4) * t * g4);
        let sd = d.sqrt(DIGITS + 10).unwrap();
        let d52 = &(&d * &d) * &sd;
        let four_g4 = g4s.scale(&Q::from(4));
        let a0 = &(&sd - &g2s) / &four_g4;
        let b0 = &(&(-&sd) - &g2s) / &four_g4;
        let base = &(&g2s * &g2s) + &Scalar::Exact(Q::from(4) * t * g4);
        let gsd = &g2s * &sd;
        let den = d52.scale(&Q::from(2));
        let a1 = -&(&(&g4s * &(&base - &gsd)) / &den);
        let b1 = &(&g4s * &(&base + &gsd)) / &den;
        [a0, b0, a1, b1]
    }

    #[test]
    fn quartic_first_correction() {
        let (g2, g4) = (Q::from(-2), Q::ONE);
        let g = Potential::quartic(g2.clone(), g4.clone()).unwrap();
        for t in [q_ratio(1, 2), q_ratio(1, 7), q_ratio(9, 10)] {
            let e = expand_two_cut_regular(&g, &t, 1, DIGITS).unwrap();
            let vals = e.values().unwrap();
            let [a0, b0, a1, b1] = quartic_oracle(&g2, &g4, &t);
            assert!(close(&vals[0].0, &a0, 1e-30), "{} vs {}", vals[0].0, a0);
            assert!(close(&vals[0].1, &b0, 1e-30));
            assert!(close(&vals[1].0, &a1, 1e-25), "{} vs {}", vals[1].0, a1);
            assert!(close(&vals[1].1, &b1, 1e-25), "{} vs {}", vals[1].1, b1);
        }
    }

    #[test]
    fn first_order_structure() {
        let g = Potential::from_ints(&[-3, -1, 1]).unwrap();
        let t = q_ratio(1, 3);
        let e = expand_two_cut_regular(&g, &t, 1, DIGITS).unwrap();
        let (a0, b0) = e.values().unwrap()[0].clone();
        let a1 = e.values().unwrap()[1].0.clone();
        let b1 = e.values().unwrap()[1].1.clone();
        let b0pp = e.derivative(0, 1, 2).unwrap();
        let (r10, s10) = e.rs(1, 0).unwrap();
        assert!(close(&r10, &a1.scale(&Q::from(2)), 1e-28));
        assert!(s10.abs().to_f64() < 1e-28);
        let (_, s11) = e.rs(1, 1).unwrap();
        let expect = &(&(&(&a0 + &b0) * &a1).scale(&Q::from(2)) + &(&a0 * &b1).scale(&Q::from(4))) + &(&a0 * &b0pp).scale(&Q::from(2));
        assert!(close(&s11, &expect, 1e-25), "{} vs {}", s11, expect);
    }

    #[test]
    fn residuals_and_swap() {
        let g = Potential::from_ints(&[-2, 1]).unwrap();
        let e = expand_two_cut_regular(&g, &q_ratio(1, 2), 2, DIGITS).unwrap();
        for (x, y) in e.string_residuals().unwrap() {
            assert!(x.abs().to_f64() < 1e-25 && y.abs().to_f64() < 1e-25);
        }
        for r in e.quadratic_residuals().unwrap() {
            assert!(r.to_f64() < 1e-20, "{}", r);
        }
        let s = e.swapped().unwrap();
        for (p, q) in e.values().unwrap().iter().zip(s.values().unwrap()) {
            assert!(close(&p.0, &q.1, 1e-25) && close(&p.1, &q.0, 1e-25));
        }
    }
}
