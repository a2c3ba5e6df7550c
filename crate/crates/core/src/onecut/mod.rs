//! Regular one-cut expansion r = Σ r_k ε^{2k}, one-cut critical points and
//! the double-scaled series at a critical point.

pub mod engine;
mod hodo;

use serde_json::{json, Value};

pub use engine::{quadratic_residual, solve_u_series, USeries};
pub use hodo::{HodoCtx, HodoFn};

use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Ring};
use crate::algebra::roots::{algebraic_roots, Domain};
use crate::algebra::scalar::{q_sign, Scalar, Q};
use crate::algebra::structured::StructuredRational;
use crate::algebra::{double_factorial_odd, q_ratio};
use crate::diffpoly::{DiffPoly, Relation};
use crate::error::{Error, Result};
use crate::phase::{one_cut_roots, solve_one_cut, Potential, Status};

/// c_j(r) = W^{(j)}(r)/(2^j (2j−1)!!) as a polynomial in r.
pub fn c_poly(g: &Potential, j: usize) -> Poly<Q> {
    let d = g.hodograph_w().derivative_n(j);
    let f = Q::from(2).pow(j) * double_factorial_odd(j as u64);
    d.scale(&(Q::ONE / f))
}

/// Symbolic one-cut series: P_k with coefficients as functions of r₀.
pub fn one_cut_series(g: &Potential, k_max: usize) -> Result<USeries<HodoFn>> {
    let ctx = HodoCtx::new(g);
    let r0 = HodoFn::r0(&ctx);
    let r0p = r0.deriv();
    let cs: Vec<HodoFn> = (0..=3 * k_max + 1).map(|j| HodoFn::poly(&ctx, c_poly(g, j))).collect();
    solve_u_series(&r0, &r0p, k_max, |_, e0| {
        // Σ_j c_j U_{k,j} = 0 with U_{k,j} = E⁰_j/2 + 2r_k δ_{j1}, c₁ = W′/2
        let mut acc = r0.zero_like();
        for (j, e) in e0.coeffs().iter().enumerate().skip(1) {
            let cj = cs.get(j).cloned().unwrap_or_else(|| HodoFn::poly(&ctx, c_poly(g, j)));
            acc = acc.plus(&cj.times(e));
        }
        Ok(acc.scale(&q_ratio(-1, 2)).div_w1())
    })
}

#[derive(Clone, Debug)]
pub struct OneCutExpansion {
    pub g: Potential,
    pub t: Scalar,
    pub r0: Scalar,
    /// r₀, r₁, …, r_K as functions of r₀.
    pub coeffs: Vec<HodoFn>,
    pub k: usize,
    pub series: USeries<HodoFn>,
}

pub fn expand_regular(g: &Potential, t: &Q, k: usize, digits: u32) -> Result<OneCutExpansion> {
    let r0 = solve_one_cut(g, t, digits)?;
    let w1 = g.hodograph_w().derivative().eval_scalar(&r0);
    if w1.is_negligible() {
        return Err(Error::CriticalPointHit);
    }
    let series = one_cut_series(g, k)?;
    Ok(OneCutExpansion { g: g.clone(), t: Scalar::Exact(t.clone()), r0, coeffs: series.r.clone(), k, series })
}

impl OneCutExpansion {
    pub fn values(&self) -> Result<Vec<Scalar>> {
        self.coeffs.iter().map(|c| c.eval(&self.r0)).collect()
    }

    /// d^n r_k/dT^n as a function of r₀.
    pub fn derivative(&self, k: usize, n: usize) -> HodoFn {
        self.coeffs[k].deriv_n(n)
    }

    /// U_{k,j} as a function of r₀.
    pub fn u_coefficient(&self, k: usize, j: usize) -> HodoFn {
        self.series.p[k].coeff(j)
    }

    /// Σ_k r_k ε^{2k}.
    pub fn eval_series(&self, eps: &Scalar) -> Result<Scalar> {
        let e2 = eps * eps;
        let mut acc = Scalar::zero();
        let mut p = Scalar::one();
        for v in self.values()? {
            acc = &acc + &(&v * &p);
            p = &p * &e2;
        }
        Ok(acc)
    }

    /// Σ_j c_j U_{k,j} for k = 1..K, all zero for a consistent series.
    pub fn string_residuals(&self) -> Vec<HodoFn> {
        let ctx = self.coeffs[0].ctx().clone();
        (1..=self.k)
            .map(|k| {
                let pk = &self.series.p[k];
                let mut acc = self.coeffs[0].zero_like();
                for (j, u) in pk.coeffs().iter().enumerate().skip(1) {
                    acc = acc.plus(&HodoFn::poly(&ctx, c_poly(&self.g, j)).times(u));
                }
                acc
            })
            .collect()
    }

    pub fn to_json(&self, digits: u32) -> Result<Value> {
        let vals = self.values()?;
        Ok(json!({
            "r0": self.r0.render(digits),
            "coeffs": self.coeffs.iter().map(|c| c.render("r0")).collect::<Vec<_>>(),
            "eval": {
                "T": self.t.render(digits),
                "values": vals.iter().map(|v| v.render(digits)).collect::<Vec<_>>(),
            }
        }))
    }
}

/// U₀…U_K as structured rationals on the branch (0, 4r₀); U_k has
/// numerators U_{k,j}λ^{j+1} over w^{2j+1}.
pub fn u_series_coefficients(g: &Potential, r0: &Scalar, k: usize) -> Result<Vec<StructuredRational<Scalar>>> {
    let s = one_cut_series(g, k)?;
    let lam = |n: usize| Poly::monomial(Scalar::one(), n);
    let mut out = Vec::new();
    for (kk, pk) in s.p.iter().enumerate() {
        let mut terms = Vec::new();
        if kk == 0 {
            terms.push((0, lam(1)));
        } else {
            for (j, u) in pk.coeffs().iter().enumerate().skip(1) {
                if u.is_zero() {
                    continue;
                }
                let v = u.eval(r0)?;
                terms.push((j, lam(j + 1).scale_by(&v)));
            }
        }
        out.push(StructuredRational::one_cut(r0.clone(), terms));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneCutCritical {
    pub r_c: Scalar,
    pub t_c: Scalar,
    pub m: usize,
    pub c_m: Scalar,
}

impl OneCutCritical {
    /// Validate Definition-type conditions at a rational r_c:
    /// W′ = … = W^{(m−1)} = 0, W^{(m)} ≠ 0, W(r_c) > 0, r_c > 0.
    pub fn at(g: &Potential, r_c: &Q) -> Result<Self> {
        if q_sign(r_c) <= 0 {
            return Err(Error::InvalidInput("r_c must be positive".into()));
        }
        let w = g.hodograph_w();
        let t_c = w.eval(r_c);
        if q_sign(&t_c) <= 0 {
            return Err(Error::InvalidInput("T_c = W(r_c) must be positive".into()));
        }
        let mut m = 1;
        while w.derivative_n(m).eval(r_c) == Q::ZERO {
            m += 1;
            if m > g.p() + 1 {
                return Err(Error::InvalidInput("W is constant".into()));
            }
        }
        if m < 2 {
            return Err(Error::InvalidInput("W′(r_c) ≠ 0: not a singular solution".into()));
        }
        let c_m = c_poly(g, m).eval(r_c);
        Ok(OneCutCritical { r_c: Scalar::Exact(r_c.clone()), t_c: Scalar::Exact(t_c), m, c_m: Scalar::Exact(c_m) })
    }

    pub fn c_j(&self, g: &Potential, j: usize) -> Scalar {
        c_poly(g, j).eval_scalar(&self.r_c)
    }

    pub fn to_json(&self, digits: u32) -> Value {
        json!({
            "type": "one-cut",
            "rc": self.r_c.render(digits),
            "Tc": self.t_c.render(digits),
            "m": self.m,
            "cm": self.c_m.render(digits),
        })
    }
}

/// Positive roots of W′ with W(r_c) > 0 that bound a one-cut regular
/// region (checked at T_c ± 10⁻³).
pub fn find_critical(g: &Potential, digits: u32) -> Result<Vec<OneCutCritical>> {
    let w = g.hodograph_w();
    let w1 = w.derivative();
    if w1.degree() <= 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (root, mult) in algebraic_roots(&w1, &Domain::positive())? {
        if root.sign_of(&w) <= 0 {
            continue;
        }
        let m = mult + 1;
        let cm = root.eval(&c_poly(g, m), digits);
        if cm.is_zero() {
            continue;
        }
        let r_c = root.to_scalar(digits);
        let t_c = root.eval(&w, digits);
        let crit = OneCutCritical { r_c, t_c, m, c_m: cm };
        if bounds_regular_region(g, &crit, digits)? {
            out.push(crit);
        }
    }
    Ok(out)
}

fn bounds_regular_region(g: &Potential, crit: &OneCutCritical, digits: u32) -> Result<bool> {
    let delta = q_ratio(1, 1000);
    let tc = crit.t_c.to_q();
    let rc = crit.r_c.to_f64();
    for t in [&tc - &delta, &tc + &delta] {
        if q_sign(&t) <= 0 {
            continue;
        }
        let roots = one_cut_roots(g, &t, 20)?;
        let nearest = roots
            .into_iter()
            .min_by(|a, b| (a.to_f64() - rc).abs().partial_cmp(&(b.to_f64() - rc).abs()).expect("finite"));
        if let Some(r) = nearest {
            let ph = crate::phase::one_cut_candidate(g, &t, r, digits.min(30));
            if ph.status == Status::Regular {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// U^{[k,j]} in 𝔯₁, 𝔯₂, … (variable k is 𝔯_k, ρ is r_c) and the
/// constraint ladder Σ_j c_j U^{[k,j]} = δ_{km} x.
#[derive(Clone, Debug)]
pub struct ScaledSeries {
    pub m: usize,
    pub r_c: Scalar,
    /// u[k][j], j = 0..=k (u[k][0] = 0 for k ≥ 1).
    pub u: Vec<Vec<DiffPoly>>,
    /// relations[k−1] for k = 1..=K, ρ substituted.
    pub relations: Vec<Relation>,
}

/// Symbolic U^{[k,j]} with ρ kept as a symbol, independent of the model.
pub fn scaled_u(k_max: usize) -> Result<Vec<Vec<DiffPoly>>> {
    let rho = DiffPoly::rho();
    let s = solve_u_series(&rho, &DiffPoly::zero(), k_max, |k, _| Ok(DiffPoly::var(k as u32)))?;
    Ok(s.p.iter().map(|p| (0..=p.coeffs().len().max(1) - 1).map(|j| p.coeff(j)).collect()).collect())
}

pub fn scaled_series(g: &Potential, crit: &OneCutCritical, k_max: usize) -> Result<ScaledSeries> {
    if k_max < crit.m {
        return Err(Error::InvalidInput(format!("K = {} must be at least m = {}", k_max, crit.m)));
    }
    let u = scaled_u(k_max)?;
    let mut relations = Vec::new();
    for (k, row) in u.iter().enumerate().skip(1) {
        let mut a = DiffPoly::zero();
        for (j, ukj) in row.iter().enumerate().skip(1) {
            let cj = crit.c_j(g, j);
            if cj.is_zero() {
                continue;
            }
            a = a.plus(&ukj.subst_rho(&crit.r_c)?.scale_scalar(&cj));
        }
        let b = if k == crit.m { DiffPoly::int(-1) } else { DiffPoly::zero() };
        relations.push(Relation::new(a, b));
    }
    Ok(ScaledSeries { m: crit.m, r_c: crit.r_c.clone(), u, relations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::residue_at_infinity;
    use crate::algebra::scalar::q_int;

    #[test]
    fn u1_coefficients() {
        let g = Potential::from_ints(&[1, 1]).unwrap();
        let s = one_cut_series(&g, 2).unwrap();
        let ctx = s.r[0].ctx().clone();
        let r0 = HodoFn::r0(&ctx);
        let r0p = r0.deriv();
        assert_eq!(s.p[1].coeff(1), s.r[1].scale(&q_int(2)));
        assert_eq!(s.p[1].coeff(2), r0.times(&r0p.deriv()).scale(&q_int(2)));
        assert_eq!(s.p[1].coeff(3), r0.times(&r0p).times(&r0p).scale(&q_int(10)));
        assert_eq!(s.p[2].coeff(1), s.r[2].scale(&q_int(2)));
        for e in quadratic_residual(&s, &r0p) {
            assert!(e.is_zero());
        }
    }

    #[test]
    fn ere1_identity() {
        for g in [Potential::from_ints(&[1, 1]).unwrap(), Potential::bmp(), Potential::from_ints(&[2, -1, 3, 1]).unwrap()] {
            let s = one_cut_series(&g, 1).unwrap();
            let ctx = HodoCtx::new(&g);
            let w2 = HodoFn::poly(&ctx, ctx.w2.clone());
            let w3 = HodoFn::poly(&ctx, ctx.w2.derivative());
            let r0 = HodoFn::r0(&ctx);
            let inv = |x: &HodoFn, n: u32| x.times(&HodoFn::new(&ctx, Poly::constant(Q::ONE), n));
            let expect = inv(&w2.times(&w2), 4).scale(&q_ratio(1, 6)).minus(&inv(&w3, 3).scale(&q_ratio(1, 12))).times(&r0);
            assert_eq!(s.r[1], expect);
        }
    }

    #[test]
    fn bmp_r1_at_120() {
        let e = expand_regular(&Potential::bmp(), &q_int(120), 1, 40).unwrap();
        // r₁ = r₀/(64800 (T/60 − 1)²) = 2/64800
        assert_eq!(e.values().unwrap()[1], Scalar::ratio(2, 64800));
    }

    #[test]
    fn structured_u_satisfies_string_equation() {
        let g = Potential::from_ints(&[1, 1]).unwrap();
        let t = q_int(14);
        let e = expand_regular(&g, &t, 3, 40).unwrap();
        assert_eq!(e.r0, Scalar::int(1));
        let us = u_series_coefficients(&g, &e.r0, 3).unwrap();
        let vl = g.v_lambda().to_scalar();
        assert_eq!(residue_at_infinity(&us[0], &vl).unwrap(), Scalar::Exact(t));
        for u in &us[1..] {
            assert_eq!(residue_at_infinity(u, &vl).unwrap(), Scalar::zero());
        }
        assert!(e.string_residuals().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn critical_points() {
        let bmp = find_critical(&Potential::bmp(), 40).unwrap();
        assert_eq!(bmp.len(), 1);
        assert_eq!((bmp[0].r_c.clone(), bmp[0].t_c.clone(), bmp[0].m, bmp[0].c_m.clone()), (Scalar::int(1), Scalar::int(60), 3, Scalar::int(3)));
        assert!(find_critical(&Potential::from_ints(&[1, 1]).unwrap(), 40).unwrap().is_empty());
        assert!(find_critical(&Potential::from_ints(&[-2, 1]).unwrap(), 40).unwrap().is_empty());
        assert!(find_critical(&Potential::gaussian(), 40).unwrap().is_empty());
        let sext = Potential::from_ints(&[150, -20, 1]).unwrap();
        let c = OneCutCritical::at(&sext, &q_int(1)).unwrap();
        assert_eq!((c.m, c.t_c.clone(), c.c_m.clone()), (2, Scalar::int(120), Scalar::int(-10)));
    }

    #[test]
    fn scaled_golden() {
        let u = scaled_u(3).unwrap();
        let r = |k: u32, o: u32| DiffPoly::var_d(k, o);
        let rho = DiffPoly::rho();
        let i = |n: i64| DiffPoly::int(n);
        assert_eq!(u[1][1], r(1, 0).scale(&q_int(2)));
        assert_eq!(u[2][2], i(6).times(&r(1, 0).pow_u(2)).plus(&i(2).times(&rho).times(&r(1, 2))));
        let u32_ = i(12).times(&r(1, 0)).times(&r(2, 0))
            .plus(&i(2).times(&r(1, 0)).times(&r(1, 2)))
            .plus(&i(2).times(&rho).times(&r(2, 2)))
            .plus(&DiffPoly::q(q_ratio(1, 6)).times(&rho).times(&r(1, 4)));
        assert_eq!(u[3][2], u32_);
        let u33 = i(20).times(&r(1, 0).pow_u(3))
            .plus(&i(10).times(&rho).times(&r(1, 1).pow_u(2)))
            .plus(&i(20).times(&rho).times(&r(1, 0)).times(&r(1, 2)))
            .plus(&i(2).times(&rho.pow_u(2)).times(&r(1, 4)));
        assert_eq!(u[3][3], u33);
    }
}
