//! F(σ,τ) = ∮V_λ √((λ−σ)(λ−τ)) + T(σ+τ)/2 and merging points of two cuts.

use serde_json::{json, Value};

use crate::algebra::bivariate::{bi_const, bi_eval_q, bi_sigma, bi_tau, d_sigma, d_tau, BiPoly};
use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::algebra::roots::{algebraic_roots, Domain};
use crate::algebra::scalar::{Scalar, Q};
use crate::algebra::surd::Surd;
use crate::error::{Error, Result};
use crate::phase::Potential;

#[derive(Clone, Debug, PartialEq)]
pub struct FFunction {
    pub t: Q,
    pub f: BiPoly,
}

impl FFunction {
    pub fn f_sigma(&self) -> BiPoly {
        d_sigma(&self.f)
    }

    pub fn f_tau(&self) -> BiPoly {
        d_tau(&self.f)
    }

    /// 2(τ−σ)F_στ − (F_σ − F_τ); zero for every potential.
    pub fn epd_residual(&self) -> BiPoly {
        let mixed = d_tau(&d_sigma(&self.f));
        let lhs = bi_tau().minus(&bi_sigma()).times(&mixed).scale(&Q::from(2));
        lhs.minus(&self.f_sigma().minus(&self.f_tau()))
    }

    /// ∂^k F/∂σ^k at (σ, τ).
    pub fn d_sigma_n(&self, k: usize, sigma: &Q, tau: &Q) -> Q {
        let mut p = self.f.clone();
        for _ in 0..k {
            p = d_sigma(&p);
        }
        bi_eval_q(&p, sigma, tau)
    }
}

pub fn build_f(g: &Potential, t: &Q) -> FFunction {
    let (s, p) = (bi_sigma().plus(&bi_tau()), bi_sigma().times(&bi_tau()));
    let vl: Poly<BiPoly> = g.v_lambda().map(bi_const(Q::ZERO), |c| bi_const(c.clone()));
    let w = Surd::w_pow(s.clone(), p, -1);
    let f = w.times_poly(&vl).residue().plus(&s.scale(&(t / Q::from(2))));
    FFunction { t: t.clone(), f }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergingPoint {
    pub r_c: Scalar,
    pub t_c: Scalar,
    pub m: usize,
    /// φ₁ … φ_m.
    pub phi: Vec<Scalar>,
    pub gamma1: Scalar,
}

impl MergingPoint {
    pub fn phi_m(&self) -> &Scalar {
        &self.phi[self.m - 1]
    }

    pub fn to_json(&self, digits: u32) -> Value {
        json!({
            "rc": self.r_c.render(digits),
            "Tc": self.t_c.render(digits),
            "m": self.m,
            "phi": self.phi.iter().map(|x| x.render(digits)).collect::<Vec<_>>(),
            "gamma1": self.gamma1.render(digits),
        })
    }
}

/// Branch w_c² = λ(λ − 4r) over Q[r].
fn merged_branch() -> (Poly<Q>, Poly<Q>) {
    (Poly::from_ints(&[0, 4]), Poly::zero(Q::ZERO))
}

fn lift(vl: &Poly<Q>) -> Poly<Poly<Q>> {
    vl.map(Poly::zero(Q::ZERO), |c| Poly::constant(c.clone()))
}

fn condition_of(vl: &Poly<Q>) -> Poly<Q> {
    let (s, p) = merged_branch();
    Surd::w_pow(s, p, 1).times_poly(&lift(vl)).residue()
}

fn phi_of(vl: &Poly<Q>, jmax: usize) -> Result<Vec<Poly<Q>>> {
    let (s, p) = merged_branch();
    let lin = Poly::new(vec![Poly::from_ints(&[0, -4]), Poly::constant(Q::ONE)], Poly::zero(Q::ZERO));
    let mut x = Surd::w_pow(s, p, 1).times_poly(&lift(vl)).times_poly(&lin);
    let mut out = vec![x.residue()];
    for _ in 0..jmax {
        x = x.div_lambda()?;
        out.push(x.residue());
    }
    Ok(out)
}

/// ∮V_λ/w_c as a polynomial in r; its roots are the candidate r_c.
pub fn merging_condition(g: &Potential) -> Poly<Q> {
    condition_of(&g.v_lambda())
}

/// φ_j(r) = ∮V_λ(λ−4r)/(λ^j w_c) for j = 0..=jmax.
pub fn phi_polys(g: &Potential, jmax: usize) -> Result<Vec<Poly<Q>>> {
    phi_of(&g.v_lambda(), jmax)
}

/// γ_j(r) = ∮V_λ λ/((λ−4r)^j w_c) for j = 0..=jmax.
pub fn gamma_polys(g: &Potential, jmax: usize) -> Vec<Poly<Q>> {
    let (s, p) = merged_branch();
    let lam = Poly::x(&Poly::constant(Q::ONE));
    let mut x = Surd::w_pow(s, p, 1).times_poly(&lift(&g.v_lambda())).times_poly(&lam);
    let mut out = vec![x.residue()];
    for _ in 0..jmax {
        // λ/(λ−4r) = λ²/w_c²
        x = x.times_poly(&lam).times_w_pow(2);
        out.push(x.residue());
    }
    out
}

/// φ_j and γ_j at a given r_c for j = 1..=jmax.
pub fn phi_gamma_at(g: &Potential, r_c: &Scalar, jmax: usize) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let phis = phi_polys(g, jmax)?;
    let gams = gamma_polys(g, jmax);
    let ev = |p: &Poly<Q>| p.eval_scalar(r_c);
    Ok((phis[1..].iter().map(ev).collect(), gams[1..].iter().map(ev).collect()))
}

/// Merging points: ∮V_λ/w_c = 0 and ∮V_λλ/w_c = T_c at r_c > 0 with
/// T_c > 0; the order m is the first nonvanishing φ_m, and γ₁ ≠ 0.
pub fn find_merging(g: &Potential, digits: u32) -> Result<Vec<MergingPoint>> {
    let cond = merging_condition(g);
    if cond.degree() <= 0 {
        return Ok(Vec::new());
    }
    let jmax = g.p() + 1;
    let phis = phi_polys(g, jmax)?;
    let gams = gamma_polys(g, 1);
    let w = g.hodograph_w();
    let mut out = Vec::new();
    for (root, _) in algebraic_roots(&cond, &Domain::positive())? {
        if root.sign_of(&w) <= 0 {
            continue;
        }
        if root.sign_of(&gams[1]) == 0 {
            continue;
        }
        let Some(m) = (1..=jmax).find(|&j| root.sign_of(&phis[j]) != 0) else { continue };
        let phi = (1..=m).map(|j| root.eval(&phis[j], digits)).collect();
        out.push(MergingPoint {
            r_c: root.to_scalar(digits),
            t_c: root.eval(&w, digits),
            m,
            phi,
            gamma1: root.eval(&gams[1], digits),
        });
    }
    Ok(out)
}

/// The degree-(m+1) potential with leading coupling 1 that has a merging
/// point of order m at the rational r_c: the couplings g₂…g_{2m} solve the
/// linear conditions ∮V_λ/w_c = 0 and φ₁ = … = φ_{m−1} = 0.
pub fn merging_model(r_c: &Q, m: usize) -> Result<Potential> {
    if m == 0 {
        return Err(Error::InvalidInput("merging order must be at least 1".into()));
    }
    // column k − 1 holds the conditions for V_λ = kλ^{k−1}
    let column = |k: usize| -> Result<Vec<Q>> {
        let vl = Poly::monomial(Q::from(k as i64), k - 1);
        let phis = phi_of(&vl, m - 1)?;
        let mut col = vec![condition_of(&vl).eval(r_c)];
        col.extend(phis[1..].iter().map(|p| p.eval(r_c)));
        Ok(col)
    };
    let mut a = vec![vec![Q::ZERO; m + 1]; m];
    for k in 1..=m + 1 {
        for (i, v) in column(k)?.into_iter().enumerate() {
            a[i][k - 1] = if k == m + 1 { -v } else { v };
        }
    }
    let mut g = solve_linear_q(a)?;
    g.push(Q::ONE);
    Potential::new(g)
}

/// Solve A x = b for an n×(n+1) augmented rational matrix.
fn solve_linear_q(mut a: Vec<Vec<Q>>) -> Result<Vec<Q>> {
    let n = a.len();
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c] != Q::ZERO).ok_or(Error::SingularHodograph)?;
        a.swap(c, piv);
        let p = a[c][c].clone();
        for j in c..=n {
            a[c][j] = &a[c][j] / &p;
        }
        for r in 0..n {
            if r != c && a[r][c] != Q::ZERO {
                let f = a[r][c].clone();
                for j in c..=n {
                    let v = &a[c][j] * &f;
                    a[r][j] -= v;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bivariate::bi_eval_q;
    use crate::algebra::scalar::{q_int, q_ratio};

    #[test]
    fn quartic_f_closed_form() {
        let (g2, g4, t) = (q_ratio(-3, 2), q_ratio(5, 4), q_ratio(2, 7));
        let g = Potential::quartic(g2.clone(), g4.clone()).unwrap();
        let f = build_f(&g, &t);
        let (s, u) = (bi_sigma(), bi_tau());
        let c = |q: &Q| bi_const(q.clone());
        let expect = c(&(-g4.clone()))
            .times(&s.pow_u(3))
            .minus(&c(&g2).times(&s.pow_u(2)))
            .plus(&c(&g4).times(&u).times(&s.pow_u(2)))
            .plus(&c(&(q_int(2) * &g2)).times(&u).times(&s))
            .plus(&c(&g4).times(&u.pow_u(2)).times(&s))
            .minus(&c(&g2).times(&u.pow_u(2)))
            .minus(&c(&g4).times(&u.pow_u(3)))
            .scale(&q_ratio(1, 8))
            .plus(&s.plus(&u).scale(&(t.clone() / q_int(2))));
        assert_eq!(f.f, expect);
        assert!(f.epd_residual().is_zero());
        // F_σσ(0, τ_c) = −g₂/2 with τ_c = −g₂/g₄
        let tau_c = -g2.clone() / g4.clone();
        assert_eq!(f.d_sigma_n(2, &Q::ZERO, &tau_c), -g2 / q_int(2));
    }

    #[test]
    fn critical_equations_match_endpoint_system() {
        let g = Potential::from_ints(&[3, -2, 1]).unwrap();
        let t = q_ratio(1, 3);
        let f = build_f(&g, &t);
        let sys = crate::phase::TwoCutSystem::new(&g);
        // F_σ and F_τ are combinations of ∮V_λ/w and ∮λV_λ/w − T
        let (sg, tu) = (q_ratio(1, 5), q_ratio(9, 4));
        let e1 = bi_eval_q(&sys.e1, &sg, &tu);
        let e2 = bi_eval_q(&sys.e2, &sg, &tu) - t.clone();
        let fs = bi_eval_q(&f.f_sigma(), &sg, &tu);
        let ft = bi_eval_q(&f.f_tau(), &sg, &tu);
        // ∂w/∂σ = −(λ−τ)/(2w) ⟹ F_σ = −(e2 − τ e1)/2, F_τ = −(e2 − σ e1)/2
        assert_eq!(fs, -(e2.clone() - tu.clone() * e1.clone()) / q_int(2));
        assert_eq!(ft, -(e2 - sg * e1) / q_int(2));
    }

    #[test]
    fn quartic_merging() {
        let g = Potential::from_ints(&[-2, 1]).unwrap();
        let mp = find_merging(&g, 40).unwrap();
        assert_eq!(mp.len(), 1);
        let p = &mp[0];
        assert_eq!((p.r_c.clone(), p.t_c.clone(), p.m), (Scalar::ratio(1, 2), Scalar::int(1), 1));
        assert_eq!(p.phi, vec![Scalar::int(-4)]);
        assert!(find_merging(&Potential::from_ints(&[1, 1]).unwrap(), 40).unwrap().is_empty());
    }

    #[test]
    fn order_two_model() {
        let g = merging_model(&q_int(1), 2).unwrap();
        assert_eq!(g, Potential::from_ints(&[-6, -3, 1]).unwrap());
        let mp = find_merging(&g, 40).unwrap();
        let p = mp.iter().find(|p| p.r_c == Scalar::int(1)).unwrap();
        assert_eq!((p.m, p.t_c.clone(), p.phi_m().clone()), (2, Scalar::int(12), Scalar::int(-12)));
        assert_eq!(p.phi[0], Scalar::zero());
        assert_eq!(merging_model(&q_ratio(1, 2), 1).unwrap(), Potential::from_ints(&[-2, 1]).unwrap());
    }

    #[test]
    fn definition_two_order_test() {
        // ∂^{k+1}F/∂σ^{k+1}(0,τ_c) = −((2k−1)!!/2^{k+1}) ∮(λ−τ_c)V_λ/(λ^k w_c)
        for (g, rc) in [(Potential::from_ints(&[-2, 1]).unwrap(), q_ratio(1, 2)), (merging_model(&q_int(1), 2).unwrap(), q_int(1))] {
            let tc = g.hodograph_w().eval(&rc);
            let f = build_f(&g, &tc);
            let tau = q_int(4) * &rc;
            let phis = phi_polys(&g, 3).unwrap();
            assert_eq!(f.d_sigma_n(1, &Q::ZERO, &tau), Q::ZERO);
            assert_eq!(bi_eval_q(&f.f_tau(), &Q::ZERO, &tau), Q::ZERO);
            for k in 1..=3u64 {
                let lhs = f.d_sigma_n(k as usize + 1, &Q::ZERO, &tau);
                let c = crate::algebra::double_factorial_odd(k) / Q::from(2u64.pow(k as u32 + 1));
                assert_eq!(lhs, -c * phis[k as usize].eval(&rc));
            }
        }
    }
}
