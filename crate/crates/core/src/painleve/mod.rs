//! Painlevé I and II hierarchies and the critical ODE of a critical model.

pub mod ladder;

use serde_json::{json, Value};

use crate::algebra::ring::Ring;
use crate::algebra::scalar::{Scalar, Q};
use crate::diffpoly::{DiffPoly, Names, Relation};
use crate::error::{Error, Result};
use crate::onecut::{scaled_series, OneCutCritical};
use crate::phase::Potential;
use crate::twocut::symmetric::symmetric_scaled_series;
use crate::twocut::MergingPoint;

fn u(o: u32) -> DiffPoly {
    DiffPoly::var_d(1, o)
}

/// R₀ … R_m of ∂R_{m+1} = (ρ∂³ + 4u∂ + 2u′)R_m, R₀ = 1, ρ symbolic.
pub fn gelfand_dikii(m: usize) -> Result<Vec<DiffPoly>> {
    let rho = DiffPoly::rho();
    let mut out = vec![DiffPoly::int(1)];
    for k in 0..m {
        let r = &out[k];
        let rhs = rho
            .times(&r.d_dx_n(3))
            .plus(&u(0).times(&r.d_dx()).scale(&Q::from(4)))
            .plus(&u(1).times(r).scale(&Q::from(2)));
        out.push(rhs.integrate_exact()?);
    }
    Ok(out)
}

/// (R_k, S_k) for k = 0..=m of R_{k+1} = −ρR_k″ + 2uS_k, 2ρS_k′ = uR_k′,
/// seeded with R₀ = −u/(2ρ), S₀ = −u²/(8ρ²).
pub fn pii_hierarchy(m: usize) -> Result<Vec<(DiffPoly, DiffPoly)>> {
    let rho = DiffPoly::rho();
    let inv_rho = |k: i32, c: Q| DiffPoly::constant(crate::diffpoly::RhoFn::monomial(Scalar::Exact(c), -k));
    let r0 = u(0).times(&inv_rho(1, Q::from(-1) / Q::from(2)));
    let s0 = u(0).pow_u(2).times(&inv_rho(2, Q::from(-1) / Q::from(8)));
    let mut out = vec![(r0, s0)];
    for k in 0..m {
        let (r, s) = &out[k];
        let rn = rho.times(&r.d_dx_n(2)).negate().plus(&u(0).times(s).scale(&Q::from(2)));
        let sn = u(0).times(&rn.d_dx()).integrate_exact()?.times(&inv_rho(1, Q::ONE / Q::from(2)));
        out.push((rn, sn));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    PI,
    PII,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::PI => "PI",
            Family::PII => "PII",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Critical {
    OneCut(OneCutCritical),
    Merging(MergingPoint),
}

impl Critical {
    pub fn m(&self) -> usize {
        match self {
            Critical::OneCut(c) => c.m,
            Critical::Merging(p) => p.m,
        }
    }

    pub fn r_c(&self) -> &Scalar {
        match self {
            Critical::OneCut(c) => &c.r_c,
            Critical::Merging(p) => &p.r_c,
        }
    }

    pub fn to_json(&self, digits: u32) -> Value {
        match self {
            Critical::OneCut(c) => c.to_json(digits),
            Critical::Merging(p) => {
                let mut v = p.to_json(digits);
                v["type"] = json!("two-cut-merging");
                v
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct HierarchyMember {
    pub family: Family,
    pub m: usize,
    pub r_c: Scalar,
    /// c_m (PI) or φ_m (PII).
    pub constant: Scalar,
    /// R_m at ρ = r_c.
    pub r_m: DiffPoly,
    pub s_m: Option<DiffPoly>,
    /// Canonical integer form of the ODE.
    pub equation: Relation,
}

impl HierarchyMember {
    pub fn render(&self) -> String {
        self.equation.render()
    }

    pub fn latex(&self) -> String {
        self.equation.to_latex(&Names::default())
    }

    pub fn to_json(&self, digits: u32) -> Value {
        let mut terms = Vec::new();
        for (part, p) in [("1", &self.equation.a), ("x", &self.equation.b)] {
            for (mono, c) in p.terms().iter().rev() {
                let coeff = c.constant_value().unwrap_or_else(Scalar::zero);
                let mut deg_u = DiffPoly::term(crate::diffpoly::RhoFn::int(1), mono.clone()).render();
                if part == "x" {
                    deg_u = if mono.is_one() { "x".into() } else { format!("x*{}", deg_u) };
                }
                terms.push(json!({"coeff": coeff.render(digits), "term": deg_u}));
            }
        }
        json!({
            "family": self.family.name(),
            "m": self.m,
            "rc": self.r_c.render(digits),
            "constant": self.constant.render(digits),
            "equation": self.render(),
            "equation_terms": terms,
            "latex": self.latex(),
        })
    }
}

/// The critical ODE: c_mR_m(u) − x = 0 (one-cut) or
/// 2r_cφ_mR_m(u) + xu = 0 (merging), in canonical form.
pub fn emit_critical_ode(crit: &Critical) -> Result<HierarchyMember> {
    match crit {
        Critical::OneCut(c) => {
            let r = gelfand_dikii(c.m)?.pop().expect("nonempty").subst_rho(&c.r_c)?;
            let eq = Relation::new(r.scale_scalar(&c.c_m), DiffPoly::int(-1)).canonical()?;
            Ok(HierarchyMember { family: Family::PI, m: c.m, r_c: c.r_c.clone(), constant: c.c_m.clone(), r_m: r, s_m: None, equation: eq })
        }
        Critical::Merging(p) => {
            let (r, s) = pii_hierarchy(p.m)?.pop().expect("nonempty");
            let (r, s) = (r.subst_rho(&p.r_c)?, s.subst_rho(&p.r_c)?);
            let k = &(&p.r_c * p.phi_m()).scale(&Q::from(2));
            let eq = Relation::new(r.scale_scalar(k), u(0)).canonical()?;
            Ok(HierarchyMember { family: Family::PII, m: p.m, r_c: p.r_c.clone(), constant: p.phi_m().clone(), r_m: r, s_m: Some(s), equation: eq })
        }
    }
}

#[derive(Clone, Debug)]
pub struct Crosscheck {
    pub emitted: Relation,
    pub derived: Relation,
}

/// Derive the ODE for u = 𝔯₁ or 𝔞₁ from the scaled series by eliminating
/// the higher coefficients, and compare with emit_critical_ode.
pub fn crosscheck_via_series(g: &Potential, crit: &Critical, k: usize) -> Result<Crosscheck> {
    let emitted = emit_critical_ode(crit)?.equation;
    let m = crit.m();
    let (eqs, last) = match crit {
        Critical::OneCut(c) => {
            let s = scaled_series(g, c, k.max(m))?;
            (s.relations[..m - 1].to_vec(), s.relations[m - 1].clone())
        }
        Critical::Merging(p) => {
            let s = symmetric_scaled_series(g, p, k.max(2 * m + 1))?;
            (s.relations[..2 * m].to_vec(), s.relations[2 * m].clone())
        }
    };
    let eqs: Vec<_> = eqs.iter().map(ladder::from_relation).collect();
    let derived = ladder::eliminate(&eqs, &ladder::from_relation(&last))?.canonical()?;
    if derived != emitted {
        let diff = derived.minus(&emitted);
        return Err(Error::Mismatch(format!(
            "series route gives {} but the hierarchy gives {} (difference {})",
            derived.render(),
            emitted.render(),
            diff.render()
        )));
    }
    Ok(Crosscheck { emitted, derived })
}
