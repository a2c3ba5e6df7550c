use std::collections::BTreeMap;

use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::algebra::scalar::Scalar;
use crate::algebra::surd::Surd;
use crate::error::{Error, Result};

/// Σ_j num_j(λ)/w^{2j+1} + poly(λ) over the branch w² = (λ−σ)(λ−τ).
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredRational<R: Ring = Scalar> {
    pub sigma: R,
    pub tau: R,
    /// Sorted by j, distinct.
    pub terms: Vec<(usize, Poly<R>)>,
    pub poly: Option<Poly<R>>,
}

impl<R: Ring> StructuredRational<R> {
    pub fn new(sigma: R, tau: R, terms: Vec<(usize, Poly<R>)>, poly: Option<Poly<R>>) -> Self {
        let mut acc: BTreeMap<usize, Poly<R>> = BTreeMap::new();
        for (j, p) in terms {
            let z = p.zero_like();
            let e = acc.entry(j).or_insert(z);
            *e = e.plus(&p);
        }
        let terms = acc.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let poly = poly.filter(|p| !p.is_zero());
        StructuredRational { sigma, tau, terms, poly }
    }

    /// One-cut branch σ = 0, τ = 4r₀.
    pub fn one_cut(r0: R, terms: Vec<(usize, Poly<R>)>) -> Self {
        let z = r0.zero_like();
        let tau = r0.scale(&4.into());
        StructuredRational::new(z, tau, terms, None)
    }

    pub fn branch_sp(&self) -> (R, R) {
        (self.sigma.plus(&self.tau), self.sigma.times(&self.tau))
    }

    pub fn to_surd(&self) -> Surd<R> {
        let (s, p) = self.branch_sp();
        let mut out = Surd::zero(s.clone(), p.clone());
        for (j, num) in &self.terms {
            out = out.plus(&Surd::from_poly(s.clone(), p.clone(), num, 2 * *j as i64 + 1));
        }
        if let Some(q) = &self.poly {
            out = out.plus(&Surd::from_poly(s, p, q, 0));
        }
        out
    }

    /// Canonical form of a surd whose w-powers are odd negative or
    /// polynomial; numerators come out with degree <= 1.
    pub fn from_surd(sigma: R, tau: R, x: &Surd<R>) -> Result<Self> {
        let zero = sigma.zero_like();
        let (s, p) = x.branch();
        let mut terms = Vec::new();
        let mut poly = Surd::zero(s.clone(), p.clone());
        for (n, (a, b)) in x.terms() {
            if *n > 0 && n % 2 == 1 {
                let num = Poly::new(vec![a.clone(), b.clone()], zero.clone());
                terms.push((((*n - 1) / 2) as usize, num));
            } else if *n <= 0 && n % 2 == 0 {
                poly = poly.plus(&Surd::term(s.clone(), p.clone(), *n, a.clone(), b.clone()));
            } else {
                return Err(Error::InvalidInput(format!("w^{} term is not structured", -n)));
            }
        }
        let poly = if poly.is_zero() { None } else { Some(poly.poly_part()) };
        Ok(StructuredRational::new(sigma, tau, terms, poly))
    }

    /// Numerator of the j-th term, if present.
    pub fn numerator(&self, j: usize) -> Option<&Poly<R>> {
        self.terms.iter().find(|(k, _)| *k == j).map(|(_, p)| p)
    }

    /// Upper bound on the number of series terms a residue extraction needs:
    /// deg(extra) + max_j(deg num_j − j) + 2.
    pub fn expansion_depth(&self, extra: &Poly<R>) -> i64 {
        let m = self
            .terms
            .iter()
            .map(|(j, p)| p.degree() as i64 - *j as i64)
            .max()
            .unwrap_or(0);
        extra.degree().max(0) as i64 + m + 2
    }
}

/// ∮ dλ/(2πi) extra(λ)·x(λ) around the support, as the λ^{−1} coefficient
/// of the expansion at infinity.
pub fn residue_at_infinity<R: Ring>(x: &StructuredRational<R>, extra: &Poly<R>) -> Result<R> {
    let prod = x.to_surd().times_poly(extra);
    let res = prod.residue();
    Ok(res)
}

/// Residue in decimal mode with a certification check: the value must be
/// stable under a higher-precision recomputation.
pub fn residue_certified(x: &StructuredRational<Scalar>, extra: &Poly<Scalar>, digits: u32) -> Result<Scalar> {
    let lo = residue_at_infinity(x, extra)?;
    if lo.is_exact() {
        return Ok(lo);
    }
    let bump = |s: &Scalar| if s.is_exact() { s.clone() } else { s.to_approx(digits + 10) };
    let hi_x = StructuredRational::new(
        bump(&x.sigma),
        bump(&x.tau),
        x.terms.iter().map(|(j, p)| (*j, p.map(Scalar::zero(), bump))).collect(),
        x.poly.as_ref().map(|p| p.map(Scalar::zero(), bump)),
    );
    let hi = residue_at_infinity(&hi_x, &extra.map(Scalar::zero(), bump))?;
    let tol = 10f64.powi(-(digits as i32));
    let scale = hi.abs().to_f64().max(1.0);
    if !(lo.approx_eq(&hi, tol * scale)) {
        return Err(Error::PrecisionExhausted(format!("residue unstable at {} digits", digits)));
    }
    Ok(lo)
}
