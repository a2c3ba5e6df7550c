//! Symmetric double-scaled series at a merging point. With 𝔟 = 𝔞(−ε̄) the
//! two generating functions collapse into one, 𝕍 = Σ 𝕍^{[k]} ε̄^k, fixed by
//!     𝔞 (𝕍 + 𝕍(−ε̄, x−ε̄)) (𝕍 + 𝕍(−ε̄, x+ε̄)) = λ (𝕍² − 1),
//! 𝔞 = ρ + Σ_{k≥1} 𝔞_k ε̄^k, w_c² = λ(λ − 4ρ). Variable k is 𝔞_k.
//!
//! Each 𝕍^{[k]} (k ≥ 1) is decomposed as
//!     w_c 𝕍^{[k]} = C^{[k]} + Σ_j f_j A_j^{[k]} + g_j B_j^{[k]},
//!     f_j = (λ − 4ρ)/λ^j,  g_j = λ/(λ − 4ρ)^j.

use serde_json::{json, Value};

use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::algebra::surd::Surd;
use crate::algebra::binom;

use crate::diffpoly::{DiffPoly, Names, Relation, RhoFn};
use crate::error::{Error, Result};
use crate::phase::Potential;
use crate::twocut::merging::{phi_gamma_at, MergingPoint};

pub type VSurd = Surd<DiffPoly>;

fn branch() -> (DiffPoly, DiffPoly) {
    (DiffPoly::rho().scale(&Q::from(4)), DiffPoly::zero())
}

fn zero_surd() -> VSurd {
    let (s, p) = branch();
    VSurd::zero(s, p)
}

/// 𝔞_(k): ρ at k = 0, the opaque variable 𝔞_k otherwise.
fn coupling(k: usize) -> DiffPoly {
    if k == 0 {
        DiffPoly::rho()
    } else {
        DiffPoly::var(k as u32)
    }
}

/// (4ρ)^{−n}.
fn c_pow_inv(n: u32) -> RhoFn {
    let four = Q::from(4u64.pow(n));
    RhoFn::monomial(Scalar::Exact(Q::ONE / four), -(n as i32))
}

/// D^s 𝕍_k / s!, extended on demand.
struct Ladder {
    rows: Vec<Vec<VSurd>>,
}

impl Ladder {
    fn get(&mut self, k: usize, s: usize) -> VSurd {
        let row = &mut self.rows[k];
        while row.len() <= s {
            let m = row.len() as i64;
            let next = row[row.len() - 1].deriv().scale(&(Q::ONE / Q::from(m)));
            row.push(next);
        }
        row[s].clone()
    }

    /// Σ_{k<known, k+s=n} sign(k,s) D^s𝕍_k/s!: the order-n part of the two
    /// shifted functions 𝕍(−ε̄, x∓ε̄) from the rows already solved.
    fn shifted(&mut self, known: usize, n: usize) -> (VSurd, VSurd) {
        let (mut minus, mut plus) = (zero_surd(), zero_surd());
        for k in 0..known.min(n + 1) {
            let t = self.get(k, n - k);
            // 𝕍(−ε̄, x−ε̄): (−1)^{k+s} = (−1)^n;  𝕍(−ε̄, x+ε̄): (−1)^k
            minus = if n % 2 == 1 { minus.minus(&t) } else { minus.plus(&t) };
            plus = if k % 2 == 1 { plus.minus(&t) } else { plus.plus(&t) };
        }
        (minus, plus)
    }
}

fn conv(a: &[VSurd], b: &[VSurd], n: usize) -> VSurd {
    (0..=n).fold(zero_surd(), |acc, j| acc.plus(&a[j].times(&b[n - j])))
}

/// 𝕍^{[0]} … 𝕍^{[K]} with ρ symbolic; independent of the potential.
pub fn symmetric_v(k_max: usize) -> Result<Vec<VSurd>> {
    let (s, p) = branch();
    let lam = VSurd::lambda(s.clone(), p.clone());
    let v0 = VSurd::term(s, p, 1, DiffPoly::zero(), DiffPoly::int(1));
    let mut v = vec![v0.clone()];
    let mut ladder = Ladder { rows: vec![vec![v0.clone()]] };
    let two_v0 = v0.scale(&Q::from(2));
    let (mut a, mut b) = (vec![two_v0.clone()], vec![two_v0]);
    let mut c = vec![a[0].times(&b[0])];
    for n in 1..=k_max {
        let (am, bp) = ladder.shifted(n, n);
        a.push(am);
        b.push(bp);
        let cn = conv(&a, &b, n);
        let mut e = cn.scale_by(&coupling(0));
        for i in 1..=n {
            e = e.plus(&c[n - i].scale_by(&coupling(i)));
        }
        let mut sq = zero_surd();
        for j in 1..n {
            sq = sq.plus(&v[j].times(&v[n - j]));
        }
        e = e.minus(&lam.times(&sq));
        let half = Q::ONE / Q::from(2);
        let vn = if n % 2 == 0 {
            e.times_w_pow(1).scale(&half)
        } else {
            e.times_w_pow(-1).div_lambda()?.div_lambda()?.scale(&half)
        };
        for key in vn.terms().keys() {
            if key % 2 == 0 || *key < 1 {
                return Err(Error::Mismatch(format!("order {}: unexpected w^(-{}) term", n, key)));
            }
        }
        if n % 2 == 0 {
            let twice = vn.scale(&Q::from(2));
            a[n] = a[n].plus(&twice);
            b[n] = b[n].plus(&twice);
        }
        c.push(conv(&a, &b, n));
        ladder.rows.push(vec![vn.clone()]);
        v.push(vn);
    }
    Ok(v)
}

/// Full re-evaluation of the quadratic equation at every order ≤ K.
pub fn symmetric_residuals(v: &[VSurd]) -> Vec<VSurd> {
    let (s, p) = branch();
    let lam = VSurd::lambda(s, p);
    let n_max = v.len() - 1;
    let mut ladder = Ladder { rows: v.iter().map(|x| vec![x.clone()]).collect() };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for n in 0..=n_max {
        let (am, bp) = ladder.shifted(n + 1, n);
        a.push(v[n].plus(&am));
        b.push(v[n].plus(&bp));
    }
    (0..=n_max)
        .map(|n| {
            let mut e = zero_surd();
            for i in 0..=n {
                e = e.plus(&conv(&a, &b, n - i).scale_by(&coupling(i)));
            }
            let mut sq = zero_surd();
            for j in 0..=n {
                sq = sq.plus(&v[j].times(&v[n - j]));
            }
            if n == 0 {
                sq = sq.minus(&sq.one_like());
            }
            e.minus(&lam.times(&sq))
        })
        .collect()
}

/// C^{[k]}, A_j^{[k]}, B_j^{[k]} (j = 1, 2, …; index 0 holds j = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub c: DiffPoly,
    pub a: Vec<DiffPoly>,
    pub b: Vec<DiffPoly>,
}

impl Table {
    pub fn a_j(&self, j: usize) -> DiffPoly {
        self.a.get(j - 1).cloned().unwrap_or_default()
    }

    pub fn b_j(&self, j: usize) -> DiffPoly {
        self.b.get(j - 1).cloned().unwrap_or_default()
    }

    /// (C + Σ_j f_j A_j + g_j B_j)/w_c.
    pub fn reconstruct(&self) -> Result<VSurd> {
        let (s, p) = branch();
        let lam_poly = Poly::x(&DiffPoly::int(1));
        let lin = Poly::new(vec![s.negate(), DiffPoly::int(1)], DiffPoly::zero());
        let inv_w = VSurd::w_pow(s, p, 1);
        let mut out = inv_w.scale_by(&self.c);
        let mut f = inv_w.times_poly(&lin);
        let mut g = inv_w.times_poly(&lam_poly);
        for j in 0..self.a.len().max(self.b.len()) {
            f = f.div_lambda()?;
            // λ/(λ − 4ρ) = λ²/w_c²
            g = g.times_poly(&lam_poly).times_w_pow(2);
            if let Some(x) = self.a.get(j) {
                out = out.plus(&f.scale_by(x));
            }
            if let Some(x) = self.b.get(j) {
                out = out.plus(&g.scale_by(x));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self, names: &Names) -> Value {
        json!({
            "C": self.c.render_with(names),
            "A": self.a.iter().map(|x| x.render_with(names)).collect::<Vec<_>>(),
            "B": self.b.iter().map(|x| x.render_with(names)).collect::<Vec<_>>(),
        })
    }
}

fn push_at(v: &mut Vec<DiffPoly>, i: usize, x: &DiffPoly) {
    if v.len() < i {
        v.resize(i, DiffPoly::zero());
    }
    v[i - 1] = v[i - 1].plus(x);
}

/// Partial fractions of coef/(λ^a μ^b), μ = λ − 4ρ, into the λ^{−i}
/// (alpha) and μ^{−i} (beta) coefficient lists.
fn partial_fractions(a: usize, b: usize, coef: &DiffPoly, alpha: &mut Vec<DiffPoly>, beta: &mut Vec<DiffPoly>) {
    if a == 0 {
        push_at(beta, b, coef);
        return;
    }
    if b == 0 {
        push_at(alpha, a, coef);
        return;
    }
    for i in 1..=a {
        let mut k = binom((a + b - i - 1) as u64, (a - i) as u64);
        if b % 2 == 1 {
            k = -k;
        }
        push_at(alpha, i, &coef.scale_by(&c_pow_inv((a + b - i) as u32)).scale(&k));
    }
    for i in 1..=b {
        let mut k = binom((a + b - i - 1) as u64, (b - i) as u64);
        if (b - i) % 2 == 1 {
            k = -k;
        }
        push_at(beta, i, &coef.scale_by(&c_pow_inv((a + b - i) as u32)).scale(&k));
    }
}

/// Split 𝕍^{[k]}, k ≥ 1, into its table.
pub fn decompose(v: &VSurd) -> Result<Table> {
    let mut kappa = DiffPoly::zero();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for (key, (a, b)) in v.terms() {
        if key % 2 == 0 || *key < 1 {
            return Err(Error::Mismatch(format!("w^(-{}) term in a scaled coefficient", key)));
        }
        let j = ((key - 1) / 2) as usize;
        if j == 0 {
            if !b.is_zero() {
                return Err(Error::Mismatch("λ/w_c term beyond leading order".into()));
            }
            kappa = kappa.plus(a);
            continue;
        }
        // (a + λb)/w^{2j}: a/(λ^j μ^j) + b/(λ^{j−1} μ^j)
        partial_fractions(j, j, a, &mut alpha, &mut beta);
        partial_fractions(j - 1, j, b, &mut alpha, &mut beta);
    }
    let top = alpha.len().max(beta.len());
    let inv4r = c_pow_inv(1);
    let (mut ta, mut tb) = (vec![DiffPoly::zero(); top], vec![DiffPoly::zero(); top]);
    let (mut next_a, mut next_b) = (DiffPoly::zero(), DiffPoly::zero());
    for i in (1..=top).rev() {
        let al = alpha.get(i - 1).cloned().unwrap_or_default();
        let be = beta.get(i - 1).cloned().unwrap_or_default();
        // α_i = A_{i+1} − 4ρA_i,  β_i = B_{i+1} + 4ρB_i
        next_a = next_a.minus(&al).scale_by(&inv4r);
        next_b = be.minus(&next_b).scale_by(&inv4r);
        ta[i - 1] = next_a.clone();
        tb[i - 1] = next_b.clone();
    }
    let c = match (ta.first(), tb.first()) {
        (Some(a1), Some(b1)) => kappa.minus(a1).minus(b1),
        _ => kappa,
    };
    while ta.last().is_some_and(|x| x.is_zero()) && tb.last().is_some_and(|x| x.is_zero()) {
        ta.pop();
        tb.pop();
    }
    Ok(Table { c, a: ta, b: tb })
}

#[derive(Clone, Debug)]
pub struct SymmetricSeries {
    pub m: usize,
    pub r_c: Scalar,
    /// φ_j, γ_j for j = 1..=⌊K/2⌋.
    pub phi: Vec<Scalar>,
    pub gamma: Vec<Scalar>,
    /// 𝕍^{[k]}, ρ symbolic.
    pub v: Vec<VSurd>,
    /// tables[k−1] for k = 1..=K, ρ symbolic.
    pub tables: Vec<Table>,
    /// relations[k−1]: Σ_j φ_jA_j^{[k]} + γ_jB_j^{[k]} − δ_{k,2m}x = 0 at ρ = r_c.
    pub relations: Vec<Relation>,
}

pub fn symmetric_scaled_series(g: &Potential, mp: &MergingPoint, k_max: usize) -> Result<SymmetricSeries> {
    if k_max < 2 * mp.m + 1 {
        return Err(Error::InvalidInput(format!("K = {} must be at least 2m+1 = {}", k_max, 2 * mp.m + 1)));
    }
    let v = symmetric_v(k_max)?;
    let tables = v[1..].iter().map(decompose).collect::<Result<Vec<_>>>()?;
    let (phi, gamma) = phi_gamma_at(g, &mp.r_c, k_max / 2)?;
    let mut relations = Vec::new();
    for (idx, t) in tables.iter().enumerate() {
        let k = idx + 1;
        let mut a = DiffPoly::zero();
        for j in 1..=t.a.len().max(t.b.len()) {
            for (coef, entry) in [(&phi[j - 1], t.a_j(j)), (&gamma[j - 1], t.b_j(j))] {
                if !coef.is_zero() && !entry.is_zero() {
                    a = a.plus(&entry.subst_rho(&mp.r_c)?.scale_scalar(coef));
                }
            }
        }
        let b = if k == 2 * mp.m { DiffPoly::int(-1) } else { DiffPoly::zero() };
        relations.push(Relation::new(a, b));
    }
    Ok(SymmetricSeries { m: mp.m, r_c: mp.r_c.clone(), phi, gamma, v, tables, relations })
}

impl SymmetricSeries {
    pub fn table(&self, k: usize) -> &Table {
        &self.tables[k - 1]
    }

    pub fn to_json(&self, digits: u32) -> Value {
        let names = Names::indexed("a");
        json!({
            "m": self.m,
            "rc": self.r_c.render(digits),
            "tables": self.tables.iter().map(|t| t.to_json(&names)).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|r| r.render_with(&names)).collect::<Vec<_>>(),
        })
    }
}
