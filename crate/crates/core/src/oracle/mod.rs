//! Finite-N ground truth: moments of e^{−(N/T)V(x)}, recurrence
//! coefficients by the Chebyshev algorithm, Lax matrix elements, and the
//! discrete string equation and generating-function identities.

use dashu::base::Abs;

use crate::algebra::scalar::{bits_for, q_to_f64, q_to_float, Float, Scalar, Q};
use crate::error::{Error, Result};
use crate::phase::Potential;

fn ten_pow_neg(d: u32, bits: usize) -> Float {
    q_to_float(&(Q::ONE / Q::from(10).pow(d as usize)), bits)
}

fn from_f64(x: f64, bits: usize) -> Float {
    Float::try_from(x).expect("finite").with_precision(bits).value()
}

fn rel_diff(a: &Float, b: &Float) -> Float {
    let d = (a - b).abs();
    let s = a.clone().abs();
    if s.repr().is_zero() {
        d
    } else {
        d / s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Trapezoid rule after x = sinh t.
    Sinh,
    /// Trapezoid rule in x on the truncated line.
    Plain,
}

/// Even moments m_{2k} = ∫ x^{2k} e^{−(N/T)V(x)} dx, k = 0..=kmax.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub g: Potential,
    pub t: Q,
    pub n: usize,
    pub digits: u32,
    pub moments: Vec<Float>,
}

impl MomentTable {
    pub fn moment(&self, k: usize) -> Scalar {
        Scalar::approx(self.moments[k].clone(), self.digits)
    }

    /// The same table rounded to fewer digits.
    pub fn rounded(&self, digits: u32) -> MomentTable {
        let bits = bits_for(digits);
        let moments = self.moments.iter().map(|m| m.clone().with_precision(bits).value()).collect();
        MomentTable { moments, digits, ..self.clone() }
    }
}

struct Integrand {
    c: Vec<f64>,
    coeffs: Vec<Float>,
    kmax: usize,
    bits: usize,
}

impl Integrand {
    fn new(g: &Potential, t: &Q, n: usize, kmax: usize, bits: usize) -> Self {
        let scale = Q::from(n as i64) / t;
        let gs: Vec<Q> = g.couplings().iter().map(|x| x * &scale).collect();
        Integrand {
            c: gs.iter().map(q_to_f64).collect(),
            coeffs: gs.iter().map(|x| q_to_float(x, bits)).collect(),
            kmax,
            bits,
        }
    }

    /// (N/T)V(x) in double precision.
    fn cv_f64(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.c.iter().rev().fold(0.0, |acc, c| (acc + c) * x2)
    }

    /// log of x^{2kmax} e^{−cV}, the integrand with the heaviest tail.
    fn log_peak(&self, x: f64) -> f64 {
        let base = -self.cv_f64(x);
        if self.kmax == 0 {
            return base;
        }
        let lx = if x == 0.0 { f64::NEG_INFINITY } else { x.abs().ln() };
        base + 2.0 * self.kmax as f64 * lx
    }

    /// Add jac·x^{2k}e^{−cV(x)} to acc[k].
    fn accumulate(&self, x: &Float, jac: &Float, acc: &mut [Float]) {
        let x2 = x * x;
        let mut v = Float::ZERO.with_precision(self.bits).value();
        for c in self.coeffs.iter().rev() {
            v = (v + c) * &x2;
        }
        let mut w = (-v).exp() * jac;
        for a in acc.iter_mut() {
            *a += &w;
            w *= &x2;
        }
    }
}

/// Upper end of the node range: beyond it the x^{2kmax} integrand is below
/// 10^{−(digits+20)} of its own peak and decreasing.
fn cutoff(f: &Integrand, scheme: Scheme, digits: u32) -> f64 {
    let to_x = |s: f64| if scheme == Scheme::Sinh { s.sinh() } else { s };
    let drop = (digits as f64 + 20.0) * std::f64::consts::LN_10;
    let mut peak = f64::NEG_INFINITY;
    let mut s = 0.0;
    let step = 0.01;
    loop {
        let x = to_x(s);
        let jl = if scheme == Scheme::Sinh { s.cosh().ln() } else { 0.0 };
        let lp = f.log_peak(x) + jl;
        peak = peak.max(lp);
        let slope = f.log_peak(to_x(s + step)) - f.log_peak(x);
        if lp < peak - drop && slope < 0.0 {
            return s;
        }
        s += step;
        if s > 1e4 {
            return s;
        }
    }
}

fn sum_nodes(f: &Integrand, scheme: Scheme, h: &Float, s_max: f64, start: usize, stride: usize) -> Vec<Float> {
    let bits = f.bits;
    let zero = Float::ZERO.with_precision(bits).value();
    let mut acc = vec![zero; f.kmax + 1];
    let hf = h.to_f64().value();
    let one = from_f64(1.0, bits);
    let half = from_f64(0.5, bits);
    let mut j = start;
    while (j as f64) * hf <= s_max {
        let s = h * &from_f64(j as f64, bits);
        let factor = if j == 0 { one.clone() } else { from_f64(2.0, bits) };
        match scheme {
            Scheme::Sinh => {
                let e = s.exp();
                let ei = &one / &e;
                let x = (&e - &ei) * &half;
                let jac = (&e + &ei) * &half * &factor;
                f.accumulate(&x, &jac, &mut acc);
            }
            Scheme::Plain => f.accumulate(&s, &factor, &mut acc),
        }
        j += stride;
    }
    acc
}

/// Moments certified by halving the step until successive trapezoid sums
/// agree to digits + 5.
pub fn compute_moments_with(g: &Potential, t: &Q, n: usize, kmax: usize, digits: u32, scheme: Scheme) -> Result<MomentTable> {
    if n == 0 || t <= &Q::ZERO {
        return Err(Error::InvalidInput("moments need N ≥ 1 and T > 0".into()));
    }
    let bits = bits_for(digits + 10);
    let f = Integrand::new(g, t, n, kmax, bits);
    let s_max = cutoff(&f, scheme, digits);
    let tol = ten_pow_neg(digits + 5, bits);
    // positions j·h_fine with h_fine = h0/2^level; new nodes are the odd multiples
    let mut h = from_f64(s_max / 16.0, bits);
    let mut raw = sum_nodes(&f, scheme, &h, s_max, 0, 1);
    let mut prev: Vec<Float> = raw.iter().map(|x| x * &h).collect();
    for _ in 0..24 {
        h = &h * &from_f64(0.5, bits);
        let extra = sum_nodes(&f, scheme, &h, s_max, 1, 2);
        for (r, e) in raw.iter_mut().zip(&extra) {
            *r += e;
        }
        let cur: Vec<Float> = raw.iter().map(|x| x * &h).collect();
        let converged = cur.iter().zip(&prev).all(|(a, b)| rel_diff(a, b) <= tol);
        prev = cur;
        if converged {
            let out_bits = bits_for(digits);
            let moments = prev.into_iter().map(|m| m.with_precision(out_bits).value()).collect();
            return Ok(MomentTable { g: g.clone(), t: t.clone(), n, digits, moments });
        }
    }
    Err(Error::PrecisionExhausted(format!("moment quadrature did not settle to {} digits", digits)))
}

pub fn compute_moments(g: &Potential, t: &Q, n: usize, kmax: usize, digits: u32) -> Result<MomentTable> {
    compute_moments_with(g, t, n, kmax, digits, Scheme::Sinh)
}

/// r_1 … r_nmax and h_0 … h_nmax, monic: x p_n = p_{n+1} + r_n p_{n−1}.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    pub n_weight: usize,
    pub t: Q,
    pub digits: u32,
    /// r[0] = r_{0,N} = 0.
    pub r: Vec<Float>,
    pub h: Vec<Float>,
    /// Largest n whose r_n agreed with a lower-precision rerun.
    pub trusted: usize,
}

impl RecurrenceTable {
    pub fn r_n(&self, n: usize) -> Scalar {
        Scalar::approx(self.r[n].clone(), self.digits)
    }

    pub fn n_max(&self) -> usize {
        self.r.len() - 1
    }
}

/// Chebyshev algorithm on the even moments (odd ones vanish).
fn chebyshev(moments: &[Float], nmax: usize, bits: usize) -> Result<(Vec<Float>, Vec<Float>)> {
    let zero = Float::ZERO.with_precision(bits).value();
    let len = 2 * nmax + 2;
    let mu = |l: usize| if l.is_multiple_of(2) { moments[l / 2].clone().with_precision(bits).value() } else { zero.clone() };
    let mut prev2 = vec![zero.clone(); len];
    let mut prev: Vec<Float> = (0..len).map(mu).collect();
    let mut r = vec![zero.clone()];
    let mut h = vec![prev[0].clone()];
    for k in 1..=nmax {
        let mut cur = vec![zero.clone(); len];
        for l in k..len - k {
            // α = 0 for even weights
            cur[l] = &prev[l + 1] - &(&r[k - 1] * &prev2[l]);
        }
        if cur[k].repr().is_zero() || cur[k] <= zero {
            return Err(Error::NumericallySingular { trusted: k - 1 });
        }
        let rk = &cur[k] / &prev[k - 1];
        r.push(rk);
        h.push(cur[k].clone());
        prev2 = prev;
        prev = cur;
    }
    Ok((r, h))
}

/// Recurrence coefficients with a trust horizon: the table is recomputed
/// from moments rounded to 3/4 of their precision, and n is trusted while
/// the two agree to digits_out.
pub fn recurrence_from_moments(mt: &MomentTable, nmax: usize, digits_out: u32) -> Result<RecurrenceTable> {
    if mt.moments.len() < nmax + 1 {
        return Err(Error::InvalidInput(format!("{} moments cannot give r_n up to n = {}", mt.moments.len(), nmax)));
    }
    let bits = bits_for(mt.digits);
    let (r, h) = chebyshev(&mt.moments, nmax, bits)?;
    let low = mt.rounded(mt.digits * 3 / 4);
    let tol = ten_pow_neg(digits_out, bits);
    let trusted = match chebyshev(&low.moments, nmax, bits) {
        Ok((r2, _)) => (1..=nmax).take_while(|&n| rel_diff(&r[n], &r2[n]) <= tol).last().unwrap_or(0),
        Err(Error::NumericallySingular { trusted }) => trusted.min((1..=nmax).take_while(|&n| r[n] > Float::ZERO).last().unwrap_or(0)),
        Err(e) => return Err(e),
    };
    let out_bits = bits_for(digits_out);
    let r = r.into_iter().map(|x| x.with_precision(out_bits).value()).collect();
    let h = h.into_iter().map(|x| x.with_precision(out_bits).value()).collect();
    Ok(RecurrenceTable { n_weight: mt.n, t: mt.t.clone(), digits: digits_out, r, h, trusted })
}

/// End-to-end oracle: r_{n,N} for n ≤ nmax to `digits`, with working
/// precision 4·digits, raised up to 16·digits if the trust horizon falls
/// short of nmax.
pub fn recurrence(g: &Potential, t: &Q, n_weight: usize, nmax: usize, digits: u32) -> Result<RecurrenceTable> {
    let mut factor = 4;
    loop {
        let work = digits * factor;
        let mt = compute_moments(g, t, n_weight, nmax, work)?;
        let rt = recurrence_from_moments(&mt, nmax, digits + 5)?;
        if rt.trusted >= nmax {
            let bits = bits_for(digits);
            let r = rt.r.into_iter().map(|x| x.with_precision(bits).value()).collect();
            let h = rt.h.into_iter().map(|x| x.with_precision(bits).value()).collect();
            return Ok(RecurrenceTable { digits, r, h, ..rt });
        }
        if factor >= 16 {
            return Err(Error::NumericallySingular { trusted: rt.trusted });
        }
        factor *= 2;
    }
}

/// (L^j)_{n,n−1}: the p_{n−1} coefficient of x^j p_n.
pub fn lax_element(rt: &RecurrenceTable, j: usize, n: usize) -> Result<Float> {
    if n == 0 {
        return Ok(Float::ZERO);
    }
    if n + j > rt.n_max() + 1 {
        return Err(Error::TruncationExceeded(format!("(L^{})_{{{},{}}} needs r up to n = {}", j, n, n - 1, n + j - 1)));
    }
    let bits = bits_for(rt.digits);
    let zero = Float::ZERO.with_precision(bits).value();
    let lo = n.saturating_sub(j);
    let width = 2 * j + 1;
    // coefficients of p_{lo}, …, p_{lo+width−1}
    let mut c = vec![zero.clone(); width + 1];
    c[n - lo] = from_f64(1.0, bits);
    for _ in 0..j {
        let mut next = vec![zero.clone(); width + 1];
        for (i, ci) in c.iter().enumerate() {
            if ci.repr().is_zero() {
                continue;
            }
            let a = lo + i;
            if i + 1 < next.len() {
                next[i + 1] += ci;
            }
            if a >= 1 && i >= 1 {
                next[i - 1] += &(ci * &rt.r[a]);
            }
        }
        c = next;
    }
    Ok(c[n - 1 - lo].clone())
}

/// max_{1≤n≤n_max} |Σ_k 2k g_{2k} (L^{2k−1})_{n,n−1} − T n/N|.
pub fn check_string_equation(rt: &RecurrenceTable, g: &Potential, n_max: usize) -> Result<Float> {
    let bits = bits_for(rt.digits);
    let mut worst = Float::ZERO.with_precision(bits).value();
    for n in 1..=n_max {
        let mut lhs = Float::ZERO.with_precision(bits).value();
        for (i, gk) in g.couplings().iter().enumerate() {
            let k = i + 1;
            let c = q_to_float(&(gk * Q::from(2 * k as i64)), bits);
            lhs += &(c * lax_element(rt, 2 * k - 1, n)?);
        }
        let rhs = q_to_float(&(&rt.t * Q::from(n as i64) / Q::from(rt.n_weight as i64)), bits);
        let d = (lhs - rhs).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// U_n = 1 + 2Σ_{k=1}^{kmax} (L^{2k−1})_{n,n−1} λ^{−k}, coefficients of λ^{−k}.
pub fn u_series(rt: &RecurrenceTable, n: usize, kmax: usize) -> Result<Vec<Float>> {
    let bits = bits_for(rt.digits);
    let mut out = vec![from_f64(1.0, bits)];
    for k in 1..=kmax {
        out.push(lax_element(rt, 2 * k - 1, n)? * from_f64(2.0, bits));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub n: usize,
    /// Per coefficient λ^{−i}, i = 0..kmax−1.
    pub linear: Vec<Float>,
    pub quadratic: Vec<Float>,
}

impl Theorem1Report {
    pub fn max_linear(&self) -> f64 {
        self.linear.iter().map(|x| x.to_f64().value().abs()).fold(0.0, f64::max)
    }

    pub fn max_quadratic(&self) -> f64 {
        self.quadratic.iter().map(|x| x.to_f64().value().abs()).fold(0.0, f64::max)
    }
}

fn series_mul(a: &[Float], b: &[Float], len: usize, zero: &Float) -> Vec<Float> {
    let mut out = vec![zero.clone(); len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += &(x * y);
            }
        }
    }
    out
}

/// Coefficientwise residuals of
///   λ(U_{n+1} − U_n) = r_{n+1}(U_{n+2} + U_{n+1}) − r_n(U_n + U_{n−1}),
///   r_n(U_n + U_{n−1})(U_n + U_{n+1}) = λ(U_n² − 1),
/// through λ^{−(kmax−1)}.
pub fn check_theorem1(rt: &RecurrenceTable, n: usize, kmax: usize) -> Result<Theorem1Report> {
    let bits = bits_for(rt.digits);
    let zero = Float::ZERO.with_precision(bits).value();
    let len = kmax + 1;
    let u = |m: isize| -> Result<Vec<Float>> {
        if m < 0 {
            return Ok(vec![zero.clone(); len]);
        }
        u_series(rt, m as usize, kmax)
    };
    let n_i = n as isize;
    let (um, u0, u1, u2) = (u(n_i - 1)?, u(n_i)?, u(n_i + 1)?, u(n_i + 2)?);
    let add = |a: &[Float], b: &[Float]| -> Vec<Float> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let rn = rt.r[n].clone();
    let rn1 = rt.r[n + 1].clone();
    let mut linear = Vec::new();
    let s_hi = add(&u2, &u1);
    let s_lo = add(&u0, &um);
    for i in 0..kmax {
        // λ·U has coefficient U_{i+1} at λ^{−i}
        let lhs = &u1[i + 1] - &u0[i + 1];
        let rhs = &(&rn1 * &s_hi[i]) - &(&rn * &s_lo[i]);
        linear.push(lhs - rhs);
    }
    let prod = series_mul(&s_lo, &add(&u0, &u1), len, &zero);
    let sq = series_mul(&u0, &u0, len + 1, &zero);
    let mut quadratic = Vec::new();
    for i in 0..kmax {
        let lhs = &rn * &prod[i];
        let rhs = sq[i + 1].clone();
        quadratic.push(lhs - rhs);
    }
    Ok(Theorem1Report { n, linear, quadratic })
}

/// Rows (n, r_n, predicted, |r_n − predicted|) for CSV export.
pub fn comparison_rows(rt: &RecurrenceTable, predicted: impl Fn(usize) -> Option<Scalar>, digits: u32) -> Vec<[String; 4]> {
    (1..=rt.n_max())
        .map(|n| {
            let r = rt.r_n(n);
            match predicted(n) {
                Some(p) => {
                    let e = (&r - &p).abs();
                    [n.to_string(), r.render(digits), p.render(digits), e.render(6)]
                }
                None => [n.to_string(), r.render(digits), String::new(), String::new()],
            }
        })
        .collect()
}
