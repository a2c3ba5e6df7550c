use crate::algebra::poly::Poly;
use crate::algebra::ring::Ring;
use crate::algebra::scalar::{q_sign, Scalar, Q};
use crate::error::{Error, Result};

/// Open interval (lo, hi); `None` is an infinite end.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub lo: Option<Q>,
    pub hi: Option<Q>,
}

impl Domain {
    pub fn all() -> Self {
        Domain { lo: None, hi: None }
    }

    pub fn positive() -> Self {
        Domain { lo: Some(Q::ZERO), hi: None }
    }

    pub fn open(lo: Q, hi: Q) -> Self {
        Domain { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo.as_ref().is_none_or(|l| x > l) && self.hi.as_ref().is_none_or(|h| x < h)
    }
}

/// A real algebraic number: the unique root of the square-free `poly`
/// in the half-open interval (lo, hi].
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicRoot {
    pub poly: Poly<Q>,
    pub lo: Q,
    pub hi: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub value: Scalar,
    pub multiplicity: usize,
    /// Exact description when the value is irrational.
    pub algebraic: Option<AlgebraicRoot>,
}

impl RealRoot {
    pub fn exact(&self) -> Option<&Q> {
        self.value.as_q()
    }
}

fn sign_changes(seq: &[Poly<Q>], x: &Q) -> usize {
    let mut last = 0;
    let mut n = 0;
    for p in seq {
        let s = q_sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Number of distinct roots of the square-free polynomial with Sturm
/// sequence `seq` in (a, b].
fn count(seq: &[Poly<Q>], a: &Q, b: &Q) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

fn cauchy_bound(p: &Poly<Q>) -> Q {
    let lc = p.leading();
    let mut m = Q::ZERO;
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let r = c / &lc;
        let r = if q_sign(&r) < 0 { -r } else { r };
        if r > m {
            m = r;
        }
    }
    m + Q::ONE
}

fn half(a: &Q, b: &Q) -> Q {
    (a + b) / Q::from(2)
}

fn tolerance(digits: u32) -> Q {
    Q::ONE / Q::from(10).pow(digits as usize)
}

impl AlgebraicRoot {
    fn seq(&self) -> Vec<Poly<Q>> {
        self.poly.sturm()
    }

    /// Shrink the interval until its width is below `width`.
    pub fn refine(&self, width: &Q) -> AlgebraicRoot {
        let seq = self.seq();
        let (mut a, mut b) = (self.lo.clone(), self.hi.clone());
        while &(&b - &a) > width {
            let m = half(&a, &b);
            if count(&seq, &a, &m) == 1 {
                b = m;
            } else {
                a = m;
            }
        }
        AlgebraicRoot { poly: self.poly.clone(), lo: a, hi: b }
    }

    fn rational_in(&self) -> Option<Q> {
        if self.poly.eval(&self.hi) == Q::ZERO {
            return Some(self.hi.clone());
        }
        if self.poly.degree() == 1 {
            return Some(-self.poly.coeff(0) / self.poly.coeff(1));
        }
        let cand = Q::simplest_in(self.lo.clone(), self.hi.clone());
        (self.poly.eval(&cand) == Q::ZERO).then_some(cand)
    }

    /// Exact rational value if the root happens to be rational (of
    /// moderate height).
    pub fn rational(&self) -> Option<Q> {
        self.refine(&tolerance(40)).rational_in()
    }

    pub fn to_scalar(&self, digits: u32) -> Scalar {
        let r = self.refine(&tolerance(digits.max(40) + 2));
        if let Some(q) = r.rational_in() {
            return Scalar::Exact(q);
        }
        Scalar::Exact(half(&r.lo, &r.hi)).to_approx(digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_scalar(20).to_f64()
    }

    /// True when `q` vanishes at this root.
    pub fn is_root_of(&self, q: &Poly<Q>) -> bool {
        if q.is_zero() {
            return true;
        }
        let g = self.poly.gcd(q);
        if g.degree() < 1 {
            return false;
        }
        count(&g.sturm(), &self.lo, &self.hi) == 1
    }

    /// Sign of `q` at this root, decided exactly.
    pub fn sign_of(&self, q: &Poly<Q>) -> i32 {
        if self.is_root_of(q) {
            return 0;
        }
        let qs: Poly<Q> = q
            .squarefree()
            .into_iter()
            .fold(Poly::constant(Q::ONE), |acc, (f, _)| acc.times(&f));
        let qseq = qs.sturm();
        let seq = self.seq();
        let (mut a, mut b) = (self.lo.clone(), self.hi.clone());
        loop {
            // no root of q in (a, b] and q(a) != 0 means q keeps its sign on [a, b]
            let clean = qs.degree() < 1 || (count(&qseq, &a, &b) == 0 && q.eval(&a) != Q::ZERO);
            if clean {
                return q_sign(&q.eval(&b));
            }
            let m = half(&a, &b);
            if count(&seq, &a, &m) == 1 {
                b = m;
            } else {
                a = m;
            }
        }
    }

    pub fn eval(&self, q: &Poly<Q>, digits: u32) -> Scalar {
        if let Some(x) = self.rational() {
            return Scalar::Exact(q.eval(&x));
        }
        let x = self.to_scalar(digits + 5);
        q.eval_scalar(&x).to_approx(digits)
    }
}

/// Isolate the distinct roots of a square-free polynomial in (lo, hi].
fn isolate(p: &Poly<Q>, lo: &Q, hi: &Q) -> Vec<AlgebraicRoot> {
    let seq = p.sturm();
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        match count(&seq, &a, &b) {
            0 => {}
            1 => out.push(AlgebraicRoot { poly: p.clone(), lo: a, hi: b }),
            _ => {
                let m = half(&a, &b);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Exact isolation of the real roots of a rational polynomial in an open
/// domain, ascending, with multiplicities.
pub fn algebraic_roots(p: &Poly<Q>, domain: &Domain) -> Result<Vec<(AlgebraicRoot, usize)>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("real_roots of the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (f, mult) in p.squarefree() {
        let b = cauchy_bound(&f);
        let lo = match &domain.lo {
            Some(l) if *l > -b.clone() => l.clone(),
            _ => -b.clone(),
        };
        let hi = match &domain.hi {
            Some(h) if *h < b => h.clone(),
            _ => b.clone(),
        };
        if lo >= hi {
            continue;
        }
        for r in isolate(&f, &lo, &hi) {
            // (lo, hi] may contain the excluded right end of the domain
            if domain.hi.as_ref() == Some(&r.hi) && f.eval(&r.hi) == Q::ZERO {
                continue;
            }
            out.push((r, mult));
        }
    }
    out.sort_by_cached_key(|(r, _)| r.to_scalar(60));
    Ok(out)
}

/// Real roots of `p` in `domain`, each refined to `digits` and returned as
/// an exact rational when the root is rational.
pub fn real_roots(p: &Poly<Scalar>, domain: &Domain, digits: u32) -> Result<Vec<RealRoot>> {
    let exact = p.is_exact();
    let pq = Poly::from_q(p.coeffs().iter().map(|c| c.to_q()).collect());
    let work = if exact { digits } else { p.coeffs().iter().filter_map(|c| c.digits()).min().unwrap_or(digits) };
    let mut out = Vec::new();
    for (r, mult) in algebraic_roots(&pq, domain)? {
        let value = if exact {
            r.to_scalar(work)
        } else {
            let rr = r.refine(&tolerance(work + 2));
            Scalar::Exact(half(&rr.lo, &rr.hi)).to_approx(work)
        };
        let algebraic = if exact && !value.is_exact() { Some(r) } else { None };
        out.push(RealRoot { value, multiplicity: mult, algebraic });
    }
    Ok(out)
}

/// Convenience wrapper for exact polynomials.
pub fn real_roots_q(p: &Poly<Q>, domain: &Domain, digits: u32) -> Result<Vec<RealRoot>> {
    real_roots(&p.to_scalar(), domain, digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::q_ratio;

    #[test]
    fn linear_root() {
        let p = Poly::from_ints(&[-3, 2]);
        let r = real_roots_q(&p, &Domain::positive(), 40).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, Scalar::ratio(3, 2));
    }

    #[test]
    fn quartic_hodograph_root() {
        // 2 r + 12 r^2 - 14
        let p = Poly::from_ints(&[-14, 2, 12]);
        let r = real_roots_q(&p, &Domain::positive(), 40).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, Scalar::int(1));
    }

    #[test]
    fn bmp_cubic() {
        // 60 r^3 - 180 r^2 + 180 r - 120 = 60((r-1)^3 - 1)
        let p = Poly::from_ints(&[-120, 180, -180, 60]);
        let r = real_roots_q(&p, &Domain::positive(), 40).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, Scalar::int(2));
    }

    #[test]
    fn multiplicities_and_irrational() {
        // (r-1)^3 (r^2-2)
        let p = Poly::from_ints(&[-1, 1]).pow_u(3).times(&Poly::from_ints(&[-2, 0, 1]));
        let r = real_roots_q(&p, &Domain::all(), 40).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[1].value, Scalar::int(1));
        assert_eq!(r[1].multiplicity, 3);
        let s2 = Scalar::int(2).sqrt(60).unwrap();
        assert!(r[2].value.approx_eq(&s2, 1e-39));
        assert!(r[0].value.approx_eq(&-s2, 1e-39));
        let a = r[2].algebraic.as_ref().unwrap();
        assert!(a.is_root_of(&Poly::from_ints(&[-4, 0, 2])));
        assert!(!a.is_root_of(&Poly::from_ints(&[-3, 0, 1])));
        assert_eq!(a.sign_of(&Poly::from_q(vec![q_ratio(-141, 100), Q::ONE])), 1);
        assert_eq!(a.sign_of(&Poly::from_q(vec![q_ratio(-142, 100), Q::ONE])), -1);
    }

    #[test]
    fn open_domain_excludes_ends() {
        let p = Poly::from_ints(&[0, -1, 1]);
        let r = real_roots_q(&p, &Domain::open(Q::ZERO, Q::ONE), 30).unwrap();
        assert!(r.is_empty());
    }
}
