use std::fmt;
use std::sync::Arc;

use crate::algebra::poly::Poly;
use crate::algebra::ring::{Differential, Ring};
use crate::algebra::scalar::{Scalar, Q};
use crate::error::{Error, Result};
use crate::phase::Potential;

/// W and its first two r₀-derivatives, shared by every HodoFn of one model.
#[derive(Debug, PartialEq)]
pub struct HodoCtx {
    pub w: Poly<Q>,
    pub w1: Poly<Q>,
    pub w2: Poly<Q>,
}

impl HodoCtx {
    pub fn new(g: &Potential) -> Arc<Self> {
        let w = g.hodograph_w();
        let w1 = w.derivative();
        let w2 = w1.derivative();
        Arc::new(HodoCtx { w, w1, w2 })
    }
}

/// num(r₀)/W′(r₀)^e: the functions of T reachable from r₀ by d/dT =
/// (1/W′)d/dr₀.
#[derive(Clone, Debug)]
pub struct HodoFn {
    ctx: Arc<HodoCtx>,
    num: Poly<Q>,
    e: u32,
}

impl PartialEq for HodoFn {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.e == o.e
    }
}

impl HodoFn {
    pub fn new(ctx: &Arc<HodoCtx>, num: Poly<Q>, e: u32) -> Self {
        let mut x = HodoFn { ctx: ctx.clone(), num, e };
        x.normalize();
        x
    }

    pub fn poly(ctx: &Arc<HodoCtx>, num: Poly<Q>) -> Self {
        HodoFn::new(ctx, num, 0)
    }

    /// r₀ itself.
    pub fn r0(ctx: &Arc<HodoCtx>) -> Self {
        HodoFn::poly(ctx, Poly::x(&Q::ZERO))
    }

    pub fn ctx(&self) -> &Arc<HodoCtx> {
        &self.ctx
    }

    pub fn numerator(&self) -> &Poly<Q> {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.e = 0;
            return;
        }
        while self.e > 0 {
            match self.num.div_rem(&self.ctx.w1) {
                Ok((q, r)) if r.is_zero() => {
                    self.num = q;
                    self.e -= 1;
                }
                _ => break,
            }
        }
    }

    fn lift(&self, e: u32) -> Poly<Q> {
        self.num.times(&self.ctx.w1.pow_u(e - self.e))
    }

    /// Division by W′(r₀).
    pub fn div_w1(&self) -> Self {
        HodoFn::new(&self.ctx, self.num.clone(), self.e + 1)
    }

    pub fn eval(&self, r0: &Scalar) -> Result<Scalar> {
        let n = self.num.eval_scalar(r0);
        if self.e == 0 {
            return Ok(n);
        }
        let d = self.ctx.w1.eval_scalar(r0).pow(self.e);
        if d.is_zero() {
            return Err(Error::CriticalPointHit);
        }
        n.checked_div(&d)
    }

    pub fn eval_f64(&self, r0: f64) -> f64 {
        self.num.eval_f64(r0) / self.ctx.w1.eval_f64(r0).powi(self.e as i32)
    }

    pub fn render(&self, var: &str) -> String {
        let n = self.num.render(var);
        if self.e == 0 {
            return n;
        }
        let d = self.ctx.w1.render(var);
        let den = if self.e == 1 { format!("({})", d) } else { format!("({})^{}", d, self.e) };
        format!("({})/{}", n, den)
    }
}

impl fmt::Display for HodoFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("r0"))
    }
}

impl Ring for HodoFn {
    fn zero_like(&self) -> Self {
        HodoFn { ctx: self.ctx.clone(), num: Poly::zero(Q::ZERO), e: 0 }
    }
    fn one_like(&self) -> Self {
        HodoFn { ctx: self.ctx.clone(), num: Poly::constant(Q::ONE), e: 0 }
    }
    fn plus(&self, o: &Self) -> Self {
        if o.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return o.clone();
        }
        let e = self.e.max(o.e);
        HodoFn::new(&self.ctx, self.lift(e).plus(&o.lift(e)), e)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return self.zero_like();
        }
        HodoFn::new(&self.ctx, self.num.times(&o.num), self.e + o.e)
    }
    fn negate(&self) -> Self {
        HodoFn { ctx: self.ctx.clone(), num: self.num.negate(), e: self.e }
    }
    fn scale(&self, q: &Q) -> Self {
        HodoFn::new(&self.ctx, self.num.scale(q), self.e)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// d/dT.
impl Differential for HodoFn {
    fn deriv(&self) -> Self {
        let n1 = self.num.derivative().times(&self.ctx.w1);
        let n2 = self.num.times(&self.ctx.w2).scale(&Q::from(self.e));
        HodoFn::new(&self.ctx, n1.minus(&n2), self.e + 2)
    }
}
