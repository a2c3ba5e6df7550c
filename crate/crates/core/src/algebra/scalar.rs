use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::{Abs, CubicRoot, Sign, SquareRoot, UnsignedAbs};
use dashu::float::round::mode::HalfEven;
use dashu::float::FBig;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms.
pub type Q = RBig;
/// Binary arbitrary-precision float.
pub type Float = FBig<HalfEven, 2>;

pub const DEFAULT_DIGITS: u32 = 40;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision used for a decimal precision, with guard bits.
pub fn bits_for(digits: u32) -> usize {
    (digits as f64 * LOG2_10).ceil() as usize + 24
}

pub fn q_to_float(q: &Q, bits: usize) -> Float {
    q.to_float::<HalfEven, 2>(bits).value()
}

/// Exact rational value of a finite float.
pub fn float_to_q(f: &Float) -> Q {
    Q::try_from(f.clone()).expect("finite float")
}

pub fn q_int(n: i64) -> Q {
    Q::from(n)
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    assert!(d != 0, "zero denominator");
    Q::from_parts_signed(IBig::from(n), IBig::from(d))
}

pub fn q_sign(q: &Q) -> i32 {
    if q.is_zero() {
        0
    } else if q.sign() == Sign::Positive {
        1
    } else {
        -1
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().value()
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn q_exact_sqrt(q: &Q) -> Option<Q> {
    if q_sign(q) < 0 {
        return None;
    }
    let n: UBig = q.numerator().unsigned_abs();
    let d: &UBig = q.denominator();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == n && &sd * &sd == *d {
        Some(Q::from_parts(IBig::from(sn), sd))
    } else {
        None
    }
}

/// Exact real cube root when it exists.
pub fn q_exact_cbrt(q: &Q) -> Option<Q> {
    let neg = q_sign(q) < 0;
    let n: UBig = q.numerator().unsigned_abs();
    let d: &UBig = q.denominator();
    let cn = n.cbrt();
    let cd = d.cbrt();
    if &cn * &cn * &cn == n && &cd * &cd * &cd == *d {
        let r = Q::from_parts(IBig::from(cn), cd);
        Some(if neg { -r } else { r })
    } else {
        None
    }
}

/// A number that is either an exact rational or a decimal carrying its
/// working precision.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Q),
    Approx { value: Float, digits: u32 },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Q::ZERO)
    }

    pub fn one() -> Self {
        Scalar::Exact(Q::ONE)
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Q::from(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(q_ratio(n, d))
    }

    pub fn from_q(q: Q) -> Self {
        Scalar::Exact(q)
    }

    pub fn approx(value: Float, digits: u32) -> Self {
        let value = value.with_precision(bits_for(digits)).value();
        Scalar::Approx { value, digits }
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        let q = Q::try_from(x).expect("finite f64");
        Scalar::approx(q_to_float(&q, bits_for(digits)), digits)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn digits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx { digits, .. } => Some(*digits),
        }
    }

    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Scalar::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// Exact rational value (decimals are converted without rounding).
    pub fn to_q(&self) -> Q {
        match self {
            Scalar::Exact(q) => q.clone(),
            Scalar::Approx { value, .. } => float_to_q(value),
        }
    }

    pub fn to_float(&self, digits: u32) -> Float {
        match self {
            Scalar::Exact(q) => q_to_float(q, bits_for(digits)),
            Scalar::Approx { value, .. } => value.clone().with_precision(bits_for(digits)).value(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q_to_f64(q),
            Scalar::Approx { value, .. } => value.to_f64().value(),
        }
    }

    /// Convert to decimal at the given precision (exact values are rounded).
    pub fn to_approx(&self, digits: u32) -> Scalar {
        Scalar::approx(self.to_float(digits), digits)
    }

    pub fn sign(&self) -> i32 {
        match self {
            Scalar::Exact(q) => q_sign(q),
            Scalar::Approx { value, .. } => {
                if value.repr().is_zero() {
                    0
                } else if value.sign() == Sign::Positive {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        if o.is_zero() {
            return Err(Error::DivisionByZero(format!("{} / 0", self)));
        }
        Ok(self / o)
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().checked_div(self)
    }

    /// Square root: exact when the argument is an exact perfect square,
    /// otherwise a decimal at `digits` (or the argument's own precision).
    pub fn sqrt(&self, digits: u32) -> Result<Scalar> {
        if self.sign() < 0 {
            return Err(Error::InvalidInput(format!("sqrt of negative {}", self)));
        }
        if let Scalar::Exact(q) = self {
            if let Some(r) = q_exact_sqrt(q) {
                return Ok(Scalar::Exact(r));
            }
        }
        let d = self.digits().map_or(digits, |d| d.min(digits.max(d)));
        if self.is_zero() {
            return Ok(Scalar::approx(Float::ZERO, d));
        }
        Ok(Scalar::approx(self.to_float(d).sqrt(), d))
    }

    /// Real cube root.
    pub fn cbrt(&self, digits: u32) -> Scalar {
        if let Scalar::Exact(q) = self {
            if let Some(r) = q_exact_cbrt(q) {
                return Scalar::Exact(r);
            }
        }
        let d = self.digits().unwrap_or(digits);
        if self.is_zero() {
            return Scalar::approx(Float::ZERO, d);
        }
        let x = self.to_float(d);
        let r = if self.sign() < 0 { -((-x).cbrt()) } else { x.cbrt() };
        Scalar::approx(r, d)
    }

    pub fn exp(&self, digits: u32) -> Scalar {
        let d = self.digits().unwrap_or(digits);
        Scalar::approx(self.to_float(d).exp(), d)
    }

    pub fn ln(&self, digits: u32) -> Result<Scalar> {
        if self.sign() <= 0 {
            return Err(Error::InvalidInput(format!("ln of nonpositive {}", self)));
        }
        let d = self.digits().unwrap_or(digits);
        Ok(Scalar::approx(self.to_float(d).ln(), d))
    }

    /// |self - o| <= tol.
    pub fn approx_eq(&self, o: &Scalar, tol: f64) -> bool {
        let diff = (self - o).abs();
        let t = Scalar::Exact(Q::try_from(tol).expect("finite tolerance"));
        diff.to_q() <= t.to_q()
    }

    /// Fixed-format rendering: exact values as `p/q`, decimals with `digits`
    /// significant digits.
    pub fn render(&self, digits: u32) -> String {
        match self {
            Scalar::Exact(q) => render_q(q),
            Scalar::Approx { value, .. } => render_float(value, digits),
        }
    }

    /// Decimal rendering regardless of exactness.
    pub fn render_decimal(&self, digits: u32) -> String {
        match self {
            Scalar::Exact(q) if q.is_int() => render_q(q),
            _ => render_float(&self.to_float(digits + 2), digits),
        }
    }

    pub fn parse(s: &str) -> Result<Scalar> {
        parse_q(s).map(Scalar::Exact)
    }
}

pub fn render_q(q: &Q) -> String {
    if q.denominator() == &UBig::ONE {
        format!("{}", q.numerator())
    } else {
        format!("{}/{}", q.numerator(), q.denominator())
    }
}

fn render_float(f: &Float, digits: u32) -> String {
    if f.repr().is_zero() {
        return "0".to_string();
    }
    let dec = f
        .clone()
        .with_base_and_precision::<10>(digits.max(1) as usize)
        .value();
    let sig = dec.repr().significand().clone();
    let exp = dec.repr().exponent();
    let neg = sig.sign() == Sign::Negative;
    let mut s = sig.abs().to_string();
    let mut e = exp;
    while s.len() > 1 && s.ends_with('0') {
        s.pop();
        e += 1;
    }
    // value = s * 10^e; scientific exponent of the leading digit
    let lead = e + s.len() as isize - 1;
    let body = if (-6..21).contains(&lead) {
        if e >= 0 {
            let mut t = s.clone();
            t.extend(std::iter::repeat_n('0', e as usize));
            t
        } else {
            let point = s.len() as isize + e;
            if point > 0 {
                format!("{}.{}", &s[..point as usize], &s[point as usize..])
            } else {
                let zeros: String = std::iter::repeat_n('0', (-point) as usize).collect();
                format!("0.{}{}", zeros, s)
            }
        }
    } else {
        let mant = if s.len() > 1 {
            format!("{}.{}", &s[..1], &s[1..])
        } else {
            s.clone()
        };
        format!("{}e{}", mant, lead)
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

/// Parse `p`, `p/q`, decimal `1.25`, or scientific `3e-4` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse number '{}'", s));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_q(n)?;
        let d = parse_q(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero(s.to_string()));
        }
        return Ok(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", ip, fp);
    let n = IBig::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let e = exp - fp.len() as i64;
    let ten = Q::from(10);
    let mut q = Q::from(n);
    if e >= 0 {
        q *= ten.pow(e as usize);
    } else {
        q /= ten.pow((-e) as usize);
    }
    Ok(if neg { -q } else { q })
}

fn combine_digits(a: &Scalar, b: &Scalar) -> Option<u32> {
    match (a.digits(), b.digits()) {
        (None, None) => None,
        (Some(d), None) | (None, Some(d)) => Some(d),
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn binop(a: &Scalar, b: &Scalar, fq: fn(&Q, &Q) -> Q, ff: fn(&Float, &Float) -> Float) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fq(x, y)),
        _ => {
            let d = combine_digits(a, b).expect("decimal operand");
            let x = a.to_float(d);
            let y = b.to_float(d);
            Scalar::approx(ff(&x, &y), d)
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        binop(self, o, |x, y| x + y, |x, y| x + y)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        binop(self, o, |x, y| x - y, |x, y| x - y)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        binop(self, o, |x, y| x * y, |x, y| x * y)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        assert!(!o.is_zero(), "Scalar division by zero");
        binop(self, o, |x, y| x / y, |x, y| x / y)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q.clone()),
            Scalar::Approx { value, digits } => Scalar::Approx {
                value: -value.clone(),
                digits: *digits,
            },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Scalar) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Scalar {
    fn cmp(&self, o: &Scalar) -> Ordering {
        match (self, o) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x.cmp(y),
            _ => self.to_q().cmp(&o.to_q()),
        }
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::Exact(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", render_q(q)),
            Scalar::Approx { value, digits } => write!(f, "{}", render_float(value, *digits)),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scalar> {
        Scalar::parse(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        let exactish = !s.contains(['.', 'e', 'E']);
        let q = parse_q(&s).map_err(serde::de::Error::custom)?;
        if exactish {
            Ok(Scalar::Exact(q))
        } else {
            let sig = s
                .trim_start_matches('-')
                .split(['e', 'E'])
                .next()
                .unwrap_or("")
                .chars()
                .filter(|c| c.is_ascii_digit())
                .count() as u32;
            let digits = sig.max(DEFAULT_DIGITS);
            Ok(Scalar::approx(q_to_float(&q, bits_for(digits)), digits))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/6").unwrap(), q_ratio(1, 2));
        assert_eq!(parse_q("-0.125").unwrap(), q_ratio(-1, 8));
        assert_eq!(parse_q("2e-3").unwrap(), q_ratio(1, 500));
        assert_eq!(parse_q("1.5E2").unwrap(), q_int(150));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let q = q_ratio(6, -4);
        assert_eq!(q.numerator(), &IBig::from(-3));
        assert_eq!(q.denominator(), &UBig::from(2u8));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Scalar::ratio(9, 4).sqrt(40).unwrap(), Scalar::ratio(3, 2));
        assert!(Scalar::int(2).sqrt(40).unwrap().digits().is_some());
        assert_eq!(Scalar::ratio(-8, 27).cbrt(40), Scalar::ratio(-2, 3));
    }

    #[test]
    fn mixed_promotes_to_decimal() {
        let a = Scalar::int(2).sqrt(50).unwrap();
        let b = &a * &a;
        assert_eq!(b.digits(), Some(50));
        assert!(b.approx_eq(&Scalar::int(2), 1e-45));
        let c = &a + &Scalar::int(1).to_approx(30);
        assert_eq!(c.digits(), Some(30));
    }

    #[test]
    fn rendering_is_stable() {
        let s = Scalar::int(2).sqrt(30).unwrap();
        assert_eq!(s.render(20), "1.4142135623730950488");
        assert_eq!(Scalar::ratio(-3, 4).render(10), "-3/4");
        assert_eq!(Scalar::ratio(1, 1000).render_decimal(5), "0.001");
        assert_eq!(Scalar::from_f64(1.5e-9, 30).render(5), "1.5e-9");
    }

    #[test]
    fn serde_round_trip() {
        let s = Scalar::ratio(7, 3);
        let j = serde_json::to_string(&s).unwrap();
        let back: Scalar = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        assert!(back.is_exact());
    }
}
