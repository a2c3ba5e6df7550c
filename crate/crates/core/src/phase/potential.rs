use std::path::Path;

use serde_json::{json, Value};

use crate::algebra::poly::Poly;
use crate::algebra::scalar::{parse_q, q_sign, render_q, Q};
use crate::algebra::{binom, Ring};
use crate::error::{Error, Result};

/// Even potential V(λ) = Σ_j g_{2j} λ^j with λ = z².
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    g: Vec<Q>,
}

impl Potential {
    /// Couplings (g₂, g₄, …, g_{2p}); the last must be positive.
    pub fn new(g: Vec<Q>) -> Result<Self> {
        let mut g = g;
        while g.last().is_some_and(|c| *c == Q::ZERO) {
            g.pop();
        }
        match g.last() {
            Some(c) if q_sign(c) > 0 => Ok(Potential { g }),
            _ => Err(Error::InvalidInput("leading coupling g_2p must be positive".into())),
        }
    }

    pub fn from_ints(g: &[i64]) -> Result<Self> {
        Potential::new(g.iter().map(|&n| Q::from(n)).collect())
    }

    pub fn gaussian() -> Self {
        Potential { g: vec![Q::ONE] }
    }

    pub fn quartic(g2: Q, g4: Q) -> Result<Self> {
        Potential::new(vec![g2, g4])
    }

    /// V = 90λ − 15λ² + λ³.
    pub fn bmp() -> Self {
        Potential::from_ints(&[90, -15, 1]).expect("valid")
    }

    pub fn couplings(&self) -> &[Q] {
        &self.g
    }

    /// g_{2k}, zero beyond the degree.
    pub fn g2k(&self, k: usize) -> Q {
        if k == 0 {
            return Q::ZERO;
        }
        self.g.get(k - 1).cloned().unwrap_or(Q::ZERO)
    }

    /// p = deg V / 2 in z.
    pub fn p(&self) -> usize {
        self.g.len()
    }

    pub fn v(&self) -> Poly<Q> {
        let mut c = vec![Q::ZERO];
        c.extend(self.g.iter().cloned());
        Poly::from_q(c)
    }

    /// dV/dλ.
    pub fn v_lambda(&self) -> Poly<Q> {
        self.v().derivative()
    }

    /// V(x) as a polynomial in z = x.
    pub fn v_of_x(&self) -> Poly<Q> {
        let mut c = vec![Q::ZERO; 2 * self.g.len() + 1];
        for (j, g) in self.g.iter().enumerate() {
            c[2 * (j + 1)] = g.clone();
        }
        Poly::from_q(c)
    }

    /// W(r) = Σ_k C(2k,k)·k·g_{2k}·r^k.
    pub fn hodograph_w(&self) -> Poly<Q> {
        let mut c = vec![Q::ZERO];
        for (j, g) in self.g.iter().enumerate() {
            let k = j as u64 + 1;
            c.push(binom(2 * k, k) * Q::from(k) * g);
        }
        Poly::from_q(c)
    }

    pub fn to_json(&self) -> Value {
        json!({"g": self.g.iter().map(|q| vec![q.numerator().to_string(), q.denominator().to_string()]).collect::<Vec<_>>()})
    }

    /// Accepts {"g": [[num, den], ...]} with integer or string entries, or
    /// plain numbers/strings per coupling.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidInput("potential JSON must be {\"g\": [[num, den], ...]}".into());
        let arr = v.get("g").and_then(|g| g.as_array()).ok_or_else(bad)?;
        let mut g = Vec::new();
        for e in arr {
            let q = match e {
                Value::Array(nd) if nd.len() == 2 => {
                    let part = |x: &Value| -> Result<Q> {
                        match x {
                            Value::Number(n) => parse_q(&n.to_string()),
                            Value::String(s) => parse_q(s),
                            _ => Err(bad()),
                        }
                    };
                    let d = part(&nd[1])?;
                    if d == Q::ZERO {
                        return Err(Error::DivisionByZero("coupling denominator".into()));
                    }
                    part(&nd[0])? / d
                }
                Value::Number(n) => parse_q(&n.to_string())?,
                Value::String(s) => parse_q(s)?,
                _ => return Err(bad()),
            };
            g.push(q);
        }
        Potential::new(g)
    }

    /// `gaussian`, `bmp`, `quartic:g2,g4`, `g:g2,g4,...`, inline JSON, or
    /// a path to a JSON file.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gaussian" {
            return Ok(Potential::gaussian());
        }
        if s == "bmp" {
            return Ok(Potential::bmp());
        }
        if let Some(rest) = s.strip_prefix("quartic:") {
            let v: Result<Vec<Q>> = rest.split(',').map(parse_q).collect();
            let v = v?;
            if v.len() != 2 {
                return Err(Error::InvalidInput("quartic:g2,g4 takes two couplings".into()));
            }
            return Potential::new(v);
        }
        if let Some(rest) = s.strip_prefix("g:") {
            let v: Result<Vec<Q>> = rest.split(',').map(parse_q).collect();
            return Potential::new(v?);
        }
        if s.starts_with('{') {
            let v: Value = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
            return Potential::from_json(&v);
        }
        let path = Path::new(s);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
            return Potential::from_json(&v);
        }
        Err(Error::InvalidInput(format!("unrecognised potential '{}'", s)))
    }

    pub fn render(&self) -> String {
        self.v().render("λ")
    }

    pub fn label(&self) -> String {
        self.g.iter().map(render_q).collect::<Vec<_>>().join(",")
    }

    /// Same couplings divided by T (the weight e^{−(N/T)V}).
    pub fn scaled(&self, t: &Q) -> Result<Self> {
        Potential::new(self.g.iter().map(|g| g / t).collect())
    }

    pub fn is_zero_poly(&self) -> bool {
        self.v().is_zero()
    }
}
