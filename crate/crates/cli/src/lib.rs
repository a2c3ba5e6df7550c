//! Command dispatch for the `hmm` binary. Every command renders to a
//! string so that runs are reproducible byte for byte.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hmm_asymptotics::algebra::scalar::{parse_q, render_q, Scalar, Q};
use hmm_asymptotics::onecut::{expand_regular, find_critical, scaled_series};
use hmm_asymptotics::oracle::{check_string_equation, comparison_rows, recurrence, RecurrenceTable};
use hmm_asymptotics::painleve::{crosscheck_via_series, emit_critical_ode, Critical};
use hmm_asymptotics::phase::{classify_phase, scan_quartic, PhaseResult, Potential};
use hmm_asymptotics::twocut::{expand_two_cut_regular, find_merging, symmetric_scaled_series};
use hmm_asymptotics::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hmm", version, about = "Large-N expansions, critical points and Painlevé equations of even Hermitian matrix models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Decimal digits of working and output precision.
    #[arg(long, global = true, env = "HMM_DIGITS", default_value_t = 30)]
    pub digits: u32,
    /// Output format; JSON by default, CSV for `oracle` and `figure`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// `gaussian`, `bmp`, `quartic:g2,g4`, `g:g2,g4,...`, inline JSON {"g": [[num,den],...]} or a JSON file.
    #[arg(long)]
    pub potential: String,
}

#[derive(Args, Debug, Clone)]
pub struct TArgs {
    /// Temperature, a rational such as 1/2 or 0.75.
    #[arg(long = "T")]
    pub t: Option<String>,
    /// Sweep a:b:steps (steps + 1 equally spaced rational points).
    #[arg(long = "T-range", conflicts_with = "t")]
    pub t_range: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Equilibrium-measure phase (one or two cuts) at T or over a range.
    Phase {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        t: TArgs,
    },
    /// Regular large-N expansion of the recurrence coefficients to order K.
    Expand {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        t: TArgs,
        #[arg(long = "K", default_value_t = 2)]
        k: usize,
    },
    /// One-cut critical points and two-cut merging points.
    Critical {
        #[command(flatten)]
        model: ModelArgs,
        /// Also emit the scaled-series constraint ladder to this order.
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Painlevé hierarchy equation of every critical point.
    Painleve {
        #[command(flatten)]
        model: ModelArgs,
        /// Re-derive each equation from the scaled series and compare.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Finite-N recurrence coefficients from moments, against the expansion.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "T", default_value = "1")]
        t: String,
        #[arg(long = "N")]
        n: usize,
        /// Largest n; defaults to N.
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
    /// CSV data for the phase-diagram and r0(T) figures.
    Figure {
        #[arg(long, value_enum)]
        preset: Preset,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Quartic phase diagram over (g2, g4) at T = 1.
    QuarticPhase,
    /// r0(T) of V = 90λ − 15λ² + λ³ over T in [30, 90].
    BmpR0,
    /// r0, a0, b0 against T for V = −2λ + λ².
    QuarticMerge,
}

/// Machine-readable error document.
pub fn error_json(e: &Error) -> Value {
    json!({"error": e.kind(), "message": e.to_string()})
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn parse_t_range(s: &str) -> Result<Vec<Q>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid("--T-range takes a:b:steps"));
    }
    let a = parse_q(parts[0])?;
    let b = parse_q(parts[1])?;
    let steps: usize = parts[2].parse().map_err(|_| invalid("steps must be a positive integer"))?;
    if steps == 0 || b <= a {
        return Err(invalid("--T-range needs a < b and steps ≥ 1"));
    }
    let h = (&b - &a) / Q::from(steps);
    Ok((0..=steps).map(|i| &a + &h * Q::from(i)).collect())
}

fn t_values(t: &TArgs) -> Result<Vec<Q>> {
    match (&t.t, &t.t_range) {
        (Some(s), None) => Ok(vec![parse_q(s)?]),
        (None, Some(r)) => parse_t_range(r),
        _ => Err(invalid("give --T or --T-range")),
    }
}

fn positive_t(t: &Q) -> Result<()> {
    if *t <= Q::ZERO {
        return Err(invalid("T must be positive"));
    }
    Ok(())
}

/// (r0, (a0, b0)) over the classified phase and its competing candidates.
pub fn leading_terms(ph: &PhaseResult) -> (Option<Scalar>, Option<(Scalar, Scalar)>) {
    let all = std::iter::once(ph).chain(ph.alternatives.iter());
    let mut r0 = None;
    let mut ab = None;
    for p in all {
        if r0.is_none() {
            r0 = p.r0.clone();
        }
        if ab.is_none() {
            ab = p.ab.clone();
        }
    }
    (r0, ab)
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| invalid(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}

fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, f: Format) -> Error {
    invalid(format!("{} does not support --format {:?}", cmd, f).to_lowercase())
}

fn opt(s: &Option<Scalar>, digits: u32) -> String {
    s.as_ref().map(|x| x.render_decimal(digits)).unwrap_or_default()
}

fn phase_cmd(g: &Potential, ts: &[Q], c: &Common) -> Result<String> {
    let results: Vec<Result<PhaseResult>> = ts.iter().map(|t| classify_phase(g, t, c.digits)).collect();
    match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            if ts.len() == 1 {
                return Ok(json_string(&results[0].clone()?.to_json(c.digits)));
            }
            let rows: Vec<Value> = results.iter().map(|r| r.as_ref().map(|p| p.to_json(c.digits)).unwrap_or_else(error_json)).collect();
            Ok(json_string(&json!({"potential": g.to_json(), "points": rows})))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&results)
                .map(|(t, r)| match r {
                    Ok(p) => {
                        let (r0, ab) = leading_terms(p);
                        let (a0, b0) = ab.map(|(a, b)| (Some(a), Some(b))).unwrap_or((None, None));
                        vec![
                            render_q(t),
                            p.s.to_string(),
                            p.alpha2.render_decimal(c.digits),
                            opt(&p.beta2, c.digits),
                            p.status.to_string(),
                            opt(&r0, c.digits),
                            opt(&a0, c.digits),
                            opt(&b0, c.digits),
                        ]
                    }
                    Err(e) => vec![render_q(t), String::new(), String::new(), String::new(), e.kind().to_string(), String::new(), String::new(), String::new()],
                })
                .collect();
            csv_string(&["T", "s", "alpha2", "beta2", "status", "r0", "a0", "b0"], &rows)
        }
        f => Err(unsupported("phase", f)),
    }
}

fn expand_at(g: &Potential, t: &Q, k: usize, digits: u32) -> Result<(Value, Vec<Vec<String>>)> {
    let ph = classify_phase(g, t, digits)?;
    if ph.beta2.is_none() {
        let ex = expand_regular(g, t, k, digits)?;
        let vals = ex.values()?;
        let rows = vals.iter().enumerate().map(|(i, v)| vec![render_q(t), i.to_string(), v.render_decimal(digits), String::new()]).collect();
        let mut v = ex.to_json(digits)?;
        v["phase"] = json!("one-cut");
        Ok((v, rows))
    } else {
        let ex = expand_two_cut_regular(g, t, k, digits)?;
        let vals = ex.values()?;
        let rows = vals.iter().enumerate().map(|(i, (a, b))| vec![render_q(t), i.to_string(), a.render_decimal(digits), b.render_decimal(digits)]).collect();
        let mut v = ex.to_json(digits)?;
        v["phase"] = json!("two-cut");
        Ok((v, rows))
    }
}

fn expand_cmd(g: &Potential, ts: &[Q], k: usize, c: &Common) -> Result<String> {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for t in ts {
        let (v, r) = expand_at(g, t, k, c.digits)?;
        docs.push(v);
        rows.extend(r);
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json if docs.len() == 1 => Ok(json_string(&docs[0])),
        Format::Json => Ok(json_string(&Value::Array(docs))),
        // one-cut rows put r_k in the first value column; two-cut rows carry (a_k, b_k)
        Format::Csv => csv_string(&["T", "k", "r_or_a", "b"], &rows),
        f => Err(unsupported("expand", f)),
    }
}

fn criticals(g: &Potential, digits: u32) -> Result<Vec<Critical>> {
    let mut out: Vec<Critical> = find_critical(g, digits)?.into_iter().map(Critical::OneCut).collect();
    out.extend(find_merging(g, digits)?.into_iter().map(Critical::Merging));
    Ok(out)
}

fn critical_cmd(g: &Potential, k: Option<usize>, c: &Common) -> Result<String> {
    let crit = criticals(g, c.digits)?;
    let mut docs = Vec::new();
    for cr in &crit {
        let mut v = cr.to_json(c.digits);
        if let Some(k) = k {
            let rels = match cr {
                Critical::OneCut(oc) => scaled_series(g, oc, k)?.relations,
                Critical::Merging(mp) => symmetric_scaled_series(g, mp, k)?.relations,
            };
            v["relations"] = Value::Array(rels.iter().map(|r| json!(r.render())).collect());
        }
        docs.push(v);
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json => Ok(json_string(&json!({"potential": g.to_json(), "critical": docs}))),
        Format::Csv => {
            let rows: Vec<Vec<String>> = crit
                .iter()
                .map(|cr| {
                    let (kind, tc) = match cr {
                        Critical::OneCut(oc) => ("one-cut", &oc.t_c),
                        Critical::Merging(mp) => ("two-cut-merging", &mp.t_c),
                    };
                    vec![kind.to_string(), cr.r_c().render_decimal(c.digits), tc.render_decimal(c.digits), cr.m().to_string()]
                })
                .collect();
            csv_string(&["type", "rc", "Tc", "m"], &rows)
        }
        f => Err(unsupported("critical", f)),
    }
}

fn painleve_cmd(g: &Potential, crosscheck: bool, c: &Common) -> Result<String> {
    let crit = criticals(g, c.digits)?;
    if crit.is_empty() {
        return Err(invalid("the potential has no critical point"));
    }
    let mut docs = Vec::new();
    let mut latex = String::new();
    for cr in &crit {
        let member = emit_critical_ode(cr)?;
        let mut v = member.to_json(c.digits);
        v["critical"] = cr.to_json(c.digits);
        if crosscheck {
            crosscheck_via_series(g, cr, cr.m() + 1)?;
            v["crosscheck"] = json!("agree");
        }
        writeln!(latex, "{}", member.latex()).expect("string write");
        docs.push(v);
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json => Ok(json_string(&json!({"potential": g.to_json(), "equations": docs}))),
        Format::Latex => Ok(latex),
        f => Err(unsupported("painleve", f)),
    }
}

/// r0 + ε²r1 (one cut) or the even/odd b, a branch (two cuts) at
/// t = T·n/N with ε = T/N.
pub fn predicted_r(g: &Potential, t_w: &Q, n_w: usize, n: usize, digits: u32) -> Option<Scalar> {
    let t = t_w * Q::from(n as i64) / Q::from(n_w as i64);
    let eps2 = Scalar::Exact({
        let e = t_w / Q::from(n_w as i64);
        &e * &e
    });
    let ph = classify_phase(g, &t, digits).ok()?;
    if ph.beta2.is_none() {
        let v = expand_regular(g, &t, 1, digits).ok()?.values().ok()?;
        Some(&v[0] + &(&v[1] * &eps2))
    } else {
        let v = expand_two_cut_regular(g, &t, 1, digits).ok()?.values().ok()?;
        let (x0, x1) = if n.is_multiple_of(2) { (&v[0].1, &v[1].1) } else { (&v[0].0, &v[1].0) };
        Some(x0 + &(x1 * &eps2))
    }
}

fn oracle_cmd(g: &Potential, t: &Q, n_w: usize, n_max: usize, c: &Common) -> Result<String> {
    positive_t(t)?;
    if n_w == 0 || n_max == 0 {
        return Err(invalid("--N and --n-max must be positive"));
    }
    let rt: RecurrenceTable = recurrence(g, t, n_w, n_max + 2 * g.p(), c.digits)?;
    let string_n = n_max.min(rt.n_max() + 1 - 2 * g.p());
    let residual = check_string_equation(&rt, g, string_n)?;
    let mut rows = comparison_rows(&rt, |n| predicted_r(g, t, n_w, n, c.digits), c.digits);
    rows.truncate(n_max);
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_string(&["n", "r_n", "predicted", "abs_error"], &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()),
        Format::Json => {
            let table: Vec<Value> = rows.iter().map(|r| json!({"n": r[0], "r_n": r[1], "predicted": r[2], "abs_error": r[3]})).collect();
            Ok(json_string(&json!({
                "potential": g.to_json(),
                "T": render_q(t),
                "N": n_w,
                "digits": c.digits,
                "trusted": rt.trusted.min(n_max),
                "string_residual": Scalar::approx(residual, c.digits).render(6),
                "rows": table,
            })))
        }
        f => Err(unsupported("oracle", f)),
    }
}

/// Rows and header of a figure preset.
pub fn figure_rows(p: Preset, digits: u32) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    match p {
        Preset::QuarticPhase => {
            let g2s: Vec<Q> = (-12..=12).map(|i| Q::from(i) / Q::from(4)).collect();
            let g4s: Vec<Q> = (1..=12).map(|i| Q::from(i) / Q::from(4)).collect();
            Ok((vec!["g2", "g4", "T", "s", "alpha2", "beta2", "status"], scan_quartic(&g2s, &g4s, &Q::ONE, digits)))
        }
        Preset::BmpR0 => {
            let g = Potential::bmp();
            let rows = parse_t_range("30:90:120")?
                .iter()
                .map(|t| {
                    let r0 = classify_phase(&g, t, digits).ok().and_then(|p| leading_terms(&p).0);
                    vec![render_q(t), opt(&r0, digits)]
                })
                .collect();
            Ok((vec!["T", "r0"], rows))
        }
        Preset::QuarticMerge => {
            let g = Potential::from_ints(&[-2, 1])?;
            let rows = parse_t_range("1/20:2:39")?
                .iter()
                .map(|t| {
                    let (r0, ab) = classify_phase(&g, t, digits).map(|p| leading_terms(&p)).unwrap_or((None, None));
                    let (a0, b0) = ab.map(|(a, b)| (Some(a), Some(b))).unwrap_or((None, None));
                    vec![render_q(t), opt(&r0, digits), opt(&a0, digits), opt(&b0, digits)]
                })
                .collect();
            Ok((vec!["T", "r0", "a0", "b0"], rows))
        }
    }
}

fn figure_cmd(p: Preset, c: &Common) -> Result<String> {
    let (header, rows) = figure_rows(p, c.digits)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_string(&header, &rows),
        Format::Json => {
            let pts: Vec<Value> = rows.iter().map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect())).collect();
            Ok(json_string(&Value::Array(pts)))
        }
        f => Err(unsupported("figure", f)),
    }
}

/// Execute a parsed command line and return the rendered output.
pub fn run(cli: &Cli) -> Result<String> {
    let c = &cli.common;
    if c.digits < 10 {
        return Err(invalid("--digits must be at least 10"));
    }
    match &cli.command {
        Command::Phase { model, t } => {
            let ts = t_values(t)?;
            ts.iter().try_for_each(positive_t)?;
            phase_cmd(&Potential::parse(&model.potential)?, &ts, c)
        }
        Command::Expand { model, t, k } => {
            let ts = t_values(t)?;
            ts.iter().try_for_each(positive_t)?;
            expand_cmd(&Potential::parse(&model.potential)?, &ts, *k, c)
        }
        Command::Critical { model, k } => critical_cmd(&Potential::parse(&model.potential)?, *k, c),
        Command::Painleve { model, crosscheck } => painleve_cmd(&Potential::parse(&model.potential)?, *crosscheck, c),
        Command::Oracle { model, t, n, n_max } => {
            let t = parse_q(t)?;
            oracle_cmd(&Potential::parse(&model.potential)?, &t, *n, n_max.unwrap_or(*n), c)
        }
        Command::Figure { preset } => figure_cmd(*preset, c),
    }
}

/// Write output to --out or standard output.
pub fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_range_is_exact() {
        let ts = parse_t_range("1/20:2:39").unwrap();
        assert_eq!(ts.len(), 40);
        assert_eq!(ts[19], Q::ONE);
        assert!(parse_t_range("1:2").is_err());
        assert!(parse_t_range("2:1:3").is_err());
    }

    #[test]
    fn predicted_gaussian() {
        // r_{n,N} = Tn/(2N) with no 1/N² correction
        let p = predicted_r(&Potential::gaussian(), &Q::from(2), 10, 3, 30).unwrap();
        assert_eq!(p, Scalar::ratio(3, 10));
    }
}
