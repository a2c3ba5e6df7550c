use proptest::prelude::*;

use hmm_asymptotics::algebra::scalar::{q_ratio, Scalar, Q};
use hmm_asymptotics::algebra::{residue_at_infinity, Differential, Poly, Ring, StructuredRational};
use hmm_asymptotics::diffpoly::DiffPoly;
use hmm_asymptotics::onecut::{expand_regular, quadratic_residual};
use hmm_asymptotics::oracle::recurrence;
use hmm_asymptotics::painleve::{gelfand_dikii, pii_hierarchy};
use hmm_asymptotics::phase::{classify_phase, compute_h, normalization, Endpoints, Potential, Status};
use hmm_asymptotics::twocut::{build_f, expand_two_cut_regular};

fn rational() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| q_ratio(n, d))
}

fn positive_rational() -> impl Strategy<Value = Q> {
    (1i64..=40, 1i64..=12).prop_map(|(n, d)| q_ratio(n, d))
}

/// Couplings (g₂, …, g_{2p}) with p ≤ 4 and g_{2p} > 0.
fn potential() -> impl Strategy<Value = Potential> {
    (prop::collection::vec(rational(), 0..=3), positive_rational()).prop_map(|(mut g, top)| {
        g.push(top);
        Potential::new(g).unwrap()
    })
}

/// Small random differential polynomial in 𝔯₁, 𝔯₂.
fn diffpoly() -> impl Strategy<Value = DiffPoly> {
    let term = (-5i64..=5, 1u32..=2, 0u32..=3, 1u32..=2, 0u32..=2, prop::bool::ANY);
    prop::collection::vec(term, 1..=4).prop_map(|ts| {
        ts.into_iter().fold(DiffPoly::zero(), |acc, (c, v, o, p, o2, two)| {
            let mut m = DiffPoly::var_d(v, o).pow_u(p);
            if two {
                m = m.times(&DiffPoly::var_d(1, o2));
            }
            acc.plus(&m.scale(&Q::from(c)))
        })
    })
}

fn lambda_over_w(r0: &Q) -> StructuredRational<Q> {
    StructuredRational::new(Q::ZERO, Q::from(4) * r0, vec![(0, Poly::from_q(vec![Q::ZERO, Q::ONE]))], None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hodograph_is_a_residue(g in potential(), r0 in positive_rational()) {
        let res = residue_at_infinity(&lambda_over_w(&r0), &g.v_lambda()).unwrap();
        prop_assert_eq!(res, g.hodograph_w().eval(&r0));
    }

    #[test]
    fn residue_is_linear(g in potential(), h in potential(), c in rational(), r0 in positive_rational()) {
        let x = lambda_over_w(&r0);
        let combo = g.v_lambda().plus(&h.v_lambda().scale(&c));
        let lhs = residue_at_infinity(&x, &combo).unwrap();
        let rhs = residue_at_infinity(&x, &g.v_lambda()).unwrap() + &c * residue_at_infinity(&x, &h.v_lambda()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integrate_inverts_d_dx(p in diffpoly()) {
        let p = p.minus(&DiffPoly::constant(p.constant_term()));
        let dp = p.d_dx();
        prop_assert!(dp.is_total_derivative());
        prop_assert_eq!(dp.integrate_exact().unwrap(), p.clone());
        for v in dp.vars() {
            prop_assert!(dp.euler(v).is_zero());
        }
    }

    #[test]
    fn h_matches_w_prime(g in potential(), r0 in positive_rational()) {
        let r0 = Scalar::Exact(r0);
        let lam = r0.scale(&Q::from(4));
        let h = compute_h(&g, &Endpoints::OneCut { alpha2: lam.clone() });
        prop_assert_eq!(h.eval(&lam), g.hodograph_w().derivative().eval_scalar(&r0));
    }

    #[test]
    fn epd_holds(g in potential(), t in positive_rational()) {
        prop_assert!(build_f(&g, &t).epd_residual().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn regular_phases_are_normalised(g2 in -6i64..=6, g4 in 1i64..=4, t in (1i64..=30, 1i64..=10)) {
        let g = Potential::from_ints(&[g2, g4]).unwrap();
        let t = q_ratio(t.0, t.1);
        if let Ok(ph) = classify_phase(&g, &t, 30) {
            if ph.status == Status::Regular {
                prop_assert!((normalization(&ph) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn one_cut_series_solves_the_quadratic_equation(g4 in 1i64..=5, g2 in 1i64..=5, t in (1i64..=20, 1i64..=5)) {
        let g = Potential::from_ints(&[g2, g4]).unwrap();
        let t = q_ratio(t.0, t.1);
        let ex = expand_regular(&g, &t, 2, 30).unwrap();
        for (k, res) in quadratic_residual(&ex.series, &ex.coeffs[0].deriv()).iter().enumerate() {
            prop_assert!(res.is_zero(), "order {}", k);
        }
        for r in ex.string_residuals() {
            prop_assert!(r.eval(&ex.r0).unwrap().is_negligible());
        }
    }

    #[test]
    fn two_cut_swap_symmetry(t in (1i64..=19, 20i64..=20)) {
        let g = Potential::from_ints(&[-2, 1]).unwrap();
        let e = expand_two_cut_regular(&g, &q_ratio(t.0, t.1), 2, 30).unwrap();
        let s = e.swapped().unwrap();
        for (p, q) in e.values().unwrap().iter().zip(s.values().unwrap()) {
            prop_assert!((&p.0 - &q.1).abs().to_f64() < 1e-20 && (&p.1 - &q.0).abs().to_f64() < 1e-20);
        }
    }

    #[test]
    fn recurrence_is_positive(g2 in -2i64..=3, n in 4usize..=12) {
        let g = Potential::from_ints(&[g2, 1]).unwrap();
        let rt = recurrence(&g, &Q::ONE, n, n, 30).unwrap();
        for k in 1..=n {
            prop_assert!(rt.r_n(k).sign() > 0);
        }
        prop_assert!(rt.h.iter().all(|h| h.to_f64().value() > 0.0));
    }
}

fn weight(p: &DiffPoly) -> Option<u32> {
    let mut w = None;
    for m in p.terms().keys() {
        let wm: u32 = m.factors().iter().map(|&(_, o, pw)| (2 + o) * pw).sum();
        if *w.get_or_insert(wm) != wm {
            return None;
        }
    }
    w
}

#[test]
fn gelfand_dikii_is_exact_and_homogeneous() {
    let r = gelfand_dikii(8).unwrap();
    for (m, rm) in r.iter().enumerate().skip(1).take(4) {
        assert_eq!(weight(rm), Some(2 * m as u32), "R_{}", m);
    }
}

#[test]
fn pii_hierarchy_is_exact() {
    let h = pii_hierarchy(6).unwrap();
    let rho = DiffPoly::rho();
    for (r, s) in &h {
        assert_eq!(rho.times(&s.d_dx()).scale(&Q::from(2)), DiffPoly::var(1).times(&r.d_dx()));
    }
}
