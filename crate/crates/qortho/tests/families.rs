use approx::assert_relative_eq;
use qortho::families::{
    apply_b_q, apply_epsilon, c_closed, c_coeff, gamma_closed, gamma_coeff, monic_op, norm_h, norm_h_closed,
    pearson_residual, weight_omega, weight_rho, Ensemble, WeightFamily,
};
use qortho::poly::PolySeries;
use qortho::qcore::{q_poch_finite, LatticePoint, QContext};

fn families() -> Vec<(WeightFamily, f64)> {
    vec![
        (WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 }, 0.3),
        (WeightFamily::AlSalamCarlitz { alpha: -0.6 }, 0.25),
        (WeightFamily::QLaguerre { alpha: 0.5 }, 0.25),
        (WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 }, 0.25),
    ]
}

fn ensemble(fam: WeightFamily, q: f64, deg: usize) -> Ensemble {
    Ensemble::new(fam, QContext::new(q).unwrap(), deg).unwrap()
}

/// Indices whose weight mass is not negligible.
fn bulk(ens: &Ensemble) -> Vec<usize> {
    let nodes = ens.lattice().nodes();
    let peak = nodes.iter().map(|n| (n.jw * n.rho).abs()).fold(0.0, f64::max);
    (0..nodes.len()).filter(|&i| (nodes[i].jw * nodes[i].rho).abs() > 1e-6 * peak).collect()
}

#[test]
fn ops_are_orthogonal_and_norms_match_closed_forms() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 6);
        let ctx = QContext::new(q).unwrap();
        for n in 0..=6 {
            assert!(ens.op(n).is_monic());
            for m in 0..n {
                let ip = ens.ip2_vals(ens.op_values(n), ens.op_values(m));
                assert!(ip.abs() <= 1e-10 * (ens.norm(n) * ens.norm(m)).sqrt(), "{fam:?} <p{n},p{m}> = {ip}");
            }
            let closed = norm_h_closed(&fam, n, &ctx).unwrap();
            assert_relative_eq!(ens.norm(n), closed, max_relative = 1e-10);
            assert_relative_eq!(norm_h(&fam, n, &ctx).unwrap(), closed, max_relative = 1e-15);
        }
    }
}

/// `₂φ₁(Q^{−n}, abQ^{n+1}; aQ; Q; Qx)` at `Q = √q`, `a = Q^α`, `b = Q^β`.
fn little_q_jacobi_series(n: usize, alpha: f64, beta: f64, q: f64) -> PolySeries {
    let s = q.sqrt();
    let (a, b) = (s.powf(alpha), s.powf(beta));
    let coeffs: Vec<f64> = (0..=n)
        .map(|k| {
            q_poch_finite(s.powi(-(n as i32)), s, k) * q_poch_finite(a * b * s.powi(n as i32 + 1), s, k)
                / (q_poch_finite(a * s, s, k) * q_poch_finite(s, s, k))
                * s.powi(k as i32)
        })
        .collect();
    let lead = coeffs[n];
    PolySeries::new(coeffs).scale(1.0 / lead).into_monic()
}

#[test]
fn little_q_jacobi_matches_hypergeometric_series() {
    for &(alpha, beta, q) in &[(0.5, 1.5, 0.3), (0.0, 0.0, 0.25), (2.0, 0.5, 0.5)] {
        let ctx = QContext::new(q).unwrap();
        let fam = WeightFamily::LittleQJacobi { alpha, beta };
        for n in 1..=5 {
            let p = monic_op(&fam, n, &ctx).unwrap();
            let r = little_q_jacobi_series(n, alpha, beta, q);
            assert!(p.scaled_distance(&r) < 1e-10, "n={n}: {:?} vs {:?}", p.coeffs(), r.coeffs());
        }
    }
}

#[test]
fn pearson_pair_holds_on_the_lattice() {
    for (fam, q) in families() {
        let ctx = QContext::new(q).unwrap();
        let ens = ensemble(fam, q, 0);
        for i in bulk(&ens) {
            let x = ens.lattice().nodes()[i].x;
            let r = pearson_residual(&fam, x, &ctx).unwrap();
            assert!(r.abs() < 1e-10, "{fam:?} at {x}: {r}");
        }
    }
}

#[test]
fn omega_squares_to_rho_over_f() {
    for (fam, q) in families() {
        let ctx = QContext::new(q).unwrap();
        let ens = ensemble(fam, q, 0);
        let s = ctx.base();
        for i in bulk(&ens) {
            let pt = ens.lattice().nodes()[i].pt;
            let x = pt.value(q);
            let lhs = weight_omega(&fam, &pt, &ctx).unwrap() * weight_omega(&fam, &pt.inward(), &ctx).unwrap();
            let rhs = weight_rho(&fam, x, &ctx).unwrap() / ens.pearson().f.eval(s * x);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
        }
    }
}

#[test]
fn a_q_is_tridiagonal_on_ops() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 7);
        for n in 0..=5 {
            let a = ens.values(&ens.apply_a(ens.op(n)));
            for m in 0..=7 {
                if m + 1 == n || m == n + 1 {
                    continue;
                }
                let ip = ens.ip2_vals(&a, ens.op_values(m));
                let scale = (ens.ip2_vals(&a, &a) * ens.norm(m)).sqrt();
                assert!(ip.abs() < 1e-9 * scale, "{fam:?} <A p{n}, p{m}> = {ip}");
            }
        }
    }
}

#[test]
fn a_q_is_antisymmetric() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 4);
        for n in 0..=4 {
            for m in 0..=4 {
                let (p, r) = (ens.op(n), ens.op(m));
                let lhs = ens.ip2(&ens.apply_a(p), r) + ens.ip2(p, &ens.apply_a(r));
                let scale = ens.ip2(&ens.apply_a(p), r).abs().max((ens.norm(n) * ens.norm(m)).sqrt());
                assert!(lhs.abs() < 1e-10 * scale, "{fam:?} n={n} m={m}: {lhs}");
            }
        }
    }
}

#[test]
fn b_q_inverts_a_q() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 4);
        let k2 = (1.0 + ens.base()).powi(2);
        let nodes = ens.lattice().nodes();
        for n in 0..=4 {
            let pv = ens.op_values(n);
            let bav = ens.b_eps_vals(&ens.values(&ens.apply_a(ens.op(n))));
            let scale = bulk(&ens).iter().map(|&i| pv[i].abs()).fold(0.0, f64::max);
            for i in bulk(&ens) {
                let d = bav[i] - k2 * pv[i];
                assert!(d.abs() < 1e-8 * scale, "{fam:?} n={n} x={}: {} vs {}", nodes[i].x, bav[i], k2 * pv[i]);
            }
        }
    }
}

#[test]
fn b_q_routes_agree() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 3);
        let nodes = ens.lattice().nodes();
        for n in 0..=3 {
            let a = ens.b_eps_vals(ens.op_values(n));
            let b = ens.b_s_vals(ens.op_values(n));
            let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for i in bulk(&ens) {
                assert!((a[i] - b[i]).abs() < 1e-10 * scale, "{fam:?} n={n} x={}", nodes[i].x);
            }
        }
        let ctx = QContext::new(q).unwrap();
        let pt = nodes[bulk(&ens)[0]].pt;
        assert!(apply_b_q(&fam, |p| p.value(q), &pt, &ctx).is_ok());
    }
}

#[test]
fn b_q_relates_the_two_skew_products() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 4);
        for n in 0..=3 {
            for m in 0..=3 {
                let (phi, psi) = (ens.op_values(n), ens.op_values(m));
                let lhs = ens.ip2_vals(phi, &ens.b_eps_vals(psi));
                let rhs = -ens.ip1_vals(phi, psi);
                let scale = lhs.abs().max(rhs.abs()).max((ens.norm(n) * ens.norm(m)).sqrt());
                assert!((lhs - rhs).abs() < 1e-10 * scale, "{fam:?} n={n} m={m}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn epsilon_is_a_right_inverse_of_r() {
    for (fam, q) in families() {
        let ens = ensemble(fam, q, 3);
        let nodes = ens.lattice().nodes();
        for n in 0..=3 {
            let psi: Vec<f64> = nodes.iter().zip(ens.op_values(n)).map(|(nd, v)| nd.x * nd.rho * v).collect();
            let g = ens.epsilon_vals(&psi);
            let scale = psi.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for i in bulk(&ens) {
                let r = ens.r_op_at(&g, i);
                assert!((r - psi[i]).abs() < 1e-10 * scale, "{fam:?} n={n} x={}: {r} vs {}", nodes[i].x, psi[i]);
            }
        }
    }
}

#[test]
fn epsilon_inverts_r_on_decaying_data() {
    let q = 0.3;
    let ctx = QContext::new(q).unwrap();
    let fam = WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 };
    let ens = ensemble(fam, q, 0);
    let nodes = ens.lattice().nodes();
    let phi: Vec<f64> = nodes.iter().map(|n| if n.is_integer() { 0.0 } else { n.x }).collect();
    let rphi: Vec<f64> = (0..nodes.len()).map(|i| ens.r_op_at(&phi, i)).collect();
    let back = ens.epsilon_vals(&rphi);
    let pt = LatticePoint::new(1.0, 5);
    let i = ens.lattice().index_of(&pt).unwrap();
    assert_relative_eq!(back[i], pt.value(q), max_relative = 1e-10);
    let direct = apply_epsilon(&fam, |p| ens.r_op_at(&phi, ens.lattice().index_of(p).unwrap()), &pt, &ctx).unwrap();
    assert_relative_eq!(direct, pt.value(q), max_relative = 1e-10);
}

#[test]
fn recurrence_coefficients_match_closed_forms() {
    for (fam, q) in families() {
        let ctx = QContext::new(q).unwrap();
        for j in 0..=5 {
            assert_relative_eq!(c_coeff(&fam, j, &ctx).unwrap(), c_closed(&fam, j, &ctx).unwrap());
            assert_relative_eq!(gamma_coeff(&fam, j, &ctx).unwrap(), gamma_closed(&fam, j, &ctx).unwrap());
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let ctx = QContext::new(0.25).unwrap();
    for fam in [
        WeightFamily::LittleQJacobi { alpha: -1.5, beta: 0.0 },
        WeightFamily::AlSalamCarlitz { alpha: 0.5 },
        WeightFamily::QLaguerre { alpha: -2.0 },
    ] {
        assert!(Ensemble::new(fam, ctx, 2).is_err(), "{fam:?}");
    }
    assert!(QContext::new(1.0).is_err());
    assert!(QContext::new(0.0).is_err());
    assert!(Ensemble::new(WeightFamily::QLaguerre { alpha: 0.5 }, ctx, 40).is_err());
}
