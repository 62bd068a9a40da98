//! The four classical weight families, their Pearson pairs and skew
//! weights, orthogonal polynomials at base `√q`, and the operators
//! `A_q`, `ε_q`, `B_q`.

mod closed;
mod lattice;
mod ops;

pub use closed::{
    aomoto_selberg, c_closed, gamma_closed, j_display_coeff, norm_h_closed, partition_explicit, rho_over_omega_closed,
    sop_coeff_closed,
};
pub use lattice::{Lattice, Node};
pub use ops::{
    apply_a_q, apply_b_q, apply_epsilon, c_coeff, derivative, gamma_coeff, monic_op, norm_h, Ensemble, MAX_DEGREE,
};

use crate::error::{Error, Result};
use crate::poly::PolySeries;
use crate::qcore::{q_bracket, q_poch_gen, q_poch_inf, LatticePoint, QContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFamily {
    LittleQJacobi { alpha: f64, beta: f64 },
    AlSalamCarlitz { alpha: f64 },
    QLaguerre { alpha: f64 },
    BigQJacobi { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `(0, 1]`, lattice `q^{k/2}`, `k ≥ 0`.
    Unit,
    /// `(0, ∞)`, lattice `q^{k/2}`, `k ∈ ℤ`.
    Bilateral,
    /// Two branches `lo·q^{k/2}` and `hi·q^{k/2}`, `k ≥ 0`, with `lo < 0 < hi`.
    TwoSided { lo: f64, hi: f64 },
}

/// Pearson pair `(f, g)` at the working base.
#[derive(Debug, Clone, PartialEq)]
pub struct PearsonPair {
    pub f: PolySeries,
    pub g: PolySeries,
}

impl WeightFamily {
    pub fn name(&self) -> &'static str {
        match self {
            WeightFamily::LittleQJacobi { .. } => "little-q-jacobi",
            WeightFamily::AlSalamCarlitz { .. } => "al-salam-carlitz",
            WeightFamily::QLaguerre { .. } => "q-laguerre",
            WeightFamily::BigQJacobi { .. } => "big-q-jacobi",
        }
    }

    pub fn validate(&self, ctx: &QContext) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            WeightFamily::LittleQJacobi { alpha, beta } => {
                if !(alpha > -1.0) {
                    return bad(format!("little q-Jacobi needs alpha > -1, got {alpha}"));
                }
                if !(beta > -1.0) {
                    return bad(format!("little q-Jacobi needs beta > -1, got {beta}"));
                }
            }
            WeightFamily::AlSalamCarlitz { alpha } => {
                if !(alpha < 0.0) {
                    return bad(format!("Al-Salam & Carlitz needs alpha < 0, got {alpha}"));
                }
            }
            WeightFamily::QLaguerre { alpha } => {
                if !(alpha > -1.0) {
                    return bad(format!("q-Laguerre needs alpha > -1, got {alpha}"));
                }
            }
            WeightFamily::BigQJacobi { a, b, c } => {
                let q = ctx.q;
                if !(a * q > 0.0 && a * q < 1.0) {
                    return bad(format!("big q-Jacobi needs 0 < a q < 1, got a = {a}"));
                }
                if !(b * q >= 0.0 && b * q < 1.0) {
                    return bad(format!("big q-Jacobi needs 0 <= b q < 1, got b = {b}"));
                }
                if !(c < 0.0) {
                    return bad(format!("big q-Jacobi needs c < 0, got c = {c}"));
                }
            }
        }
        Ok(())
    }

    pub fn support(&self, ctx: &QContext) -> Support {
        let s = ctx.base();
        match *self {
            WeightFamily::LittleQJacobi { .. } => Support::Unit,
            WeightFamily::QLaguerre { .. } => Support::Bilateral,
            WeightFamily::AlSalamCarlitz { alpha } => Support::TwoSided { lo: alpha, hi: 1.0 },
            WeightFamily::BigQJacobi { a, c, .. } => Support::TwoSided { lo: c * s, hi: a * s },
        }
    }

    /// Lattice anchors, positive branch first.
    pub fn anchors(&self, ctx: &QContext) -> Vec<f64> {
        match self.support(ctx) {
            Support::Unit | Support::Bilateral => vec![1.0],
            Support::TwoSided { lo, hi } => vec![hi, lo],
        }
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(self, WeightFamily::AlSalamCarlitz { .. } | WeightFamily::BigQJacobi { .. })
    }

    fn check_domain(&self, x: f64, ctx: &QContext) -> Result<()> {
        let ok = match self.support(ctx) {
            Support::Unit => x > 0.0 && x <= 1.0 + 1e-12,
            Support::Bilateral => x > 0.0,
            Support::TwoSided { lo, hi } => x != 0.0 && x >= lo * (1.0 + 1e-12) && x <= hi * (1.0 + 1e-12),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!("x = {x} outside the {} support", self.name())))
        }
    }
}

/// The classical weight `ρ(x; √q)`.
pub fn weight_rho(fam: &WeightFamily, x: f64, ctx: &QContext) -> Result<f64> {
    fam.check_domain(x, ctx)?;
    rho_unchecked(fam, x, ctx)
}

pub(crate) fn rho_unchecked(fam: &WeightFamily, x: f64, ctx: &QContext) -> Result<f64> {
    let s = ctx.base();
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => x.powf(alpha) * q_poch_gen(s * x, s, beta, ctx)?,
        WeightFamily::AlSalamCarlitz { alpha } => q_poch_inf(s * x, s, ctx)? * q_poch_inf(s * x / alpha, s, ctx)?,
        WeightFamily::QLaguerre { alpha } => x.powf(alpha) / q_poch_inf(-x, s, ctx)?,
        WeightFamily::BigQJacobi { a, b, c } => {
            q_poch_inf(x / a, s, ctx)? * q_poch_inf(x / c, s, ctx)?
                / (q_poch_inf(x, s, ctx)? * q_poch_inf(b * x / c, s, ctx)?)
        }
    })
}

/// The skew weight `ω(x; q)` in closed form.
pub fn weight_omega(fam: &WeightFamily, pt: &LatticePoint, ctx: &QContext) -> Result<f64> {
    let x = pt.value(ctx.q);
    fam.check_domain(x, ctx)?;
    let q = ctx.q;
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => {
            // x^{(α-1)/2} taken from the exponent numerator
            let pow = pt.endpoint.powf((alpha - 1.0) / 2.0) * q.powf(pt.k as f64 * (alpha - 1.0) / 4.0);
            q.powf(-(alpha + 1.0) / 8.0) * pow * q_poch_gen(q * x, q, (beta - 1.0) / 2.0, ctx)?
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (-alpha).powf(-0.5) * q_poch_inf(q * x, q, ctx)? * q_poch_inf(q * x / alpha, q, ctx)?
        }
        WeightFamily::QLaguerre { alpha } => {
            let pow = pt.endpoint.powf((alpha - 1.0) / 2.0) * q.powf(pt.k as f64 * (alpha - 1.0) / 4.0);
            q.powf(-(alpha + 1.0) / 8.0) * pow / q_poch_inf(-x, q, ctx)?
        }
        WeightFamily::BigQJacobi { a, b, c } => {
            let s = ctx.base();
            q_poch_inf(s * x / a, q, ctx)? * q_poch_inf(s * x / c, q, ctx)?
                / (q_poch_inf(x, q, ctx)? * q_poch_inf(b * x / c, q, ctx)?)
        }
    })
}

/// The Pearson pair at base `√q`.
pub fn pearson_pair(fam: &WeightFamily, ctx: &QContext) -> PearsonPair {
    let s = ctx.base();
    let q = ctx.q;
    let (f, g) = match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => {
            (vec![0.0, 1.0, -1.0], vec![q_bracket(alpha + 1.0, s), -q_bracket(alpha + beta + 2.0, s)])
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (vec![-alpha, 1.0 + alpha, -1.0], vec![-(1.0 + alpha) / (s - 1.0), 1.0 / (s - 1.0)])
        }
        WeightFamily::QLaguerre { alpha } => {
            let t = s.powf(alpha + 1.0);
            (vec![0.0, 1.0], vec![(1.0 - t) / (1.0 - s), -t / (1.0 - s)])
        }
        WeightFamily::BigQJacobi { a, b, c } => (
            vec![1.0, -1.0 / (a * s) - 1.0 / (c * s), 1.0 / (a * c * q)],
            vec![(b / c + 1.0 - 1.0 / (a * s) - 1.0 / (c * s)) / (1.0 - s), (1.0 / (a * c * q) - b / c) / (1.0 - s)],
        ),
    };
    PearsonPair { f: PolySeries::new(f), g: PolySeries::new(g) }
}

/// Pearson residual `ρ(√q x)/ρ(x) − (f(x) − (1−√q) x g(x))/f(√q x)` at `x`.
pub fn pearson_residual(fam: &WeightFamily, x: f64, ctx: &QContext) -> Result<f64> {
    let s = ctx.base();
    let pp = pearson_pair(fam, ctx);
    let lhs = rho_unchecked(fam, s * x, ctx)? / rho_unchecked(fam, x, ctx)?;
    let rhs = (pp.f.eval(x) - (1.0 - s) * x * pp.g.eval(x)) / pp.f.eval(s * x);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_families() -> Vec<(WeightFamily, f64)> {
        vec![
            (WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 }, 0.3),
            (WeightFamily::AlSalamCarlitz { alpha: -0.6 }, 0.25),
            (WeightFamily::QLaguerre { alpha: 0.5 }, 0.25),
            (WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 }, 0.25),
        ]
    }

    #[test]
    fn rho_examples() {
        let ctx = QContext::new(0.25).unwrap();
        let lqj = WeightFamily::LittleQJacobi { alpha: 0.0, beta: 0.0 };
        assert_eq!(weight_rho(&lqj, 0.3, &ctx).unwrap(), 1.0);
        let asc = WeightFamily::AlSalamCarlitz { alpha: -1.0 };
        let x = ctx.q.powf(-0.5);
        assert!(rho_unchecked(&asc, x, &ctx).unwrap().abs() < 1e-15);
        let lag = WeightFamily::QLaguerre { alpha: 0.5 };
        let direct: f64 = 1.0 / (0..120).map(|i| 1.0 + 0.5f64.powi(i)).product::<f64>();
        assert_relative_eq!(weight_rho(&lag, 1.0, &ctx).unwrap(), direct, max_relative = 1e-13);
        assert!(weight_rho(&lqj, 2.0, &ctx).is_err());
    }

    #[test]
    fn omega_examples() {
        let ctx = QContext::new(0.3).unwrap();
        let lqj = WeightFamily::LittleQJacobi { alpha: 1.0, beta: 1.0 };
        let pt = LatticePoint::new(1.0, 5);
        assert_relative_eq!(weight_omega(&lqj, &pt, &ctx).unwrap(), 0.3f64.powf(-0.25), max_relative = 1e-14);
        let ctx = QContext::new(0.25).unwrap();
        let asc = WeightFamily::AlSalamCarlitz { alpha: -1.0 };
        let pt = LatticePoint::new(1.0, 3);
        let x = pt.value(0.25);
        let want = q_poch_inf(0.25 * x, 0.25, &ctx).unwrap() * q_poch_inf(-0.25 * x, 0.25, &ctx).unwrap();
        assert_relative_eq!(weight_omega(&asc, &pt, &ctx).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn omega_functional_equation() {
        for (fam, q) in sample_families() {
            let ctx = QContext::new(q).unwrap();
            let s = ctx.base();
            let pp = pearson_pair(&fam, &ctx);
            for &e in &fam.anchors(&ctx) {
                let ks: Vec<i64> =
                    if fam.support(&ctx) == Support::Bilateral { (-8..12).collect() } else { (0..20).collect() };
                for k in ks {
                    let pt = LatticePoint::new(e, k);
                    let x = pt.value(q);
                    let lhs = weight_omega(&fam, &pt, &ctx).unwrap() * weight_omega(&fam, &pt.inward(), &ctx).unwrap();
                    let rhs = weight_rho(&fam, x, &ctx).unwrap() / pp.f.eval(s * x);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
                }
            }
        }
        let ctx = QContext::new(0.3).unwrap();
        let fam = WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 };
        let pt = LatticePoint::new(1.0, 3);
        let lhs = weight_omega(&fam, &pt, &ctx).unwrap() * weight_omega(&fam, &pt.inward(), &ctx).unwrap();
        let x = pt.value(0.3);
        let rhs = weight_rho(&fam, x, &ctx).unwrap() / pearson_pair(&fam, &ctx).f.eval(ctx.base() * x);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn pearson_holds_on_lattice() {
        for (fam, q) in sample_families() {
            let ctx = QContext::new(q).unwrap();
            for &e in &fam.anchors(&ctx) {
                let ks: Vec<i64> =
                    if fam.support(&ctx) == Support::Bilateral { (-20..=20).collect() } else { (0..=20).collect() };
                for k in ks {
                    let x = LatticePoint::new(e, k).value(q);
                    let r = pearson_residual(&fam, x, &ctx).unwrap();
                    let scale = rho_unchecked(&fam, ctx.base() * x, &ctx).unwrap().abs()
                        / rho_unchecked(&fam, x, &ctx).unwrap().abs();
                    assert!(r.abs() <= 1e-9 * scale.max(1.0), "{} k={k} r={r}", fam.name());
                }
            }
        }
    }

    #[test]
    fn pearson_pair_shapes() {
        let ctx = QContext::new(0.25).unwrap();
        let lqj = pearson_pair(&WeightFamily::LittleQJacobi { alpha: 0.0, beta: 0.0 }, &ctx);
        assert_eq!(lqj.f.coeffs(), &[0.0, 1.0, -1.0]);
        assert_relative_eq!(lqj.g.coeff(1), -q_bracket(2.0, 0.5));
        assert_relative_eq!(lqj.g.coeff(0), 1.0);
        let lag = pearson_pair(&WeightFamily::QLaguerre { alpha: 0.5 }, &ctx);
        assert_eq!(lag.f.coeffs(), &[0.0, 1.0]);
        for fam in [
            WeightFamily::LittleQJacobi { alpha: 0.0, beta: 0.0 },
            WeightFamily::AlSalamCarlitz { alpha: -1.0 },
            WeightFamily::QLaguerre { alpha: 0.5 },
            WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 },
        ] {
            let pp = pearson_pair(&fam, &ctx);
            assert!(pp.f.deg() <= 2 && pp.g.deg() <= 1);
        }
    }

    #[test]
    fn validation_messages() {
        let ctx = QContext::new(0.25).unwrap();
        let e = WeightFamily::LittleQJacobi { alpha: -2.0, beta: 0.0 }.validate(&ctx).unwrap_err();
        assert!(e.to_string().contains("alpha > -1"));
        assert!(WeightFamily::AlSalamCarlitz { alpha: 0.5 }.validate(&ctx).is_err());
        assert!(WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: 0.4 }.validate(&ctx).is_err());
    }
}
