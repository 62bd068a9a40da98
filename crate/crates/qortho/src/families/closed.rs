//! Closed-form norms, connection coefficients, SOP coefficients and
//! partition products for the four families.

use super::WeightFamily;
use crate::error::{Error, Result};
use crate::qcore::{q_bracket, q_gamma, q_poch_gen, q_poch_inf, LatticePoint, QContext};

struct Q<'a> {
    ctx: &'a QContext,
    q: f64,
    b: f64,
}

impl<'a> Q<'a> {
    fn new(ctx: &'a QContext) -> Self {
        Q { ctx, q: ctx.q, b: ctx.base() }
    }
    /// `(a; √q)_ν`.
    fn p(&self, a: f64, nu: f64) -> Result<f64> {
        q_poch_gen(a, self.b, nu, self.ctx)
    }
    /// `(a; √q)_∞`.
    fn pi(&self, a: f64) -> Result<f64> {
        q_poch_inf(a, self.b, self.ctx)
    }
    /// `(√q; √q)_ν`.
    fn bb(&self, nu: f64) -> Result<f64> {
        self.p(self.b, nu)
    }
}

/// `h_n = ⟨p_n, p_n⟩₂`.
pub fn norm_h_closed(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    fam.validate(ctx)?;
    let z = Q::new(ctx);
    let (q, b, nf) = (z.q, z.b, n as f64);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha: a, beta: be } => {
            q.powf(nf * (nf + a) / 2.0) / q_bracket(a + be + 2.0 * nf + 1.0, b)
                * z.bb(nf)?
                * z.bb(nf + a)?
                * z.bb(nf + be)?
                * z.bb(nf + a + be)?
                / z.bb(2.0 * nf + a + be)?.powi(2)
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (-alpha).powi(n as i32)
                * (1.0 - b)
                * b.powf(nf * (nf - 1.0) / 2.0)
                * z.bb(nf)?
                * z.pi(alpha)?
                * z.pi(b / alpha)?
                * z.pi(b)?
        }
        WeightFamily::QLaguerre { alpha } => {
            let t = b.powf(alpha + 1.0);
            (1.0 - b) / 2.0 * b.powf(-2.0 * nf * (nf + alpha) - nf) * z.pi(b)? * z.pi(-t)? * z.pi(-b.powf(-alpha))?
                / (z.pi(t)? * z.pi(-b)?.powi(2))
                * z.p(t, nf)?
                * z.bb(nf)?
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            let ab = a * bq;
            let num = a
                * b
                * (1.0 - b)
                * (-a * c * b * b).powi(n as i32)
                * b.powf(nf * (nf - 1.0) / 2.0)
                * z.pi(b)?
                * z.pi(c / a)?
                * z.pi(a * b / c)?
                * z.pi(ab * b)?
                * z.bb(nf)?
                * z.p(a * b, nf)?
                * z.p(bq * b, nf)?
                * z.p(c * b, nf)?
                * z.p(ab * b / c, nf)?;
            let den = (1.0 - ab * b.powf(2.0 * nf + 1.0))
                * z.pi(a * b)?
                * z.pi(bq * b)?
                * z.pi(c * b)?
                * z.pi(ab * b / c)?
                * z.p(ab * b, nf)?
                * z.p(ab * b.powf(nf + 1.0), nf)?.powi(2);
            num / den
        }
    })
}

/// `c_j = −⟨p_{j+1}, A_q p_j⟩₂`.
pub fn c_closed(fam: &WeightFamily, j: usize, ctx: &QContext) -> Result<f64> {
    let (q, b, jf) = (ctx.q, ctx.base(), j as f64);
    let h1 = norm_h_closed(fam, j + 1, ctx)?;
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => b.powf(-jf) * q_bracket(alpha + beta + 2.0 * jf + 2.0, b) * h1,
        WeightFamily::AlSalamCarlitz { .. } => b.powf(-jf) * h1 / (1.0 - b),
        WeightFamily::QLaguerre { alpha } => b.powf(jf + alpha + 1.0) * h1 / (1.0 - b),
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            (a * bq * q.powf(jf + 1.0) - 1.0) / (a * c * (1.0 - b) * q.powf(jf / 2.0 + 1.0)) * h1
        }
    })
}

/// `γ_j = c_j / ((1+√q)² h_j h_{j+1})` in product form.
pub fn gamma_closed(fam: &WeightFamily, j: usize, ctx: &QContext) -> Result<f64> {
    fam.validate(ctx)?;
    let z = Q::new(ctx);
    let (q, b, jf) = (z.q, z.b, j as f64);
    let oq2 = (1.0 - q) * (1.0 - q);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha: a, beta: be } => {
            q.powf(-(jf * jf + a * jf + jf) / 2.0) * z.bb(2.0 * jf + a + be + 2.0)? * z.bb(2.0 * jf + a + be)?
                / (oq2 * z.bb(jf + a + be)? * z.bb(jf + a)? * z.bb(jf + be)? * z.bb(jf)?)
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (-alpha).powf(-jf) * q.powf(-jf * (jf + 1.0) / 4.0)
                / (oq2 * z.bb(jf)? * z.pi(b)? * z.pi(alpha)? * z.pi(b / alpha)?)
        }
        WeightFamily::QLaguerre { alpha } => {
            let t = b.powf(alpha + 1.0);
            2.0 * q.powf(jf * jf + alpha * jf + jf + (alpha + 1.0) / 2.0) * z.pi(t)? * z.pi(-b)?.powi(2)
                / (oq2 * z.p(t, jf)? * z.bb(jf)? * z.pi(b)? * z.pi(-t)? * z.pi(-b.powf(-alpha))?)
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            let ab = a * bq;
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            let mut num = sign * q.powf(-jf * jf / 4.0 - 5.0 * jf / 4.0 - 1.5);
            for zz in [a * b, bq * b, c * b, ab * b / c] {
                num *= z.pi(zz)?;
            }
            num *= z.p(ab * b, 2.0 * jf + 2.0)? * z.p(ab * q.powf((jf + 1.0) / 2.0), jf)?;
            let mut den = a.powf(jf + 2.0) * c.powi(j as i32 + 1) * oq2;
            for zz in [b, c / a, a * b / c, ab * b] {
                den *= z.pi(zz)?;
            }
            for zz in [b, a * b, bq * b, c * b, ab * b / c] {
                den *= z.p(zz, jf)?;
            }
            num / den
        }
    })
}

/// `a_n = γ_{2n−1}/γ_{2n}`, so that `Q_{2n+1} = p_{2n+1} − a_n p_{2n−1}`.
/// `a_0 = 0`.
pub fn sop_coeff_closed(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    fam.validate(ctx)?;
    if n == 0 {
        return Ok(0.0);
    }
    let (q, b, nf) = (ctx.q, ctx.base(), n as f64);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha: a, beta: be } => {
            let num = q.powf((4.0 * nf + a) / 2.0)
                * (1.0 - q.powf(nf + (a + be) / 2.0))
                * (1.0 - q.powf(nf + a / 2.0))
                * (1.0 - q.powf(nf + be / 2.0))
                * (1.0 - q.powf(nf));
            let den = (1.0 - q.powf(2.0 * nf + (a + be + 2.0) / 2.0))
                * (1.0 - q.powf(2.0 * nf + (a + be + 1.0) / 2.0))
                * (1.0 - q.powf(2.0 * nf + (a + be) / 2.0))
                * (1.0 - q.powf(2.0 * nf + (a + be - 1.0) / 2.0));
            num / den
        }
        WeightFamily::AlSalamCarlitz { alpha } => -alpha * q.powf(nf) * (1.0 - q.powf(nf)),
        WeightFamily::QLaguerre { alpha } => {
            q.powf(-4.0 * nf - alpha) * (1.0 - q.powf(nf)) * (1.0 - q.powf(nf + alpha / 2.0))
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            let ab = a * bq;
            let qn = q.powf(nf);
            let mut num = -a * c * q.powf(nf + 1.0) * (1.0 - ab * qn);
            for zz in [1.0, a, bq, c, ab / c] {
                num *= 1.0 - zz * qn;
            }
            let mut den = 1.0;
            for i in 0..4 {
                den *= 1.0 - ab * q.powf(2.0 * nf - 0.5) * b.powi(i);
            }
            num / den
        }
    })
}

/// Explicit product for the even partition function `τ_{2n}`.
pub fn partition_explicit(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    fam.validate(ctx)?;
    let z = Q::new(ctx);
    let (q, b, nf) = (z.q, z.b, n as f64);
    let oq = (1.0 - q).powi(2 * n as i32);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha: a, beta: be } => {
            let mut v = q.powf(nf * (nf - 1.0) * (4.0 * nf + 3.0 * a + 1.0) / 6.0) * oq;
            for i in 0..n {
                let i2 = 2.0 * i as f64;
                v *= z.bb(i2 + a + be)? * z.bb(i2 + a)? * z.bb(i2 + be)? * z.bb(i2)?
                    / (z.bb(2.0 * i2 + a + be + 2.0)? * z.bb(2.0 * i2 + a + be)?);
            }
            v
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            let base = z.pi(b)? * z.pi(alpha)? * z.pi(b / alpha)?;
            let mut v = (-alpha).powf(nf * (nf - 1.0))
                * q.powf(nf * (nf - 1.0) * (4.0 * nf + 1.0) / 12.0)
                * oq
                * base.powi(n as i32);
            for i in 0..n {
                v *= z.bb(2.0 * i as f64)?;
            }
            v
        }
        WeightFamily::QLaguerre { alpha } => {
            let t = b.powf(alpha + 1.0);
            let ratio = z.pi(b)? * z.pi(-t)? * z.pi(-b.powf(-alpha))? / (z.pi(t)? * z.pi(-b)?.powi(2));
            let mut v = 0.5f64.powi(n as i32)
                * oq
                * q.powf(-nf * (nf - 1.0) * (4.0 * nf + 1.0 + 3.0 * alpha) / 3.0 - (alpha + 1.0) * nf / 2.0)
                * ratio.powi(n as i32);
            for i in 0..n {
                let i2 = 2.0 * i as f64;
                v *= z.p(t, i2)? * z.bb(i2)?;
            }
            v
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            let ab = a * bq;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let top = z.pi(b)? * z.pi(c / a)? * z.pi(a * b / c)? * z.pi(ab * b)?;
            let bottom = z.pi(a * b)? * z.pi(bq * b)? * z.pi(c * b)? * z.pi(ab * b / c)?;
            let mut v = sign
                * oq
                * a.powf(nf * nf + nf)
                * c.powi((n * n) as i32)
                * q.powf(nf * (4.0 * nf + 5.0) * (nf + 1.0) / 12.0)
                * (top / bottom).powi(n as i32);
            for i in 0..n {
                let i2 = 2.0 * i as f64;
                v *= z.bb(i2)? * z.p(a * b, i2)? * z.p(bq * b, i2)? * z.p(c * b, i2)? * z.p(ab * b / c, i2)?
                    / (z.p(ab * b, 2.0 * i2 + 2.0)? * z.p(ab * q.powf(i as f64 + 0.5), i2)?);
            }
            v
        }
    })
}

/// The prefactor of `S_{2n−1}` in the family-explicit `J_{2n}`; equals
/// `ρ(x;√q)/ω(x;q)` on the lattice.
pub fn rho_over_omega_closed(fam: &WeightFamily, pt: &LatticePoint, ctx: &QContext) -> Result<f64> {
    let (q, b) = (ctx.q, ctx.base());
    let x = pt.value(q);
    let lattice_pow = |alpha: f64| pt.endpoint.powf((alpha + 1.0) / 2.0) * q.powf(pt.k as f64 * (alpha + 1.0) / 4.0);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => {
            q.powf((alpha + 1.0) / 8.0) * lattice_pow(alpha) * q_poch_gen(b * x, q, (beta + 1.0) / 2.0, ctx)?
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (-alpha).sqrt() * q_poch_inf(b * x, q, ctx)? * q_poch_inf(b * x / alpha, q, ctx)?
        }
        WeightFamily::QLaguerre { alpha } => {
            q.powf((alpha + 1.0) / 8.0) * lattice_pow(alpha) / q_poch_inf(-b * x, q, ctx)?
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            q_poch_inf(x / a, q, ctx)? * q_poch_inf(x / c, q, ctx)?
                / (q_poch_inf(b * x, q, ctx)? * q_poch_inf(bq * b * x / c, q, ctx)?)
        }
    })
}

/// Coefficient of the rank-one term in the transposed-pairing variant of
/// the family-explicit `J_{2n}`, paired with `p_{2n−2}(y)·s_x p_{2n−1}(x)`.
/// The variant is kept only to show that it differs from `J`.
pub fn j_display_coeff(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("rank-one display needs n >= 1".into()));
    }
    let z = Q::new(ctx);
    let (q, b, nf) = (z.q, z.b, n as f64);
    let oq2 = (1.0 - q) * (1.0 - q);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha: a, beta: be } => {
            let v = q.powf(-2.0 * nf * nf + 3.0 * nf - 1.0 - a * (nf - 1.0))
                * z.p(q.powf((a + be - 1.0) / 2.0 + nf), nf)?
                * z.bb(4.0 * nf - 4.0 + a + be)?
                / (oq2 * z.bb(2.0 * nf - 2.0 + a)? * z.bb(2.0 * nf - 2.0 + be)? * z.bb(2.0 * nf - 2.0)?);
            -v
        }
        WeightFamily::AlSalamCarlitz { alpha } => {
            (-alpha).powf(2.0 - 2.0 * nf) * q.powf((-2.0 * nf * nf + 3.0 * nf - 1.0) / 2.0)
                / (oq2 * z.bb(2.0 * nf - 2.0)? * z.pi(b)? * z.pi(alpha)? * z.pi(b / alpha)?)
        }
        WeightFamily::QLaguerre { alpha } => {
            let t = q.powf((alpha + 1.0) / 2.0);
            2.0 * q.powf(4.0 * nf * nf + 2.0 * (alpha - 4.0) * nf + (9.0 - 3.0 * alpha) / 2.0)
                * z.pi(t)?
                * z.pi(-b)?.powi(2)
                / (oq2
                    * z.p(t, 2.0 * nf - 2.0)?
                    * z.bb(2.0 * nf - 2.0)?
                    * z.pi(b)?
                    * z.pi(-t)?
                    * z.pi(-q.powf(-alpha / 2.0))?)
        }
        WeightFamily::BigQJacobi { a, b: bq, c } => {
            let ab = a * bq;
            let mut num = q.powf(-nf * nf - nf / 2.0 + 3.0);
            for zz in [a * b, bq * b, c * b, ab * b / c] {
                num *= z.pi(zz)?;
            }
            num *= z.p(ab * b, 4.0 * nf - 2.0)? * z.p(ab * q.powf((2.0 * nf - 1.0) / 2.0), 2.0 * nf - 2.0)?;
            let mut den = a.powf(2.0 * nf) * c.powi(2 * n as i32 - 1) * oq2;
            for zz in [b, c / a, a * b / c, ab * b] {
                den *= z.pi(zz)?;
            }
            for zz in [b, a * b, bq * b, c * b, ab * b / c] {
                den *= z.p(zz, 2.0 * nf - 2.0)?;
            }
            num / den
        }
    })
}

/// Right side of the `q`-Selberg evaluation with exponents `α, β, γ` and
/// `p` integration variables.
pub fn aomoto_selberg(alpha: f64, beta: f64, gamma: f64, p: usize, ctx: &QContext) -> Result<f64> {
    let pf = p as f64;
    let c2 = pf * (pf - 1.0) / 2.0;
    let c3 = pf * (pf - 1.0) * (pf - 2.0) / 6.0;
    let mut v = ctx.q.powf(alpha * gamma * c2 + 2.0 * gamma * gamma * c3);
    for j in 1..=p {
        let jf = j as f64;
        v *= q_gamma(alpha + (jf - 1.0) * gamma, ctx)?
            * q_gamma(beta + (jf - 1.0) * gamma, ctx)?
            * q_gamma(jf * gamma, ctx)?
            / (q_gamma(alpha + beta + (pf + jf - 2.0) * gamma, ctx)? * q_gamma(gamma, ctx)?);
    }
    Ok(v)
}
