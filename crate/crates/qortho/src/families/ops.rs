//! Orthogonal polynomials on a lattice table and the operators
//! `A_q`, `ε_q`, `B_q`, together with the inner products they relate.

use super::{pearson_pair, Lattice, PearsonPair, WeightFamily};
use crate::error::{check_routes, Error, Result};
use crate::poly::PolySeries;
use crate::qcore::{q_bracket, LatticePoint, QContext};

/// Degree cap for the Gram–Schmidt construction at double precision.
pub const MAX_DEGREE: usize = 12;

/// A weight family materialised on its truncated lattice, with the monic
/// OPs `p_0..p_M` and their norms.
#[derive(Debug, Clone)]
pub struct Ensemble {
    fam: WeightFamily,
    ctx: QContext,
    lattice: Lattice,
    pearson: PearsonPair,
    ops: Vec<PolySeries>,
    norms: Vec<f64>,
    op_vals: Vec<Vec<f64>>,
}

impl Ensemble {
    pub fn new(fam: WeightFamily, ctx: QContext, max_degree: usize) -> Result<Self> {
        if max_degree > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!("degree {max_degree} exceeds the cap {MAX_DEGREE}")));
        }
        let lattice = Lattice::build(&fam, &ctx)?;
        let pearson = pearson_pair(&fam, &ctx);
        let mut ens = Ensemble { fam, ctx, lattice, pearson, ops: vec![], norms: vec![], op_vals: vec![] };
        ens.build_ops(max_degree)?;
        Ok(ens)
    }

    /// Table and operators only, no OPs.
    fn bare(fam: WeightFamily, ctx: QContext, lattice: Lattice) -> Self {
        let pearson = pearson_pair(&fam, &ctx);
        Ensemble { fam, ctx, lattice, pearson, ops: vec![], norms: vec![], op_vals: vec![] }
    }

    /// Stieltjes-type Gram–Schmidt carried out on node values: `x·p_{n−1}`
    /// orthogonalised twice against all earlier `p_j`. Coefficients follow
    /// the same linear steps but are never used to produce values, since
    /// Horner evaluation of high-degree OPs cancels catastrophically.
    fn build_ops(&mut self, max_degree: usize) -> Result<()> {
        let p0 = PolySeries::one();
        let v0 = self.values(&p0);
        let h0 = self.ip2_vals(&v0, &v0);
        self.ops.push(p0);
        self.op_vals.push(v0);
        self.norms.push(h0);
        let xs: Vec<f64> = self.lattice.nodes().iter().map(|n| n.x).collect();
        for n in 1..=max_degree {
            let mut p = self.ops[n - 1].shift();
            let mut v: Vec<f64> = self.op_vals[n - 1].iter().zip(&xs).map(|(a, x)| a * x).collect();
            let scale = self.ip2_vals(&v, &v);
            for _pass in 0..2 {
                for j in 0..n {
                    let c = self.ip2_vals(&v, &self.op_vals[j]) / self.norms[j];
                    p = p.axpy(-c, &self.ops[j]);
                    for (a, b) in v.iter_mut().zip(&self.op_vals[j]) {
                        *a -= c * b;
                    }
                }
            }
            let p = p.into_monic();
            let h = self.ip2_vals(&v, &v);
            if !(h > 1e3 * f64::EPSILON * scale) {
                return Err(Error::IllConditioned { degree: n, pivot: h, scale });
            }
            self.ops.push(p);
            self.op_vals.push(v);
            self.norms.push(h);
        }
        Ok(())
    }

    pub fn family(&self) -> &WeightFamily {
        &self.fam
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn pearson(&self) -> &PearsonPair {
        &self.pearson
    }

    pub fn max_degree(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn op(&self, n: usize) -> &PolySeries {
        &self.ops[n]
    }

    pub fn op_values(&self, n: usize) -> &[f64] {
        &self.op_vals[n]
    }

    pub fn norm(&self, n: usize) -> f64 {
        self.norms[n]
    }

    pub fn base(&self) -> f64 {
        self.ctx.base()
    }

    /// Polynomial values at every table node.
    pub fn values(&self, p: &PolySeries) -> Vec<f64> {
        self.lattice.nodes().iter().map(|n| p.eval(n.x)).collect()
    }

    /// `⟨φ,ψ⟩₂ = Σ (1−√q)|x| ρ φ ψ` over the table.
    pub fn ip2_vals(&self, a: &[f64], b: &[f64]) -> f64 {
        self.lattice.nodes().iter().zip(a.iter().zip(b)).map(|(n, (x, y))| n.jw * n.rho * x * y).sum()
    }

    pub fn ip2(&self, p: &PolySeries, q: &PolySeries) -> f64 {
        self.ip2_vals(&self.values(p), &self.values(q))
    }

    /// `A_q` in coefficient space: `xⁿ ↦ g·√qⁿ xⁿ + f·[n](√q⁻ⁿ+1) xⁿ⁻¹`.
    pub fn apply_a(&self, p: &PolySeries) -> PolySeries {
        apply_a_q(&self.fam, p, &self.ctx)
    }

    /// `⟨φ,ψ⟩₄ = ∫(φ D ψ − ψ D φ) ω̃ d_{√q}x` with `D` the `√q`-difference.
    pub fn ip4(&self, p: &PolySeries, q: &PolySeries) -> f64 {
        let s = self.base();
        let (dp, dq) = (derivative(p, s), derivative(q, s));
        self.lattice
            .nodes()
            .iter()
            .map(|n| n.jw * n.wt * (p.eval(n.x) * dq.eval(n.x) - q.eval(n.x) * dp.eval(n.x)))
            .sum()
    }

    /// `ε_q ψ`, the inverse of `R_q φ(x) = ω̃(x/√q)φ(x/√q) − ω̃(x)φ(√q x)`,
    /// branch by branch: half points forward from the shallow end, integer
    /// points backward from the deep end.
    pub fn epsilon_vals(&self, psi: &[f64]) -> Vec<f64> {
        let nodes = self.lattice.nodes();
        let mut g = vec![0.0; nodes.len()];
        for &(s, e) in self.lattice.ranges() {
            let mut prev: Option<usize> = None;
            for i in s..e {
                if !nodes[i].is_integer() || i + 1 >= e {
                    continue;
                }
                let lo = match prev {
                    Some(j) if j + 1 == i => nodes[j].wt * g[j],
                    _ => 0.0,
                };
                g[i + 1] = (lo - psi[i]) / nodes[i].wt;
                prev = Some(i + 1);
            }
            let top = (s..e).rev().find(|&i| nodes[i].is_integer());
            if let Some(top) = top {
                g[top] = 0.0;
                let mut i = top;
                while i >= s + 2 {
                    let j = i - 2;
                    g[j] = (psi[j + 1] + nodes[j + 1].wt * g[i]) / nodes[j].wt;
                    i = j;
                }
            }
        }
        g
    }

    /// `R_q φ` at table index `i`; zero contributions outside the table.
    pub fn r_op_at(&self, phi: &[f64], i: usize) -> f64 {
        let nodes = self.lattice.nodes();
        let (s, e) = self.lattice.ranges()[nodes[i].branch];
        let outer = if i > s { nodes[i - 1].wt * phi[i - 1] } else { 0.0 };
        let inner = if i + 1 < e { nodes[i].wt * phi[i + 1] } else { 0.0 };
        outer - inner
    }

    /// `B_q ψ` through `ε_q`: `(1+√q)²(1−√q) ε_q(xρψ)`, plus the cross-branch
    /// homogeneous term on two-sided supports.
    pub fn b_eps_vals(&self, psi: &[f64]) -> Vec<f64> {
        let s = self.base();
        let nodes = self.lattice.nodes();
        let r: Vec<f64> = nodes.iter().zip(psi).map(|(n, p)| n.x * n.rho * p).collect();
        let g = self.epsilon_vals(&r);
        let k2 = (1.0 + s) * (1.0 + s);
        let mut out: Vec<f64> = g.iter().map(|v| k2 * (1.0 - s) * v).collect();
        if self.lattice.ranges().len() == 2 {
            let int_mass = |b: usize| -> f64 {
                let (lo, hi) = self.lattice.ranges()[b];
                (lo..hi).filter(|&i| nodes[i].is_integer()).map(|i| psi[i] * nodes[i].w()).sum()
            };
            let masses = [int_mass(0), int_mass(1)];
            for (i, n) in nodes.iter().enumerate() {
                if n.is_integer() {
                    out[i] += n.omega / n.rho * n.sigma * k2 * masses[1 - n.branch];
                }
            }
        }
        out
    }

    /// `B_q ψ = (ω/ρ) s_x ψ`.
    pub fn b_s_vals(&self, psi: &[f64]) -> Vec<f64> {
        let sx = self.s_x_vals(psi);
        self.lattice.nodes().iter().zip(sx).map(|(n, v)| n.omega / n.rho * v).collect()
    }

    /// `(s_x f)(x) = Σ_z s(z,x) f(z) W(z)` at every node, by prefix sums.
    pub fn s_x_vals(&self, f: &[f64]) -> Vec<f64> {
        let s = self.base();
        let k2 = (1.0 + s) * (1.0 + s);
        let nodes = self.lattice.nodes();
        let mut out = vec![0.0; nodes.len()];
        let mut int_mass = Vec::new();
        for &(lo, hi) in self.lattice.ranges() {
            let mut shallow_int = 0.0;
            for i in lo..hi {
                if nodes[i].is_integer() {
                    shallow_int += f[i] * nodes[i].w();
                } else {
                    out[i] = -nodes[i].sigma * k2 * shallow_int;
                }
            }
            int_mass.push(shallow_int);
            let mut deep_half = 0.0;
            for i in (lo..hi).rev() {
                if nodes[i].is_integer() {
                    out[i] = nodes[i].sigma * k2 * deep_half;
                } else {
                    deep_half += f[i] * nodes[i].w();
                }
            }
        }
        if int_mass.len() == 2 {
            for (i, n) in nodes.iter().enumerate() {
                if n.is_integer() {
                    out[i] += n.sigma * k2 * int_mass[1 - n.branch];
                }
            }
        }
        out
    }

    /// `s_x f` at a single lattice point, which need not be in the table.
    pub fn s_x_at(&self, f: &[f64], pt: &LatticePoint) -> Result<f64> {
        let mut acc = 0.0;
        for (n, v) in self.lattice.nodes().iter().zip(f) {
            let sk = crate::skew::s_kernel(&n.pt, pt, &self.ctx)?;
            if sk != 0.0 {
                acc += sk * v * n.w();
            }
        }
        Ok(acc)
    }

    /// `⟨φ,ψ⟩₁ = Σ_y ψ(y) W(y) (s_y φ)(y)`, the symmetric double sum.
    pub fn ip1_vals(&self, a: &[f64], b: &[f64]) -> f64 {
        let sa = self.s_x_vals(a);
        self.lattice.nodes().iter().enumerate().map(|(i, n)| b[i] * n.w() * sa[i]).sum()
    }

    /// `⟨φ,ψ⟩₁` over the ordered region: half `x` deeper than integer `y`
    /// on each branch, plus integer pairs across the two branches.
    pub fn ip1_nested_vals(&self, a: &[f64], b: &[f64]) -> f64 {
        let s = self.base();
        let k2 = (1.0 + s) * (1.0 + s);
        let nodes = self.lattice.nodes();
        let mut tot = 0.0;
        for &(lo, hi) in self.lattice.ranges() {
            for i in lo..hi {
                if nodes[i].is_integer() {
                    continue;
                }
                let wx = nodes[i].w();
                let mut inner = 0.0;
                for j in lo..i {
                    if nodes[j].is_integer() {
                        inner += nodes[j].w() * (a[i] * b[j] - a[j] * b[i]);
                    }
                }
                tot += nodes[i].sigma * k2 * wx * inner;
            }
        }
        if self.lattice.ranges().len() == 2 {
            let (plo, phi) = self.lattice.ranges()[0];
            let (nlo, nhi) = self.lattice.ranges()[1];
            for i in nlo..nhi {
                if !nodes[i].is_integer() {
                    continue;
                }
                for j in plo..phi {
                    if nodes[j].is_integer() {
                        tot += k2 * nodes[i].w() * nodes[j].w() * (a[i] * b[j] - a[j] * b[i]);
                    }
                }
            }
        }
        tot
    }

    /// `c_j = −⟨p_{j+1}, A_q p_j⟩₂`.
    pub fn c_numeric(&self, j: usize) -> f64 {
        -self.ip2(&self.ops[j + 1], &self.apply_a(&self.ops[j]))
    }

    /// `γ_j = c_j / ((1+√q)² h_j h_{j+1})`.
    pub fn gamma_numeric(&self, j: usize) -> f64 {
        let s = self.base();
        self.c_numeric(j) / ((1.0 + s) * (1.0 + s) * self.norms[j] * self.norms[j + 1])
    }

    /// `F·W` summed against `f`: `∫ F f ω d_{√q}x`.
    pub fn f_moment(&self, f: &[f64]) -> f64 {
        let s = self.base();
        self.lattice.nodes().iter().zip(f).filter(|(n, _)| n.is_integer()).map(|(n, v)| (1.0 + s) * n.w() * v).sum()
    }
}

/// `D_base` on polynomials: `xⁿ ↦ [n]_base xⁿ⁻¹`.
pub fn derivative(p: &PolySeries, base: f64) -> PolySeries {
    if p.deg() == 0 {
        return PolySeries::zero();
    }
    PolySeries::new((1..=p.deg()).map(|n| p.coeff(n) * q_bracket(n as f64, base)).collect())
}

fn ensemble_for(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<Ensemble> {
    Ensemble::new(*fam, *ctx, n)
}

/// Monic OP of degree `n` under `⟨·,·⟩₂`.
pub fn monic_op(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<PolySeries> {
    Ok(ensemble_for(fam, n, ctx)?.op(n).clone())
}

/// Numeric `⟨p_n,p_n⟩₂` checked against the closed form; returns the closed form.
pub fn norm_h(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    let ens = ensemble_for(fam, n, ctx)?;
    let closed = super::norm_h_closed(fam, n, ctx)?;
    check_routes(&format!("h_{n}"), closed, ens.norm(n), 10.0 * ctx.cmp_tol)?;
    Ok(closed)
}

/// `A_q` in coefficient space: `xⁿ ↦ g·√qⁿ xⁿ + f·[n](√q⁻ⁿ+1) xⁿ⁻¹`.
pub fn apply_a_q(fam: &WeightFamily, p: &PolySeries, ctx: &QContext) -> PolySeries {
    let pp = pearson_pair(fam, ctx);
    let s = ctx.base();
    let mut out = PolySeries::zero();
    for (n, &c) in p.coeffs().iter().enumerate() {
        out = &out + &(&pp.g * &PolySeries::monomial(n).scale(c * s.powi(n as i32)));
        if n > 0 {
            let k = c * q_bracket(n as f64, s) * (s.powi(-(n as i32)) + 1.0);
            out = &out + &(&pp.f * &PolySeries::monomial(n - 1).scale(k));
        }
    }
    out
}

/// `ε_q f` at `pt`; `f` is sampled on the family lattice.
pub fn apply_epsilon<F: Fn(&LatticePoint) -> f64>(
    fam: &WeightFamily,
    f: F,
    pt: &LatticePoint,
    ctx: &QContext,
) -> Result<f64> {
    let lat = Lattice::build(fam, ctx)?;
    let i = lat.require(pt)?;
    let ens = Ensemble::bare(*fam, *ctx, lat);
    let vals: Vec<f64> = ens.lattice.nodes().iter().map(|n| f(&n.pt)).collect();
    Ok(ens.epsilon_vals(&vals)[i])
}

/// `B_q f` at `pt` by the `ε_q` route, checked against the `s_x` route.
pub fn apply_b_q<F: Fn(&LatticePoint) -> f64>(
    fam: &WeightFamily,
    f: F,
    pt: &LatticePoint,
    ctx: &QContext,
) -> Result<f64> {
    let lat = Lattice::build(fam, ctx)?;
    let i = lat.require(pt)?;
    let ens = Ensemble::bare(*fam, *ctx, lat);
    let vals: Vec<f64> = ens.lattice.nodes().iter().map(|n| f(&n.pt)).collect();
    let a = ens.b_eps_vals(&vals)[i];
    let b = ens.b_s_vals(&vals)[i];
    if a != 0.0 || b != 0.0 {
        check_routes("B_q", a, b, 10.0 * ctx.cmp_tol)?;
    }
    Ok(a)
}

/// Numeric `c_j` checked against the closed form; returns the closed form.
pub fn c_coeff(fam: &WeightFamily, j: usize, ctx: &QContext) -> Result<f64> {
    let ens = ensemble_for(fam, j + 1, ctx)?;
    let closed = super::c_closed(fam, j, ctx)?;
    check_routes(&format!("c_{j}"), closed, ens.c_numeric(j), 10.0 * ctx.cmp_tol)?;
    Ok(closed)
}

/// Numeric `γ_j` checked against the closed form; returns the closed form.
pub fn gamma_coeff(fam: &WeightFamily, j: usize, ctx: &QContext) -> Result<f64> {
    let ens = ensemble_for(fam, j + 1, ctx)?;
    let closed = super::gamma_closed(fam, j, ctx)?;
    check_routes(&format!("gamma_{j}"), closed, ens.gamma_numeric(j), 10.0 * ctx.cmp_tol)?;
    Ok(closed)
}
