//! Christoffel–Darboux and skew Christoffel–Darboux kernels, the `s_x`
//! operator, rank-one forms, odd-`N` kernels and correlation functions.

use crate::error::{check_scaled, Error, Result};
use crate::families::{gamma_closed, j_display_coeff, rho_over_omega_closed, Ensemble, WeightFamily};
use crate::pfaffian::pfaffian;
use crate::poly::PolySeries;
use crate::qcore::{LatticePoint, QContext};
use crate::quaternion::{qdet, Quaternion};
use crate::skew::{f_function, rho_over_omega_at_origin, s_kernel, sop_closed_on, BOUNDARY_TERM_CUTOFF};

/// The four entries of the 2×2 matrix kernel at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBlock {
    pub k: f64,
    pub j_xy: f64,
    pub j_yx: f64,
    pub i: f64,
}

/// Kernels of the `N`-particle ensemble on the lattice table. For odd
/// `N = 2n+1` the SOPs are replaced by `Q̂_k = Q_k − (β_k/β_{2n}) Q_{2n}`.
#[derive(Debug, Clone)]
pub struct KernelSet {
    ens: Ensemble,
    particles: usize,
    qhat: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    u: Vec<f64>,
    beta: Option<f64>,
    /// `β_{2n−2}` for the odd rank-one form.
    beta_prev: Option<f64>,
    fv: Vec<f64>,
    /// `s_x p_l` on the table, `l ≤ max degree`.
    sxp: Vec<Vec<f64>>,
}

/// Degree of the OP table a kernel set for `N` particles needs.
fn degree_for(particles: usize) -> usize {
    particles.max(1) + (particles + 1) % 2
}

impl KernelSet {
    pub fn new(fam: &WeightFamily, particles: usize, ctx: &QContext) -> Result<Self> {
        let ens = Ensemble::new(*fam, *ctx, degree_for(particles))?;
        Self::from_ensemble(ens, particles)
    }

    pub fn from_ensemble(ens: Ensemble, particles: usize) -> Result<Self> {
        if degree_for(particles) > ens.max_degree() {
            return Err(Error::InvalidParameter(format!(
                "ensemble degree {} too small for N = {particles}",
                ens.max_degree()
            )));
        }
        let n = particles / 2;
        let odd = particles % 2 == 1;
        let sops = sop_closed_on(&ens, 2 * n + 2)?;
        let mut qv = sops.values(&ens);
        let fv: Vec<f64> = ens.lattice().nodes().iter().map(|nd| f_function(&nd.pt, ens.ctx())).collect();
        let (mut beta, mut beta_prev) = (None, None);
        if odd {
            qv.truncate(2 * n + 1);
            let betas: Vec<f64> = qv.iter().map(|v| ens.f_moment(v)).collect();
            let b = betas[2 * n];
            let scale = ens.f_moment(&qv[2 * n].iter().map(|v| v.abs()).collect::<Vec<_>>());
            if !(b.abs() > 1e-13 * scale) {
                return Err(Error::VanishingBeta { index: 2 * n, value: b });
            }
            let top = qv[2 * n].clone();
            for k in 0..2 * n {
                let c = betas[k] / b;
                for (v, t) in qv[k].iter_mut().zip(&top) {
                    *v -= c * t;
                }
            }
            beta = Some(b);
            beta_prev = (n > 0).then(|| betas[2 * n - 2]);
        } else {
            qv.truncate(2 * n);
        }
        let phi = qv.iter().map(|v| ens.s_x_vals(v)).collect();
        let sxp = (0..=ens.max_degree()).map(|l| ens.s_x_vals(ens.op_values(l))).collect();
        Ok(KernelSet { particles, qhat: qv, phi, u: sops.u[..n].to_vec(), beta, beta_prev, fv, sxp, ens })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ens
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn index(&self, pt: &LatticePoint) -> Result<usize> {
        self.ens.lattice().require(pt)
    }

    pub fn k_at(&self, a: usize, b: usize) -> f64 {
        let q = &self.qhat;
        self.u
            .iter()
            .enumerate()
            .map(|(m, u)| (q[2 * m][a] * q[2 * m + 1][b] - q[2 * m + 1][a] * q[2 * m][b]) / u)
            .sum()
    }

    pub fn j_at(&self, a: usize, b: usize) -> f64 {
        let (q, p) = (&self.qhat, &self.phi);
        let mut v: f64 = self
            .u
            .iter()
            .enumerate()
            .map(|(m, u)| (p[2 * m][a] * q[2 * m + 1][b] - p[2 * m + 1][a] * q[2 * m][b]) / u)
            .sum();
        if let Some(beta) = self.beta {
            v += self.fv[a] * q[self.particles - 1][b] / beta;
        }
        v
    }

    pub fn i_at(&self, a: usize, b: usize) -> Result<f64> {
        let p = &self.phi;
        let nodes = self.ens.lattice().nodes();
        let mut v: f64 = self
            .u
            .iter()
            .enumerate()
            .map(|(m, u)| (p[2 * m + 1][a] * p[2 * m][b] - p[2 * m][a] * p[2 * m + 1][b]) / u)
            .sum();
        v += s_kernel(&nodes[a].pt, &nodes[b].pt, self.ens.ctx())?;
        if let Some(beta) = self.beta {
            let top = self.particles - 1;
            v += (p[top][a] * self.fv[b] - self.fv[a] * p[top][b]) / beta;
        }
        Ok(v)
    }

    pub fn block(&self, x: &LatticePoint, y: &LatticePoint) -> Result<KernelBlock> {
        let (a, b) = (self.index(x)?, self.index(y)?);
        Ok(KernelBlock { k: self.k_at(a, b), j_xy: self.j_at(a, b), j_yx: self.j_at(b, a), i: self.i_at(a, b)? })
    }

    /// `ρ_{N,k} = ∏ ω(z_l) · Pf[[K, J(y,x)], [−J(x,y), −I]]` over the points.
    pub fn correlation(&self, points: &[LatticePoint]) -> Result<f64> {
        let idx: Vec<usize> = points.iter().map(|p| self.index(p)).collect::<Result<_>>()?;
        let k = idx.len();
        let mut a = vec![vec![0.0; 2 * k]; 2 * k];
        for (r, &x) in idx.iter().enumerate() {
            for (c, &y) in idx.iter().enumerate() {
                a[2 * r][2 * c] = self.k_at(x, y);
                a[2 * r][2 * c + 1] = self.j_at(y, x);
                a[2 * r + 1][2 * c] = -self.j_at(x, y);
                a[2 * r + 1][2 * c + 1] = -self.i_at(x, y)?;
            }
        }
        let om: f64 = idx.iter().map(|&i| self.ens.lattice().nodes()[i].omega).product();
        Ok(om * pfaffian(&a)?)
    }

    /// `f(x,y) = [[J(x,y)ω(y), I(x,y)], [K(x,y)ω(x)ω(y), J(y,x)ω(x)]]`.
    pub fn f_block(&self, a: usize, b: usize) -> Result<[[f64; 2]; 2]> {
        let nodes = self.ens.lattice().nodes();
        let (wa, wb) = (nodes[a].omega, nodes[b].omega);
        Ok([[self.j_at(a, b) * wb, self.i_at(a, b)?], [self.k_at(a, b) * wa * wb, self.j_at(b, a) * wa]])
    }

    /// `ρ_{N,k} = qdet[f(z_i, z_j)]`.
    pub fn correlation_qdet(&self, points: &[LatticePoint]) -> Result<f64> {
        let idx: Vec<usize> = points.iter().map(|p| self.index(p)).collect::<Result<_>>()?;
        let mut m = Vec::with_capacity(idx.len());
        for &x in &idx {
            let mut row = Vec::with_capacity(idx.len());
            for &y in &idx {
                let [[u, v], [w, z]] = self.f_block(x, y)?;
                row.push(Quaternion::from_real_block(u, v, w, z));
            }
            m.push(row);
        }
        Ok(qdet(&m)?.re)
    }

    /// `(ρ/ω)(x) S_{2n−1}(x,y) + γ_{2n−2} (s_x p_{2n−2})(x) p_{2n−1}(y)` for
    /// even `N = 2n`, with `ρ/ω` from the table and `γ` in closed form.
    pub fn j_rank_one_at(&self, a: usize, b: usize) -> Result<f64> {
        self.rank_one_core(a, b, false)
    }

    /// The same with the closed-form `ρ/ω` prefactor of the family.
    pub fn j_family_explicit_at(&self, a: usize, b: usize) -> Result<f64> {
        self.rank_one_core(a, b, true)
    }

    fn even_n(&self) -> Result<usize> {
        let n = self.particles / 2;
        if n == 0 {
            return Err(Error::InvalidParameter("rank-one form needs at least two particles".into()));
        }
        Ok(n)
    }

    fn rank_one_core(&self, a: usize, b: usize, explicit: bool) -> Result<f64> {
        let n = self.even_n()?;
        let (ens, ctx) = (&self.ens, self.ens.ctx());
        let node = &ens.lattice().nodes()[a];
        let pref = if explicit { rho_over_omega_closed(ens.family(), &node.pt, ctx)? } else { node.rho / node.omega };
        let s: f64 = (0..=2 * n - 2).map(|l| ens.op_values(l)[a] * ens.op_values(l)[b] / ens.norm(l)).sum();
        let g = gamma_closed(ens.family(), 2 * n - 2, ctx)?;
        Ok(pref * s + g * self.sxp[2 * n - 2][a] * ens.op_values(2 * n - 1)[b])
    }

    /// A variant of the rank-one form with the transposed pairing
    /// `p_{2n−2}(y) s_x p_{2n−1}(x)` and the coefficient of
    /// [`j_display_coeff`]; it does not equal `J`.
    pub fn j_display_literal_at(&self, a: usize, b: usize) -> Result<f64> {
        let n = self.even_n()?;
        let (ens, ctx) = (&self.ens, self.ens.ctx());
        let node = &ens.lattice().nodes()[a];
        let pref = rho_over_omega_closed(ens.family(), &node.pt, ctx)?;
        let s: f64 = (0..=2 * n - 2).map(|l| ens.op_values(l)[a] * ens.op_values(l)[b] / ens.norm(l)).sum();
        let c = j_display_coeff(ens.family(), n, ctx)?;
        Ok(pref * s + c * ens.op_values(2 * n - 2)[b] * self.sxp[2 * n - 1][a])
    }

    /// Magnitude against which the rank-one identity is measured at `(a,b)`.
    pub fn rank_one_scale(&self, a: usize, b: usize) -> Result<f64> {
        let n = self.even_n()?;
        let ens = &self.ens;
        let node = &ens.lattice().nodes()[a];
        let s: f64 = (0..=2 * n - 2).map(|l| (ens.op_values(l)[a] * ens.op_values(l)[b] / ens.norm(l)).abs()).sum();
        let g = gamma_closed(ens.family(), 2 * n - 2, ens.ctx())?;
        Ok((node.rho / node.omega).abs() * s + (g * self.sxp[2 * n - 2][a] * ens.op_values(2 * n - 1)[b]).abs())
    }

    /// Rank-one-plus-correction form of `J^odd_{2n+1}`.
    pub fn j_odd_rank_one_at(&self, a: usize, b: usize) -> Result<f64> {
        let beta = self.beta.ok_or_else(|| Error::InvalidParameter("odd form needs an odd particle count".into()))?;
        let n = self.particles / 2;
        let ens = &self.ens;
        let p = |l: usize| ens.op_values(l)[b];
        let mut v = self.fv[a] * p(2 * n) / beta;
        if n > 0 {
            let even = KernelSet { particles: 2 * n, beta: None, ..self.clone_light() };
            v += even.rank_one_core(a, b, false)?;
            let bp = self.beta_prev.unwrap_or(0.0);
            v -= bp / (self.u[n - 1] * beta) * (self.sxp[2 * n][a] * p(2 * n - 1) - self.sxp[2 * n - 1][a] * p(2 * n));
        }
        Ok(v)
    }

    /// Sum of the magnitudes of the terms of the odd rank-one form at `(a,b)`.
    pub fn odd_rank_one_scale(&self, a: usize, b: usize) -> Result<f64> {
        let beta = self.beta.ok_or_else(|| Error::InvalidParameter("odd form needs an odd particle count".into()))?;
        let n = self.particles / 2;
        let p = |l: usize| self.ens.op_values(l)[b];
        let mut v = (self.fv[a] * p(2 * n) / beta).abs() + self.j_at(a, b).abs();
        if n > 0 {
            let even = KernelSet { particles: 2 * n, beta: None, ..self.clone_light() };
            v += even.rank_one_scale(a, b)?;
            let c = (self.beta_prev.unwrap_or(0.0) / (self.u[n - 1] * beta)).abs();
            v += c * ((self.sxp[2 * n][a] * p(2 * n - 1)).abs() + (self.sxp[2 * n - 1][a] * p(2 * n)).abs());
        }
        Ok(v)
    }

    fn clone_light(&self) -> KernelSet {
        KernelSet {
            ens: self.ens.clone(),
            particles: self.particles,
            qhat: vec![],
            phi: vec![],
            u: self.u.clone(),
            beta: self.beta,
            beta_prev: self.beta_prev,
            fv: vec![],
            sxp: self.sxp.clone(),
        }
    }

    /// Whether `ρ(x;√q)/ω(x;q) → 0` at the origin, the hypothesis of the odd
    /// rank-one form and of the even-`β` product.
    pub fn boundary_term_vanishes(&self) -> bool {
        rho_over_omega_at_origin(&self.ens) < BOUNDARY_TERM_CUTOFF
    }

    /// Table indices of up to `count` points spread over the bulk of the
    /// weight, alternating parity.
    pub fn bulk_indices(&self, count: usize) -> Vec<usize> {
        bulk_indices(&self.ens, count)
    }
}

/// Up to `count` table indices where `|W|` is within `1e−6` of its peak,
/// evenly spread.
pub fn bulk_indices(ens: &Ensemble, count: usize) -> Vec<usize> {
    let nodes = ens.lattice().nodes();
    let peak = nodes.iter().map(|n| n.w().abs()).fold(0.0, f64::max);
    let bulk: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].w().abs() > 1e-6 * peak).collect();
    if bulk.len() <= count {
        return bulk;
    }
    (0..count).map(|t| bulk[t * (bulk.len() - 1) / (count.max(2) - 1)]).collect()
}

/// `S_m(x,y) = Σ_{l<m} p_l(x) p_l(y) / h_l`.
pub fn cd_kernel(fam: &WeightFamily, terms: usize, x: f64, y: f64, ctx: &QContext) -> Result<f64> {
    let ens = Ensemble::new(*fam, *ctx, terms.saturating_sub(1))?;
    Ok(cd_kernel_on(&ens, terms, x, y))
}

pub fn cd_kernel_on(ens: &Ensemble, terms: usize, x: f64, y: f64) -> f64 {
    (0..terms).map(|l| ens.op(l).eval(x) * ens.op(l).eval(y) / ens.norm(l)).sum()
}

/// `K_{2n}(x,y)` at two lattice points.
pub fn skew_k(fam: &WeightFamily, two_n: usize, x: &LatticePoint, y: &LatticePoint, ctx: &QContext) -> Result<f64> {
    Ok(KernelSet::new(fam, even(two_n)?, ctx)?.block(x, y)?.k)
}

/// `(s_x f)(x) = ∫ s(z,x) f(z) ω(z) d_{√q}z`.
pub fn s_x_apply<F: Fn(f64) -> f64>(fam: &WeightFamily, f: F, x: &LatticePoint, ctx: &QContext) -> Result<f64> {
    let ens = Ensemble::new(*fam, *ctx, 0)?;
    let vals: Vec<f64> = ens.lattice().nodes().iter().map(|n| f(n.x)).collect();
    ens.s_x_at(&vals, x)
}

fn even(two_n: usize) -> Result<usize> {
    if two_n % 2 == 1 || two_n == 0 {
        return Err(Error::InvalidParameter(format!("even kernel needs an even positive particle count, got {two_n}")));
    }
    Ok(two_n)
}

/// `J_{2n}(x,y)` by the rank-one form, checked against the definition `s_x K_{2n}`.
pub fn skew_j_even(
    fam: &WeightFamily,
    two_n: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    ctx: &QContext,
) -> Result<f64> {
    let ks = KernelSet::new(fam, even(two_n)?, ctx)?;
    let (a, b) = (ks.index(x)?, ks.index(y)?);
    let def = ks.j_at(a, b);
    let r1 = ks.j_rank_one_at(a, b)?;
    check_scaled("J_2n: definition vs rank-one", def, r1, ks.rank_one_scale(a, b)?, 10.0 * ctx.cmp_tol)?;
    Ok(r1)
}

/// `I_{2n}(x,y) = s(x,y) − s_x s_y K_{2n}(x,y)`; `n = 0` gives `s(x,y)`.
pub fn skew_i_even(
    fam: &WeightFamily,
    two_n: usize,
    x: &LatticePoint,
    y: &LatticePoint,
    ctx: &QContext,
) -> Result<f64> {
    if two_n == 0 {
        return s_kernel(x, y, ctx);
    }
    KernelSet::new(fam, even(two_n)?, ctx)?.block(x, y).map(|b| b.i)
}

/// Kernels for `N = 2n+1`, with the definition of `J^odd` checked against
/// the rank-one form at bulk pairs.
pub fn odd_kernel_set(fam: &WeightFamily, n_odd: usize, ctx: &QContext) -> Result<KernelSet> {
    if n_odd % 2 == 0 {
        return Err(Error::InvalidParameter(format!("odd kernel needs an odd particle count, got {n_odd}")));
    }
    let ks = KernelSet::new(fam, n_odd, ctx)?;
    let idx = ks.bulk_indices(4);
    for &a in &idx {
        for &b in &idx {
            let (d, r) = (ks.j_at(a, b), ks.j_odd_rank_one_at(a, b)?);
            check_scaled("J_odd: definition vs rank-one", d, r, ks.odd_rank_one_scale(a, b)?, 10.0 * ctx.cmp_tol)?;
        }
    }
    Ok(ks)
}

/// `k`-point correlation of the `N`-particle ensemble.
pub fn correlation_rho(fam: &WeightFamily, particles: usize, points: &[LatticePoint], ctx: &QContext) -> Result<f64> {
    if points.len() > particles {
        return Err(Error::InvalidParameter(format!("k = {} exceeds N = {particles}", points.len())));
    }
    if points.is_empty() {
        return Ok(1.0);
    }
    KernelSet::new(fam, particles, ctx)?.correlation(points)
}

/// Residuals of the integral identities of `f`: the semigroup identity
/// at sampled pairs and the trace identity.
#[derive(Debug, Clone, PartialEq)]
pub struct FoddReport {
    pub particles: usize,
    pub trace: [[f64; 2]; 2],
    pub trace_residual: f64,
    pub semigroup_residual: f64,
    pub pairs_checked: usize,
}

impl FoddReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.trace_residual < tol && self.semigroup_residual < tol
    }
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `∫ f(x,y) f(y,z) d_{√q}y = E₂₂ f(x,z) + f(x,z) E₁₁` and `∫ f(x,x) d_{√q}x = N·𝟏`.
pub fn fodd_identities_check(ks: &KernelSet, samples: usize) -> Result<FoddReport> {
    let nodes = ks.ens.lattice().nodes();
    let mut trace = [[0.0; 2]; 2];
    for (i, n) in nodes.iter().enumerate() {
        let f = ks.f_block(i, i)?;
        for r in 0..2 {
            for c in 0..2 {
                trace[r][c] += n.jw * f[r][c];
            }
        }
    }
    let np = ks.particles as f64;
    let trace_residual = [(trace[0][0] - np).abs(), trace[0][1].abs(), trace[1][0].abs(), (trace[1][1] - np).abs()]
        .into_iter()
        .fold(0.0, f64::max)
        / np.max(1.0);

    // residuals are measured against the largest entry over all sampled
    // pairs, since f at deep points is a cancellation of O(1) terms
    let idx = ks.bulk_indices(samples);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = f64::MIN_POSITIVE;
    let mut pairs = 0;
    for &x in &idx {
        for &z in &idx {
            let mut lhs = [[0.0; 2]; 2];
            for (y, n) in nodes.iter().enumerate() {
                let p = mat_mul(&ks.f_block(x, y)?, &ks.f_block(y, z)?);
                for r in 0..2 {
                    for c in 0..2 {
                        lhs[r][c] += n.jw * p[r][c];
                        scale = scale.max((n.jw * p[r][c]).abs());
                    }
                }
            }
            let f = ks.f_block(x, z)?;
            // E₂₂ f keeps the second row, f E₁₁ keeps the first column
            let rhs = [[f[0][0], 0.0], [2.0 * f[1][0], f[1][1]]];
            for r in 0..2 {
                for c in 0..2 {
                    scale = scale.max(f[r][c].abs());
                    worst = worst.max((lhs[r][c] - rhs[r][c]).abs());
                }
            }
            pairs += 1;
        }
    }
    let worst = worst / scale;
    Ok(FoddReport { particles: ks.particles, trace, trace_residual, semigroup_residual: worst, pairs_checked: pairs })
}

/// `∫∫ K(x,y) s(y,w) K(w,z) ω(y) ω(w) d_{√q}y d_{√q}w` and the sum of the
/// magnitudes of its terms. With `⟨Q_{2i}, Q_{2i+1}⟩₁ = u_i` this equals
/// `−K(x,z)`; reproduction holds with the transposed kernel `s(w,y)`.
pub fn k_s_k_integral(ks: &KernelSet, x: usize, z: usize) -> (f64, f64) {
    let ens = &ks.ens;
    let nodes = ens.lattice().nodes();
    let row: Vec<f64> = (0..nodes.len()).map(|y| ks.k_at(x, y)).collect();
    let s = ens.s_x_vals(&row);
    let (mut tot, mut mag) = (0.0, 0.0);
    for (w, n) in nodes.iter().enumerate() {
        let t = ks.k_at(w, z) * n.w() * s[w];
        tot += t;
        mag += t.abs();
    }
    (tot, mag)
}

/// Residual of `∫∫ K(x,y) s(w,y) K(w,z) ω(y) ω(w) = K(x,z)` at sampled
/// pairs, relative to the largest term magnitude over the pairs.
pub fn k_reproducing_residual(ks: &KernelSet, samples: usize) -> f64 {
    let idx = ks.bulk_indices(samples);
    let (mut worst, mut scale) = (0.0f64, f64::MIN_POSITIVE);
    for &x in &idx {
        for &z in &idx {
            let (v, mag) = k_s_k_integral(ks, x, z);
            let target = ks.k_at(x, z);
            worst = worst.max((-v - target).abs());
            scale = scale.max(mag).max(target.abs());
        }
    }
    worst / scale
}

/// Residual of `⟨S_m(x,·), p_k⟩₂ = p_k(x)` over `k < m` at a table node.
pub fn cd_reproducing_residual(ens: &Ensemble, terms: usize, x: usize) -> f64 {
    let nodes = ens.lattice().nodes();
    let xv = nodes[x].x;
    let sv: Vec<f64> = nodes.iter().map(|n| cd_kernel_on(ens, terms, xv, n.x)).collect();
    (0..terms)
        .map(|k| {
            let lhs = ens.ip2_vals(&sv, ens.op_values(k));
            let rhs = ens.op_values(k)[x];
            (lhs - rhs).abs() / rhs.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `s_x p` on the table as a polynomial-free helper for reports.
pub fn s_x_of(ens: &Ensemble, p: &PolySeries) -> Vec<f64> {
    ens.s_x_vals(&ens.values(p))
}

/// `∫ ρ_{N,1}(x) d_{√q}x`, which equals `N`.
pub fn density_integral(ks: &KernelSet) -> f64 {
    ks.ens.lattice().nodes().iter().enumerate().map(|(i, n)| n.jw * n.omega * ks.j_at(i, i)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_correlation, OracleConfig};

    fn families() -> Vec<(WeightFamily, f64)> {
        vec![
            (WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 }, 0.3),
            (WeightFamily::AlSalamCarlitz { alpha: -1.0 }, 0.25),
            (WeightFamily::QLaguerre { alpha: 0.5 }, 0.25),
            (WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 }, 0.25),
        ]
    }

    #[test]
    fn cd_kernel_symmetric_and_reproducing() {
        for (f, q) in families() {
            let ctx = QContext::new(q).unwrap();
            let ens = Ensemble::new(f, ctx, 4).unwrap();
            let (x, y) = (ens.lattice().nodes()[3].x, ens.lattice().nodes()[8].x);
            assert_eq!(cd_kernel_on(&ens, 4, x, y), cd_kernel_on(&ens, 4, y, x));
            assert!((cd_kernel_on(&ens, 1, x, y) - 1.0 / ens.norm(0)).abs() < 1e-15 / ens.norm(0));
            for i in bulk_indices(&ens, 3) {
                assert!(cd_reproducing_residual(&ens, 4, i) < ctx.cmp_tol, "{}", f.name());
            }
        }
    }

    #[test]
    fn k_antisymmetric_single_term() {
        let (f, q) = families()[0];
        let ctx = QContext::new(q).unwrap();
        let ks = KernelSet::new(&f, 2, &ctx).unwrap();
        let sops = sop_closed_on(ks.ensemble(), 2).unwrap();
        for a in ks.bulk_indices(4) {
            assert_eq!(ks.k_at(a, a), 0.0);
            for b in ks.bulk_indices(4) {
                assert_eq!(ks.k_at(a, b), -ks.k_at(b, a));
                let (x, y) = (ks.ensemble().lattice().nodes()[a].x, ks.ensemble().lattice().nodes()[b].x);
                let direct = (sops.polys[0].eval(x) * sops.polys[1].eval(y)
                    - sops.polys[0].eval(y) * sops.polys[1].eval(x))
                    / sops.u[0];
                assert!((ks.k_at(a, b) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn s_x_of_zero_and_half_point_limit() {
        let ctx = QContext::new(0.3).unwrap();
        let x = LatticePoint::new(1.0, 2 * 12 + 1);
        for alpha in [3.0, 0.5] {
            let f = WeightFamily::LittleQJacobi { alpha, beta: 1.5 };
            assert_eq!(s_x_apply(&f, |_| 0.0, &x, &ctx).unwrap(), 0.0);
            let ens = Ensemble::new(f, ctx, 0).unwrap();
            let beta0 = ens.f_moment(&vec![1.0; ens.lattice().len()]);
            let lim = -(1.0 + ctx.base()) * beta0;
            let v = s_x_apply(&f, |_| 1.0, &x, &ctx).unwrap();
            // the gap is exactly the integer mass deeper than x
            let deeper: f64 =
                ens.lattice().nodes().iter().filter(|n| n.is_integer() && n.pt.k > x.k).map(|n| n.w()).sum();
            let b1 = (1.0 + ctx.base()).powi(2);
            assert!((v - lim - b1 * deeper).abs() < 1e-14 * lim.abs());
            if alpha == 3.0 {
                assert!((v - lim).abs() < ctx.cmp_tol * lim.abs(), "{v} vs {lim}");
            }
        }
    }

    #[test]
    fn even_rank_one_routes() {
        for (f, q) in families() {
            let ctx = QContext::new(q).unwrap();
            for two_n in [2, 4] {
                let ks = KernelSet::new(&f, two_n, &ctx).unwrap();
                for a in ks.bulk_indices(4) {
                    for b in ks.bulk_indices(4) {
                        let scale = ks.rank_one_scale(a, b).unwrap();
                        let d = ks.j_at(a, b);
                        assert!((d - ks.j_rank_one_at(a, b).unwrap()).abs() < 10.0 * ctx.cmp_tol * scale);
                        assert!((d - ks.j_family_explicit_at(a, b).unwrap()).abs() < 10.0 * ctx.cmp_tol * scale);
                    }
                }
            }
            let nodes = KernelSet::new(&f, 2, &ctx).unwrap().ensemble().lattice().nodes().to_vec();
            assert!(skew_j_even(&f, 2, &nodes[2].pt, &nodes[5].pt, &ctx).is_ok());
        }
    }

    #[test]
    fn transposed_pairing_variant_differs_for_little_q_jacobi() {
        let (f, q) = families()[0];
        let ctx = QContext::new(q).unwrap();
        let ks = KernelSet::new(&f, 4, &ctx).unwrap();
        let worst = ks
            .bulk_indices(4)
            .iter()
            .flat_map(|&a| ks.bulk_indices(4).into_iter().map(move |b| (a, b)))
            .map(|(a, b)| {
                (ks.j_at(a, b) - ks.j_display_literal_at(a, b).unwrap()).abs() / ks.rank_one_scale(a, b).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3, "{worst}");
    }

    #[test]
    fn rank_one_without_gamma_term_fails() {
        let (f, q) = families()[2];
        let ctx = QContext::new(q).unwrap();
        let ks = KernelSet::new(&f, 2, &ctx).unwrap();
        let nodes = ks.ensemble().lattice().nodes();
        let worst = ks
            .bulk_indices(6)
            .iter()
            .flat_map(|&a| ks.bulk_indices(6).into_iter().map(move |b| (a, b)))
            .map(|(a, b)| {
                let plain =
                    nodes[a].rho / nodes[a].omega * ks.ensemble().op_values(0)[a] * ks.ensemble().op_values(0)[b]
                        / ks.ensemble().norm(0);
                (ks.j_at(a, b) - plain).abs() / ks.rank_one_scale(a, b).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn odd_sets_and_identities() {
        for (f, q) in families() {
            let ctx = QContext::new(q).unwrap();
            for n_odd in [1, 3, 5] {
                let ks = odd_kernel_set(&f, n_odd, &ctx).unwrap();
                let r = fodd_identities_check(&ks, 3).unwrap();
                assert!(r.passes(1e-9), "{} N={n_odd} {r:?}", f.name());
                assert!((density_integral(&ks) - n_odd as f64).abs() < 1e-10);
            }
            assert!(matches!(odd_kernel_set(&f, 2, &ctx), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn reproducing_orientation() {
        for (f, q) in families() {
            let ctx = QContext::new(q).unwrap();
            let ks = KernelSet::new(&f, 4, &ctx).unwrap();
            assert!(k_reproducing_residual(&ks, 4) < 10.0 * ctx.cmp_tol);
            let idx = ks.bulk_indices(3);
            let (v, _) = k_s_k_integral(&ks, idx[0], idx[1]);
            let k = ks.k_at(idx[0], idx[1]);
            assert!((v + k).abs() < 1e-10 * k.abs() && k.abs() > 0.0);
        }
    }

    #[test]
    fn correlation_matches_oracle() {
        let cfg = OracleConfig::default();
        for (f, q) in families() {
            let ctx = QContext::new(q).unwrap();
            let e = f.anchors(&ctx)[0];
            for (n, pts) in [(2usize, vec![(e, 2)]), (3, vec![(e, 1), (e, 2)])] {
                let lp: Vec<LatticePoint> = pts.iter().map(|&(a, k)| LatticePoint::new(a, k)).collect();
                let ks = KernelSet::new(&f, n, &ctx).unwrap();
                let a = ks.correlation(&lp).unwrap();
                let b = brute_correlation(&f, n, &pts, &cfg, &ctx).unwrap();
                assert!((a - b).abs() < 1e-10 * b.abs(), "{} {a} {b}", f.name());
                assert!((ks.correlation_qdet(&lp).unwrap() - a).abs() < 1e-10 * a.abs());
            }
        }
    }

    #[test]
    fn correlation_edge_cases() {
        let (f, q) = families()[0];
        let ctx = QContext::new(q).unwrap();
        assert_eq!(correlation_rho(&f, 3, &[], &ctx).unwrap(), 1.0);
        let p = LatticePoint::new(1.0, 2);
        assert!(correlation_rho(&f, 3, &[p, p], &ctx).unwrap().abs() < 1e-12);
        assert!(correlation_rho(&f, 1, &[p, LatticePoint::new(1.0, 4)], &ctx).is_err());
        assert!(matches!(skew_k(&f, 3, &p, &p, &ctx), Err(Error::InvalidParameter(_))));
        assert_eq!(skew_i_even(&f, 0, &p, &p, &ctx).unwrap(), 0.0);
    }
}
