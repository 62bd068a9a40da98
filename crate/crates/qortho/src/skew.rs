//! The skew kernel `s`, the function `F`, skew inner products, bimoment
//! matrices, Pfaffians of those, and skew-orthogonal polynomials.

use crate::error::{check_routes, check_scaled, Error, Result};
use crate::families::{gamma_closed, partition_explicit, sop_coeff_closed, Ensemble, WeightFamily, MAX_DEGREE};
use crate::pfaffian::{pfaffian, submatrix, Matrix};
use crate::poly::PolySeries;
use crate::qcore::{LatticePoint, QContext};

/// `s(x,y)`: `±(1+√q)²` between a half point and a shallower integer point
/// on one anchor (sign of the anchor), and between integer points on
/// opposite anchors (positive from the negative anchor to the positive one).
pub fn s_kernel(x: &LatticePoint, y: &LatticePoint, ctx: &QContext) -> Result<f64> {
    let k2 = (1.0 + ctx.base()).powi(2);
    if x.endpoint == y.endpoint {
        let sigma = x.endpoint.signum();
        return Ok(match (x.is_integer(), y.is_integer()) {
            (false, true) if x.k > y.k => sigma * k2,
            (true, false) if y.k > x.k => -sigma * k2,
            _ => 0.0,
        });
    }
    if x.endpoint.signum() == y.endpoint.signum() {
        return Err(Error::MixedEndpoint(x.endpoint, y.endpoint));
    }
    if x.is_integer() && y.is_integer() {
        Ok(if x.endpoint < 0.0 { k2 } else { -k2 })
    } else {
        Ok(0.0)
    }
}

/// `F(x) = 1+√q` on integer exponents, `0` on half exponents.
pub fn f_function(x: &LatticePoint, ctx: &QContext) -> f64 {
    if x.is_integer() {
        1.0 + ctx.base()
    } else {
        0.0
    }
}

/// Magnitude bound for `⟨a,b⟩₁`: `(1+√q)² Σ|a||W| Σ|b||W|`.
pub fn ip1_scale(ens: &Ensemble, a: &[f64], b: &[f64]) -> f64 {
    let k2 = (1.0 + ens.base()).powi(2);
    let mass = |v: &[f64]| ens.lattice().nodes().iter().zip(v).map(|(n, x)| (n.w() * x).abs()).sum::<f64>();
    k2 * mass(a) * mass(b)
}

/// `⟨a,b⟩₁` on node values by the symmetric route, checked against the
/// nested ordered-region route.
pub fn ip1_checked(ens: &Ensemble, a: &[f64], b: &[f64]) -> Result<f64> {
    // antisymmetrised so that ⟨a,a⟩₁ is exactly zero
    let sym = 0.5 * (ens.ip1_vals(a, b) - ens.ip1_vals(b, a));
    let nested = ens.ip1_nested_vals(a, b);
    check_scaled("skew product <.,.>_1", sym, nested, ip1_scale(ens, a, b), ens.ctx().cmp_tol)?;
    Ok(sym)
}

pub fn skew_product_beta1_on(ens: &Ensemble, phi: &PolySeries, psi: &PolySeries) -> Result<f64> {
    ip1_checked(ens, &ens.values(phi), &ens.values(psi))
}

/// `⟨φ,ψ⟩₁` on the family lattice.
pub fn skew_product_beta1(fam: &WeightFamily, phi: &PolySeries, psi: &PolySeries, ctx: &QContext) -> Result<f64> {
    let ens = Ensemble::new(*fam, *ctx, 0)?;
    skew_product_beta1_on(&ens, phi, psi)
}

/// `⟨φ,ψ⟩₄ = ∫ ω̃ (φ Dψ − ψ Dφ) d_{√q}x`.
pub fn skew_product_beta4(fam: &WeightFamily, phi: &PolySeries, psi: &PolySeries, ctx: &QContext) -> Result<f64> {
    let ens = Ensemble::new(*fam, *ctx, 0)?;
    Ok(ens.ip4(phi, psi))
}

/// Bimoments `m_{ij} = ⟨b_i, b_j⟩₁` and single moments `ξ_j = ∫ F b_j ω`
/// for some polynomial basis `b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMomentMatrix {
    pub m: Matrix<f64>,
    pub xi: Vec<f64>,
}

impl SkewMomentMatrix {
    pub fn size(&self) -> usize {
        self.m.len()
    }

    /// Pfaffian of the leading `2m × 2m` minor; `τ_0 = 1`.
    pub fn tau(&self, two_m: usize) -> Result<f64> {
        if two_m % 2 == 1 {
            return Err(Error::OddDimension(two_m));
        }
        self.check_size(two_m)?;
        let idx: Vec<usize> = (0..two_m).collect();
        pfaffian(&submatrix(&self.m, &idx))
    }

    /// Pfaffian of the leading `(2n+1)` minor bordered by `ξ`.
    pub fn tau_odd(&self, n_odd: usize) -> Result<f64> {
        if n_odd % 2 == 0 {
            return Err(Error::InvalidParameter(format!("{n_odd} is not odd")));
        }
        self.check_size(n_odd)?;
        let mut a = vec![vec![0.0; n_odd + 1]; n_odd + 1];
        for i in 0..n_odd {
            for j in 0..n_odd {
                a[i][j] = self.m[i][j];
            }
            a[i][n_odd] = self.xi[i];
            a[n_odd][i] = -self.xi[i];
        }
        pfaffian(&a)
    }

    fn check_size(&self, need: usize) -> Result<()> {
        if need > self.size() {
            return Err(Error::InvalidParameter(format!(
                "minor of size {need} exceeds moment matrix size {}",
                self.size()
            )));
        }
        Ok(())
    }
}

/// Moments over node-value vectors, every entry route-checked.
pub fn moments_of(ens: &Ensemble, basis: &[Vec<f64>]) -> Result<SkewMomentMatrix> {
    let n = basis.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = ip1_checked(ens, &basis[i], &basis[j])?;
            m[i][j] = v;
            m[j][i] = -v;
        }
    }
    let xi = basis.iter().map(|b| ens.f_moment(b)).collect();
    Ok(SkewMomentMatrix { m, xi })
}

/// Monomial bimoments `⟨xⁱ, yʲ⟩₁`, `i,j < n_polys`.
pub fn moment_matrix(fam: &WeightFamily, n_polys: usize, ctx: &QContext) -> Result<SkewMomentMatrix> {
    if n_polys > 12 {
        return Err(Error::InvalidParameter(format!("moment matrix size {n_polys} exceeds 12")));
    }
    let ens = Ensemble::new(*fam, *ctx, 0)?;
    let basis: Vec<Vec<f64>> = (0..n_polys).map(|i| ens.values(&PolySeries::monomial(i))).collect();
    moments_of(&ens, &basis)
}

/// Bimoments in the monic OP basis. The change of basis is unit lower
/// triangular, so every leading Pfaffian equals the monomial one.
pub fn op_moment_matrix(ens: &Ensemble, n_polys: usize) -> Result<SkewMomentMatrix> {
    if n_polys > ens.max_degree() + 1 {
        return Err(Error::InvalidParameter(format!("ensemble holds only {} OPs", ens.max_degree() + 1)));
    }
    let basis: Vec<Vec<f64>> = (0..n_polys).map(|i| ens.op_values(i).to_vec()).collect();
    moments_of(ens, &basis)
}

fn ensemble_for(fam: &WeightFamily, n_polys: usize, ctx: &QContext) -> Result<Ensemble> {
    if n_polys > MAX_DEGREE + 1 {
        return Err(Error::InvalidParameter(format!("{n_polys} polynomials exceed the degree cap {MAX_DEGREE}")));
    }
    Ensemble::new(*fam, *ctx, n_polys.saturating_sub(1))
}

/// `τ_{2m}`, the Pfaffian of the leading `2m × 2m` bimoment minor.
pub fn tau(fam: &WeightFamily, two_m: usize, ctx: &QContext) -> Result<f64> {
    if two_m == 0 {
        return Ok(1.0);
    }
    let ens = ensemble_for(fam, two_m, ctx)?;
    op_moment_matrix(&ens, two_m)?.tau(two_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SopSource {
    Numeric,
    ClosedForm,
}

/// Normalisation of `Q_{2m+1}`, which is fixed only up to adding a
/// multiple of `Q_{2m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SopGauge {
    /// No `p_{2m}` component; the gauge of the closed forms.
    OpBasis,
    /// No `x^{2m}` monomial.
    Monomial,
}

/// `Q_0..Q_{2N−1}` with `u_m = ⟨Q_{2m}, Q_{2m+1}⟩₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct SopSet {
    pub polys: Vec<PolySeries>,
    /// `Q_k = Σ_j op_coeffs[k][j] p_j`.
    pub op_coeffs: Vec<Vec<f64>>,
    pub u: Vec<f64>,
    pub source: SopSource,
}

impl SopSet {
    /// Node values of every `Q_k`, assembled from the OP values of `ens`
    /// rather than by Horner evaluation.
    pub fn values(&self, ens: &Ensemble) -> Vec<Vec<f64>> {
        self.op_coeffs
            .iter()
            .map(|c| {
                let mut v = vec![0.0; ens.lattice().len()];
                for (j, &cj) in c.iter().enumerate().filter(|(_, c)| **c != 0.0) {
                    for (a, b) in v.iter_mut().zip(ens.op_values(j)) {
                        *a += cj * b;
                    }
                }
                v
            })
            .collect()
    }

    /// Largest coefficient discrepancy against another set.
    pub fn max_coeff_diff(&self, other: &SopSet) -> f64 {
        self.polys
            .iter()
            .zip(&other.polys)
            .map(|(a, b)| {
                let n = a.coeffs().len().max(b.coeffs().len());
                (0..n).map(|i| (a.coeff(i) - b.coeff(i)).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Hadamard-type bound `|Pf A| ≤ ∏ ‖row_i‖^{1/2}`, applied after the
/// congruence `DAD` with `d_i = max_j |a_ij|^{−1/2}`; `Pf(DAD) = det D·Pf A`.
fn pf_bound(a: &Matrix<f64>) -> f64 {
    let d: Vec<f64> = a.iter().map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())).sqrt()).collect();
    a.iter()
        .enumerate()
        .map(|(i, r)| {
            let norm = r.iter().enumerate().map(|(j, v)| (v / (d[i] * d[j])).powi(2)).sum::<f64>().sqrt();
            norm.sqrt() * d[i]
        })
        .product()
}

fn combine(ens: &Ensemble, coeffs: &[f64]) -> PolySeries {
    coeffs.iter().enumerate().fold(PolySeries::zero(), |acc, (j, &c)| acc.axpy(c, ens.op(j)))
}

/// Bordered-Pfaffian SOPs in the OP basis. With `S` the index set of the
/// bordered minor, the coefficient of `p_{S_j}` is `(−1)^j Pf(M_{S∖S_j})/τ_{2m}`.
pub fn sop_numeric_on(ens: &Ensemble, two_n: usize, gauge: SopGauge) -> Result<SopSet> {
    if two_n % 2 == 1 || two_n == 0 {
        return Err(Error::InvalidParameter(format!("SOP count {two_n} must be even and positive")));
    }
    let g = op_moment_matrix(ens, two_n)?.m;
    let n = two_n / 2;
    let mut taus = vec![1.0];
    for m in 1..=n {
        let minor = submatrix(&g, &(0..2 * m).collect::<Vec<_>>());
        let t = pfaffian(&minor)?;
        if !(t.abs() > 1e-13 * pf_bound(&minor)) {
            return Err(Error::SingularTau(2 * m));
        }
        taus.push(t);
    }
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(two_n);
    for m in 0..n {
        for odd in [false, true] {
            let mut set: Vec<usize> = (0..2 * m).collect();
            set.push(if odd { 2 * m + 1 } else { 2 * m });
            let mut c = vec![0.0; 2 * m + 2];
            for (pos, &idx) in set.iter().enumerate() {
                let rest: Vec<usize> = set.iter().copied().filter(|&i| i != idx).collect();
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                c[idx] = sign * pfaffian(&submatrix(&g, &rest))? / taus[m];
            }
            coeffs.push(c);
        }
    }
    let mut polys: Vec<PolySeries> = coeffs.iter().map(|c| combine(ens, c)).collect();
    if gauge == SopGauge::Monomial {
        for m in 0..n {
            let c = polys[2 * m + 1].coeff(2 * m);
            polys[2 * m + 1] = polys[2 * m + 1].axpy(-c, &polys[2 * m]);
            let even = coeffs[2 * m].clone();
            for (a, b) in coeffs[2 * m + 1].iter_mut().zip(even) {
                *a -= c * b;
            }
        }
    }
    let u = (0..n).map(|m| taus[m + 1] / taus[m]).collect();
    Ok(SopSet { polys, op_coeffs: coeffs, u, source: SopSource::Numeric })
}

/// `Q_0..Q_{2N−1}` from bordered Pfaffians, in the closed-form gauge.
pub fn sop_numeric(fam: &WeightFamily, two_n: usize, ctx: &QContext) -> Result<SopSet> {
    sop_numeric_gauge(fam, two_n, SopGauge::OpBasis, ctx)
}

pub fn sop_numeric_gauge(fam: &WeightFamily, two_n: usize, gauge: SopGauge, ctx: &QContext) -> Result<SopSet> {
    let ens = ensemble_for(fam, two_n, ctx)?;
    sop_numeric_on(&ens, two_n, gauge)
}

/// `Q_{2j} = p_{2j}`, `Q_{2j+1} = p_{2j+1} − a_j p_{2j−1}`, `u_j = 1/γ_{2j}`.
pub fn sop_closed_on(ens: &Ensemble, two_n: usize) -> Result<SopSet> {
    if two_n % 2 == 1 || two_n == 0 || two_n > ens.max_degree() + 1 {
        return Err(Error::InvalidParameter(format!("SOP count {two_n} is odd or exceeds the ensemble")));
    }
    let (fam, ctx) = (ens.family(), ens.ctx());
    let mut coeffs = Vec::with_capacity(two_n);
    let mut u = Vec::new();
    for j in 0..two_n / 2 {
        let mut even = vec![0.0; 2 * j + 1];
        even[2 * j] = 1.0;
        coeffs.push(even);
        let mut odd = vec![0.0; 2 * j + 2];
        odd[2 * j + 1] = 1.0;
        if j > 0 {
            odd[2 * j - 1] = -sop_coeff_closed(fam, j, ctx)?;
        }
        coeffs.push(odd);
        u.push(1.0 / gamma_closed(fam, 2 * j, ctx)?);
    }
    let polys = coeffs.iter().map(|c| combine(ens, c)).collect();
    Ok(SopSet { polys, op_coeffs: coeffs, u, source: SopSource::ClosedForm })
}

pub fn sop_closed(fam: &WeightFamily, two_n: usize, ctx: &QContext) -> Result<SopSet> {
    let ens = ensemble_for(fam, two_n, ctx)?;
    sop_closed_on(&ens, two_n)
}

/// Inverts the SOP connection: `p_{2j+1} = Σ_{l≤j} (∏_{l<k≤j} a_k) Q_{2l+1}`.
pub fn op_from_sop(fam: &WeightFamily, two_n: usize, ctx: &QContext) -> Result<Vec<PolySeries>> {
    let sops = sop_closed(fam, two_n, ctx)?;
    let a: Vec<f64> = (0..two_n / 2).map(|k| sop_coeff_closed(fam, k, ctx)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(two_n);
    for j in 0..two_n / 2 {
        out.push(sops.polys[2 * j].clone());
        let mut acc = PolySeries::zero();
        for l in 0..=j {
            let w: f64 = a[l + 1..=j].iter().product();
            acc = acc.axpy(w, &sops.polys[2 * l + 1]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `∏_{l<n} γ_{2l}^{−1}` from closed-form `γ`.
pub fn partition_gamma_product(fam: &WeightFamily, n: usize, ctx: &QContext) -> Result<f64> {
    (0..n).try_fold(1.0, |acc, l| Ok(acc / gamma_closed(fam, 2 * l, ctx)?))
}

/// `τ_{2n}` by the explicit family product, checked against `∏ u_l`.
pub fn partition_even_closed(fam: &WeightFamily, two_n: usize, ctx: &QContext) -> Result<f64> {
    if two_n % 2 == 1 || two_n > 10 {
        return Err(Error::InvalidParameter(format!("even partition needs an even particle count <= 10, got {two_n}")));
    }
    let n = two_n / 2;
    let explicit = partition_explicit(fam, n, ctx)?;
    let prod = partition_gamma_product(fam, n, ctx)?;
    check_routes("even partition: explicit product vs prod u_l", explicit, prod, ctx.cmp_tol)?;
    Ok(explicit)
}

/// Every route to an even or odd partition function that the lattice
/// supports, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRoutes {
    pub particles: usize,
    /// Explicit product (even) or `β_{2n}∏u_j` with closed-form `u` (odd).
    pub closed: f64,
    /// `∏ γ_{2l}^{−1}` with numerically computed `γ` (even), or the
    /// bordered bimoment Pfaffian (odd).
    pub product: f64,
    /// Pfaffian of the bimoment matrix.
    pub pfaffian: f64,
}

pub fn partition_routes(fam: &WeightFamily, particles: usize, ctx: &QContext) -> Result<PartitionRoutes> {
    let npoly = particles.max(1) + particles % 2;
    let ens = ensemble_for(fam, npoly.max(2), ctx)?;
    let mm = op_moment_matrix(&ens, particles)?;
    if particles % 2 == 0 {
        let n = particles / 2;
        let gp = (0..n).fold(1.0, |acc, l| acc / ens.gamma_numeric(2 * l));
        Ok(PartitionRoutes {
            particles,
            closed: partition_explicit(fam, n, ctx)?,
            product: gp,
            pfaffian: mm.tau(particles)?,
        })
    } else {
        let pf = mm.tau_odd(particles)?;
        Ok(PartitionRoutes { particles, closed: partition_odd(fam, particles, ctx)?, product: pf, pfaffian: pf })
    }
}

/// Largest `|ρ(x;√q)/ω(x;q)|` over the deepest nodes of each branch,
/// relative to its maximum over the table. Small values mean the boundary
/// term at the origin vanishes.
pub fn rho_over_omega_at_origin(ens: &Ensemble) -> f64 {
    let nodes = ens.lattice().nodes();
    let peak = nodes.iter().map(|n| (n.rho / n.omega).abs()).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let deep = ens
        .lattice()
        .ranges()
        .iter()
        .flat_map(|&(_, hi)| nodes[hi - 2..hi].iter())
        .map(|n| (n.rho / n.omega).abs())
        .fold(0.0, f64::max);
    deep / peak
}

/// Threshold on [`rho_over_omega_at_origin`] below which the boundary
/// term at the origin is reported as vanishing.
pub const BOUNDARY_TERM_CUTOFF: f64 = 1e-10;

/// `β_0 ∏_{j<l} γ_{2j}/γ_{2j+1}`.
pub fn beta_even_product(fam: &WeightFamily, l: usize, beta0: f64, ctx: &QContext) -> Result<f64> {
    (0..l).try_fold(beta0, |acc, j| Ok(acc * gamma_closed(fam, 2 * j, ctx)? / gamma_closed(fam, 2 * j + 1, ctx)?))
}

/// `β_i = ∫ F Q_i ω d_{√q}x` over the first `count` closed-form SOPs,
/// even entries checked against the product formula.
pub fn betas_on(ens: &Ensemble, count: usize) -> Result<Vec<f64>> {
    let two_n = (count + count % 2).max(2);
    let sops = sop_closed_on(ens, two_n)?;
    let beta: Vec<f64> = sops.values(ens)[..count].iter().map(|v| ens.f_moment(v)).collect();
    for i in (2..count).step_by(2) {
        let prod = beta_even_product(ens.family(), i / 2, beta[0], ens.ctx())?;
        check_routes(&format!("beta_{i}: direct sum vs product"), beta[i], prod, ens.ctx().cmp_tol)?;
    }
    Ok(beta)
}

/// `β_i`, direct lattice sum; even `i` is also checked against the
/// product formula. On two-sided supports `ρ/ω` does not vanish at the
/// origin, yet the product still holds: the two branch boundary terms cancel.
pub fn beta_coeff(fam: &WeightFamily, i: usize, ctx: &QContext) -> Result<f64> {
    let ens = ensemble_for(fam, i + 2, ctx)?;
    Ok(betas_on(&ens, i + 1)?[i])
}

/// `τ_{2n+1} = β_{2n} ∏_{j<n} u_j`.
pub fn partition_odd(fam: &WeightFamily, n_odd: usize, ctx: &QContext) -> Result<f64> {
    if n_odd % 2 == 0 || n_odd > 11 {
        return Err(Error::InvalidParameter(format!("odd partition needs an odd particle count <= 11, got {n_odd}")));
    }
    let n = n_odd / 2;
    let b = beta_coeff(fam, 2 * n, ctx)?;
    if b == 0.0 {
        return Err(Error::VanishingBeta { index: 2 * n, value: b });
    }
    Ok(b * partition_gamma_product(fam, n, ctx)?)
}

/// The odd q-Laguerre SOP coefficient under `x ↦ (1−√q)x`, `Q_k ↦ Q_k/(1−√q)^k`,
/// next to its `q → 1` value `−2n(2n+α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreLimit {
    pub n: usize,
    pub alpha: f64,
    pub q: f64,
    pub rescaled: f64,
    pub target: f64,
    pub rel: f64,
}

pub fn laguerre_limit_check(n: usize, alpha: f64, q: f64) -> Result<LaguerreLimit> {
    if n == 0 {
        return Err(Error::InvalidParameter("limit check needs n >= 1".into()));
    }
    let ctx = QContext::new(q)?;
    let a = sop_coeff_closed(&WeightFamily::QLaguerre { alpha }, n, &ctx)?;
    let rescaled = -a / (1.0 - ctx.base()).powi(2);
    let nf = n as f64;
    let target = -2.0 * nf * (2.0 * nf + alpha);
    Ok(LaguerreLimit { n, alpha, q, rescaled, target, rel: (rescaled - target).abs() / target.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lqj(a: f64, b: f64) -> WeightFamily {
        WeightFamily::LittleQJacobi { alpha: a, beta: b }
    }

    fn all_families() -> Vec<(WeightFamily, f64)> {
        vec![
            (lqj(0.5, 0.5), 0.3),
            (WeightFamily::AlSalamCarlitz { alpha: -1.0 }, 0.25),
            (WeightFamily::QLaguerre { alpha: 0.5 }, 0.25),
            (WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 }, 0.25),
        ]
    }

    #[test]
    fn s_kernel_examples() {
        let ctx = QContext::new(0.25).unwrap();
        let k2 = 1.5f64.powi(2);
        let x = LatticePoint::new(1.0, 3);
        let y = LatticePoint::new(1.0, 2);
        assert_eq!(s_kernel(&x, &y, &ctx).unwrap(), k2);
        assert_eq!(s_kernel(&y, &x, &ctx).unwrap(), -k2);
        assert_eq!(s_kernel(&x, &x, &ctx).unwrap(), 0.0);
        assert!(matches!(s_kernel(&x, &LatticePoint::new(0.5, 2), &ctx), Err(Error::MixedEndpoint(..))));
        assert_eq!(f_function(&LatticePoint::new(1.0, 1), &ctx), 0.0);
        assert_eq!(f_function(&LatticePoint::new(1.0, 4), &ctx), 1.5);
        assert_eq!(f_function(&LatticePoint::new(-2.0, 0), &ctx), 1.5);
    }

    #[test]
    fn s_kernel_is_skew() {
        let ctx = QContext::new(0.3).unwrap();
        for e1 in [1.0, -0.5] {
            for e2 in [1.0, -0.5] {
                for k1 in 0..6 {
                    for k2 in 0..6 {
                        let (x, y) = (LatticePoint::new(e1, k1), LatticePoint::new(e2, k2));
                        assert_eq!(s_kernel(&x, &y, &ctx).unwrap(), -s_kernel(&y, &x, &ctx).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn beta1_basic() {
        let ctx = QContext::new(0.25).unwrap();
        let fam = lqj(0.0, 0.0);
        let x = PolySeries::monomial(1);
        assert_eq!(skew_product_beta1(&fam, &x, &x, &ctx).unwrap().abs(), 0.0);
        let mm = moment_matrix(&fam, 4, &ctx).unwrap();
        let v = skew_product_beta1(&fam, &PolySeries::one(), &x, &ctx).unwrap();
        assert_eq!(mm.m[0][1], v);
        assert_eq!(mm.tau(2).unwrap(), v);
        assert_eq!(mm.tau(0).unwrap(), 1.0);
        assert!((0..4).all(|i| mm.m[i][i] == 0.0));
    }

    #[test]
    fn beta4_relation() {
        let ctx = QContext::new(0.3).unwrap();
        let fam = lqj(0.5, 0.5);
        let ens = Ensemble::new(fam, ctx, 0).unwrap();
        let (one, x) = (PolySeries::one(), PolySeries::monomial(1));
        let lhs = ens.ip2(&one, &ens.apply_a(&x));
        let rhs = skew_product_beta4(&fam, &one, &x, &ctx).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * lhs.abs());
        let c = PolySeries::new(vec![2.0]);
        let a = skew_product_beta4(&fam, &x, &c, &ctx).unwrap();
        let b = skew_product_beta4(&fam, &c, &x, &ctx).unwrap();
        assert!((a + b).abs() < 1e-15 * a.abs().max(1.0));
    }

    #[test]
    fn xi0_is_integer_mass() {
        let ctx = QContext::new(0.3).unwrap();
        let fam = lqj(0.5, 1.5);
        let mm = moment_matrix(&fam, 2, &ctx).unwrap();
        let ens = Ensemble::new(fam, ctx, 0).unwrap();
        let direct: f64 =
            ens.lattice().nodes().iter().filter(|n| n.is_integer()).map(|n| (1.0 - ctx.q) * n.x * n.omega).sum();
        assert!((mm.xi[0] - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn monomial_and_op_pfaffians_agree() {
        for (fam, q) in all_families() {
            let ctx = QContext::new(q).unwrap();
            let mono = moment_matrix(&fam, 6, &ctx).unwrap();
            let ens = Ensemble::new(fam, ctx, 5).unwrap();
            let op = op_moment_matrix(&ens, 6).unwrap();
            for m in [2, 4, 6] {
                let (a, b) = (mono.tau(m).unwrap(), op.tau(m).unwrap());
                assert!((a - b).abs() < 1e-7 * b.abs(), "{} tau_{m}: {a} vs {b}", fam.name());
            }
            let (a, b) = (mono.tau_odd(5).unwrap(), op.tau_odd(5).unwrap());
            assert!((a - b).abs() < 1e-7 * b.abs(), "{} odd: {a} vs {b}", fam.name());
        }
    }

    #[test]
    fn sops_skew_orthogonal_and_routes_agree() {
        for (fam, q) in all_families() {
            let ctx = QContext::new(q).unwrap();
            let ens = Ensemble::new(fam, ctx, 7).unwrap();
            let num = sop_numeric_on(&ens, 8, SopGauge::OpBasis).unwrap();
            let clo = sop_closed_on(&ens, 8).unwrap();
            for set in [&num, &clo] {
                let vals = set.values(&ens);
                for i in 0..8 {
                    for j in 0..8 {
                        let v = ens.ip1_vals(&vals[i], &vals[j]);
                        let (m, n) = (i / 2, j / 2);
                        let expect = match (i % 2, j % 2) {
                            (0, 1) if m == n => set.u[m],
                            (1, 0) if m == n => -set.u[m],
                            _ => 0.0,
                        };
                        let scale = (set.u[m] * set.u[n]).abs().sqrt();
                        assert!((v - expect).abs() < 1e-8 * scale, "{} <Q{i},Q{j}> = {v}", fam.name());
                    }
                }
            }
            for m in 0..4 {
                assert!((num.u[m] - clo.u[m]).abs() < 1e-8 * clo.u[m].abs(), "{} u_{m}", fam.name());
            }
            for (a, b) in num.polys.iter().zip(&clo.polys) {
                assert!(a.scaled_distance(b) < 1e-8, "{}: {:?} vs {:?}", fam.name(), a, b);
            }
        }
    }

    #[test]
    fn low_order_sops() {
        let ctx = QContext::new(0.25).unwrap();
        let fam = lqj(0.0, 0.0);
        let s = sop_numeric_gauge(&fam, 4, SopGauge::Monomial, &ctx).unwrap();
        assert_eq!(s.polys[0], PolySeries::one());
        assert_eq!(s.polys[1].coeffs(), &[0.0, 1.0]);
        assert_eq!(s.polys[3].coeff(2), 0.0);
        let t = sop_numeric(&fam, 4, &ctx).unwrap();
        let ens = Ensemble::new(fam, ctx, 3).unwrap();
        assert!(t.polys[1].scaled_distance(ens.op(1)) < 1e-12);
    }

    #[test]
    fn op_reconstruction() {
        let ctx = QContext::new(0.3).unwrap();
        let fam = lqj(0.5, 0.5);
        let ps = op_from_sop(&fam, 6, &ctx).unwrap();
        let ens = Ensemble::new(fam, ctx, 5).unwrap();
        for (j, p) in ps.iter().enumerate() {
            assert!(p.scaled_distance(ens.op(j)) < 1e-8, "p_{j}");
        }
    }

    #[test]
    fn partitions_and_betas() {
        for (fam, q) in all_families() {
            let ctx = QContext::new(q).unwrap();
            for two_n in [2, 4, 6] {
                let v = partition_even_closed(&fam, two_n, &ctx).unwrap();
                let t = tau(&fam, two_n, &ctx).unwrap();
                assert!((v - t).abs() < 1e-8 * v.abs(), "{} tau_{two_n}: {v} vs {t}", fam.name());
            }
            for n_odd in [1, 3, 5] {
                let r = partition_routes(&fam, n_odd, &ctx).unwrap();
                assert!((r.closed - r.pfaffian).abs() < 1e-8 * r.closed.abs(), "{} tau_{n_odd}: {r:?}", fam.name());
            }
            let b0 = beta_coeff(&fam, 0, &ctx).unwrap();
            let t1 = partition_odd(&fam, 1, &ctx).unwrap();
            assert_eq!(b0, t1);
        }
    }

    #[test]
    fn homogeneity_of_partition() {
        // scaling ω by c multiplies τ_{2n} by c^{2n}: the bimoments are quadratic in ω
        let ctx = QContext::new(0.25).unwrap();
        let fam = lqj(0.0, 0.0);
        let ens = Ensemble::new(fam, ctx, 3).unwrap();
        let c = 1.7;
        let mm = op_moment_matrix(&ens, 4).unwrap();
        let scaled = SkewMomentMatrix {
            m: mm.m.iter().map(|r| r.iter().map(|v| v * c * c).collect()).collect(),
            xi: mm.xi.clone(),
        };
        let (a, b) = (mm.tau(4).unwrap(), scaled.tau(4).unwrap());
        assert!((b - c.powi(4) * a).abs() < 1e-13 * b.abs());
    }
}
