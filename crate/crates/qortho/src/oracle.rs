//! Brute-force ground truth. Weights, anchors, the skew kernel and the
//! Pfaffian are re-evaluated here from their defining formulas; only the
//! `q`-product primitives are shared with the engine.

use crate::error::{Error, Result};
use crate::families::WeightFamily;
use crate::pfaffian::Matrix;
use crate::qcore::{q_poch_inf, QContext};
use crate::quaternion::{require_self_dual, Quaternion};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Steps in `q` per nested variable; `None` picks 300, 60, 30 for
    /// one or two, three, four or more particles.
    pub depth: Option<usize>,
    pub max_particles: usize,
    pub tol_report: f64,
    pub budget: u128,
    /// Multiplies `ω`; exercises homogeneity.
    pub omega_scale: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { depth: None, max_particles: 4, tol_report: 1e-10, budget: 100_000_000, omega_scale: 1.0 }
    }
}

impl OracleConfig {
    pub fn depth_for(&self, n: usize) -> usize {
        self.depth.unwrap_or(match n {
            0..=2 => 300,
            3 => 60,
            _ => 30,
        })
    }

    fn check_particles(&self, n: usize) -> Result<()> {
        if n > self.max_particles {
            return Err(Error::InvalidParameter(format!(
                "oracle handles at most {} particles, got {n}",
                self.max_particles
            )));
        }
        Ok(())
    }

    fn charge(&self, terms: u128) -> Result<()> {
        if terms > self.budget {
            return Err(Error::TermBudgetExceeded { terms, budget: self.budget });
        }
        Ok(())
    }
}

/// `ω(x;q)` straight from its product formula.
fn omega(fam: &WeightFamily, x: f64, ctx: &QContext) -> Result<f64> {
    let q = ctx.q;
    let pinf = |a: f64| q_poch_inf(a, q, ctx);
    Ok(match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => {
            let ratio = pinf(q * x)? / pinf(q.powf((beta + 1.0) / 2.0) * x)?;
            q.powf(-(alpha + 1.0) / 8.0) * x.powf((alpha - 1.0) / 2.0) * ratio
        }
        WeightFamily::AlSalamCarlitz { alpha } => pinf(q * x)? * pinf(q * x / alpha)? / (-alpha).sqrt(),
        WeightFamily::QLaguerre { alpha } => q.powf(-(alpha + 1.0) / 8.0) * x.powf((alpha - 1.0) / 2.0) / pinf(-x)?,
        WeightFamily::BigQJacobi { a, b, c } => {
            let s = q.sqrt();
            pinf(s * x / a)? * pinf(s * x / c)? / (pinf(x)? * pinf(b * x / c)?)
        }
    })
}

/// A point `e·q^{k/2}` with its Jackson-weighted `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePoint {
    pub endpoint: f64,
    pub k: i64,
    pub x: f64,
    pub omega: f64,
    /// `(1−√q)|x|ω(x)`.
    pub w: f64,
}

fn anchors(fam: &WeightFamily, q: f64) -> Vec<f64> {
    match *fam {
        WeightFamily::LittleQJacobi { .. } | WeightFamily::QLaguerre { .. } => vec![1.0],
        WeightFamily::AlSalamCarlitz { alpha } => vec![1.0, alpha],
        WeightFamily::BigQJacobi { a, c, .. } => vec![a * q.sqrt(), c * q.sqrt()],
    }
}

/// Shallow exponents retained on an unbounded support.
const UPWARD_STEPS: i64 = 40;

fn oracle_point(fam: &WeightFamily, e: f64, k: i64, cfg: &OracleConfig, ctx: &QContext) -> Result<OraclePoint> {
    let s = ctx.q.sqrt();
    let x = e * s.powi(k as i32);
    if x == 0.0 {
        // underflowed depth: the Jackson weight is zero there
        return Ok(OraclePoint { endpoint: e, k, x, omega: 0.0, w: 0.0 });
    }
    let om = cfg.omega_scale * omega(fam, x, ctx)?;
    Ok(OraclePoint { endpoint: e, k, x, omega: om, w: (1.0 - s) * x.abs() * om })
}

/// The truncated `√q`-lattice: per anchor `k ∈ [k_min, 2·depth]`.
pub fn oracle_lattice(
    fam: &WeightFamily,
    depth: usize,
    cfg: &OracleConfig,
    ctx: &QContext,
) -> Result<Vec<OraclePoint>> {
    fam.validate(ctx)?;
    let kmin = if matches!(fam, WeightFamily::QLaguerre { .. }) { -2 * UPWARD_STEPS } else { 0 };
    let mut pts = Vec::new();
    for e in anchors(fam, ctx.q) {
        for k in kmin..=2 * depth as i64 {
            let p = oracle_point(fam, e, k, cfg, ctx)?;
            if p.w.is_finite() {
                pts.push(p);
            }
        }
    }
    Ok(pts)
}

/// The skew kernel, restated: within an anchor a half point deeper than an
/// integer point carries `sign(e)(1+√q)²`; integer points on opposite
/// anchors carry `+(1+√q)²` from the negative to the positive one.
fn skew_entry(a: &OraclePoint, b: &OraclePoint, ctx: &QContext) -> f64 {
    let c = (1.0 + ctx.q.sqrt()).powi(2);
    let (ai, bi) = (a.k.rem_euclid(2) == 0, b.k.rem_euclid(2) == 0);
    if a.endpoint == b.endpoint {
        let sg = a.endpoint.signum();
        if !ai && bi && a.k > b.k {
            sg * c
        } else if ai && !bi && b.k > a.k {
            -sg * c
        } else {
            0.0
        }
    } else if ai && bi {
        if a.endpoint < 0.0 {
            c
        } else {
            -c
        }
    } else {
        0.0
    }
}

fn f_entry(p: &OraclePoint, ctx: &QContext) -> f64 {
    if p.k.rem_euclid(2) == 0 {
        1.0 + ctx.q.sqrt()
    } else {
        0.0
    }
}

/// `Pf[s(z_i,z_j)]` (bordered by `F` for odd counts) times `∏_{i<j}(z_j − z_i)`.
fn symmetric_density(z: &[&OraclePoint], ctx: &QContext) -> f64 {
    let n = z.len();
    let dim = n + n % 2;
    let mut a = vec![vec![0.0; dim]; dim];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = skew_entry(z[i], z[j], ctx);
        }
        if n % 2 == 1 {
            a[i][n] = f_entry(z[i], ctx);
            a[n][i] = -a[i][n];
        }
    }
    let pf = matching_sum(&a);
    if pf == 0.0 {
        return 0.0;
    }
    let mut v = pf;
    for i in 0..n {
        for j in i + 1..n {
            v *= z[j].x - z[i].x;
        }
    }
    v
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Sums `f` over all `r`-subsets of `pts`, in increasing index order.
fn for_each_subset<'a, F: FnMut(&[&'a OraclePoint])>(pts: &'a [OraclePoint], r: usize, f: &mut F) {
    fn rec<'a, F: FnMut(&[&'a OraclePoint])>(
        pts: &'a [OraclePoint],
        start: usize,
        r: usize,
        cur: &mut Vec<&'a OraclePoint>,
        f: &mut F,
    ) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for i in start..pts.len() {
            cur.push(&pts[i]);
            rec(pts, i + 1, r, cur, f);
            cur.pop();
        }
    }
    rec(pts, 0, r, &mut Vec::with_capacity(r), f);
}

/// Partition function by the ordered nested sum of the configuration
/// space: `z_1 = q^{μ_1}`, `z_{i+1} = q^{1/2} z_i q^{μ_{i+1}}`, with
/// integrand `∏_{i<j}(z_i − z_j) ∏ (1−q) z_i ω(z_i)`.
fn nested_partition(fam: &WeightFamily, n: usize, cfg: &OracleConfig, ctx: &QContext) -> Result<f64> {
    let d = cfg.depth_for(n) as i64;
    let up = if matches!(fam, WeightFamily::QLaguerre { .. }) { UPWARD_STEPS } else { 0 };
    cfg.charge((d + up + 1) as u128 * ((d + 1) as u128).pow(n.saturating_sub(1) as u32))?;
    let kmax = 2 * d * n as i64 + n as i64;
    let kmin = -2 * up;
    let mut table = Vec::with_capacity((kmax - kmin + 1) as usize);
    for k in kmin..=kmax {
        let p = oracle_point(fam, 1.0, k, cfg, ctx)?;
        let w = (1.0 - ctx.q) * p.x * p.omega;
        table.push((p.x, if w.is_finite() { w } else { 0.0 }));
    }
    let at = |k: i64| table[(k - kmin) as usize];

    fn rec(level: usize, n: usize, k_prev: i64, d: i64, zs: &mut Vec<f64>, at: &dyn Fn(i64) -> (f64, f64)) -> f64 {
        if level == n {
            return 1.0;
        }
        let mut tot = 0.0;
        for mu in 0..=d {
            let k = k_prev + 1 + 2 * mu;
            let (x, w) = at(k);
            if w == 0.0 {
                continue;
            }
            let mut v = w;
            for &z in zs.iter() {
                v *= z - x;
            }
            zs.push(x);
            tot += v * rec(level + 1, n, k, d, zs, at);
            zs.pop();
        }
        tot
    }

    let mut tot = 0.0;
    let mut zs = Vec::with_capacity(n);
    for mu1 in -up..=d {
        let k = 2 * mu1;
        let (x, w) = at(k);
        zs.push(x);
        tot += w * rec(1, n, k, d, &mut zs, &at);
        zs.pop();
    }
    Ok(tot)
}

/// Partition function by summing the symmetric-space density over all
/// `N`-subsets of the truncated lattice.
pub fn subset_partition(fam: &WeightFamily, n: usize, cfg: &OracleConfig, ctx: &QContext) -> Result<f64> {
    let pts = oracle_lattice(fam, cfg.depth_for(n), cfg, ctx)?;
    cfg.charge(binomial(pts.len(), n))?;
    let mut tot = 0.0;
    for_each_subset(&pts, n, &mut |z| {
        let w: f64 = z.iter().map(|p| p.w).product();
        if w != 0.0 {
            tot += w * symmetric_density(z, ctx);
        }
    });
    Ok(tot)
}

/// `τ_N` by direct summation: the nested configuration-space sum on a
/// single anchor, subset enumeration on two-sided supports.
pub fn brute_partition(fam: &WeightFamily, n: usize, cfg: &OracleConfig, ctx: &QContext) -> Result<f64> {
    fam.validate(ctx)?;
    cfg.check_particles(n)?;
    if n == 0 {
        return Ok(1.0);
    }
    match fam {
        WeightFamily::AlSalamCarlitz { .. } | WeightFamily::BigQJacobi { .. } => subset_partition(fam, n, cfg, ctx),
        _ => nested_partition(fam, n, cfg, ctx),
    }
}

/// A lattice point given as `(endpoint, k)`.
pub type PointSpec = (f64, i64);

/// `ρ_{N,k}(z_1..z_k) = ∏ω(z_l) Σ_{rest} density·∏W / τ_N`, the sum over
/// `(N−k)`-subsets of the lattice disjoint from the given points.
pub fn brute_correlation(
    fam: &WeightFamily,
    n: usize,
    points: &[PointSpec],
    cfg: &OracleConfig,
    ctx: &QContext,
) -> Result<f64> {
    Ok(brute_correlations(fam, n, &[points.to_vec()], cfg, ctx)?[0])
}

/// [`brute_correlation`] for several tuples sharing one `τ_N`.
pub fn brute_correlations(
    fam: &WeightFamily,
    n: usize,
    tuples: &[Vec<PointSpec>],
    cfg: &OracleConfig,
    ctx: &QContext,
) -> Result<Vec<f64>> {
    fam.validate(ctx)?;
    cfg.check_particles(n)?;
    if let Some(t) = tuples.iter().find(|t| t.len() > n) {
        return Err(Error::InvalidParameter(format!("k = {} exceeds N = {n}", t.len())));
    }
    let tau = brute_partition(fam, n, cfg, ctx)?;
    let lattice = oracle_lattice(fam, cfg.depth_for(n), cfg, ctx)?;
    let mut out = Vec::with_capacity(tuples.len());
    for points in tuples {
        let k = points.len();
        let fixed: Vec<OraclePoint> =
            points.iter().map(|&(e, kk)| oracle_point(fam, e, kk, cfg, ctx)).collect::<Result<_>>()?;
        let repeated =
            (0..k).any(|i| (0..i).any(|j| fixed[i].endpoint == fixed[j].endpoint && fixed[i].k == fixed[j].k));
        if repeated {
            out.push(0.0);
            continue;
        }
        let pts: Vec<OraclePoint> =
            lattice.iter().filter(|p| !fixed.iter().any(|f| f.endpoint == p.endpoint && f.k == p.k)).cloned().collect();
        cfg.charge(binomial(pts.len(), n - k))?;
        let om: f64 = fixed.iter().map(|p| p.omega).product();
        let mut tot = 0.0;
        let mut all: Vec<&OraclePoint> = fixed.iter().collect();
        for_each_subset(&pts, n - k, &mut |rest| {
            let w: f64 = rest.iter().map(|p| p.w).product();
            if w != 0.0 {
                all.truncate(k);
                all.extend_from_slice(rest);
                tot += w * symmetric_density(&all, ctx);
            }
        });
        out.push(om * tot / tau);
    }
    Ok(out)
}

/// Pfaffian as the signed sum over perfect matchings, expanding along the
/// first row.
fn matching_sum(a: &Matrix<f64>) -> f64 {
    fn rec(a: &Matrix<f64>, idx: &mut Vec<usize>) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let i = idx.remove(0);
        let mut tot = 0.0;
        for pos in 0..idx.len() {
            let j = idx[pos];
            let v = a[i][j];
            if v != 0.0 {
                idx.remove(pos);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                tot += sign * v * rec(a, idx);
                idx.insert(pos, j);
            }
        }
        idx.insert(0, i);
        tot
    }
    rec(a, &mut (0..a.len()).collect())
}

/// Exact Pfaffian by perfect matchings, dimension at most 10.
pub fn brute_pfaffian(a: &Matrix<f64>) -> Result<f64> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n > 10 {
        return Err(Error::InvalidParameter(format!("matching oracle limited to dimension 10, got {n}")));
    }
    Ok(matching_sum(a))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// `qdet Q = Σ_P (−1)^{N−l} ∏_{cycles} (q_{ab} q_{bc} ⋯ q_{da})^{(0)}`.
pub fn brute_qdet(m: &[Vec<Quaternion>]) -> Result<Complex64> {
    require_self_dual(m)?;
    let n = m.len();
    if n > 4 {
        return Err(Error::InvalidParameter(format!("cycle-sum oracle limited to N = 4, got {n}")));
    }
    let mut tot = Complex64::new(0.0, 0.0);
    for p in permutations(n) {
        let mut seen = vec![false; n];
        let mut term = Complex64::new(1.0, 0.0);
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut prod = Quaternion::scalar(1.0);
            let mut a = start;
            loop {
                seen[a] = true;
                prod = prod * m[a][p[a]];
                a = p[a];
                if a == start {
                    break;
                }
            }
            term *= prod.scalar_part();
        }
        let sign = if (n - cycles) % 2 == 0 { 1.0 } else { -1.0 };
        tot += sign * term;
    }
    Ok(tot)
}
