use super::{num, rel, to_value};
use crate::args::Suite;
use crate::{CliError, ExitKind, Report, Table};
use num_complex::Complex64;
use qortho::families::{c_closed, gamma_closed, norm_h_closed, partition_explicit, Ensemble};
use qortho::kernels::{density_integral, fodd_identities_check, k_reproducing_residual, odd_kernel_set, KernelSet};
use qortho::oracle::{brute_correlations, brute_partition, brute_pfaffian, brute_qdet, OracleConfig, PointSpec};
use qortho::pfaffian::{det, pfaffian};
use qortho::poly::PolySeries;
use qortho::quaternion::{qdet, Quaternion};
use qortho::skew::{partition_routes, sop_closed, sop_numeric};
use qortho::{LatticePoint, QContext, WeightFamily};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Serialize)]
struct Check {
    suite: &'static str,
    name: String,
    value: Option<f64>,
    tolerance: f64,
    pass: bool,
    error: Option<String>,
    #[serde(skip)]
    exit: ExitKind,
}

#[derive(Serialize)]
struct VerifyResult {
    suites: Vec<&'static str>,
    checks: Vec<Check>,
    passed: usize,
    failed: usize,
}

/// Collects checks of one suite. A residual is compared with `tol`; an
/// error from the library becomes a failed check carrying its exit kind.
struct Sink<'a> {
    suite: &'static str,
    out: &'a mut Vec<Check>,
}

impl Sink<'_> {
    fn check(&mut self, name: impl Into<String>, tol: f64, v: Result<f64, CliError>) {
        let name = name.into();
        let c = match v {
            Ok(v) => Check {
                suite: self.suite,
                name,
                value: Some(v),
                tolerance: tol,
                pass: v <= tol,
                error: None,
                exit: ExitKind::VerificationFailure,
            },
            Err(e) => Check {
                suite: self.suite,
                name,
                value: None,
                tolerance: tol,
                pass: false,
                error: Some(e.message),
                exit: e.exit,
            },
        };
        self.out.push(c);
    }
}

fn reference_families() -> [(WeightFamily, f64); 4] {
    [
        (WeightFamily::LittleQJacobi { alpha: 0.5, beta: 1.5 }, 0.3),
        (WeightFamily::AlSalamCarlitz { alpha: -1.0 }, 0.25),
        (WeightFamily::QLaguerre { alpha: 0.5 }, 0.25),
        (WeightFamily::BigQJacobi { a: 0.3, b: 0.2, c: -0.4 }, 0.25),
    ]
}

fn random_skew(n: usize, rng: &mut StdRng) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = -v;
        }
    }
    a
}

fn random_self_dual(n: usize, rng: &mut StdRng) -> Vec<Vec<Quaternion>> {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let zero = Complex64::new(0.0, 0.0);
    let mut m = vec![vec![Quaternion::zero(); n]; n];
    for i in 0..n {
        m[i][i] = Quaternion::new(c(), zero, zero, zero);
        for j in 0..i {
            let q = Quaternion::new(c(), c(), c(), c());
            m[i][j] = q;
            m[j][i] = q.dual();
        }
    }
    m
}

fn pfaffian_suite(s: &mut Sink, ctx: &QContext) {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut sq, mut brute): (qortho::Result<f64>, qortho::Result<f64>) = (Ok(0.0), Ok(0.0));
    for t in 0..30 {
        let a = random_skew(2 * (1 + t % 5), &mut rng);
        sq = sq.and_then(|w| Ok(w.max(rel(pfaffian(&a)?.powi(2), det(&a)?))));
        if a.len() <= 8 {
            brute = brute.and_then(|w| Ok(w.max(rel(pfaffian(&a)?, brute_pfaffian(&a)?))));
        }
    }
    s.check("Pf^2 = det, 30 random skew matrices", ctx.cmp_tol, sq.map_err(CliError::from));
    s.check("Pf = perfect-matching sum, n <= 8", ctx.cmp_tol, brute.map_err(CliError::from));
}

fn qdet_suite(s: &mut Sink, ctx: &QContext) {
    let mut rng = StdRng::seed_from_u64(12);
    let mut worst: qortho::Result<f64> = Ok(0.0);
    for t in 0..30 {
        let m = random_self_dual(1 + t % 4, &mut rng);
        worst = worst.and_then(|w| {
            let (a, b) = (qdet(&m)?, brute_qdet(&m)?);
            Ok(w.max((a - b).norm() / b.norm().max(1.0)))
        });
    }
    s.check("qdet = cycle expansion, 30 self-dual matrices", ctx.cmp_tol, worst.map_err(CliError::from));
}

fn families_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let name = fam.name();
    let ens = match Ensemble::new(*fam, *ctx, 6) {
        Ok(e) => e,
        Err(e) => return s.check(format!("{name}: table"), 0.0, Err(e.into())),
    };
    let mut orth = 0.0f64;
    for i in 0..=6 {
        for j in 0..i {
            orth =
                orth.max(ens.ip2_vals(ens.op_values(i), ens.op_values(j)).abs() / (ens.norm(i) * ens.norm(j)).sqrt());
        }
    }
    s.check(format!("{name}: orthogonality of p_0..p_6"), ctx.cmp_tol, Ok(orth));
    let closed = (|| -> Result<f64, CliError> {
        let mut w = 0.0f64;
        for j in 0..6 {
            w = w.max(rel(norm_h_closed(fam, j, ctx)?, ens.norm(j)));
            w = w.max(rel(c_closed(fam, j, ctx)?, ens.c_numeric(j)));
            w = w.max(rel(gamma_closed(fam, j, ctx)?, ens.gamma_numeric(j)));
        }
        Ok(w)
    })();
    s.check(format!("{name}: h_j, c_j, gamma_j closed = numeric, j < 6"), 1e2 * ctx.cmp_tol, closed);
}

fn operators_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let ens = match Ensemble::new(*fam, *ctx, 0) {
        Ok(e) => e,
        Err(e) => return s.check(format!("{}: table", fam.name()), 0.0, Err(e.into())),
    };
    let (mut adj, mut a4) = (0.0f64, 0.0f64);
    for i in 0..=4 {
        for j in 0..=4 {
            let (phi, psi) = (PolySeries::monomial(i), PolySeries::monomial(j));
            let (pv, sv) = (ens.values(&phi), ens.values(&psi));
            let be = ens.b_eps_vals(&sv);
            let lhs = ens.ip2_vals(&pv, &be);
            let rhs = -ens.ip1_vals(&pv, &sv);
            let abs = |v: &[f64]| v.iter().map(|x| x.abs()).collect::<Vec<_>>();
            let scale = ens.ip2_vals(&abs(&pv), &abs(&be)).max(rhs.abs()).max(f64::MIN_POSITIVE);
            adj = adj.max((lhs - rhs).abs() / scale);
            let l4 = ens.ip2(&phi, &ens.apply_a(&psi));
            let r4 = ens.ip4(&phi, &psi);
            let sc4 = l4.abs().max(r4.abs()).max((ens.ip2(&phi, &phi) * ens.ip2(&psi, &psi)).sqrt());
            a4 = a4.max((l4 - r4).abs() / sc4);
        }
    }
    s.check(format!("{}: <phi, B eps psi>_2 = -<phi, psi>_1, degrees <= 4", fam.name()), ctx.cmp_tol, Ok(adj));
    s.check(format!("{}: <phi, A psi>_2 = <phi, psi>_4, degrees <= 4", fam.name()), ctx.cmp_tol, Ok(a4));
}

fn sops_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let v = (|| -> Result<f64, CliError> {
        let (c, n) = (sop_closed(fam, 8, ctx)?, sop_numeric(fam, 8, ctx)?);
        let mut w = 0.0f64;
        for (a, b) in c.polys.iter().zip(&n.polys) {
            w = w.max(a.scaled_distance(b));
        }
        for (a, b) in c.u.iter().zip(&n.u) {
            w = w.max(rel(*a, *b));
        }
        Ok(w)
    })();
    s.check(format!("{}: Q_0..Q_7 and u_m closed = numeric (scaled)", fam.name()), ctx.cmp_tol, v);
}

fn partitions_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let name = fam.name();
    let routes = (|| -> Result<f64, CliError> {
        let mut w = 0.0f64;
        for n in 1..=8 {
            let r = partition_routes(fam, n, ctx)?;
            w = w.max(rel(r.closed, r.pfaffian));
            if n % 2 == 0 {
                w = w.max(rel(r.closed, r.product));
            }
        }
        Ok(w)
    })();
    s.check(format!("{name}: routes agree, N = 1..8"), ctx.cmp_tol, routes);
    let cfg = OracleConfig::default();
    let oracle = (|| -> Result<f64, CliError> {
        let mut w = 0.0f64;
        for n in [2, 3] {
            let r = partition_routes(fam, n, ctx)?;
            w = w.max(rel(r.closed, brute_partition(fam, n, &cfg, ctx)?));
        }
        w = w.max(rel(partition_explicit(fam, 1, ctx)?, brute_partition(fam, 2, &cfg, ctx)?));
        Ok(w)
    })();
    s.check(format!("{name}: closed form = nested sum, N = 2, 3"), 10.0 * ctx.cmp_tol, oracle);
}

fn kernels_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let name = fam.name();
    let mass = (|| -> Result<f64, CliError> {
        let mut w = 0.0f64;
        for n in 1..=5 {
            w = w.max((density_integral(&KernelSet::new(fam, n, ctx)?) - n as f64).abs() / n as f64);
        }
        Ok(w)
    })();
    s.check(format!("{name}: sum of rho_1 = N, N = 1..5"), 1e2 * ctx.cmp_tol, mass);
    let repro = KernelSet::new(fam, 4, ctx).map(|ks| k_reproducing_residual(&ks, 4)).map_err(CliError::from);
    s.check(format!("{name}: K reproduces under s, N = 4"), 1e2 * ctx.cmp_tol, repro);
    let rank = (|| -> Result<f64, CliError> {
        let ks = KernelSet::new(fam, 4, ctx)?;
        let idx = ks.bulk_indices(6);
        let mut w = 0.0f64;
        for &a in &idx {
            for &b in &idx {
                w = w.max((ks.j_at(a, b) - ks.j_rank_one_at(a, b)?).abs() / ks.rank_one_scale(a, b)?);
            }
        }
        Ok(w)
    })();
    s.check(format!("{name}: J = rank-one form, N = 4"), 10.0 * ctx.cmp_tol, rank);
    let odd = (|| -> Result<f64, CliError> {
        let r = fodd_identities_check(&odd_kernel_set(fam, 3, ctx)?, 4)?;
        Ok(r.trace_residual.max(r.semigroup_residual))
    })();
    s.check(format!("{name}: odd kernel trace and semigroup identities, N = 3"), 1e2 * ctx.cmp_tol, odd);
}

fn correlations_suite(s: &mut Sink, fam: &WeightFamily, ctx: &QContext) {
    let cfg = OracleConfig::default();
    let v = (|| -> Result<f64, CliError> {
        let mut w = 0.0f64;
        for n in [2, 3] {
            let ks = KernelSet::new(fam, n, ctx)?;
            let nodes = ks.ensemble().lattice().nodes();
            // the three nodes of largest one-point mass, where the truncated
            // nested sum is accurate
            let mut idx: Vec<usize> = (0..nodes.len()).collect();
            let mass = |i: usize| nodes[i].jw * nodes[i].omega * ks.j_at(i, i);
            idx.sort_by(|&a, &b| mass(b).total_cmp(&mass(a)));
            idx.truncate(3);
            let mut tuples: Vec<Vec<LatticePoint>> = idx.iter().map(|&i| vec![nodes[i].pt]).collect();
            for (p, &i) in idx.iter().enumerate() {
                for &j in &idx[p + 1..] {
                    tuples.push(vec![nodes[i].pt, nodes[j].pt]);
                }
            }
            let specs: Vec<Vec<PointSpec>> =
                tuples.iter().map(|t| t.iter().map(|p| (p.endpoint, p.k)).collect()).collect();
            let brute = brute_correlations(fam, n, &specs, &cfg, ctx)?;
            let vals: Vec<f64> = tuples.iter().map(|t| ks.correlation(t)).collect::<Result<_, _>>()?;
            // tuples of negligible lattice mass carry only rounding noise
            let mass: Vec<f64> = tuples
                .iter()
                .zip(&vals)
                .map(|(t, v)| v.abs() * t.iter().map(|p| nodes[ks.index(p).unwrap_or(0)].jw).product::<f64>())
                .collect();
            for k in 1..=2 {
                let top = tuples.iter().zip(&mass).filter(|(t, _)| t.len() == k).map(|(_, m)| *m).fold(0.0, f64::max);
                for ((t, (v, b)), m) in tuples.iter().zip(vals.iter().zip(&brute)).zip(&mass) {
                    if t.len() == k && *m >= 1e-9 * top {
                        w = w.max(rel(*v, *b));
                    }
                }
            }
        }
        Ok(w)
    })();
    s.check(format!("{}: kernel correlations = nested sum, N = 2, 3", fam.name()), 1e2 * ctx.cmp_tol, v);
}

pub fn run(suites: &[Suite], ctx: &QContext) -> Result<Report, CliError> {
    let suites: Vec<Suite> = if suites.is_empty() { Suite::all().to_vec() } else { suites.to_vec() };
    let mut checks = Vec::new();
    for &suite in &suites {
        let mut sink = Sink { suite: suite.name(), out: &mut checks };
        match suite {
            Suite::Pfaffian => pfaffian_suite(&mut sink, ctx),
            Suite::Qdet => qdet_suite(&mut sink, ctx),
            _ => {
                for (fam, q) in reference_families() {
                    let c = ctx.with_q(q)?;
                    match suite {
                        Suite::Families => families_suite(&mut sink, &fam, &c),
                        Suite::Operators => operators_suite(&mut sink, &fam, &c),
                        Suite::Sops => sops_suite(&mut sink, &fam, &c),
                        Suite::Partitions => partitions_suite(&mut sink, &fam, &c),
                        Suite::Kernels => kernels_suite(&mut sink, &fam, &c),
                        Suite::Correlations => correlations_suite(&mut sink, &fam, &c),
                        Suite::Pfaffian | Suite::Qdet => unreachable!(),
                    }
                }
            }
        }
    }
    let mut table = Table::new(&["suite", "check", "value", "tolerance", "pass"]);
    for c in &checks {
        let v = c.value.map(num).or_else(|| c.error.clone()).unwrap_or_default();
        table.push(vec![c.suite.into(), c.name.clone(), v, num(c.tolerance), c.pass.to_string()]);
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    // a wrong value outranks a non-convergent computation
    let failure = if failed.is_empty() {
        None
    } else {
        let exit = if failed.iter().any(|c| c.exit == ExitKind::VerificationFailure) {
            ExitKind::VerificationFailure
        } else if failed.iter().any(|c| c.exit == ExitKind::NonConvergence) {
            ExitKind::NonConvergence
        } else {
            ExitKind::SpecError
        };
        let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        Some((exit, format!("{} check(s) failed: {}", failed.len(), names.join("; "))))
    };
    let (passed, nfail) = (checks.len() - failed.len(), failed.len());
    let result = VerifyResult { suites: suites.iter().map(|s| s.name()).collect(), checks, passed, failed: nfail };
    Ok(Report { result: to_value(&result), table, failure })
}
