use super::{num, point_out, rel, resolve_point, to_value, PointOut};
use crate::args::{GridArg, PointArg};
use crate::{CliError, ExitKind, Report, Table};
use qortho::kernels::KernelSet;
use qortho::oracle::{brute_correlations, OracleConfig, PointSpec};
use qortho::{LatticePoint, QContext, WeightFamily};
use serde::Serialize;

#[derive(Serialize)]
struct Row {
    points: Vec<PointOut>,
    rho: f64,
    /// Present on one-point rows.
    omega: Option<f64>,
    j_xx: Option<f64>,
    jackson_weight: Option<f64>,
    oracle: Option<f64>,
    rel: Option<f64>,
}

#[derive(Serialize)]
struct OracleSummary {
    depth: usize,
    tolerance: f64,
    /// Rows whose lattice mass is below this fraction of the largest are
    /// not compared: both sides are rounding noise there.
    mass_cutoff: f64,
    compared: usize,
    max_rel: f64,
    pass: bool,
}

#[derive(Serialize)]
struct CorrelationResult {
    particles: usize,
    rows: Vec<Row>,
    density_mass: f64,
    oracle: Option<OracleSummary>,
}

const MASS_CUTOFF: f64 = 1e-9;

#[allow(clippy::too_many_arguments)]
pub fn run(
    fam: &WeightFamily,
    n: usize,
    grid: &[GridArg],
    tuples: &[Vec<PointArg>],
    oracle: bool,
    depth: Option<usize>,
    oracle_tol: f64,
    ctx: &QContext,
) -> Result<Report, CliError> {
    if n == 0 || n > 11 {
        return Err(CliError::usage(format!("--n must be between 1 and 11, got {n}")));
    }
    let cfg = OracleConfig { depth, ..OracleConfig::default() };
    if oracle && n > cfg.max_particles {
        return Err(CliError::usage(format!("--oracle handles at most {} particles, got {n}", cfg.max_particles)));
    }
    if let Some(t) = tuples.iter().find(|t| t.is_empty() || t.len() > n) {
        return Err(CliError::usage(format!("a tuple needs between 1 and {n} points, got {}", t.len())));
    }
    let ks = KernelSet::new(fam, n, ctx)?;
    let nodes = ks.ensemble().lattice().nodes();

    let mut sets: Vec<Vec<LatticePoint>> = Vec::new();
    for g in grid {
        match *g {
            GridArg::All => sets.extend(nodes.iter().map(|nd| vec![nd.pt])),
            GridArg::Range { anchor, from, to } => {
                for k in from..=to {
                    sets.push(vec![resolve_point(fam, PointArg { anchor, k }, ctx)?.0]);
                }
            }
        }
    }
    for t in tuples {
        sets.push(t.iter().map(|&p| resolve_point(fam, p, ctx).map(|r| r.0)).collect::<Result<_, _>>()?);
    }

    let mut rows = Vec::with_capacity(sets.len());
    let mut masses = Vec::with_capacity(sets.len());
    let mut density_mass = 0.0;
    for pts in &sets {
        let idx: Vec<usize> = pts.iter().map(|p| ks.index(p)).collect::<Result<_, _>>()?;
        let rho = ks.correlation(pts)?;
        masses.push(rho.abs() * idx.iter().map(|&i| nodes[i].jw).product::<f64>());
        let one = (pts.len() == 1).then(|| nodes[idx[0]]);
        if let Some(nd) = one {
            density_mass += nd.jw * rho;
        }
        rows.push(Row {
            points: pts.iter().map(|p| point_out(fam, p, ctx)).collect(),
            rho,
            omega: one.map(|nd| nd.omega),
            j_xx: one.map(|_| ks.j_at(idx[0], idx[0])),
            jackson_weight: one.map(|nd| nd.jw),
            oracle: None,
            rel: None,
        });
    }

    let mut summary = None;
    if oracle && !sets.is_empty() {
        let specs: Vec<Vec<PointSpec>> = sets.iter().map(|t| t.iter().map(|p| (p.endpoint, p.k)).collect()).collect();
        let brute = brute_correlations(fam, n, &specs, &cfg, ctx)?;
        let top = masses.iter().cloned().fold(0.0, f64::max);
        let (mut compared, mut max_rel) = (0, 0.0f64);
        for ((row, b), m) in rows.iter_mut().zip(brute).zip(&masses) {
            row.oracle = Some(b);
            if *m >= MASS_CUTOFF * top {
                let r = rel(row.rho, b);
                row.rel = Some(r);
                max_rel = max_rel.max(r);
                compared += 1;
            }
        }
        summary = Some(OracleSummary {
            depth: cfg.depth_for(n),
            tolerance: oracle_tol,
            mass_cutoff: MASS_CUTOFF,
            compared,
            max_rel,
            pass: max_rel <= oracle_tol,
        });
    }

    let mut table = Table::new(&["points", "rho", "oracle", "rel"]);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in &rows {
        let pts: Vec<String> = r.points.iter().map(|p| format!("{}:{}", p.anchor, p.k)).collect();
        table.push(vec![pts.join(" "), num(r.rho), opt(r.oracle), opt(r.rel)]);
    }
    let failure = summary.as_ref().filter(|s| !s.pass).map(|s| {
        (
            ExitKind::VerificationFailure,
            format!("correlations differ from the oracle: max relative difference {:e} > {:e}", s.max_rel, s.tolerance),
        )
    });
    let result = CorrelationResult { particles: n, rows, density_mass, oracle: summary };
    Ok(Report { result: to_value(&result), table, failure })
}
