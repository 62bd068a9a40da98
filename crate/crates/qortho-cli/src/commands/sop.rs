use super::{num, to_value};
use crate::args::GaugeArg;
use crate::{CliError, ExitKind, Report, Table};
use qortho::families::{gamma_closed, sop_coeff_closed};
use qortho::skew::{laguerre_limit_check, sop_closed, sop_numeric_gauge, SopGauge, SopSet};
use qortho::{QContext, WeightFamily};
use serde::Serialize;

#[derive(Serialize)]
struct SopRow {
    index: usize,
    closed: Vec<f64>,
    numeric: Vec<f64>,
    max_abs_discrepancy: f64,
    max_scaled_discrepancy: f64,
}

#[derive(Serialize)]
struct URow {
    m: usize,
    closed: f64,
    numeric: f64,
    gamma: f64,
    a: f64,
}

#[derive(Serialize)]
struct LimitRow {
    n: usize,
    q: f64,
    rescaled: f64,
    target: f64,
    rel: f64,
}

#[derive(Serialize)]
struct Limit {
    alpha: f64,
    tolerance: f64,
    rows: Vec<LimitRow>,
    pass: bool,
}

#[derive(Serialize)]
struct SopResult {
    count: usize,
    gauge: &'static str,
    polys: Vec<SopRow>,
    u: Vec<URow>,
    max_scaled_discrepancy: f64,
    tolerance: f64,
    consistent: bool,
    limit_check: Option<Limit>,
}

/// Monomial-gauge closed forms: the `x^{2m}` coefficient removed with `Q_{2m}`.
fn to_monomial_gauge(set: &SopSet) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = set.polys.iter().map(|p| p.coeffs().to_vec()).collect();
    for m in 0..set.polys.len() / 2 {
        let c = set.polys[2 * m + 1].coeff(2 * m);
        out[2 * m + 1] = set.polys[2 * m + 1].axpy(-c, &set.polys[2 * m]).coeffs().to_vec();
    }
    out
}

pub const LIMIT_TOLERANCE: f64 = 0.02;

pub fn run(
    fam: &WeightFamily,
    n: usize,
    gauge: GaugeArg,
    limit: bool,
    limit_q: f64,
    ctx: &QContext,
) -> Result<Report, CliError> {
    if n == 0 || 2 * n > 12 {
        return Err(CliError::usage(format!("--n must be between 1 and 6, got {n}")));
    }
    let alpha = match *fam {
        WeightFamily::QLaguerre { alpha } => Some(alpha),
        _ => None,
    };
    if limit && alpha.is_none() {
        return Err(CliError::usage("--limit-check applies to the q-laguerre family only"));
    }
    let g = match gauge {
        GaugeArg::Op => SopGauge::OpBasis,
        GaugeArg::Monomial => SopGauge::Monomial,
    };
    let closed = sop_closed(fam, 2 * n, ctx)?;
    let numeric = sop_numeric_gauge(fam, 2 * n, g, ctx)?;
    let closed_coeffs: Vec<Vec<f64>> = match gauge {
        GaugeArg::Op => closed.polys.iter().map(|p| p.coeffs().to_vec()).collect(),
        GaugeArg::Monomial => to_monomial_gauge(&closed),
    };
    let mut polys = Vec::new();
    let mut table = Table::new(&["index", "degree", "closed", "numeric", "abs_diff"]);
    for (k, (c, p)) in closed_coeffs.iter().zip(&numeric.polys).enumerate() {
        let nc = p.coeffs().to_vec();
        let len = c.len().max(nc.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let (mut abs, mut scaled) = (0.0f64, 0.0f64);
        for i in 0..len {
            let (a, b) = (get(c, i), get(&nc, i));
            abs = abs.max((a - b).abs());
            scaled = scaled.max((a - b).abs() / 1f64.max(a.abs()).max(b.abs()));
            table.push(vec![k.to_string(), i.to_string(), num(a), num(b), num((a - b).abs())]);
        }
        polys.push(SopRow {
            index: k,
            closed: c.clone(),
            numeric: nc,
            max_abs_discrepancy: abs,
            max_scaled_discrepancy: scaled,
        });
    }
    let mut u = Vec::new();
    for m in 0..n {
        let a = if m == 0 { 0.0 } else { sop_coeff_closed(fam, m, ctx)? };
        u.push(URow { m, closed: closed.u[m], numeric: numeric.u[m], gamma: gamma_closed(fam, 2 * m, ctx)?, a });
    }
    let max_scaled = polys.iter().map(|r| r.max_scaled_discrepancy).fold(0.0, f64::max);
    let tolerance = ctx.cmp_tol;
    let consistent = max_scaled <= tolerance;
    let mut failure = (!consistent)
        .then(|| (ExitKind::VerificationFailure, format!("SOP tables disagree: {max_scaled:e} > {tolerance:e}")));
    let limit_check = match (limit, alpha) {
        (true, Some(alpha)) => {
            let mut rows = Vec::new();
            for k in 1..=n {
                let l = laguerre_limit_check(k, alpha, limit_q)?;
                rows.push(LimitRow { n: k, q: l.q, rescaled: l.rescaled, target: l.target, rel: l.rel });
            }
            let pass = rows.iter().all(|r| r.rel <= LIMIT_TOLERANCE);
            if !pass && failure.is_none() {
                failure = Some((ExitKind::VerificationFailure, "q -> 1 Laguerre limit outside 2%".into()));
            }
            Some(Limit { alpha, tolerance: LIMIT_TOLERANCE, rows, pass })
        }
        _ => None,
    };
    let result = SopResult {
        count: 2 * n,
        gauge: match gauge {
            GaugeArg::Op => "op",
            GaugeArg::Monomial => "monomial",
        },
        polys,
        u,
        max_scaled_discrepancy: max_scaled,
        tolerance,
        consistent,
        limit_check,
    };
    Ok(Report { result: to_value(&result), table, failure })
}
