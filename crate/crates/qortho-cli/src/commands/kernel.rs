use super::{num, resolve_point, to_value, PointOut};
use crate::args::PointArg;
use crate::{CliError, ExitKind, Report, Table};
use qortho::kernels::KernelSet;
use qortho::{QContext, WeightFamily};
use serde::Serialize;

#[derive(Serialize)]
struct RankOne {
    form: &'static str,
    value: f64,
    scale: f64,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct KernelResult {
    particles: usize,
    x: PointOut,
    y: PointOut,
    k: f64,
    j_xy: f64,
    j_yx: f64,
    i: f64,
    beta: Option<f64>,
    rank_one: Option<RankOne>,
}

pub fn run(fam: &WeightFamily, n: usize, x: PointArg, y: PointArg, ctx: &QContext) -> Result<Report, CliError> {
    if n == 0 || n > 11 {
        return Err(CliError::usage(format!("--n must be between 1 and 11, got {n}")));
    }
    let (px, ox) = resolve_point(fam, x, ctx)?;
    let (py, oy) = resolve_point(fam, y, ctx)?;
    let ks = KernelSet::new(fam, n, ctx)?;
    let blk = ks.block(&px, &py)?;
    let (a, b) = (ks.index(&px)?, ks.index(&py)?);
    let tolerance = 10.0 * ctx.cmp_tol;
    // the even form needs N >= 2; N = 1 has only the odd correction term
    let rank_one = if n % 2 == 1 {
        let value = ks.j_odd_rank_one_at(a, b)?;
        let scale = ks.odd_rank_one_scale(a, b)?;
        Some(("odd_rank_one", value, scale))
    } else {
        Some(("even_rank_one", ks.j_rank_one_at(a, b)?, ks.rank_one_scale(a, b)?))
    }
    .map(|(form, value, scale)| {
        let residual = (value - blk.j_xy).abs() / scale.max(f64::MIN_POSITIVE);
        RankOne { form, value, scale, residual, tolerance, pass: residual <= tolerance }
    });
    let mut table = Table::new(&["entry", "value"]);
    for (name, v) in [("K", blk.k), ("J_xy", blk.j_xy), ("J_yx", blk.j_yx), ("I", blk.i)] {
        table.push(vec![name.into(), num(v)]);
    }
    let mut failure = None;
    if let Some(r) = &rank_one {
        table.push(vec![r.form.into(), num(r.value)]);
        if !r.pass {
            failure = Some((
                ExitKind::VerificationFailure,
                format!("J differs from its {} form: scaled residual {:e} > {:e}", r.form, r.residual, r.tolerance),
            ));
        }
    }
    let result = KernelResult {
        particles: n,
        x: ox,
        y: oy,
        k: blk.k,
        j_xy: blk.j_xy,
        j_yx: blk.j_yx,
        i: blk.i,
        beta: ks.beta(),
        rank_one,
    };
    Ok(Report { result: to_value(&result), table, failure })
}
