mod correlation;
mod kernel;
mod partition;
mod sop;
mod tabulate;
mod verify;

use crate::args::{Command, FamilyArgs, FamilyName, PointArg};
use crate::{CliError, FamilyInfo, Report};
use qortho::{LatticePoint, QContext, WeightFamily};
use serde::Serialize;
use std::collections::BTreeMap;

pub fn dispatch(cmd: &Command, ctx: &QContext, family: &mut Option<FamilyInfo>) -> Result<Report, CliError> {
    match cmd {
        Command::Partition { family: f, n, oracle, oracle_depth } => {
            let fam = with_family(f, ctx, family)?;
            partition::run(&fam, *n, *oracle, *oracle_depth, ctx)
        }
        Command::Sop { family: f, n, gauge, limit_check, limit_q } => {
            let fam = with_family(f, ctx, family)?;
            sop::run(&fam, *n, *gauge, *limit_check, *limit_q, ctx)
        }
        Command::Kernel { family: f, n, x, y } => {
            let fam = with_family(f, ctx, family)?;
            kernel::run(&fam, *n, *x, *y, ctx)
        }
        Command::Correlation { family: f, n, grid, tuple, oracle, oracle_depth, oracle_tol } => {
            let fam = with_family(f, ctx, family)?;
            correlation::run(&fam, *n, grid, tuple, *oracle, *oracle_depth, *oracle_tol, ctx)
        }
        Command::Verify { suite } => verify::run(suite, ctx),
        Command::Tabulate { family: f, what, max_degree } => {
            let fam = with_family(f, ctx, family)?;
            tabulate::run(&fam, *what, *max_degree, ctx)
        }
    }
}

fn with_family(f: &FamilyArgs, ctx: &QContext, slot: &mut Option<FamilyInfo>) -> Result<WeightFamily, CliError> {
    let fam = build_family(f)?;
    fam.validate(ctx)?;
    *slot = Some(family_info(&fam, ctx));
    Ok(fam)
}

/// Every parameter of the chosen family must be given, and no other.
pub fn build_family(f: &FamilyArgs) -> Result<WeightFamily, CliError> {
    let given: [(&str, Option<f64>); 5] = [("alpha", f.alpha), ("beta", f.beta), ("a", f.a), ("b", f.b), ("c", f.c)];
    let (name, needed): (&str, &[&str]) = match f.family {
        FamilyName::LittleQJacobi => ("little-q-jacobi", &["alpha", "beta"]),
        FamilyName::AlSalamCarlitz => ("al-salam-carlitz", &["alpha"]),
        FamilyName::QLaguerre => ("q-laguerre", &["alpha"]),
        FamilyName::BigQJacobi => ("big-q-jacobi", &["a", "b", "c"]),
    };
    for (p, v) in given {
        match (needed.contains(&p), v) {
            (true, None) => return Err(CliError::usage(format!("{name} needs --{p}"))),
            (false, Some(_)) => return Err(CliError::usage(format!("{name} takes no --{p}"))),
            _ => {}
        }
    }
    let g = |p: &str| given.iter().find(|(k, _)| *k == p).and_then(|(_, v)| *v).unwrap_or_default();
    Ok(match f.family {
        FamilyName::LittleQJacobi => WeightFamily::LittleQJacobi { alpha: g("alpha"), beta: g("beta") },
        FamilyName::AlSalamCarlitz => WeightFamily::AlSalamCarlitz { alpha: g("alpha") },
        FamilyName::QLaguerre => WeightFamily::QLaguerre { alpha: g("alpha") },
        FamilyName::BigQJacobi => WeightFamily::BigQJacobi { a: g("a"), b: g("b"), c: g("c") },
    })
}

pub fn family_info(fam: &WeightFamily, ctx: &QContext) -> FamilyInfo {
    let params: BTreeMap<&'static str, f64> = match *fam {
        WeightFamily::LittleQJacobi { alpha, beta } => [("alpha", alpha), ("beta", beta)].into(),
        WeightFamily::AlSalamCarlitz { alpha } => [("alpha", alpha)].into(),
        WeightFamily::QLaguerre { alpha } => [("alpha", alpha)].into(),
        WeightFamily::BigQJacobi { a, b, c } => [("a", a), ("b", b), ("c", c)].into(),
    };
    FamilyInfo { name: fam.name(), params, anchors: fam.anchors(ctx) }
}

/// A lattice point as stored: anchor index and exponent numerator, plus
/// the derived coordinate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointOut {
    pub anchor: usize,
    pub endpoint: f64,
    pub k: i64,
    pub x: f64,
}

pub fn resolve_point(fam: &WeightFamily, p: PointArg, ctx: &QContext) -> Result<(LatticePoint, PointOut), CliError> {
    let anchors = fam.anchors(ctx);
    let e = *anchors.get(p.anchor).ok_or_else(|| {
        CliError::usage(format!("anchor {} does not exist; {} has {} anchor(s)", p.anchor, fam.name(), anchors.len()))
    })?;
    let pt = LatticePoint::new(e, p.k);
    Ok((pt, point_out(fam, &pt, ctx)))
}

pub fn point_out(fam: &WeightFamily, pt: &LatticePoint, ctx: &QContext) -> PointOut {
    let anchor = fam.anchors(ctx).iter().position(|&e| e == pt.endpoint).unwrap_or(0);
    PointOut { anchor, endpoint: pt.endpoint, k: pt.k, x: pt.value(ctx.q) }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("result serialises")
}

pub fn rel(a: f64, b: f64) -> f64 {
    qortho::error::rel_diff(a, b)
}
