use super::{num, point_out, to_value, PointOut};
use crate::args::TableKind;
use crate::{CliError, Report, Table};
use qortho::families::{c_closed, gamma_closed, norm_h_closed, Ensemble, MAX_DEGREE};
use qortho::skew::f_function;
use qortho::{QContext, WeightFamily};
use serde::Serialize;

#[derive(Serialize)]
struct WeightRow {
    point: PointOut,
    jackson_weight: f64,
    rho: f64,
    omega: f64,
    f: f64,
}

#[derive(Serialize)]
struct OpRow {
    j: usize,
    h_closed: f64,
    h_numeric: f64,
    c_closed: f64,
    /// Absent at the top degree of the table, which lacks `p_{j+1}`.
    c_numeric: Option<f64>,
    gamma_closed: f64,
    gamma_numeric: Option<f64>,
}

#[derive(Serialize)]
#[serde(tag = "what", rename_all = "snake_case")]
enum TabulateResult {
    Weights { rows: Vec<WeightRow> },
    Ops { max_degree: usize, rows: Vec<OpRow> },
}

pub fn run(fam: &WeightFamily, what: TableKind, max_degree: usize, ctx: &QContext) -> Result<Report, CliError> {
    if max_degree > MAX_DEGREE {
        return Err(CliError::usage(format!("--max-degree must not exceed {MAX_DEGREE}, got {max_degree}")));
    }
    let ens = Ensemble::new(*fam, *ctx, (max_degree + 1).min(MAX_DEGREE))?;
    Ok(match what {
        TableKind::Weights => {
            let mut table = Table::new(&["anchor", "k", "x", "jackson_weight", "rho", "omega", "f"]);
            let mut rows = Vec::new();
            for nd in ens.lattice().nodes() {
                let point = point_out(fam, &nd.pt, ctx);
                let f = f_function(&nd.pt, ctx);
                table.push(vec![
                    point.anchor.to_string(),
                    point.k.to_string(),
                    num(point.x),
                    num(nd.jw),
                    num(nd.rho),
                    num(nd.omega),
                    num(f),
                ]);
                rows.push(WeightRow { point, jackson_weight: nd.jw, rho: nd.rho, omega: nd.omega, f });
            }
            Report { result: to_value(&TabulateResult::Weights { rows }), table, failure: None }
        }
        TableKind::Ops => {
            let mut table =
                Table::new(&["j", "h_closed", "h_numeric", "c_closed", "c_numeric", "gamma_closed", "gamma_numeric"]);
            let mut rows = Vec::new();
            for j in 0..=max_degree {
                let has_next = j < ens.max_degree();
                let r = OpRow {
                    j,
                    h_closed: norm_h_closed(fam, j, ctx)?,
                    h_numeric: ens.norm(j),
                    c_closed: c_closed(fam, j, ctx)?,
                    c_numeric: has_next.then(|| ens.c_numeric(j)),
                    gamma_closed: gamma_closed(fam, j, ctx)?,
                    gamma_numeric: has_next.then(|| ens.gamma_numeric(j)),
                };
                table.push(vec![
                    j.to_string(),
                    num(r.h_closed),
                    num(r.h_numeric),
                    num(r.c_closed),
                    r.c_numeric.map(num).unwrap_or_default(),
                    num(r.gamma_closed),
                    r.gamma_numeric.map(num).unwrap_or_default(),
                ]);
                rows.push(r);
            }
            Report { result: to_value(&TabulateResult::Ops { max_degree, rows }), table, failure: None }
        }
    })
}
