use super::{num, rel, to_value};
use crate::{CliError, ExitKind, Report, Table};
use qortho::oracle::{brute_partition, OracleConfig};
use qortho::skew::partition_routes;
use qortho::{QContext, WeightFamily};
use serde::Serialize;

#[derive(Serialize)]
struct Route {
    route: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct Pair {
    a: &'static str,
    b: &'static str,
    rel: f64,
}

#[derive(Serialize)]
struct PartitionResult {
    particles: usize,
    routes: Vec<Route>,
    pairwise: Vec<Pair>,
    tolerance: f64,
    consistent: bool,
}

pub fn run(
    fam: &WeightFamily,
    n: usize,
    oracle: bool,
    depth: Option<usize>,
    ctx: &QContext,
) -> Result<Report, CliError> {
    if n == 0 || n > 11 {
        return Err(CliError::usage(format!("--n must be between 1 and 11, got {n}")));
    }
    let cfg = OracleConfig { depth, ..OracleConfig::default() };
    if oracle && n > cfg.max_particles {
        return Err(CliError::usage(format!("--oracle handles at most {} particles, got {n}", cfg.max_particles)));
    }
    let r = partition_routes(fam, n, ctx)?;
    let mut routes = if n % 2 == 0 {
        vec![
            Route { route: "explicit_product", value: r.closed },
            Route { route: "gamma_product", value: r.product },
            Route { route: "bimoment_pfaffian", value: r.pfaffian },
        ]
    } else {
        vec![Route { route: "beta_product", value: r.closed }, Route { route: "bordered_pfaffian", value: r.pfaffian }]
    };
    if oracle {
        routes.push(Route { route: "oracle", value: brute_partition(fam, n, &cfg, ctx)? });
    }
    let mut pairwise = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            pairwise.push(Pair { a: routes[i].route, b: routes[j].route, rel: rel(routes[i].value, routes[j].value) });
        }
    }
    let tolerance = ctx.cmp_tol;
    let consistent = pairwise.iter().all(|p| p.rel <= tolerance);
    let mut table = Table::new(&["route", "value"]);
    for rt in &routes {
        table.push(vec![rt.route.into(), num(rt.value)]);
    }
    let failure = (!consistent).then(|| {
        let worst = pairwise.iter().map(|p| p.rel).fold(0.0, f64::max);
        (
            ExitKind::VerificationFailure,
            format!("partition routes disagree: max relative difference {worst:e} > {tolerance:e}"),
        )
    });
    let result = PartitionResult { particles: n, routes, pairwise, tolerance, consistent };
    Ok(Report { result: to_value(&result), table, failure })
}
