//! Browser demo: three operations over the qortho library, exposed to
//! JavaScript as JSON-returning functions. The plain Rust functions are
//! what the page calls through thin `wasm_bindgen` wrappers, so they are
//! tested natively.

use qortho::kernels::KernelSet;
use qortho::skew::{partition_routes, sop_closed};
use qortho::{QContext, WeightFamily};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest particle count the page accepts.
pub const MAX_PARTICLES: usize = 10;

/// Builds a family from its command-line name and positional parameters:
/// `(alpha, beta)`, `(alpha)`, `(alpha)` or `(a, b, c)`.
pub fn family(name: &str, params: &[f64]) -> Result<WeightFamily, String> {
    let need = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(format!("{name} takes {k} parameter(s), got {}", params.len()))
        }
    };
    let fam = match name {
        "little-q-jacobi" => need(2).map(|_| WeightFamily::LittleQJacobi { alpha: params[0], beta: params[1] }),
        "al-salam-carlitz" => need(1).map(|_| WeightFamily::AlSalamCarlitz { alpha: params[0] }),
        "q-laguerre" => need(1).map(|_| WeightFamily::QLaguerre { alpha: params[0] }),
        "big-q-jacobi" => need(3).map(|_| WeightFamily::BigQJacobi { a: params[0], b: params[1], c: params[2] }),
        _ => Err(format!("unknown family {name}")),
    }?;
    Ok(fam)
}

fn setup(name: &str, params: &[f64], q: f64, n: usize) -> Result<(WeightFamily, QContext), String> {
    if n == 0 || n > MAX_PARTICLES {
        return Err(format!("N must be between 1 and {MAX_PARTICLES}"));
    }
    let ctx = QContext::new(q).map_err(|e| e.to_string())?;
    let fam = family(name, params)?;
    fam.validate(&ctx).map_err(|e| e.to_string())?;
    Ok((fam, ctx))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Route {
    pub route: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionView {
    pub particles: usize,
    pub routes: Vec<Route>,
    pub max_rel: f64,
}

pub fn partition(name: &str, params: &[f64], q: f64, n: usize) -> Result<PartitionView, String> {
    let (fam, ctx) = setup(name, params, q, n)?;
    let r = partition_routes(&fam, n, &ctx).map_err(|e| e.to_string())?;
    let routes = if n % 2 == 0 {
        vec![
            Route { route: "explicit product", value: r.closed },
            Route { route: "gamma product", value: r.product },
            Route { route: "bimoment Pfaffian", value: r.pfaffian },
        ]
    } else {
        vec![Route { route: "beta product", value: r.closed }, Route { route: "bordered Pfaffian", value: r.pfaffian }]
    };
    let max_rel = routes
        .iter()
        .flat_map(|a| routes.iter().map(move |b| qortho::error::rel_diff(a.value, b.value)))
        .fold(0.0, f64::max);
    Ok(PartitionView { particles: n, routes, max_rel })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPoint {
    pub x: f64,
    pub k: i64,
    /// One-point correlation `ρ_{N,1}(x)`.
    pub rho: f64,
    /// Lattice mass `(1−√q)|x| ρ_{N,1}(x)`.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityView {
    pub particles: usize,
    /// Points with mass above `1e-12` of the total, ordered by `x`.
    pub points: Vec<DensityPoint>,
    /// Total lattice mass, equal to `N`.
    pub total: f64,
}

pub fn density(name: &str, params: &[f64], q: f64, n: usize) -> Result<DensityView, String> {
    let (fam, ctx) = setup(name, params, q, n)?;
    let ks = KernelSet::new(&fam, n, &ctx).map_err(|e| e.to_string())?;
    let nodes = ks.ensemble().lattice().nodes();
    let mut points: Vec<DensityPoint> = nodes
        .iter()
        .enumerate()
        .map(|(i, nd)| {
            let rho = nd.omega * ks.j_at(i, i);
            DensityPoint { x: nd.x, k: nd.pt.k, rho, mass: nd.jw * rho }
        })
        .collect();
    let total = points.iter().map(|p| p.mass).sum::<f64>();
    points.retain(|p| p.mass.abs() > 1e-12 * total.abs());
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(DensityView { particles: n, points, total })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SopView {
    /// Monomial coefficients of `Q_0..Q_{2n−1}`, lowest degree first.
    pub polys: Vec<Vec<f64>>,
    /// `u_m = ⟨Q_{2m}, Q_{2m+1}⟩`.
    pub u: Vec<f64>,
}

pub fn sop_table(name: &str, params: &[f64], q: f64, n: usize) -> Result<SopView, String> {
    let (fam, ctx) = setup(name, params, q, n)?;
    if n > 6 {
        return Err("at most 6 pairs of skew-orthogonal polynomials".into());
    }
    let s = sop_closed(&fam, 2 * n, &ctx).map_err(|e| e.to_string())?;
    Ok(SopView { polys: s.polys.iter().map(|p| p.coeffs().to_vec()).collect(), u: s.u })
}

/// `{"ok": value}` or `{"error": message}`.
fn envelope<T: Serialize>(r: Result<T, String>) -> String {
    let v = match r {
        Ok(v) => serde_json::json!({ "ok": v }),
        Err(e) => serde_json::json!({ "error": e }),
    };
    v.to_string()
}

#[wasm_bindgen(js_name = partition)]
pub fn partition_js(name: &str, params: Vec<f64>, q: f64, n: usize) -> String {
    envelope(partition(name, &params, q, n))
}

#[wasm_bindgen(js_name = density)]
pub fn density_js(name: &str, params: Vec<f64>, q: f64, n: usize) -> String {
    envelope(density(name, &params, q, n))
}

#[wasm_bindgen(js_name = sopTable)]
pub fn sop_table_js(name: &str, params: Vec<f64>, q: f64, n: usize) -> String {
    envelope(sop_table(name, &params, q, n))
}
