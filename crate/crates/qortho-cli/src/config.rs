//! Numeric context resolution: command-line flag, then `QORTHO_*`
//! environment variable, then library default.

use crate::CliError;
use qortho::QContext;
use serde::Serialize;
use std::collections::BTreeMap;
use std::str::FromStr;

pub const ENV_Q: &str = "QORTHO_Q";
pub const ENV_TRUNC_DEPTH: &str = "QORTHO_TRUNC_DEPTH";
pub const ENV_TAIL_TOL: &str = "QORTHO_TAIL_TOL";
pub const ENV_CMP_TOL: &str = "QORTHO_CMP_TOL";
pub const DEFAULT_Q: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Default,
    Env,
    Flag,
}

/// The config block echoed at the top of every payload.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigHeader {
    pub q: f64,
    pub trunc_depth: usize,
    pub tail_tol: f64,
    pub cmp_tol: f64,
    pub sources: BTreeMap<&'static str, Source>,
    /// Every recognised environment override that was set, verbatim.
    pub env: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub q: Option<f64>,
    pub trunc_depth: Option<usize>,
    pub tail_tol: Option<f64>,
    pub cmp_tol: Option<f64>,
}

fn pick<T: FromStr + Copy>(
    name: &'static str,
    var: &str,
    flag: Option<T>,
    default: T,
    env: &BTreeMap<String, String>,
    sources: &mut BTreeMap<&'static str, Source>,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        sources.insert(name, Source::Flag);
        return Ok(v);
    }
    if let Some(raw) = env.get(var) {
        let v = raw.trim().parse().map_err(|_| CliError::usage(format!("{var} = {raw:?} is not a valid {name}")))?;
        sources.insert(name, Source::Env);
        return Ok(v);
    }
    sources.insert(name, Source::Default);
    Ok(default)
}

/// Resolves the context; `env` holds only the `QORTHO_*` variables.
pub fn resolve(flags: &Overrides, env: &BTreeMap<String, String>) -> Result<(QContext, ConfigHeader), CliError> {
    let mut sources = BTreeMap::new();
    let q = pick("q", ENV_Q, flags.q, DEFAULT_Q, env, &mut sources)?;
    let trunc_depth =
        pick("trunc_depth", ENV_TRUNC_DEPTH, flags.trunc_depth, QContext::DEFAULT_TRUNC_DEPTH, env, &mut sources)?;
    let tail_tol = pick("tail_tol", ENV_TAIL_TOL, flags.tail_tol, QContext::DEFAULT_TAIL_TOL, env, &mut sources)?;
    let cmp_tol = pick("cmp_tol", ENV_CMP_TOL, flags.cmp_tol, QContext::DEFAULT_CMP_TOL, env, &mut sources)?;
    let ctx = QContext::with(q, trunc_depth, tail_tol, cmp_tol)?;
    let header = ConfigHeader { q, trunc_depth, tail_tol, cmp_tol, sources, env: env.clone() };
    Ok((ctx, header))
}

/// The recognised variables present in the process environment.
pub fn capture_env<F: Fn(&str) -> Option<String>>(get: F) -> BTreeMap<String, String> {
    [ENV_Q, ENV_TRUNC_DEPTH, ENV_TAIL_TOL, ENV_CMP_TOL]
        .iter()
        .filter_map(|k| get(k).map(|v| (k.to_string(), v)))
        .collect()
}
