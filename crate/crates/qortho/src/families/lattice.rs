//! Truncated lattice tables: every node carries its coordinate, Jackson
//! weight and the weights `ρ`, `ω`, `ω̃` evaluated once.

use super::{pearson_pair, rho_unchecked, weight_omega, Support, WeightFamily};
use crate::error::{Error, Result};
use crate::qcore::{LatticePoint, QContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub pt: LatticePoint,
    pub x: f64,
    /// Jackson weight `(1−√q)|x|`.
    pub jw: f64,
    pub rho: f64,
    pub omega: f64,
    /// `ω̃(x) = f(√q x) ρ(√q x)`.
    pub wt: f64,
    /// Sign of the branch anchor.
    pub sigma: f64,
    pub branch: usize,
}

impl Node {
    pub fn is_integer(&self) -> bool {
        self.pt.is_integer()
    }

    /// `W(x) = (1−√q)|x| ω(x)`.
    pub fn w(&self) -> f64 {
        self.jw * self.omega
    }
}

/// Nodes grouped by branch; within a branch `k` increases, i.e. points
/// move towards the origin.
#[derive(Debug, Clone)]
pub struct Lattice {
    nodes: Vec<Node>,
    ranges: Vec<(usize, usize)>,
    anchors: Vec<f64>,
}

const MIN_STEPS: i64 = 24;
const QUIET_RUN: usize = 8;
const ENVELOPE_DEGREE: i32 = 24;

impl Lattice {
    pub fn build(fam: &WeightFamily, ctx: &QContext) -> Result<Self> {
        fam.validate(ctx)?;
        let anchors = fam.anchors(ctx);
        let bilateral = fam.support(ctx) == Support::Bilateral;
        let mut nodes = Vec::new();
        let mut ranges = Vec::new();
        for (bi, &e) in anchors.iter().enumerate() {
            let mut deep = walk(fam, ctx, e, bi, 0, 1)?;
            let start = nodes.len();
            if bilateral {
                let mut shallow = walk(fam, ctx, e, bi, -1, -1)?;
                shallow.reverse();
                nodes.extend(shallow);
            }
            nodes.append(&mut deep);
            ranges.push((start, nodes.len()));
        }
        Ok(Lattice { nodes, ranges, anchors })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    /// Index ranges of the branches in `nodes()`.
    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Table index of a lattice point, if it was retained.
    pub fn index_of(&self, pt: &LatticePoint) -> Option<usize> {
        let bi = self.anchors.iter().position(|&e| e == pt.endpoint)?;
        let (s, e) = self.ranges[bi];
        let k0 = self.nodes[s].pt.k;
        let off = pt.k - k0;
        if off < 0 || off as usize >= e - s {
            return None;
        }
        Some(s + off as usize)
    }

    pub fn require(&self, pt: &LatticePoint) -> Result<usize> {
        self.index_of(pt).ok_or_else(|| {
            Error::DomainViolation(format!("point ({}, {}) is not on the truncated lattice", pt.endpoint, pt.k))
        })
    }
}

fn make_node(fam: &WeightFamily, ctx: &QContext, e: f64, bi: usize, k: i64) -> Result<Node> {
    let s = ctx.base();
    let pt = LatticePoint::new(e, k);
    let x = pt.value(ctx.q);
    let rho = rho_unchecked(fam, x, ctx)?;
    let omega = weight_omega(fam, &pt, ctx)?;
    let pp = pearson_pair(fam, ctx);
    let wt = pp.f.eval(s * x) * rho_unchecked(fam, s * x, ctx)?;
    Ok(Node { pt, x, jw: (1.0 - s) * x.abs(), rho, omega, wt, sigma: e.signum(), branch: bi })
}

/// Walks from exponent `k0` in direction `dir` until the envelope
/// `jw·max(|ρ|,|ω|)·max(1,|x|)^24` stays negligible for a run of points.
fn walk(fam: &WeightFamily, ctx: &QContext, e: f64, bi: usize, k0: i64, dir: i64) -> Result<Vec<Node>> {
    let mut out = Vec::new();
    let mut peak: f64 = 0.0;
    let mut quiet = 0usize;
    let cut = ctx.tail_tol * 1e-4;
    let mut k = k0;
    loop {
        let n = make_node(fam, ctx, e, bi, k)?;
        let env = n.jw * n.rho.abs().max(n.omega.abs()) * n.x.abs().max(1.0).powi(ENVELOPE_DEGREE);
        if !env.is_finite() {
            // overflow on the shallow side of a bilateral lattice: weight is
            // numerically zero there
            if dir < 0 && peak > 0.0 {
                break;
            }
            return Err(Error::Overflow(format!("lattice envelope at k = {k}")));
        }
        peak = peak.max(env);
        out.push(n);
        let steps = (k - k0).abs() + 1;
        if env <= cut * peak {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= QUIET_RUN && steps >= MIN_STEPS {
            break;
        }
        if steps as usize >= ctx.trunc_depth {
            return Err(Error::NonConvergent { what: format!("{} lattice tail", fam.name()), depth: ctx.trunc_depth });
        }
        k += dir;
    }
    Ok(out)
}
