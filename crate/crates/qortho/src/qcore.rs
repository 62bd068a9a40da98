//! q-arithmetic primitives and Jackson integrals on exponential lattices.

use crate::error::{Error, Result};

/// Numeric policy shared by every computation: the base `q`, truncation
/// depth and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    pub q: f64,
    pub trunc_depth: usize,
    pub tail_tol: f64,
    pub cmp_tol: f64,
}

impl QContext {
    pub const DEFAULT_TRUNC_DEPTH: usize = 256;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
    pub const DEFAULT_CMP_TOL: f64 = 1e-8;

    pub fn new(q: f64) -> Result<Self> {
        Self::with(q, Self::DEFAULT_TRUNC_DEPTH, Self::DEFAULT_TAIL_TOL, Self::DEFAULT_CMP_TOL)
    }

    pub fn with(q: f64, trunc_depth: usize, tail_tol: f64, cmp_tol: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidContext(format!("q = {q} must lie in (0,1)")));
        }
        if trunc_depth < 16 {
            return Err(Error::InvalidContext(format!("trunc_depth = {trunc_depth} must be at least 16")));
        }
        if !(tail_tol > 0.0) || !(cmp_tol > 0.0) {
            return Err(Error::InvalidContext("tail_tol and cmp_tol must be positive".into()));
        }
        Ok(QContext { q, trunc_depth, tail_tol, cmp_tol })
    }

    /// The working lattice base `√q`.
    pub fn base(&self) -> f64 {
        self.q.sqrt()
    }

    /// Copy with a different `q`, keeping the tolerances.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::with(q, self.trunc_depth, self.tail_tol, self.cmp_tol)
    }

    /// Product truncation cap: large enough that `|a| q^M` falls below the
    /// tail tolerance for any finite double `a`.
    fn product_cap(&self, base: f64) -> usize {
        let need = ((self.tail_tol.ln() - 710.0) / base.ln()).ceil();
        self.trunc_depth.max(need as usize + 8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Integer,
    Half,
}

/// The point `endpoint · q^(k/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub endpoint: f64,
    pub k: i64,
}

impl LatticePoint {
    pub fn new(endpoint: f64, k: i64) -> Self {
        LatticePoint { endpoint, k }
    }

    pub fn value(&self, q: f64) -> f64 {
        self.endpoint * q.powf(self.k as f64 * 0.5)
    }

    pub fn parity(&self) -> Parity {
        if self.k.rem_euclid(2) == 0 {
            Parity::Integer
        } else {
            Parity::Half
        }
    }

    pub fn is_integer(&self) -> bool {
        self.parity() == Parity::Integer
    }

    /// The neighbour `√q` closer to zero.
    pub fn inward(&self) -> Self {
        LatticePoint { endpoint: self.endpoint, k: self.k + 1 }
    }

    pub fn same_anchor(&self, other: &LatticePoint) -> bool {
        self.endpoint.to_bits() == other.endpoint.to_bits()
    }
}

/// `[n]_q = (1 - q^n)/(1 - q)`.
pub fn q_bracket(n: f64, q: f64) -> f64 {
    (1.0 - q.powf(n)) / (1.0 - q)
}

/// `(a;q)_n` for a nonnegative integer `n`.
pub fn q_poch_finite(a: f64, q: f64, n: usize) -> f64 {
    let mut p = 1.0;
    let mut t = a;
    for _ in 0..n {
        p *= 1.0 - t;
        t *= q;
    }
    p
}

/// `(a;base)_∞` with multiplicative tail control.
pub fn q_poch_inf(a: f64, base: f64, ctx: &QContext) -> Result<f64> {
    if a == 0.0 {
        return Ok(1.0);
    }
    let cap = ctx.product_cap(base);
    let mut p = 1.0;
    let mut t = a;
    for _ in 0..cap {
        if t.abs() < ctx.tail_tol && t.abs() / (1.0 - base) < ctx.tail_tol {
            return Ok(p);
        }
        p *= 1.0 - t;
        t *= base;
    }
    Err(Error::NonConvergent { what: format!("({a};{base})_inf"), depth: cap })
}

/// `(a;q)_∞` at the context base `q`.
pub fn q_poch_infinite(a: f64, ctx: &QContext) -> Result<f64> {
    q_poch_inf(a, ctx.q, ctx)
}

/// `(a;base)_ν = (a;base)_∞ / (a base^ν; base)_∞` for real `ν`.
pub fn q_poch_gen(a: f64, base: f64, nu: f64, ctx: &QContext) -> Result<f64> {
    if nu >= 0.0 && nu.fract() == 0.0 && nu < 4096.0 {
        return Ok(q_poch_finite(a, base, nu as usize));
    }
    let shifted = a * base.powf(nu);
    // A vanishing denominator factor means a·base^(ν+i) = 1 for some i ≥ 0.
    let mut t = shifted;
    for _ in 0..ctx.product_cap(base) {
        if (1.0 - t).abs() < 1e-15 {
            return Err(Error::DivisionByVanishingProduct(format!("({a};{base})_{nu}")));
        }
        if t.abs() < 1e-3 {
            break;
        }
        t *= base;
    }
    let num = q_poch_inf(a, base, ctx)?;
    let den = q_poch_inf(shifted, base, ctx)?;
    Ok(num / den)
}

/// `(a;q)_ν` at the context base `q`.
pub fn q_poch_general(a: f64, nu: f64, ctx: &QContext) -> Result<f64> {
    q_poch_gen(a, ctx.q, nu, ctx)
}

/// `Γ_q(x) = (q;q)_∞ (1-q)^{1-x} / (q^x;q)_∞`.
pub fn q_gamma(x: f64, ctx: &QContext) -> Result<f64> {
    q_gamma_base(x, ctx.q, ctx)
}

pub fn q_gamma_base(x: f64, q: f64, ctx: &QContext) -> Result<f64> {
    let num = q_poch_inf(q, q, ctx)?;
    let den = q_poch_inf(q.powf(x), q, ctx)?;
    let v = num * (1.0 - q).powf(1.0 - x) / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("Gamma_q({x})")))
    }
}

/// Running sum of a one-directional geometric-type series with a two-step
/// tail estimate (the lattice integrands alternate between parities).
struct TailSum {
    acc: f64,
    last: [f64; 4],
    n: usize,
}

impl TailSum {
    const MIN_TERMS: usize = 8;

    fn new() -> Self {
        TailSum { acc: 0.0, last: [0.0; 4], n: 0 }
    }

    /// Adds a term and reports whether the remaining tail is negligible.
    fn push(&mut self, t: f64, tol: f64) -> bool {
        self.acc += t;
        self.last.rotate_right(1);
        self.last[0] = t.abs();
        self.n += 1;
        if self.n < Self::MIN_TERMS {
            return false;
        }
        let recent = self.last[0] + self.last[1];
        let older = self.last[2] + self.last[3];
        if recent == 0.0 {
            return older == 0.0;
        }
        if older == 0.0 {
            return false;
        }
        let r = recent / older;
        r < 1.0 && recent * r / (1.0 - r) <= tol * self.acc.abs()
    }
}

fn one_direction<F: Fn(f64) -> f64>(f: &F, anchor: f64, base: f64, step: f64, ctx: &QContext) -> Result<f64> {
    let mut s = TailSum::new();
    for n in 0..=ctx.trunc_depth {
        let x = anchor * step.powi(n as i32);
        let t = x.abs() * f(x);
        if s.push(t, ctx.tail_tol) {
            return Ok((1.0 - base) * s.acc);
        }
    }
    Err(Error::NonConvergent { what: format!("Jackson sum anchored at {anchor}"), depth: ctx.trunc_depth })
}

/// `∫_0^b f d_base x = (1-base) Σ_{n≥0} b baseⁿ f(b baseⁿ)`.
pub fn jackson_integral<F: Fn(f64) -> f64>(f: F, b: f64, base: f64, ctx: &QContext) -> Result<f64> {
    let v = one_direction(&f, b, base, base, ctx)?;
    Ok(if b < 0.0 { -v } else { v })
}

/// `∫_0^∞ f d_base x = (1-base) Σ_{n∈ℤ} baseⁿ f(baseⁿ)`.
pub fn jackson_integral_bilateral<F: Fn(f64) -> f64>(f: F, base: f64, ctx: &QContext) -> Result<f64> {
    let down = one_direction(&f, 1.0, base, base, ctx)?;
    let up = one_direction(&f, 1.0 / base, base, 1.0 / base, ctx)?;
    Ok(down + up)
}

/// `∫_a^b f d_base x` for `a < 0 < b`, both branches anchored at the ends.
pub fn jackson_integral_two_sided<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, base: f64, ctx: &QContext) -> Result<f64> {
    if !(a < 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!("two-sided integral needs a < 0 < b, got ({a}, {b})")));
    }
    let hi = one_direction(&f, b, base, base, ctx)?;
    let lo = one_direction(&f, a, base, base, ctx)?;
    Ok(hi + lo)
}

/// `D_base φ(x) = (φ(x) - φ(base x)) / ((1-base) x)`.
pub fn q_difference<F: Fn(f64) -> f64>(f: F, x: f64, base: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok((f(x) - f(base * x)) / ((1.0 - base) * x))
}
